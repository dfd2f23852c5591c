#include "danrti/tune.hpp"

#include <algorithm>
#include <cmath>

#include "danrti/errors.hpp"
#include "danrti/rng.hpp"

namespace danrti {

namespace {

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / 2.50662827463100050242;  // sqrt(2 pi)
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.41421356237309504880); }

Eigen::VectorXd to_unit(const std::vector<double>& p, const TuneSpace& space) {
    Eigen::VectorXd u(space.dims());
    for (int d = 0; d < space.dims(); ++d) {
        const auto [lo, hi] = space.bounds[d];
        u(d) = (p[d] - lo) / (hi - lo);
    }
    return u;
}

std::vector<double> from_unit(const Eigen::VectorXd& u, const TuneSpace& space) {
    std::vector<double> p(space.dims());
    for (int d = 0; d < space.dims(); ++d) {
        const auto [lo, hi] = space.bounds[d];
        p[d] = lo + std::clamp(u(d), 0.0, 1.0) * (hi - lo);
    }
    return p;
}

std::vector<Eigen::VectorXd> latin_hypercube(int n, int dims, std::mt19937_64& rng) {
    std::vector<Eigen::VectorXd> pts(n, Eigen::VectorXd(dims));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int d = 0; d < dims; ++d) {
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < n; ++i) pts[i](d) = (perm[i] + unit(rng)) / n;
    }
    return pts;
}

void validate_space(const TuneSpace& space) {
    if (space.bounds.empty()) throw ContractError("tune space needs at least one dimension");
    for (const auto& [lo, hi] : space.bounds)
        if (!(lo < hi)) throw ContractError("tune bounds must satisfy lower < upper");
    if (space.budget < space.dims() + 2)
        throw ContractError("tune budget must be at least dims + 2");
}

}  // namespace

void GaussianProcess::fit(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) throw ContractError("GP fit needs matching samples");
    x_ = x;
    const int n = static_cast<int>(x.size());

    y_mean_ = 0.0;
    for (const double v : y) y_mean_ += v;
    y_mean_ /= n;
    double var = 0.0;
    for (const double v : y) var += (v - y_mean_) * (v - y_mean_);
    y_scale_ = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
    if (y_scale_ <= 0.0) y_scale_ = 1.0;  // constant observations

    Eigen::VectorXd ty(n);
    for (int i = 0; i < n; ++i) ty(i) = (y[i] - y_mean_) / y_scale_;

    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = kernel(x_[i], x_[j]);
    double jitter = jitter_;
    for (int attempt = 0; attempt < 8; ++attempt) {
        chol_.compute(k + jitter * Eigen::MatrixXd::Identity(n, n));
        if (chol_.info() == Eigen::Success) break;
        jitter *= 10.0;
    }
    alpha_ = chol_.solve(ty);
}

double GaussianProcess::kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    const double d2 = (a - b).squaredNorm() / (length_scale_ * length_scale_);
    return std::exp(-0.5 * d2);
}

double GaussianProcess::mean(const Eigen::VectorXd& x) const {
    Eigen::VectorXd ks(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) ks(static_cast<Eigen::Index>(i)) = kernel(x, x_[i]);
    return y_mean_ + y_scale_ * ks.dot(alpha_);
}

double GaussianProcess::stddev(const Eigen::VectorXd& x) const {
    Eigen::VectorXd ks(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) ks(static_cast<Eigen::Index>(i)) = kernel(x, x_[i]);
    const Eigen::VectorXd v = chol_.solve(ks);
    const double var = 1.0 - ks.dot(v);
    return y_scale_ * std::sqrt(std::max(var, 0.0));
}

double expected_improvement(double mean, double stddev, double best) {
    if (stddev <= 0.0) return std::max(best - mean, 0.0);
    const double z = (best - mean) / stddev;
    return (best - mean) * normal_cdf(z) + stddev * normal_pdf(z);
}

TuneTrace bayes_optimize(const Objective& objective, const TuneSpace& space) {
    validate_space(space);
    const int dims = space.dims();
    auto rng = make_rng(derive_seed(space.seed, 0x70e));

    TuneTrace trace;
    auto record = [&](const Eigen::VectorXd& u) {
        const std::vector<double> p = from_unit(u, space);
        double value = objective(p);
        if (!std::isfinite(value)) value = space.penalty_value;
        trace.parameters.push_back(p);
        trace.values.push_back(value);
        if (value < trace.values[trace.best_index])
            trace.best_index = static_cast<int>(trace.values.size()) - 1;
    };

    const int init = std::max(5, dims + 2);
    std::vector<Eigen::VectorXd> design = latin_hypercube(init, dims, rng);
    std::vector<Eigen::VectorXd> observed;
    for (const auto& u : design) {
        if (static_cast<int>(trace.values.size()) >= space.budget) break;
        record(u);
        observed.push_back(u);
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    GaussianProcess gp(space.length_scale, space.jitter);
    while (static_cast<int>(trace.values.size()) < space.budget) {
        gp.fit(observed, trace.values);
        const double best = trace.values[trace.best_index];

        Eigen::VectorXd best_u(dims);
        double best_ei = -1.0;
        for (int c = 0; c < space.acquisition_candidates; ++c) {
            Eigen::VectorXd u(dims);
            for (int d = 0; d < dims; ++d) u(d) = unit(rng);
            const double ei = expected_improvement(gp.mean(u), gp.stddev(u), best);
            if (ei > best_ei) {
                best_ei = ei;
                best_u = u;
            }
        }
        // Pattern-search refinement around the best candidate.
        double step = 0.05;
        while (step > 1e-4) {
            bool improved = false;
            for (int d = 0; d < dims; ++d) {
                for (const double sign : {1.0, -1.0}) {
                    Eigen::VectorXd u = best_u;
                    u(d) = std::clamp(u(d) + sign * step, 0.0, 1.0);
                    const double ei = expected_improvement(gp.mean(u), gp.stddev(u), best);
                    if (ei > best_ei) {
                        best_ei = ei;
                        best_u = u;
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        record(best_u);
        observed.push_back(best_u);
    }
    return trace;
}

}  // namespace danrti
