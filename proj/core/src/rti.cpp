#include "danrti/rti.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "danrti/errors.hpp"
#include "danrti/rng.hpp"

namespace danrti {

namespace {

struct EllipseBox {
    int ix0, ix1, iy0, iy1;  // inclusive voxel index ranges
    bool empty;
};

// Axis-aligned bounding box of { p : |p-a| + |p-b| < len + gamma } clipped to
// the grid, in voxel indices.
EllipseBox ellipse_voxel_box(const Vec2& a, const Vec2& b, double margin, const VoxelGrid& grid) {
    const Vec2 center = 0.5 * (a + b);
    const double c = 0.5 * distance(a, b);
    const double semi_major = c + 0.5 * margin;
    const double semi_minor = std::sqrt(std::max(0.0, semi_major * semi_major - c * c));
    const Vec2 dir = (b - a).normalized();
    const double ex = std::abs(dir.x) * semi_major + std::abs(dir.y) * semi_minor;
    const double ey = std::abs(dir.y) * semi_major + std::abs(dir.x) * semi_minor;

    const double s = grid.voxel_size;
    EllipseBox box;
    box.ix0 = std::max(0, static_cast<int>(std::floor((center.x - ex - grid.origin.x) / s - 0.5)));
    box.ix1 = std::min(grid.nx - 1,
                       static_cast<int>(std::ceil((center.x + ex - grid.origin.x) / s - 0.5)));
    box.iy0 = std::max(0, static_cast<int>(std::floor((center.y - ey - grid.origin.y) / s - 0.5)));
    box.iy1 = std::min(grid.ny - 1,
                       static_cast<int>(std::ceil((center.y + ey - grid.origin.y) / s - 0.5)));
    box.empty = box.ix0 > box.ix1 || box.iy0 > box.iy1;
    return box;
}

// Compressed-column view plus dense scratch used by the coordinate sweeps.
struct CdWorkspace {
    const Eigen::SparseMatrix<double>* w;
    Eigen::VectorXd col_norm2;
};

CdWorkspace make_workspace(const Eigen::SparseMatrix<double>& w) {
    CdWorkspace ws;
    ws.w = &w;
    ws.col_norm2.resize(w.cols());
    for (Eigen::Index v = 0; v < w.cols(); ++v) {
        double acc = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(w, v); it; ++it)
            acc += it.value() * it.value();
        ws.col_norm2(v) = acc;
    }
    return ws;
}

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// One coordinate-descent sweep over the given column set; returns the largest
// coordinate change. Residual r = y - W x is kept in sync.
template <typename ColRange>
double cd_sweep(const CdWorkspace& ws, const ColRange& cols, double lambda, double alpha,
                Eigen::VectorXd& x, Eigen::VectorXd& r) {
    const Eigen::SparseMatrix<double>& w = *ws.w;
    const double l1 = lambda * alpha;
    const double l2 = lambda * (1.0 - alpha);
    double max_delta = 0.0;
    for (const Eigen::Index v : cols) {
        const double norm2 = ws.col_norm2(v);
        if (norm2 == 0.0) continue;
        double grad = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(w, v); it; ++it)
            grad += it.value() * r(it.row());
        const double rho = grad + norm2 * x(v);
        const double next = soft_threshold(rho, l1) / (norm2 + l2);
        const double delta = next - x(v);
        if (delta != 0.0) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(w, v); it; ++it)
                r(it.row()) -= delta * it.value();
            x(v) = next;
            max_delta = std::max(max_delta, std::abs(delta));
        }
    }
    return max_delta;
}

struct AllCols {
    Eigen::Index n;
    struct iterator {
        Eigen::Index i;
        Eigen::Index operator*() const { return i; }
        iterator& operator++() { ++i; return *this; }
        bool operator!=(const iterator& o) const { return i != o.i; }
    };
    iterator begin() const { return {0}; }
    iterator end() const { return {n}; }
};

// Warm-startable solver core. Full sweeps bracket active-set iterations so
// the converged support is certified against all coordinates.
ElasticNetSolution cd_solve(const CdWorkspace& ws, const Eigen::VectorXd& y, double lambda,
                            double alpha, const ElasticNetConfig& cfg, Eigen::VectorXd x) {
    const Eigen::SparseMatrix<double>& w = *ws.w;
    ElasticNetSolution sol;
    Eigen::VectorXd r = y - w * x;

    int iterations = 0;
    bool converged = false;
    while (iterations < cfg.max_iterations) {
        const double full_delta = cd_sweep(ws, AllCols{w.cols()}, lambda, alpha, x, r);
        ++iterations;
        if (full_delta < cfg.tolerance) {
            converged = true;
            break;
        }
        std::vector<Eigen::Index> active;
        for (Eigen::Index v = 0; v < x.size(); ++v)
            if (x(v) != 0.0) active.push_back(v);
        while (iterations < cfg.max_iterations) {
            const double delta = cd_sweep(ws, active, lambda, alpha, x, r);
            ++iterations;
            if (delta < cfg.tolerance) break;
        }
    }
    sol.x = std::move(x);
    sol.converged = converged;
    sol.iterations = iterations;
    return sol;
}

Eigen::SparseMatrix<double> select_rows(const Eigen::SparseMatrix<double>& w,
                                        const std::vector<int>& rows) {
    std::vector<int> remap(w.rows(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i) remap[rows[i]] = static_cast<int>(i);
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index v = 0; v < w.cols(); ++v)
        for (Eigen::SparseMatrix<double>::InnerIterator it(w, v); it; ++it)
            if (remap[it.row()] >= 0) trips.emplace_back(remap[it.row()], v, it.value());
    Eigen::SparseMatrix<double> out(static_cast<Eigen::Index>(rows.size()), w.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

std::vector<double> lambda_grid(double lmax, int points, double decades) {
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = lmax;
        return grid;
    }
    const double f = std::pow(10.0, -decades / (points - 1));
    double v = lmax;
    for (int i = 0; i < points; ++i) {
        grid[i] = v;
        v *= f;
    }
    return grid;
}

}  // namespace

WeightMatrix build_weight_matrix(const std::vector<Pathway>& pathways, const VoxelGrid& grid,
                                 double gamma) {
    if (pathways.empty()) throw ContractError("weight matrix needs at least one pathway");
    if (gamma <= 0.0) throw ContractError("gamma must be positive");

    WeightMatrix out;
    out.grid = grid;
    out.gamma = gamma;

    const Eigen::Index n = static_cast<Eigen::Index>(pathways.size());
    const Eigen::Index m = grid.count();
    std::vector<Eigen::Triplet<double>> trips;
    std::vector<char> seen(m, 0);
    std::vector<int> touched;

    for (Eigen::Index u = 0; u < n; ++u) {
        const Pathway& path = pathways[u];
        if (path.total_distance <= 0.0)
            throw GeometryError("pathway with zero travel distance in weight matrix");
        const double value = 1.0 / std::sqrt(path.total_distance);
        const std::vector<Vec2> anchors = path.anchors();
        touched.clear();
        for (std::size_t k = 0; k + 1 < anchors.size(); ++k) {
            const Vec2& a = anchors[k];
            const Vec2& b = anchors[k + 1];
            const double bound = path.segment_lengths[k] + gamma;
            const EllipseBox box = ellipse_voxel_box(a, b, gamma, grid);
            if (box.empty) continue;
            for (int iy = box.iy0; iy <= box.iy1; ++iy) {
                for (int ix = box.ix0; ix <= box.ix1; ++ix) {
                    const int v = grid.index(ix, iy);
                    if (seen[v]) continue;
                    const Vec2 c = grid.center(v);
                    if (distance(c, a) + distance(c, b) < bound) {
                        seen[v] = 1;
                        touched.push_back(v);
                    }
                }
            }
        }
        for (const int v : touched) {
            trips.emplace_back(u, v, value);
            seen[v] = 0;
        }
    }
    out.w.resize(n, m);
    out.w.setFromTriplets(trips.begin(), trips.end());
    return out;
}

std::vector<int> cv_fold_assignment(Eigen::Index rows, int folds, std::uint64_t seed) {
    std::vector<int> order(rows);
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(derive_seed(seed, 0x1fe));
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold_of(rows);
    for (Eigen::Index i = 0; i < rows; ++i) fold_of[order[i]] = static_cast<int>(i % folds);
    return fold_of;
}

ElasticNetSolution elastic_net_solve(const Eigen::SparseMatrix<double>& w,
                                     const Eigen::VectorXd& y, double lambda, double alpha,
                                     const ElasticNetConfig& cfg) {
    if (w.rows() != y.size()) throw ContractError("observation length must match matrix rows");
    if (alpha < 0.0 || alpha > 1.0) throw ContractError("alpha must lie in [0, 1]");
    if (lambda < 0.0) throw ContractError("lambda must be non-negative");

    if (!cfg.standardize) {
        const CdWorkspace ws = make_workspace(w);
        return cd_solve(ws, y, lambda, alpha, cfg, Eigen::VectorXd::Zero(w.cols()));
    }

    // Solve in unit-column scale, then map coefficients back.
    Eigen::SparseMatrix<double> scaled = w;
    Eigen::VectorXd scale(w.cols());
    for (Eigen::Index v = 0; v < w.cols(); ++v) {
        double acc = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(scaled, v); it; ++it)
            acc += it.value() * it.value();
        scale(v) = acc > 0.0 ? std::sqrt(acc) : 1.0;
    }
    for (Eigen::Index v = 0; v < scaled.cols(); ++v)
        for (Eigen::SparseMatrix<double>::InnerIterator it(scaled, v); it; ++it)
            it.valueRef() /= scale(v);
    const CdWorkspace ws = make_workspace(scaled);
    ElasticNetSolution sol = cd_solve(ws, y, lambda, alpha, cfg, Eigen::VectorXd::Zero(w.cols()));
    sol.x.array() /= scale.array();
    return sol;
}

double max_lambda(const Eigen::SparseMatrix<double>& w, const Eigen::VectorXd& y, double alpha) {
    const Eigen::VectorXd g = w.transpose() * y;
    return g.lpNorm<Eigen::Infinity>() / std::max(alpha, 1e-3);
}

double select_lambda_1se(const Eigen::SparseMatrix<double>& w, const Eigen::VectorXd& y,
                         double alpha, int folds, const ElasticNetConfig& cfg) {
    if (folds < 2) throw ContractError("cross-validation needs at least 2 folds");
    if (w.rows() < folds) throw ContractError("not enough rows to split into folds");

    const double lmax = max_lambda(w, y, alpha);
    if (lmax == 0.0 || y.lpNorm<Eigen::Infinity>() == 0.0) return lmax;

    const std::vector<double> grid = lambda_grid(lmax, cfg.lambda_grid_points, cfg.lambda_decades);
    const std::vector<int> fold_of = cv_fold_assignment(w.rows(), folds, cfg.cv_seed);

    // cv_err(f, i): held-out MSE of fold f at grid lambda i.
    Eigen::MatrixXd cv_err(folds, static_cast<Eigen::Index>(grid.size()));
    for (int f = 0; f < folds; ++f) {
        std::vector<int> train_rows, test_rows;
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            (fold_of[i] == f ? test_rows : train_rows).push_back(static_cast<int>(i));
        const Eigen::SparseMatrix<double> w_train = select_rows(w, train_rows);
        const Eigen::SparseMatrix<double> w_test = select_rows(w, test_rows);
        Eigen::VectorXd y_train(train_rows.size()), y_test(test_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) y_train(i) = y(train_rows[i]);
        for (std::size_t i = 0; i < test_rows.size(); ++i) y_test(i) = y(test_rows[i]);

        const CdWorkspace ws = make_workspace(w_train);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(w.cols());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            ElasticNetSolution sol = cd_solve(ws, y_train, grid[i], alpha, cfg, std::move(x));
            x = std::move(sol.x);
            const Eigen::VectorXd resid = y_test - w_test * x;
            cv_err(f, static_cast<Eigen::Index>(i)) = resid.squaredNorm() / test_rows.size();
        }
    }

    Eigen::VectorXd mean = cv_err.colwise().mean();
    Eigen::Index best = 0;
    mean.minCoeff(&best);
    const Eigen::VectorXd dev = cv_err.col(best).array() - mean(best);
    const double sd = std::sqrt(dev.squaredNorm() / std::max(folds - 1, 1));
    const double threshold = mean(best) + sd / std::sqrt(static_cast<double>(folds));

    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (mean(static_cast<Eigen::Index>(i)) <= threshold) return grid[i];  // grid is descending
    }
    return grid[best];
}

VoxelImage elastic_net(const WeightMatrix& w, const Eigen::VectorXd& dy,
                       const ElasticNetConfig& cfg) {
    double lambda = cfg.lambda;
    if (lambda < 0.0) lambda = select_lambda_1se(w.w, dy, cfg.alpha, cfg.cv_folds, cfg);
    ElasticNetSolution sol = elastic_net_solve(w.w, dy, lambda, cfg.alpha, cfg);
    VoxelImage img;
    img.values = std::move(sol.x);
    img.grid = w.grid;
    img.converged = sol.converged;
    img.iterations = sol.iterations;
    img.lambda = lambda;
    return img;
}

double kkt_violation(const Eigen::SparseMatrix<double>& w, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& x, double lambda, double alpha) {
    const Eigen::VectorXd g = w.transpose() * (y - w * x);
    double worst = 0.0;
    for (Eigen::Index v = 0; v < x.size(); ++v) {
        const double stat = std::abs(g(v) - lambda * (1.0 - alpha) * x(v)) - lambda * alpha;
        worst = std::max(worst, stat);
    }
    return std::max(0.0, worst);
}

double elastic_net_objective(const Eigen::SparseMatrix<double>& w, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& x, double lambda, double alpha) {
    const double fit = 0.5 * (y - w * x).squaredNorm();
    const double pen =
        lambda * ((1.0 - alpha) / 2.0 * x.squaredNorm() + alpha * x.lpNorm<1>());
    return fit + pen;
}

}  // namespace danrti
