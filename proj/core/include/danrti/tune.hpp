#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace danrti {

/// Box-bounded search space for the pipeline parameters.
struct TuneSpace {
    std::vector<std::pair<double, double>> bounds;  // per-dimension (lower, upper)
    int budget = 30;
    std::uint64_t seed = 0;
    /// Recorded objective value when an evaluation returns non-finite.
    double penalty_value = 1e3;
    /// Squared-exponential length scale in unit-box coordinates.
    double length_scale = 0.2;
    double jitter = 1e-6;
    int acquisition_candidates = 1024;

    int dims() const { return static_cast<int>(bounds.size()); }
};

struct TuneTrace {
    std::vector<std::vector<double>> parameters;
    std::vector<double> values;
    int best_index = 0;

    const std::vector<double>& best_parameters() const { return parameters[best_index]; }
    double best_value() const { return values[best_index]; }
};

/// Zero-mean GP with a squared-exponential kernel on unit-box inputs and
/// standardized outputs. Exposed for the surrogate's own tests.
class GaussianProcess {
  public:
    GaussianProcess(double length_scale, double jitter)
        : length_scale_(length_scale), jitter_(jitter) {}

    void fit(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y);
    /// Predictive mean in original output units.
    double mean(const Eigen::VectorXd& x) const;
    /// Predictive standard deviation in original output units.
    double stddev(const Eigen::VectorXd& x) const;

  private:
    double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

    double length_scale_;
    double jitter_;
    std::vector<Eigen::VectorXd> x_;
    Eigen::VectorXd alpha_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
};

/// Expected improvement below `best` for a minimization problem.
double expected_improvement(double mean, double stddev, double best);

using Objective = std::function<double(const std::vector<double>&)>;

/// Sequential Bayesian minimization: Latin-hypercube initial design of size
/// max(5, dims + 2), then GP + expected-improvement steps with random
/// multistart and pattern-search refinement. Deterministic under space.seed.
TuneTrace bayes_optimize(const Objective& objective, const TuneSpace& space);

}  // namespace danrti
