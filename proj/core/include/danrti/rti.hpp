#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

#include "danrti/geometry.hpp"

namespace danrti {

/// Sparse pathway-to-voxel map. Row u holds 1/sqrt(d_u) at every voxel whose
/// center passes the per-segment elliptical proximity test with margin gamma.
struct WeightMatrix {
    Eigen::SparseMatrix<double> w;  // N x M
    VoxelGrid grid;
    double gamma = 0.03;
};

/// Builds the weight matrix over all pathways in global row order. Strict
/// inequality on the ellipse test; a voxel matched by several segments of the
/// same path still receives the single value 1/sqrt(d_u).
WeightMatrix build_weight_matrix(const std::vector<Pathway>& pathways, const VoxelGrid& grid,
                                 double gamma);

/// Sentinel: resolve lambda via cross-validated one-standard-error rule.
inline constexpr double kAutoLambda1Se = -1.0;

struct ElasticNetConfig {
    double alpha = 0.87;            // L1/L2 mix in [0, 1]
    double lambda = kAutoLambda1Se; // fixed strength, or AUTO when negative
    int cv_folds = 5;
    int max_iterations = 10000;
    double tolerance = 1e-6;        // max coordinate change per sweep
    bool standardize = false;       // unit-norm columns before solving
    int lambda_grid_points = 100;
    double lambda_decades = 4.0;
    std::uint64_t cv_seed = 0;
};

struct VoxelImage {
    Eigen::VectorXd values;  // length M
    VoxelGrid grid;
    bool converged = true;
    int iterations = 0;
    double lambda = 0.0;  // strength actually used
};

struct ElasticNetSolution {
    Eigen::VectorXd x;
    bool converged = true;
    int iterations = 0;
};

/// Cyclic coordinate descent with soft-thresholding for
///   min 0.5 ||y - W x||^2 + lambda ((1-alpha)/2 ||x||^2 + alpha ||x||_1).
/// Deterministic; stops when the largest coordinate change in a sweep drops
/// below cfg.tolerance or max_iterations sweeps have run.
ElasticNetSolution elastic_net_solve(const Eigen::SparseMatrix<double>& w,
                                     const Eigen::VectorXd& y, double lambda, double alpha,
                                     const ElasticNetConfig& cfg);

/// Smallest lambda that zeroes every coordinate: ||W^T y||_inf / max(alpha, 1e-3).
double max_lambda(const Eigen::SparseMatrix<double>& w, const Eigen::VectorXd& y, double alpha);

/// Deterministic fold labels (0..folds-1) for each row, shuffled from seed.
std::vector<int> cv_fold_assignment(Eigen::Index rows, int folds, std::uint64_t seed);

/// Largest grid lambda whose K-fold CV error stays within one standard error
/// of the minimum. Fold assignment is a deterministic shuffle from cfg.cv_seed.
double select_lambda_1se(const Eigen::SparseMatrix<double>& w, const Eigen::VectorXd& y,
                         double alpha, int folds, const ElasticNetConfig& cfg);

/// Reconstructs the voxel image; resolves AUTO lambda through the 1-SE rule.
VoxelImage elastic_net(const WeightMatrix& w, const Eigen::VectorXd& dy,
                       const ElasticNetConfig& cfg);

/// Max subgradient-bound violation at x: max_v |[W^T(y - Wx)]_v -
/// lambda (1-alpha) x_v| - lambda alpha, floored at 0. Zero at an exact
/// optimum.
double kkt_violation(const Eigen::SparseMatrix<double>& w, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& x, double lambda, double alpha);

/// Objective value of the elastic-net problem at x.
double elastic_net_objective(const Eigen::SparseMatrix<double>& w, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& x, double lambda, double alpha);

}  // namespace danrti
