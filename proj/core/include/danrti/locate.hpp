#pragma once

#include <vector>

#include "danrti/rti.hpp"
#include "danrti/vec2.hpp"

namespace danrti {

/// Voxels above a fraction of the image maximum.
struct BinarizedImage {
    std::vector<int> active;  // voxel indices, ascending
    double threshold_fraction = 0.5;
};

/// Active iff value > fraction * max(values). A non-positive maximum yields an
/// empty set. Fraction must lie in (0, 1).
BinarizedImage binarize(const VoxelImage& image, double threshold_fraction);

/// One clustering input point: an active voxel with its image value.
struct ActiveVoxel {
    int voxel = 0;
    Vec2 position;
    double value = 0.0;
};

std::vector<ActiveVoxel> active_voxels(const VoxelImage& image, const BinarizedImage& bin);

/// Density-connected cluster of active voxels. Centroid is the value-weighted
/// mean of member centers, score the summed values.
struct Cluster {
    std::vector<int> members;  // voxel indices
    Vec2 centroid;
    double score = 0.0;
};

/// Plain DBSCAN: a core point has >= min_pts neighbors within eps (itself
/// included); clusters are density-connected components; border points join
/// the first core that reaches them in input order; noise is dropped.
std::vector<Cluster> dbscan(const std::vector<ActiveVoxel>& points, double eps, int min_pts);

struct PositionEstimates {
    std::vector<Vec2> positions;
    bool shortfall = false;  // fewer clusters than requested targets
};

/// Centroids of the k highest-score clusters, score-descending.
PositionEstimates estimate_positions(const std::vector<Cluster>& clusters, int k);

/// Per-truth localization errors plus summary statistics.
struct ErrorSummary {
    std::vector<double> per_target;                 // one entry per truth
    double mean = 0.0;
    double median = 0.0;
    std::vector<std::pair<double, double>> cdf;     // (error, cumulative fraction)
};

/// Minimum-cost assignment of estimates to truths under Euclidean distance;
/// truths left unmatched cost `penalty`. Throws ContractError when truths is
/// empty.
ErrorSummary localization_error(const std::vector<Vec2>& estimates,
                                const std::vector<Vec2>& truths, double penalty);

/// Empirical CDF of a pooled error sample (sorted, no binning).
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> errors);

}  // namespace danrti
