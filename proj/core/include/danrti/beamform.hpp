#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "danrti/channel.hpp"

namespace danrti {

/// Sample correlation matrix of a snapshot set.
struct CorrelationMatrix {
    Eigen::MatrixXcd R;
    int snapshot_count = 0;
};

/// Mean of snapshot outer products h h^H. Throws ContractError on an empty or
/// inconsistent snapshot list.
CorrelationMatrix correlation(const std::vector<ChannelSnapshot>& snapshots);

/// Quadratic beam power a^H R R^H a (real, >= 0).
double beam_power(const CorrelationMatrix& corr, const Eigen::VectorXcd& steering);

/// Expectation-form beam power a^H R a = E[|a^H h|^2].
double beam_power_expectation(const CorrelationMatrix& corr, const Eigen::VectorXcd& steering);

/// Numerator/denominator form of the per-path dB ratio.
enum class BeamformMode {
    /// Snapshot-averaged projected power E[|a^H h|^2]; recovers injected dB
    /// gain changes one-to-one. Default.
    kExpectation,
    /// Quadratic form a^H R R^H a on the sample correlation.
    kQuadratic,
};

struct BeamformOptions {
    BeamformMode mode = BeamformMode::kExpectation;
    /// Lower clamp for the dB output, keeps fully blocked paths finite.
    double floor_db = -60.0;
    /// A path is degenerate when its baseline projected power falls below
    /// this fraction of the link's total baseline power scale.
    double degenerate_ratio = 1e-15;
};

/// RSS change of one path; invalid entries mark degenerate baselines that
/// must be excluded from the inverse problem.
struct PathRssChange {
    int link_index = 0;
    int path_index = 0;
    int order = 0;
    double dy_db = 0.0;
    bool valid = true;
};

/// Per-path RSS change of one link: 10 log10 of the beamformed power ratio
/// between current and baseline snapshot sets, clamped from below at
/// options.floor_db.
std::vector<PathRssChange> rss_change(const std::vector<ChannelSnapshot>& current,
                                      const std::vector<ChannelSnapshot>& baseline,
                                      const std::vector<Pathway>& pathways,
                                      const WaveformSpec& spec, int tx_elements, int rx_elements,
                                      const BeamformOptions& options = {});

/// Same, against precomputed per-path steering vectors (columns of the
/// response matrix); avoids rebuilding them per call.
std::vector<PathRssChange> rss_change_with_responses(
    const std::vector<ChannelSnapshot>& current, const std::vector<ChannelSnapshot>& baseline,
    const std::vector<Pathway>& pathways, const std::vector<Eigen::VectorXcd>& responses,
    const BeamformOptions& options = {});

/// Per-path baseline beam powers of one link, with the degeneracy verdicts
/// already applied; lets many target conditions reuse one baseline pass.
struct LinkBaselinePowers {
    std::vector<double> power;
    std::vector<bool> valid;
};

LinkBaselinePowers baseline_powers(const std::vector<ChannelSnapshot>& baseline,
                                   const std::vector<Eigen::VectorXcd>& responses,
                                   const BeamformOptions& options = {});

std::vector<PathRssChange> rss_change_cached(const std::vector<ChannelSnapshot>& current,
                                             const LinkBaselinePowers& baseline,
                                             const std::vector<Pathway>& pathways,
                                             const std::vector<Eigen::VectorXcd>& responses,
                                             const BeamformOptions& options = {});

/// Global observation vector over all links with the (link, path) -> u map.
struct RssChangeVector {
    Eigen::VectorXd dy_db;
    std::vector<std::pair<int, int>> index_map;  // u -> (link, path)
    std::vector<PathRssChange> dropped;          // degenerate paths, excluded
};

/// Stacks per-link results in link order, assigning consecutive global path
/// indices to valid entries.
RssChangeVector assemble_rss_changes(const std::vector<std::vector<PathRssChange>>& per_link);

}  // namespace danrti
