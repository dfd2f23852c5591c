#include "danrti/beamform.hpp"

#include <cmath>

#include "danrti/errors.hpp"

namespace danrti {

namespace {

// Snapshot-domain powers, no correlation matrix materialized:
//   expectation: mean_s |a^H h_s|^2
//   quadratic:   a^H R R^H a = w^H (H^H H) w / S^2 with w = H^H a.
double projected_power(const std::vector<ChannelSnapshot>& snaps, const Eigen::VectorXcd& a,
                       BeamformMode mode) {
    const int s_count = static_cast<int>(snaps.size());
    Eigen::VectorXcd w(s_count);
    for (int s = 0; s < s_count; ++s) w(s) = snaps[s].h.dot(a);  // h^H a
    if (mode == BeamformMode::kExpectation) return w.squaredNorm() / s_count;

    Eigen::MatrixXcd gram(s_count, s_count);
    for (int i = 0; i < s_count; ++i)
        for (int j = 0; j < s_count; ++j) gram(i, j) = snaps[i].h.dot(snaps[j].h);
    const std::complex<double> q = w.dot(gram * w);  // w^H G w
    return q.real() / (static_cast<double>(s_count) * s_count);
}

double mean_channel_power(const std::vector<ChannelSnapshot>& snaps) {
    double acc = 0.0;
    for (const auto& s : snaps) acc += s.h.squaredNorm();
    return acc / snaps.size();
}

void check_snapshots(const std::vector<ChannelSnapshot>& snaps, const char* what) {
    if (snaps.empty()) throw ContractError(std::string(what) + ": empty snapshot set");
    for (const auto& s : snaps)
        if (s.h.size() != snaps.front().h.size())
            throw ContractError(std::string(what) + ": inconsistent snapshot lengths");
}

}  // namespace

CorrelationMatrix correlation(const std::vector<ChannelSnapshot>& snapshots) {
    check_snapshots(snapshots, "correlation");
    const Eigen::Index dim = snapshots.front().h.size();
    CorrelationMatrix out;
    out.R = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& s : snapshots) out.R.noalias() += s.h * s.h.adjoint();
    out.R /= static_cast<double>(snapshots.size());
    out.snapshot_count = static_cast<int>(snapshots.size());
    return out;
}

double beam_power(const CorrelationMatrix& corr, const Eigen::VectorXcd& steering) {
    if (corr.R.rows() != steering.size())
        throw ContractError("beam_power: steering length does not match R");
    const Eigen::VectorXcd ra = corr.R.adjoint() * steering;
    return ra.squaredNorm();
}

double beam_power_expectation(const CorrelationMatrix& corr, const Eigen::VectorXcd& steering) {
    if (corr.R.rows() != steering.size())
        throw ContractError("beam_power: steering length does not match R");
    const std::complex<double> q = steering.dot(corr.R * steering);
    return q.real();
}

LinkBaselinePowers baseline_powers(const std::vector<ChannelSnapshot>& baseline,
                                   const std::vector<Eigen::VectorXcd>& responses,
                                   const BeamformOptions& options) {
    check_snapshots(baseline, "rss_change baseline");
    const double base_scale = mean_channel_power(baseline);
    LinkBaselinePowers out;
    out.power.reserve(responses.size());
    out.valid.reserve(responses.size());
    for (const Eigen::VectorXcd& a : responses) {
        const double base = projected_power(baseline, a, options.mode);
        out.power.push_back(base);
        out.valid.push_back(base > options.degenerate_ratio * base_scale * a.squaredNorm());
    }
    return out;
}

std::vector<PathRssChange> rss_change_cached(const std::vector<ChannelSnapshot>& current,
                                             const LinkBaselinePowers& baseline,
                                             const std::vector<Pathway>& pathways,
                                             const std::vector<Eigen::VectorXcd>& responses,
                                             const BeamformOptions& options) {
    check_snapshots(current, "rss_change current");
    if (pathways.empty()) throw ContractError("rss_change: no pathways");
    if (pathways.size() != responses.size() || pathways.size() != baseline.power.size())
        throw ContractError("rss_change: pathway/response/baseline size mismatch");

    std::vector<PathRssChange> out;
    out.reserve(pathways.size());
    for (std::size_t n = 0; n < pathways.size(); ++n) {
        PathRssChange entry;
        entry.link_index = pathways[n].link_index;
        entry.path_index = pathways[n].path_index;
        entry.order = pathways[n].order;
        if (!baseline.valid[n]) {
            entry.valid = false;
            out.push_back(entry);
            continue;
        }
        const double cur = projected_power(current, responses[n], options.mode);
        double dy = 10.0 * std::log10(cur / baseline.power[n]);
        if (!(dy >= options.floor_db)) dy = options.floor_db;  // also catches -inf/NaN from cur=0
        entry.dy_db = dy;
        out.push_back(entry);
    }
    return out;
}

std::vector<PathRssChange> rss_change_with_responses(
    const std::vector<ChannelSnapshot>& current, const std::vector<ChannelSnapshot>& baseline,
    const std::vector<Pathway>& pathways, const std::vector<Eigen::VectorXcd>& responses,
    const BeamformOptions& options) {
    const LinkBaselinePowers cache = baseline_powers(baseline, responses, options);
    return rss_change_cached(current, cache, pathways, responses, options);
}

std::vector<PathRssChange> rss_change(const std::vector<ChannelSnapshot>& current,
                                      const std::vector<ChannelSnapshot>& baseline,
                                      const std::vector<Pathway>& pathways,
                                      const WaveformSpec& spec, int tx_elements, int rx_elements,
                                      const BeamformOptions& options) {
    std::vector<Eigen::VectorXcd> responses;
    responses.reserve(pathways.size());
    for (const Pathway& p : pathways)
        responses.push_back(path_response(p, spec, tx_elements, rx_elements));
    return rss_change_with_responses(current, baseline, pathways, responses, options);
}

RssChangeVector assemble_rss_changes(const std::vector<std::vector<PathRssChange>>& per_link) {
    RssChangeVector out;
    std::vector<double> values;
    for (const auto& link_changes : per_link) {
        for (const auto& c : link_changes) {
            if (!c.valid) {
                out.dropped.push_back(c);
                continue;
            }
            values.push_back(c.dy_db);
            out.index_map.emplace_back(c.link_index, c.path_index);
        }
    }
    out.dy_db = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
    return out;
}

}  // namespace danrti
