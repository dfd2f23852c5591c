#include "danrti/locate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "danrti/errors.hpp"

namespace danrti {

BinarizedImage binarize(const VoxelImage& image, double threshold_fraction) {
    if (threshold_fraction <= 0.0 || threshold_fraction >= 1.0)
        throw ContractError("binarization threshold must lie in (0, 1)");
    BinarizedImage out;
    out.threshold_fraction = threshold_fraction;
    if (image.values.size() == 0) return out;
    const double peak = image.values.maxCoeff();
    if (peak <= 0.0) return out;
    const double cut = threshold_fraction * peak;
    for (Eigen::Index v = 0; v < image.values.size(); ++v)
        if (image.values(v) > cut) out.active.push_back(static_cast<int>(v));
    return out;
}

std::vector<ActiveVoxel> active_voxels(const VoxelImage& image, const BinarizedImage& bin) {
    std::vector<ActiveVoxel> pts;
    pts.reserve(bin.active.size());
    for (const int v : bin.active)
        pts.push_back({v, image.grid.center(v), image.values(v)});
    return pts;
}

std::vector<Cluster> dbscan(const std::vector<ActiveVoxel>& points, double eps, int min_pts) {
    if (eps <= 0.0) throw ContractError("dbscan eps must be positive");
    if (min_pts < 1) throw ContractError("dbscan min_pts must be >= 1");

    const int n = static_cast<int>(points.size());
    const double eps2 = eps * eps;
    auto neighbors = [&](int i) {
        std::vector<int> out;
        for (int j = 0; j < n; ++j)
            if ((points[i].position - points[j].position).squared_norm() <= eps2)
                out.push_back(j);  // includes i itself
        return out;
    };

    constexpr int kUnvisited = -2;
    constexpr int kNoise = -1;
    std::vector<int> label(n, kUnvisited);
    std::vector<std::vector<int>> groups;

    for (int i = 0; i < n; ++i) {
        if (label[i] != kUnvisited) continue;
        std::vector<int> nb = neighbors(i);
        if (static_cast<int>(nb.size()) < min_pts) {
            label[i] = kNoise;
            continue;
        }
        const int cluster_id = static_cast<int>(groups.size());
        groups.emplace_back();
        label[i] = cluster_id;
        groups.back().push_back(i);
        std::deque<int> frontier(nb.begin(), nb.end());
        while (!frontier.empty()) {
            const int j = frontier.front();
            frontier.pop_front();
            if (label[j] == kNoise) {  // border point claimed by this cluster
                label[j] = cluster_id;
                groups[cluster_id].push_back(j);
            }
            if (label[j] != kUnvisited) continue;
            label[j] = cluster_id;
            groups[cluster_id].push_back(j);
            std::vector<int> nb2 = neighbors(j);
            if (static_cast<int>(nb2.size()) >= min_pts)
                frontier.insert(frontier.end(), nb2.begin(), nb2.end());
        }
    }

    std::vector<Cluster> clusters;
    clusters.reserve(groups.size());
    for (auto& members : groups) {
        std::sort(members.begin(), members.end());
        Cluster c;
        double wx = 0.0, wy = 0.0;
        for (const int j : members) {
            c.members.push_back(points[j].voxel);
            c.score += points[j].value;
            wx += points[j].value * points[j].position.x;
            wy += points[j].value * points[j].position.y;
        }
        if (c.score != 0.0) {
            c.centroid = {wx / c.score, wy / c.score};
        } else {
            // Degenerate all-zero weights: fall back to the plain mean.
            for (const int j : members) c.centroid += points[j].position;
            c.centroid = c.centroid / static_cast<double>(members.size());
        }
        clusters.push_back(std::move(c));
    }
    return clusters;
}

PositionEstimates estimate_positions(const std::vector<Cluster>& clusters, int k) {
    if (k < 1) throw ContractError("expected target count must be >= 1");
    std::vector<int> order(clusters.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return clusters[a].score > clusters[b].score; });

    PositionEstimates out;
    const int take = std::min<int>(k, static_cast<int>(clusters.size()));
    for (int i = 0; i < take; ++i) out.positions.push_back(clusters[order[i]].centroid);
    out.shortfall = take < k;
    return out;
}

namespace {

// Exact min-cost assignment of truths to distinct estimates via subset DP;
// a truth may stay unmatched at cost `penalty`.
double assign_costs(const std::vector<Vec2>& estimates, const std::vector<Vec2>& truths,
                    double penalty, std::vector<double>& per_truth) {
    const int nt = static_cast<int>(truths.size());
    const int ne = static_cast<int>(estimates.size());
    per_truth.assign(nt, penalty);
    if (ne == 0) return penalty * nt;

    if (ne > 20) {
        // Greedy fallback; estimate sets this large do not occur in practice.
        std::vector<bool> used(ne, false);
        double total = 0.0;
        for (int t = 0; t < nt; ++t) {
            int best = -1;
            double best_d = penalty;
            for (int e = 0; e < ne; ++e)
                if (!used[e]) {
                    const double d = distance(truths[t], estimates[e]);
                    if (d < best_d) {
                        best_d = d;
                        best = e;
                    }
                }
            if (best >= 0) used[best] = true;
            per_truth[t] = best_d;
            total += best_d;
        }
        return total;
    }

    const int masks = 1 << ne;
    const double inf = std::numeric_limits<double>::infinity();
    // dp[mask] = least cost covering truths 0..t-1 with estimate usage `mask`.
    std::vector<double> dp(masks, inf), next(masks);
    std::vector<std::vector<int>> choice(nt, std::vector<int>(masks, -2));
    dp[0] = 0.0;
    for (int t = 0; t < nt; ++t) {
        std::fill(next.begin(), next.end(), inf);
        for (int mask = 0; mask < masks; ++mask) {
            if (dp[mask] == inf) continue;
            if (dp[mask] + penalty < next[mask]) {  // leave truth t unmatched
                next[mask] = dp[mask] + penalty;
                choice[t][mask] = -1;
            }
            for (int e = 0; e < ne; ++e) {
                if (mask & (1 << e)) continue;
                const double c = dp[mask] + distance(truths[t], estimates[e]);
                const int m2 = mask | (1 << e);
                if (c < next[m2]) {
                    next[m2] = c;
                    choice[t][m2] = e;
                }
            }
        }
        dp.swap(next);
    }
    int best_mask = 0;
    double best = inf;
    for (int mask = 0; mask < masks; ++mask)
        if (dp[mask] < best) {
            best = dp[mask];
            best_mask = mask;
        }
    // Walk choices backwards to recover per-truth costs.
    int mask = best_mask;
    for (int t = nt - 1; t >= 0; --t) {
        const int e = choice[t][mask];
        if (e >= 0) {
            per_truth[t] = distance(truths[t], estimates[e]);
            mask &= ~(1 << e);
        } else {
            per_truth[t] = penalty;
        }
    }
    return best;
}

}  // namespace

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> errors) {
    std::sort(errors.begin(), errors.end());
    std::vector<std::pair<double, double>> cdf;
    cdf.reserve(errors.size());
    const double n = static_cast<double>(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i)
        cdf.emplace_back(errors[i], (i + 1) / n);
    return cdf;
}

ErrorSummary localization_error(const std::vector<Vec2>& estimates,
                                const std::vector<Vec2>& truths, double penalty) {
    if (truths.empty()) throw ContractError("localization error needs at least one truth");
    ErrorSummary out;
    assign_costs(estimates, truths, penalty, out.per_target);

    std::vector<double> sorted = out.per_target;
    std::sort(sorted.begin(), sorted.end());
    double acc = 0.0;
    for (const double e : sorted) acc += e;
    out.mean = acc / sorted.size();
    const std::size_t n = sorted.size();
    out.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    out.cdf = empirical_cdf(sorted);
    return out;
}

}  // namespace danrti
