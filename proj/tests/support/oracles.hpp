#pragma once

// Test-only reference implementations. Everything here recomputes results
// from first principles, independent of the library's algorithmic shortcuts,
// so the production path can be checked against brute force.

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "danrti/geometry.hpp"

namespace oracle {

using danrti::Pathway;
using danrti::Scene;
using danrti::Vec2;

// ---------------------------------------------------------------------------
// Geometry

/// Reflect a point across the line through (a, b) using the general formula.
inline Vec2 reflect_point(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = (b - a).normalized();
    const Vec2 ap = p - a;
    const Vec2 proj = a + d * ap.dot(d);
    return proj + (proj - p);
}

/// Reflect a direction across the line direction d (specular bounce).
inline Vec2 reflect_direction(const Vec2& v, const Vec2& wall_dir) {
    const Vec2 d = wall_dir.normalized();
    return d * (2.0 * v.dot(d)) - v;
}

/// Forward ray shooting: start at the source aimed at the first claimed
/// reflection point, bounce specularly at each wall, and measure how far the
/// final ray passes from the receiver. The LoS case returns 0 when des lies
/// on the src->first-anchor ray.
inline double ray_shoot_miss_distance(const Scene& scene, const Pathway& path) {
    if (path.order == 0) {
        return 0.0;  // trivially exact; distances checked separately
    }
    const auto walls = scene.walls();
    Vec2 pos = path.src;
    Vec2 dir = (path.reflection_points.front() - path.src).normalized();
    for (int k = 0; k < path.order; ++k) {
        const auto& wall = walls[path.wall_sequence[k]];
        // Intersect the ray with the wall line.
        const Vec2 wd = wall.b - wall.a;
        const double denom = dir.cross(wd);
        if (std::abs(denom) < 1e-15) return std::numeric_limits<double>::infinity();
        const double t = (wall.a - pos).cross(wd) / denom;
        if (t <= 0.0) return std::numeric_limits<double>::infinity();
        const Vec2 hit = pos + dir * t;
        if (danrti::distance(hit, path.reflection_points[k]) > 1e-6)
            return danrti::distance(hit, path.reflection_points[k]);
        dir = reflect_direction(dir, wd);
        pos = hit;
    }
    // Distance from the receiver to the outgoing ray.
    const Vec2 to_des = path.des - pos;
    const double along = to_des.dot(dir);
    if (along <= 0.0) return to_des.norm();
    return (to_des - dir * along).norm();
}

/// Total distance from the iterated mirror image of the source to the
/// destination, with reflections applied in wall-sequence order.
inline double iterated_image_distance(const Scene& scene, const Pathway& path) {
    const auto walls = scene.walls();
    Vec2 image = path.src;
    for (int k = 0; k < path.order; ++k) {
        const auto& w = walls[path.wall_sequence[k]];
        image = reflect_point(image, w.a, w.b);
    }
    return danrti::distance(image, path.des);
}

/// Specular-law residual at reflection point k: |sin(theta_in) - sin(theta_out)|
/// via cross products with the wall direction.
inline double specular_residual(const Scene& scene, const Pathway& path, int k) {
    const auto walls = scene.walls();
    const auto anchors = path.anchors();
    const Vec2 incoming = (anchors[k + 1] - anchors[k]).normalized();
    const Vec2 outgoing = (anchors[k + 2] - anchors[k + 1]).normalized();
    const Vec2 wd = (walls[path.wall_sequence[k]].b - walls[path.wall_sequence[k]].a).normalized();
    // Equal angles of incidence/reflection: cross terms match in magnitude,
    // dot terms match in sign.
    return std::abs(std::abs(incoming.cross(wd)) - std::abs(outgoing.cross(wd))) +
           std::abs(incoming.dot(wd) - outgoing.dot(wd));
}

// ---------------------------------------------------------------------------
// Elastic net

inline double en_objective(const Eigen::MatrixXd& w, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& x, double lambda, double alpha) {
    const double fit = 0.5 * (y - w * x).squaredNorm();
    return fit + lambda * ((1.0 - alpha) / 2.0 * x.squaredNorm() + alpha * x.lpNorm<1>());
}

/// Joint exhaustive lattice minimization with recursive refinement: evaluate
/// a full 3^M lattice over the box, re-center on the best point, halve the
/// box, repeat. Feasible for M <= 6.
inline Eigen::VectorXd lattice_search(const Eigen::MatrixXd& w, const Eigen::VectorXd& y,
                                      double lambda, double alpha, double box_half_width,
                                      int levels) {
    const int m = static_cast<int>(w.cols());
    Eigen::VectorXd center = Eigen::VectorXd::Zero(m);
    double width = box_half_width;
    const int points = 3;
    std::vector<int> digits(m, 0);
    for (int level = 0; level < levels; ++level) {
        Eigen::VectorXd best = center;
        double best_obj = en_objective(w, y, center, lambda, alpha);
        std::fill(digits.begin(), digits.end(), 0);
        const long long total = static_cast<long long>(std::pow(points, m));
        Eigen::VectorXd cand(m);
        for (long long it = 0; it < total; ++it) {
            long long rem = it;
            for (int d = 0; d < m; ++d) {
                digits[d] = static_cast<int>(rem % points);
                rem /= points;
            }
            for (int d = 0; d < m; ++d)
                cand(d) = center(d) + (digits[d] - 1) * width;
            const double obj = en_objective(w, y, cand, lambda, alpha);
            if (obj < best_obj) {
                best_obj = obj;
                best = cand;
            }
        }
        center = best;
        width *= 0.5;
    }
    return center;
}

/// Cyclic exhaustive 1-D lattice minimization: every coordinate in turn is
/// set to the best value on a fine grid (pure objective evaluations). Sound
/// for this convex separable-nonsmooth objective; works for any M.
inline Eigen::VectorXd coordinate_lattice_search(const Eigen::MatrixXd& w,
                                                 const Eigen::VectorXd& y, double lambda,
                                                 double alpha, double box_half_width,
                                                 int grid_points, int sweeps) {
    const int m = static_cast<int>(w.cols());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
    double width = box_half_width;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double largest_move = 0.0;
        for (int v = 0; v < m; ++v) {
            double best_val = x(v);
            double best_obj = en_objective(w, y, x, lambda, alpha);
            for (int g = 0; g <= grid_points; ++g) {
                const double cand = x(v) - width + 2.0 * width * g / grid_points;
                Eigen::VectorXd xc = x;
                xc(v) = cand;
                const double obj = en_objective(w, y, xc, lambda, alpha);
                if (obj < best_obj) {
                    best_obj = obj;
                    best_val = cand;
                }
            }
            largest_move = std::max(largest_move, std::abs(best_val - x(v)));
            x(v) = best_val;
        }
        // Only tighten the scan window once the iterate stops making
        // window-sized moves; otherwise keep scanning at this scale.
        if (largest_move < 0.9 * width) width *= 0.5;
    }
    return x;
}

// ---------------------------------------------------------------------------
// DBSCAN

struct RefCluster {
    std::vector<int> point_indices;  // sorted
};

/// Reference DBSCAN via the full neighbor graph: cores are points with >=
/// min_pts neighbors (self included); clusters are connected components of
/// the core-core adjacency; border points attach to the component holding
/// their lowest-index core neighbor's component, where components are ordered
/// by their minimum core index (matching deterministic seeding order).
inline std::vector<RefCluster> dbscan_reference(const std::vector<Vec2>& pts, double eps,
                                                int min_pts) {
    const int n = static_cast<int>(pts.size());
    const double eps2 = eps * eps;
    std::vector<std::vector<int>> nb(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if ((pts[i] - pts[j]).squared_norm() <= eps2) nb[i].push_back(j);

    std::vector<bool> core(n, false);
    for (int i = 0; i < n; ++i) core[i] = static_cast<int>(nb[i].size()) >= min_pts;

    // Union-find over core points.
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (int i = 0; i < n; ++i) {
        if (!core[i]) continue;
        for (const int j : nb[i])
            if (core[j]) parent[find(i)] = find(j);
    }

    // Component order = minimum core index.
    std::vector<int> comp_min(n, std::numeric_limits<int>::max());
    for (int i = 0; i < n; ++i)
        if (core[i]) comp_min[find(i)] = std::min(comp_min[find(i)], i);

    std::vector<std::pair<int, int>> roots;  // (min index, root)
    for (int i = 0; i < n; ++i)
        if (core[i] && find(i) == i) roots.push_back({comp_min[i], i});
    std::sort(roots.begin(), roots.end());

    std::vector<int> cluster_of_root(n, -1);
    std::vector<RefCluster> clusters(roots.size());
    for (std::size_t c = 0; c < roots.size(); ++c) cluster_of_root[roots[c].second] = static_cast<int>(c);

    for (int i = 0; i < n; ++i) {
        if (core[i]) {
            clusters[cluster_of_root[find(i)]].point_indices.push_back(i);
            continue;
        }
        // Border point: earliest-seeded component among core neighbors.
        int best_cluster = -1;
        for (const int j : nb[i]) {
            if (!core[j]) continue;
            const int c = cluster_of_root[find(j)];
            if (best_cluster < 0 || c < best_cluster) best_cluster = c;
        }
        if (best_cluster >= 0) clusters[best_cluster].point_indices.push_back(i);
    }
    for (auto& c : clusters) std::sort(c.point_indices.begin(), c.point_indices.end());
    return clusters;
}

}  // namespace oracle
