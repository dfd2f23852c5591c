#include "danrti/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "danrti/errors.hpp"

namespace danrti {

namespace {

// Mirror a point across the infinite line carrying wall w.
Vec2 mirror(const Vec2& p, int wall, double width, double depth) {
    switch (wall) {
        case 0: return {-p.x, p.y};
        case 1: return {2.0 * width - p.x, p.y};
        case 2: return {p.x, -p.y};
        default: return {p.x, 2.0 * depth - p.y};
    }
}

// Intersection of segment (from -> to) with the line of wall w. Returns the
// point when the crossing parameter lies strictly inside (0, 1) and the point
// falls on the finite wall segment.
std::optional<Vec2> wall_hit(const Vec2& from, const Vec2& to, int wall, double width,
                             double depth) {
    const bool vertical = wall < 2;
    const double coord = (wall == 0) ? 0.0 : (wall == 1) ? width : (wall == 2) ? 0.0 : depth;
    const double f = vertical ? from.x : from.y;
    const double t = vertical ? to.x : to.y;
    const double denom = t - f;
    if (denom == 0.0) return std::nullopt;  // parallel to the wall
    const double s = (coord - f) / denom;
    if (s <= 0.0 || s >= 1.0) return std::nullopt;
    const Vec2 p = from + s * (to - from);
    const double along = vertical ? p.y : p.x;
    const double limit = vertical ? depth : width;
    if (along < 0.0 || along > limit) return std::nullopt;
    return p;
}

double direction_angle(const Vec2& from, const Vec2& to) { return (to - from).angle(); }

Pathway finish_pathway(const NodePlacement& tx, const NodePlacement& rx, std::vector<int> wall_seq,
                       std::vector<Vec2> points, double image_distance) {
    Pathway p;
    p.order = static_cast<int>(points.size());
    p.src = tx.position;
    p.des = rx.position;
    p.wall_sequence = std::move(wall_seq);
    p.reflection_points = std::move(points);

    Vec2 prev = p.src;
    for (const Vec2& r : p.reflection_points) {
        p.segment_lengths.push_back(distance(prev, r));
        prev = r;
    }
    p.segment_lengths.push_back(distance(prev, p.des));
    p.total_distance = image_distance;
    p.delay_s = p.total_distance / kSpeedOfLight;

    const Vec2 first_anchor = p.reflection_points.empty() ? p.des : p.reflection_points.front();
    const Vec2 last_anchor = p.reflection_points.empty() ? p.src : p.reflection_points.back();
    p.aod_rad = wrap_angle(direction_angle(tx.position, first_anchor) - tx.boresight_rad);
    p.aoa_rad = wrap_angle(direction_angle(rx.position, last_anchor) - rx.boresight_rad);
    return p;
}

}  // namespace

std::array<WallSegment, 4> Scene::walls() const {
    return {WallSegment{{0.0, 0.0}, {0.0, room_depth}, 0},
            WallSegment{{room_width, 0.0}, {room_width, room_depth}, 1},
            WallSegment{{0.0, 0.0}, {room_width, 0.0}, 2},
            WallSegment{{0.0, room_depth}, {room_width, room_depth}, 3}};
}

const NodePlacement& Scene::node_by_id(int id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return n;
    }
    throw ConfigError("no node with id " + std::to_string(id));
}

void Scene::validate() const {
    if (room_width <= 0.0 || room_depth <= 0.0)
        throw ConfigError("room extents must be positive");
    if (grid.voxel_size <= 0.0) throw ConfigError("voxel size must be positive");
    if (grid.nx < 1 || grid.ny < 1) throw ConfigError("voxel grid must hold at least one voxel");
    std::set<int> ids;
    for (const auto& n : nodes) {
        if (!inside(n.position))
            throw ConfigError("node " + std::to_string(n.id) + " is not strictly inside the room");
        if (n.num_elements < 1)
            throw ConfigError("node " + std::to_string(n.id) + " needs at least one element");
        if (!ids.insert(n.id).second)
            throw ConfigError("duplicate node id " + std::to_string(n.id));
    }
}

VoxelGrid make_centered_grid(double room_width, double room_depth, double voxel_size) {
    VoxelGrid g;
    g.voxel_size = voxel_size;
    g.nx = std::max(1, static_cast<int>(std::floor(room_width / voxel_size + 1e-9)));
    g.ny = std::max(1, static_cast<int>(std::floor(room_depth / voxel_size + 1e-9)));
    g.origin = {(room_width - g.nx * voxel_size) / 2.0, (room_depth - g.ny * voxel_size) / 2.0};
    return g;
}

LinkTopology enumerate_links(const Scene& scene) {
    if (scene.nodes.size() < 2)
        throw ConfigError("link enumeration needs at least two nodes");
    std::vector<int> ids;
    ids.reserve(scene.nodes.size());
    for (const auto& n : scene.nodes) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());

    LinkTopology topo;
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
            topo.links.push_back({ids[i], ids[j]});
    return topo;
}

std::vector<Vec2> Pathway::anchors() const {
    std::vector<Vec2> a;
    a.reserve(reflection_points.size() + 2);
    a.push_back(src);
    a.insert(a.end(), reflection_points.begin(), reflection_points.end());
    a.push_back(des);
    return a;
}

std::vector<Pathway> trace_pathways(const Scene& scene, const Link& link, int max_order) {
    if (max_order < 0 || max_order > 2)
        throw ContractError("max_order must be 0, 1 or 2");
    const NodePlacement& tx = scene.node_by_id(link.node_a);
    const NodePlacement& rx = scene.node_by_id(link.node_b);
    const double w = scene.room_width;
    const double d = scene.room_depth;
    if (distance(tx.position, rx.position) < 1e-12)
        throw GeometryError("link endpoints coincide");

    std::vector<Pathway> paths;
    paths.push_back(finish_pathway(tx, rx, {}, {}, distance(tx.position, rx.position)));

    if (max_order >= 1) {
        for (int wall = 0; wall < 4; ++wall) {
            const Vec2 image = mirror(tx.position, wall, w, d);
            const auto hit = wall_hit(image, rx.position, wall, w, d);
            if (!hit) continue;
            paths.push_back(
                finish_pathway(tx, rx, {wall}, {*hit}, distance(image, rx.position)));
        }
    }
    if (max_order >= 2) {
        for (int w1 = 0; w1 < 4; ++w1) {
            for (int w2 = 0; w2 < 4; ++w2) {
                if (w1 == w2) continue;
                const Vec2 i1 = mirror(tx.position, w1, w, d);
                const Vec2 i2 = mirror(i1, w2, w, d);
                // Unfold backwards: last bounce first, then validate the first
                // bounce against the image of the transmitter.
                const auto p2 = wall_hit(i2, rx.position, w2, w, d);
                if (!p2) continue;
                const auto p1 = wall_hit(i1, *p2, w1, w, d);
                if (!p1) continue;
                paths.push_back(finish_pathway(tx, rx, {w1, w2}, {*p1, *p2},
                                               distance(i2, rx.position)));
            }
        }
    }

    for (std::size_t i = 0; i < paths.size(); ++i) {
        paths[i].path_index = static_cast<int>(i);
    }
    return paths;
}

std::vector<double> pathway_detour_sums(const Pathway& path, const Vec2& voxel_center) {
    const std::vector<Vec2> a = path.anchors();
    std::vector<double> sums;
    sums.reserve(a.size() - 1);
    for (std::size_t k = 0; k + 1 < a.size(); ++k)
        sums.push_back(distance(voxel_center, a[k]) + distance(voxel_center, a[k + 1]));
    return sums;
}

}  // namespace danrti
