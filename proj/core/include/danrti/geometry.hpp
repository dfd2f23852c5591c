#pragma once

#include <array>
#include <optional>
#include <vector>

#include "danrti/vec2.hpp"

namespace danrti {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// One anchor node: position, array boresight and element count (M_T = M_R).
struct NodePlacement {
    int id = 0;
    Vec2 position;
    double boresight_rad = 0.0;
    int num_elements = 1;
};

/// Uniform voxel grid covering the area of interest. Voxel v = iy * nx + ix,
/// center at origin + ((ix + 0.5) s, (iy + 0.5) s).
struct VoxelGrid {
    Vec2 origin;
    double voxel_size = 0.1;
    int nx = 1;
    int ny = 1;

    int count() const { return nx * ny; }
    int index(int ix, int iy) const { return iy * nx + ix; }
    Vec2 center(int v) const {
        const int ix = v % nx;
        const int iy = v / nx;
        return {origin.x + (ix + 0.5) * voxel_size, origin.y + (iy + 0.5) * voxel_size};
    }
};

/// Wall of the axis-aligned room, indexed 0: x=0, 1: x=width, 2: y=0, 3: y=depth.
struct WallSegment {
    Vec2 a;
    Vec2 b;
    int index = 0;
};

/// 2-D scene: rectangular room with corner at the origin, anchor nodes and the
/// voxel grid. Antenna height is informational; all pathway math is planar.
struct Scene {
    double room_width = 0.0;
    double room_depth = 0.0;
    double antenna_height = 1.3;
    std::vector<NodePlacement> nodes;
    VoxelGrid grid;

    std::array<WallSegment, 4> walls() const;
    bool inside(const Vec2& p) const {
        return p.x > 0.0 && p.x < room_width && p.y > 0.0 && p.y < room_depth;
    }
    double diagonal() const { return std::hypot(room_width, room_depth); }
    const NodePlacement& node_by_id(int id) const;

    /// Throws ConfigError when an invariant fails (room extents, node placement,
    /// duplicate ids, grid sizing).
    void validate() const;
};

/// Grid with cell counts floor(room/size), centered inside the room so that a
/// mirrored scene maps voxel centers onto voxel centers.
VoxelGrid make_centered_grid(double room_width, double room_depth, double voxel_size);

struct Link {
    int node_a = 0;  // lower id
    int node_b = 0;
};

struct LinkTopology {
    std::vector<Link> links;
    int link_count() const { return static_cast<int>(links.size()); }
};

/// All unordered node pairs, lower id first, ordered so node 1's pairs come
/// first. Throws ConfigError with fewer than two nodes.
LinkTopology enumerate_links(const Scene& scene);

/// One specular propagation path between the endpoints of a link.
struct Pathway {
    int link_index = 0;
    int path_index = 0;
    int order = 0;  // number of wall bounces, 0..2
    Vec2 src;
    Vec2 des;
    std::vector<int> wall_sequence;       // wall indices, length == order
    std::vector<Vec2> reflection_points;  // length == order
    std::vector<double> segment_lengths;  // length == order + 1
    double total_distance = 0.0;
    double delay_s = 0.0;
    double aod_rad = 0.0;  // first-segment direction relative to Tx boresight
    double aoa_rad = 0.0;  // last-anchor direction seen from Rx, relative to Rx boresight

    /// src, reflection points, des.
    std::vector<Vec2> anchors() const;
};

/// Enumerates the LoS path and all valid image-method reflections up to
/// max_order (0..2) off the four walls. Ordering is deterministic: LoS, then
/// first order by wall index, then second order by wall-index pairs. Throws
/// GeometryError for coincident endpoints.
std::vector<Pathway> trace_pathways(const Scene& scene, const Link& link, int max_order);

/// Per-segment detour sums for a voxel center: for segment k bounded by
/// consecutive anchors (p, q), element k is |voxel - p| + |voxel - q|.
std::vector<double> pathway_detour_sums(const Pathway& path, const Vec2& voxel_center);

}  // namespace danrti
