#pragma once

#include <string>
#include <vector>

#include "danrti/beamform.hpp"
#include "danrti/channel.hpp"
#include "danrti/geometry.hpp"
#include "danrti/locate.hpp"
#include "danrti/protocol.hpp"
#include "danrti/rti.hpp"

namespace danrti {

/// Deterministic shortest-roundtrip text form of a double ("%.17g" trimmed).
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

/// link,path,order,delay_ns,aod_deg,aoa_deg,distance_m,reflections
/// (reflections: `x:y` pairs joined by `;`).
std::string pathways_csv(const std::vector<Pathway>& pathways);

/// link,path,order,dy_db for valid entries.
std::string rss_csv(const RssChangeVector& rss);

/// u,v,value triplets, one per line.
std::string weight_matrix_triplets(const WeightMatrix& w);

/// position,truth_x,truth_y,est_x,est_y,error_m rows.
struct ResultRow {
    int position_id = 0;
    Vec2 truth;
    bool has_estimate = false;
    Vec2 estimate;
    double error_m = 0.0;
};
std::string results_csv(const std::vector<ResultRow>& rows);

/// error_m,cumulative_fraction rows of an empirical CDF.
std::string cdf_csv(const std::vector<std::pair<double, double>>& cdf);

/// Voxel image as a CSV grid (row per y index, origin row first).
std::string image_csv(const VoxelImage& image);

/// 16-bit binary PGM (P5), row-major with the top image row first; the image
/// maximum maps to 65535, non-positive values to 0.
std::vector<unsigned char> image_pgm(const VoxelImage& image);
void write_binary_file(const std::string& path, const std::vector<unsigned char>& bytes);

/// time_s,node,event,phase,detail rows.
std::string event_log_csv(const EventLog& log);

/// Human-readable phase listing.
std::string plan_text(const MeasurementPlan& plan);

/// Little-endian snapshot record file:
///   magic "DRTISNAP", u32 version, u32 link, u32 mt, u32 mr, u32 delay_bins,
///   u32 snapshots, then snapshots * (mt*mr*delay_bins) complex doubles
///   (real, imag interleaved).
void write_snapshots(const std::string& path, const std::vector<ChannelSnapshot>& snapshots,
                     int tx_elements, int rx_elements, int delay_bins);
struct SnapshotFile {
    int link_index = 0;
    int tx_elements = 0;
    int rx_elements = 0;
    int delay_bins = 0;
    std::vector<ChannelSnapshot> snapshots;
};
SnapshotFile read_snapshots(const std::string& path);

}  // namespace danrti
