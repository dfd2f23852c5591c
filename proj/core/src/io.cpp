#include "danrti/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "danrti/errors.hpp"

namespace danrti {

namespace {
constexpr double kRadToDeg = 57.295779513082320877;

void append_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void append_f64(std::vector<unsigned char>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

double read_f64(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}
}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Prefer the shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        if (std::strtod(shorter, nullptr) == v) return shorter;
    }
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

void write_binary_file(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::string pathways_csv(const std::vector<Pathway>& pathways) {
    std::ostringstream out;
    out << "link,path,order,delay_ns,aod_deg,aoa_deg,distance_m,reflections\n";
    for (const Pathway& p : pathways) {
        out << p.link_index << ',' << p.path_index << ',' << p.order << ','
            << format_double(p.delay_s * 1e9) << ',' << format_double(p.aod_rad * kRadToDeg)
            << ',' << format_double(p.aoa_rad * kRadToDeg) << ','
            << format_double(p.total_distance) << ',';
        for (std::size_t i = 0; i < p.reflection_points.size(); ++i) {
            if (i) out << ';';
            out << format_double(p.reflection_points[i].x) << ':'
                << format_double(p.reflection_points[i].y);
        }
        out << '\n';
    }
    return out.str();
}

std::string rss_csv(const RssChangeVector& rss) {
    std::ostringstream out;
    out << "link,path,dy_db\n";
    for (Eigen::Index u = 0; u < rss.dy_db.size(); ++u) {
        const auto& [link, path] = rss.index_map[static_cast<std::size_t>(u)];
        out << link << ',' << path << ',' << format_double(rss.dy_db(u)) << '\n';
    }
    return out.str();
}

std::string weight_matrix_triplets(const WeightMatrix& wm) {
    std::ostringstream out;
    for (Eigen::Index v = 0; v < wm.w.outerSize(); ++v)
        for (Eigen::SparseMatrix<double>::InnerIterator it(wm.w, v); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
    return out.str();
}

std::string results_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "position,truth_x,truth_y,est_x,est_y,error_m\n";
    for (const ResultRow& r : rows) {
        out << r.position_id << ',' << format_double(r.truth.x) << ','
            << format_double(r.truth.y) << ',';
        if (r.has_estimate)
            out << format_double(r.estimate.x) << ',' << format_double(r.estimate.y);
        else
            out << ",";
        out << ',' << format_double(r.error_m) << '\n';
    }
    return out.str();
}

std::string cdf_csv(const std::vector<std::pair<double, double>>& cdf) {
    std::ostringstream out;
    out << "error_m,cumulative_fraction\n";
    for (const auto& [e, f] : cdf) out << format_double(e) << ',' << format_double(f) << '\n';
    return out.str();
}

std::string image_csv(const VoxelImage& image) {
    std::ostringstream out;
    for (int iy = 0; iy < image.grid.ny; ++iy) {
        for (int ix = 0; ix < image.grid.nx; ++ix) {
            if (ix) out << ',';
            out << format_double(image.values(image.grid.index(ix, iy)));
        }
        out << '\n';
    }
    return out.str();
}

std::vector<unsigned char> image_pgm(const VoxelImage& image) {
    const double peak = image.values.size() ? image.values.maxCoeff() : 0.0;
    std::ostringstream header;
    header << "P5\n" << image.grid.nx << ' ' << image.grid.ny << "\n65535\n";
    const std::string h = header.str();
    std::vector<unsigned char> bytes(h.begin(), h.end());
    bytes.reserve(bytes.size() + static_cast<std::size_t>(image.grid.count()) * 2);
    // Top image row = highest y index; 16-bit big-endian samples per PGM.
    for (int iy = image.grid.ny - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < image.grid.nx; ++ix) {
            const double v = image.values(image.grid.index(ix, iy));
            unsigned int q = 0;
            if (peak > 0.0 && v > 0.0)
                q = static_cast<unsigned int>(std::lround(65535.0 * v / peak));
            if (q > 65535) q = 65535;
            bytes.push_back(static_cast<unsigned char>(q >> 8));
            bytes.push_back(static_cast<unsigned char>(q & 0xff));
        }
    }
    return bytes;
}

std::string event_log_csv(const EventLog& log) {
    std::ostringstream out;
    out << "time_s,node,event,phase,detail\n";
    for (const ProtocolEvent& e : log.events)
        out << format_double(e.time_s) << ',' << e.node << ',' << to_string(e.kind) << ','
            << e.phase << ',' << e.detail << '\n';
    return out.str();
}

std::string plan_text(const MeasurementPlan& plan) {
    std::ostringstream out;
    out << "t_rep_s = " << format_double(plan.t_rep_s) << '\n'
        << "guard_s = " << format_double(plan.guard_s) << '\n'
        << "local_save = " << (plan.local_save ? "true" : "false") << '\n';
    for (std::size_t p = 0; p < plan.phases.size(); ++p) {
        out << "phase " << (p + 1) << ": tx=" << plan.phases[p].tx_node << " rx=";
        for (std::size_t i = 0; i < plan.phases[p].rx_nodes.size(); ++i) {
            if (i) out << ',';
            out << plan.phases[p].rx_nodes[i];
        }
        out << '\n';
    }
    return out.str();
}

void write_snapshots(const std::string& path, const std::vector<ChannelSnapshot>& snapshots,
                     int tx_elements, int rx_elements, int delay_bins) {
    if (snapshots.empty()) throw ContractError("no snapshots to write");
    const Eigen::Index dim =
        static_cast<Eigen::Index>(tx_elements) * rx_elements * delay_bins;
    for (const auto& s : snapshots)
        if (s.h.size() != dim) throw ContractError("snapshot length mismatch on write");

    std::vector<unsigned char> bytes;
    const char magic[8] = {'D', 'R', 'T', 'I', 'S', 'N', 'A', 'P'};
    bytes.insert(bytes.end(), magic, magic + 8);
    append_u32(bytes, 1);  // version
    append_u32(bytes, static_cast<std::uint32_t>(snapshots.front().link_index));
    append_u32(bytes, static_cast<std::uint32_t>(tx_elements));
    append_u32(bytes, static_cast<std::uint32_t>(rx_elements));
    append_u32(bytes, static_cast<std::uint32_t>(delay_bins));
    append_u32(bytes, static_cast<std::uint32_t>(snapshots.size()));
    for (const auto& s : snapshots)
        for (Eigen::Index i = 0; i < dim; ++i) {
            append_f64(bytes, s.h(i).real());
            append_f64(bytes, s.h(i).imag());
        }
    write_binary_file(path, bytes);
}

SnapshotFile read_snapshots(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 32 || std::memcmp(bytes.data(), "DRTISNAP", 8) != 0)
        throw IoError("not a snapshot file: " + path);
    const std::uint32_t version = read_u32(&bytes[8]);
    if (version != 1) throw IoError("unsupported snapshot file version");

    SnapshotFile f;
    f.link_index = static_cast<int>(read_u32(&bytes[12]));
    f.tx_elements = static_cast<int>(read_u32(&bytes[16]));
    f.rx_elements = static_cast<int>(read_u32(&bytes[20]));
    f.delay_bins = static_cast<int>(read_u32(&bytes[24]));
    const std::uint32_t count = read_u32(&bytes[28]);
    const std::size_t dim = static_cast<std::size_t>(f.tx_elements) * f.rx_elements *
                            f.delay_bins;
    const std::size_t need = 32 + count * dim * 16;
    if (bytes.size() != need) throw IoError("snapshot file truncated: " + path);

    std::size_t off = 32;
    for (std::uint32_t s = 0; s < count; ++s) {
        ChannelSnapshot snap;
        snap.link_index = f.link_index;
        snap.time_index = static_cast<int>(s);
        snap.h.resize(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) {
            const double re = read_f64(&bytes[off]);
            const double im = read_f64(&bytes[off + 8]);
            snap.h(static_cast<Eigen::Index>(i)) = {re, im};
            off += 16;
        }
        f.snapshots.push_back(std::move(snap));
    }
    return f;
}

}  // namespace danrti
