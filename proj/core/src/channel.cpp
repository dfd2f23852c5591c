#include "danrti/channel.hpp"

#include <cmath>

#include "danrti/errors.hpp"
#include "danrti/rng.hpp"

namespace danrti {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Dirichlet-kernel autocorrelation of a flat-spectrum multitone preamble.
// On-grid arguments (delta_f * x integer) hit the 0/0 limit, which is
// (-1)^(k D) for integer k.
std::complex<double> autocorr_scalar(double x_s, double subcarrier_hz, int bins) {
    const double u = subcarrier_hz * x_s;
    const double k = std::round(u);
    if (std::abs(u - k) < 1e-12) {
        const long long parity = static_cast<long long>(k) * bins;
        return {(parity % 2 == 0) ? 1.0 : -1.0, 0.0};
    }
    const double num = std::sin(kPi * bins * u);
    const double den = bins * std::sin(kPi * u);
    const std::complex<double> rot(std::cos(-kPi * u), std::sin(-kPi * u));
    return rot * (num / den);
}
}  // namespace

Eigen::VectorXcd steering_vector(double phi_rad, int elements) {
    if (elements < 1) throw ContractError("steering vector needs at least one element");
    Eigen::VectorXcd a(elements);
    const double step = -kPi * std::sin(phi_rad);
    for (int m = 0; m < elements; ++m) a(m) = std::polar(1.0, step * m);
    return a;
}

Eigen::VectorXcd autocorr_vector(double tau_s, const WaveformSpec& spec) {
    if (spec.delay_bins < 1) throw ContractError("delay_bins must be >= 1");
    if (spec.bandwidth_hz <= 0.0) throw ContractError("bandwidth must be positive");
    Eigen::VectorXcd a(spec.delay_bins);
    const double df = spec.subcarrier_spacing_hz();
    for (int d = 0; d < spec.delay_bins; ++d) {
        const double bin_time = d / spec.bandwidth_hz;
        a(d) = autocorr_scalar(bin_time - tau_s, df, spec.delay_bins);
    }
    return a;
}

Eigen::VectorXcd path_response(const Pathway& path, const WaveformSpec& spec, int tx_elements,
                               int rx_elements) {
    const Eigen::VectorXcd at = steering_vector(path.aod_rad, tx_elements);
    const Eigen::VectorXcd ar = steering_vector(path.aoa_rad, rx_elements);
    const Eigen::VectorXcd ad = autocorr_vector(path.delay_s, spec);
    const int bins = spec.delay_bins;
    Eigen::VectorXcd out(tx_elements * rx_elements * bins);
    for (int t = 0; t < tx_elements; ++t)
        for (int r = 0; r < rx_elements; ++r)
            out.segment(static_cast<Eigen::Index>(t) * rx_elements * bins +
                            static_cast<Eigen::Index>(r) * bins,
                        bins) = at(t) * ar(r) * ad;
    return out;
}

std::complex<double> default_path_gain(const Pathway& path, const WaveformSpec& spec,
                                       double reflection_loss_db) {
    if (path.total_distance <= 0.0) throw GeometryError("path has non-positive travel distance");
    const double amplitude = spec.wavelength_m() / (4.0 * kPi * path.total_distance) *
                             std::pow(10.0, -reflection_loss_db * path.order / 20.0);
    const double phase = -2.0 * kPi * spec.carrier_hz * path.delay_s;
    return std::polar(amplitude, phase);
}

bool is_blocked(const Pathway& path, const TargetModel& target) {
    const std::vector<Vec2> a = path.anchors();
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
        if (point_segment_distance(target.center, a[k], a[k + 1]) < target.radius) return true;
    }
    return false;
}

double blockage_factor(const Pathway& path, const std::vector<TargetModel>& targets) {
    double factor = 1.0;
    for (const TargetModel& t : targets) {
        if (!is_blocked(path, t)) continue;
        if (std::isinf(t.shadowing_db)) return 0.0;
        factor *= std::pow(10.0, -t.shadowing_db / 20.0);
    }
    return factor;
}

std::vector<ChannelSnapshot> synthesize_link(const std::vector<Pathway>& pathways,
                                             const std::vector<std::complex<double>>& gains,
                                             const WaveformSpec& spec, int tx_elements,
                                             int rx_elements,
                                             const std::vector<TargetModel>& targets,
                                             const SynthesisOptions& options) {
    if (pathways.size() != gains.size())
        throw ContractError("one gain per pathway required");
    if (spec.snapshots < 1) throw ContractError("snapshot count must be >= 1");

    const Eigen::Index dim =
        static_cast<Eigen::Index>(tx_elements) * rx_elements * spec.delay_bins;
    Eigen::VectorXcd clean = Eigen::VectorXcd::Zero(dim);
    for (std::size_t u = 0; u < pathways.size(); ++u) {
        const double factor = blockage_factor(pathways[u], targets);
        if (factor == 0.0 || gains[u] == std::complex<double>(0.0, 0.0)) continue;
        clean += (gains[u] * factor) * path_response(pathways[u], spec, tx_elements, rx_elements);
    }

    const bool with_noise = std::isfinite(options.noise_power_db);
    const double noise_sigma =
        with_noise ? options.reference_amplitude * std::pow(10.0, options.noise_power_db / 20.0)
                   : 0.0;
    const double drift_sigma_rad = options.phase_drift_std_deg * kPi / 180.0;

    std::vector<ChannelSnapshot> out;
    out.reserve(spec.snapshots);
    for (int s = 0; s < spec.snapshots; ++s) {
        ChannelSnapshot snap;
        snap.link_index = options.link_index;
        snap.time_index = s;
        snap.h = clean;

        auto rng = make_rng(derive_seed(options.seed, options.link_index, s));
        if (drift_sigma_rad > 0.0) {
            std::normal_distribution<double> drift(0.0, drift_sigma_rad);
            snap.h *= std::polar(1.0, drift(rng));
        }
        if (with_noise && noise_sigma > 0.0) {
            // Per-element circularly-symmetric CN(0, sigma^2).
            std::normal_distribution<double> part(0.0, noise_sigma / std::sqrt(2.0));
            for (Eigen::Index i = 0; i < dim; ++i)
                snap.h(i) += std::complex<double>(part(rng), part(rng));
        }
        out.push_back(std::move(snap));
    }
    return out;
}

}  // namespace danrti
