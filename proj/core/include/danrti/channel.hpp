#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "danrti/geometry.hpp"

namespace danrti {

/// MIMO-OFDM sounding waveform. Delay bin d sits at d / bandwidth; the
/// subcarrier spacing is bandwidth / delay_bins.
struct WaveformSpec {
    double carrier_hz = 4.85001e9;
    double bandwidth_hz = 100e6;
    int delay_bins = 128;
    int snapshots = 10;

    double subcarrier_spacing_hz() const { return bandwidth_hz / delay_bins; }
    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
};

/// Cylindrical target cross-section. Paths whose segments enter the open disk
/// are attenuated by shadowing_db (infinity removes them entirely).
struct TargetModel {
    Vec2 center;
    double radius = 0.3;
    double shadowing_db = std::numeric_limits<double>::infinity();
};

/// Vectorized channel h for one link at one time sample, Kronecker order
/// Tx element (slowest) x Rx element x delay bin (fastest).
struct ChannelSnapshot {
    int link_index = 0;
    int time_index = 0;
    Eigen::VectorXcd h;
};

struct SynthesisOptions {
    /// Complex-noise power in dB relative to reference_amplitude^2;
    /// -infinity disables noise.
    double noise_power_db = -40.0;
    /// Amplitude the noise floor is referenced to; by convention the
    /// free-space gain at 1 m for the configured carrier.
    double reference_amplitude = 1.0;
    /// Std of the per-snapshot common LO phase rotation, degrees. 0 = off.
    double phase_drift_std_deg = 0.0;
    std::uint64_t seed = 0;
    int link_index = 0;
};

/// Half-wavelength ULA steering vector, entries exp(-j pi m sin phi).
Eigen::VectorXcd steering_vector(double phi_rad, int elements);

/// Sampled OFDM-preamble autocorrelation a_tau(t_d - tau) over the delay grid,
/// Dirichlet kernel with the on-bin limit evaluated exactly.
Eigen::VectorXcd autocorr_vector(double tau_s, const WaveformSpec& spec);

/// Unit-gain combined response a_T(aod) (x) a_R(aoa) (x) a_tau(tau).
Eigen::VectorXcd path_response(const Pathway& path, const WaveformSpec& spec, int tx_elements,
                               int rx_elements);

/// Free-space amplitude lambda/(4 pi d) with a fixed per-bounce reflection
/// loss and carrier phase exp(-j 2 pi f_c tau).
std::complex<double> default_path_gain(const Pathway& path, const WaveformSpec& spec,
                                       double reflection_loss_db = 6.0);

/// True when any path segment crosses the target's open disk.
bool is_blocked(const Pathway& path, const TargetModel& target);

/// Linear amplitude factor applied to a path by a set of targets (product of
/// per-target shadowing, 0 under full blockage).
double blockage_factor(const Pathway& path, const std::vector<TargetModel>& targets);

/// Synthesizes `spec.snapshots` channel snapshots: sum of shadowed path
/// responses plus circularly-symmetric Gaussian noise and an optional common
/// phase drift per snapshot. Deterministic per (seed, link, snapshot).
std::vector<ChannelSnapshot> synthesize_link(const std::vector<Pathway>& pathways,
                                             const std::vector<std::complex<double>>& gains,
                                             const WaveformSpec& spec, int tx_elements,
                                             int rx_elements,
                                             const std::vector<TargetModel>& targets,
                                             const SynthesisOptions& options);

}  // namespace danrti
