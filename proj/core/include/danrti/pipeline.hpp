#pragma once

#include <optional>
#include <string>
#include <vector>

#include "danrti/beamform.hpp"
#include "danrti/channel.hpp"
#include "danrti/config.hpp"
#include "danrti/geometry.hpp"
#include "danrti/locate.hpp"
#include "danrti/protocol.hpp"
#include "danrti/rti.hpp"
#include "danrti/tune.hpp"

namespace danrti {

struct ChannelConfig {
    double noise_power_db = -40.0;
    double reflection_loss_db = 6.0;
    double phase_drift_std_deg = 0.0;
};

struct LocateConfig {
    double threshold_fraction = 0.5;
    double eps = 0.5;
    int min_pts = 3;
    int expected_targets = 1;
};

struct TuneConfig {
    int budget = 30;
    double alpha_min = 0.0, alpha_max = 1.0;
    double gamma_min = 0.005, gamma_max = 0.2;
    bool tune_threshold = false;
    double threshold_min = 0.1, threshold_max = 0.9;
    int calibration_scenes = 5;
};

struct ProtocolConfig {
    double symbol_length_s = 1.28e-6;
    double t_rep_s = 0.1;
    LatencyModel latency;
    double guard_s = 0.0;
    bool local_save = false;
};

struct OutputConfig {
    bool images = true;
    bool rss = true;
    bool weights = false;
    bool image_csv = false;
};

/// Everything one experiment needs: the scene, waveform, evaluation targets
/// and every stage's parameters.
struct Scenario {
    Scene scene;
    WaveformSpec waveform;
    std::vector<Vec2> target_positions;
    double target_radius = 0.3;
    double target_shadowing_db = std::numeric_limits<double>::infinity();
    int max_order = 2;
    ChannelConfig channel;
    BeamformOptions beamform;
    ElasticNetConfig solver;
    double gamma = 0.03;
    LocateConfig locate;
    TuneConfig tune;
    ProtocolConfig protocol;
    OutputConfig output;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string config_text;  // snapshot of the source config
};

/// Parses a scenario; throws ConfigError with file/line diagnostics.
Scenario scenario_from_config(const KeyValueConfig& cfg);

/// Nodes evenly spaced along a rectangular ring `inset` meters from the
/// walls, boresights facing the room center, ids 1..count.
std::vector<NodePlacement> place_nodes_ring(double room_width, double room_depth, int count,
                                            double inset, int elements);

/// nx x ny target grid with the given spacing, centered in the room.
std::vector<Vec2> position_grid(double room_width, double room_depth, int nx, int ny,
                                double spacing);

/// Precomputed geometry, responses, gains and baseline channels for one
/// scenario. Shared read-only by all target positions.
struct LinkContext {
    Link link;
    int link_index = 0;
    int tx_elements = 1;
    int rx_elements = 1;
    std::vector<Pathway> pathways;
    std::vector<Eigen::VectorXcd> responses;
    std::vector<std::complex<double>> gains;
    std::vector<ChannelSnapshot> baseline;
    LinkBaselinePowers baseline_power;
};

struct PipelineContext {
    Scenario scenario;
    LinkTopology topology;
    std::vector<LinkContext> links;
    std::vector<Pathway> active_pathways;  // rows of the weight matrix, global order
    WeightMatrix weights;
};

PipelineContext prepare_pipeline(const Scenario& scenario);

struct PositionOutcome {
    int position_id = 0;
    bool has_truth = false;
    Vec2 truth;
    std::vector<Vec2> estimates;
    bool shortfall = false;
    double error_m = 0.0;
    double lambda = 0.0;
    bool converged = true;
    bool degenerate = false;  // no cluster survived; penalty error recorded
    RssChangeVector rss;
    VoxelImage image;
};

/// Full per-position pipeline: synthesize with the target present, extract
/// RSS changes, reconstruct, cluster and score against the truth.
PositionOutcome evaluate_position(const PipelineContext& ctx, int position_id,
                                  const Vec2& target_position);

struct ScenarioResult {
    std::vector<PositionOutcome> positions;
    std::vector<double> errors;  // per evaluated position
    double mean_error = 0.0;
    double median_error = 0.0;
    std::vector<std::pair<double, double>> cdf;
};

/// Runs every target position (worker pool, deterministic aggregation) and,
/// when out_dir is non-empty, writes the artifact set there.
ScenarioResult run_scenario(const Scenario& scenario, const std::string& out_dir = "");

struct SweepSpec {
    enum class Variable { kNumNodes, kNumElements, kMaxOrder };
    Variable variable = Variable::kNumNodes;
    std::vector<int> values;
};

SweepSpec sweep_from_config(const KeyValueConfig& cfg);

/// Base scenario with the sweep variable applied.
Scenario apply_sweep_value(const Scenario& base, SweepSpec::Variable variable, int value);

struct SweepResult {
    std::vector<int> values;
    std::vector<ScenarioResult> results;  // aligned with values
};

SweepResult run_sweep(const SweepSpec& spec, const Scenario& base,
                      const std::string& out_dir = "");

/// Fixed observation vectors for the tuner: RSS extraction is independent of
/// (alpha, gamma, threshold), so it runs once per calibration scene.
struct CalibrationScene {
    Vec2 truth;
    Eigen::VectorXd attenuation_db;  // -dy over active rows
};

struct CalibrationSet {
    std::vector<Pathway> active_pathways;
    std::vector<CalibrationScene> scenes;
    VoxelGrid grid;
    double penalty = 0.0;  // room diagonal
    const Scenario* scenario = nullptr;
};

/// Evenly spaced subset of the scenario's target positions.
CalibrationSet build_calibration_set(const PipelineContext& ctx, int scene_count);

/// Mean localization error over the calibration scenes at the given pipeline
/// parameters; degenerate scenes contribute the penalty distance.
double objective_mean_error(const CalibrationSet& cal, double alpha, double gamma,
                            std::optional<double> threshold_fraction = std::nullopt);

struct TuneOutcome {
    TuneTrace trace;
    double alpha = 0.0;
    double gamma = 0.0;
    std::optional<double> threshold;
};

/// Bayesian optimization of (alpha, gamma[, threshold]) over the calibration
/// set; writes trace CSV and a best-parameter overlay config when out_dir is
/// non-empty.
TuneOutcome tune_scenario(const Scenario& scenario, const std::string& out_dir = "");

}  // namespace danrti
