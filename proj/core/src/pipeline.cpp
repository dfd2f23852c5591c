#include "danrti/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "danrti/errors.hpp"
#include "danrti/io.hpp"
#include "danrti/parallel.hpp"
#include "danrti/rng.hpp"

namespace danrti {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

std::string position_tag(int id) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03d", id);
    return buf;
}

BeamformMode parse_mode(const std::string& v) {
    if (v == "expectation") return BeamformMode::kExpectation;
    if (v == "quadratic") return BeamformMode::kQuadratic;
    throw ConfigError("beamform.mode must be 'expectation' or 'quadratic', got '" + v + "'");
}

}  // namespace

std::vector<NodePlacement> place_nodes_ring(double room_width, double room_depth, int count,
                                            double inset, int elements) {
    if (count < 1) throw ConfigError("node count must be positive");
    const double w = room_width - 2.0 * inset;
    const double d = room_depth - 2.0 * inset;
    if (w <= 0.0 || d <= 0.0) throw ConfigError("node inset leaves no room interior");
    const double perimeter = 2.0 * (w + d);
    const Vec2 center(room_width / 2.0, room_depth / 2.0);

    std::vector<NodePlacement> nodes;
    nodes.reserve(count);
    for (int i = 0; i < count; ++i) {
        double arc = perimeter * i / count;
        Vec2 p;
        if (arc < w) {
            p = {inset + arc, inset};
        } else if (arc < w + d) {
            p = {inset + w, inset + (arc - w)};
        } else if (arc < 2.0 * w + d) {
            p = {inset + w - (arc - w - d), inset + d};
        } else {
            p = {inset, inset + d - (arc - 2.0 * w - d)};
        }
        NodePlacement n;
        n.id = i + 1;
        n.position = p;
        n.boresight_rad = (center - p).angle();
        n.num_elements = elements;
        nodes.push_back(n);
    }
    return nodes;
}

std::vector<Vec2> position_grid(double room_width, double room_depth, int nx, int ny,
                                double spacing) {
    if (nx < 1 || ny < 1 || spacing <= 0.0) throw ConfigError("bad position grid spec");
    const double x0 = (room_width - (nx - 1) * spacing) / 2.0;
    const double y0 = (room_depth - (ny - 1) * spacing) / 2.0;
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) out.push_back({x0 + ix * spacing, y0 + iy * spacing});
    return out;
}

Scenario scenario_from_config(const KeyValueConfig& cfg) {
    Scenario s;
    s.config_text = cfg.source_text();

    s.scene.room_width = cfg.get_double("room.width");
    s.scene.room_depth = cfg.get_double("room.depth");
    s.scene.antenna_height = cfg.get_double("antenna.height", 1.3);
    const double voxel = cfg.get_double("voxel.size", 0.1);
    s.scene.grid = make_centered_grid(s.scene.room_width, s.scene.room_depth, voxel);

    const std::vector<std::string> node_lines = cfg.get_all("node");
    if (!node_lines.empty()) {
        for (const std::string& line : node_lines) {
            const auto f = split_fields(line);
            if (f.size() != 5)
                throw ConfigError("node line needs '<id> <x> <y> <boresight_deg> <elements>', got '" +
                                  line + "'");
            NodePlacement n;
            n.id = std::stoi(f[0]);
            n.position = {std::stod(f[1]), std::stod(f[2])};
            n.boresight_rad = std::stod(f[3]) * kDegToRad;
            n.num_elements = std::stoi(f[4]);
            s.scene.nodes.push_back(n);
        }
    } else {
        const int count = static_cast<int>(cfg.get_int("nodes.count", 4));
        const int elements = static_cast<int>(cfg.get_int("nodes.elements", 8));
        const double inset = cfg.get_double("nodes.inset", 0.32);
        s.scene.nodes = place_nodes_ring(s.scene.room_width, s.scene.room_depth, count, inset,
                                         elements);
    }
    s.scene.validate();

    for (const std::string& line : cfg.get_all("target")) {
        const auto f = split_fields(line);
        if (f.size() != 2)
            throw ConfigError("target line needs '<x> <y>', got '" + line + "'");
        s.target_positions.push_back({std::stod(f[0]), std::stod(f[1])});
    }
    if (cfg.has("positions.grid")) {
        if (!s.target_positions.empty())
            throw ConfigError("give either 'target' lines or 'positions.grid', not both");
        const auto f = split_fields(cfg.get_string("positions.grid"));
        if (f.size() != 3)
            throw ConfigError("positions.grid needs '<nx> <ny> <spacing>'");
        s.target_positions = position_grid(s.scene.room_width, s.scene.room_depth,
                                           std::stoi(f[0]), std::stoi(f[1]), std::stod(f[2]));
    }
    for (const Vec2& t : s.target_positions)
        if (!s.scene.inside(t))
            throw ConfigError("target position outside the room");

    s.target_radius = cfg.get_double("target.radius", 0.3);
    if (s.target_radius <= 0.0) throw ConfigError("target.radius must be positive");
    s.target_shadowing_db = cfg.get_double_or_inf("target.shadowing_db",
                                                  std::numeric_limits<double>::infinity());

    s.waveform.carrier_hz = cfg.get_double("waveform.carrier_hz", 4.85001e9);
    s.waveform.bandwidth_hz = cfg.get_double("waveform.bandwidth_hz", 100e6);
    s.waveform.delay_bins = static_cast<int>(cfg.get_int("waveform.delay_bins", 128));
    s.waveform.snapshots = static_cast<int>(cfg.get_int("waveform.snapshots", 10));
    if (s.waveform.delay_bins < 1 || s.waveform.snapshots < 1 || s.waveform.bandwidth_hz <= 0.0 ||
        s.waveform.carrier_hz <= 0.0)
        throw ConfigError("bad waveform parameters");

    s.max_order = static_cast<int>(cfg.get_int("channel.max_order", 2));
    if (s.max_order < 0 || s.max_order > 2) throw ConfigError("channel.max_order must be 0..2");
    s.channel.noise_power_db = cfg.get_double_or_inf("channel.noise_db", -40.0);
    s.channel.reflection_loss_db = cfg.get_double("channel.reflection_loss_db", 6.0);
    s.channel.phase_drift_std_deg = cfg.get_double("channel.phase_drift_deg", 0.0);

    s.beamform.mode = parse_mode(cfg.get_string("beamform.mode", "expectation"));
    s.beamform.floor_db = cfg.get_double("beamform.floor_db", -60.0);

    s.gamma = cfg.get_double("rti.gamma", 0.03);
    if (s.gamma <= 0.0) throw ConfigError("rti.gamma must be positive");
    s.solver.alpha = cfg.get_double("rti.alpha", 0.87);
    if (s.solver.alpha < 0.0 || s.solver.alpha > 1.0)
        throw ConfigError("rti.alpha must lie in [0, 1]");
    const std::string lambda = cfg.get_string("rti.lambda", "auto");
    s.solver.lambda = (lambda == "auto") ? kAutoLambda1Se : cfg.get_double("rti.lambda");
    if (lambda != "auto" && s.solver.lambda < 0.0)
        throw ConfigError("rti.lambda must be non-negative or 'auto'");
    s.solver.cv_folds = static_cast<int>(cfg.get_int("rti.cv_folds", 5));
    if (s.solver.cv_folds < 2) throw ConfigError("rti.cv_folds must be >= 2");
    s.solver.lambda_grid_points = static_cast<int>(cfg.get_int("rti.lambda_grid", 100));
    s.solver.lambda_decades = cfg.get_double("rti.lambda_decades", 4.0);
    s.solver.max_iterations = static_cast<int>(cfg.get_int("rti.max_iterations", 10000));
    s.solver.tolerance = cfg.get_double("rti.tolerance", 1e-6);
    s.solver.standardize = cfg.get_bool("rti.standardize", false);

    s.locate.threshold_fraction = cfg.get_double("locate.threshold", 0.5);
    if (s.locate.threshold_fraction <= 0.0 || s.locate.threshold_fraction >= 1.0)
        throw ConfigError("locate.threshold must lie in (0, 1)");
    s.locate.eps = cfg.get_double("locate.eps", 0.5);
    s.locate.min_pts = static_cast<int>(cfg.get_int("locate.min_pts", 3));
    s.locate.expected_targets = static_cast<int>(cfg.get_int("locate.targets", 1));

    s.tune.budget = static_cast<int>(cfg.get_int("tune.budget", 30));
    s.tune.alpha_min = cfg.get_double("tune.alpha_min", 0.0);
    s.tune.alpha_max = cfg.get_double("tune.alpha_max", 1.0);
    s.tune.gamma_min = cfg.get_double("tune.gamma_min", 0.005);
    s.tune.gamma_max = cfg.get_double("tune.gamma_max", 0.2);
    s.tune.tune_threshold = cfg.get_bool("tune.threshold", false);
    s.tune.threshold_min = cfg.get_double("tune.threshold_min", 0.1);
    s.tune.threshold_max = cfg.get_double("tune.threshold_max", 0.9);
    s.tune.calibration_scenes = static_cast<int>(cfg.get_int("tune.scenes", 5));

    s.protocol.symbol_length_s = cfg.get_double("protocol.symbol_s", 1.28e-6);
    s.protocol.t_rep_s = cfg.get_double("protocol.t_rep_s", 0.1);
    s.protocol.latency.min_s = cfg.get_double("protocol.latency_min_s", 1e-3);
    s.protocol.latency.max_s = cfg.get_double("protocol.latency_max_s", 20e-3);
    s.protocol.guard_s = cfg.get_double("protocol.guard_s", 0.0);
    s.protocol.local_save = cfg.get_bool("protocol.local_save", false);

    s.output.images = cfg.get_bool("output.images", true);
    s.output.rss = cfg.get_bool("output.rss", true);
    s.output.weights = cfg.get_bool("output.weights", false);
    s.output.image_csv = cfg.get_bool("output.image_csv", false);

    s.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    s.threads = static_cast<int>(cfg.get_int("threads", 0));

    const std::vector<std::string> unused = cfg.unused_keys();
    for (const std::string& k : unused) {
        if (k.rfind("sweep.", 0) == 0) continue;  // consumed by the sweep loader
        std::cerr << "warning: unused config key '" << k << "'\n";
    }
    return s;
}

PipelineContext prepare_pipeline(const Scenario& scenario) {
    scenario.scene.validate();
    PipelineContext ctx;
    ctx.scenario = scenario;
    ctx.topology = enumerate_links(scenario.scene);

    const double reference_amplitude =
        scenario.waveform.wavelength_m() / (4.0 * kPi);  // free-space gain at 1 m

    const int link_count = ctx.topology.link_count();
    ctx.links.resize(link_count);
    for (int l = 0; l < link_count; ++l) {
        LinkContext& lc = ctx.links[l];
        lc.link = ctx.topology.links[l];
        lc.link_index = l;
        const NodePlacement& a = scenario.scene.node_by_id(lc.link.node_a);
        const NodePlacement& b = scenario.scene.node_by_id(lc.link.node_b);
        lc.tx_elements = a.num_elements;
        lc.rx_elements = b.num_elements;

        lc.pathways = trace_pathways(scenario.scene, lc.link, scenario.max_order);
        for (Pathway& p : lc.pathways) p.link_index = l;

        lc.responses.reserve(lc.pathways.size());
        lc.gains.reserve(lc.pathways.size());
        for (const Pathway& p : lc.pathways) {
            lc.responses.push_back(
                path_response(p, scenario.waveform, lc.tx_elements, lc.rx_elements));
            lc.gains.push_back(
                default_path_gain(p, scenario.waveform, scenario.channel.reflection_loss_db));
        }

        SynthesisOptions opts;
        opts.noise_power_db = scenario.channel.noise_power_db;
        opts.reference_amplitude = reference_amplitude;
        opts.phase_drift_std_deg = scenario.channel.phase_drift_std_deg;
        opts.seed = derive_seed(scenario.seed, 0xBA5E);
        opts.link_index = l;
        lc.baseline = synthesize_link(lc.pathways, lc.gains, scenario.waveform, lc.tx_elements,
                                      lc.rx_elements, {}, opts);
        lc.baseline_power = baseline_powers(lc.baseline, lc.responses, scenario.beamform);
    }

    for (const LinkContext& lc : ctx.links)
        for (std::size_t n = 0; n < lc.pathways.size(); ++n)
            if (lc.baseline_power.valid[n]) ctx.active_pathways.push_back(lc.pathways[n]);

    ctx.weights = build_weight_matrix(ctx.active_pathways, scenario.scene.grid, scenario.gamma);
    return ctx;
}

namespace {

// Synthesize with the target present and extract -dy (attenuation, positive
// on shadowed paths) over the active rows.
RssChangeVector extract_rss(const PipelineContext& ctx, int position_id,
                            const Vec2& target_position) {
    const Scenario& sc = ctx.scenario;
    const TargetModel target{target_position, sc.target_radius, sc.target_shadowing_db};
    const double reference_amplitude = sc.waveform.wavelength_m() / (4.0 * kPi);

    std::vector<std::vector<PathRssChange>> per_link;
    per_link.reserve(ctx.links.size());
    for (const LinkContext& lc : ctx.links) {
        SynthesisOptions opts;
        opts.noise_power_db = sc.channel.noise_power_db;
        opts.reference_amplitude = reference_amplitude;
        opts.phase_drift_std_deg = sc.channel.phase_drift_std_deg;
        opts.seed = derive_seed(sc.seed, 0x7a9, static_cast<std::uint64_t>(position_id) + 1);
        opts.link_index = lc.link_index;
        const std::vector<ChannelSnapshot> current = synthesize_link(
            lc.pathways, lc.gains, sc.waveform, lc.tx_elements, lc.rx_elements, {target}, opts);
        per_link.push_back(rss_change_cached(current, lc.baseline_power, lc.pathways,
                                             lc.responses, sc.beamform));
    }
    return assemble_rss_changes(per_link);
}

PositionOutcome locate_from_image(const PipelineContext& ctx, PositionOutcome outcome,
                                  double threshold_fraction) {
    const Scenario& sc = ctx.scenario;
    const BinarizedImage bin = binarize(outcome.image, threshold_fraction);
    const std::vector<ActiveVoxel> pts = active_voxels(outcome.image, bin);
    const std::vector<Cluster> clusters = dbscan(pts, sc.locate.eps, sc.locate.min_pts);
    const PositionEstimates est = estimate_positions(clusters, sc.locate.expected_targets);
    outcome.estimates = est.positions;
    outcome.shortfall = est.shortfall;

    const double penalty = sc.scene.diagonal();
    if (outcome.has_truth) {
        const ErrorSummary err =
            localization_error(outcome.estimates, {outcome.truth}, penalty);
        outcome.error_m = err.per_target.front();
        outcome.degenerate = outcome.estimates.empty();
    }
    return outcome;
}

}  // namespace

PositionOutcome evaluate_position(const PipelineContext& ctx, int position_id,
                                  const Vec2& target_position) {
    const Scenario& sc = ctx.scenario;
    PositionOutcome outcome;
    outcome.position_id = position_id;
    outcome.has_truth = true;
    outcome.truth = target_position;
    outcome.rss = extract_rss(ctx, position_id, target_position);

    const Eigen::VectorXd attenuation = -outcome.rss.dy_db;
    ElasticNetConfig cfg = sc.solver;
    cfg.cv_seed = derive_seed(sc.seed, 0xCF, static_cast<std::uint64_t>(position_id));
    outcome.image = elastic_net(ctx.weights, attenuation, cfg);
    outcome.lambda = outcome.image.lambda;
    outcome.converged = outcome.image.converged;

    return locate_from_image(ctx, std::move(outcome), sc.locate.threshold_fraction);
}

ScenarioResult run_scenario(const Scenario& scenario, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const PipelineContext ctx = prepare_pipeline(scenario);

    const bool write = !out_dir.empty();
    if (write) {
        fs::create_directories(fs::path(out_dir) / "images");
        if (scenario.output.rss) fs::create_directories(fs::path(out_dir) / "rss");
        write_text_file((fs::path(out_dir) / "config_snapshot.txt").string(),
                        scenario.config_text);
        std::vector<Pathway> all_paths;
        for (const LinkContext& lc : ctx.links)
            all_paths.insert(all_paths.end(), lc.pathways.begin(), lc.pathways.end());
        write_text_file((fs::path(out_dir) / "pathways.csv").string(), pathways_csv(all_paths));
        if (scenario.output.weights)
            write_text_file((fs::path(out_dir) / "weights.txt").string(),
                            weight_matrix_triplets(ctx.weights));
    }

    ScenarioResult result;
    if (ctx.scenario.target_positions.empty()) {
        // Baseline-only run: current == baseline, so dy is exactly zero.
        std::vector<std::vector<PathRssChange>> per_link;
        for (const LinkContext& lc : ctx.links)
            per_link.push_back(rss_change_cached(lc.baseline, lc.baseline_power, lc.pathways,
                                                 lc.responses, scenario.beamform));
        PositionOutcome outcome;
        outcome.position_id = 0;
        outcome.has_truth = false;
        outcome.rss = assemble_rss_changes(per_link);
        const Eigen::VectorXd attenuation = -outcome.rss.dy_db;
        ElasticNetConfig cfg = scenario.solver;
        cfg.cv_seed = derive_seed(scenario.seed, 0xCF, 0);
        outcome.image = elastic_net(ctx.weights, attenuation, cfg);
        outcome = locate_from_image(ctx, std::move(outcome),
                                    scenario.locate.threshold_fraction);
        result.positions.push_back(std::move(outcome));
    } else {
        const int n = static_cast<int>(ctx.scenario.target_positions.size());
        result.positions.resize(n);
        parallel_for(
            n,
            [&](int i) {
                PositionOutcome outcome =
                    evaluate_position(ctx, i, ctx.scenario.target_positions[i]);
                if (write) {
                    const std::string tag = position_tag(i);
                    if (scenario.output.images) {
                        write_binary_file(
                            (fs::path(out_dir) / "images" / ("pos_" + tag + ".pgm")).string(),
                            image_pgm(outcome.image));
                        if (scenario.output.image_csv)
                            write_text_file(
                                (fs::path(out_dir) / "images" / ("pos_" + tag + ".csv")).string(),
                                image_csv(outcome.image));
                    }
                    if (scenario.output.rss)
                        write_text_file(
                            (fs::path(out_dir) / "rss" / ("pos_" + tag + ".csv")).string(),
                            rss_csv(outcome.rss));
                    outcome.image.values.resize(0);  // keep the sweep memory flat
                }
                result.positions[i] = std::move(outcome);
            },
            scenario.threads);
    }

    for (const PositionOutcome& p : result.positions)
        if (p.has_truth) result.errors.push_back(p.error_m);
    if (!result.errors.empty()) {
        std::vector<double> sorted = result.errors;
        std::sort(sorted.begin(), sorted.end());
        double acc = 0.0;
        for (const double e : sorted) acc += e;
        result.mean_error = acc / sorted.size();
        const std::size_t n = sorted.size();
        result.median_error =
            (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        result.cdf = empirical_cdf(result.errors);
    }

    if (write) {
        std::vector<ResultRow> rows;
        for (const PositionOutcome& p : result.positions) {
            if (!p.has_truth) continue;
            ResultRow row;
            row.position_id = p.position_id;
            row.truth = p.truth;
            row.has_estimate = !p.estimates.empty();
            if (row.has_estimate) row.estimate = p.estimates.front();
            row.error_m = p.error_m;
            rows.push_back(row);
        }
        write_text_file((fs::path(out_dir) / "results.csv").string(), results_csv(rows));
        write_text_file((fs::path(out_dir) / "cdf.csv").string(), cdf_csv(result.cdf));
    }
    return result;
}

SweepSpec sweep_from_config(const KeyValueConfig& cfg) {
    SweepSpec spec;
    const std::string var = cfg.get_string("sweep.variable", "nodes");
    if (var == "nodes") {
        spec.variable = SweepSpec::Variable::kNumNodes;
    } else if (var == "elements") {
        spec.variable = SweepSpec::Variable::kNumElements;
    } else if (var == "order") {
        spec.variable = SweepSpec::Variable::kMaxOrder;
    } else {
        throw ConfigError("sweep.variable must be nodes|elements|order, got '" + var + "'");
    }
    for (const std::string& tok : split_fields(cfg.get_string("sweep.values", "4 8 12")))
        spec.values.push_back(std::stoi(tok));
    if (spec.values.empty()) throw ConfigError("sweep.values is empty");
    for (const int v : spec.values)
        if (v <= 0) throw ConfigError("sweep values must be positive");
    return spec;
}

Scenario apply_sweep_value(const Scenario& base, SweepSpec::Variable variable, int value) {
    Scenario s = base;
    switch (variable) {
        case SweepSpec::Variable::kNumNodes: {
            const int elements =
                base.scene.nodes.empty() ? 1 : base.scene.nodes.front().num_elements;
            s.scene.nodes = place_nodes_ring(s.scene.room_width, s.scene.room_depth, value, 0.32,
                                             elements);
            break;
        }
        case SweepSpec::Variable::kNumElements:
            for (NodePlacement& n : s.scene.nodes) n.num_elements = value;
            break;
        case SweepSpec::Variable::kMaxOrder:
            if (value > 2) throw ConfigError("max order sweep values must be 0..2");
            s.max_order = value;
            break;
    }
    return s;
}

SweepResult run_sweep(const SweepSpec& spec, const Scenario& base, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const char* prefix = spec.variable == SweepSpec::Variable::kNumNodes ? "nodes"
                         : spec.variable == SweepSpec::Variable::kNumElements ? "elements"
                                                                              : "order";
    SweepResult result;
    std::ostringstream combined;
    combined << prefix << ",error_m,cumulative_fraction\n";
    std::ostringstream summary;
    summary << prefix << ",mean_m,median_m\n";

    for (const int value : spec.values) {
        const Scenario s = apply_sweep_value(base, spec.variable, value);
        std::string sub;
        if (!out_dir.empty()) {
            sub = (fs::path(out_dir) / (std::string(prefix) + "_" + std::to_string(value)))
                      .string();
        }
        ScenarioResult r = run_scenario(s, sub);
        for (const auto& [e, f] : r.cdf)
            combined << value << ',' << format_double(e) << ',' << format_double(f) << '\n';
        summary << value << ',' << format_double(r.mean_error) << ','
                << format_double(r.median_error) << '\n';
        result.values.push_back(value);
        result.results.push_back(std::move(r));
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file((fs::path(out_dir) / "sweep_cdf.csv").string(), combined.str());
        write_text_file((fs::path(out_dir) / "sweep_summary.csv").string(), summary.str());
    }
    return result;
}

CalibrationSet build_calibration_set(const PipelineContext& ctx, int scene_count) {
    const auto& positions = ctx.scenario.target_positions;
    if (positions.empty()) throw ContractError("calibration needs target positions");
    if (scene_count < 1) throw ContractError("calibration needs at least one scene");

    std::vector<int> chosen;
    const int total = static_cast<int>(positions.size());
    if (scene_count >= total) {
        for (int i = 0; i < total; ++i) chosen.push_back(i);
    } else if (scene_count == 1) {
        chosen.push_back(total / 2);
    } else {
        for (int k = 0; k < scene_count; ++k) {
            const int idx = static_cast<int>(
                std::llround(static_cast<double>(k) * (total - 1) / (scene_count - 1)));
            if (chosen.empty() || chosen.back() != idx) chosen.push_back(idx);
        }
    }

    CalibrationSet cal;
    cal.active_pathways = ctx.active_pathways;
    cal.grid = ctx.scenario.scene.grid;
    cal.penalty = ctx.scenario.scene.diagonal();
    cal.scenario = &ctx.scenario;
    for (const int idx : chosen) {
        CalibrationScene scene;
        scene.truth = positions[idx];
        const RssChangeVector rss = extract_rss(ctx, idx, positions[idx]);
        scene.attenuation_db = -rss.dy_db;
        cal.scenes.push_back(std::move(scene));
    }
    return cal;
}

double objective_mean_error(const CalibrationSet& cal, double alpha, double gamma,
                            std::optional<double> threshold_fraction) {
    const Scenario& sc = *cal.scenario;
    const WeightMatrix weights = build_weight_matrix(cal.active_pathways, cal.grid, gamma);
    const double threshold = threshold_fraction.value_or(sc.locate.threshold_fraction);

    double total = 0.0;
    for (std::size_t i = 0; i < cal.scenes.size(); ++i) {
        const CalibrationScene& scene = cal.scenes[i];
        ElasticNetConfig cfg = sc.solver;
        cfg.alpha = alpha;
        cfg.lambda = kAutoLambda1Se;  // re-selected per scene
        cfg.cv_seed = derive_seed(sc.seed, 0xCA1, i);
        const VoxelImage image = elastic_net(weights, scene.attenuation_db, cfg);

        const BinarizedImage bin = binarize(image, threshold);
        const std::vector<ActiveVoxel> pts = active_voxels(image, bin);
        const std::vector<Cluster> clusters = dbscan(pts, sc.locate.eps, sc.locate.min_pts);
        const PositionEstimates est = estimate_positions(clusters, sc.locate.expected_targets);
        if (est.positions.empty()) {
            total += cal.penalty;
            continue;
        }
        const ErrorSummary err = localization_error(est.positions, {scene.truth}, cal.penalty);
        total += err.per_target.front();
    }
    return total / cal.scenes.size();
}

TuneOutcome tune_scenario(const Scenario& scenario, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const PipelineContext ctx = prepare_pipeline(scenario);
    const CalibrationSet cal = build_calibration_set(ctx, scenario.tune.calibration_scenes);

    TuneSpace space;
    space.bounds = {{scenario.tune.alpha_min, scenario.tune.alpha_max},
                    {scenario.tune.gamma_min, scenario.tune.gamma_max}};
    const bool with_threshold = scenario.tune.tune_threshold;
    if (with_threshold)
        space.bounds.push_back({scenario.tune.threshold_min, scenario.tune.threshold_max});
    space.budget = scenario.tune.budget;
    space.seed = scenario.seed;
    space.penalty_value = scenario.scene.diagonal();

    const Objective objective = [&](const std::vector<double>& p) {
        return objective_mean_error(cal, p[0], p[1],
                                    with_threshold ? std::optional<double>(p[2]) : std::nullopt);
    };
    TuneOutcome outcome;
    outcome.trace = bayes_optimize(objective, space);
    const std::vector<double>& best = outcome.trace.best_parameters();
    outcome.alpha = best[0];
    outcome.gamma = best[1];
    if (with_threshold) outcome.threshold = best[2];

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ostringstream trace;
        trace << "iteration,alpha,gamma" << (with_threshold ? ",threshold" : "")
              << ",objective_m,best_so_far_m\n";
        double best_so_far = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < outcome.trace.values.size(); ++i) {
            best_so_far = std::min(best_so_far, outcome.trace.values[i]);
            trace << i << ',' << format_double(outcome.trace.parameters[i][0]) << ','
                  << format_double(outcome.trace.parameters[i][1]);
            if (with_threshold)
                trace << ',' << format_double(outcome.trace.parameters[i][2]);
            trace << ',' << format_double(outcome.trace.values[i]) << ','
                  << format_double(best_so_far) << '\n';
        }
        write_text_file((fs::path(out_dir) / "trace.csv").string(), trace.str());

        std::ostringstream overlay;
        overlay << "# tuned parameter overlay\n"
                << "rti.alpha = " << format_double(outcome.alpha) << '\n'
                << "rti.gamma = " << format_double(outcome.gamma) << '\n';
        if (outcome.threshold)
            overlay << "locate.threshold = " << format_double(*outcome.threshold) << '\n';
        write_text_file((fs::path(out_dir) / "best_params.txt").string(), overlay.str());
    }
    return outcome;
}

}  // namespace danrti
