// danrti — device-free localization simulator for distributed antenna
// networks. Subcommands: trace, run, sweep, tune, protocol.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "danrti/errors.hpp"
#include "danrti/io.hpp"
#include "danrti/pipeline.hpp"

namespace fs = std::filesystem;
using namespace danrti;

namespace {

// Exit codes by failure category.
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitContract = 3;
constexpr int kExitIo = 4;
constexpr int kExitOther = 5;

struct CommonArgs {
    std::string config_path;
    std::optional<long long> seed;
    std::string out_dir;
    std::optional<int> max_order;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool out_required) {
    cmd->add_option("--config", args.config_path, "scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "override the config seed");
    auto* out = cmd->add_option("--out", args.out_dir, "output directory");
    if (out_required) out->required();
    cmd->add_option("--max-order", args.max_order, "override max reflection order (0..2)")
        ->check(CLI::Range(0, 2));
}

Scenario load_scenario(const CommonArgs& args, const KeyValueConfig& cfg) {
    Scenario s = scenario_from_config(cfg);
    if (args.seed) s.seed = static_cast<std::uint64_t>(*args.seed);
    if (args.max_order) s.max_order = *args.max_order;
    return s;
}

int cmd_trace(const CommonArgs& args, bool with_weights) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
    const Scenario s = load_scenario(args, cfg);
    const PipelineContext ctx = prepare_pipeline(s);

    std::vector<Pathway> all;
    for (const LinkContext& lc : ctx.links)
        all.insert(all.end(), lc.pathways.begin(), lc.pathways.end());
    if (args.out_dir.empty()) {
        std::cout << pathways_csv(all);
    } else {
        fs::create_directories(args.out_dir);
        write_text_file((fs::path(args.out_dir) / "pathways.csv").string(), pathways_csv(all));
        if (with_weights)
            write_text_file((fs::path(args.out_dir) / "weights.txt").string(),
                            weight_matrix_triplets(ctx.weights));
        std::cout << "wrote " << all.size() << " pathways over " << ctx.links.size()
                  << " links to " << args.out_dir << "\n";
    }
    return 0;
}

int cmd_run(const CommonArgs& args) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
    const Scenario s = load_scenario(args, cfg);
    const ScenarioResult r = run_scenario(s, args.out_dir);
    if (r.errors.empty()) {
        std::cout << "baseline-only run, no target positions evaluated\n";
    } else {
        std::printf("positions: %zu  mean error: %.3f m  median: %.3f m\n", r.errors.size(),
                    r.mean_error, r.median_error);
    }
    std::cout << "artifacts in " << args.out_dir << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
    const Scenario s = load_scenario(args, cfg);
    const SweepSpec spec = sweep_from_config(cfg);
    const SweepResult r = run_sweep(spec, s, args.out_dir);
    for (std::size_t i = 0; i < r.values.size(); ++i)
        std::printf("value %d: mean %.3f m, median %.3f m over %zu positions\n", r.values[i],
                    r.results[i].mean_error, r.results[i].median_error,
                    r.results[i].errors.size());
    std::cout << "artifacts in " << args.out_dir << "\n";
    return 0;
}

int cmd_tune(const CommonArgs& args) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
    const Scenario s = load_scenario(args, cfg);
    const TuneOutcome t = tune_scenario(s, args.out_dir);
    std::printf("best alpha %.4f gamma %.4f", t.alpha, t.gamma);
    if (t.threshold) std::printf(" threshold %.3f", *t.threshold);
    std::printf("  mean error %.3f m\n", t.trace.best_value());
    std::cout << "trace in " << args.out_dir << "\n";
    return 0;
}

int cmd_protocol(const CommonArgs& args) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
    const Scenario s = load_scenario(args, cfg);

    const int elements = s.scene.nodes.empty() ? 1 : s.scene.nodes.front().num_elements;
    const SwitchSchedule schedule =
        build_switch_schedule(elements, elements, s.protocol.symbol_length_s);
    MeasurementPlan plan =
        build_plan(static_cast<int>(s.scene.nodes.size()), s.protocol.t_rep_s);
    plan.guard_s = s.protocol.guard_s;
    plan.local_save = s.protocol.local_save;
    const EventLog log = simulate_round(plan, schedule, s.protocol.latency, s.seed);

    if (args.out_dir.empty()) {
        std::cout << event_log_csv(log);
    } else {
        fs::create_directories(args.out_dir);
        write_text_file((fs::path(args.out_dir) / "plan.txt").string(), plan_text(plan));
        write_text_file((fs::path(args.out_dir) / "events.csv").string(), event_log_csv(log));
        std::printf("round duration %.4f s, %zu events; log in %s\n", log.round_duration_s,
                    log.events.size(), args.out_dir.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multistatic device-free localization simulator"};
    app.require_subcommand(1);

    CommonArgs trace_args, run_args, sweep_args, tune_args, proto_args;
    bool trace_weights = false;

    CLI::App* trace = app.add_subcommand("trace", "export ray-traced pathways as CSV");
    add_common(trace, trace_args, false);
    trace->add_flag("--weights", trace_weights, "also export the weight matrix triplets");

    CLI::App* run = app.add_subcommand("run", "run a scenario over its target positions");
    add_common(run, run_args, true);

    CLI::App* sweep = app.add_subcommand("sweep", "run a node/element/order sweep");
    add_common(sweep, sweep_args, true);

    CLI::App* tune = app.add_subcommand("tune", "Bayesian-optimize alpha and gamma");
    add_common(tune, tune_args, true);

    CLI::App* proto = app.add_subcommand("protocol", "simulate the multi-link sounding round");
    add_common(proto, proto_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitUsage : 0;
    }

    try {
        if (trace->parsed()) return cmd_trace(trace_args, trace_weights);
        if (run->parsed()) return cmd_run(run_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args);
        if (tune->parsed()) return cmd_tune(tune_args);
        if (proto->parsed()) return cmd_protocol(proto_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return kExitContract;
    } catch (const ContractError& e) {
        std::cerr << "contract error: " << e.what() << "\n";
        return kExitContract;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOther;
    }
    return kExitUsage;
}
