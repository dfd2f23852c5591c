#include <benchmark/benchmark.h>

#include <random>

#include "danrti/beamform.hpp"
#include "danrti/channel.hpp"
#include "danrti/geometry.hpp"
#include "danrti/locate.hpp"
#include "danrti/rti.hpp"

using namespace danrti;

namespace {

Scene bench_scene(int nodes, int elements) {
    Scene s;
    s.room_width = 7.04;
    s.room_depth = 6.31;
    s.grid = make_centered_grid(7.04, 6.31, 0.1);
    for (int i = 0; i < nodes; ++i) {
        const double t = 2.0 * M_PI * i / nodes;
        s.nodes.push_back({i + 1,
                           {3.52 + 2.8 * std::cos(t), 3.155 + 2.5 * std::sin(t)},
                           t + M_PI,
                           elements});
    }
    return s;
}

std::vector<Pathway> all_pathways(const Scene& s, int max_order) {
    std::vector<Pathway> out;
    const LinkTopology topo = enumerate_links(s);
    for (int l = 0; l < topo.link_count(); ++l) {
        auto paths = trace_pathways(s, topo.links[l], max_order);
        for (auto& p : paths) p.link_index = l;
        out.insert(out.end(), paths.begin(), paths.end());
    }
    return out;
}

}  // namespace

static void TracePathways(benchmark::State& state) {
    const Scene s = bench_scene(static_cast<int>(state.range(0)), 8);
    for (auto _ : state) {
        auto paths = all_pathways(s, 2);
        benchmark::DoNotOptimize(paths);
    }
}
BENCHMARK(TracePathways)->Arg(4)->Arg(8)->Arg(12);

static void BuildWeightMatrix(benchmark::State& state) {
    const Scene s = bench_scene(4, 8);
    const auto paths = all_pathways(s, 2);
    for (auto _ : state) {
        auto w = build_weight_matrix(paths, s.grid, 0.03);
        benchmark::DoNotOptimize(w);
    }
}
BENCHMARK(BuildWeightMatrix);

static void SynthesizeLink(benchmark::State& state) {
    const Scene s = bench_scene(4, static_cast<int>(state.range(0)));
    const auto paths = trace_pathways(s, {1, 2}, 2);
    WaveformSpec spec;
    std::vector<std::complex<double>> gains;
    for (const auto& p : paths) gains.push_back(default_path_gain(p, spec));
    SynthesisOptions opts;
    opts.seed = 1;
    const int m = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto snaps = synthesize_link(paths, gains, spec, m, m, {}, opts);
        benchmark::DoNotOptimize(snaps);
    }
}
BENCHMARK(SynthesizeLink)->Arg(1)->Arg(8);

static void RssChangeLink(benchmark::State& state) {
    const Scene s = bench_scene(4, 8);
    const auto paths = trace_pathways(s, {1, 2}, 2);
    WaveformSpec spec;
    std::vector<std::complex<double>> gains;
    std::vector<Eigen::VectorXcd> responses;
    for (const auto& p : paths) {
        gains.push_back(default_path_gain(p, spec));
        responses.push_back(path_response(p, spec, 8, 8));
    }
    SynthesisOptions opts;
    opts.seed = 1;
    const auto baseline = synthesize_link(paths, gains, spec, 8, 8, {}, opts);
    const TargetModel target{{3.5, 3.1}, 0.3};
    opts.seed = 2;
    const auto current = synthesize_link(paths, gains, spec, 8, 8, {target}, opts);
    for (auto _ : state) {
        auto dy = rss_change_with_responses(current, baseline, paths, responses);
        benchmark::DoNotOptimize(dy);
    }
}
BENCHMARK(RssChangeLink);

static void ElasticNetSolve(benchmark::State& state) {
    const Scene s = bench_scene(4, 8);
    const auto paths = all_pathways(s, 2);
    const WeightMatrix w = build_weight_matrix(paths, s.grid, 0.03);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXd y(w.w.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = std::max(0.0, 3.0 * g(rng));
    ElasticNetConfig cfg;
    const double lambda = 0.1 * max_lambda(w.w, y, cfg.alpha);
    for (auto _ : state) {
        auto sol = elastic_net_solve(w.w, y, lambda, cfg.alpha, cfg);
        benchmark::DoNotOptimize(sol);
    }
}
BENCHMARK(ElasticNetSolve);

static void DbscanPoints(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 7.0);
    std::vector<ActiveVoxel> pts;
    for (int i = 0; i < state.range(0); ++i)
        pts.push_back({static_cast<int>(i), {u(rng), u(rng)}, 1.0});
    for (auto _ : state) {
        auto clusters = dbscan(pts, 0.5, 3);
        benchmark::DoNotOptimize(clusters);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(DbscanPoints)->Range(64, 1024)->Complexity();

BENCHMARK_MAIN();
