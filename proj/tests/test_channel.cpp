#include <doctest.h>

#include <complex>
#include <random>

#include "danrti/channel.hpp"
#include "danrti/errors.hpp"

using namespace danrti;
using Complex = std::complex<double>;

namespace {

Pathway synthetic_path(double delay_s, double aod, double aoa, int order = 0,
                       double dist = -1.0) {
    Pathway p;
    p.delay_s = delay_s;
    p.total_distance = dist > 0.0 ? dist : delay_s * kSpeedOfLight;
    p.aod_rad = aod;
    p.aoa_rad = aoa;
    p.order = order;
    p.src = {0, 0};
    p.des = {p.total_distance, 0};
    p.segment_lengths = {p.total_distance};
    return p;
}

WaveformSpec spec_with(int bins, int snapshots = 1) {
    WaveformSpec s;
    s.delay_bins = bins;
    s.snapshots = snapshots;
    return s;
}

}  // namespace

TEST_CASE("steering vector basics") {
    SUBCASE("boresight gives all ones") {
        const auto a = steering_vector(0.0, 8);
        REQUIRE(a.size() == 8);
        for (int m = 0; m < 8; ++m) CHECK(std::abs(a(m) - Complex(1, 0)) < 1e-15);
    }
    SUBCASE("endfire two elements") {
        const auto a = steering_vector(M_PI / 2.0, 2);
        CHECK(std::abs(a(0) - Complex(1, 0)) < 1e-15);
        CHECK(std::abs(a(1) - Complex(-1, 0)) < 1e-12);
    }
    SUBCASE("0.3 rad, 4 elements matches direct evaluation") {
        const auto a = steering_vector(0.3, 4);
        CHECK(a(0).real() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(a(1).real() == doctest::Approx(0.599112517502856).epsilon(1e-12));
        CHECK(a(1).imag() == doctest::Approx(-0.800664843346696).epsilon(1e-12));
        CHECK(a(2).real() == doctest::Approx(-0.282128382742780).epsilon(1e-12));
        CHECK(a(2).imag() == doctest::Approx(-0.959376659946939).epsilon(1e-12));
        CHECK(a(3).real() == doctest::Approx(-0.937165808790928).epsilon(1e-12));
        CHECK(a(3).imag() == doctest::Approx(-0.348884288601888).epsilon(1e-12));
    }
}

TEST_CASE("autocorrelation vector") {
    SUBCASE("on-bin delay hits 1 at its bin and 0 elsewhere") {
        const WaveformSpec s = spec_with(64);
        const auto a0 = autocorr_vector(0.0, s);
        CHECK(std::abs(a0(0) - Complex(1, 0)) < 1e-12);
        for (int d = 1; d < 64; ++d) CHECK(std::abs(a0(d)) < 1e-12);

        const auto a1 = autocorr_vector(1.0 / s.bandwidth_hz, s);
        CHECK(std::abs(a1(1)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(a1(0)) < 1e-12);
    }
    SUBCASE("half-bin delay, D = 256") {
        WaveformSpec s = spec_with(256);
        const double tau = 0.5 / s.bandwidth_hz;
        const auto a = autocorr_vector(tau, s);
        CHECK(a(0).real() == doctest::Approx(0.636611782864258).epsilon(1e-12));
        CHECK(a(0).imag() == doctest::Approx(0.003906250000000).epsilon(1e-9));
        CHECK(a(1).real() == doctest::Approx(0.636611782864258).epsilon(1e-12));
        CHECK(a(1).imag() == doctest::Approx(-0.003906250000000).epsilon(1e-9));
        CHECK(a(2).real() == doctest::Approx(-0.212182621797925).epsilon(1e-12));
        // Magnitude matches the Dirichlet-kernel magnitude directly.
        const double df = s.subcarrier_spacing_hz();
        for (int d = 0; d < 8; ++d) {
            const double x = d / s.bandwidth_hz - tau;
            const double mag =
                std::abs(std::sin(M_PI * s.delay_bins * df * x) /
                         (s.delay_bins * std::sin(M_PI * df * x)));
            CHECK(std::abs(a(d)) == doctest::Approx(mag).epsilon(1e-12));
        }
    }
}

TEST_CASE("path response is the stated Kronecker product") {
    const WaveformSpec s = spec_with(16);
    SUBCASE("scalar arrays reduce to the delay vector") {
        const Pathway p = synthetic_path(0.0, 0.3, -0.2);
        const auto r = path_response(p, s, 1, 1);
        const auto a = autocorr_vector(0.0, s);
        REQUIRE(r.size() == 16);
        for (int d = 0; d < 16; ++d) CHECK(std::abs(r(d) - a(d)) < 1e-15);
    }
    SUBCASE("boresight path repeats the delay block") {
        const Pathway p = synthetic_path(2e-9, 0.0, 0.0);
        const auto r = path_response(p, s, 3, 2);
        const auto a = autocorr_vector(2e-9, s);
        REQUIRE(r.size() == 3 * 2 * 16);
        for (int b = 0; b < 6; ++b)
            for (int d = 0; d < 16; ++d) CHECK(std::abs(r(b * 16 + d) - a(d)) < 1e-14);
    }
    SUBCASE("random parameters match an element-by-element oracle") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ang(-1.2, 1.2);
        std::uniform_real_distribution<double> del(0.0, 15.0 / spec_with(16).bandwidth_hz);
        for (int trial = 0; trial < 20; ++trial) {
            const Pathway p = synthetic_path(del(rng), ang(rng), ang(rng));
            const int mt = 1 + trial % 4, mr = 1 + (trial / 2) % 3;
            const auto r = path_response(p, s, mt, mr);
            const auto at = steering_vector(p.aod_rad, mt);
            const auto ar = steering_vector(p.aoa_rad, mr);
            const auto ad = autocorr_vector(p.delay_s, s);
            REQUIRE(r.size() == mt * mr * 16);
            for (int t = 0; t < mt; ++t)
                for (int x = 0; x < mr; ++x)
                    for (int d = 0; d < 16; ++d) {
                        const Complex expect = at(t) * ar(x) * ad(d);
                        CHECK(std::abs(r((t * mr + x) * 16 + d) - expect) < 1e-14);
                    }
        }
    }
}

TEST_CASE("default path gain") {
    WaveformSpec s;
    s.carrier_hz = 4.85e9;
    SUBCASE("doubling distance halves amplitude") {
        const Pathway p1 = synthetic_path(5.0 / kSpeedOfLight, 0, 0, 0, 5.0);
        const Pathway p2 = synthetic_path(10.0 / kSpeedOfLight, 0, 0, 0, 10.0);
        CHECK(std::abs(default_path_gain(p1, s)) ==
              doctest::Approx(2.0 * std::abs(default_path_gain(p2, s))).epsilon(1e-12));
    }
    SUBCASE("LoS has no reflection loss") {
        const Pathway p = synthetic_path(5.0 / kSpeedOfLight, 0, 0, 0, 5.0);
        CHECK(std::abs(default_path_gain(p, s, 6.0)) ==
              doctest::Approx(std::abs(default_path_gain(p, s, 20.0))).epsilon(1e-12));
    }
    SUBCASE("4.85 GHz, 5 m, one bounce, 6 dB loss") {
        const Pathway p = synthetic_path(5.0 / kSpeedOfLight, 0, 0, 1, 5.0);
        const Complex g = default_path_gain(p, s, 6.0);
        CHECK(std::abs(g) == doctest::Approx(0.0004930592332038845).epsilon(1e-12));
        CHECK(g.real() / std::abs(g) == doctest::Approx(0.767674421708699).epsilon(1e-9));
        CHECK(g.imag() / std::abs(g) == doctest::Approx(0.640840059807605).epsilon(1e-9));
    }
}

TEST_CASE("blockage test uses the open disk") {
    Pathway p = synthetic_path(4.0 / kSpeedOfLight, 0, 0, 0, 4.0);
    p.src = {0, 0};
    p.des = {4, 0};
    SUBCASE("target on the midpoint blocks") {
        CHECK(is_blocked(p, {{2, 0}, 0.3}));
    }
    SUBCASE("distant target does not block") {
        CHECK_FALSE(is_blocked(p, {{2, 5}, 0.3}));
    }
    SUBCASE("tangent at exactly the radius does not block") {
        CHECK_FALSE(is_blocked(p, {{2, 0.3}, 0.3}));
        CHECK(is_blocked(p, {{2, 0.3 - 1e-9}, 0.3}));
    }
}

TEST_CASE("link synthesis") {
    WaveformSpec s = spec_with(32, 1);
    const Pathway p1 = synthetic_path(3.0 / s.bandwidth_hz, 0.4, -0.3, 0, 3.0);
    const Pathway p2 = synthetic_path(9.0 / s.bandwidth_hz, -0.7, 0.9, 1, 9.0);
    const std::vector<Complex> gains = {Complex(2e-3, 1e-3), Complex(-4e-4, 6e-4)};
    SynthesisOptions quiet;
    quiet.noise_power_db = -std::numeric_limits<double>::infinity();
    quiet.seed = 5;

    SUBCASE("noiseless sum matches the response superposition") {
        const auto snaps = synthesize_link({p1, p2}, gains, s, 2, 2, {}, quiet);
        REQUIRE(snaps.size() == 1);
        const Eigen::VectorXcd expect = gains[0] * path_response(p1, s, 2, 2) +
                                        gains[1] * path_response(p2, s, 2, 2);
        CHECK((snaps[0].h - expect).norm() < 1e-15);
    }
    SUBCASE("full blockage of a single path zeroes the channel") {
        TargetModel t{{1.5, 0.0}, 0.4};
        const auto snaps = synthesize_link({p1}, {gains[0]}, s, 2, 2, {t}, quiet);
        CHECK(snaps[0].h.norm() == 0.0);
    }
    SUBCASE("linearity: synthesize(A+B) = synthesize(A) + synthesize(B) noiseless") {
        const auto both = synthesize_link({p1, p2}, gains, s, 2, 2, {}, quiet);
        const auto only1 = synthesize_link({p1}, {gains[0]}, s, 2, 2, {}, quiet);
        const auto only2 = synthesize_link({p2}, {gains[1]}, s, 2, 2, {}, quiet);
        CHECK((both[0].h - only1[0].h - only2[0].h).norm() < 1e-15);
    }
    SUBCASE("identical seeds give bit-identical snapshots") {
        SynthesisOptions noisy;
        noisy.noise_power_db = -30.0;
        noisy.phase_drift_std_deg = 0.62;
        noisy.seed = 77;
        s.snapshots = 4;
        const auto a = synthesize_link({p1, p2}, gains, s, 2, 2, {}, noisy);
        const auto b = synthesize_link({p1, p2}, gains, s, 2, 2, {}, noisy);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].h == b[i].h);
        noisy.seed = 78;
        const auto c = synthesize_link({p1, p2}, gains, s, 2, 2, {}, noisy);
        CHECK((a[0].h - c[0].h).norm() > 0.0);
    }
    SUBCASE("noiseless unit-gain path has squared norm MT*MR*|a_tau|^2") {
        const Pathway on_bin = synthetic_path(4.0 / s.bandwidth_hz, 0.3, 0.1, 0, 4.0);
        const auto snaps = synthesize_link({on_bin}, {Complex(1, 0)}, s, 4, 2, {}, quiet);
        CHECK(snaps[0].h.squaredNorm() == doctest::Approx(4.0 * 2.0).epsilon(1e-12));
    }
    SUBCASE("blockage monotonicity: adding targets never raises path amplitude") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> coord(0.0, 9.0);
        for (int t = 0; t < 50; ++t) {
            const TargetModel tgt{{coord(rng), coord(rng) - 4.5}, 0.5, 10.0};
            const double before = blockage_factor(p2, {});
            const double after = blockage_factor(p2, {tgt});
            CHECK(after <= before);
        }
    }
    SUBCASE("empirical noise statistics match the configured power") {
        // Mean approximately 0, per-element variance approximately sigma^2,
        // estimated across many independent seeds.
        WaveformSpec tiny = spec_with(4, 1);
        SynthesisOptions opt;
        opt.noise_power_db = -20.0;
        opt.reference_amplitude = 1.0;
        const double want_var = std::pow(10.0, -20.0 / 10.0);
        double acc_var = 0.0;
        Complex acc_mean(0, 0);
        const int trials = 10000;
        for (int i = 0; i < trials; ++i) {
            opt.seed = static_cast<std::uint64_t>(i) + 1;
            const auto snaps = synthesize_link({}, {}, tiny, 1, 1, {}, opt);
            for (int d = 0; d < 4; ++d) {
                acc_mean += snaps[0].h(d);
                acc_var += std::norm(snaps[0].h(d));
            }
        }
        const double est_var = acc_var / (4.0 * trials);
        CHECK(est_var == doctest::Approx(want_var).epsilon(0.03));
        CHECK(std::abs(acc_mean) / (4.0 * trials) < 0.01);
    }
    SUBCASE("mismatched gain count is a contract error") {
        CHECK_THROWS_AS(synthesize_link({p1, p2}, {gains[0]}, s, 2, 2, {}, quiet),
                        ContractError);
    }
}
