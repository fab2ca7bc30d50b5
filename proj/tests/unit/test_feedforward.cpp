#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "approx.hpp"
#include "decolab/errors.hpp"
#include "decolab/feedforward.hpp"
#include "decolab/pulse_sequences.hpp"

using namespace decolab;

namespace {

double wrap(double x) { return std::remainder(x, 2.0 * std::numbers::pi); }

AmplitudeScaleProcess frozen() {
    AmplitudeScaleProcess p;
    p.correlation_time = std::numeric_limits<double>::infinity();
    return p;
}

// Single 50 Hz component whose synchronized echo phase at tau equals phi.
AcFieldModel model_with_echo_phase(double phi, double tau) {
    // A pi phase offset flips the field sign for negative targets.
    const AcFieldModel unit({{1e-7, 50.0, phi < 0 ? std::numbers::pi : 0.0}}, 0.0);
    return scale_amplitudes(unit, phi / phase_echo(unit, tau, 0.0));
}

}  // namespace

TEST_CASE("sample_observable") {
    Rng rng(11);
    SUBCASE("perfect readout of a pure state") {
        ShotConfig cfg;
        cfg.readout_fidelity_0 = cfg.readout_fidelity_1 = 1.0;
        for (int n : {1, 7, 50}) {
            cfg.n_shots = n;
            CHECK(sample_observable(1.0, cfg, rng) == 1.0);
            CHECK(sample_observable(-1.0, cfg, rng) == -1.0);
        }
    }
    SUBCASE("binomial spread of an unpolarised state") {
        ShotConfig cfg;
        cfg.readout_fidelity_0 = cfg.readout_fidelity_1 = 1.0;
        cfg.n_shots = 400;
        const int trials = 4000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < trials; ++i) {
            const double v = sample_observable(0.0, cfg, rng);
            s += v;
            s2 += v * v;
        }
        const double mean = s / trials;
        const double sd = std::sqrt(s2 / trials - mean * mean);
        CHECK(std::abs(mean) < 4 * 0.05 / std::sqrt(trials));
        CHECK(sd == rel_approx(1.0 / std::sqrt(400.0)).epsilon(0.05));
    }
    SUBCASE("confusion-matrix inversion is unbiased") {
        ShotConfig cfg;
        cfg.n_shots = 1'000'000;
        const double f = 0.925;
        const double q = 0.8 * f + 0.2 * (1 - f);
        const double sigma = 2.0 * std::sqrt(q * (1 - q) / cfg.n_shots) / (2 * f - 1);
        CHECK(std::abs(sample_observable(0.6, cfg, rng) - 0.6) < 3 * sigma);
        std::vector<double> shots(cfg.n_shots, 0.6);
        CHECK(std::abs(sample_observable_series(shots, cfg, rng) - 0.6) < 3 * sigma);
    }
    SUBCASE("clipped to [-1, 1]") {
        ShotConfig cfg;
        cfg.n_shots = 3;
        for (int i = 0; i < 200; ++i) {
            const double v = sample_observable(0.97, cfg, rng);
            CHECK(v <= 1.0);
            CHECK(v >= -1.0);
        }
    }
    SUBCASE("invalid configuration") {
        ShotConfig cfg;
        cfg.n_shots = 0;
        CHECK_THROWS_AS(sample_observable(0.0, cfg, rng), ConfigError);
        cfg = ShotConfig{};
        cfg.readout_fidelity_0 = 0.5;
        CHECK_THROWS_AS(sample_observable(0.0, cfg, rng), ConfigError);
        CHECK_THROWS_AS(sample_observable(1.5, ShotConfig{}, rng), ConfigError);
    }
}

TEST_CASE("estimate_phase") {
    Rng rng(5);
    ShotConfig exact;
    exact.noiseless = true;
    SUBCASE("zero model") {
        const auto est = estimate_phase(AcFieldModel{}, 1e-3, exact, rng);
        CHECK(est.defined);
        CHECK(est.phi == 0.0);
    }
    SUBCASE("pi / 3 in the noiseless limit") {
        const auto m = model_with_echo_phase(std::numbers::pi / 3, 2e-3);
        CHECK(estimate_phase(m, 2e-3, exact, rng).phi == rel_approx(std::numbers::pi / 3).epsilon(1e-12));
    }
    SUBCASE("all four quadrants") {
        for (double phi : {0.4, 2.0, -2.5, -0.7}) {
            const auto m = model_with_echo_phase(phi, 1e-3);
            CHECK(estimate_phase(m, 1e-3, exact, rng).phi == rel_approx(phi).epsilon(1e-12));
        }
    }
    SUBCASE("large phase is recovered modulo 2 pi within shot noise") {
        const AcFieldModel m({{2.95e-7, 50.0, 0.0}}, 0.0);
        const double truth = phase_echo(m, 5e-3, 0.0);
        REQUIRE(truth > 300.0);
        ShotConfig cfg;
        const int trials = 10000;
        double c = 0.0, s = 0.0;
        for (int i = 0; i < trials; ++i) {
            const double d = estimate_phase(m, 5e-3, cfg, rng).phi - truth;
            c += std::cos(d);
            s += std::sin(d);
        }
        // Circular mean of the error; its bias is far below the per-trial
        // spread (~0.2 rad at 50 shots).
        const double bias = std::atan2(s, c);
        CHECK(std::abs(bias) < 0.02);
        CHECK(std::hypot(c, s) / trials > 0.9);
    }
    SUBCASE("estimator variance scales as 1 / n_shots") {
        const auto m = model_with_echo_phase(0.9, 1e-3);
        std::vector<double> lx, ly;
        for (int n : {10, 30, 100, 300, 1000, 3000, 10000}) {
            ShotConfig cfg;
            cfg.n_shots = n;
            const int trials = 3000;
            double s2 = 0.0;
            for (int i = 0; i < trials; ++i) {
                const double d = wrap(estimate_phase(m, 1e-3, cfg, rng).phi - 0.9);
                s2 += d * d;
            }
            lx.push_back(std::log(static_cast<double>(n)));
            ly.push_back(std::log(s2 / trials));
        }
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
        const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        CHECK(sxy / sxx == rel_approx(-1.0).epsilon(0.1));
    }
    CHECK_THROWS_AS(estimate_phase(AcFieldModel{}, 0.0, exact, rng), ConfigError);
}

TEST_CASE("run_feedforward") {
    const auto t1 = table1_model();
    std::vector<double> taus;
    for (int k = 1; k <= 20; ++k) taus.push_back(2.5e-4 * k);

    SUBCASE("static interference is corrected exactly") {
        ShotConfig cfg;
        cfg.noiseless = true;
        for (const auto& o : run_feedforward(t1, taus, cfg, frozen(), FeedforwardOptions{}))
            CHECK(o.c_expectation == rel_approx(1.0).epsilon(1e-12));
        FeedforwardOptions once;
        once.reestimate_per_repetition = false;
        for (const auto& o : run_feedforward(t1, taus, cfg, frozen(), once))
            CHECK(o.c_expectation == rel_approx(1.0).epsilon(1e-12));
    }
    SUBCASE("zero model") {
        ShotConfig cfg;
        cfg.noiseless = true;
        for (const auto& o : run_feedforward(AcFieldModel{}, taus, cfg, AmplitudeScaleProcess{}, FeedforwardOptions{})) {
            CHECK(o.c_expectation == 1.0);
            CHECK(o.phi_estimate == 0.0);
        }
    }
    SUBCASE("outcomes respect their ranges") {
        for (const auto& o : run_feedforward(t1, taus, ShotConfig{}, AmplitudeScaleProcess{}, FeedforwardOptions{})) {
            CHECK(std::abs(o.c_expectation) <= 1.0);
            CHECK(std::abs(o.x_raw) <= 1.0);
            CHECK(std::abs(o.y_raw) <= 1.0);
            CHECK(std::abs(o.phi_estimate) <= std::numbers::pi);
        }
    }
    SUBCASE("deterministic for a seed regardless of thread count") {
        FeedforwardOptions a, b;
        a.seed = b.seed = 77;
        a.threads = 1;
        b.threads = 4;
        const auto ra = run_feedforward(t1, taus, ShotConfig{}, AmplitudeScaleProcess{}, a);
        const auto rb = run_feedforward(t1, taus, ShotConfig{}, AmplitudeScaleProcess{}, b);
        for (std::size_t i = 0; i < ra.size(); ++i) {
            CHECK(ra[i].c_expectation == rb[i].c_expectation);
            CHECK(ra[i].phi_estimate == rb[i].phi_estimate);
            CHECK(ra[i].seed == rb[i].seed);
        }
    }
    SUBCASE("global phase offset leaves C unchanged to shot-noise level") {
        std::vector<AcComponent> shifted = t1.components();
        for (auto& c : shifted) c.phase += 1.1;
        const AcFieldModel t1s(shifted, t1.t0());
        std::vector<double> many(200, 1.5e-3);
        FeedforwardOptions opts;
        opts.repetitions = 4;
        const auto r0 = run_feedforward(t1, many, ShotConfig{}, frozen(), opts);
        opts.seed = 2;
        const auto r1 = run_feedforward(t1s, many, ShotConfig{}, frozen(), opts);
        auto stats = [](const std::vector<FeedforwardOutcome>& r) {
            double s = 0.0, s2 = 0.0;
            for (const auto& o : r) {
                s += o.c_expectation;
                s2 += o.c_expectation * o.c_expectation;
            }
            const double m = s / r.size();
            return std::pair{m, std::sqrt((s2 / r.size() - m * m) / r.size())};
        };
        const auto [m0, e0] = stats(r0);
        const auto [m1, e1] = stats(r1);
        CHECK(std::abs(m0 - m1) < 4 * std::hypot(e0, e1));
    }
    SUBCASE("amplitude drift degrades the correction at long tau") {
        ShotConfig cfg;
        cfg.noiseless = true;
        const auto r = run_feedforward(t1, {0.25e-3, 4e-3}, cfg, AmplitudeScaleProcess{}, FeedforwardOptions{});
        CHECK(r[0].c_expectation > 0.99);
        CHECK(r[1].c_expectation < r[0].c_expectation);
    }
    SUBCASE("invalid inputs") {
        CHECK_THROWS_AS(run_feedforward(t1, {0.0}, ShotConfig{}, AmplitudeScaleProcess{}, FeedforwardOptions{}),
                        ConfigError);
        FeedforwardOptions bad;
        bad.repetitions = 0;
        CHECK_THROWS_AS(run_feedforward(t1, taus, ShotConfig{}, AmplitudeScaleProcess{}, bad), ConfigError);
    }
}
