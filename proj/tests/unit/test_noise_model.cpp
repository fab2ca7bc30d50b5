#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "approx.hpp"
#include "decolab/errors.hpp"
#include "decolab/noise_model.hpp"
#include "oracles.hpp"

using namespace decolab;

namespace {
constexpr double mG = 1e-7;
}

TEST_CASE("field of an empty model is zero") {
    const AcFieldModel empty;
    CHECK(field_at(empty, 0.0) == 0.0);
    CHECK(field_at(empty, 1.234) == 0.0);
}

TEST_CASE("single 50 Hz component at t0") {
    const AcFieldModel m({{2.95e-7, 50.0, 0.0}}, 0.0);
    CHECK(field_at(m, 0.0) == rel_approx(2.95e-7).epsilon(1e-15));
}

TEST_CASE("table model matches extended-precision re-summation") {
    const auto m = table1_model();
    for (double t : {0.0, 1e-4, 3.3e-3, 0.0123, 0.7}) {
        const double ref = oracle::field_extended(m, t);
        // Rounding of each phase argument is the conditioning floor.
        double bound = 0.0;
        for (const auto& c : m.components())
            bound += c.amplitude * (1.0 + std::abs(2 * std::numbers::pi * c.frequency * t) + std::abs(c.phase));
        CHECK(std::abs(field_at(m, t) - ref) <= 4e-16 * bound);
    }
    const double ref0 = oracle::field_extended(m, m.t0());
    CHECK(std::abs(field_at(m, m.t0()) - ref0) <= 1e-15 * std::abs(ref0));
}

TEST_CASE("table model rows") {
    const auto m = table1_model();
    REQUIRE(m.components().size() == 8);
    const auto& c0 = m.components()[0];
    CHECK(c0.amplitude == rel_approx(2.95 * mG).epsilon(1e-15));
    CHECK(c0.frequency == 50.0);
    CHECK(c0.phase == 0.0);
    const auto& c150 = m.components()[2];
    CHECK(c150.frequency == 150.0);
    CHECK(c150.amplitude == rel_approx(0.490 * mG).epsilon(1e-15));
    CHECK(c150.phase == -1.77);
    // gamma_NV B / 2 pi in kHz for the 50 Hz row.
    const double khz = 28.0e9 * c0.amplitude / 1e3;
    CHECK(khz == rel_approx(8.28).epsilon(0.005));
    CHECK(m.components().back().frequency == 450.0);
    CHECK(m.t0() == 0.0);
}

TEST_CASE("scale_amplitudes") {
    const auto m = table1_model();
    const auto same = scale_amplitudes(m, 1.0);
    for (std::size_t i = 0; i < m.components().size(); ++i)
        CHECK(same.components()[i].amplitude == m.components()[i].amplitude);
    const auto low = scale_amplitudes(m, 0.85);
    CHECK(low.components()[0].amplitude == rel_approx(2.5075 * mG).epsilon(1e-14));
    const auto high = scale_amplitudes(m, 1.27);
    for (std::size_t i = 0; i < m.components().size(); ++i) {
        CHECK(high.components()[i].amplitude == rel_approx(1.27 * m.components()[i].amplitude).epsilon(1e-15));
        CHECK(high.components()[i].phase == m.components()[i].phase);
        CHECK(high.components()[i].frequency == m.components()[i].frequency);
    }
    CHECK_THROWS_AS(scale_amplitudes(m, 0.0), ConfigError);
    CHECK_THROWS_AS(scale_amplitudes(m, -1.0), ConfigError);
}

TEST_CASE("field invariants") {
    const auto m = table1_model();
    SUBCASE("periodic with the 20 ms fundamental") {
        for (int k = 0; k < 200; ++k) {
            const double t = 1e-4 * k + 1e-6;
            CHECK(std::abs(field_at(m, t) - field_at(m, t + 0.02)) < 1e-18);
        }
    }
    SUBCASE("scale round trip") {
        for (double a : {0.3, 0.85, 1.27, 7.0}) {
            const auto back = scale_amplitudes(scale_amplitudes(m, a), 1.0 / a);
            for (std::size_t i = 0; i < m.components().size(); ++i)
                CHECK(back.components()[i].amplitude ==
                      rel_approx(m.components()[i].amplitude).epsilon(1e-15));
        }
    }
    SUBCASE("field is linear in amplitude") {
        for (double a : {0.5, 1.27}) {
            const auto s = scale_amplitudes(m, a);
            for (double t : {0.0, 0.0031, 0.017})
                CHECK(field_at(s, t) == rel_approx(a * field_at(m, t)).epsilon(1e-15));
        }
    }
}

TEST_CASE("model invariants are enforced") {
    CHECK_THROWS_AS(AcFieldModel({{1e-7, 100.0, 0.0}, {1e-7, 50.0, 0.0}}, 0.0), ConfigError);
    CHECK_THROWS_AS(AcFieldModel({{-1e-7, 50.0, 0.0}}, 0.0), ConfigError);
    CHECK_THROWS_AS(AcFieldModel({{1e-7, 0.0, 0.0}}, 0.0), ConfigError);
    CHECK_THROWS_AS(AcFieldModel({{1e-7, 50.0, 0.0}}, 0.02), ConfigError);
    CHECK_NOTHROW(AcFieldModel({{1e-7, 50.0, 0.0}}, 0.0199));
}

TEST_CASE("amplitude trajectory") {
    SUBCASE("frozen process is constant") {
        AmplitudeScaleProcess p;
        p.correlation_time = std::numeric_limits<double>::infinity();
        Rng rng(7);
        std::vector<double> t;
        for (int k = 0; k < 100; ++k) t.push_back(0.02 * k);
        const auto a = sample_amplitude_trajectory(p, t, rng);
        for (double v : a) CHECK(v == a.front());
    }
    SUBCASE("degenerate bounds give ones") {
        AmplitudeScaleProcess p{1.0, 1.0, 3.0};
        Rng rng(3);
        const auto a = sample_amplitude_trajectory(p, {0.0, 0.5, 1.0, 4.0}, rng);
        for (double v : a) CHECK(v == 1.0);
    }
    SUBCASE("empty times") {
        Rng rng(1);
        CHECK(sample_amplitude_trajectory(AmplitudeScaleProcess{}, {}, rng).empty());
    }
    SUBCASE("stationary mean") {
        // 1000 samples spaced by five correlation times are nearly
        // independent; the mean must lie within 3 standard errors of 1.
        AmplitudeScaleProcess p;
        Rng rng(2024);
        std::vector<double> t(1000);
        for (std::size_t k = 0; k < t.size(); ++k) t[k] = 15.0 * k;
        const auto a = sample_amplitude_trajectory(p, t, rng);
        double mean = 0, var = 0;
        for (double v : a) mean += v;
        mean /= a.size();
        for (double v : a) var += (v - mean) * (v - mean);
        var /= (a.size() - 1);
        CHECK(std::abs(mean - 1.0) < 3.0 * std::sqrt(var / a.size()));
        for (double v : a) {
            CHECK(v >= p.a_min);
            CHECK(v <= p.a_max);
        }
    }
    SUBCASE("deterministic given seed") {
        AmplitudeScaleProcess p;
        std::vector<double> t{0.0, 1.0, 2.0, 3.0};
        Rng r1(99), r2(99);
        CHECK(sample_amplitude_trajectory(p, t, r1) == sample_amplitude_trajectory(p, t, r2));
    }
}

TEST_CASE("model file round trip and diagnostics") {
    std::stringstream out;
    write_field_model(out, table1_model());
    const auto back = parse_field_model(out, "roundtrip");
    const auto ref = table1_model();
    REQUIRE(back.components().size() == ref.components().size());
    for (std::size_t i = 0; i < ref.components().size(); ++i) {
        CHECK(back.components()[i].amplitude == rel_approx(ref.components()[i].amplitude).epsilon(1e-15));
        CHECK(back.components()[i].frequency == ref.components()[i].frequency);
        CHECK(back.components()[i].phase == ref.components()[i].phase);
    }

    std::stringstream bad("t0_s = 0\n[component]\namplitude_mG = 2.95\nfrequency_Hz = fifty\n");
    try {
        parse_field_model(bad, "bad.conf");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("frequency_Hz") != std::string::npos);
        CHECK(msg.find(":4") != std::string::npos);
    }
}

TEST_CASE("bundled default model file reproduces the built-in table") {
    const auto m = load_field_model(DECOLAB_DATA_DIR "/table1.conf");
    const auto ref = table1_model();
    REQUIRE(m.components().size() == ref.components().size());
    for (std::size_t i = 0; i < ref.components().size(); ++i) {
        CHECK(m.components()[i].amplitude == rel_approx(ref.components()[i].amplitude).epsilon(1e-15));
        CHECK(m.components()[i].frequency == ref.components()[i].frequency);
        CHECK(m.components()[i].phase == ref.components()[i].phase);
    }
}
