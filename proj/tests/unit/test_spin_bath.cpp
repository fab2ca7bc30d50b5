#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "approx.hpp"
#include "decolab/constants.hpp"
#include "decolab/errors.hpp"
#include "decolab/spin_bath.hpp"
#include "oracles.hpp"

using namespace decolab;

namespace {

constexpr double kPi = std::numbers::pi;

BathConfig carbon(double chi) {
    BathConfig cfg;
    cfg.concentration = chi;
    return cfg;
}

}  // namespace

TEST_CASE("bath sampling") {
    SUBCASE("expected count at 0.0442 %") {
        const double n = 4.0 * kPi / 3.0 * std::pow(45e-9, 3) * 1.76e29 * 4.42e-4;
        CHECK(expected_spin_count(carbon(4.42e-4)) == rel_approx(n).epsilon(1e-14));
        CHECK(expected_spin_count(carbon(4.42e-4)) == rel_approx(2.97e4).epsilon(0.005));
    }
    SUBCASE("sub-unity mean count is empty with probability 1 - N") {
        BathConfig cfg = carbon(1e-9);
        cfg.r_max = 1e-8;
        const double m = expected_spin_count(cfg);
        REQUIRE(m < 1.0);
        Rng rng(3);
        const int trials = 100000;
        int empty = 0;
        for (int i = 0; i < trials; ++i) empty += sample_bath(cfg, rng).spins.empty() ? 1 : 0;
        const double p = 1.0 - m;
        CHECK(std::abs(empty / double(trials) - p) < 4 * std::sqrt(p * (1 - p) / trials));
    }
    SUBCASE("stochastic rounding preserves the mean count") {
        BathConfig cfg = carbon(1e-5);
        cfg.r_max = 2e-8;
        const double m = expected_spin_count(cfg);
        Rng rng(9);
        double total = 0.0;
        const int trials = 20000;
        for (int i = 0; i < trials; ++i) {
            const auto n = sample_bath(cfg, rng).spins.size();
            CHECK((n == static_cast<std::size_t>(std::floor(m)) || n == static_cast<std::size_t>(std::ceil(m))));
            total += static_cast<double>(n);
        }
        CHECK(std::abs(total / trials - m) < 4 * 0.5 / std::sqrt(trials));
    }
    SUBCASE("positions are uniform in the ball") {
        BathConfig cfg = carbon(1e-4);
        cfg.r_max = 2e-8;
        Rng rng(21);
        std::vector<double> u, c;
        while (u.size() < 100000) {
            for (const auto& s : sample_bath(cfg, rng).spins) {
                u.push_back(std::pow(s.r / cfg.r_max, 3));
                c.push_back(s.cos_theta);
            }
        }
        CHECK(oracle::ks_pvalue(u, [](double x) { return std::clamp(x, 0.0, 1.0); }) > 0.01);
        CHECK(oracle::ks_pvalue(c, [](double x) { return std::clamp(0.5 * (x + 1.0), 0.0, 1.0); }) > 0.01);
    }
    SUBCASE("coupling cutoff drops strong spins") {
        BathConfig cfg = carbon(1e-3);
        cfg.r_max = 1e-8;
        cfg.coupling_cutoff_hz = 1e3;
        Rng rng(2);
        for (int i = 0; i < 50; ++i)
            for (double a : sample_bath(cfg, rng).couplings_z) CHECK(std::abs(a) <= 1e3);
    }
    SUBCASE("invalid configuration") {
        Rng rng(1);
        CHECK_THROWS_AS(sample_bath(carbon(0.0), rng), ConfigError);
        CHECK_THROWS_AS(sample_bath(carbon(1.0), rng), ConfigError);
        BathConfig cfg = carbon(1e-3);
        cfg.r_max = 0.0;
        CHECK_THROWS_AS(sample_bath(cfg, rng), ConfigError);
    }
}

TEST_CASE("hyperfine coupling") {
    // Residual is the rounding of 3 cos^2 - 1 at the magic angle.
    CHECK(std::abs(hyperfine_z(1e-9, 1.0 / std::sqrt(3.0), Species::carbon13)) <
          1e-15 * hyperfine_z(1e-9, 1.0, Species::carbon13));
    for (double c : {-0.9, 0.0, 0.3, 1.0})
        CHECK(hyperfine_z(2e-9, c, Species::carbon13) == rel_approx(hyperfine_z(1e-9, c, Species::carbon13) / 8).epsilon(1e-14));
    CHECK(hyperfine_z(1e-9, 1.0, Species::carbon13) ==
          rel_approx(oracle::carbon_coupling_extended(1e-9)).epsilon(1e-12));
    const double ratio = PhysicalConstants::gamma_e / PhysicalConstants::gamma_c;
    CHECK(hyperfine_z(3e-9, 0.2, Species::electron) ==
          rel_approx(ratio * hyperfine_z(3e-9, 0.2, Species::carbon13)).epsilon(1e-14));
    CHECK_THROWS_AS(hyperfine_z(0.0, 0.5, Species::carbon13), ConfigError);
    CHECK_THROWS_AS(hyperfine_z(1e-9, 1.01, Species::carbon13), ConfigError);
}

TEST_CASE("T2* of explicit baths") {
    SampledBath one;
    one.spins = {{1e-9, 1.0}};
    one.couplings_z = {hyperfine_z(1e-9, 1.0, Species::carbon13)};
    const double a = 2 * kPi * one.couplings_z[0];
    CHECK(t2star_of_bath(one) == rel_approx(2 * std::sqrt(2.0) / a).epsilon(1e-14));

    Rng rng(4);
    BathConfig cfg = carbon(4.42e-4);
    cfg.r_max = 1e-8;
    SampledBath b = sample_bath(cfg, rng);
    REQUIRE(!b.spins.empty());
    SampledBath mirror = b;
    mirror.spins.insert(mirror.spins.end(), b.spins.begin(), b.spins.end());
    mirror.couplings_z.insert(mirror.couplings_z.end(), b.couplings_z.begin(), b.couplings_z.end());
    CHECK(t2star_of_bath(mirror) == rel_approx(t2star_of_bath(b) / std::sqrt(2.0)).epsilon(1e-13));
    CHECK(std::isinf(t2star_of_bath(SampledBath{})));
}

TEST_CASE("T2* distribution") {
    SUBCASE("one bath yields one sample") {
        CHECK(t2star_distribution(carbon(4.42e-4), 1, 1).samples.size() == 1);
    }
    SUBCASE("samples follow the Poisson-bath half-normal law") {
        BathConfig cfg = carbon(4.42e-4);
        cfg.count_mode = CountMode::poisson;
        const auto d = t2star_distribution(cfg, 4000, 17, 8);
        const double sigma = oracle::poisson_bath_scale(PhysicalConstants::n_d * 4.42e-4, PhysicalConstants::gamma_c);
        CHECK(sigma * 4.42e-4 == rel_approx(0.0318e-6).epsilon(0.005));
        CHECK(d.half_normal_scale == rel_approx(sigma).epsilon(0.05));
        CHECK(oracle::ks_pvalue(d.samples, [&](double x) { return 1.0 - oracle::half_normal_exceedance(x, sigma); }) >
              0.01);
        CHECK(d.ci95_low < d.half_normal_scale);
        CHECK(d.ci95_high > d.half_normal_scale);
    }
    SUBCASE("scale law holds across concentrations") {
        std::vector<double> products;
        for (double chi : {4.42e-4, 1.949e-3, 1.0937e-2}) {
            const auto d = t2star_distribution(carbon(chi), 1500, 5, 8);
            products.push_back(d.half_normal_scale * chi);
        }
        for (double p : products) CHECK(p == rel_approx(products[0]).epsilon(0.05));
        const auto single = t2star_distribution(carbon(4.42e-4), 3000, 6, 8).half_normal_scale;
        const auto doubled = t2star_distribution(carbon(8.84e-4), 3000, 7, 8).half_normal_scale;
        CHECK(doubled == rel_approx(single / 2).epsilon(0.05));
    }
    SUBCASE("bit-identical for a seed regardless of thread count") {
        const auto a = t2star_distribution(carbon(4.42e-4), 64, 99, 1);
        const auto b = t2star_distribution(carbon(4.42e-4), 64, 99, 6);
        CHECK(a.samples == b.samples);
        CHECK(a.half_normal_scale == b.half_normal_scale);
        Rng r1 = make_stream(99, 3);
        CHECK(sample_t2star(carbon(4.42e-4), r1) == a.samples[3]);
    }
    SUBCASE("half-normal scale estimator") {
        CHECK(half_normal_scale({1.0, 1.0}) == rel_approx(1.0));
        CHECK(half_normal_scale({3.0, 4.0}) == rel_approx(std::sqrt(12.5)));
    }
}

TEST_CASE("electron-bath likelihood") {
    ElectronBathOptions opts;
    opts.n_baths = 4000;
    opts.threads = 8;
    SUBCASE("no centres is vacuous") {
        CHECK(electron_bath_likelihood(21.0, 280e-6, 0, opts).likelihood == 1.0);
    }
    SUBCASE("non-increasing in rho with shared random numbers") {
        opts.r_max = electron_bath_radius(10.0, 1000.0);
        double prev = 1.0;
        for (double rho : {2.0, 5.0, 10.0, 15.0, 21.0, 30.0, 45.0}) {
            const auto r = electron_bath_likelihood(rho, 280e-6, 6, opts);
            CHECK(r.likelihood <= prev);
            CHECK(r.stderr >= 0.0);
            prev = r.likelihood;
        }
    }
    SUBCASE("exceedance is non-increasing in the threshold") {
        double prev = 1.0;
        for (double x : {50e-6, 100e-6, 200e-6, 280e-6, 400e-6}) {
            const auto r = electron_bath_likelihood(21.0, x, 1, opts);
            CHECK(r.exceedance <= prev);
            prev = r.exceedance;
        }
    }
    SUBCASE("exceedance matches the Poisson-bath law") {
        const double sigma = oracle::poisson_bath_scale(PhysicalConstants::n_d * 21e-9, PhysicalConstants::gamma_e);
        const auto r = electron_bath_likelihood(21.0, 280e-6, 1, opts);
        const double expected = oracle::half_normal_exceedance(280e-6, sigma);
        // Fixed-count baths in a finite ball are slightly narrower than the
        // unbounded Poisson law; allow 2 % on top of the sampling error.
        CHECK(std::abs(r.exceedance - expected) < 4 * r.exceedance_stderr + 0.02 * expected);
    }
    SUBCASE("posterior mass above the threshold is a probability") {
        const auto post = electron_bath_posterior_above(21.0, 280e-6, 6, 21.0, opts);
        CHECK(post.mass_above > 0.0);
        CHECK(post.mass_above < 1.0);
        CHECK(electron_bath_posterior_above(30.0, 280e-6, 6, 21.0, opts).mass_above < post.mass_above);
    }
    CHECK_THROWS_AS(electron_bath_likelihood(0.0, 280e-6, 6, opts), ConfigError);
}
