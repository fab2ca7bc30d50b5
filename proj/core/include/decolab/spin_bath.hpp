#pragma once

#include <cstdint>
#include <vector>

#include "decolab/random.hpp"

namespace decolab {

enum class Species { carbon13, electron };

enum class CountMode {
    stochastic_rounding,  // floor(m + u), u uniform: preserves the mean
    poisson,
};

struct BathConfig {
    // Fraction of lattice sites occupied by bath spins (1e-9 per ppb).
    double concentration = 4.42e-4;
    double r_max = 45e-9;  // m
    Species species = Species::carbon13;
    CountMode count_mode = CountMode::stochastic_rounding;
    // Spins whose |coupling| exceeds this value (Hz) are dropped; 0 disables.
    double coupling_cutoff_hz = 0.0;

    void validate() const;
};

struct BathSpin {
    double r = 0.0;  // m
    double cos_theta = 0.0;
};

struct SampledBath {
    std::vector<BathSpin> spins;
    std::vector<double> couplings_z;  // Hz
};

// (4 pi / 3) r_max^3 n_d concentration.
double expected_spin_count(const BathConfig& cfg);

// Positions uniform in the ball, off-lattice, with the count drawn per
// cfg.count_mode. The rounding variate is drawn first, then spins in order.
SampledBath sample_bath(const BathConfig& cfg, Rng& rng);

// Secular dipolar coupling A/(2 pi) in Hz of a bath spin to the NV electron.
// Throws ConfigError for r <= 0 or |cos_theta| > 1.
double hyperfine_z(double r, double cos_theta, Species species);

// sqrt(2) / Gamma_z with Gamma_z^2 = sum_j A_j^2 / 4 and A_j angular;
// +inf for an empty bath.
double t2star_of_bath(const SampledBath& bath);

struct T2StarDistribution {
    std::vector<double> samples;     // s
    double half_normal_scale = 0.0;  // s, maximum-likelihood sqrt(mean T^2)
    double scale_stderr = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

// Bath b uses stream_seed(seed, b); results do not depend on `threads`.
// Infinite samples (empty baths) are excluded from the scale fit.
T2StarDistribution t2star_distribution(const BathConfig& cfg, std::size_t n_baths, std::uint64_t seed,
                                       unsigned threads = 1);

// Same draws as sample_bath followed by t2star_of_bath, without storing the
// bath.
double sample_t2star(const BathConfig& cfg, Rng& rng);

// Maximum-likelihood half-normal scale of finite positive samples.
double half_normal_scale(const std::vector<double>& samples);

struct ElectronBathOptions {
    std::size_t n_baths = 20000;
    // Ball radius; 0 picks the radius holding reference_spin_count spins at
    // rho_reference_ppb (or at rho itself when that is 0).
    double r_max = 0.0;
    double reference_spin_count = 1000.0;
    double rho_reference_ppb = 0.0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct LikelihoodResult {
    double likelihood = 1.0;
    double stderr = 0.0;
    double exceedance = 1.0;  // P(T2* > t2_lower | rho)
    double exceedance_stderr = 0.0;
    double r_max = 0.0;
};

double electron_bath_radius(double rho_ppb, double spin_count);

// L(rho) = P(T2* > t2_lower | rho)^n_centres by Monte Carlo. The standard
// error is propagated from the binomial error of the exceedance. Sharing
// (seed, r_max) across rho values couples the samples so that L is exactly
// non-increasing in rho.
LikelihoodResult electron_bath_likelihood(double rho_ppb, double t2_lower, int n_centres,
                                          const ElectronBathOptions& opts);

// Posterior probability P(rho > rho_threshold) under a flat prior on rho,
// using L(rho) = P(T2* > t2_lower)^n_centres. The exceedance curve is
// obtained from one Monte Carlo sample at rho_reference through the exact
// dilation law T2*(rho) = T2*(rho_ref) rho_ref / rho of an unbounded uniform
// bath.
struct PosteriorResult {
    double mass_above = 0.0;
    double rho_reference_ppb = 0.0;
};
PosteriorResult electron_bath_posterior_above(double rho_threshold_ppb, double t2_lower, int n_centres,
                                              double rho_reference_ppb, const ElectronBathOptions& opts);

}  // namespace decolab
