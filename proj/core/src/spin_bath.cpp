#include "decolab/spin_bath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decolab/constants.hpp"
#include "decolab/errors.hpp"
#include "decolab/parallel.hpp"

namespace decolab {

namespace {

constexpr double kPi = PhysicalConstants::pi;

// mu0/(4 pi) hbar gamma_bath gamma_e in rad s^-1 m^3.
double dipolar_constant(Species species) {
    using C = PhysicalConstants;
    const double g_bath = species == Species::carbon13 ? C::gamma_c : C::gamma_e;
    return C::mu0_over_4pi * C::hbar * g_bath * C::gamma_e;
}

std::size_t draw_count(const BathConfig& cfg, Rng& rng) {
    const double m = expected_spin_count(cfg);
    const double u = uniform01(rng);
    if (cfg.count_mode == CountMode::poisson) {
        // Below m = 500 the inverse-CDF draw reuses u, so the count is
        // monotone in m for a fixed stream.
        if (m > 500.0) {
            std::poisson_distribution<long long> pd(m);
            return static_cast<std::size_t>(pd(rng));
        }
        double p = std::exp(-m), cdf = p;
        std::size_t k = 0;
        while (u > cdf && k < 100000) {
            ++k;
            p *= m / k;
            cdf += p;
        }
        return k;
    }
    return static_cast<std::size_t>(std::floor(m + u));
}

// Visits each spin as (u, cos_theta) with r^3 = r_max^3 u.
template <class Visit>
void draw_spins(const BathConfig& cfg, Rng& rng, Visit&& visit) {
    const std::size_t n = draw_count(cfg, rng);
    for (std::size_t j = 0; j < n; ++j) {
        double u = uniform01(rng);
        while (u == 0.0) u = uniform01(rng);
        const double c = 2.0 * uniform01(rng) - 1.0;
        visit(u, c);
    }
}

}  // namespace

void BathConfig::validate() const {
    if (!(concentration > 0.0 && concentration < 1.0)) throw ConfigError("concentration must lie in (0, 1)");
    if (!(r_max > 0.0)) throw ConfigError("r_max must be > 0");
    if (coupling_cutoff_hz < 0.0) throw ConfigError("coupling cutoff must be >= 0");
}

double expected_spin_count(const BathConfig& cfg) {
    return 4.0 * kPi / 3.0 * cfg.r_max * cfg.r_max * cfg.r_max * PhysicalConstants::n_d * cfg.concentration;
}

double hyperfine_z(double r, double cos_theta, Species species) {
    if (!(r > 0.0)) throw ConfigError("hyperfine_z needs r > 0");
    if (!(std::abs(cos_theta) <= 1.0)) throw ConfigError("hyperfine_z needs |cos_theta| <= 1");
    const double a = dipolar_constant(species) * (3.0 * cos_theta * cos_theta - 1.0) / (r * r * r);
    return a / (2.0 * kPi);
}

SampledBath sample_bath(const BathConfig& cfg, Rng& rng) {
    cfg.validate();
    SampledBath bath;
    draw_spins(cfg, rng, [&](double u, double c) {
        const double r = cfg.r_max * std::cbrt(u);
        const double a = hyperfine_z(r, c, cfg.species);
        if (cfg.coupling_cutoff_hz > 0.0 && std::abs(a) > cfg.coupling_cutoff_hz) return;
        bath.spins.push_back({r, c});
        bath.couplings_z.push_back(a);
    });
    return bath;
}

double t2star_of_bath(const SampledBath& bath) {
    double sum = 0.0;
    for (double hz : bath.couplings_z) {
        const double a = 2.0 * kPi * hz;
        sum += a * a;
    }
    if (sum == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(2.0) / std::sqrt(0.25 * sum);
}

double sample_t2star(const BathConfig& cfg, Rng& rng) {
    cfg.validate();
    const double k = dipolar_constant(cfg.species);
    const double r3 = cfg.r_max * cfg.r_max * cfg.r_max;
    const double cutoff = 2.0 * kPi * cfg.coupling_cutoff_hz;
    double sum = 0.0;
    draw_spins(cfg, rng, [&](double u, double c) {
        const double a = k * (3.0 * c * c - 1.0) / (r3 * u);
        if (cutoff > 0.0 && std::abs(a) > cutoff) return;
        sum += a * a;
    });
    if (sum == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(2.0) / std::sqrt(0.25 * sum);
}

double half_normal_scale(const std::vector<double>& samples) {
    double s2 = 0.0;
    std::size_t n = 0;
    for (double t : samples) {
        if (!std::isfinite(t)) continue;
        s2 += t * t;
        ++n;
    }
    if (n == 0) return std::numeric_limits<double>::infinity();
    return std::sqrt(s2 / n);
}

T2StarDistribution t2star_distribution(const BathConfig& cfg, std::size_t n_baths, std::uint64_t seed,
                                       unsigned threads) {
    cfg.validate();
    if (n_baths < 1) throw ConfigError("n_baths must be >= 1");
    T2StarDistribution d;
    d.samples.resize(n_baths);
    parallel_for(n_baths, threads, [&](std::size_t b) {
        Rng rng = make_stream(seed, b);
        d.samples[b] = sample_t2star(cfg, rng);
    });
    d.half_normal_scale = half_normal_scale(d.samples);
    const auto finite = static_cast<double>(
        std::count_if(d.samples.begin(), d.samples.end(), [](double t) { return std::isfinite(t); }));
    // Fisher information of the half-normal scale: 2 n / sigma^2.
    d.scale_stderr = finite > 0 ? d.half_normal_scale / std::sqrt(2.0 * finite) : 0.0;
    d.ci95_low = d.half_normal_scale - 1.959963984540054 * d.scale_stderr;
    d.ci95_high = d.half_normal_scale + 1.959963984540054 * d.scale_stderr;
    return d;
}

double electron_bath_radius(double rho_ppb, double spin_count) {
    const double n = PhysicalConstants::n_d * rho_ppb * units::ppb;
    return std::cbrt(3.0 * spin_count / (4.0 * kPi * n));
}

namespace {

BathConfig electron_config(double rho_ppb, double r_max) {
    BathConfig cfg;
    cfg.concentration = rho_ppb * units::ppb;
    cfg.r_max = r_max;
    cfg.species = Species::electron;
    return cfg;
}

double resolve_radius(double rho_ppb, const ElectronBathOptions& opts) {
    if (opts.r_max > 0.0) return opts.r_max;
    const double ref = opts.rho_reference_ppb > 0.0 ? opts.rho_reference_ppb : rho_ppb;
    return electron_bath_radius(ref, opts.reference_spin_count);
}

std::vector<double> electron_samples(double rho_ppb, double r_max, const ElectronBathOptions& opts) {
    const BathConfig cfg = electron_config(rho_ppb, r_max);
    cfg.validate();
    std::vector<double> t(opts.n_baths);
    parallel_for(opts.n_baths, opts.threads, [&](std::size_t b) {
        Rng rng = make_stream(opts.seed, b);
        t[b] = sample_t2star(cfg, rng);
    });
    return t;
}

}  // namespace

LikelihoodResult electron_bath_likelihood(double rho_ppb, double t2_lower, int n_centres,
                                          const ElectronBathOptions& opts) {
    if (!(rho_ppb > 0.0)) throw ConfigError("rho_e must be > 0");
    if (n_centres < 0) throw ConfigError("n_centres must be >= 0");
    if (opts.n_baths < 1) throw ConfigError("n_baths must be >= 1");
    LikelihoodResult res;
    res.r_max = resolve_radius(rho_ppb, opts);
    if (n_centres == 0) return res;
    const auto t = electron_samples(rho_ppb, res.r_max, opts);
    const auto above = std::count_if(t.begin(), t.end(), [&](double v) { return v > t2_lower; });
    const double n = static_cast<double>(t.size());
    const double p = above / n;
    res.exceedance = p;
    res.exceedance_stderr = std::sqrt(p * (1.0 - p) / n);
    res.likelihood = std::pow(p, n_centres);
    res.stderr = n_centres * std::pow(p, n_centres - 1) * res.exceedance_stderr;
    return res;
}

PosteriorResult electron_bath_posterior_above(double rho_threshold_ppb, double t2_lower, int n_centres,
                                              double rho_reference_ppb, const ElectronBathOptions& opts) {
    if (!(rho_threshold_ppb > 0.0 && rho_reference_ppb > 0.0)) throw ConfigError("rho values must be > 0");
    if (n_centres < 1) throw ConfigError("n_centres must be >= 1");
    ElectronBathOptions o = opts;
    o.rho_reference_ppb = rho_reference_ppb;
    const double r_max = resolve_radius(rho_reference_ppb, o);
    auto t = electron_samples(rho_reference_ppb, r_max, o);
    std::sort(t.begin(), t.end());
    const double n = static_cast<double>(t.size());
    // Exceedance at density rho: fraction of reference samples with
    // T2*_ref > t2_lower rho / rho_ref.
    auto likelihood = [&](double rho) {
        const double x = t2_lower * rho / rho_reference_ppb;
        const auto it = std::upper_bound(t.begin(), t.end(), x);
        const double p = static_cast<double>(t.end() - it) / n;
        return std::pow(p, n_centres);
    };
    double rho_hi = 2.0 * rho_threshold_ppb;
    while (likelihood(rho_hi) > 1e-12 && rho_hi < 1e6 * rho_threshold_ppb) rho_hi *= 1.5;
    // L is a step function of rho; a fine trapezoid on each side of the
    // threshold converges at first order in the cell width.
    auto integrate = [&](double lo, double hi) {
        const int nodes = 20000;
        const double h = (hi - lo) / nodes;
        double s = 0.0;
        for (int k = 0; k <= nodes; ++k) {
            const double rho = lo + k * h;
            const double l = rho == 0.0 ? 1.0 : likelihood(rho);
            s += ((k == 0 || k == nodes) ? 0.5 : 1.0) * l;
        }
        return s * h;
    };
    const double below = integrate(0.0, rho_threshold_ppb);
    const double above = integrate(rho_threshold_ppb, rho_hi);
    const double total = below + above;
    PosteriorResult res;
    res.rho_reference_ppb = rho_reference_ppb;
    res.mass_above = total > 0.0 ? above / total : 0.0;
    return res;
}

}  // namespace decolab
