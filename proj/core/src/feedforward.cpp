#include "decolab/feedforward.hpp"

#include <algorithm>
#include <cmath>

#include "decolab/errors.hpp"
#include "decolab/parallel.hpp"
#include "decolab/pulse_sequences.hpp"

namespace decolab {

void ShotConfig::validate() const {
    if (n_shots < 1) throw ConfigError("n_shots must be >= 1");
    auto fidelity_ok = [](double f) { return f > 0.5 && f <= 1.0; };
    if (!fidelity_ok(readout_fidelity_0) || !fidelity_ok(readout_fidelity_1))
        throw ConfigError("readout fidelities must lie in (0.5, 1]");
    if (!(shot_period > 0.0)) throw ConfigError("shot_period must be > 0");
}

namespace {

double correct_readout(double p_read_plus, const ShotConfig& cfg) {
    const double f0 = cfg.readout_fidelity_0;
    const double f1 = cfg.readout_fidelity_1;
    const double p = (p_read_plus - (1.0 - f1)) / (f0 + f1 - 1.0);
    return std::clamp(2.0 * p - 1.0, -1.0, 1.0);
}

}  // namespace

double sample_observable_series(const std::vector<double>& expectations, const ShotConfig& cfg, Rng& rng) {
    cfg.validate();
    if (expectations.empty()) throw ConfigError("sample_observable_series needs at least one shot");
    if (cfg.noiseless) {
        double s = 0.0;
        for (double e : expectations) s += e;
        return std::clamp(s / expectations.size(), -1.0, 1.0);
    }
    std::size_t read_plus = 0;
    for (double e : expectations) {
        const bool plus = uniform01(rng) < 0.5 * (1.0 + e);
        const double correct = plus ? cfg.readout_fidelity_0 : cfg.readout_fidelity_1;
        const bool flipped = uniform01(rng) >= correct;
        read_plus += (plus != flipped) ? 1 : 0;
    }
    return correct_readout(static_cast<double>(read_plus) / expectations.size(), cfg);
}

double sample_observable(double true_expectation, const ShotConfig& cfg, Rng& rng) {
    if (!(std::abs(true_expectation) <= 1.0)) throw ConfigError("|expectation| must be <= 1");
    cfg.validate();
    if (cfg.noiseless) return true_expectation;
    // Identical shots: the read-out count is binomial with the confused
    // probability, which is cheaper to draw than individual shots.
    const double p = 0.5 * (1.0 + true_expectation);
    const double q = p * cfg.readout_fidelity_0 + (1.0 - p) * (1.0 - cfg.readout_fidelity_1);
    std::binomial_distribution<long long> bin(cfg.n_shots, q);
    return correct_readout(static_cast<double>(bin(rng)) / cfg.n_shots, cfg);
}

PhaseEstimate estimate_phase(const AcFieldModel& model, double tau, const ShotConfig& cfg, Rng& rng) {
    if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
    const double phi = phase_echo(model, tau, model.t0());
    PhaseEstimate est;
    est.x_raw = sample_observable(std::cos(phi), cfg, rng);
    est.y_raw = sample_observable(std::sin(phi), cfg, rng);
    est.defined = !(est.x_raw == 0.0 && est.y_raw == 0.0);
    est.phi = est.defined ? std::atan2(est.y_raw, est.x_raw) : 0.0;
    return est;
}

namespace {

// Drifting field for one tau: a(t) sampled at every shot start.
class DriftClock {
public:
    DriftClock(const AmplitudeScaleProcess& drift, std::size_t total_shots, double period, Rng& rng) {
        std::vector<double> times(total_shots);
        for (std::size_t k = 0; k < total_shots; ++k) times[k] = k * period;
        a_ = sample_amplitude_trajectory(drift, times, rng);
    }
    // Next block of n shots.
    std::vector<double> take(int n) {
        std::vector<double> out(a_.begin() + next_, a_.begin() + next_ + n);
        next_ += n;
        return out;
    }

private:
    std::vector<double> a_;
    std::size_t next_ = 0;
};

}  // namespace

std::vector<FeedforwardOutcome> run_feedforward(const AcFieldModel& model, const std::vector<double>& taus,
                                                const ShotConfig& cfg, const AmplitudeScaleProcess& drift,
                                                const FeedforwardOptions& opts) {
    cfg.validate();
    drift.validate();
    if (opts.repetitions < 1) throw ConfigError("repetitions must be >= 1");
    const AcFieldModel synced = model.with_t0(opts.t0);
    std::vector<FeedforwardOutcome> out(taus.size());
    parallel_for(taus.size(), opts.threads, [&](std::size_t i) {
        const double tau = taus[i];
        if (!(tau > 0.0)) throw ConfigError("feedforward tau must be > 0");
        const std::uint64_t seed = stream_seed(opts.seed, i);
        Rng rng(seed);
        // Echo phase is linear in the field amplitude, so a drifting field
        // rescales the static phase shot by shot.
        const double phi0 = phase_echo(synced, tau, synced.t0());
        const int n = cfg.n_shots;
        const int reps = opts.repetitions;
        const std::size_t blocks = opts.reestimate_per_repetition ? 3 * reps : 2 + reps;
        DriftClock clock(drift, blocks * static_cast<std::size_t>(n), cfg.shot_period, rng);

        auto block = [&](auto&& observable) {
            std::vector<double> e;
            e.reserve(n);
            for (double a : clock.take(n)) e.push_back(observable(a * phi0));
            return sample_observable_series(e, cfg, rng);
        };

        FeedforwardOutcome res;
        res.tau = tau;
        res.seed = seed;
        double c_sum = 0.0;
        double phi_hat = 0.0;
        for (int r = 0; r < reps; ++r) {
            if (r == 0 || opts.reestimate_per_repetition) {
                const double x = block([](double p) { return std::cos(p); });
                const double y = block([](double p) { return std::sin(p); });
                phi_hat = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
                if (r == 0) {
                    res.x_raw = x;
                    res.y_raw = y;
                    res.phi_estimate = phi_hat;
                }
            }
            c_sum += block([phi_hat](double p) { return std::cos(p - phi_hat); });
        }
        res.c_expectation = c_sum / reps;
        out[i] = res;
    });
    return out;
}

}  // namespace decolab
