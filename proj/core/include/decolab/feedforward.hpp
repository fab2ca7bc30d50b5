#pragma once

#include <cstdint>
#include <vector>

#include "decolab/noise_model.hpp"
#include "decolab/random.hpp"

namespace decolab {

struct ShotConfig {
    int n_shots = 50;
    double readout_fidelity_0 = 0.925;  // P(read +1 | +1)
    double readout_fidelity_1 = 0.925;  // P(read -1 | -1)
    double shot_period = 0.02;          // s, one mains period per shot
    // Infinite-shot limit: observables equal their expectation values.
    bool noiseless = false;

    void validate() const;
};

// Draws one binary shot per entry of `expectations` (the +1 probability is
// (1 + e) / 2), applies the readout confusion matrix and returns the
// fidelity-corrected mean clipped to [-1, 1].
double sample_observable_series(const std::vector<double>& expectations, const ShotConfig& cfg, Rng& rng);

// n_shots repetitions of a fixed expectation value.
double sample_observable(double true_expectation, const ShotConfig& cfg, Rng& rng);

struct PhaseEstimate {
    double phi = 0.0;  // rad, in (-pi, pi]
    double x_raw = 0.0;
    double y_raw = 0.0;
    bool defined = true;  // false when x_raw = y_raw = 0
};

// X and Y blocks of the synchronized echo under a static field.
PhaseEstimate estimate_phase(const AcFieldModel& model, double tau, const ShotConfig& cfg, Rng& rng);

struct FeedforwardOutcome {
    double tau = 0.0;
    double phi_estimate = 0.0;
    double c_expectation = 1.0;
    double x_raw = 1.0;
    double y_raw = 0.0;
    std::uint64_t seed = 0;
};

struct FeedforwardOptions {
    int repetitions = 12;
    // Re-estimate the phase before every C block, or only once per tau.
    bool reestimate_per_repetition = true;
    double t0 = 0.0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

// Each tau uses stream_seed(seed, index) and runs `repetitions` X/Y/C block
// triples (or one X/Y pair followed by all C blocks). The amplitude drift
// a(t) evolves continuously over the wall-clock of every shot. The reported
// x_raw, y_raw, phi_estimate belong to the first repetition; c_expectation
// is the mean over repetitions.
std::vector<FeedforwardOutcome> run_feedforward(const AcFieldModel& model, const std::vector<double>& taus,
                                                const ShotConfig& cfg, const AmplitudeScaleProcess& drift,
                                                const FeedforwardOptions& opts);

}  // namespace decolab
