#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "decolab/random.hpp"

namespace decolab {

struct AcComponent {
    double amplitude = 0.0;  // tesla
    double frequency = 0.0;  // Hz
    double phase = 0.0;      // rad
};

// Multi-harmonic interference field B(t) = sum_i B_i cos(w_i (t - t0) + phi_i).
class AcFieldModel {
public:
    AcFieldModel() = default;
    // Throws ConfigError unless amplitudes are non-negative, frequencies are
    // positive and strictly increasing, and t0 lies in [0, 1/f_fundamental).
    AcFieldModel(std::vector<AcComponent> components, double t0);

    const std::vector<AcComponent>& components() const { return components_; }
    double t0() const { return t0_; }
    bool empty() const { return components_.empty(); }
    // Period of the lowest component; +inf for an empty model.
    double fundamental_period() const;

    AcFieldModel with_t0(double t0) const { return AcFieldModel(components_, t0); }

private:
    std::vector<AcComponent> components_;
    double t0_ = 0.0;
};

double field_at(const AcFieldModel& model, double t);

// The eight-harmonic mains model (50 to 450 Hz), t0 = 0.
AcFieldModel table1_model();

AcFieldModel scale_amplitudes(const AcFieldModel& model, double a);

// Clipped Ornstein-Uhlenbeck amplitude multiplier a(t) with mean 1.
struct AmplitudeScaleProcess {
    double a_min = 0.85;
    double a_max = 1.27;
    double correlation_time = 3.0;  // s; +inf freezes the process
    // Stationary standard deviation of the latent process. A negative value
    // selects min(1 - a_min, a_max - 1) / 3 so that clipping stays rare.
    double sigma = -1.0;

    double resolved_sigma() const;
    void validate() const;
};

// Samples a(t_k) at increasing times. The latent process starts from its
// stationary law at times[0] and is propagated exactly between samples; the
// returned values are the latent values clipped to [a_min, a_max].
std::vector<double> sample_amplitude_trajectory(const AmplitudeScaleProcess& proc,
                                                const std::vector<double>& times, Rng& rng);

// Key-value model files:
//   t0_s = 0
//   [component]
//   amplitude_mG = 2.95
//   frequency_Hz = 50
//   phase_rad = 0
AcFieldModel parse_field_model(std::istream& in, const std::string& source_name);
AcFieldModel load_field_model(const std::string& path);
void write_field_model(std::ostream& out, const AcFieldModel& model);

}  // namespace decolab
