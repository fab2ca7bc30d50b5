#include "decolab/noise_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "decolab/constants.hpp"
#include "decolab/errors.hpp"
#include "decolab/io.hpp"

namespace decolab {

AcFieldModel::AcFieldModel(std::vector<AcComponent> components, double t0)
    : components_(std::move(components)), t0_(t0) {
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const auto& c = components_[i];
        if (!(c.amplitude >= 0.0) || !std::isfinite(c.amplitude))
            throw ConfigError("component " + std::to_string(i) + ": amplitude must be >= 0");
        if (!(c.frequency > 0.0) || !std::isfinite(c.frequency))
            throw ConfigError("component " + std::to_string(i) + ": frequency must be > 0");
        if (!std::isfinite(c.phase)) throw ConfigError("component " + std::to_string(i) + ": phase not finite");
        if (i > 0 && !(c.frequency > components_[i - 1].frequency))
            throw ConfigError("component frequencies must be strictly increasing");
    }
    if (!(t0_ >= 0.0) || !(t0_ < fundamental_period()))
        throw ConfigError("t0 must lie in [0, fundamental period)");
}

double AcFieldModel::fundamental_period() const {
    if (components_.empty()) return std::numeric_limits<double>::infinity();
    return 1.0 / components_.front().frequency;
}

double field_at(const AcFieldModel& model, double t) {
    double b = 0.0;
    const double dt = t - model.t0();
    for (const auto& c : model.components())
        b += c.amplitude * std::cos(2.0 * PhysicalConstants::pi * c.frequency * dt + c.phase);
    return b;
}

AcFieldModel table1_model() {
    constexpr double mG = units::milligauss;
    return AcFieldModel({{2.95 * mG, 50.0, 0.0},
                         {0.024 * mG, 100.0, 3.0},
                         {0.490 * mG, 150.0, -1.77},
                         {0.0065 * mG, 200.0, -0.4},
                         {0.046 * mG, 250.0, 4.33},
                         {0.010 * mG, 300.0, 0.0},
                         {0.0376 * mG, 350.0, 0.9},
                         {0.0409 * mG, 450.0, -1.3}},
                        0.0);
}

AcFieldModel scale_amplitudes(const AcFieldModel& model, double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("amplitude scale factor must be positive");
    auto comps = model.components();
    for (auto& c : comps) c.amplitude *= a;
    return AcFieldModel(std::move(comps), model.t0());
}

double AmplitudeScaleProcess::resolved_sigma() const {
    if (sigma >= 0.0) return sigma;
    return std::min(1.0 - a_min, a_max - 1.0) / 3.0;
}

void AmplitudeScaleProcess::validate() const {
    if (!(a_min > 0.0 && a_min <= 1.0 && 1.0 <= a_max))
        throw ConfigError("amplitude bounds must satisfy 0 < a_min <= 1 <= a_max");
    if (!(correlation_time > 0.0)) throw ConfigError("correlation_time must be > 0");
}

std::vector<double> sample_amplitude_trajectory(const AmplitudeScaleProcess& proc,
                                                const std::vector<double>& times, Rng& rng) {
    proc.validate();
    std::vector<double> out;
    if (times.empty()) return out;
    out.reserve(times.size());
    const double s = proc.resolved_sigma();
    double latent = 1.0 + s * standard_normal(rng);
    out.push_back(std::clamp(latent, proc.a_min, proc.a_max));
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double dt = times[k] - times[k - 1];
        if (dt < 0.0) throw ConfigError("trajectory times must be increasing");
        const double rho = std::exp(-dt / proc.correlation_time);
        const double kick = s * std::sqrt(std::max(0.0, -std::expm1(-2.0 * dt / proc.correlation_time)));
        latent = 1.0 + (latent - 1.0) * rho + kick * standard_normal(rng);
        out.push_back(std::clamp(latent, proc.a_min, proc.a_max));
    }
    return out;
}

AcFieldModel parse_field_model(std::istream& in, const std::string& source_name) {
    const auto sections = parse_kv(in, source_name);
    double t0 = 0.0;
    for (const auto& e : sections.front().entries) {
        if (e.key == "t0_s")
            t0 = kv_number(e, source_name);
        else
            throw ConfigError(source_name + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
    std::vector<AcComponent> comps;
    for (std::size_t s = 1; s < sections.size(); ++s) {
        const auto& sec = sections[s];
        if (sec.name != "component")
            throw ConfigError(source_name + ":" + std::to_string(sec.line) + ": unknown section '" + sec.name + "'");
        AcComponent c;
        bool have_a = false, have_f = false;
        for (const auto& e : sec.entries) {
            const double v = kv_number(e, source_name);
            if (e.key == "amplitude_mG") {
                c.amplitude = v * units::milligauss;
                have_a = true;
            } else if (e.key == "frequency_Hz") {
                c.frequency = v;
                have_f = true;
            } else if (e.key == "phase_rad") {
                c.phase = v;
            } else {
                throw ConfigError(source_name + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
            }
        }
        if (!have_a || !have_f)
            throw ConfigError(source_name + ":" + std::to_string(sec.line) +
                              ": component needs amplitude_mG and frequency_Hz");
        comps.push_back(c);
    }
    try {
        return AcFieldModel(std::move(comps), t0);
    } catch (const ConfigError& e) {
        throw ConfigError(source_name + ": " + e.what());
    }
}

AcFieldModel load_field_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file '" + path + "'");
    return parse_field_model(in, path);
}

void write_field_model(std::ostream& out, const AcFieldModel& model) {
    out << "t0_s = " << format_double(model.t0()) << '\n';
    for (const auto& c : model.components()) {
        out << "\n[component]\n"
            << "amplitude_mG = " << format_double(c.amplitude / units::milligauss) << '\n'
            << "frequency_Hz = " << format_double(c.frequency) << '\n'
            << "phase_rad = " << format_double(c.phase) << '\n';
    }
}

}  // namespace decolab
