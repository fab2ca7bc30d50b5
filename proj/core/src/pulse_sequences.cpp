#include "decolab/pulse_sequences.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "decolab/constants.hpp"
#include "decolab/errors.hpp"
#include "decolab/parallel.hpp"

namespace decolab {

namespace {

constexpr double kPi = PhysicalConstants::pi;
constexpr double kPoleWindow = 1e-6;

// cos(N x) / cos(x) for odd N, or sin(N x) / cos(x) for even N, expanded as a
// finite sum that stays regular where cos(x) = 0.
double pole_free_ratio(int n, double x) {
    double r = 0.0;
    if (n % 2 == 0) {
        for (int j = 0; j < n / 2; ++j) r += ((j % 2) ? -2.0 : 2.0) * std::sin((n - 1 - 2 * j) * x);
    } else {
        r = (((n - 1) / 2) % 2) ? -1.0 : 1.0;
        for (int j = 0; j <= (n - 3) / 2; ++j) r += ((j % 2) ? -2.0 : 2.0) * std::cos((n - 1 - 2 * j) * x);
    }
    return r;
}

// (1 - sec x) * g(N x) with g = sin for even N and cos for odd N.
double secant_factor(int n, double x) {
    const double g = (n % 2 == 0) ? std::sin(n * x) : std::cos(n * x);
    const double c = std::cos(x);
    if (std::abs(c) < kPoleWindow) return g - pole_free_ratio(n, x);
    const double s = std::sin(0.5 * x);
    return -2.0 * s * s / c * g;
}

}  // namespace

std::string to_string(SequenceKind kind) {
    switch (kind) {
        case SequenceKind::Ramsey: return "ramsey";
        case SequenceKind::Hahn: return "hahn";
        case SequenceKind::CPMG: return "cpmg";
    }
    return "unknown";
}

SequenceKind sequence_kind_from_string(const std::string& name) {
    if (name == "ramsey") return SequenceKind::Ramsey;
    if (name == "hahn") return SequenceKind::Hahn;
    if (name == "cpmg") return SequenceKind::CPMG;
    throw ConfigError("unknown sequence kind '" + name + "'");
}

PulseSequence PulseSequence::ramsey(double total_time) {
    PulseSequence s{SequenceKind::Ramsey, 0, total_time};
    s.validate();
    return s;
}

PulseSequence PulseSequence::hahn(double tau) {
    PulseSequence s{SequenceKind::Hahn, 1, tau};
    s.validate();
    return s;
}

PulseSequence PulseSequence::cpmg(int n_pulses, double tau) {
    PulseSequence s{SequenceKind::CPMG, n_pulses, tau};
    s.validate();
    return s;
}

double PulseSequence::total_time() const { return kind == SequenceKind::Ramsey ? tau : 2.0 * n_pulses * tau; }

void PulseSequence::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("sequence tau must be > 0");
    switch (kind) {
        case SequenceKind::Ramsey:
            if (n_pulses != 0) throw ConfigError("Ramsey sequence has no pi-pulses");
            break;
        case SequenceKind::Hahn:
            if (n_pulses != 1) throw ConfigError("Hahn echo has exactly one pi-pulse");
            break;
        case SequenceKind::CPMG:
            if (n_pulses < 1) throw ConfigError("CPMG needs at least one pi-pulse");
            break;
    }
}

std::complex<double> filter_function(double omega, int n_pulses, double tau) {
    if (n_pulses < 1) throw ConfigError("filter_function needs n_pulses >= 1");
    if (omega == 0.0) return {0.0, 0.0};
    const double x = omega * tau;
    const double mag = 2.0 / omega * secant_factor(n_pulses, x);
    const std::complex<double> carrier = std::polar(1.0, -omega * n_pulses * tau);
    if (n_pulses % 2 == 0) return mag * carrier;
    return std::complex<double>(0.0, -mag) * carrier;
}

double phase_cpmg(const AcFieldModel& model, int n_pulses, double tau, double t0) {
    double phi = 0.0;
    for (const auto& c : model.components()) {
        const double w = 2.0 * kPi * c.frequency;
        const std::complex<double> f = filter_function(w, n_pulses, tau);
        phi += c.amplitude * (std::polar(1.0, -(c.phase - w * t0)) * f).real();
    }
    return PhysicalConstants::gamma_nv * phi;
}

double phase_ramsey(const AcFieldModel& model, double total_time, double t0) {
    double phi = 0.0;
    for (const auto& c : model.components()) {
        const double w = 2.0 * kPi * c.frequency;
        phi += 2.0 * c.amplitude / w * std::sin(0.5 * w * total_time) *
               std::cos(w * (0.5 * total_time - t0) + c.phase);
    }
    return PhysicalConstants::gamma_nv * phi;
}

double phase_echo(const AcFieldModel& model, double tau, double t0) {
    double phi = 0.0;
    for (const auto& c : model.components()) {
        const double w = 2.0 * kPi * c.frequency;
        const double s = std::sin(0.5 * w * tau);
        phi += 4.0 * c.amplitude / w * s * s * std::sin(w * (tau - t0) + c.phase);
    }
    return PhysicalConstants::gamma_nv * phi;
}

double phase(const AcFieldModel& model, const PulseSequence& seq, double t0) {
    switch (seq.kind) {
        case SequenceKind::Ramsey: return phase_ramsey(model, seq.tau, t0);
        case SequenceKind::Hahn: return phase_echo(model, seq.tau, t0);
        case SequenceKind::CPMG: return phase_cpmg(model, seq.n_pulses, seq.tau, t0);
    }
    return 0.0;
}

SequenceResponse synchronized_response(const AcFieldModel& model, const PulseSequence& seq, double t0) {
    const double p = phase(model, seq, t0);
    return {p, std::cos(p)};
}

std::vector<double> phase_amplitudes(const AcFieldModel& model, const PulseSequence& seq) {
    std::vector<double> amps;
    amps.reserve(model.components().size());
    for (const auto& c : model.components()) {
        const double w = 2.0 * kPi * c.frequency;
        double f = 0.0;
        if (seq.kind == SequenceKind::Ramsey)
            f = std::abs(2.0 / w * std::sin(0.5 * w * seq.tau));
        else
            f = std::abs(filter_function(w, seq.n_pulses, seq.tau));
        amps.push_back(PhysicalConstants::gamma_nv * c.amplitude * f);
    }
    return amps;
}

int auto_t0_nodes(const AcFieldModel& model, const PulseSequence& seq, double window) {
    const auto amps = phase_amplitudes(model, seq);
    double bandwidth = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i)
        bandwidth += (amps[i] + 1.0) * model.components()[i].frequency * window;
    const double needed = 1.25 * bandwidth + 64.0;
    return std::max(400, static_cast<int>(std::ceil(needed)));
}

double expectation_unsynchronized(const AcFieldModel& model, const PulseSequence& seq, int n_t0, double window) {
    seq.validate();
    if (n_t0 == 0) n_t0 = auto_t0_nodes(model, seq, window);
    if (n_t0 < 2) throw ConfigError("n_t0 must be >= 2 (or 0 for automatic)");
    if (model.empty()) return 1.0;
    const double h = window / n_t0;
    double sum = 0.0;
    for (int k = 0; k < n_t0; ++k) sum += std::cos(phase(model, seq, (k + 0.5) * h));
    return sum / n_t0;
}

namespace {

std::int64_t quantize(double value, double scale, const char* what) {
    const double scaled = value * scale;
    const double rounded = std::round(scaled);
    if (!std::isfinite(scaled) || std::abs(scaled - rounded) > 1e-9 * std::max(1.0, std::abs(rounded)))
        throw ConfigError(std::string(what) + " is not quantized");
    return static_cast<std::int64_t>(rounded);
}

}  // namespace

bool is_revival(double t_dd, double tau, double f_ac) {
    const std::int64_t t_us = quantize(t_dd, 1e6, "t_dd (whole microseconds)");
    const std::int64_t tau_us = quantize(tau, 1e6, "tau (whole microseconds)");
    const std::int64_t f = quantize(f_ac, 1.0, "f_ac (whole hertz)");
    if (t_us <= 0 || tau_us <= 0 || f <= 0) throw ConfigError("is_revival needs positive inputs");
    constexpr std::int64_t kMicro = 1'000'000;
    // t_dd = k / f_ac  <=>  t_us * f divisible by 10^6.
    if ((t_us * f) % kMicro != 0) return false;
    // tau = (1/4 + n/2) / f_ac  <=>  4 f tau_us / 10^6 is an odd integer.
    const std::int64_t q = 4 * f * tau_us;
    if (q % kMicro == 0 && (q / kMicro) % 2 == 1) return false;
    return true;
}

std::vector<double> ramsey_envelope(const AcFieldModel& model, double a_min, double a_max,
                                    const std::vector<double>& times, int n_t0, int n_a, unsigned threads) {
    if (!(a_min > 0.0 && a_min <= a_max)) throw ConfigError("ramsey_envelope needs 0 < a_min <= a_max");
    if (n_a < 1) throw ConfigError("n_a must be >= 1");
    const int nodes = (a_min == a_max) ? 1 : n_a;
    std::vector<AcFieldModel> scaled;
    scaled.reserve(nodes);
    for (int j = 0; j < nodes; ++j) {
        const double a = nodes == 1 ? a_min : a_min + (a_max - a_min) * j / (nodes - 1);
        scaled.push_back(scale_amplitudes(model, a));
    }
    std::vector<double> out(times.size());
    parallel_for(times.size(), threads, [&](std::size_t i) {
        const auto seq = PulseSequence::ramsey(times[i]);
        double s = 0.0;
        for (const auto& m : scaled) s += expectation_unsynchronized(m, seq, n_t0);
        out[i] = s / nodes;
    });
    return out;
}

}  // namespace decolab
