#pragma once

#include <complex>
#include <string>
#include <vector>

#include "decolab/noise_model.hpp"

namespace decolab {

enum class SequenceKind { Ramsey, Hahn, CPMG };

std::string to_string(SequenceKind kind);
SequenceKind sequence_kind_from_string(const std::string& name);

// Ideal instantaneous pi-pulses. For Hahn and CPMG, tau is half the
// inter-pulse delay and pulses sit at (2k-1) tau, k = 1..N; for Ramsey, tau
// is the total free-evolution time.
struct PulseSequence {
    SequenceKind kind = SequenceKind::Ramsey;
    int n_pulses = 0;
    double tau = 0.0;

    static PulseSequence ramsey(double total_time);
    static PulseSequence hahn(double tau);
    static PulseSequence cpmg(int n_pulses, double tau);

    double total_time() const;
    void validate() const;
};

struct SequenceResponse {
    double phase = 0.0;
    double expectation_x = 1.0;
};

// F(w) = integral of the toggling function s(t) e^{-i w t} over [0, 2 N tau].
// Finite everywhere; within 1e-6 of a sec(w tau) pole the removable
// singularity is evaluated by an exact finite trigonometric sum.
std::complex<double> filter_function(double omega, int n_pulses, double tau);

double phase_cpmg(const AcFieldModel& model, int n_pulses, double tau, double t0);
double phase_ramsey(const AcFieldModel& model, double total_time, double t0);
double phase_echo(const AcFieldModel& model, double tau, double t0);
double phase(const AcFieldModel& model, const PulseSequence& seq, double t0);

SequenceResponse synchronized_response(const AcFieldModel& model, const PulseSequence& seq, double t0);

// Peak t0-dependent phase excursion contributed by each component.
std::vector<double> phase_amplitudes(const AcFieldModel& model, const PulseSequence& seq);

// Node count used by expectation_unsynchronized when n_t0 == 0: at least
// 400, and above the Carson bandwidth of cos(Phi(t0)) over the window so the
// midpoint rule does not alias.
int auto_t0_nodes(const AcFieldModel& model, const PulseSequence& seq, double window = 0.02);

// Midpoint-rule average of cos(Phi(t0)) over t0 in [0, window).
// n_t0 == 0 selects auto_t0_nodes.
double expectation_unsynchronized(const AcFieldModel& model, const PulseSequence& seq, int n_t0 = 400,
                                  double window = 0.02);

// Sufficient revival test on microsecond-quantized inputs: t_dd is an integer
// number of mains periods and 4 f_ac tau is not an odd integer.
// Throws ConfigError unless t_dd and tau are whole microseconds and f_ac is a
// whole number of hertz.
bool is_revival(double t_dd, double tau, double f_ac);

// t0-averaged Ramsey expectation, further averaged over n_a evenly spaced
// amplitude scale factors in [a_min, a_max] (one node at a_min when equal).
std::vector<double> ramsey_envelope(const AcFieldModel& model, double a_min, double a_max,
                                    const std::vector<double>& times, int n_t0 = 400, int n_a = 15,
                                    unsigned threads = 1);

}  // namespace decolab
