#pragma once

// Independent reference computations used only by the test suites. None of
// these call into the decolab closed forms they are used to check.

#include <functional>
#include <vector>

#include "decolab/noise_model.hpp"
#include "decolab/pulse_sequences.hpp"

namespace oracle {

// Adaptive Gauss-Kronrod integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                 unsigned max_depth = 15);

// Sum of B_i cos(w_i (t - t0) + phi_i) evaluated in 50-digit arithmetic.
double field_extended(const decolab::AcFieldModel& model, double t);

// gamma_nv times the integral of s(t) B(t) over the sequence, where s(t)
// flips sign at every pi-pulse and B is re-evaluated from the component list.
double toggled_phase(const decolab::AcFieldModel& model, const decolab::PulseSequence& seq, double t0);

// The same toggled integrand, transformed analytically to the frequency
// domain: integral of s(t) exp(-i w t) by quadrature.
double filter_function_real(double omega, int n_pulses, double tau);
double filter_function_imag(double omega, int n_pulses, double tau);

// J0 by its power series in 400-digit arithmetic.
double bessel_j0_series(double x);

// Kolmogorov-Smirnov p-value of samples against a continuous CDF.
double ks_pvalue(std::vector<double> samples, const std::function<double(double)>& cdf);

// phi_n(x) by the three-term recurrence in 60-digit arithmetic.
double hermite_function_extended(int n, double x);

// mu0/(4 pi) hbar gamma_c gamma_e / r^3 with theta = 0, in Hz, evaluated
// constant by constant in 50-digit arithmetic from CODATA inputs.
double carbon_coupling_extended(double r_m);

// Half-normal scale of T2* for an unbounded uniform Poisson bath:
//   sigma = 9 sqrt(3) / (4 pi^{3/2} n K),  K = (mu0/4pi) hbar gamma_bath gamma_e,
// which follows from the one-sided stable law of sum_j A_j^2.
double poisson_bath_scale(double number_density, double gamma_bath);

// Exceedance P(T2* > x) for that half-normal law.
double half_normal_exceedance(double x, double sigma);

}  // namespace oracle
