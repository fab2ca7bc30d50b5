#pragma once

#include <complex>
#include <vector>

namespace decolab {

// Faddeeva function w(z) = exp(-z^2) erfc(-i z) for Im z >= 0, by
// Weideman's 32-term rational approximation (SIAM J. Numer. Anal. 31, 1994).
// Coefficients are generated once from a discrete Fourier sum.
std::complex<double> faddeeva(std::complex<double> z);

// Voigt profile: Gaussian (standard deviation sigma) convolved with a
// normalised Lorentzian of half width half maximum gamma, at offset x.
// sigma = 0 reduces to the Lorentzian.
double voigt_profile(double x, double sigma, double gamma);

// Normalised Hermite function
//   phi_n(x) = pi^{-1/4} exp(-x^2/2) H_n(x) / sqrt(2^n n!).
// Below `crossover` the exact three-term recurrence is used with running
// rescaling, so neither H_n nor exp(-x^2/2) over- or underflows separately.
// At and above it the large-n cosine form
//   exp(-x^2/2) H_n(x) ~ 2^n Gamma((n+1)/2) cos(x sqrt(2n) - n pi/2) / sqrt(pi)
// is evaluated in log space with lgamma.
double hermite_function(int n, double x, int crossover);
double hermite_function_recurrence(int n, double x);
double hermite_function_asymptotic(int n, double x);

// phi_0(x) .. phi_{count-1}(x) by recurrence.
std::vector<double> hermite_functions(int count, double x);

// phi_n(0): zero for odd n, exact product form for even n.
double hermite_function_at_zero(int n);

}  // namespace decolab
