#pragma once

#include <climits>
#include <complex>
#include <vector>

#include "decolab/fit.hpp"
#include "decolab/laplace.hpp"

namespace decolab {

// Frequencies in MHz, times in s, D in MHz^2 s^-1.
struct OuDiffusionModel {
    double d_coeff = 1.0;
    double gamma_i = 100.0;  // FWHM of the stationary Gaussian
    double f0 = 0.0;

    // theta = D (2 sqrt(2 ln 2) / gamma_i)^2.
    double theta() const;
    // gamma_i^2 / (8 ln 2) = D / theta.
    double stationary_variance() const;
    void validate() const;
};

struct HomogeneousLine {
    double c0 = 1.0;       // peak counts
    double gamma_h = 1.0;  // Lorentzian FWHM, MHz
};

// delta-function loss at f_ion with strength S. S multiplies a density in
// MHz^-1, so its unit is MHz s^-1; it is reported as S_per_s.
struct IonizationSink {
    double strength = 0.0;
    double f_ion = 0.0;
    double forward_rescale = 0.96;
};

struct SolverSettings {
    int n_eigen = 2000;
    int inversion_nodes = 24;
    double min_valid_time_factor = 10.0;
    // Orders at or above this use the asymptotic Hermite form. The default
    // keeps the exact recurrence for every retained order.
    int hermite_crossover = INT_MAX;
};

double ou_variance(const OuDiffusionModel& model, double tau_d);
double ou_mean(const OuDiffusionModel& model, double tau_d, double f_start);
double ou_pdf(const OuDiffusionModel& model, double f, double tau_d, double f_start);

// gamma_h^2 / (16 ln 2 D).
double tau_c(double d_coeff, double gamma_h);

// C_h(delta) = c0 (gamma_h/2)^2 / (delta^2 + (gamma_h/2)^2).
double lorentzian_counts(const HomogeneousLine& line, double delta);

// Lorentzian line convolved with the Gaussian transition density, as a Voigt
// profile. Probe detuning is measured in model coordinates.
double counts_no_ionization(const OuDiffusionModel& model, const HomogeneousLine& line, double tau_d,
                            double probe_detuning, double f_start);
inline double counts_no_ionization(const OuDiffusionModel& model, const HomogeneousLine& line, double tau_d,
                                   double probe_detuning) {
    return counts_no_ionization(model, line, tau_d, probe_detuning, model.f0);
}

// exp(-theta f^2 / 4D) H_n(f sqrt(theta/2D)) / sqrt(2^n n!) scaled by
// pi^{-1/4}, i.e. the Hermite function phi_n at x = f sqrt(theta/2D).
double stable_hermite_gaussian(int n, double x, int crossover = 50);

// w_n(f) = psi_0(f) psi_n(f) psi_n(f_s) / psi_0(f_s), psi_n(f) = sqrt(a) phi_n(a (f - f0)),
// a = sqrt(theta / 2D). The transition density is sum_n w_n(f) exp(-n theta t).
double eigen_weight(const OuDiffusionModel& model, int n, double f, double f_start, int crossover = INT_MAX);
inline double eigen_weight(const OuDiffusionModel& model, int n, double f) {
    return eigen_weight(model, n, f, model.f0);
}

// 10 / (theta N_eigen) with the default factor.
double min_valid_time(const OuDiffusionModel& model, const SolverSettings& settings);

std::complex<double> laplace_p0(const OuDiffusionModel& model, double f, std::complex<double> s,
                                const SolverSettings& settings, double f_start);
inline std::complex<double> laplace_p0(const OuDiffusionModel& model, double f, std::complex<double> s,
                                       const SolverSettings& settings) {
    return laplace_p0(model, f, s, settings, model.f0);
}

// P~(f,s) = P~0(f|f_s) - S P~0(f_ion|f_s) P~0(f|f_ion) / (1 + S P~0(f_ion|f_ion)).
std::complex<double> laplace_p_with_sink(const OuDiffusionModel& model, const IonizationSink& sink, double f,
                                         std::complex<double> s, const SolverSettings& settings, double f_start);
inline std::complex<double> laplace_p_with_sink(const OuDiffusionModel& model, const IonizationSink& sink,
                                                double f, std::complex<double> s,
                                                const SolverSettings& settings) {
    return laplace_p_with_sink(model, sink, f, s, settings, model.f0);
}

// Precomputed eigen-expansion for one (model, sink, start) triple. All
// methods are const and safe to share between threads.
class SinkSolver {
public:
    SinkSolver(const OuDiffusionModel& model, const IonizationSink& sink, const SolverSettings& settings,
               double f_start);

    const OuDiffusionModel& model() const { return model_; }
    const SolverSettings& settings() const { return settings_; }
    double min_time() const;

    std::complex<double> p0(double f, std::complex<double> s) const;
    std::complex<double> p(double f, std::complex<double> s) const;
    // Density in f after tau_d with the sink active (ValidityError below min_time()).
    double pdf(double f, double tau_d) const;
    // Integral of the density over f, from the exact zeroth moment of each
    // eigenfunction term.
    double survival(double tau_d) const;

    // Lorentzian line convolved with P(., tau_d) at the probe detuning. The
    // convolution is taken term by term in the eigenbasis before inversion.
    double counts(const HomogeneousLine& line, double tau_d, double probe_detuning) const;

    // Transform-domain pieces for repeated evaluation at different S.
    struct CountsKernel {
        TalbotContour contour;
        std::vector<std::complex<double>> q_start, q_ion, a_start, r_ion;
    };
    CountsKernel counts_kernel(const HomogeneousLine& line, double tau_d, double probe_detuning) const;
    // Same as counts_kernel at each delay, sharing one line projection.
    std::vector<CountsKernel> counts_kernels(const HomogeneousLine& line, const std::vector<double>& taus,
                                             double probe_detuning) const;
    static double counts_from_kernel(const CountsKernel& k, double strength);

private:
    std::vector<double> basis(double f) const;  // phi_n(x), n < n_eigen
    std::vector<double> projection(const HomogeneousLine& line, double probe_detuning) const;
    std::complex<double> sum(const std::vector<double>& coeff, std::complex<double> s) const;
    CountsKernel kernel_from_projection(const std::vector<double>& l, double tau_d) const;

    OuDiffusionModel model_;
    IonizationSink sink_;
    SolverSettings settings_;
    double theta_;
    double alpha_;  // a = sqrt(theta / 2D)
    double x_start_, x_ion_;
    std::vector<double> ratio_start_, ratio_ion_;  // phi_n(x) / phi_0(x)
    std::vector<double> phi_ion_;
};

double counts_with_ionization(const OuDiffusionModel& model, const IonizationSink& sink,
                              const HomogeneousLine& line, double tau_d, double probe_detuning,
                              const SolverSettings& settings = {});

// Forward-time counts, rescaled by sink.forward_rescale.
double forward_counts(const OuDiffusionModel& model, const IonizationSink& sink, const HomogeneousLine& line,
                      double tau_d, double probe_detuning, const SolverSettings& settings = {});

double power_broadened_linewidth(double gamma0, double b, double power_nw);
// b such that power_broadened_linewidth(gamma0, b, power_nw) == gamma_at_power.
double broadening_coefficient(double gamma0, double gamma_at_power, double power_nw);

struct DiffusionDataset {
    double power_nw = 0.0;
    DecayCurve backward;  // x = tau_d (s), y = counts
    DecayCurve forward;   // may be empty
};

struct PowerParams {
    double power_nw = 0.0;
    double d_coeff = 0.0;
    double d_stderr = 0.0;
    double c0 = 0.0;
    double c0_stderr = 0.0;
    double strength = 0.0;
    double strength_stderr = 0.0;
};

struct DiffusionFit {
    double gamma_i = 0.0;
    double gamma_i_stderr = 0.0;
    double gamma_h = 0.0;
    std::vector<PowerParams> per_power;
    FitResult raw;
};

struct JointFitOptions {
    double gamma_i_guess = 150.0;
};

// Shared gamma_i with per-power {D, C0}; gamma_h is held fixed; probe at the
// line centre (detuning 0) and f_start = f0 = 0.
DiffusionFit joint_fit_backward(const std::vector<DiffusionDataset>& datasets, double gamma_h_fixed,
                                const JointFitOptions& opts = {});

// One-parameter fit of S to forward counts with the diffusion parameters
// held at their backward-fit values. forward model = rescale x sink counts.
FitResult fit_ionization_rate(const DecayCurve& forward, const OuDiffusionModel& model,
                              const HomogeneousLine& line, double forward_rescale,
                              const SolverSettings& settings = {});

}  // namespace decolab
