#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace decolab {

struct DecayCurve {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;  // empty when unweighted

    bool weighted() const { return !sigma.empty(); }
    // Throws DataError unless lengths match, x is strictly increasing and
    // every sigma is positive.
    void validate() const;
};

struct FitResult {
    std::vector<std::string> names;
    Eigen::VectorXd params;
    Eigen::VectorXd stderr;
    Eigen::MatrixXd covariance;
    double chi2 = 0.0;
    double reduced_chi2 = 0.0;
    int dof = 0;
    bool converged = false;
    int iterations = 0;
    std::string message;

    double param(const std::string& name) const;
    double error(const std::string& name) const;
};

struct Bounds {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static Bounds unbounded(Eigen::Index n);
};

struct LsqOptions {
    int max_iterations = 500;
    double relative_step = 1e-6;  // forward-difference step
    double ftol = 1e-15;          // relative cost decrease
    double xtol = 1e-12;          // relative parameter change
    double gtol = 1e-14;          // scaled gradient
    double max_condition = 1e14;  // condition of the normalised J^T J
    // When true the covariance is scaled by the reduced chi-square, which is
    // the right choice when residuals are not normalised by known errors.
    bool scale_covariance = false;
};

// Returns r(p). Residuals are expected to be already weighted.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// Levenberg-Marquardt with Marquardt diagonal scaling. Bounds are enforced by
// projection. When the Jacobian at the solution is rank deficient (condition
// number above max_condition) the result is marked not converged.
FitResult least_squares(const ResidualFn& residuals, const Eigen::VectorXd& params0, const Bounds& bounds,
                        const LsqOptions& opts = {}, const JacobianFn& jacobian = {});

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residuals, const Eigen::VectorXd& p,
                                           const Bounds& bounds, double relative_step);

using CurveModel = std::function<double(double x, const Eigen::VectorXd& p)>;

// Weighted residuals (model - y) / sigma, or unweighted with covariance
// scaled by the reduced chi-square.
FitResult curve_fit(const CurveModel& model, const DecayCurve& data, const Eigen::VectorXd& params0,
                    const Bounds& bounds, std::vector<std::string> names, LsqOptions opts = {});

// S(T) = A exp(-(T / T2)^n).
double stretched_exp(double x, double a, double t2, double n);

struct StretchedExpOptions {
    double n_max = 5.0;
    std::optional<double> fixed_n;
};

// Parameters {A, T2, n}; initial guess from log-log linearisation.
FitResult fit_stretched_exp(const DecayCurve& curve, const StretchedExpOptions& opts = {});

// Weighted linear regression of log T2 on log N. Parameters {T0, eta}.
// Two points interpolate exactly with dof = 0 and a message flagging it.
FitResult fit_power_scaling(const std::vector<double>& n_pulses, const std::vector<double>& t2,
                            const std::vector<double>& sigma = {});

// Direct nonlinear fit of T2 = T0 N^eta for comparison with the log-log fit.
FitResult fit_power_scaling_direct(const std::vector<double>& n_pulses, const std::vector<double>& t2,
                                   const std::vector<double>& sigma = {});

// Divides y and sigma by the fitted amplitude A.
DecayCurve rescale_by_amplitude(const DecayCurve& curve, double amplitude);

}  // namespace decolab
