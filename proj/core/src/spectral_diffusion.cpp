#include "decolab/spectral_diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "decolab/errors.hpp"
#include "decolab/special.hpp"

namespace decolab {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kPi = std::numbers::pi;

void check_validity(double tau_d, double min_time) {
    if (tau_d < min_time)
        throw ValidityError("tau_d = " + std::to_string(tau_d) + " s is below the eigen-truncation validity bound " +
                            std::to_string(min_time) + " s (requires tau_d >> 1/(theta N_eigen))");
}

}  // namespace

double OuDiffusionModel::theta() const {
    const double k = 2.0 * std::sqrt(2.0 * kLn2) / gamma_i;
    return d_coeff * k * k;
}

double OuDiffusionModel::stationary_variance() const { return gamma_i * gamma_i / (8.0 * kLn2); }

void OuDiffusionModel::validate() const {
    if (!(d_coeff > 0.0) || !std::isfinite(d_coeff)) throw ConfigError("diffusion coefficient D must be > 0");
    if (!(gamma_i > 0.0) || !std::isfinite(gamma_i)) throw ConfigError("gamma_i must be > 0");
    if (!std::isfinite(f0)) throw ConfigError("f0 must be finite");
}

double ou_variance(const OuDiffusionModel& model, double tau_d) {
    if (tau_d < 0.0) throw ConfigError("tau_d must be >= 0");
    const double v_inf = model.stationary_variance();
    return -v_inf * std::expm1(-2.0 * model.d_coeff * tau_d / v_inf);
}

double ou_mean(const OuDiffusionModel& model, double tau_d, double f_start) {
    const double decay = std::exp(-model.theta() * tau_d);
    return f_start * decay + model.f0 * (1.0 - decay);
}

double ou_pdf(const OuDiffusionModel& model, double f, double tau_d, double f_start) {
    if (!(tau_d > 0.0)) throw ConfigError("ou_pdf needs tau_d > 0");
    const double v = ou_variance(model, tau_d);
    const double d = f - ou_mean(model, tau_d, f_start);
    return std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * kPi * v);
}

double tau_c(double d_coeff, double gamma_h) {
    if (!(d_coeff > 0.0 && gamma_h > 0.0)) throw ConfigError("tau_c needs positive inputs");
    return gamma_h * gamma_h / (16.0 * kLn2 * d_coeff);
}

double lorentzian_counts(const HomogeneousLine& line, double delta) {
    const double hw = 0.5 * line.gamma_h;
    return line.c0 * hw * hw / (delta * delta + hw * hw);
}

double counts_no_ionization(const OuDiffusionModel& model, const HomogeneousLine& line, double tau_d,
                            double probe_detuning, double f_start) {
    if (tau_d < 0.0) throw ConfigError("tau_d must be >= 0");
    const double hw = 0.5 * line.gamma_h;
    const double offset = probe_detuning - ou_mean(model, tau_d, f_start);
    if (tau_d == 0.0) return lorentzian_counts(line, offset);
    const double sigma = std::sqrt(ou_variance(model, tau_d));
    // c0 hw^2 times the convolution with the unnormalised Lorentzian
    // 1/(x^2 + hw^2) = (pi / hw) x normalised Lorentzian.
    return line.c0 * kPi * hw * voigt_profile(offset, sigma, hw);
}

double stable_hermite_gaussian(int n, double x, int crossover) {
    if (n < 0) throw ConfigError("Hermite order must be >= 0");
    return hermite_function(n, x, crossover);
}

double eigen_weight(const OuDiffusionModel& model, int n, double f, double f_start, int crossover) {
    model.validate();
    if (n < 0) throw ConfigError("eigen index must be >= 0");
    const double theta = model.theta();
    const double a = std::sqrt(theta / (2.0 * model.d_coeff));
    const double x = a * (f - model.f0);
    const double xs = a * (f_start - model.f0);
    const double phi0x = hermite_function(0, x, crossover);
    const double phi0s = hermite_function(0, xs, crossover);
    return a * phi0x * hermite_function(n, x, crossover) * hermite_function(n, xs, crossover) / phi0s;
}

double min_valid_time(const OuDiffusionModel& model, const SolverSettings& settings) {
    return settings.min_valid_time_factor / (model.theta() * settings.n_eigen);
}

SinkSolver::SinkSolver(const OuDiffusionModel& model, const IonizationSink& sink, const SolverSettings& settings,
                       double f_start)
    : model_(model), sink_(sink), settings_(settings) {
    model_.validate();
    if (settings_.n_eigen < 1) throw ConfigError("n_eigen must be >= 1");
    if (!(sink_.strength >= 0.0)) throw ConfigError("sink strength must be >= 0");
    theta_ = model_.theta();
    alpha_ = std::sqrt(theta_ / (2.0 * model_.d_coeff));
    x_start_ = alpha_ * (f_start - model_.f0);
    x_ion_ = alpha_ * (sink_.f_ion - model_.f0);
    const auto ps = basis(f_start);
    phi_ion_ = basis(sink_.f_ion);
    ratio_start_.resize(ps.size());
    ratio_ion_.resize(ps.size());
    for (std::size_t n = 0; n < ps.size(); ++n) {
        ratio_start_[n] = ps[n] / ps[0];
        ratio_ion_[n] = phi_ion_[n] / phi_ion_[0];
    }
}

double SinkSolver::min_time() const { return min_valid_time(model_, settings_); }

std::vector<double> SinkSolver::basis(double f) const {
    const double x = alpha_ * (f - model_.f0);
    const int n = settings_.n_eigen;
    const int exact = std::min(n, settings_.hermite_crossover);
    std::vector<double> phi = hermite_functions(exact, x);
    phi.resize(static_cast<std::size_t>(n));
    for (int k = exact; k < n; ++k) phi[static_cast<std::size_t>(k)] = hermite_function_asymptotic(k, x);
    return phi;
}

std::complex<double> SinkSolver::sum(const std::vector<double>& coeff, std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < coeff.size(); ++n)
        if (coeff[n] != 0.0) acc += coeff[n] / (static_cast<double>(n) * theta_ + s);
    return acc;
}

std::complex<double> SinkSolver::p0(double f, std::complex<double> s) const {
    const auto phi = basis(f);
    std::vector<double> c(phi.size());
    for (std::size_t n = 0; n < phi.size(); ++n) c[n] = alpha_ * phi[0] * phi[n] * ratio_start_[n];
    return sum(c, s);
}

std::complex<double> SinkSolver::p(double f, std::complex<double> s) const {
    const auto phi = basis(f);
    const std::size_t n_max = phi.size();
    std::vector<double> cs(n_max), ci(n_max), ca(n_max), cr(n_max);
    for (std::size_t n = 0; n < n_max; ++n) {
        cs[n] = alpha_ * phi[0] * phi[n] * ratio_start_[n];
        ci[n] = alpha_ * phi[0] * phi[n] * ratio_ion_[n];
        ca[n] = alpha_ * phi_ion_[0] * phi_ion_[n] * ratio_start_[n];
        cr[n] = alpha_ * phi_ion_[n] * phi_ion_[n];
    }
    const std::complex<double> base = sum(cs, s);
    if (sink_.strength == 0.0) return base;
    const double k = sink_.strength;
    return base - k * sum(ca, s) * sum(ci, s) / (1.0 + k * sum(cr, s));
}

double SinkSolver::pdf(double f, double tau_d) const {
    check_validity(tau_d, min_time());
    const auto phi = basis(f);
    const std::size_t n_max = phi.size();
    std::vector<double> cs(n_max), ci(n_max), ca(n_max), cr(n_max);
    for (std::size_t n = 0; n < n_max; ++n) {
        cs[n] = alpha_ * phi[0] * phi[n] * ratio_start_[n];
        ci[n] = alpha_ * phi[0] * phi[n] * ratio_ion_[n];
        ca[n] = alpha_ * phi_ion_[0] * phi_ion_[n] * ratio_start_[n];
        cr[n] = alpha_ * phi_ion_[n] * phi_ion_[n];
    }
    const double k = sink_.strength;
    return invert_laplace(
        [&](std::complex<double> s) {
            const std::complex<double> base = sum(cs, s);
            if (k == 0.0) return base;
            return base - k * sum(ca, s) * sum(ci, s) / (1.0 + k * sum(cr, s));
        },
        tau_d, settings_.inversion_nodes, min_time());
}

double SinkSolver::survival(double tau_d) const {
    const std::size_t n_max = phi_ion_.size();
    std::vector<double> ca(n_max), cr(n_max);
    for (std::size_t n = 0; n < n_max; ++n) {
        ca[n] = alpha_ * phi_ion_[0] * phi_ion_[n] * ratio_start_[n];
        cr[n] = alpha_ * phi_ion_[n] * phi_ion_[n];
    }
    const double k = sink_.strength;
    return invert_laplace(
        [&](std::complex<double> s) {
            // Each P~0(.|a) integrates to 1/s over f.
            if (k == 0.0) return 1.0 / s;
            return (1.0 - k * sum(ca, s) / (1.0 + k * sum(cr, s))) / s;
        },
        tau_d, settings_.inversion_nodes, min_time());
}

std::vector<double> SinkSolver::projection(const HomogeneousLine& line, double probe_detuning) const {
    // l_n = integral of C_h(probe - f) a phi_0(x) phi_n(x) df over x = a (f - f0),
    // by trapezoid halving until the largest change is below 1e-12 of max |l|.
    const double x_max = 9.5;
    const double hw_x = alpha_ * 0.5 * line.gamma_h;
    double h = std::min(0.02, 0.25 * hw_x);
    const std::size_t n_max = static_cast<std::size_t>(settings_.n_eigen);
    auto evaluate = [&](double step) {
        std::vector<double> l(n_max, 0.0);
        const int half = static_cast<int>(std::ceil(x_max / step));
        for (int i = -half; i <= half; ++i) {
            const double x = i * step;
            const double f = model_.f0 + x / alpha_;
            const double w = lorentzian_counts(line, probe_detuning - f) * step;
            const auto phi = basis(f);
            for (std::size_t n = 0; n < n_max; ++n) l[n] += w * phi[0] * phi[n];
        }
        return l;
    };
    std::vector<double> coarse = evaluate(h);
    for (int level = 0; level < 6; ++level) {
        h *= 0.5;
        std::vector<double> fine = evaluate(h);
        double diff = 0.0, scale = 0.0;
        for (std::size_t n = 0; n < n_max; ++n) {
            diff = std::max(diff, std::abs(fine[n] - coarse[n]));
            scale = std::max(scale, std::abs(fine[n]));
        }
        coarse = std::move(fine);
        if (diff <= 1e-12 * scale) break;
    }
    return coarse;
}

SinkSolver::CountsKernel SinkSolver::kernel_from_projection(const std::vector<double>& l, double tau_d) const {
    check_validity(tau_d, min_time());
    const std::size_t n_max = l.size();
    std::vector<double> qs(n_max), qi(n_max), ca(n_max), cr(n_max);
    for (std::size_t n = 0; n < n_max; ++n) {
        qs[n] = l[n] * ratio_start_[n];
        qi[n] = l[n] * ratio_ion_[n];
        ca[n] = alpha_ * phi_ion_[0] * phi_ion_[n] * ratio_start_[n];
        cr[n] = alpha_ * phi_ion_[n] * phi_ion_[n];
    }
    CountsKernel k;
    k.contour = talbot_contour(tau_d, settings_.inversion_nodes);
    for (const auto& s : k.contour.nodes) {
        k.q_start.push_back(sum(qs, s));
        k.q_ion.push_back(sum(qi, s));
        k.a_start.push_back(sum(ca, s));
        k.r_ion.push_back(sum(cr, s));
    }
    return k;
}

SinkSolver::CountsKernel SinkSolver::counts_kernel(const HomogeneousLine& line, double tau_d,
                                                   double probe_detuning) const {
    check_validity(tau_d, min_time());
    return kernel_from_projection(projection(line, probe_detuning), tau_d);
}

std::vector<SinkSolver::CountsKernel> SinkSolver::counts_kernels(const HomogeneousLine& line,
                                                                 const std::vector<double>& taus,
                                                                 double probe_detuning) const {
    for (double t : taus) check_validity(t, min_time());
    const auto l = projection(line, probe_detuning);
    std::vector<CountsKernel> out;
    out.reserve(taus.size());
    for (double t : taus) out.push_back(kernel_from_projection(l, t));
    return out;
}

double SinkSolver::counts_from_kernel(const CountsKernel& k, double strength) {
    std::vector<std::complex<double>> values(k.contour.nodes.size());
    for (std::size_t j = 0; j < values.size(); ++j)
        values[j] = k.q_start[j] - strength * k.a_start[j] * k.q_ion[j] / (1.0 + strength * k.r_ion[j]);
    return talbot_sum(k.contour, values);
}

double SinkSolver::counts(const HomogeneousLine& line, double tau_d, double probe_detuning) const {
    return counts_from_kernel(counts_kernel(line, tau_d, probe_detuning), sink_.strength);
}

std::complex<double> laplace_p0(const OuDiffusionModel& model, double f, std::complex<double> s,
                                const SolverSettings& settings, double f_start) {
    // The truncated series is analytic off the poles s = -n theta, which
    // lets Talbot contours pass through Re(s) < 0.
    if (s.imag() == 0.0 && !(s.real() > 0.0)) throw ConfigError("laplace_p0 needs s off the non-positive real axis");
    return SinkSolver(model, IonizationSink{}, settings, f_start).p0(f, s);
}

std::complex<double> laplace_p_with_sink(const OuDiffusionModel& model, const IonizationSink& sink, double f,
                                         std::complex<double> s, const SolverSettings& settings, double f_start) {
    // The truncated series is analytic off the poles s = -n theta, which
    // lets Talbot contours pass through Re(s) < 0.
    if (s.imag() == 0.0 && !(s.real() > 0.0)) throw ConfigError("laplace_p_with_sink needs s off the non-positive real axis");
    return SinkSolver(model, sink, settings, f_start).p(f, s);
}

double counts_with_ionization(const OuDiffusionModel& model, const IonizationSink& sink,
                              const HomogeneousLine& line, double tau_d, double probe_detuning,
                              const SolverSettings& settings) {
    return SinkSolver(model, sink, settings, model.f0).counts(line, tau_d, probe_detuning);
}

double forward_counts(const OuDiffusionModel& model, const IonizationSink& sink, const HomogeneousLine& line,
                      double tau_d, double probe_detuning, const SolverSettings& settings) {
    return sink.forward_rescale * counts_with_ionization(model, sink, line, tau_d, probe_detuning, settings);
}

double power_broadened_linewidth(double gamma0, double b, double power_nw) {
    if (gamma0 < 0.0 || b < 0.0 || power_nw < 0.0) throw ConfigError("power broadening needs non-negative inputs");
    return std::sqrt(gamma0 * gamma0 + b * power_nw);
}

double broadening_coefficient(double gamma0, double gamma_at_power, double power_nw) {
    if (!(power_nw > 0.0) || gamma_at_power < gamma0) throw ConfigError("broadening calibration needs P > 0, gamma >= gamma0");
    return (gamma_at_power * gamma_at_power - gamma0 * gamma0) / power_nw;
}

namespace {

// Best C0 for fixed shape g (counts = C0 g), weighted least squares.
double best_amplitude(const DecayCurve& c, const std::vector<double>& g, double& cost) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = c.weighted() ? 1.0 / (c.sigma[i] * c.sigma[i]) : 1.0;
        num += w * g[i] * c.y[i];
        den += w * g[i] * g[i];
    }
    const double a = den > 0.0 ? num / den : 0.0;
    cost = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = c.weighted() ? 1.0 / (c.sigma[i] * c.sigma[i]) : 1.0;
        cost += w * std::pow(a * g[i] - c.y[i], 2);
    }
    return a;
}

}  // namespace

DiffusionFit joint_fit_backward(const std::vector<DiffusionDataset>& datasets, double gamma_h_fixed,
                                const JointFitOptions& opts) {
    if (datasets.empty()) throw DataError("joint fit needs at least one dataset");
    if (!(gamma_h_fixed > 0.0)) throw ConfigError("gamma_h must be > 0");
    for (const auto& d : datasets) {
        d.backward.validate();
        if (d.backward.x.size() < 3) throw DataError("each diffusion dataset needs at least 3 points");
    }
    const std::size_t m = datasets.size();
    const HomogeneousLine unit_line{1.0, gamma_h_fixed};

    auto shape = [&](const DecayCurve& c, double gamma_i, double d) {
        const OuDiffusionModel model{d, gamma_i, 0.0};
        std::vector<double> g(c.x.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = counts_no_ionization(model, unit_line, c.x[i], 0.0, 0.0);
        return g;
    };

    // Coarse profile search: per gamma_i, every dataset picks its best D on a
    // log grid with C0 solved linearly.
    double best_total = std::numeric_limits<double>::infinity();
    double gi0 = opts.gamma_i_guess;
    std::vector<double> d0(m, 1.0), c00(m, 1.0);
    std::vector<double> gamma_grid{opts.gamma_i_guess};
    for (int k = 0; k <= 24; ++k) gamma_grid.push_back(10.0 * std::pow(100.0, k / 24.0));
    for (double gi : gamma_grid) {
        if (gi <= gamma_h_fixed * 0.5) continue;
        double total = 0.0;
        std::vector<double> dk(m), ck(m);
        for (std::size_t j = 0; j < m; ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (int q = 0; q <= 72; ++q) {
                const double d = std::pow(10.0, -1.0 + q / 6.0);
                double cost = 0.0;
                const double c0 = best_amplitude(datasets[j].backward, shape(datasets[j].backward, gi, d), cost);
                if (cost < best) {
                    best = cost;
                    dk[j] = d;
                    ck[j] = c0;
                }
            }
            total += best;
        }
        if (total < best_total) {
            best_total = total;
            gi0 = gi;
            d0 = dk;
            c00 = ck;
        }
    }

    const Eigen::Index np = static_cast<Eigen::Index>(1 + 2 * m);
    Eigen::VectorXd p0(np);
    p0[0] = gi0;
    std::vector<std::string> names{"gamma_i"};
    for (std::size_t j = 0; j < m; ++j) {
        p0[static_cast<Eigen::Index>(1 + 2 * j)] = d0[j];
        p0[static_cast<Eigen::Index>(2 + 2 * j)] = c00[j];
        names.push_back("D_" + std::to_string(j));
        names.push_back("C0_" + std::to_string(j));
    }
    std::size_t n_res = 0;
    for (const auto& d : datasets) n_res += d.backward.x.size();
    bool weighted = true;
    for (const auto& d : datasets) weighted = weighted && d.backward.weighted();

    ResidualFn residuals = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(n_res));
        Eigen::Index row = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const auto& c = datasets[j].backward;
            const OuDiffusionModel model{p[static_cast<Eigen::Index>(1 + 2 * j)], p[0], 0.0};
            const HomogeneousLine line{p[static_cast<Eigen::Index>(2 + 2 * j)], gamma_h_fixed};
            for (std::size_t i = 0; i < c.x.size(); ++i) {
                const double w = weighted ? 1.0 / c.sigma[i] : 1.0;
                r[row++] = (counts_no_ionization(model, line, c.x[i], 0.0, 0.0) - c.y[i]) * w;
            }
        }
        return r;
    };
    const double inf = std::numeric_limits<double>::infinity();
    Bounds b{Eigen::VectorXd::Constant(np, 1e-12), Eigen::VectorXd::Constant(np, inf)};
    b.lower[0] = 1e-6;
    LsqOptions lsq;
    lsq.scale_covariance = !weighted;
    FitResult raw = least_squares(residuals, p0, b, lsq);
    raw.names = names;

    DiffusionFit fit;
    fit.gamma_i = raw.params[0];
    fit.gamma_i_stderr = raw.stderr[0];
    fit.gamma_h = gamma_h_fixed;
    for (std::size_t j = 0; j < m; ++j) {
        PowerParams pp;
        pp.power_nw = datasets[j].power_nw;
        pp.d_coeff = raw.params[static_cast<Eigen::Index>(1 + 2 * j)];
        pp.d_stderr = raw.stderr[static_cast<Eigen::Index>(1 + 2 * j)];
        pp.c0 = raw.params[static_cast<Eigen::Index>(2 + 2 * j)];
        pp.c0_stderr = raw.stderr[static_cast<Eigen::Index>(2 + 2 * j)];
        fit.per_power.push_back(pp);
    }
    fit.raw = std::move(raw);
    return fit;
}

FitResult fit_ionization_rate(const DecayCurve& forward, const OuDiffusionModel& model,
                              const HomogeneousLine& line, double forward_rescale,
                              const SolverSettings& settings) {
    forward.validate();
    if (forward.x.empty()) throw DataError("ionization fit needs forward data");
    if (!(forward_rescale > 0.0)) throw ConfigError("forward_rescale must be > 0");
    const SinkSolver solver(model, IonizationSink{}, settings, model.f0);
    const auto kernels = solver.counts_kernels(line, forward.x, 0.0);
    const std::size_t n = forward.x.size();
    auto residual_at = [&](double s) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const double w = forward.weighted() ? 1.0 / forward.sigma[i] : 1.0;
            r[static_cast<Eigen::Index>(i)] =
                (forward_rescale * SinkSolver::counts_from_kernel(kernels[i], s) - forward.y[i]) * w;
        }
        return r;
    };
    // Log-spaced scan anchored on the relaxation rate times the stationary width.
    const double scale = model.theta() * std::sqrt(model.stationary_variance());
    double s0 = 0.0, best = residual_at(0.0).squaredNorm();
    for (int k = 0; k <= 70; ++k) {
        const double s = scale * std::pow(10.0, -4.0 + k / 10.0);
        const double c = residual_at(s).squaredNorm();
        if (c < best) {
            best = c;
            s0 = s;
        }
    }
    Bounds b{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, std::numeric_limits<double>::infinity())};
    LsqOptions lsq;
    lsq.scale_covariance = !forward.weighted();
    FitResult res = least_squares([&](const Eigen::VectorXd& p) { return residual_at(p[0]); },
                                  Eigen::VectorXd::Constant(1, s0), b, lsq);
    res.names = {"S"};
    return res;
}

}  // namespace decolab
