#include "decolab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decolab/errors.hpp"

namespace decolab {

void DecayCurve::validate() const {
    if (x.size() != y.size()) throw DataError("x and y lengths differ");
    if (!sigma.empty() && sigma.size() != x.size()) throw DataError("sigma length differs from x");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw DataError("x must be strictly increasing");
    for (double s : sigma)
        if (!(s > 0.0)) throw DataError("sigma values must be > 0");
}

double FitResult::param(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return params[static_cast<Eigen::Index>(i)];
    throw std::out_of_range("no fit parameter '" + name + "'");
}

double FitResult::error(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return stderr[static_cast<Eigen::Index>(i)];
    throw std::out_of_range("no fit parameter '" + name + "'");
}

Bounds Bounds::unbounded(Eigen::Index n) {
    const double inf = std::numeric_limits<double>::infinity();
    return {Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
}

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& residuals, const Eigen::VectorXd& p,
                                           const Bounds& bounds, double relative_step) {
    const Eigen::VectorXd r0 = residuals(p);
    Eigen::MatrixXd j(r0.size(), p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        double h = relative_step * std::max(std::abs(p[k]), 1e-12);
        if (std::abs(p[k]) < 1e-300) h = relative_step;
        // Step away from the nearer bound so evaluations stay feasible.
        if (p[k] + h > bounds.upper[k]) h = -h;
        Eigen::VectorXd q = p;
        q[k] += h;
        j.col(k) = (residuals(q) - r0) / (q[k] - p[k]);
    }
    return j;
}

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& p, const Bounds& b) {
    return p.cwiseMax(b.lower).cwiseMin(b.upper);
}

}  // namespace

FitResult least_squares(const ResidualFn& residuals, const Eigen::VectorXd& params0, const Bounds& bounds,
                        const LsqOptions& opts, const JacobianFn& jacobian) {
    const Eigen::Index np = params0.size();
    if (bounds.lower.size() != np || bounds.upper.size() != np) throw ConfigError("bounds size mismatch");
    if ((params0.array() < bounds.lower.array()).any() || (params0.array() > bounds.upper.array()).any())
        throw ConfigError("initial parameters outside bounds");

    auto jac = [&](const Eigen::VectorXd& p) {
        return jacobian ? jacobian(p) : finite_difference_jacobian(residuals, p, bounds, opts.relative_step);
    };

    FitResult res;
    Eigen::VectorXd p = params0;
    Eigen::VectorXd r = residuals(p);
    double cost = r.squaredNorm();
    if (!std::isfinite(cost)) throw NonConvergence("residuals not finite at initial parameters");
    res.dof = static_cast<int>(r.size() - np);

    bool done = false;
    double lambda = 1e-3;
    int it = 0;
    Eigen::MatrixXd j;
    if (cost == 0.0) {
        done = true;
        it = 1;
        res.message = "zero residual at initial parameters";
    }
    while (!done && it < opts.max_iterations) {
        ++it;
        j = jac(p);
        Eigen::MatrixXd jtj = j.transpose() * j;
        Eigen::VectorXd g = j.transpose() * r;
        // Parameters held at a bound by an outward-pointing descent direction
        // are frozen for this step; the gradient test sees only free ones.
        for (Eigen::Index k = 0; k < np; ++k) {
            const bool at_upper = p[k] >= bounds.upper[k] && g[k] < 0.0;
            const bool at_lower = p[k] <= bounds.lower[k] && g[k] > 0.0;
            if (!at_upper && !at_lower) continue;
            const double d = jtj(k, k);
            jtj.row(k).setZero();
            jtj.col(k).setZero();
            jtj(k, k) = d > 0.0 ? d : 1.0;
            g[k] = 0.0;
        }
        Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-300);
        if ((g.array().abs() / (diag.array().sqrt() * std::sqrt(cost) + 1e-300)).maxCoeff() < opts.gtol) {
            done = true;
            res.message = "gradient tolerance reached";
            break;
        }
        bool improved = false;
        for (int inner = 0; inner < 60 && !improved; ++inner) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            const Eigen::VectorXd step = a.ldlt().solve(-g);
            const Eigen::VectorXd trial = project(p + step, bounds);
            const Eigen::VectorXd r_trial = residuals(trial);
            const double cost_trial = r_trial.squaredNorm();
            if (std::isfinite(cost_trial) && cost_trial < cost) {
                const double rel_decrease = (cost - cost_trial) / cost;
                const double dx = (trial - p).norm();
                p = trial;
                r = r_trial;
                cost = cost_trial;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = true;
                if (rel_decrease < opts.ftol || cost == 0.0) {
                    done = true;
                    res.message = "cost tolerance reached";
                } else if (dx < opts.xtol * (p.norm() + opts.xtol)) {
                    done = true;
                    res.message = "step tolerance reached";
                }
            } else {
                lambda *= 4.0;
                if (lambda > 1e16) break;
            }
        }
        if (!improved && !done) {
            done = true;
            res.message = "no further decrease possible";
        }
    }
    res.iterations = it;
    res.params = p;
    res.chi2 = cost;
    res.reduced_chi2 = res.dof > 0 ? cost / res.dof : 0.0;
    res.converged = done;
    if (!done) res.message = "maximum iterations reached";

    j = jac(p);
    // Conditioning is judged on the column-normalised Jacobian so that
    // parameter units do not matter.
    Eigen::MatrixXd jn = j;
    for (Eigen::Index k = 0; k < np; ++k) {
        const double norm = j.col(k).norm();
        if (norm > 0.0) jn.col(k) /= norm;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svdn(jn);
    const auto& svn = svdn.singularValues();
    // A parameter that moves no residual under a relative change of itself
    // is unidentifiable even when the normalised columns look independent.
    Eigen::VectorXd sensitivity(np);
    for (Eigen::Index k = 0; k < np; ++k) sensitivity[k] = j.col(k).norm() * std::max(std::abs(p[k]), 1e-300);
    const double max_sens = np ? sensitivity.maxCoeff() : 0.0;
    const bool zero_column = (j.colwise().norm().array() == 0.0).any() ||
                             (max_sens > 0.0 && (sensitivity.array() < 1e-9 * max_sens).any());
    const double cond_n = (!zero_column && svn.size() && svn.minCoeff() > 0.0)
                              ? svn.maxCoeff() / svn.minCoeff()
                              : std::numeric_limits<double>::infinity();
    const bool identifiable = cond_n * cond_n < opts.max_condition && r.size() >= np;
    if (!identifiable) {
        res.converged = false;
        res.message = "parameters not identifiable (rank-deficient Jacobian)";
        res.covariance = Eigen::MatrixXd::Constant(np, np, std::numeric_limits<double>::quiet_NaN());
    } else {
        res.covariance = (j.transpose() * j).inverse();
        if (opts.scale_covariance && res.dof > 0) res.covariance *= res.reduced_chi2;
        res.covariance = 0.5 * (res.covariance + res.covariance.transpose());
    }
    res.stderr = res.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return res;
}

FitResult curve_fit(const CurveModel& model, const DecayCurve& data, const Eigen::VectorXd& params0,
                    const Bounds& bounds, std::vector<std::string> names, LsqOptions opts) {
    data.validate();
    const std::size_t n = data.x.size();
    ResidualFn fn = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const double w = data.weighted() ? 1.0 / data.sigma[i] : 1.0;
            r[static_cast<Eigen::Index>(i)] = (model(data.x[i], p) - data.y[i]) * w;
        }
        return r;
    };
    if (!data.weighted()) opts.scale_covariance = true;
    FitResult res = least_squares(fn, params0, bounds, opts);
    res.names = std::move(names);
    return res;
}

double stretched_exp(double x, double a, double t2, double n) { return a * std::exp(-std::pow(x / t2, n)); }

FitResult fit_stretched_exp(const DecayCurve& curve, const StretchedExpOptions& opts) {
    curve.validate();
    if (curve.x.size() < 4) throw DataError("stretched-exponential fit needs at least 4 points");
    for (double x : curve.x)
        if (!(x >= 0.0)) throw DataError("stretched-exponential fit needs x >= 0");

    // Linearisation: log(-log(y/A)) = n log x - n log T2.
    const double a0 = *std::max_element(curve.y.begin(), curve.y.end());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        const double ratio = curve.y[i] / a0;
        if (curve.x[i] <= 0.0 || ratio <= 0.02 || ratio >= 0.98) continue;
        const double lx = std::log(curve.x[i]);
        const double ly = std::log(-std::log(ratio));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    double n0 = opts.fixed_n.value_or(1.0);
    double t20 = curve.x[curve.x.size() / 2];
    if (m >= 2 && sxx * m - sx * sx > 0.0) {
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double icpt = (sy - slope * sx) / m;
        if (!opts.fixed_n && slope > 0.05) n0 = std::min(slope, opts.n_max);
        if (slope > 0.0) t20 = std::exp(-icpt / slope);
        if (opts.fixed_n) t20 = std::exp((n0 * sx - sy) / (m * n0));
    }
    if (!(t20 > 0.0) || !std::isfinite(t20)) t20 = curve.x.back();
    const double a_guess = a0 > 0.0 ? a0 : 1.0;

    const double inf = std::numeric_limits<double>::infinity();
    if (opts.fixed_n) {
        const double n_fixed = *opts.fixed_n;
        Eigen::VectorXd p0(2);
        p0 << a_guess, t20;
        Bounds b{Eigen::Vector2d(-inf, 1e-300), Eigen::Vector2d(inf, inf)};
        auto fr = curve_fit([n_fixed](double x, const Eigen::VectorXd& p) { return stretched_exp(x, p[0], p[1], n_fixed); },
                            curve, p0, b, {"A", "T2"});
        // Report n as a fixed parameter with zero error.
        Eigen::VectorXd params(3), err(3);
        params << fr.params[0], fr.params[1], n_fixed;
        err << fr.stderr[0], fr.stderr[1], 0.0;
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
        cov.topLeftCorner(2, 2) = fr.covariance;
        fr.params = params;
        fr.stderr = err;
        fr.covariance = cov;
        fr.names = {"A", "T2", "n"};
        return fr;
    }
    Eigen::VectorXd p0(3);
    p0 << a_guess, t20, std::clamp(n0, 0.05, opts.n_max);
    Bounds b{Eigen::Vector3d(-inf, 1e-300, 1e-6), Eigen::Vector3d(inf, inf, opts.n_max)};
    FitResult fr = curve_fit([](double x, const Eigen::VectorXd& p) { return stretched_exp(x, p[0], p[1], p[2]); },
                             curve, p0, b, {"A", "T2", "n"});
    // Without two points that have measurably decayed, T2 and n trade off
    // along a flat valley (n -> 0, T2 -> inf) that the Jacobian does not see.
    if (m < 2) {
        fr.converged = false;
        fr.message = "curve shows no decay: T2 and n not identifiable";
    }
    return fr;
}

namespace {

void check_scaling_input(const std::vector<double>& n, const std::vector<double>& t2,
                         const std::vector<double>& sigma) {
    if (n.size() != t2.size()) throw DataError("N and T2 lengths differ");
    if (!sigma.empty() && sigma.size() != n.size()) throw DataError("sigma length differs from N");
    if (n.size() < 2) throw DataError("power-law fit needs at least 2 points");
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] > 0.0) || !(t2[i] > 0.0)) throw DataError("power-law fit needs positive N and T2");
        if (!sigma.empty() && !(sigma[i] > 0.0)) throw DataError("sigma values must be > 0");
    }
}

}  // namespace

FitResult fit_power_scaling(const std::vector<double>& n_pulses, const std::vector<double>& t2,
                            const std::vector<double>& sigma) {
    check_scaling_input(n_pulses, t2, sigma);
    const std::size_t m = n_pulses.size();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(m), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(m)), w(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        x(k, 0) = 1.0;
        x(k, 1) = std::log(n_pulses[i]);
        y[k] = std::log(t2[i]);
        // d log T2 = sigma / T2.
        w[k] = sigma.empty() ? 1.0 : std::pow(t2[i] / sigma[i], 2);
    }
    const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
    const Eigen::Matrix2d normal = xtw * x;
    if (std::abs(normal.determinant()) < 1e-300) throw DataError("power-law fit needs at least two distinct N");
    const Eigen::Vector2d beta = normal.ldlt().solve(xtw * y);
    const Eigen::VectorXd resid = y - x * beta;
    FitResult res;
    res.names = {"T0", "eta"};
    res.dof = static_cast<int>(m) - 2;
    res.chi2 = resid.dot(w.asDiagonal() * resid);
    res.reduced_chi2 = res.dof > 0 ? res.chi2 / res.dof : 0.0;
    Eigen::Matrix2d cov_log = normal.inverse();
    if (sigma.empty() && res.dof > 0) cov_log *= res.reduced_chi2;
    if (res.dof == 0) res.message = "exact interpolation: zero degrees of freedom, uncertainties undefined";
    const double t0 = std::exp(beta[0]);
    // Jacobian of (T0, eta) with respect to (log T0, eta).
    Eigen::Matrix2d jt;
    jt << t0, 0.0, 0.0, 1.0;
    res.params = Eigen::Vector2d(t0, beta[1]);
    res.covariance = jt * cov_log * jt.transpose();
    if (res.dof == 0 && sigma.empty()) res.covariance.setZero();
    res.stderr = res.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    res.converged = true;
    res.iterations = 1;
    return res;
}

FitResult fit_power_scaling_direct(const std::vector<double>& n_pulses, const std::vector<double>& t2,
                                   const std::vector<double>& sigma) {
    const FitResult start = fit_power_scaling(n_pulses, t2, sigma);
    DecayCurve data;
    // Sort by N so the curve satisfies the increasing-x invariant.
    std::vector<std::size_t> order(n_pulses.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return n_pulses[a] < n_pulses[b]; });
    for (auto i : order) {
        data.x.push_back(n_pulses[i]);
        data.y.push_back(t2[i]);
        if (!sigma.empty()) data.sigma.push_back(sigma[i]);
    }
    const double inf = std::numeric_limits<double>::infinity();
    Bounds b{Eigen::Vector2d(1e-300, -inf), Eigen::Vector2d(inf, inf)};
    return curve_fit([](double x, const Eigen::VectorXd& p) { return p[0] * std::pow(x, p[1]); }, data,
                     start.params, b, {"T0", "eta"});
}

DecayCurve rescale_by_amplitude(const DecayCurve& curve, double amplitude) {
    if (!(amplitude != 0.0) || !std::isfinite(amplitude)) throw DataError("rescale amplitude must be nonzero");
    DecayCurve out = curve;
    for (double& v : out.y) v /= amplitude;
    for (double& s : out.sigma) s /= std::abs(amplitude);
    return out;
}

}  // namespace decolab
