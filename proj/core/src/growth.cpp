#include "decolab/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decolab/constants.hpp"
#include "decolab/errors.hpp"
#include "decolab/random.hpp"

namespace decolab {

void IsotopeEndpoints::validate() const {
    if (!(0.0 < chi0 && chi0 < chi1 && chi1 < 1.0)) throw ConfigError("endpoints need 0 < chi0 < chi1 < 1");
}

double effective_flow_ratio(double f0, double f1) {
    if (f0 < 0.0 || f1 < 0.0) throw ConfigError("flows must be >= 0");
    if (f0 == 0.0 && f1 == 0.0) throw ConfigError("at least one flow must be nonzero");
    return f1 / (1.023 * f0 + 0.036);
}

double chi_from_flows(double f0, double f1, const IsotopeEndpoints& endpoints) {
    endpoints.validate();
    if (std::isinf(f1) && std::isfinite(f0)) return endpoints.chi1;
    const double r = effective_flow_ratio(f0, f1);
    return (endpoints.chi0 + r * endpoints.chi1) / (1.0 + r);
}

double nitrogen_ppb(double eta, double n2_flow_mol_s, double ch4_flow_sccm) {
    if (!(eta > 0.0 && n2_flow_mol_s > 0.0 && ch4_flow_sccm > 0.0))
        throw ConfigError("nitrogen estimate needs positive eta, N2 flow and CH4 flow");
    const double n_ch4 = ch4_flow_sccm / units::sccm_per_mol_s;
    return eta * (n2_flow_mol_s / n_ch4) * 1e9;
}

double leak_throughput(const LeakModel& leak, double temperature) {
    return leak.q_leak + leak.q0 * std::exp(-leak.e_a / (PhysicalConstants::kB * temperature));
}

ArrheniusFit fit_arrhenius(const std::vector<double>& temps_k, const std::vector<double>& dpdt_pa_s,
                           double volume) {
    if (temps_k.size() != dpdt_pa_s.size()) throw DataError("temperature and dP/dt lengths differ");
    if (temps_k.size() < 3) throw DataError("Arrhenius fit needs at least 3 temperatures");
    if (!(volume > 0.0)) throw ConfigError("reactor volume must be > 0");
    for (double t : temps_k)
        if (!(t > 0.0)) throw DataError("temperatures must be > 0 K");

    std::vector<std::size_t> order(temps_k.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return temps_k[a] < temps_k[b]; });
    DecayCurve data;
    for (auto i : order) {
        data.x.push_back(temps_k[i]);
        data.y.push_back(volume * dpdt_pa_s[i]);
    }
    data.validate();

    // E_a is fitted in eV and the throughputs in units of the mean Q so all
    // parameters are of order one.
    constexpr double eV = 1.602176634e-19;
    double q_mean = 0.0;
    for (double q : data.y) q_mean += q;
    q_mean /= data.y.size();
    const double q_unit = q_mean != 0.0 ? std::abs(q_mean) : 1.0;
    DecayCurve scaled = data;
    for (double& q : scaled.y) q /= q_unit;

    auto model = [](double t, const Eigen::VectorXd& p) {
        return p[0] + p[1] * std::exp(-p[2] * eV / (PhysicalConstants::kB * t));
    };

    // Start from the best linear fit of log(Q - q_leak) on 1/T over a grid of
    // trial q_leak values below min(Q).
    const double q_min = *std::min_element(scaled.y.begin(), scaled.y.end());
    Eigen::Vector3d p0(q_min, 0.0, 0.5);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 40; ++k) {
        const double ql = q_min * (1.0 - std::pow(10.0, -0.1 * (k + 1)));
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(scaled.x.size());
        for (std::size_t i = 0; i < scaled.x.size(); ++i) {
            const double lx = 1.0 / scaled.x[i];
            const double ly = std::log(std::max(scaled.y[i] - ql, 1e-300));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double den = m * sxx - sx * sx;
        if (den <= 0.0) continue;
        const double slope = (m * sxy - sx * sy) / den;
        const double icpt = (sy - slope * sx) / m;
        const Eigen::Vector3d trial(ql, std::exp(icpt), std::max(0.0, -slope * PhysicalConstants::kB / eV));
        double cost = 0.0;
        for (std::size_t i = 0; i < scaled.x.size(); ++i) cost += std::pow(model(scaled.x[i], trial) - scaled.y[i], 2);
        if (std::isfinite(cost) && cost < best) {
            best = cost;
            p0 = trial;
        }
    }
    const double inf = std::numeric_limits<double>::infinity();
    Bounds b{Eigen::Vector3d(-inf, 0.0, 0.0), Eigen::Vector3d(inf, inf, 20.0)};
    p0 = p0.cwiseMax(b.lower).cwiseMin(b.upper);
    FitResult fr = curve_fit(model, scaled, p0, b, {"q_leak", "q0", "E_a_eV"});
    // Flat data: an activated term that does not lower the cost below the
    // constant model is degenerate with q_leak and is dropped.
    double flat_cost = 0.0;
    const double mean_scaled = q_mean / q_unit;
    for (double q : scaled.y) flat_cost += (q - mean_scaled) * (q - mean_scaled);
    if (!(fr.chi2 < flat_cost * (1.0 - 1e-9)) || fr.params[2] == 0.0) {
        fr.params = Eigen::Vector3d(mean_scaled, 0.0, 0.0);
        fr.chi2 = flat_cost;
        fr.reduced_chi2 = fr.dof > 0 ? flat_cost / fr.dof : 0.0;
        const double se = scaled.y.size() > 1 ? std::sqrt(flat_cost / (scaled.y.size() - 1) / scaled.y.size()) : 0.0;
        fr.covariance = Eigen::Matrix3d::Zero();
        fr.covariance(0, 0) = se * se;
        fr.stderr = Eigen::Vector3d(se, 0.0, 0.0);
        fr.converged = true;
        fr.message = "no thermally activated component: constant leak";
    }
    // Undo the throughput scaling.
    Eigen::Vector3d unscale(q_unit, q_unit, 1.0);
    fr.params = fr.params.cwiseProduct(unscale);
    fr.covariance = unscale.asDiagonal() * fr.covariance * unscale.asDiagonal();
    fr.stderr = fr.stderr.cwiseProduct(unscale);

    ArrheniusFit out;
    out.model = {fr.params[0], fr.params[1], fr.params[2] * eV, volume};
    out.fit = std::move(fr);
    return out;
}

double n2_molar_flow(const LeakModel& leak, double p_in, double p_atm) {
    if (!(p_atm > 0.0) || !(p_in < p_atm)) throw ConfigError("n2_molar_flow needs p_in < p_atm");
    constexpr double air_n2_fraction = 0.78;
    constexpr double t_ref = 298.0;
    return air_n2_fraction * leak.q_leak * (p_atm - p_in) / p_atm / (PhysicalConstants::gas_constant * t_ref);
}

double mol_per_s_to_sccm(double mol_per_s) { return mol_per_s * units::sccm_per_mol_s; }

double chi_from_ratio(double r) {
    if (!(r >= 0.0)) throw ConfigError("isotope ratio must be >= 0");
    return r / (1.0 + r);
}

double ratio_from_chi(double chi) {
    if (!(chi >= 0.0 && chi < 1.0)) throw ConfigError("isotope fraction must lie in [0, 1)");
    return chi / (1.0 - chi);
}

double delta_permil(double r_a, double r_b) {
    if (!(r_b > 0.0)) throw ConfigError("reference ratio must be > 0");
    return (r_a / r_b - 1.0) * 1000.0;
}

double ratio_from_delta(double delta, double r_ref) { return r_ref * (1.0 + delta / 1000.0); }

NitrogenBand propagate_nitrogen(double eta, double eta_sd, double n2_flow, double n2_sd, double ch4_flow_sccm,
                                std::size_t draws, std::uint64_t seed) {
    if (draws < 10) throw ConfigError("propagation needs at least 10 draws");
    if (eta_sd < 0.0 || n2_sd < 0.0) throw ConfigError("standard deviations must be >= 0");
    Rng rng(seed);
    auto positive_normal = [&](double mean, double sd) {
        if (sd == 0.0) return mean;
        for (;;) {
            const double v = mean + sd * standard_normal(rng);
            if (v > 0.0) return v;
        }
    };
    std::vector<double> v(draws);
    for (auto& x : v) x = nitrogen_ppb(positive_normal(eta, eta_sd), positive_normal(n2_flow, n2_sd), ch4_flow_sccm);
    std::sort(v.begin(), v.end());
    auto quantile = [&](double q) {
        const double pos = q * (v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - lo) * (v[hi] - v[lo]);
    };
    NitrogenBand band;
    band.point_ppb = nitrogen_ppb(eta, n2_flow, ch4_flow_sccm);
    band.lower_ppb = quantile(0.025);
    band.upper_ppb = quantile(0.975);
    return band;
}

}  // namespace decolab
