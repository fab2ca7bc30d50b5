#pragma once

#include <cstdint>
#include <vector>

#include "decolab/fit.hpp"

namespace decolab {

struct IsotopeEndpoints {
    double chi0 = 13e-6;      // natural-source 13C fraction
    double chi1 = 1.0937e-2;  // enriched-source 13C fraction
    void validate() const;
};

// Effective flow ratio f1 / (1.023 f0 + 0.036); flows in sccm.
double effective_flow_ratio(double f0, double f1);
double chi_from_flows(double f0, double f1, const IsotopeEndpoints& endpoints = {});

// eta (n_N2 / n_CH4) 1e9 with n_CH4 = sccm / 1.345e6 mol s^-1.
double nitrogen_ppb(double eta, double n2_flow_mol_s, double ch4_flow_sccm);

struct LeakModel {
    double q_leak = 0.0;  // Pa m^3 s^-1
    double q0 = 0.0;      // Pa m^3 s^-1
    double e_a = 0.0;     // J
    double volume = 11.3e-3;  // m^3
};

// Q(T) = q_leak + q0 exp(-E_a / (k_B T)).
double leak_throughput(const LeakModel& leak, double temperature);

struct ArrheniusFit {
    LeakModel model;
    FitResult fit;  // parameters {q_leak, q0, E_a_eV}
};

// Fits Q = V dP/dt against temperature.
ArrheniusFit fit_arrhenius(const std::vector<double>& temps_k, const std::vector<double>& dpdt_pa_s,
                           double volume = 11.3e-3);

// 0.78 q_leak (p_atm - p_in) / p_atm / (R 298 K).
double n2_molar_flow(const LeakModel& leak, double p_in, double p_atm = 101325.0);
double mol_per_s_to_sccm(double mol_per_s);

double chi_from_ratio(double r);
double ratio_from_chi(double chi);
// (r_a / r_b - 1) 1000, per mil.
double delta_permil(double r_a, double r_b);
double ratio_from_delta(double delta, double r_ref);

inline constexpr double kRatioVPDB = 0.011113;

struct NitrogenBand {
    double lower_ppb = 0.0;
    double point_ppb = 0.0;
    double upper_ppb = 0.0;
};

// Monte Carlo propagation of independent normal eta and n_N2 truncated to
// positive values; the band is the central 95% interval.
NitrogenBand propagate_nitrogen(double eta, double eta_sd, double n2_flow, double n2_sd, double ch4_flow_sccm,
                                std::size_t draws, std::uint64_t seed);

}  // namespace decolab
