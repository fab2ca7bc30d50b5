#include <memory>

#include "common.hpp"
#include "decolab/errors.hpp"
#include "decolab/growth.hpp"
#include "decolab/io.hpp"

namespace decolab::cli {

namespace {

struct ChiOptions {
    double f0 = 25.0;
    std::string f1 = "0.5";
    std::string f1_range;
    int points = 21;
    std::string chi0 = "13ppm";
    std::string chi1 = "1.0937%";
};

int run_chi(RunContext& ctx, const ChiOptions& o) {
    IsotopeEndpoints ends;
    ends.chi0 = parse_quantity(o.chi0, Dimension::fraction, "--chi0");
    ends.chi1 = parse_quantity(o.chi1, Dimension::fraction, "--chi1");
    ends.validate();
    const auto f1s = o.f1_range.empty() ? std::vector<double>{parse_quantity(o.f1, Dimension::none, "--f1")}
                                        : parse_range(o.f1_range, Dimension::none, o.points, false, "--f1-range");
    Series s{"13C fraction", {}, {}, Series::Style::line};
    Json rows = Json::array();
    {
        auto out = open_output(ctx.path(ctx.stem() + ".csv"));
        CsvWriter w(out, {"f0_sccm", "f1_sccm", "effective_ratio", "chi"});
        for (double f1 : f1s) {
            const double chi = chi_from_flows(o.f0, f1, ends);
            w << o.f0 << f1 << effective_flow_ratio(o.f0, f1) << chi;
            w.end_row();
            s.x.push_back(f1);
            s.y.push_back(chi);
            rows.push_back({{"f1_sccm", f1}, {"effective_ratio", effective_flow_ratio(o.f0, f1)}, {"chi", chi}});
        }
    }
    write_json(ctx.path(ctx.stem() + ".json"), {{"f0_sccm", o.f0}, {"chi0", ends.chi0}, {"chi1", ends.chi1}, {"rows", rows}});
    Plot plot;
    plot.title = "13C fraction from methane flows";
    plot.x_label = "enriched-source flow f1 (sccm)";
    plot.y_label = "chi";
    plot.series.push_back(s);
    write_svg(ctx.path(ctx.stem() + ".svg"), plot);
    return kExitOk;
}

struct NitrogenOptions {
    double eta = 7.5e-5;
    double eta_sd = 0.0;
    double n2_flow = 4.0e-12;  // mol/s
    double n2_sd = 0.0;
    double ch4 = 0.19;  // sccm
    std::size_t draws = 100000;
};

int run_nitrogen(RunContext& ctx, const NitrogenOptions& o) {
    Json j;
    j["eta"] = o.eta;
    j["n2_flow_mol_s"] = o.n2_flow;
    j["ch4_flow_sccm"] = o.ch4;
    j["nitrogen_ppb"] = nitrogen_ppb(o.eta, o.n2_flow, o.ch4);
    if (o.eta_sd > 0.0 || o.n2_sd > 0.0) {
        const auto band = propagate_nitrogen(o.eta, o.eta_sd, o.n2_flow, o.n2_sd, o.ch4, o.draws, ctx.seed);
        j["band_ppb"] = {{"lower", band.lower_ppb}, {"point", band.point_ppb}, {"upper", band.upper_ppb}};
    }
    write_json(ctx.path(ctx.stem() + ".json"), j);
    return kExitOk;
}

struct LeakOptions {
    double q_leak = 1.5e-8;  // Pa m^3/s
    std::string p_in = "120Torr";
    std::string p_atm = "1atm";
};

int run_leak(RunContext& ctx, const LeakOptions& o) {
    LeakModel leak;
    leak.q_leak = o.q_leak;
    const double p_in = parse_quantity(o.p_in, Dimension::pressure, "--p-in");
    const double p_atm = parse_quantity(o.p_atm, Dimension::pressure, "--p-atm");
    const double flow = n2_molar_flow(leak, p_in, p_atm);
    write_json(ctx.path(ctx.stem() + ".json"), {{"q_leak_Pa_m3_s", o.q_leak},
                                                {"p_in_Pa", p_in},
                                                {"p_atm_Pa", p_atm},
                                                {"n2_flow_mol_s", flow},
                                                {"n2_flow_sccm", mol_per_s_to_sccm(flow)}});
    return kExitOk;
}

}  // namespace

void add_growth_commands(CLI::App& root, std::vector<Command>& out) {
    CLI::App* g = root.add_subcommand("growth", "Isotope and nitrogen arithmetic for CVD growth");
    g->require_subcommand(1);

    auto c = std::make_shared<ChiOptions>();
    CLI::App* chi = g->add_subcommand("chi", "13C fraction from natural and enriched methane flows");
    chi->add_option("--f0", c->f0, "Natural-source flow (sccm)")->capture_default_str();
    chi->add_option("--f1", c->f1, "Enriched-source flow (sccm)")->capture_default_str();
    chi->add_option("--f1-range", c->f1_range, "Sweep of f1 as a:b or a:b:step");
    chi->add_option("--points", c->points, "Points in an a:b sweep")->capture_default_str();
    chi->add_option("--chi0", c->chi0, "13C fraction of the natural source")->capture_default_str();
    chi->add_option("--chi1", c->chi1, "13C fraction of the enriched source")->capture_default_str();
    out.push_back({chi, [c](RunContext& ctx) { return run_chi(ctx, *c); }});

    auto n = std::make_shared<NitrogenOptions>();
    CLI::App* nit = g->add_subcommand("nitrogen", "Incorporated nitrogen from the leak-driven N2 flow");
    nit->add_option("--eta", n->eta, "Incorporation efficiency n_N / n_C")->capture_default_str();
    nit->add_option("--eta-sd", n->eta_sd, "Standard deviation of eta (enables the band)")->capture_default_str();
    nit->add_option("--n2-flow", n->n2_flow, "N2 flow in mol/s")->capture_default_str();
    nit->add_option("--n2-sd", n->n2_sd, "Standard deviation of the N2 flow")->capture_default_str();
    nit->add_option("--ch4", n->ch4, "Methane flow in sccm")->capture_default_str();
    nit->add_option("--draws", n->draws, "Monte Carlo draws for the band")->capture_default_str();
    out.push_back({nit, [n](RunContext& ctx) { return run_nitrogen(ctx, *n); }});

    auto l = std::make_shared<LeakOptions>();
    CLI::App* leak = g->add_subcommand("leak", "N2 molar flow through an air leak");
    leak->add_option("--q-leak", l->q_leak, "Leak throughput in Pa m^3/s")->capture_default_str();
    leak->add_option("--p-in", l->p_in, "Chamber pressure (e.g. 120Torr)")->capture_default_str();
    leak->add_option("--p-atm", l->p_atm, "Outside pressure")->capture_default_str();
    out.push_back({leak, [l](RunContext& ctx) { return run_leak(ctx, *l); }});
}

}  // namespace decolab::cli
