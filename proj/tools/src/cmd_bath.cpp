#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "common.hpp"
#include "decolab/errors.hpp"
#include "decolab/io.hpp"
#include "decolab/spin_bath.hpp"

namespace decolab::cli {

namespace {

struct T2StarOptions {
    std::string chi = "0.0442%";
    std::size_t n_baths = 10000;
    std::string species = "carbon13";
    std::string r_max = "45nm";
    std::string count_mode = "rounding";
    std::string cutoff = "0Hz";
    int bins = 60;
};

int run_t2star(RunContext& ctx, const T2StarOptions& o) {
    BathConfig cfg;
    cfg.concentration = parse_quantity(o.chi, Dimension::fraction, "--chi");
    cfg.r_max = parse_quantity(o.r_max, Dimension::length, "--r-max");
    cfg.species = o.species == "electron" ? Species::electron : Species::carbon13;
    cfg.count_mode = o.count_mode == "poisson" ? CountMode::poisson : CountMode::stochastic_rounding;
    cfg.coupling_cutoff_hz = parse_quantity(o.cutoff, Dimension::frequency, "--cutoff");
    if (o.n_baths < 1) throw ConfigError("--n-baths must be >= 1");
    if (o.bins < 1) throw ConfigError("--bins must be >= 1");
    const auto d = t2star_distribution(cfg, o.n_baths, ctx.seed, ctx.threads);

    const std::string stem = ctx.stem();
    {
        auto out = open_output(ctx.path(stem + ".csv"));
        CsvWriter w(out, {"bath", "t2star_s"});
        for (std::size_t i = 0; i < d.samples.size(); ++i) {
            w << std::to_string(i) << d.samples[i];
            w.end_row();
        }
    }
    Json j;
    j["concentration"] = cfg.concentration;
    j["n_baths"] = d.samples.size();
    j["half_normal_scale_s"] = d.half_normal_scale;
    j["scale_stderr_s"] = d.scale_stderr;
    j["ci95_s"] = {d.ci95_low, d.ci95_high};
    j["scale_times_chi_us"] = d.half_normal_scale * cfg.concentration * 1e6;
    write_json(ctx.path(stem + ".json"), j);

    // Histogram as a density, with the fitted half-normal law on top.
    const double hi = *std::max_element(d.samples.begin(), d.samples.end());
    const double width = hi > 0.0 ? hi / o.bins : 1.0;
    Series hist{"Monte Carlo", {}, {}, Series::Style::bars};
    std::vector<double> counts(static_cast<std::size_t>(o.bins), 0.0);
    for (double t : d.samples)
        counts[std::min<std::size_t>(static_cast<std::size_t>(t / width), counts.size() - 1)] += 1.0;
    for (int b = 0; b < o.bins; ++b) {
        hist.x.push_back((b + 0.5) * width);
        hist.y.push_back(counts[static_cast<std::size_t>(b)] / (d.samples.size() * width));
    }
    Series law{"half-normal", {}, {}, Series::Style::line};
    const double s = d.half_normal_scale;
    for (int i = 0; i <= 200; ++i) {
        const double t = hi * i / 200.0;
        law.x.push_back(t);
        law.y.push_back(s > 0.0 ? std::sqrt(2.0 / std::numbers::pi) / s * std::exp(-t * t / (2 * s * s)) : 0.0);
    }
    Plot plot;
    plot.title = "T2* over bath configurations";
    plot.x_label = "T2* (s)";
    plot.y_label = "probability density (1/s)";
    plot.series = {hist, law};
    write_svg(ctx.path(stem + ".svg"), plot);
    return kExitOk;
}

struct LikelihoodOptions {
    std::string rho = "21ppb";
    std::string rho_range;
    int points = 11;
    std::string t2_lower = "280us";
    int centres = 6;
    std::size_t n_baths = 20000;
    std::string rho_ref = "0";
    std::string r_max = "0";
};

int run_likelihood(RunContext& ctx, const LikelihoodOptions& o) {
    ElectronBathOptions opts;
    opts.n_baths = o.n_baths;
    opts.seed = ctx.seed;
    opts.threads = ctx.threads;
    opts.r_max = parse_quantity(o.r_max, Dimension::length, "--r-max");
    const double t2 = parse_quantity(o.t2_lower, Dimension::time, "--t2-lower");
    const double rho_ref = parse_quantity(o.rho_ref, Dimension::fraction, "--rho-ref") * 1e9;
    std::vector<double> rhos;
    if (o.rho_range.empty())
        rhos.push_back(parse_quantity(o.rho, Dimension::fraction, "--rho"));
    else
        rhos = parse_range(o.rho_range, Dimension::fraction, o.points, false, "--rho-range");
    // One sphere radius for the whole sweep keeps L(rho) monotone.
    if (rhos.size() > 1) opts.rho_reference_ppb = rho_ref > 0.0 ? rho_ref : rhos.back() * 1e9;

    const std::string stem = ctx.stem();
    Series curve{"likelihood", {}, {}, Series::Style::line};
    Json rows = Json::array();
    {
        auto out = open_output(ctx.path(stem + ".csv"));
        CsvWriter w(out, {"rho_ppb", "likelihood", "stderr", "exceedance", "r_max_m"});
        for (double rho : rhos) {
            const double ppb = rho * 1e9;
            const auto r = electron_bath_likelihood(ppb, t2, o.centres, opts);
            w << ppb << r.likelihood << r.stderr << r.exceedance << r.r_max;
            w.end_row();
            curve.x.push_back(ppb);
            curve.y.push_back(r.likelihood);
            rows.push_back({{"rho_ppb", ppb}, {"likelihood", r.likelihood}, {"stderr", r.stderr}});
        }
    }
    Json j;
    j["t2_lower_s"] = t2;
    j["centres"] = o.centres;
    j["n_baths"] = o.n_baths;
    j["results"] = rows;
    if (o.rho_range.empty()) {
        const double ppb = rhos.front() * 1e9;
        const auto post = electron_bath_posterior_above(ppb, t2, o.centres, rho_ref > 0.0 ? rho_ref : ppb, opts);
        j["posterior_mass_above"] = post.mass_above;
        j["posterior_reference_ppb"] = post.rho_reference_ppb;
    }
    write_json(ctx.path(stem + ".json"), j);
    Plot plot;
    plot.title = "likelihood of the observed T2* lower bound";
    plot.x_label = "electron spin density (ppb)";
    plot.y_label = "likelihood";
    plot.series.push_back(curve);
    write_svg(ctx.path(stem + ".svg"), plot);
    return kExitOk;
}

}  // namespace

void add_bath_commands(CLI::App& root, std::vector<Command>& out) {
    CLI::App* bath = root.add_subcommand("bath", "Spin-bath Monte Carlo");
    bath->require_subcommand(1);

    auto t = std::make_shared<T2StarOptions>();
    CLI::App* ts = bath->add_subcommand("t2star", "T2* distribution over random bath configurations");
    ts->add_option("--chi", t->chi, "Spin fraction (e.g. 0.0442%)")->capture_default_str();
    ts->add_option("--n-baths", t->n_baths, "Bath configurations")->capture_default_str();
    ts->add_option("--species", t->species, "carbon13 or electron")
        ->check(CLI::IsMember({"carbon13", "electron"}))
        ->capture_default_str();
    ts->add_option("--r-max", t->r_max, "Sampling sphere radius")->capture_default_str();
    ts->add_option("--count-mode", t->count_mode, "rounding or poisson spin counts")
        ->check(CLI::IsMember({"rounding", "poisson"}))
        ->capture_default_str();
    ts->add_option("--cutoff", t->cutoff, "Drop spins with smaller couplings")->capture_default_str();
    ts->add_option("--bins", t->bins, "Histogram bins")->capture_default_str();
    out.push_back({ts, [t](RunContext& c) { return run_t2star(c, *t); }});

    auto l = std::make_shared<LikelihoodOptions>();
    CLI::App* lk = bath->add_subcommand("likelihood", "Likelihood that n centres all exceed a T2* lower bound");
    lk->add_option("--rho", l->rho, "Electron spin density (e.g. 21ppb)")->capture_default_str();
    lk->add_option("--rho-range", l->rho_range, "Density sweep a:b instead of --rho");
    lk->add_option("--points", l->points, "Points in an a:b sweep")->capture_default_str();
    lk->add_option("--t2-lower", l->t2_lower, "Observed T2* lower bound")->capture_default_str();
    lk->add_option("--centres", l->centres, "Independent centres observed")->capture_default_str();
    lk->add_option("--n-baths", l->n_baths, "Bath configurations")->capture_default_str();
    lk->add_option("--rho-ref", l->rho_ref, "Density at which the posterior reference sample is drawn (0 = --rho)")->capture_default_str();
    lk->add_option("--r-max", l->r_max, "Sampling sphere radius (0 = automatic)")->capture_default_str();
    out.push_back({lk, [l](RunContext& c) { return run_likelihood(c, *l); }});
}

}  // namespace decolab::cli
