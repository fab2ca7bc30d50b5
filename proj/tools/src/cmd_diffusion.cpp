#include <cmath>
#include <memory>
#include <random>

#include "common.hpp"
#include "decolab/datasets.hpp"
#include "decolab/errors.hpp"
#include "decolab/io.hpp"
#include "decolab/random.hpp"
#include "decolab/spectral_diffusion.hpp"

namespace decolab::cli {

namespace {

struct PredictOptions {
    std::string d_coeff = "3.22e4MHz^2/s";
    std::string gamma_i = "117MHz";
    std::string gamma_h = "22MHz";
    double c0 = 1.0;
    std::string s_rate = "0MHz/s";
    double rescale = 0.96;
    std::string power = "15nW";
    std::string tau_range;
    int points = 16;
    bool linear = false;
    double noise = 0.0;
    double stderr_value = 0.0;
};

int run_predict(RunContext& ctx, const PredictOptions& o) {
    const OuDiffusionModel model{parse_quantity(o.d_coeff, Dimension::diffusion, "--d-coeff") / 1e12,
                                 parse_quantity(o.gamma_i, Dimension::frequency, "--gamma-i") / 1e6, 0.0};
    const HomogeneousLine line{o.c0, parse_quantity(o.gamma_h, Dimension::frequency, "--gamma-h") / 1e6};
    const IonizationSink sink{parse_quantity(o.s_rate, Dimension::drift_rate, "--s-rate") / 1e6, 0.0, o.rescale};
    const double power_nw = parse_quantity(o.power, Dimension::power, "--power") * 1e9;
    if (!(model.d_coeff > 0.0 && model.gamma_i > 0.0)) throw ConfigError("--d-coeff and --gamma-i must be > 0");
    if (o.noise < 0.0) throw ConfigError("--noise must be >= 0");
    const SinkSolver solver(model, sink, SolverSettings{}, 0.0);
    const std::string range = o.tau_range.empty()
                                  ? format_double(2.0 * solver.min_time()) + ":" + format_double(4.0 / model.theta())
                                  : o.tau_range;
    const auto taus = positive_only(parse_range(range, Dimension::time, o.points, !o.linear, "--tau-range"));

    DiffusionDataset d;
    d.power_nw = power_nw;
    const double sd = o.stderr_value > 0.0 ? o.stderr_value : (o.noise > 0.0 ? o.noise : 0.01);
    Rng rng = make_stream(ctx.seed, 0);
    const auto kernels = solver.counts_kernels(line, taus, 0.0);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double back = counts_no_ionization(model, line, taus[i], 0.0);
        const double fwd = o.rescale * SinkSolver::counts_from_kernel(kernels[i], sink.strength);
        const double nb = o.noise > 0.0 ? o.noise * standard_normal(rng) : 0.0;
        const double nf = o.noise > 0.0 ? o.noise * standard_normal(rng) : 0.0;
        d.backward.x.push_back(taus[i]);
        d.backward.y.push_back(back + nb);
        d.backward.sigma.push_back(sd);
        d.forward.x.push_back(taus[i]);
        d.forward.y.push_back(fwd + nf);
        d.forward.sigma.push_back(sd);
    }
    const std::string stem = ctx.stem();
    const std::string csv = stem + ".csv";
    {
        auto out = open_output(ctx.path(csv));
        write_diffusion_dataset(out, d);
    }
    write_text(ctx.path(stem + "_manifest.txt"), "gamma_h_MHz = " + format_double(line.gamma_h) +
                                                     "\n\n[dataset]\npower_nW = " + format_double(power_nw) +
                                                     "\nfile = " + csv + "\n");
    write_json(ctx.path(stem + ".json"), {{"theta_per_s", model.theta()},
                                          {"tau_c_s", tau_c(model.d_coeff, line.gamma_h)},
                                          {"min_valid_time_s", solver.min_time()},
                                          {"points", taus.size()}});
    Plot plot;
    plot.title = "predicted check-probe counts";
    plot.x_label = "diffusion time (s)";
    plot.y_label = "counts";
    plot.log_x = !o.linear;
    plot.series.push_back({"backward", d.backward.x, d.backward.y, Series::Style::line});
    plot.series.push_back({"forward", d.forward.x, d.forward.y, Series::Style::line});
    write_svg(ctx.path(stem + ".svg"), plot);
    return kExitOk;
}

}  // namespace

void add_diffusion_commands(CLI::App& root, std::vector<Command>& out) {
    CLI::App* g = root.add_subcommand("diffusion", "Spectral-diffusion forward model");
    g->require_subcommand(1);
    auto p = std::make_shared<PredictOptions>();
    CLI::App* pr = g->add_subcommand("predict", "Backward and forward counts against diffusion time");
    pr->add_option("--d-coeff", p->d_coeff, "Diffusion coefficient (e.g. 3.22e4MHz^2/s)")->capture_default_str();
    pr->add_option("--gamma-i", p->gamma_i, "Inhomogeneous linewidth")->capture_default_str();
    pr->add_option("--gamma-h", p->gamma_h, "Homogeneous linewidth")->capture_default_str();
    pr->add_option("--c0", p->c0, "Peak counts")->capture_default_str();
    pr->add_option("--s-rate", p->s_rate, "Ionization strength (e.g. 600MHz/s)")->capture_default_str();
    pr->add_option("--rescale", p->rescale, "Forward-count rescale factor")->capture_default_str();
    pr->add_option("--power", p->power, "Diffusion-laser power recorded in the manifest")->capture_default_str();
    pr->add_option("--tau-range", p->tau_range, "Diffusion-time sweep (default: 2 t_min to 4 / theta)");
    pr->add_option("--points", p->points, "Points in an a:b sweep")->capture_default_str();
    pr->add_flag("--linear", p->linear, "Linear rather than logarithmic spacing");
    pr->add_option("--noise", p->noise, "Gaussian noise sd added to the counts")->capture_default_str();
    pr->add_option("--stderr", p->stderr_value, "Value for the stderr column (0 = noise, or 0.01)")
        ->capture_default_str();
    out.push_back({pr, [p](RunContext& ctx) { return run_predict(ctx, *p); }});
}

}  // namespace decolab::cli
