#include <cmath>
#include <iostream>
#include <memory>

#include "common.hpp"
#include "decolab/datasets.hpp"
#include "decolab/errors.hpp"
#include "decolab/growth.hpp"
#include "decolab/io.hpp"
#include "decolab/spectral_diffusion.hpp"

namespace decolab::cli {

namespace {

struct ColumnOptions {
    std::string data;
    std::string x, y, sigma;
};

void add_columns(CLI::App* sub, ColumnOptions& o, const char* x, const char* y, const char* sigma) {
    o.x = x;
    o.y = y;
    o.sigma = sigma ? sigma : "";
    sub->add_option("--data", o.data, "CSV file")->required();
    sub->add_option("--x", o.x, "Abscissa column")->capture_default_str();
    sub->add_option("--y", o.y, "Ordinate column")->capture_default_str();
    if (sigma) sub->add_option("--sigma", o.sigma, "Uncertainty column (optional in the file)")->capture_default_str();
}

Series dense_curve(const std::string& label, double lo, double hi, bool log_x, const std::function<double(double)>& f) {
    Series s{label, {}, {}, Series::Style::line};
    for (int i = 0; i <= 300; ++i) {
        const double x = log_x ? lo * std::pow(hi / lo, i / 300.0) : lo + (hi - lo) * i / 300.0;
        s.x.push_back(x);
        s.y.push_back(f(x));
    }
    return s;
}

int finish(RunContext& ctx, const Json& j, const Plot& plot, bool converged) {
    write_json(ctx.path(ctx.stem() + ".json"), j);
    write_svg(ctx.path(ctx.stem() + ".svg"), plot);
    if (!converged) {
        std::cerr << "fit did not converge; partial result written to " << ctx.stem() << ".json\n";
        return kExitNonConvergence;
    }
    return kExitOk;
}

struct DecayOptions {
    ColumnOptions cols;
    double fixed_n = 0.0;
    double n_max = 5.0;
    bool normalize = false;
};

int run_decay(RunContext& ctx, const DecayOptions& o) {
    DecayCurve c = load_decay_curve(o.cols.data, o.cols.x, o.cols.y, o.cols.sigma);
    StretchedExpOptions opts;
    opts.n_max = o.n_max;
    if (o.fixed_n > 0.0) opts.fixed_n = o.fixed_n;
    FitResult fit = fit_stretched_exp(c, opts);
    if (o.normalize && fit.converged) {
        c = rescale_by_amplitude(c, fit.param("A"));
        fit = fit_stretched_exp(c, opts);
    }
    Json j = fit_json(fit);
    j["model"] = "A exp(-(x/T2)^n)";
    j["points"] = c.x.size();
    Plot plot;
    plot.title = "stretched-exponential fit";
    plot.x_label = o.cols.x;
    plot.y_label = o.cols.y;
    plot.series.push_back({"data", c.x, c.y, Series::Style::points});
    if (fit.converged && !c.x.empty())
        plot.series.push_back(dense_curve("fit", 0.0, c.x.back(), false, [&](double x) {
            return stretched_exp(x, fit.param("A"), fit.param("T2"), fit.param("n"));
        }));
    return finish(ctx, j, plot, fit.converged);
}

struct ScalingOptions {
    ColumnOptions cols;
    bool direct = false;
};

int run_scaling(RunContext& ctx, const ScalingOptions& o) {
    const CsvTable t = read_csv_file(o.cols.data);
    const auto n = t.column_values(o.cols.x);
    const auto t2 = t.column_values(o.cols.y);
    const auto sigma = t.column(o.cols.sigma) >= 0 ? t.column_values(o.cols.sigma) : std::vector<double>{};
    const FitResult fit = o.direct ? fit_power_scaling_direct(n, t2, sigma) : fit_power_scaling(n, t2, sigma);
    if (fit.dof == 0) std::cerr << "warning: dof = 0, the power law interpolates the points exactly\n";
    Json j = fit_json(fit);
    j["model"] = "T2 = T0 N^eta";
    Plot plot;
    plot.title = "coherence-time scaling";
    plot.x_label = "number of pulses N";
    plot.y_label = "T2 (s)";
    plot.log_x = plot.log_y = true;
    plot.series.push_back({"data", n, t2, Series::Style::points});
    if (fit.converged && !n.empty()) {
        const auto [lo, hi] = std::minmax_element(n.begin(), n.end());
        if (*lo > 0.0)
            plot.series.push_back(dense_curve("fit", *lo, *hi, true, [&](double x) {
                return fit.param("T0") * std::pow(x, fit.param("eta"));
            }));
    }
    return finish(ctx, j, plot, fit.converged);
}

struct DiffusionFitOptions {
    std::string manifest;
    std::string gamma_h;
    double gamma_i_guess = 150.0;
    double rescale = 0.96;
};

double resolve_gamma_h(const DiffusionFitOptions& o, const DiffusionManifest& m) {
    if (!o.gamma_h.empty()) return parse_quantity(o.gamma_h, Dimension::frequency, "--gamma-h") / 1e6;
    if (m.gamma_h) return *m.gamma_h;
    throw ConfigError("--gamma-h is required when the manifest does not set gamma_h_MHz");
}

Json diffusion_json(const DiffusionFit& fit) {
    Json j;
    j["gamma_i_MHz"] = {{"value", fit.gamma_i}, {"stderr", fit.gamma_i_stderr}};
    j["gamma_h_MHz"] = fit.gamma_h;
    Json per = Json::array();
    for (const auto& p : fit.per_power)
        per.push_back({{"power_nW", p.power_nw},
                       {"D_MHz2_per_s", {{"value", p.d_coeff}, {"stderr", p.d_stderr}}},
                       {"C0", {{"value", p.c0}, {"stderr", p.c0_stderr}}},
                       {"tau_c_s", tau_c(p.d_coeff, fit.gamma_h)}});
    j["per_power"] = per;
    j["raw"] = fit_json(fit.raw);
    return j;
}

int run_diffusion_fit(RunContext& ctx, const DiffusionFitOptions& o) {
    const auto m = load_diffusion_manifest(o.manifest);
    const double gh = resolve_gamma_h(o, m);
    JointFitOptions jo;
    jo.gamma_i_guess = o.gamma_i_guess;
    const DiffusionFit fit = joint_fit_backward(m.datasets, gh, jo);
    Json j = diffusion_json(fit);
    if (fit.per_power.size() >= 2) {
        std::vector<double> p, tc;
        for (const auto& pp : fit.per_power) {
            p.push_back(pp.power_nw);
            tc.push_back(tau_c(pp.d_coeff, gh));
        }
        j["tau_c_power_law"] = fit_json(fit_power_scaling(p, tc));
    }
    Plot plot;
    plot.title = "backward check-probe counts, joint fit";
    plot.x_label = "diffusion time (s)";
    plot.y_label = "counts";
    plot.log_x = true;
    for (std::size_t i = 0; i < m.datasets.size(); ++i) {
        const auto& d = m.datasets[i];
        const std::string tag = format_double(d.power_nw) + " nW";
        plot.series.push_back({tag, d.backward.x, d.backward.y, Series::Style::points});
        if (fit.raw.converged && !d.backward.x.empty()) {
            const auto& pp = fit.per_power[i];
            const OuDiffusionModel model{pp.d_coeff, fit.gamma_i, 0.0};
            const HomogeneousLine line{pp.c0, gh};
            plot.series.push_back(dense_curve(tag + " fit", d.backward.x.front(), d.backward.x.back(), true,
                                              [&](double t) { return counts_no_ionization(model, line, t, 0.0); }));
        }
    }
    return finish(ctx, j, plot, fit.raw.converged);
}

int run_ionization_fit(RunContext& ctx, const DiffusionFitOptions& o) {
    const auto m = load_diffusion_manifest(o.manifest);
    const double gh = resolve_gamma_h(o, m);
    JointFitOptions jo;
    jo.gamma_i_guess = o.gamma_i_guess;
    const DiffusionFit back = joint_fit_backward(m.datasets, gh, jo);
    if (!back.raw.converged) throw NonConvergence("backward joint fit: " + back.raw.message);
    Json j;
    j["backward"] = diffusion_json(back);
    Json per = Json::array();
    bool all = true;
    Plot plot;
    plot.title = "forward counts, ionization-rate fit";
    plot.x_label = "diffusion time (s)";
    plot.y_label = "counts";
    plot.log_x = true;
    for (std::size_t i = 0; i < m.datasets.size(); ++i) {
        const auto& d = m.datasets[i];
        const auto& pp = back.per_power[i];
        const OuDiffusionModel model{pp.d_coeff, back.gamma_i, 0.0};
        const HomogeneousLine line{pp.c0, gh};
        const FitResult f = fit_ionization_rate(d.forward, model, line, o.rescale);
        all = all && f.converged;
        per.push_back({{"power_nW", d.power_nw}, {"fit", fit_json(f)}});
        const std::string tag = format_double(d.power_nw) + " nW";
        plot.series.push_back({tag, d.forward.x, d.forward.y, Series::Style::points});
        if (f.converged) {
            const SinkSolver solver(model, IonizationSink{f.param("S"), 0.0, o.rescale}, SolverSettings{}, 0.0);
            std::vector<double> xs;
            for (int k = 0; k <= 60; ++k)
                xs.push_back(d.forward.x.front() * std::pow(d.forward.x.back() / d.forward.x.front(), k / 60.0));
            const auto kernels = solver.counts_kernels(line, xs, 0.0);
            Series s{tag + " fit", xs, {}, Series::Style::line};
            for (const auto& k : kernels) s.y.push_back(o.rescale * SinkSolver::counts_from_kernel(k, f.param("S")));
            plot.series.push_back(s);
        }
    }
    j["S_units"] = "MHz/s";
    j["per_power"] = per;
    return finish(ctx, j, plot, all);
}

struct ArrheniusOptions {
    ColumnOptions cols;
    double volume = 11.3e-3;
};

int run_arrhenius(RunContext& ctx, const ArrheniusOptions& o) {
    const CsvTable t = read_csv_file(o.cols.data);
    const auto temps = t.column_values(o.cols.x);
    const auto rate = t.column_values(o.cols.y);
    const ArrheniusFit fit = fit_arrhenius(temps, rate, o.volume);
    Json j = fit_json(fit.fit);
    j["model"] = "V dp/dt = q_leak + q0 exp(-E_a / k_B T)";
    j["volume_m3"] = o.volume;
    Plot plot;
    plot.title = "pressure rise against temperature";
    plot.x_label = "temperature (K)";
    plot.y_label = "dp/dt (Pa/s)";
    plot.series.push_back({"data", temps, rate, Series::Style::points});
    if (fit.fit.converged && !temps.empty()) {
        const auto [lo, hi] = std::minmax_element(temps.begin(), temps.end());
        plot.series.push_back(dense_curve("fit", *lo, *hi, false,
                                          [&](double x) { return leak_throughput(fit.model, x) / o.volume; }));
    }
    return finish(ctx, j, plot, fit.fit.converged);
}

}  // namespace

void add_fit_commands(CLI::App& root, std::vector<Command>& out) {
    CLI::App* fit = root.add_subcommand("fit", "Fit measured or simulated data");
    fit->require_subcommand(1);

    auto d = std::make_shared<DecayOptions>();
    CLI::App* decay = fit->add_subcommand("decay", "Stretched-exponential fit A exp(-(x/T2)^n)");
    add_columns(decay, d->cols, "x", "y", "sigma");
    decay->add_option("--fixed-n", d->fixed_n, "Hold n at this value (0 = free)")->capture_default_str();
    decay->add_option("--n-max", d->n_max, "Upper bound on n")->capture_default_str();
    decay->add_flag("--normalize", d->normalize, "Rescale the data by the fitted amplitude and refit");
    out.push_back({decay, [d](RunContext& c) { return run_decay(c, *d); }});

    auto s = std::make_shared<ScalingOptions>();
    CLI::App* scaling = fit->add_subcommand("scaling", "Power law T2 = T0 N^eta");
    add_columns(scaling, s->cols, "n_pulses", "t2_s", "sigma_s");
    scaling->add_flag("--direct", s->direct, "Fit in linear space instead of log-log");
    out.push_back({scaling, [s](RunContext& c) { return run_scaling(c, *s); }});

    auto df = std::make_shared<DiffusionFitOptions>();
    CLI::App* diff = fit->add_subcommand("diffusion", "Joint backward fit: shared gamma_i, per-power D and C0");
    diff->add_option("--manifest", df->manifest, "Diffusion manifest file")->required();
    diff->add_option("--gamma-h", df->gamma_h, "Homogeneous linewidth (default: manifest)");
    diff->add_option("--gamma-i-guess", df->gamma_i_guess, "Starting gamma_i in MHz")->capture_default_str();
    out.push_back({diff, [df](RunContext& c) { return run_diffusion_fit(c, *df); }});

    auto io = std::make_shared<DiffusionFitOptions>();
    CLI::App* ion = fit->add_subcommand("ionization", "Per-power ionization rate from forward counts");
    ion->add_option("--manifest", io->manifest, "Diffusion manifest file")->required();
    ion->add_option("--gamma-h", io->gamma_h, "Homogeneous linewidth (default: manifest)");
    ion->add_option("--gamma-i-guess", io->gamma_i_guess, "Starting gamma_i in MHz")->capture_default_str();
    ion->add_option("--rescale", io->rescale, "Forward-count rescale factor")->capture_default_str();
    out.push_back({ion, [io](RunContext& c) { return run_ionization_fit(c, *io); }});

    auto a = std::make_shared<ArrheniusOptions>();
    CLI::App* arr = fit->add_subcommand("arrhenius", "Leak plus thermally activated outgassing");
    add_columns(arr, a->cols, "temperature_K", "dpdt_Pa_per_s", nullptr);
    arr->add_option("--volume", a->volume, "Chamber volume in m^3")->capture_default_str();
    out.push_back({arr, [a](RunContext& c) { return run_arrhenius(c, *a); }});
}

}  // namespace decolab::cli
