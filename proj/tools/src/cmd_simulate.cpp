#include <cmath>
#include <limits>
#include <memory>

#include "common.hpp"
#include "decolab/errors.hpp"
#include "decolab/feedforward.hpp"
#include "decolab/io.hpp"
#include "decolab/pulse_sequences.hpp"

namespace decolab::cli {

namespace {

struct SequenceOptions {
    std::string model = "table1";
    std::string tau_range = "0:5ms";
    int points = 101;  // 0:5ms in 50 us steps
    int n_pulses = 8;
    std::string mode = "unsync";
    std::string t0 = "0";
    int nodes = 0;
    std::string window = "20ms";
    std::string drift_min = "1";
    std::string drift_max = "1";
    int drift_nodes = 15;
};

void add_sweep(CLI::App* sub, SequenceOptions& o, const char* range_help) {
    sub->add_option("--model", o.model, "Noise model: 'table1' or a model file")->capture_default_str();
    sub->add_option("--tau-range", o.tau_range, range_help)->capture_default_str();
    sub->add_option("--points", o.points, "Points in an a:b sweep")->capture_default_str();
    sub->add_option("--mode", o.mode, "unsync (average over t0) or sync (fixed t0)")
        ->check(CLI::IsMember({"unsync", "sync"}))
        ->capture_default_str();
    sub->add_option("--t0", o.t0, "Sequence start within the mains cycle (sync mode)")->capture_default_str();
    sub->add_option("--nodes", o.nodes, "t0 nodes for the unsync average (0 = automatic)")->capture_default_str();
    sub->add_option("--window", o.window, "t0 averaging window")->capture_default_str();
}

int run_sequence(RunContext& ctx, const SequenceOptions& o, SequenceKind kind) {
    const AcFieldModel model = resolve_model(o.model);
    const auto taus = positive_only(parse_range(o.tau_range, Dimension::time, o.points, false, "--tau-range"));
    const bool sync = o.mode == "sync";
    const double t0 = parse_quantity(o.t0, Dimension::time, "--t0");
    const double window = parse_quantity(o.window, Dimension::time, "--window");
    const double a_min = parse_quantity(o.drift_min, Dimension::none, "--drift-min");
    const double a_max = parse_quantity(o.drift_max, Dimension::none, "--drift-max");
    if (kind == SequenceKind::CPMG && o.n_pulses < 1) throw ConfigError("--n must be >= 1");

    auto make = [&](double tau) {
        switch (kind) {
            case SequenceKind::Ramsey: return PulseSequence::ramsey(tau);
            case SequenceKind::Hahn: return PulseSequence::hahn(tau);
            case SequenceKind::CPMG: return PulseSequence::cpmg(o.n_pulses, tau);
        }
        return PulseSequence{};
    };
    std::vector<double> expectation(taus.size()), phases(taus.size());
    if (kind == SequenceKind::Ramsey && !sync && (a_min != 1.0 || a_max != 1.0)) {
        expectation = ramsey_envelope(model, a_min, a_max, taus, o.nodes, o.drift_nodes, ctx.threads);
    } else {
        for (std::size_t i = 0; i < taus.size(); ++i) {
            const auto seq = make(taus[i]);
            if (sync) {
                const auto r = synchronized_response(model, seq, t0);
                expectation[i] = r.expectation_x;
                phases[i] = r.phase;
            } else {
                expectation[i] = expectation_unsynchronized(model, seq, o.nodes, window);
            }
        }
    }

    const std::string stem = ctx.stem();
    {
        auto out = open_output(ctx.path(stem + ".csv"));
        std::vector<std::string> header{"tau_s", "total_time_s", "expectation_x"};
        if (sync) header.push_back("phase_rad");
        CsvWriter w(out, header);
        for (std::size_t i = 0; i < taus.size(); ++i) {
            w << taus[i] << make(taus[i]).total_time() << expectation[i];
            if (sync) w << phases[i];
            w.end_row();
        }
    }
    Plot plot;
    plot.title = ctx.command + (sync ? " (fixed t0)" : " (t0-averaged)");
    plot.x_label = kind == SequenceKind::Ramsey ? "free evolution time (s)" : "tau (s)";
    plot.y_label = "<X>";
    plot.series.push_back({"<X>", taus, expectation, Series::Style::line});
    write_svg(ctx.path(stem + ".svg"), plot);
    return kExitOk;
}

struct FeedforwardCliOptions {
    std::string model = "table1";
    std::string tau_range = "0:6ms";
    int points = 61;
    int shots = 50;
    double fidelity = 0.925;
    int repetitions = 12;
    std::string drift_min = "0.85";
    std::string drift_max = "1.27";
    std::string drift_time = "3s";
    std::string drift_sd = "-1";
    bool noiseless = false;
    bool single_estimate = false;
    std::string t0 = "0";
};

int run_feedforward_cmd(RunContext& ctx, const FeedforwardCliOptions& o) {
    const AcFieldModel model = resolve_model(o.model);
    const auto taus = positive_only(parse_range(o.tau_range, Dimension::time, o.points, false, "--tau-range"));
    ShotConfig shots;
    shots.n_shots = o.shots;
    shots.readout_fidelity_0 = shots.readout_fidelity_1 = o.fidelity;
    shots.noiseless = o.noiseless;
    AmplitudeScaleProcess drift;
    drift.a_min = parse_quantity(o.drift_min, Dimension::none, "--drift-min");
    drift.a_max = parse_quantity(o.drift_max, Dimension::none, "--drift-max");
    drift.correlation_time = parse_quantity(o.drift_time, Dimension::time, "--drift-time");
    drift.sigma = parse_quantity(o.drift_sd, Dimension::none, "--drift-sd");
    FeedforwardOptions opts;
    opts.repetitions = o.repetitions;
    opts.reestimate_per_repetition = !o.single_estimate;
    opts.t0 = parse_quantity(o.t0, Dimension::time, "--t0");
    opts.seed = ctx.seed;
    opts.threads = ctx.threads;
    const auto outcomes = taus.empty() ? std::vector<FeedforwardOutcome>{}
                                       : run_feedforward(model, taus, shots, drift, opts);

    const std::string stem = ctx.stem();
    DecayCurve c;
    {
        auto out = open_output(ctx.path(stem + ".csv"));
        CsvWriter w(out, {"tau_s", "total_time_s", "phi_estimate_rad", "c_expectation", "x_raw", "y_raw",
                          "stream_seed"});
        for (const auto& r : outcomes) {
            w << r.tau << 2.0 * r.tau << r.phi_estimate << r.c_expectation << r.x_raw << r.y_raw
              << std::to_string(r.seed);
            w.end_row();
            c.x.push_back(2.0 * r.tau);
            c.y.push_back(r.c_expectation);
        }
    }
    Json summary;
    summary["points"] = outcomes.size();
    Plot plot;
    plot.title = "feedforward-corrected echo";
    plot.x_label = "total echo time 2 tau (s)";
    plot.y_label = "<C>";
    plot.series.push_back({"<C>", c.x, c.y, Series::Style::points});
    if (c.x.size() >= 4) {
        const FitResult fit = fit_stretched_exp(c);
        summary["stretched_exp_fit"] = fit_json(fit);
        if (fit.converged) {
            summary["one_over_e_time_s"] = fit.param("T2");
            Series curve{"stretched-exp fit", {}, {}, Series::Style::line};
            for (int i = 0; i <= 200; ++i) {
                const double x = c.x.back() * i / 200.0;
                curve.x.push_back(x);
                curve.y.push_back(stretched_exp(x, fit.param("A"), fit.param("T2"), fit.param("n")));
            }
            plot.series.push_back(curve);
        }
    }
    write_json(ctx.path(stem + ".json"), summary);
    write_svg(ctx.path(stem + ".svg"), plot);
    return kExitOk;
}

}  // namespace

void add_simulate_commands(CLI::App& root, std::vector<Command>& out) {
    CLI::App* sim = root.add_subcommand("simulate", "Coherence under the mains noise model");
    sim->require_subcommand(1);

    auto ramsey_opts = std::make_shared<SequenceOptions>();
    ramsey_opts->tau_range = "0:100us";
    CLI::App* ramsey = sim->add_subcommand("ramsey", "Ramsey free evolution");
    add_sweep(ramsey, *ramsey_opts, "Free-evolution time sweep a:b or a:b:step (e.g. 0:100us)");
    ramsey->add_option("--drift-min", ramsey_opts->drift_min, "Lower amplitude scale for the drift envelope")
        ->capture_default_str();
    ramsey->add_option("--drift-max", ramsey_opts->drift_max, "Upper amplitude scale for the drift envelope")
        ->capture_default_str();
    ramsey->add_option("--drift-nodes", ramsey_opts->drift_nodes, "Amplitude nodes for the drift envelope")
        ->capture_default_str();
    out.push_back({ramsey, [ramsey_opts](RunContext& c) { return run_sequence(c, *ramsey_opts, SequenceKind::Ramsey); }});

    auto hahn_opts = std::make_shared<SequenceOptions>();
    CLI::App* hahn = sim->add_subcommand("hahn", "Hahn echo, total time 2 tau");
    add_sweep(hahn, *hahn_opts, "Half-echo delay sweep a:b or a:b:step (e.g. 0:5ms)");
    out.push_back({hahn, [hahn_opts](RunContext& c) { return run_sequence(c, *hahn_opts, SequenceKind::Hahn); }});

    auto cpmg_opts = std::make_shared<SequenceOptions>();
    CLI::App* cpmg = sim->add_subcommand("cpmg", "CPMG-N, total time 2 N tau");
    add_sweep(cpmg, *cpmg_opts, "Pulse-spacing half-delay sweep a:b or a:b:step (e.g. 0:5ms:1us)");
    cpmg->add_option("--n", cpmg_opts->n_pulses, "Number of pi pulses")->capture_default_str();
    out.push_back({cpmg, [cpmg_opts](RunContext& c) { return run_sequence(c, *cpmg_opts, SequenceKind::CPMG); }});

    auto ff = std::make_shared<FeedforwardCliOptions>();
    CLI::App* f = sim->add_subcommand("feedforward", "Shot-level feedforward-corrected Hahn echo");
    f->add_option("--model", ff->model, "Noise model: 'table1' or a model file")->capture_default_str();
    f->add_option("--tau-range", ff->tau_range, "Half-echo delay sweep")->capture_default_str();
    f->add_option("--points", ff->points, "Points in an a:b sweep")->capture_default_str();
    f->add_option("--shots", ff->shots, "Shots per readout axis")->capture_default_str();
    f->add_option("--fidelity", ff->fidelity, "Readout fidelity for both outcomes")->capture_default_str();
    f->add_option("--reps", ff->repetitions, "Repetitions averaged into each point")->capture_default_str();
    f->add_option("--drift-min", ff->drift_min, "Lower bound of the amplitude drift")->capture_default_str();
    f->add_option("--drift-max", ff->drift_max, "Upper bound of the amplitude drift")->capture_default_str();
    f->add_option("--drift-time", ff->drift_time, "Drift correlation time ('inf' freezes it)")->capture_default_str();
    f->add_option("--drift-sd", ff->drift_sd, "Latent drift standard deviation (-1 = default)")->capture_default_str();
    f->add_flag("--noiseless", ff->noiseless, "Use exact expectations instead of sampled shots");
    f->add_flag("--single-estimate", ff->single_estimate, "Estimate the phase once per point, not per repetition");
    f->add_option("--t0", ff->t0, "Start of the first shot within the mains cycle")->capture_default_str();
    out.push_back({f, [ff](RunContext& c) { return run_feedforward_cmd(c, *ff); }});
}

}  // namespace decolab::cli
