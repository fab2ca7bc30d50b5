#include <cstdio>
#include <fstream>
#include <iostream>

#include "common.hpp"
#include "decolab/errors.hpp"
#include "decolab/io.hpp"

using namespace decolab;
using namespace decolab::cli;

namespace {

std::string option_key(const CLI::Option* opt) { return opt->get_lnames().empty() ? "" : opt->get_lnames().front(); }

bool configurable(const CLI::Option* opt) {
    const std::string k = option_key(opt);
    return !k.empty() && k != "help" && k != "config" && k != "print-config";
}

std::string option_value(const CLI::Option* opt) {
    const bool flag = opt->get_expected_max() == 0;
    if (opt->count() == 0) return flag ? "false" : opt->get_default_str();
    std::string out;
    for (const auto& r : opt->results()) out += (out.empty() ? "" : " ") + r;
    if (out.empty() && flag) out = "true";
    return out;
}

// Config values fill options the command line left unset; the command line
// always wins.
void apply_config(const std::string& path, CLI::App& root, CLI::App& leaf, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    const auto sections = parse_kv(in, path);
    for (const auto& sec : sections) {
        if (!sec.name.empty() && sec.name != command) {
            const bool known_command = sec.name.find(' ') != std::string::npos;
            if (known_command) continue;  // settings for another command
            throw ConfigError(path + ":" + std::to_string(sec.line) + ": unknown section '" + sec.name +
                              "' (sections name a command, e.g. [simulate cpmg])");
        }
        for (const auto& e : sec.entries) {
            CLI::Option* opt = leaf.get_option_no_throw("--" + e.key);
            if (!opt) opt = root.get_option_no_throw("--" + e.key);
            if (!opt || !configurable(opt))
                throw ConfigError(path + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "' for '" +
                                  command + "'");
            if (opt->count() > 0) continue;
            try {
                opt->add_result(e.value);
                opt->run_callback();
            } catch (const CLI::Error& err) {
                throw ConfigError(path + ":" + std::to_string(e.line) + ": key '" + e.key + "': " + err.what());
            }
        }
    }
}

Json resolve_options(const CLI::App& root, const CLI::App& leaf, std::string& text, const std::string& command) {
    Json j;
    text = "# resolved configuration for '" + command + "'\n";
    for (const CLI::App* app : {&root, &leaf}) {
        if (app == &leaf) text += "\n[" + command + "]\n";
        for (const CLI::Option* opt : app->get_options()) {
            if (!configurable(opt)) continue;
            const std::string v = option_value(opt);
            j[option_key(opt)] = v;
            if (!v.empty()) text += option_key(opt) + " = " + v + "\n";
        }
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decolab: noise-limited coherence, spin-bath and spectral-diffusion analysis"};
    app.require_subcommand(1);
    std::uint64_t seed = 1;
    std::string out_dir = "decolab-out";
    std::string config;
    unsigned threads = 1;
    bool print_config = false;
    app.add_option("--seed", seed, "Master random seed")->capture_default_str();
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--config", config, "Key-value config file; command-line flags take precedence");
    app.add_flag("--print-config", print_config, "Print the fully resolved configuration and exit");

    std::vector<Command> commands;
    add_simulate_commands(app, commands);
    add_bath_commands(app, commands);
    add_fit_commands(app, commands);
    add_growth_commands(app, commands);
    add_diffusion_commands(app, commands);
    // Global options may appear before or after the command words. Required
    // options are enforced after the config file is applied, since either
    // source may supply them.
    std::vector<std::pair<const CLI::App*, const CLI::Option*>> deferred_required;
    for (CLI::App* group : app.get_subcommands({})) {
        group->fallthrough();
        for (CLI::App* leaf : group->get_subcommands({})) {
            leaf->fallthrough();
            for (CLI::Option* opt : leaf->get_options()) {
                if (!opt->get_required()) continue;
                opt->required(false);
                opt->description(opt->get_description() + " (required)");
                deferred_required.emplace_back(leaf, opt);
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const Command* chosen = nullptr;
    for (const auto& c : commands)
        if (c.app->parsed()) chosen = &c;
    if (!chosen) {
        std::cerr << "error: choose a command; see --help\n";
        return kExitConfig;
    }
    RunContext ctx;
    ctx.command = chosen->app->get_parent()->get_name() + " " + chosen->app->get_name();
    try {
        if (!config.empty()) apply_config(config, app, *chosen->app, ctx.command);
        for (const auto& [leaf, opt] : deferred_required)
            if (leaf == chosen->app && opt->count() == 0)
                throw ConfigError(opt->get_name() + " is required (on the command line or in the config file)");
        std::string text;
        ctx.resolved = resolve_options(app, *chosen->app, text, ctx.command);
        if (print_config) {
            std::cout << text;
            return kExitOk;
        }
        ctx.config_path = config;
        ctx.seed = seed;
        ctx.threads = threads;
        ctx.out_dir = out_dir;
        std::filesystem::create_directories(ctx.out_dir);
        const int rc = chosen->run(ctx);
        ctx.write_manifest();
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ValidityError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NonConvergence& e) {
        std::cerr << "fit did not converge: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
