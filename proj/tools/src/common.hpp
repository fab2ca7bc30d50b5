#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "decolab/fit.hpp"
#include "decolab/noise_model.hpp"
#include "svg.hpp"
#include "units.hpp"

namespace decolab::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNonConvergence = 4;

// Everything a command needs besides its own options. Output files are
// registered through path() so the manifest lists them in creation order.
struct RunContext {
    std::string command;  // e.g. "simulate cpmg"
    std::string config_path;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::filesystem::path out_dir;
    Json resolved;  // fully resolved option values
    std::vector<std::string> outputs;

    std::string path(const std::string& file);
    std::string stem() const;  // command with '_' for ' '
    void write_manifest() const;
};

struct Command {
    CLI::App* app = nullptr;
    std::function<int(RunContext&)> run;
};

void add_simulate_commands(CLI::App& root, std::vector<Command>& out);
void add_bath_commands(CLI::App& root, std::vector<Command>& out);
void add_fit_commands(CLI::App& root, std::vector<Command>& out);
void add_growth_commands(CLI::App& root, std::vector<Command>& out);
void add_diffusion_commands(CLI::App& root, std::vector<Command>& out);

// "table1" selects the built-in mains model; anything else is a model file.
AcFieldModel resolve_model(const std::string& spec);

Json fit_json(const FitResult& fit);
void write_json(const std::string& path, const Json& j);
void write_text(const std::string& path, const std::string& text);

// Opens a file for writing in binary mode so line endings are LF everywhere.
std::ofstream open_output(const std::string& path);

}  // namespace decolab::cli
