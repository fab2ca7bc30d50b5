#include "common.hpp"

#include <cmath>
#include <fstream>

#include "decolab/errors.hpp"

#ifndef DECOLAB_VERSION
#define DECOLAB_VERSION "unknown"
#endif

namespace decolab::cli {

std::string RunContext::path(const std::string& file) {
    outputs.push_back(file);
    return (out_dir / file).string();
}

std::string RunContext::stem() const {
    std::string s = command;
    for (char& c : s)
        if (c == ' ') c = '_';
    return s;
}

void RunContext::write_manifest() const {
    Json j;
    j["command"] = command;
    j["config_path"] = config_path;
    j["seed"] = seed;
    j["output_dir"] = out_dir.string();
    j["version"] = DECOLAB_VERSION;
    j["config"] = resolved;
    j["outputs"] = outputs;
    write_json((out_dir / "manifest.json").string(), j);
}

AcFieldModel resolve_model(const std::string& spec) {
    if (spec == "table1") return table1_model();
    return load_field_model(spec);
}

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json fit_json(const FitResult& fit) {
    Json j;
    Json params = Json::object();
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        params[fit.names[i]] = {{"value", number(fit.params[k])}, {"stderr", number(fit.stderr[k])}};
    }
    j["parameters"] = params;
    j["chi2"] = number(fit.chi2);
    j["reduced_chi2"] = number(fit.reduced_chi2);
    j["dof"] = fit.dof;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["message"] = fit.message;
    return j;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    return out;
}

void write_json(const std::string& path, const Json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
}

}  // namespace decolab::cli
