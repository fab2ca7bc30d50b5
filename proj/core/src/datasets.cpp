#include "decolab/datasets.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "decolab/errors.hpp"

namespace decolab {

DecayCurve decay_curve_from_table(const CsvTable& table, const std::string& x_col, const std::string& y_col,
                                  const std::string& sigma_col) {
    DecayCurve c;
    c.x = table.column_values(x_col);
    c.y = table.column_values(y_col);
    if (table.column(sigma_col) >= 0) c.sigma = table.column_values(sigma_col);
    c.validate();
    return c;
}

DecayCurve load_decay_curve(const std::string& path, const std::string& x_col, const std::string& y_col,
                            const std::string& sigma_col) {
    return decay_curve_from_table(read_csv_file(path), x_col, y_col, sigma_col);
}

void write_decay_curve(std::ostream& out, const DecayCurve& curve) {
    curve.validate();
    std::vector<std::string> header{"x", "y"};
    if (curve.weighted()) header.push_back("sigma");
    CsvWriter w(out, header);
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        w << curve.x[i] << curve.y[i];
        if (curve.weighted()) w << curve.sigma[i];
        w.end_row();
    }
}

DiffusionDataset diffusion_dataset_from_table(const CsvTable& table, double power_nw) {
    if (!(power_nw > 0.0)) throw ConfigError("diffusion power must be > 0 nW");
    const auto tau = table.column_values("tau_d_s");
    const auto fwd = table.column_values("counts_forward");
    const auto bwd = table.column_values("counts_backward");
    const auto err = table.column_values("stderr");
    DiffusionDataset d;
    d.power_nw = power_nw;
    d.backward = {tau, bwd, err};
    d.forward = {tau, fwd, err};
    d.backward.validate();
    d.forward.validate();
    return d;
}

void write_diffusion_dataset(std::ostream& out, const DiffusionDataset& d) {
    const std::size_t n = d.backward.x.size();
    if (d.forward.x.size() != n || d.backward.sigma.size() != n)
        throw DataError("diffusion dataset needs forward, backward and stderr on one tau grid");
    CsvWriter w(out, {"tau_d_s", "counts_forward", "counts_backward", "stderr"});
    for (std::size_t i = 0; i < n; ++i) {
        w << d.backward.x[i] << d.forward.y[i] << d.backward.y[i] << d.backward.sigma[i];
        w.end_row();
    }
}

DiffusionManifest load_diffusion_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    const auto sections = parse_kv(in, path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    DiffusionManifest m;
    for (const auto& e : sections.front().entries) {
        if (e.key == "gamma_h_MHz")
            m.gamma_h = kv_number(e, path);
        else
            throw ConfigError(path + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
    }
    for (std::size_t i = 1; i < sections.size(); ++i) {
        const auto& s = sections[i];
        if (s.name != "dataset")
            throw ConfigError(path + ":" + std::to_string(s.line) + ": unknown section '" + s.name + "'");
        std::optional<double> power;
        std::string file;
        for (const auto& e : s.entries) {
            if (e.key == "power_nW")
                power = kv_number(e, path);
            else if (e.key == "file")
                file = e.value;
            else
                throw ConfigError(path + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
        }
        if (!power || file.empty())
            throw ConfigError(path + ":" + std::to_string(s.line) + ": [dataset] needs power_nW and file");
        m.datasets.push_back(diffusion_dataset_from_table(read_csv_file((base / file).string()), *power));
    }
    if (m.datasets.empty()) throw DataError(path + ": manifest lists no datasets");
    std::sort(m.datasets.begin(), m.datasets.end(),
              [](const auto& a, const auto& b) { return a.power_nw < b.power_nw; });
    return m;
}

}  // namespace decolab
