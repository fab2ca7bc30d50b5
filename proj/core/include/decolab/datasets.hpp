#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "decolab/fit.hpp"
#include "decolab/io.hpp"
#include "decolab/spectral_diffusion.hpp"

namespace decolab {

// Columns x, y and optional sigma. An absent sigma column gives an
// unweighted curve.
DecayCurve decay_curve_from_table(const CsvTable& table, const std::string& x_col = "x",
                                  const std::string& y_col = "y", const std::string& sigma_col = "sigma");
DecayCurve load_decay_curve(const std::string& path, const std::string& x_col = "x",
                            const std::string& y_col = "y", const std::string& sigma_col = "sigma");
void write_decay_curve(std::ostream& out, const DecayCurve& curve);

// One diffusion power per file with columns tau_d_s, counts_forward,
// counts_backward, stderr. stderr weights both directions.
DiffusionDataset diffusion_dataset_from_table(const CsvTable& table, double power_nw);
void write_diffusion_dataset(std::ostream& out, const DiffusionDataset& d);

// Key-value manifest: optional top-level gamma_h_MHz, then one [dataset]
// section per power with power_nW and file (relative to the manifest).
struct DiffusionManifest {
    std::optional<double> gamma_h;
    std::vector<DiffusionDataset> datasets;  // sorted by power
};
DiffusionManifest load_diffusion_manifest(const std::string& path);

}  // namespace decolab
