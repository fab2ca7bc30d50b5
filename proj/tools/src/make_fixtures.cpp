// Writes the bundled synthetic fixtures from the library's forward models.
// Usage: decolab_make_fixtures <output-dir>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "decolab/datasets.hpp"
#include "decolab/fit.hpp"
#include "decolab/growth.hpp"
#include "decolab/io.hpp"
#include "decolab/spectral_diffusion.hpp"

using namespace decolab;

namespace {

std::ofstream open(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

void decay(const std::filesystem::path& dir) {
    const double a = 0.93, t2 = 11.2, n = 1.7;
    DecayCurve c;
    for (int i = 1; i <= 24; ++i) {
        c.x.push_back(1.25 * i);
        c.y.push_back(stretched_exp(c.x.back(), a, t2, n));
        c.sigma.push_back(0.01);
    }
    auto out = open(dir / "decay_synthetic.csv");
    write_decay_curve(out, c);
    open(dir / "decay_synthetic.meta") << "# generating parameters of decay_synthetic.csv (noiseless)\n"
                                       << "A = " << format_double(a) << "\nT2_s = " << format_double(t2)
                                       << "\nn = " << format_double(n) << "\nnoise_sigma = 0\n";
}

void scaling(const std::filesystem::path& dir) {
    auto out = open(dir / "scaling_synthetic.csv");
    CsvWriter w(out, {"n_pulses", "t2_s", "sigma_s"});
    for (int k = 0; k <= 11; ++k) {
        const double n = std::pow(2.0, k);
        const double t2 = 16e-3 * std::pow(n, 0.67);
        w << n << t2 << 0.01 * t2;
        w.end_row();
    }
}

void diffusion(const std::filesystem::path& dir) {
    const double gamma_h = 22.0, gamma_i = 117.0;
    std::string manifest = "# synthetic ladder: D = 3.22e4 (P / 15 nW)^1.05 MHz^2/s, gamma_i = 117 MHz, C0 = 1\n"
                           "gamma_h_MHz = 22\n";
    for (auto [p, s] : {std::pair{5.0, 100.0}, std::pair{15.0, 400.0}, std::pair{40.0, 1200.0}}) {
        const OuDiffusionModel m{3.22e4 * std::pow(p / 15.0, 1.05), gamma_i, 0.0};
        const HomogeneousLine line{1.0, gamma_h};
        const SinkSolver solver(m, IonizationSink{s, 0.0, 0.96}, SolverSettings{}, 0.0);
        DiffusionDataset d;
        d.power_nw = p;
        std::vector<double> taus;
        const double lo = 2.0 * solver.min_time(), hi = 4.0 / m.theta();
        for (int i = 0; i < 16; ++i) taus.push_back(lo * std::pow(hi / lo, i / 15.0));
        const auto kernels = solver.counts_kernels(line, taus, 0.0);
        for (std::size_t i = 0; i < taus.size(); ++i) {
            d.backward.x.push_back(taus[i]);
            d.backward.y.push_back(counts_no_ionization(m, line, taus[i], 0.0));
            d.backward.sigma.push_back(0.01);
            d.forward.x.push_back(taus[i]);
            d.forward.y.push_back(0.96 * SinkSolver::counts_from_kernel(kernels[i], s));
        }
        const std::string file = "diffusion_" + format_double(p) + "nW.csv";
        auto out = open(dir / file);
        write_diffusion_dataset(out, d);
        manifest += "\n[dataset]\n# S = " + format_double(s) + " MHz/s\npower_nW = " + format_double(p) +
                    "\nfile = " + file + "\n";
    }
    open(dir / "diffusion_manifest.txt") << manifest;
}

void arrhenius(const std::filesystem::path& dir) {
    const double ev = 1.602176634e-19;
    const LeakModel truth{1.5e-8, 1e-3, 0.5 * ev, 11.3e-3};
    auto out = open(dir / "arrhenius_synthetic.csv");
    CsvWriter w(out, {"temperature_K", "dpdt_Pa_per_s"});
    for (double t = 300.0; t <= 850.0; t += 50.0) {
        w << t << leak_throughput(truth, t) / truth.volume;
        w.end_row();
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: decolab_make_fixtures <output-dir>\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    decay(dir);
    scaling(dir);
    diffusion(dir);
    arrhenius(dir);
    return 0;
}
