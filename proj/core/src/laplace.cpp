#include "decolab/laplace.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "decolab/errors.hpp"

namespace decolab {

TalbotContour talbot_contour(double t, int nodes) {
    if (!(t > 0.0)) throw ValidityError("Laplace inversion needs t > 0");
    if (nodes < 2) throw ConfigError("Talbot inversion needs at least 2 nodes");
    TalbotContour c;
    c.t = t;
    c.r = 2.0 * nodes / (5.0 * t);
    c.nodes.resize(static_cast<std::size_t>(nodes));
    c.weights.resize(static_cast<std::size_t>(nodes));
    const double scale = c.r / nodes;
    c.nodes[0] = {c.r, 0.0};
    c.weights[0] = 0.5 * scale * std::exp(c.r * t);
    for (int k = 1; k < nodes; ++k) {
        const double th = k * std::numbers::pi / nodes;
        const double cot = std::cos(th) / std::sin(th);
        const std::complex<double> s(c.r * th * cot, c.r * th);
        const double sigma = th + (th * cot - 1.0) * cot;
        c.nodes[static_cast<std::size_t>(k)] = s;
        c.weights[static_cast<std::size_t>(k)] = scale * std::exp(t * s) * std::complex<double>(1.0, sigma);
    }
    return c;
}

double talbot_sum(const TalbotContour& contour, const std::vector<std::complex<double>>& values) {
    double f = 0.0;
    for (std::size_t k = 0; k < contour.nodes.size(); ++k) f += (contour.weights[k] * values[k]).real();
    return f;
}

double invert_laplace(const LaplaceTransform& transform, double t, int nodes, double min_time) {
    if (t < min_time)
        throw ValidityError("inverse Laplace transform requested at t = " + std::to_string(t) +
                            " s, below the truncation validity bound " + std::to_string(min_time) +
                            " s (requires t >> 1/(theta N_eigen))");
    const TalbotContour c = talbot_contour(t, nodes);
    std::vector<std::complex<double>> values(c.nodes.size());
    for (std::size_t k = 0; k < c.nodes.size(); ++k) values[k] = transform(c.nodes[k]);
    return talbot_sum(c, values);
}

}  // namespace decolab
