#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace decolab {

using LaplaceTransform = std::function<std::complex<double>(std::complex<double>)>;

// Fixed-Talbot contour (Abate and Valko 2004) with r = 2M / (5t):
//   s_k = r theta_k (cot theta_k + i),  theta_k = k pi / M,  k = 0..M-1.
struct TalbotContour {
    double t = 0.0;
    double r = 0.0;
    std::vector<std::complex<double>> nodes;
    // f(t) = sum_k Re(weights_k F(nodes_k)).
    std::vector<std::complex<double>> weights;
};

TalbotContour talbot_contour(double t, int nodes);

// Fixed-Talbot inversion. Throws ValidityError when t < min_time.
// In double precision the error is smallest near 24 nodes; larger counts
// lose accuracy to cancellation in exp(r t).
double invert_laplace(const LaplaceTransform& transform, double t, int nodes = 24, double min_time = 0.0);

// Same quadrature applied to precomputed transform values on the contour.
double talbot_sum(const TalbotContour& contour, const std::vector<std::complex<double>>& values);

}  // namespace decolab
