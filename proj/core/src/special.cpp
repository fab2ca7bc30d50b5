#include "decolab/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace decolab {

namespace {

constexpr int kTerms = 32;

struct WeidemanTable {
    double L;
    std::array<double, kTerms> a;  // highest power first

    WeidemanTable() {
        const int m = 2 * kTerms;
        const int m2 = 2 * m;
        L = std::sqrt(kTerms / std::sqrt(2.0));
        // f(k) = exp(-t^2) (L^2 + t^2), t = L tan(k pi / (2 M)), k = -M+1..M-1.
        std::array<double, 2 * m> f{};
        for (int k = -m + 1; k <= m - 1; ++k) {
            const double t = L * std::tan(0.5 * k * std::numbers::pi / m);
            f[static_cast<std::size_t>((k + m2) % m2)] = std::exp(-t * t) * (L * L + t * t);
        }
        for (int j = 1; j <= kTerms; ++j) {
            double s = 0.0;
            for (int q = 0; q < m2; ++q) s += f[static_cast<std::size_t>(q)] * std::cos(2.0 * std::numbers::pi * q * j / m2);
            a[static_cast<std::size_t>(kTerms - j)] = s / m2;
        }
    }
};

const WeidemanTable& weideman() {
    static const WeidemanTable table;
    return table;
}

}  // namespace

std::complex<double> faddeeva(std::complex<double> z) {
    const auto& w = weideman();
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> denom = w.L - i * z;
    const std::complex<double> zz = (w.L + i * z) / denom;
    std::complex<double> p = 0.0;
    for (double c : w.a) p = p * zz + c;
    return 2.0 * p / (denom * denom) + 1.0 / (std::sqrt(std::numbers::pi) * denom);
}

double voigt_profile(double x, double sigma, double gamma) {
    if (sigma <= 0.0) return gamma / (std::numbers::pi * (x * x + gamma * gamma));
    const double s2 = sigma * std::sqrt(2.0);
    const std::complex<double> z(x / s2, gamma / s2);
    return faddeeva(z).real() / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double hermite_function_recurrence(int n, double x) {
    // Run on phi_n(x) exp(x^2/2) with a tracked log scale, then restore the
    // Gaussian at the end in log space.
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25);
    double log_scale = 0.0;
    for (int k = 0; k < n; ++k) {
        const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
        const double mag = std::abs(cur);
        if (mag > 1e150) {
            prev /= mag;
            cur /= mag;
            log_scale += std::log(mag);
        }
    }
    if (cur == 0.0) return 0.0;
    const double log_mag = std::log(std::abs(cur)) + log_scale - 0.5 * x * x;
    return std::copysign(std::exp(log_mag), cur);
}

double hermite_function_asymptotic(int n, double x) {
    const double c = std::cos(x * std::sqrt(2.0 * n) - 0.5 * n * std::numbers::pi);
    if (c == 0.0) return 0.0;
    const double log_amp = 0.5 * n * std::log(2.0) - 0.5 * std::log(std::numbers::pi) +
                           std::lgamma(0.5 * (n + 1)) - 0.5 * std::lgamma(n + 1.0) -
                           0.25 * std::log(std::numbers::pi);
    return std::exp(log_amp) * c;
}

double hermite_function(int n, double x, int crossover) {
    if (n < crossover) return hermite_function_recurrence(n, x);
    return hermite_function_asymptotic(n, x);
}

std::vector<double> hermite_functions(int count, double x) {
    std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
    if (count <= 0) return out;
    out[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    if (count > 1) out[1] = std::sqrt(2.0) * x * out[0];
    for (int k = 1; k + 1 < count; ++k)
        out[static_cast<std::size_t>(k + 1)] = std::sqrt(2.0 / (k + 1)) * x * out[static_cast<std::size_t>(k)] -
                                                std::sqrt(static_cast<double>(k) / (k + 1)) * out[static_cast<std::size_t>(k - 1)];
    return out;
}

double hermite_function_at_zero(int n) {
    if (n % 2 != 0) return 0.0;
    // |phi_n(0)| = pi^{-1/4} sqrt(n!) / (2^{n/2} (n/2)!), sign (-1)^{n/2}.
    const double log_mag = -0.25 * std::log(std::numbers::pi) + 0.5 * std::lgamma(n + 1.0) - 0.5 * n * std::log(2.0) -
                           std::lgamma(0.5 * n + 1.0);
    return ((n / 2) % 2 ? -1.0 : 1.0) * std::exp(log_mag);
}

}  // namespace decolab
