#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "approx.hpp"
#include "decolab/errors.hpp"
#include "decolab/fit.hpp"

using namespace decolab;

namespace {

DecayCurve stretched_curve(double a, double t2, double n, int points, double x_max) {
    DecayCurve c;
    for (int i = 1; i <= points; ++i) {
        const double x = x_max * i / points;
        c.x.push_back(x);
        c.y.push_back(stretched_exp(x, a, t2, n));
    }
    return c;
}

std::vector<double> pulse_counts() { return {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048}; }

}  // namespace

TEST_CASE("least_squares engine") {
    SUBCASE("zero residual at the start returns the start") {
        Eigen::VectorXd p0(2);
        p0 << 1.5, -2.0;
        auto r = least_squares([&](const Eigen::VectorXd& p) { return Eigen::VectorXd((p - p0).eval()); }, p0,
                               Bounds::unbounded(2));
        CHECK(r.params == p0);
        CHECK(r.iterations == 1);
        CHECK(r.converged);
    }
    SUBCASE("linear model matches the weighted normal equations") {
        const int m = 15;
        Eigen::MatrixXd x(m, 3);
        Eigen::VectorXd y(m), w(m);
        std::mt19937_64 rng(3);
        std::normal_distribution<double> g;
        for (int i = 0; i < m; ++i) {
            const double t = 0.3 * i;
            x(i, 0) = 1.0;
            x(i, 1) = t;
            x(i, 2) = t * t;
            y[i] = 0.5 - 1.2 * t + 0.07 * t * t + 0.1 * g(rng);
            w[i] = 1.0 / (0.05 + 0.01 * i);
        }
        const Eigen::VectorXd beta =
            (x.transpose() * w.cwiseAbs2().asDiagonal() * x).ldlt().solve(x.transpose() * w.cwiseAbs2().asDiagonal() * y);
        auto res = least_squares(
            [&](const Eigen::VectorXd& p) { return Eigen::VectorXd(w.asDiagonal() * (x * p - y)); },
            Eigen::VectorXd::Zero(3), Bounds::unbounded(3));
        CHECK(res.converged);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(res.params[k] - beta[k]) < 1e-10 * std::max(1.0, std::abs(beta[k])));
        const Eigen::MatrixXd cov = (x.transpose() * w.cwiseAbs2().asDiagonal() * x).inverse();
        CHECK((res.covariance - cov).norm() < 1e-6 * cov.norm());
    }
    SUBCASE("Rosenbrock valley") {
        auto f = [](const Eigen::VectorXd& p) {
            Eigen::VectorXd r(2);
            r << 10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0];
            return r;
        };
        Eigen::VectorXd p0(2);
        p0 << -1.2, 1.0;
        auto res = least_squares(f, p0, Bounds::unbounded(2));
        CHECK(std::abs(res.params[0] - 1.0) < 1e-6);
        CHECK(std::abs(res.params[1] - 1.0) < 1e-6);
    }
    SUBCASE("iteration cap flags non-convergence") {
        auto f = [](const Eigen::VectorXd& p) {
            Eigen::VectorXd r(2);
            r << 10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0];
            return r;
        };
        Eigen::VectorXd p0(2);
        p0 << -1.2, 1.0;
        LsqOptions o;
        o.max_iterations = 2;
        const auto res = least_squares(f, p0, Bounds::unbounded(2), o);
        CHECK_FALSE(res.converged);
        CHECK(res.message == "maximum iterations reached");
    }
    SUBCASE("bounds are respected") {
        auto f = [](const Eigen::VectorXd& p) { return Eigen::VectorXd::Constant(1, p[0] + 3.0); };
        Bounds b{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 10.0)};
        const auto res = least_squares(f, Eigen::VectorXd::Constant(1, 5.0), b);
        CHECK(res.params[0] == 0.0);
        CHECK_THROWS_AS(least_squares(f, Eigen::VectorXd::Constant(1, 11.0), b), ConfigError);
    }
    SUBCASE("forward differences agree with central differences") {
        auto f = [](const Eigen::VectorXd& p) {
            Eigen::VectorXd r(3);
            r << std::sin(p[0]) * p[1], std::exp(0.3 * p[1]), p[0] * p[0] * p[1];
            return r;
        };
        Eigen::VectorXd p(2);
        p << 0.7, 1.9;
        const Eigen::MatrixXd jf = finite_difference_jacobian(f, p, Bounds::unbounded(2), 1e-6);
        Eigen::MatrixXd jc(3, 2);
        for (int k = 0; k < 2; ++k) {
            Eigen::VectorXd hi = p, lo = p;
            const double h = 1e-5 * std::abs(p[k]);
            hi[k] += h;
            lo[k] -= h;
            jc.col(k) = (f(hi) - f(lo)) / (2 * h);
        }
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 2; ++k) CHECK(std::abs(jf(i, k) - jc(i, k)) <= 1e-4 * std::abs(jc(i, k)));
    }
}

TEST_CASE("least_squares with an active bound") {
    // Line a + b x fitted to a slope-3 line with b capped at 2: the optimum
    // sits on the cap and a is the unconstrained mean of y - 2 x.
    std::vector<double> x, y;
    for (int i = 0; i < 9; ++i) {
        x.push_back(0.5 * i);
        y.push_back(1.0 + 3.0 * x.back() + 0.05 * ((i * 7) % 5 - 2));
    }
    double a_ref = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) a_ref += (y[i] - 2.0 * x[i]) / x.size();
    auto res = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) r[static_cast<Eigen::Index>(i)] = p[0] + p[1] * x[i] - y[i];
        return r;
    };
    Bounds b = Bounds::unbounded(2);
    b.upper[1] = 2.0;
    const auto r = least_squares(res, Eigen::Vector2d(0.0, 0.5), b);
    CHECK(r.converged);
    CHECK(r.iterations < 50);
    CHECK(r.params[1] == 2.0);
    CHECK(r.params[0] == rel_approx(a_ref).epsilon(1e-9));
}

TEST_CASE("stretched exponential") {
    SUBCASE("noiseless recovery") {
        const auto c = stretched_curve(1.0, 11.2, 1.7, 20, 30.0);
        const auto r = fit_stretched_exp(c);
        CHECK(r.converged);
        CHECK(r.param("A") == rel_approx(1.0).epsilon(1e-3));
        CHECK(r.param("T2") == rel_approx(11.2).epsilon(1e-3));
        CHECK(r.param("n") == rel_approx(1.7).epsilon(1e-3));
        const Eigen::MatrixXd& cov = r.covariance;
        CHECK((cov - cov.transpose()).norm() <= 1e-12 * cov.norm());
    }
    SUBCASE("constant curve is not identifiable") {
        DecayCurve c;
        for (int i = 1; i <= 10; ++i) {
            c.x.push_back(i);
            c.y.push_back(0.8);
        }
        CHECK_FALSE(fit_stretched_exp(c).converged);
    }
    SUBCASE("fixed n = 1 reduces to an exponential fit") {
        DecayCurve c;
        for (int i = 0; i < 12; ++i) {
            c.x.push_back(0.4 * i);
            c.y.push_back(0.9 * std::exp(-0.4 * i / 1.3));
        }
        StretchedExpOptions o;
        o.fixed_n = 1.0;
        const auto r = fit_stretched_exp(c, o);
        CHECK(r.param("A") == rel_approx(0.9).epsilon(1e-10));
        CHECK(r.param("T2") == rel_approx(1.3).epsilon(1e-10));
        CHECK(r.param("n") == 1.0);
        CHECK(r.error("n") == 0.0);
    }
    SUBCASE("n is bounded by 5") {
        const auto c = stretched_curve(1.0, 2.0, 8.0, 20, 3.0);
        CHECK(fit_stretched_exp(c).param("n") <= 5.0);
    }
    SUBCASE("too few points") {
        DecayCurve c{{1, 2, 3}, {0.9, 0.5, 0.2}, {}};
        CHECK_THROWS_AS(fit_stretched_exp(c), DataError);
    }
    SUBCASE("noisy recovery") {
        int within = 0;
        const int trials = 200;
        for (int t = 0; t < trials; ++t) {
            std::mt19937_64 rng(1000 + t);
            std::normal_distribution<double> g(0.0, 0.01);
            auto c = stretched_curve(1.0, 11.2, 1.7, 20, 30.0);
            for (double& y : c.y) y += g(rng);
            c.sigma.assign(c.x.size(), 0.01);
            const auto r = fit_stretched_exp(c);
            within += (r.converged && std::abs(r.param("A") - 1.0) < 5 * r.error("A") &&
                       std::abs(r.param("T2") - 11.2) < 5 * r.error("T2") &&
                       std::abs(r.param("n") - 1.7) < 5 * r.error("n"))
                          ? 1
                          : 0;
        }
        CHECK(within >= 190);
    }
    SUBCASE("amplitude rescaling") {
        DecayCurve c{{1, 2}, {0.9, 0.45}, {0.09, 0.045}};
        const auto r = rescale_by_amplitude(c, 0.9);
        CHECK(r.y[0] == rel_approx(1.0));
        CHECK(r.sigma[1] == rel_approx(0.05));
        CHECK_THROWS_AS(rescale_by_amplitude(c, 0.0), DataError);
    }
}

TEST_CASE("power-law scaling") {
    SUBCASE("exact recovery") {
        std::vector<double> t2;
        for (double n : pulse_counts()) t2.push_back(16e-3 * std::pow(n, 0.67));
        const auto r = fit_power_scaling(pulse_counts(), t2);
        CHECK(r.param("T0") == rel_approx(16e-3).epsilon(1e-12));
        CHECK(r.param("eta") == rel_approx(0.67).epsilon(1e-12));
    }
    SUBCASE("linear scaling") {
        std::vector<double> t2;
        for (double n : pulse_counts()) t2.push_back(1.8e-3 * n);
        const auto r = fit_power_scaling(pulse_counts(), t2);
        CHECK(std::abs(r.param("eta") - 1.0) < 1e-12);
        CHECK(r.param("T0") == rel_approx(1.8e-3).epsilon(1e-12));
    }
    SUBCASE("two points interpolate") {
        const auto r = fit_power_scaling({2, 8}, {0.01, 0.04});
        CHECK(r.dof == 0);
        CHECK(r.chi2 < 1e-28);
        CHECK(r.param("eta") == rel_approx(1.0).epsilon(1e-14));
        CHECK_FALSE(r.message.empty());
    }
    SUBCASE("reordering and rescaling") {
        std::vector<double> n = {4, 1, 64, 16, 256};
        std::vector<double> t2 = {0.05, 0.017, 0.3, 0.11, 0.8};
        const auto a = fit_power_scaling(n, t2);
        const auto b = fit_power_scaling({1, 4, 16, 64, 256}, {0.017, 0.05, 0.11, 0.3, 0.8});
        CHECK(a.param("T0") == rel_approx(b.param("T0")).epsilon(1e-13));
        CHECK(a.param("eta") == rel_approx(b.param("eta")).epsilon(1e-13));
        std::vector<double> scaled = t2;
        for (double& v : scaled) v *= 3.5;
        const auto c = fit_power_scaling(n, scaled);
        CHECK(c.param("T0") == rel_approx(3.5 * a.param("T0")).epsilon(1e-13));
        CHECK(c.param("eta") == rel_approx(a.param("eta")).epsilon(1e-13));
    }
    SUBCASE("direct fit agrees on exact data") {
        std::vector<double> t2;
        for (double n : pulse_counts()) t2.push_back(16e-3 * std::pow(n, 0.67));
        const auto r = fit_power_scaling_direct(pulse_counts(), t2);
        CHECK(r.param("eta") == rel_approx(0.67).epsilon(1e-9));
    }
    SUBCASE("noisy recovery") {
        for (auto [t0, eta] : {std::pair{16e-3, 0.67}, std::pair{1.8e-3, 1.0}}) {
            int within = 0;
            for (int t = 0; t < 200; ++t) {
                std::mt19937_64 rng(500 + t);
                std::normal_distribution<double> g(0.0, 0.01);
                std::vector<double> t2, sig;
                for (double n : pulse_counts()) {
                    const double v = t0 * std::pow(n, eta);
                    t2.push_back(v * (1.0 + g(rng)));
                    sig.push_back(0.01 * v);
                }
                const auto r = fit_power_scaling(pulse_counts(), t2, sig);
                within += (std::abs(r.param("T0") - t0) < 5 * r.error("T0") &&
                           std::abs(r.param("eta") - eta) < 5 * r.error("eta"))
                              ? 1
                              : 0;
            }
            CHECK(within >= 190);
        }
    }
    SUBCASE("invalid inputs") {
        CHECK_THROWS_AS(fit_power_scaling({1, 2, 3}, {0.1, -0.2, 0.3}), DataError);
        CHECK_THROWS_AS(fit_power_scaling({1}, {0.1}), DataError);
        CHECK_THROWS_AS(fit_power_scaling({2, 2}, {0.1, 0.2}), DataError);
    }
}

TEST_CASE("decay curve validation") {
    CHECK_THROWS_AS((DecayCurve{{1, 1}, {0, 0}, {}}).validate(), DataError);
    CHECK_THROWS_AS((DecayCurve{{1, 2}, {0}, {}}).validate(), DataError);
    CHECK_THROWS_AS((DecayCurve{{1, 2}, {0, 0}, {1, 0}}).validate(), DataError);
}
