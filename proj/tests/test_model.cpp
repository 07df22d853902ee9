#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "rfim/model.hpp"

using namespace rfim;

namespace {

// Direct long-double evaluation of the raw formulas; only valid for moderate arguments.
long double raw_m(long double u, long double mu) {
    return 2.0L * std::exp(mu) * std::sinh(u) / (1.0L + 2.0L * std::exp(mu) * std::cosh(u));
}
long double raw_a(long double u, long double mu) {
    return 2.0L * std::exp(mu) * std::cosh(u) / (1.0L + 2.0L * std::exp(mu) * std::cosh(u));
}

ModelParams P(double J, double h, double mu) { return ModelParams{J, h, mu}; }

}  // namespace

TEST_CASE("magnetization: reference values") {
    CHECK(rhs_magnetization(0.0, P(1.2, 0.0, 0.0), {1.0}) == 0.0);
    CHECK(rhs_magnetization(0.0, P(1.2, 0.0, 0.0), {-3.0}) == 0.0);
    // mpmath, 30 digits
    CHECK(std::abs(rhs_magnetization(0.5, P(2.0, 0.0, 0.0), {1.0}) - 0.57521038260444143) < 1e-15);
    CHECK(std::abs(rhs_magnetization(0.3, P(1.5, 0.2, 30.0), {1.0}) - 0.57166996608511723) < 1e-9);
}

TEST_CASE("turnover: reference values") {
    for (double J : {0.0, 0.7, 5.0}) CHECK(std::abs(rhs_turnover(0.0, P(J, 0.0, 0.0), {1.0}) - 2.0 / 3.0) < 1e-15);
    CHECK(std::abs(rhs_turnover(0.5, P(2.0, 0.0, 0.0), {1.0}) - 0.75527152894520235) < 1e-15);
    for (double m : {-1.0, -0.2, 0.0, 0.9}) {
        for (double hs : {-2.0, 0.0, 1.5}) CHECK(std::abs(rhs_turnover(m, P(1.3, hs, 30.0), {1.0}) - 1.0) < 1e-9);
    }
}

TEST_CASE("free energy: reference values and stationarity") {
    CHECK(std::abs(free_energy_density(0.0, P(2.0, 0.0, 0.0), {1.0}) - std::log(3.0)) < 1e-15);
    CHECK(std::abs(free_energy_density(0.0, P(2.0, 0.0, std::log(3.0)), {1.0}) - std::log(7.0)) < 1e-14);

    const ModelParams p = P(1.5, 0.1, 0.5);
    const double m = 0.3;
    const double d = 1e-5;
    const double numeric =
        (free_energy_density(m + d, p, {1.0}) - free_energy_density(m - d, p, {1.0})) / (2.0 * d);
    CHECK(std::abs(numeric - (-p.J * (m - rhs_magnetization(m, p, {1.0})))) < 1e-8);
}

TEST_CASE("free energy slope matches -J(m - F) on a random grid") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const ModelParams p = P(0.1 + 2.0 * std::abs(U(rng)), U(rng), 3.0 * U(rng));
        const double m = 0.95 * U(rng);
        const double d = 1e-5;
        const double numeric =
            (free_energy_density(m + d, p, {1.0}) - free_energy_density(m - d, p, {1.0})) / (2.0 * d);
        const double exact = -p.J * (m - rhs_magnetization(m, p, {1.0}));
        CHECK(std::abs(numeric - exact) <= 1e-6 * std::max(1e-3, std::abs(exact)));
    }
}

TEST_CASE("derivative") {
    CHECK(std::abs(rhs_derivative(0.0, P(1.8, 0.0, 0.0), {1.0}) - 1.8 * 2.0 / 3.0) < 1e-15);
    CHECK(std::abs(rhs_derivative(0.0, P(1.8, 0.0, 30.0), {1.0}) - 1.8) < 1e-9);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const ModelParams p = P(0.2 + 2.0 * std::abs(U(rng)), U(rng), 4.0 * U(rng));
        const double m = U(rng);
        const double d = 1e-6;
        const double numeric = (rhs_magnetization(m + d, p, {1.0}) - rhs_magnetization(m - d, p, {1.0})) / (2.0 * d);
        const double exact = rhs_derivative(m, p, {1.0});
        CHECK(std::abs(numeric - exact) <= 1e-7 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("agrees with raw formulas where they do not overflow") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double u = 8.0 * U(rng);
        const double mu = 8.0 * U(rng);
        CHECK(std::abs(detail::magnetization_of_field(u, mu) - static_cast<double>(raw_m(u, mu))) < 1e-14);
        CHECK(std::abs(detail::turnover_of_field(u, mu) - static_cast<double>(raw_a(u, mu))) < 1e-14);
    }
}

TEST_CASE("mu slope matches finite differences") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double u = 4.0 * U(rng);
        const double mu = 4.0 * U(rng);
        const double d = 1e-6;
        const double numeric =
            (detail::magnetization_of_field(u, mu + d) - detail::magnetization_of_field(u, mu - d)) / (2.0 * d);
        CHECK(std::abs(numeric - detail::magnetization_mu_slope(u, mu)) < 1e-8);
    }
}

TEST_CASE("ordering |m| < a < 1 and symmetry") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const ModelParams p = P(3.0 * U(rng), 3.0 * U(rng), 20.0 * U(rng));
        const double m = U(rng);
        const FieldSignal s{U(rng)};
        const Observables o = rhs_observables(m, p, s);
        CHECK(std::abs(o.m) <= o.a);
        CHECK(o.a <= 1.0);
        CHECK(o.a >= 0.0);
        const Observables flipped = rhs_observables(-m, p, FieldSignal{-s.sigma});
        CHECK(flipped.m == -o.m);
        CHECK(flipped.a == o.a);
    }
}

TEST_CASE("strict ordering at moderate arguments") {
    for (double mu : {-3.0, 0.0, 2.0}) {
        for (double m : {-0.8, 0.1, 0.6}) {
            const Observables o = rhs_observables(m, P(1.1, 0.3, mu), {1.0});
            CHECK(std::abs(o.m) < o.a);
            CHECK(o.a < 1.0);
        }
    }
}

TEST_CASE("Ising limit at mu = 30") {
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            for (int k = 0; k < 10; ++k) {
                const double m = -1.0 + 2.0 * i / 9.0;
                const double J = 0.5 + 2.5 * j / 9.0;
                const double hs = -2.0 + 4.0 * k / 9.0;
                if (std::abs(J * m + hs) > 5.0) continue;
                const ModelParams p = P(J, hs, 30.0);
                CHECK(std::abs(rhs_magnetization(m, p, {1.0}) - std::tanh(J * m + hs)) < 1e-9);
                CHECK(std::abs(rhs_turnover(m, p, {1.0}) - 1.0) < 1e-9);
            }
        }
    }
}

TEST_CASE("no overflow for extreme mu and field") {
    for (double mu = -50.0; mu <= 50.0; mu += 2.5) {
        for (double u = -50.0; u <= 50.0; u += 2.5) {
            const ModelParams p = P(1.0, u, mu);
            const Observables o = rhs_observables(0.0, p, {1.0});
            CHECK(std::isfinite(o.m));
            CHECK(std::isfinite(o.a));
            CHECK(std::isfinite(free_energy_density(0.0, p, {1.0})));
            CHECK(std::isfinite(rhs_derivative(0.0, p, {1.0})));
            CHECK(std::isfinite(detail::magnetization_mu_slope(u, mu)));
            CHECK(std::abs(o.m) <= o.a);
        }
    }
    // log D at mu = 50, u = 50: 50 + 50 + log(1 + e^-100) + ... ~ 100 + log(1)
    CHECK(std::abs(detail::log_partition(50.0, 50.0) - 100.0) < 1e-12);
    CHECK(std::abs(detail::turnover_of_field(0.0, -50.0) - 2.0 * std::exp(-50.0)) < 1e-30);
}

TEST_CASE("non-finite input is rejected") {
    const double inf = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(rhs_magnetization(nan, P(1.0, 0.0, 0.0), {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(rhs_turnover(0.0, P(inf, 0.0, 0.0), {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(free_energy_density(0.0, P(1.0, 0.0, nan), {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(rhs_derivative(0.0, P(1.0, 0.0, 0.0), {inf}), std::invalid_argument);
    CHECK_THROWS_AS(validate(P(1.0, nan, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(validate_ferromagnetic(P(-1.0, 0.0, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(validate_ferromagnetic(P(0.0, 0.0, 0.0)), std::invalid_argument);
    CHECK_NOTHROW(validate(P(-1.0, 0.0, 0.0)));
}
