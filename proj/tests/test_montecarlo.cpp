#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rfim/equilibrium.hpp"
#include "rfim/montecarlo.hpp"

using namespace rfim;

namespace {

MCConfig config(double J, double h, double mu, std::size_t N, std::size_t sweeps, std::size_t burn_in,
                std::uint64_t seed) {
    MCConfig c;
    c.N = N;
    c.sweeps = sweeps;
    c.burn_in = burn_in;
    c.seed = seed;
    c.params = {J, h, mu};
    c.signal = {1.0};
    return c;
}

int state_index(const SpinConfiguration& s) {
    int k = 0;
    for (std::size_t i = 0; i < s.size(); ++i) k = 3 * k + (s[i] + 1);
    return k;
}

}  // namespace

TEST_CASE("spin configuration caches") {
    SpinConfiguration s(std::vector<std::int8_t>{1, 0, -1, 1});
    CHECK(s.total_magnetization() == 1);
    CHECK(s.total_activity() == 3);
    s.set(1, -1);
    s.set(0, 0);
    CHECK(s.total_magnetization() == -1);
    CHECK(s.total_activity() == 3);
    CHECK(s.magnetization() == -0.25);
    CHECK(s.turnover() == 0.75);
    CHECK(s.cache_consistent());
    CHECK_THROWS_AS(s.set(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(SpinConfiguration(std::vector<std::int8_t>{0, 3}), std::invalid_argument);
    CHECK_THROWS_AS(SpinConfiguration(0), std::invalid_argument);
}

TEST_CASE("hamiltonian by hand") {
    const std::vector<std::int8_t> s{1, 1, 0, -1};
    // M = 1, A = 3: -(2/8) * 1 - 0.5 * 1 - 0.2 * 3
    CHECK(std::abs(hamiltonian(s, {2.0, 0.5, 0.2}, {1.0}) - (-0.25 - 0.5 - 0.6)) < 1e-15);
}

TEST_CASE("uniform01 range") {
    Rng rng(5);
    for (int i = 0; i < 100000; ++i) {
        const double u = uniform01(rng);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(config(1.0, 0.0, 0.0, 1, 10, 0, 1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(1.0, 0.0, 0.0, 10, 0, 0, 1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(NAN, 0.0, 0.0, 10, 10, 0, 1).validate(), std::invalid_argument);
}

TEST_CASE("determinism and cache consistency") {
    const MCConfig c = config(1.1, 0.05, 0.3, 300, 1, 0, 77);
    HeatBathSampler a(c);
    HeatBathSampler b(c);
    for (int k = 0; k < 50; ++k) {
        a.sweep();
        b.sweep();
        CHECK(a.state().cache_consistent());
    }
    CHECK(std::equal(a.state().spins().begin(), a.state().spins().end(), b.state().spins().begin()));

    HeatBathSampler other(config(1.1, 0.05, 0.3, 300, 1, 0, 78));
    for (int k = 0; k < 50; ++k) other.sweep();
    CHECK_FALSE(std::equal(a.state().spins().begin(), a.state().spins().end(), other.state().spins().begin()));
}

TEST_CASE("N = 3 chain matches exact enumeration") {
    const ModelParams p{1.5, 0.3, -0.2};
    const MCConfig c = config(p.J, p.h, p.mu, 3, 1, 0, 2025);

    std::array<double, 27> exact{};
    double Z = 0.0;
    for (int k = 0; k < 27; ++k) {
        const int s[3] = {k / 9 - 1, (k / 3) % 3 - 1, k % 3 - 1};
        const int M = s[0] + s[1] + s[2];
        const int A = std::abs(s[0]) + std::abs(s[1]) + std::abs(s[2]);
        const double H = -p.J / 6.0 * M * M - p.h * M - p.mu * A;
        exact[k] = std::exp(-H);
        Z += exact[k];
    }
    for (auto& w : exact) w /= Z;

    HeatBathSampler chain(c);
    for (int k = 0; k < 1000; ++k) chain.sweep();
    std::array<double, 27> counts{};
    const int samples = 1000000;
    for (int k = 0; k < samples; ++k) {
        chain.sweep();
        counts[state_index(chain.state())] += 1.0;
    }
    double tv = 0.0;
    for (int k = 0; k < 27; ++k) tv += std::abs(counts[k] / samples - exact[k]);
    tv *= 0.5;
    CHECK(tv < 0.01);
}

TEST_CASE("independent sites: uniform and weighted marginals") {
    const MCEstimate flat = estimate_observables(config(0.0, 0.0, 0.0, 1000, 2000, 100, 3));
    CHECK(std::abs(flat.m_mean) <= 4.0 * flat.m_stderr + 1e-3);
    CHECK(std::abs(flat.a_mean - 2.0 / 3.0) <= 4.0 * flat.a_stderr + 1e-3);

    const MCEstimate weighted = estimate_observables(config(0.0, 0.0, std::log(3.0), 1000, 2000, 100, 4));
    CHECK(std::abs(weighted.a_mean - 6.0 / 7.0) <= 4.0 * weighted.a_stderr + 1e-3);
}

TEST_CASE("mean-field agreement at N = 2000") {
    const MCEstimate sub = estimate_observables(config(0.5, 0.0, 0.0, 2000, 5000, 2000, 42));
    CHECK(std::abs(sub.m_mean) <= std::max(0.02, 3.0 * sub.m_stderr));
    CHECK(std::abs(sub.a_mean - 2.0 / 3.0) <= std::max(0.02, 3.0 * sub.a_stderr));

    const ModelParams p{2.0, 0.1, 0.5};
    const auto mf = select_equilibrium(solve_states(p, {1.0}));
    const MCEstimate e = estimate_observables(config(p.J, p.h, p.mu, 2000, 5000, 2000, 42));
    CHECK(std::abs(e.m_mean - mf.m) <= std::max(0.02, 3.0 * e.m_stderr));
    CHECK(std::abs(e.a_mean - mf.a) <= std::max(0.02, 3.0 * e.a_stderr));
}

TEST_CASE("symmetric bistable point reports |m|") {
    CHECK(symmetric_bistable({1.2, 0.0, 30.0}, {1.0}));
    CHECK_FALSE(symmetric_bistable({1.2, 0.1, 30.0}, {1.0}));
    CHECK_FALSE(symmetric_bistable({0.5, 0.0, 0.0}, {1.0}));
    const MCEstimate e = estimate_observables(config(1.2, 0.0, 30.0, 2000, 5000, 2000, 42));
    CHECK(e.m_is_absolute);
    CHECK(std::abs(e.m_mean - 0.65856966040575400) < 0.02);  // mpmath root of m = tanh(1.2 m)
}

TEST_CASE("CSV row") {
    const MCConfig c = config(1.0, 0.0, 0.0, 10, 1, 0, 1);
    CHECK(mc_csv_header() == "J,h,mu,sigma,N,m_mean,m_stderr,a_mean,a_stderr");
    CHECK(mc_csv_row(c, MCEstimate{0.5, 0.1, 0.75, 0.01, false}) == "1,0,0,1,10,0.5,0.10000000000000001,0.75,0.01");
}
