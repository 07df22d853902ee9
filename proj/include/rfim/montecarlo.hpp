// Heat-bath Monte Carlo for N three-state traders on the complete graph.
//
// Sampled measure: P(S) ∝ exp(-H(S)) with
//   H(S) = -(J / 2N) sum_{i,j} S_i S_j - h sigma sum_i S_i - mu sum_i |S_i|,
// the double sum running over all ordered pairs including i = j. This is the
// normalization under which the N -> infinity limit is m = F(J m + h sigma).
#ifndef RFIM_MONTECARLO_HPP
#define RFIM_MONTECARLO_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rfim/model.hpp"

namespace rfim {

/// Spins in {-1, 0, +1} with cached totals sum S_i and sum |S_i|.
class SpinConfiguration {
public:
    explicit SpinConfiguration(std::size_t n);
    explicit SpinConfiguration(std::vector<std::int8_t> spins);

    std::size_t size() const { return spins_.size(); }
    std::int8_t operator[](std::size_t i) const { return spins_[i]; }
    std::span<const std::int8_t> spins() const { return spins_; }

    void set(std::size_t i, std::int8_t value);

    std::int64_t total_magnetization() const { return total_m_; }
    std::int64_t total_activity() const { return total_a_; }
    double magnetization() const { return static_cast<double>(total_m_) / static_cast<double>(size()); }
    double turnover() const { return static_cast<double>(total_a_) / static_cast<double>(size()); }

    /// Recomputes both totals from scratch and compares them with the cache.
    bool cache_consistent() const;

private:
    std::vector<std::int8_t> spins_;
    std::int64_t total_m_ = 0;
    std::int64_t total_a_ = 0;
};

struct MCConfig {
    std::size_t N = 2000;
    std::size_t sweeps = 5000;
    std::size_t burn_in = 2000;
    std::uint64_t seed = 1;
    ModelParams params;
    FieldSignal signal;

    void validate() const;
};

/// H(S) for the sampled measure.
double hamiltonian(std::span<const std::int8_t> spins, const ModelParams& params, FieldSignal signal);

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(Rng& rng);

/// Heat-bath chain. Each sweep reshuffles the visit order from the chain's own
/// stream and resamples every site from its exact conditional distribution.
class HeatBathSampler {
public:
    /// Uniform random initial configuration drawn from the seeded stream.
    explicit HeatBathSampler(const MCConfig& config);
    HeatBathSampler(const MCConfig& config, SpinConfiguration initial);

    void sweep();
    const SpinConfiguration& state() const { return spins_; }

private:
    MCConfig config_;
    Rng rng_;
    SpinConfiguration spins_;
    std::vector<std::size_t> order_;
};

/// One sweep over `spins` using an external generator and visit-order buffer.
void heat_bath_sweep(SpinConfiguration& spins, const MCConfig& config, Rng& rng, std::vector<std::size_t>& order);

struct MCEstimate {
    double m_mean = 0.0;
    double m_stderr = 0.0;
    double a_mean = 0.0;
    double a_stderr = 0.0;
    bool m_is_absolute = false;  ///< m_mean is <|m|> (symmetric bistable point)
};

/// True when h sigma = 0 and J exceeds the mean-field critical coupling, i.e.
/// the chain can settle in either of two mirror-image states.
bool symmetric_bistable(const ModelParams& params, FieldSignal signal);

/// burn_in sweeps, then `sweeps` sampling sweeps; batch-means standard errors
/// over 20 batches.
MCEstimate estimate_observables(const MCConfig& config);

/// Header "J,h,mu,sigma,N,m_mean,m_stderr,a_mean,a_stderr".
std::string mc_csv_header();
std::string mc_csv_row(const MCConfig& config, const MCEstimate& estimate);

}  // namespace rfim

#endif  // RFIM_MONTECARLO_HPP
