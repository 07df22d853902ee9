#include "rfim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rfim/equilibrium.hpp"
#include "rfim/format.hpp"

namespace rfim {

namespace {

constexpr std::size_t kBatches = 20;

void check_spin(std::int8_t s) {
    if (s < -1 || s > 1) throw std::invalid_argument("spin values must be -1, 0 or +1");
}

struct BatchStats {
    double mean = 0.0;
    double stderr_ = 0.0;
};

BatchStats batch_means(const std::vector<double>& samples) {
    BatchStats out;
    if (samples.empty()) return out;
    out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    const std::size_t batches = std::min(kBatches, samples.size());
    const std::size_t per_batch = samples.size() / batches;
    if (batches < 2) return out;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        const auto first = samples.begin() + static_cast<std::ptrdiff_t>(b * per_batch);
        means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(per_batch), 0.0) /
                   static_cast<double>(per_batch);
    }
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
    double ss = 0.0;
    for (double v : means) ss += (v - grand) * (v - grand);
    out.stderr_ = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
    return out;
}

}  // namespace

SpinConfiguration::SpinConfiguration(std::size_t n) : spins_(n, 0) {
    if (n == 0) throw std::invalid_argument("spin configuration needs N >= 1");
}

SpinConfiguration::SpinConfiguration(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
    if (spins_.empty()) throw std::invalid_argument("spin configuration needs N >= 1");
    for (auto s : spins_) {
        check_spin(s);
        total_m_ += s;
        total_a_ += s != 0;
    }
}

void SpinConfiguration::set(std::size_t i, std::int8_t value) {
    check_spin(value);
    const std::int8_t old = spins_.at(i);
    total_m_ += value - old;
    total_a_ += (value != 0) - (old != 0);
    spins_[i] = value;
}

bool SpinConfiguration::cache_consistent() const {
    std::int64_t m = 0;
    std::int64_t a = 0;
    for (auto s : spins_) {
        m += s;
        a += s != 0;
    }
    return m == total_m_ && a == total_a_;
}

void MCConfig::validate() const {
    if (N < 2) throw std::invalid_argument("Monte Carlo needs N >= 2");
    if (sweeps < 1) throw std::invalid_argument("Monte Carlo needs at least one sampling sweep");
    rfim::validate(params);
    if (!std::isfinite(signal.sigma)) throw std::invalid_argument("non-finite sigma");
}

double hamiltonian(std::span<const std::int8_t> spins, const ModelParams& params, FieldSignal signal) {
    double total = 0.0;
    double active = 0.0;
    for (auto s : spins) {
        total += s;
        active += s != 0;
    }
    const double n = static_cast<double>(spins.size());
    return -params.J / (2.0 * n) * total * total - params.h * signal.sigma * total - params.mu * active;
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

HeatBathSampler::HeatBathSampler(const MCConfig& config)
    : HeatBathSampler(config, [&] {
          config.validate();
          Rng init_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
          std::vector<std::int8_t> spins(config.N);
          for (auto& s : spins) s = static_cast<std::int8_t>(static_cast<int>(init_rng() % 3) - 1);
          return SpinConfiguration(std::move(spins));
      }()) {}

HeatBathSampler::HeatBathSampler(const MCConfig& config, SpinConfiguration initial)
    : config_(config), rng_(config.seed), spins_(std::move(initial)), order_(spins_.size()) {
    config_.validate();
    if (spins_.size() != config_.N) throw std::invalid_argument("initial configuration size differs from N");
    std::iota(order_.begin(), order_.end(), std::size_t{0});
}

void HeatBathSampler::sweep() { heat_bath_sweep(spins_, config_, rng_, order_); }

void heat_bath_sweep(SpinConfiguration& spins, const MCConfig& config, Rng& rng, std::vector<std::size_t>& order) {
    MCConfig local = config;
    local.N = spins.size();
    if (order.size() != spins.size()) {
        order.resize(spins.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
    }
    local.validate();
    const double n = static_cast<double>(local.N);
    const double coupling = local.params.J / n;
    const double self = local.params.J / (2.0 * n) + local.params.mu;
    const double field = local.params.h * local.signal.sigma;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
        const std::int8_t old = spins[i];
        // log-weights relative to s = 0: s (J/N) M_i + s^2 J/(2N) + s h sigma + |s| mu
        const double x = coupling * static_cast<double>(spins.total_magnetization() - old) + field;
        const double lp = self + x;
        const double lm = self - x;
        const double top = std::max({0.0, lp, lm});
        const double w0 = std::exp(-top);
        const double wp = std::exp(lp - top);
        const double wm = std::exp(lm - top);
        const double r = uniform01(rng) * (w0 + wp + wm);
        const std::int8_t next = r < wp ? 1 : (r < wp + wm ? -1 : 0);
        if (next != old) spins.set(i, next);
    }
}

bool symmetric_bistable(const ModelParams& params, FieldSignal signal) {
    return params.h * signal.sigma == 0.0 && params.J * critical_coupling(params.mu) > 1.0;
}

MCEstimate estimate_observables(const MCConfig& config) {
    config.validate();
    HeatBathSampler chain(config);
    for (std::size_t s = 0; s < config.burn_in; ++s) chain.sweep();

    MCEstimate est;
    est.m_is_absolute = symmetric_bistable(config.params, config.signal);
    std::vector<double> ms;
    std::vector<double> as;
    ms.reserve(config.sweeps);
    as.reserve(config.sweeps);
    for (std::size_t s = 0; s < config.sweeps; ++s) {
        chain.sweep();
        const double m = chain.state().magnetization();
        ms.push_back(est.m_is_absolute ? std::fabs(m) : m);
        as.push_back(chain.state().turnover());
    }
    const BatchStats mstats = batch_means(ms);
    const BatchStats astats = batch_means(as);
    est.m_mean = mstats.mean;
    est.m_stderr = mstats.stderr_;
    est.a_mean = astats.mean;
    est.a_stderr = astats.stderr_;
    return est;
}

std::string mc_csv_header() { return "J,h,mu,sigma,N,m_mean,m_stderr,a_mean,a_stderr"; }

std::string mc_csv_row(const MCConfig& config, const MCEstimate& e) {
    return format_double(config.params.J) + "," + format_double(config.params.h) + "," +
           format_double(config.params.mu) + "," + format_double(config.signal.sigma) + "," +
           std::to_string(config.N) + "," + format_double(e.m_mean) + "," + format_double(e.m_stderr) + "," +
           format_double(e.a_mean) + "," + format_double(e.a_stderr);
}

}  // namespace rfim
