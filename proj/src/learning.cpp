#include "rfim/learning.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace rfim {

namespace {

struct TermRange {
    std::size_t first;  // first target index l
    std::size_t end;
};

TermRange term_range(const LearningState& state, const LearningConfig& config) {
    const std::size_t n = state.smoothed_returns.size();
    if (state.trends.size() != n) throw std::logic_error("learning buffers out of sync");
    if (n < 2) throw std::out_of_range("cost needs at least two smoothed returns");
    std::size_t first = 1;
    if (config.history_cap && n - 1 > *config.history_cap) first = n - *config.history_cap;
    return {first, n};
}

double term_sigma(const LearningState& state, const LearningConfig& config, std::size_t l) {
    return config.sigma_mode == SigmaMode::literal ? state.current_trend : state.trends[l];
}

void check_window(std::size_t t, int window, const char* what) {
    if (window < 1) throw std::invalid_argument(std::string(what) + " window must be >= 1");
    if (t < static_cast<std::size_t>(window)) {
        throw std::out_of_range(std::string(what) + ": not enough history at tick " + std::to_string(t));
    }
}

}  // namespace

SigmaMode parse_sigma_mode(std::string_view name) {
    if (name == "per_term") return SigmaMode::per_term;
    if (name == "literal") return SigmaMode::literal;
    throw std::invalid_argument("sigma mode must be per_term or literal, got '" + std::string(name) + "'");
}

std::string to_string(SigmaMode mode) { return mode == SigmaMode::literal ? "literal" : "per_term"; }

std::string to_string(SpinModel model) { return model == SpinModel::ising ? "ising" : "three_state"; }

void LearningConfig::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
    if (tau < 1) throw std::invalid_argument("tau must be >= 1");
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    if (grad_steps_per_tick < 1) throw std::invalid_argument("grad_steps_per_tick must be >= 1");
    if (history_cap && *history_cap < 1) throw std::invalid_argument("history_cap must be >= 1");
    rfim::validate(init);
}

void LearningState::push(double smoothed_return, double trend, std::optional<std::size_t> history_cap) {
    smoothed_returns.push_back(smoothed_return);
    trends.push_back(trend);
    if (history_cap) {
        while (smoothed_returns.size() > *history_cap + 1) {
            smoothed_returns.pop_front();
            trends.pop_front();
        }
    }
}

double trend(std::span<const double> prices, std::size_t t, int tau) {
    check_window(t, tau, "trend");
    if (t >= prices.size()) throw std::out_of_range("trend: tick beyond series end");
    return (prices[t] - prices[t - static_cast<std::size_t>(tau)]) / tau;
}

double trend(const PriceSeries& series, std::size_t t, int tau) {
    const auto prices = series.prices();
    return trend(std::span<const double>(prices), t, tau);
}

double windowed_return(std::span<const double> prices, std::size_t t, int M) {
    // Needs q(t - M + 1), so t >= M - 1.
    check_window(t + 1, M, "windowed_return");
    if (t + 1 >= prices.size()) throw std::out_of_range("windowed_return: needs q(t + 1)");
    return (prices[t + 1] - prices[t + 1 - static_cast<std::size_t>(M)]) / M;
}

double windowed_return(const PriceSeries& series, std::size_t t, int M) {
    const auto prices = series.prices();
    return windowed_return(std::span<const double>(prices), t, M);
}

double model_magnetization(double m, const ModelParams& params, double sigma, SpinModel model) {
    const double u = params.J * m + params.h * sigma;
    return model == SpinModel::ising ? std::tanh(u) : detail::magnetization_of_field(u, params.mu);
}

double cost(const LearningState& state, const LearningConfig& config) {
    const auto [first, end] = term_range(state, config);
    double total = 0.0;
    for (std::size_t l = first; l < end; ++l) {
        const double predicted =
            model_magnetization(state.smoothed_returns[l - 1], state.params, term_sigma(state, config, l), config.model);
        const double r = state.smoothed_returns[l] - predicted;
        total += r * r;
    }
    return 0.5 * total;
}

Gradient gradients(const LearningState& state, const LearningConfig& config) {
    const auto [first, end] = term_range(state, config);
    const ModelParams& p = state.params;
    Gradient g;
    for (std::size_t l = first; l < end; ++l) {
        const double x = state.smoothed_returns[l - 1];
        const double sigma = term_sigma(state, config, l);
        const double u = p.J * x + p.h * sigma;
        double predicted = 0.0;
        double slope = 0.0;
        double mu_slope = 0.0;
        if (config.model == SpinModel::ising) {
            predicted = std::tanh(u);
            slope = 1.0 - predicted * predicted;
        } else {
            predicted = detail::magnetization_of_field(u, p.mu);
            slope = detail::magnetization_slope(u, p.mu);
            mu_slope = detail::magnetization_mu_slope(u, p.mu);
        }
        const double r = state.smoothed_returns[l] - predicted;
        g.dJ -= r * slope * x;
        g.dh -= r * slope * sigma;
        g.dmu -= r * mu_slope;
    }
    return g;
}

LearningState learn_step(LearningState state, const LearningConfig& config) {
    config.validate();
    const bool update_mu = config.learn_mu && config.model == SpinModel::three_state;
    for (int step = 0; step < config.grad_steps_per_tick; ++step) {
        const Gradient g = gradients(state, config);
        double eta = config.eta;
        for (int attempt = 0; attempt < 64; ++attempt, eta *= 0.5) {
            ModelParams next = state.params;
            next.J -= eta * g.dJ;
            next.h -= eta * g.dh;
            if (update_mu) next.mu -= eta * g.dmu;
            if (std::isfinite(next.J) && std::isfinite(next.h) && std::isfinite(next.mu)) {
                state.params = next;
                break;
            }
        }
    }
    return state;
}

double gradient_deviation(const LearningState& state, const LearningConfig& config) {
    const Gradient g = gradients(state, config);
    auto central = [&](double ModelParams::*field) {
        const double x = state.params.*field;
        const double step = 1e-5 * std::max(1.0, std::abs(x));
        LearningState plus = state;
        LearningState minus = state;
        plus.params.*field = x + step;
        minus.params.*field = x - step;
        return (cost(plus, config) - cost(minus, config)) / (2.0 * step);
    };
    auto deviation = [](double analytic, double numeric) {
        return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-4});
    };
    double worst = std::max(deviation(g.dJ, central(&ModelParams::J)), deviation(g.dh, central(&ModelParams::h)));
    if (config.model == SpinModel::three_state) worst = std::max(worst, deviation(g.dmu, central(&ModelParams::mu)));
    return worst;
}

GradientCheckReport check_gradients(std::uint64_t seed, std::size_t trials) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    GradientCheckReport report;
    report.trials = trials;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        LearningConfig config;
        config.model = unit(rng) < 0.25 ? SpinModel::ising : SpinModel::three_state;
        config.sigma_mode = unit(rng) < 0.5 ? SigmaMode::literal : SigmaMode::per_term;
        if (unit(rng) < 0.3) config.history_cap = 1 + static_cast<std::size_t>(between(0.0, 20.0));
        LearningState state;
        state.params = {between(0.05, 3.0), between(-1.0, 1.0), between(-3.0, 3.0)};
        const auto n = 2 + static_cast<std::size_t>(between(0.0, 59.0));
        for (std::size_t i = 0; i < n; ++i) state.push(between(-0.3, 0.3), between(-1.0, 1.0));
        state.current_trend = between(-1.0, 1.0);
        const double d = gradient_deviation(state, config);
        if (d > report.max_deviation) {
            report.max_deviation = d;
            report.worst_trial = trial;
        }
    }
    return report;
}

}  // namespace rfim
