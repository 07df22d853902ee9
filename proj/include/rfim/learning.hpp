// Online gradient-descent estimation of (J, h, mu) from smoothed returns.
//
// The cost over the stored history is
//   E = 1/2 sum_l [ dq(l) - F(J dq(l-1) + h sigma_l ; mu) ]^2
// with F the equation-of-state right-hand side (tanh for the two-state
// baseline) and dq the M-tick smoothed return.
#ifndef RFIM_LEARNING_HPP
#define RFIM_LEARNING_HPP

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <span>
#include <string_view>

#include "rfim/model.hpp"
#include "rfim/series.hpp"

namespace rfim {

enum class SigmaMode {
    per_term,  ///< term l uses the trend recorded with dq(l)
    literal,   ///< every term uses the current trend sigma(t)
};

enum class SpinModel {
    three_state,  ///< S in {-1, 0, +1}
    ising,        ///< S in {-1, +1}: F = tanh, mu unused
};

SigmaMode parse_sigma_mode(std::string_view name);
std::string to_string(SigmaMode mode);
std::string to_string(SpinModel model);

struct LearningConfig {
    double eta = 0.01;
    int tau = 100;
    int M = 100;
    ModelParams init{0.1, 0.6, 0.1};
    int grad_steps_per_tick = 1;
    std::optional<std::size_t> history_cap;
    SigmaMode sigma_mode = SigmaMode::literal;
    SpinModel model = SpinModel::three_state;
    bool learn_mu = true;

    /// Throws std::invalid_argument on eta <= 0, tau < 1, M < 1, etc.
    void validate() const;
};

struct Gradient {
    double dJ = 0.0;
    double dh = 0.0;
    double dmu = 0.0;
};

/// Current parameters plus the aligned history of smoothed returns and trends.
struct LearningState {
    ModelParams params;
    std::deque<double> smoothed_returns;
    std::deque<double> trends;
    double current_trend = 0.0;  ///< sigma(t), used by SigmaMode::literal

    /// Appends one (dq, sigma) pair and drops entries beyond what `history_cap` can use.
    void push(double smoothed_return, double trend, std::optional<std::size_t> history_cap = std::nullopt);
};

/// sigma(t) = (q(t) - q(t - tau)) / tau. Throws std::out_of_range without history.
double trend(const PriceSeries& series, std::size_t t, int tau);
double trend(std::span<const double> prices, std::size_t t, int tau);

/// dq(t) = (1/M) sum_{i=t-M+1}^{t} [q(i+1) - q(i)], needs ticks t-M+1 .. t+1.
double windowed_return(const PriceSeries& series, std::size_t t, int M);
double windowed_return(std::span<const double> prices, std::size_t t, int M);

/// Model prediction F(J m + h sigma) for the configured spin model.
double model_magnetization(double m, const ModelParams& params, double sigma, SpinModel model);

/// Cost over the stored history (at most history_cap terms, most recent first).
/// Needs at least two stored entries, else std::out_of_range.
double cost(const LearningState& state, const LearningConfig& config = {});

/// Analytic partial derivatives of cost. dmu is zero for the Ising baseline.
Gradient gradients(const LearningState& state, const LearningConfig& config = {});

/// grad_steps_per_tick simultaneous gradient-descent updates. A step that would
/// produce a non-finite parameter is retried with eta halved.
LearningState learn_step(LearningState state, const LearningConfig& config);

/// Largest component-wise relative deviation between gradients() and central
/// differences of cost(); the denominator is floored at 1e-4.
double gradient_deviation(const LearningState& state, const LearningConfig& config);

struct GradientCheckReport {
    std::size_t trials = 0;
    double max_deviation = 0.0;
    std::size_t worst_trial = 0;
};

/// gradient_deviation over `trials` random (params, history, mode, model)
/// instances drawn from a generator seeded with `seed`.
GradientCheckReport check_gradients(std::uint64_t seed, std::size_t trials);

}  // namespace rfim

#endif  // RFIM_LEARNING_HPP
