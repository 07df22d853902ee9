// Online prediction loop: ingest q(t), learn (J, h, mu), predict the next
// price through p(t+1) = p(t) + m_t, and record the turnover and error.
#ifndef RFIM_PREDICTOR_HPP
#define RFIM_PREDICTOR_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfim/learning.hpp"
#include "rfim/series.hpp"

namespace rfim {

enum class PredictionMode {
    observed_return,  ///< m_input is the latest observed smoothed return
    recursive,        ///< m_input is the model's previous m
};

PredictionMode parse_prediction_mode(std::string_view name);
std::string to_string(PredictionMode mode);

struct TraceRecord {
    std::int64_t t = 0;
    double q = 0.0;
    double p = 0.0;
    double m = 0.0;
    double a = 0.0;
    double J = 0.0;
    double h = 0.0;
    double mu = 0.0;
    double eps = 0.0;
};

struct PredictionTrace {
    SpinModel model = SpinModel::three_state;
    PredictionMode mode = PredictionMode::observed_return;
    std::vector<TraceRecord> records;
};

/// (m, a) = (F, turnover) at m_input with the current parameters.
Observables predict_step(double m_input, const LearningState& state, double sigma,
                         SpinModel model = SpinModel::three_state);

/// (q - p)^2 / q_max. Throws std::invalid_argument unless q_max > 0.
double error_metric(double q, double p, double q_max);

/// Index of the first predicted tick: tau + M + 1.
std::size_t warmup_length(const LearningConfig& config);

PredictionTrace run_prediction(const PriceSeries& series, const LearningConfig& config,
                               PredictionMode mode = PredictionMode::observed_return);

/// Two-state baseline: m = tanh(J m + h sigma), a = 1, learns (J, h) only.
PredictionTrace run_baseline_ising(const PriceSeries& series, const LearningConfig& config,
                                   PredictionMode mode = PredictionMode::observed_return);

/// CSV "t,q,p,m,a,J,h,mu,eps", optionally preceded by a comment line.
std::string render_trace_csv(const PredictionTrace& trace, const std::string& comment = {});

/// One JSON object per record with the same fields.
std::string render_trace_jsonl(const PredictionTrace& trace);

/// Reads back render_trace_csv output (comment lines are skipped).
PredictionTrace parse_trace_csv(std::string_view text);

}  // namespace rfim

#endif  // RFIM_PREDICTOR_HPP
