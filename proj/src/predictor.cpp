#include "rfim/predictor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rfim/format.hpp"

namespace rfim {

namespace {

PredictionTrace run_loop(const PriceSeries& series, LearningConfig config, PredictionMode mode) {
    config.validate();
    const std::vector<double> q = series.prices();
    const std::size_t start = warmup_length(config);
    if (q.size() <= start) {
        throw std::out_of_range("series of length " + std::to_string(q.size()) + " is too short; need more than " +
                                std::to_string(start) + " ticks");
    }
    for (double price : q) {
        if (!std::isfinite(price)) throw std::invalid_argument("non-finite price in series");
    }

    const auto tau = static_cast<std::size_t>(config.tau);
    const auto M = static_cast<std::size_t>(config.M);
    const std::size_t first_push = std::max(M, tau + 1);

    PredictionTrace trace;
    trace.model = config.model;
    trace.mode = mode;
    trace.records.reserve(q.size() - start);

    LearningState state;
    state.params = config.init;
    double q_max = q.front();
    for (std::size_t t = 1; t < first_push; ++t) q_max = std::max(q_max, q[t]);

    double p = 0.0;
    double m_prev = 0.0;
    for (std::size_t t = first_push; t < q.size(); ++t) {
        q_max = std::max(q_max, q[t]);
        const double observed = windowed_return(q, t - 1, config.M);
        state.push(observed, trend(q, t - 1, config.tau), config.history_cap);
        state.current_trend = trend(q, t, config.tau);
        if (t < start) continue;

        state = learn_step(std::move(state), config);
        if (t == start) {
            p = q[t];
            m_prev = observed;
        }
        const double m_input = mode == PredictionMode::observed_return ? observed : m_prev;
        const Observables obs = predict_step(m_input, state, state.current_trend, config.model);

        TraceRecord rec;
        rec.t = series.ticks()[t].index;
        rec.q = q[t];
        rec.p = p;
        rec.m = obs.m;
        rec.a = obs.a;
        rec.J = state.params.J;
        rec.h = state.params.h;
        rec.mu = config.model == SpinModel::ising ? std::numeric_limits<double>::infinity() : state.params.mu;
        rec.eps = error_metric(q[t], p, q_max);
        trace.records.push_back(rec);

        p = p + obs.m;
        m_prev = obs.m;
    }
    return trace;
}

template <typename T>
T field_value(std::string_view text, std::size_t line) {
    T out{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("bad trace value '" + std::string(text) + "' at line " + std::to_string(line));
    }
    return out;
}

}  // namespace

PredictionMode parse_prediction_mode(std::string_view name) {
    if (name == "observed" || name == "observed_return" || name == "observed-return") {
        return PredictionMode::observed_return;
    }
    if (name == "recursive") return PredictionMode::recursive;
    throw std::invalid_argument("prediction mode must be recursive or observed, got '" + std::string(name) + "'");
}

std::string to_string(PredictionMode mode) {
    return mode == PredictionMode::recursive ? "recursive" : "observed_return";
}

Observables predict_step(double m_input, const LearningState& state, double sigma, SpinModel model) {
    if (model == SpinModel::ising) {
        if (!std::isfinite(m_input) || !std::isfinite(sigma)) throw std::invalid_argument("non-finite input");
        return {std::tanh(state.params.J * m_input + state.params.h * sigma), 1.0};
    }
    return rhs_observables(m_input, state.params, FieldSignal{sigma});
}

double error_metric(double q, double p, double q_max) {
    if (!(q_max > 0.0)) throw std::invalid_argument("q_max must be positive");
    const double d = q - p;
    return d * d / q_max;
}

std::size_t warmup_length(const LearningConfig& config) {
    return static_cast<std::size_t>(config.tau) + static_cast<std::size_t>(config.M) + 1;
}

PredictionTrace run_prediction(const PriceSeries& series, const LearningConfig& config, PredictionMode mode) {
    return run_loop(series, config, mode);
}

PredictionTrace run_baseline_ising(const PriceSeries& series, const LearningConfig& config, PredictionMode mode) {
    LearningConfig baseline = config;
    baseline.model = SpinModel::ising;
    return run_loop(series, baseline, mode);
}

std::string render_trace_csv(const PredictionTrace& trace, const std::string& comment) {
    std::string out = "# rfim " + std::string(kVersion) + " model=" + to_string(trace.model) +
                      " mode=" + to_string(trace.mode);
    if (!comment.empty()) out += " " + comment;
    out += "\nt,q,p,m,a,J,h,mu,eps\n";
    for (const auto& r : trace.records) {
        out += std::to_string(r.t);
        for (double v : {r.q, r.p, r.m, r.a, r.J, r.h, r.mu, r.eps}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::string render_trace_jsonl(const PredictionTrace& trace) {
    std::string out;
    for (const auto& r : trace.records) {
        nlohmann::ordered_json j;
        j["t"] = r.t;
        j["q"] = r.q;
        j["p"] = r.p;
        j["m"] = r.m;
        j["a"] = r.a;
        j["J"] = r.J;
        j["h"] = r.h;
        j["mu"] = std::isfinite(r.mu) ? nlohmann::ordered_json(r.mu) : nlohmann::ordered_json(nullptr);
        j["eps"] = r.eps;
        out += j.dump() + "\n";
    }
    return out;
}

PredictionTrace parse_trace_csv(std::string_view text) {
    PredictionTrace trace;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            if (line.find("model=ising") != std::string::npos) trace.model = SpinModel::ising;
            if (line.find("mode=recursive") != std::string::npos) trace.mode = PredictionMode::recursive;
            continue;
        }
        if (!header) {
            if (line != "t,q,p,m,a,J,h,mu,eps") throw std::invalid_argument("unexpected trace header");
            header = true;
            continue;
        }
        std::vector<std::string_view> f;
        std::string_view rest(line);
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
            f.push_back(rest.substr(0, pos));
        }
        f.push_back(rest);
        if (f.size() != 9) throw std::invalid_argument("trace row needs 9 fields at line " + std::to_string(line_no));
        TraceRecord r;
        r.t = field_value<std::int64_t>(f[0], line_no);
        double* slots[] = {&r.q, &r.p, &r.m, &r.a, &r.J, &r.h, &r.mu, &r.eps};
        for (std::size_t i = 0; i < 8; ++i) *slots[i] = field_value<double>(f[i + 1], line_no);
        trace.records.push_back(r);
    }
    return trace;
}

}  // namespace rfim
