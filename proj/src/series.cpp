#include "rfim/series.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <utility>

#include "rfim/format.hpp"

namespace rfim {

namespace {

void check_invariants(const std::vector<Tick>& ticks) {
    if (ticks.size() < 2) throw std::invalid_argument("price series needs at least two ticks");
    for (std::size_t i = 0; i < ticks.size(); ++i) {
        if (!std::isfinite(ticks[i].price) || !(ticks[i].price > 0.0)) {
            throw std::invalid_argument("non-positive or non-finite price at tick " + std::to_string(i));
        }
        if (i > 0 && ticks[i].index <= ticks[i - 1].index) {
            throw std::invalid_argument("non-increasing tick index at position " + std::to_string(i));
        }
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    text = trim(text);
    if (text.empty()) return false;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// ISO-8601 "YYYY-MM-DD[THH:MM[:SS[.fff]]][Z|+HH:MM|-HH:MM]" to seconds since epoch.
bool parse_iso8601(std::string_view text, double& seconds) {
    text = trim(text);
    std::string s(text);
    int y = 0, mo = 0, d = 0, hh = 0, mi = 0;
    double sec = 0.0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3 || consumed != 10) return false;
    std::size_t pos = 10;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
        int n = 0;
        if (std::sscanf(s.c_str() + pos + 1, "%2d:%2d%n", &hh, &mi, &n) != 2 || n != 5) return false;
        pos += 1 + static_cast<std::size_t>(n);
        if (pos < s.size() && s[pos] == ':') {
            std::size_t end = pos + 1;
            while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.')) ++end;
            if (!parse_number(std::string_view(s).substr(pos + 1, end - pos - 1), sec)) return false;
            pos = end;
        }
    }
    double offset = 0.0;
    if (pos < s.size()) {
        if (s[pos] == 'Z' && pos + 1 == s.size()) {
            pos += 1;
        } else if ((s[pos] == '+' || s[pos] == '-') && s.size() - pos == 6 && s[pos + 3] == ':') {
            int oh = 0, om = 0;
            if (std::sscanf(s.c_str() + pos + 1, "%2d:%2d", &oh, &om) != 2) return false;
            offset = (s[pos] == '+' ? 1.0 : -1.0) * (oh * 3600.0 + om * 60.0);
            pos = s.size();
        } else {
            return false;
        }
    }
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mi > 59 || sec < 0.0 || sec >= 61.0) return false;
    const auto days = sys_days{ymd}.time_since_epoch().count();
    seconds = static_cast<double>(days) * 86400.0 + hh * 3600.0 + mi * 60.0 + sec - offset;
    return true;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

PriceSeries::PriceSeries(std::vector<Tick> ticks, std::string source, std::string tick_label)
    : ticks_(std::move(ticks)), source_(std::move(source)), tick_label_(std::move(tick_label)) {
    check_invariants(ticks_);
}

PriceSeries PriceSeries::from_prices(const std::vector<double>& prices, std::string source) {
    std::vector<Tick> ticks(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) ticks[i] = {static_cast<std::int64_t>(i), prices[i]};
    return PriceSeries(std::move(ticks), std::move(source));
}

std::vector<double> PriceSeries::prices() const {
    std::vector<double> out(ticks_.size());
    std::transform(ticks_.begin(), ticks_.end(), out.begin(), [](const Tick& t) { return t.price; });
    return out;
}

PriceSeries parse_csv(std::istream& in, std::string source) {
    enum class TimeColumn { tick, timestamp };
    std::optional<TimeColumn> column;
    std::vector<Tick> ticks;
    double last_time = 0.0;
    std::string raw;
    std::size_t line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split_fields(line);
        if (!column) {
            if (fields.size() == 2 && trim(fields[1]) == "price") {
                if (trim(fields[0]) == "t") column = TimeColumn::tick;
                if (trim(fields[0]) == "timestamp") column = TimeColumn::timestamp;
            }
            if (!column) {
                throw ParseError("malformed header at row " + std::to_string(line_no) +
                                     ": expected 't,price' or 'timestamp,price'",
                                 line_no);
            }
            continue;
        }
        const std::string row = std::to_string(line_no);
        if (fields.size() != 2) throw ParseError("expected 2 fields at row " + row, line_no);

        Tick tick;
        double time = 0.0;
        if (*column == TimeColumn::tick) {
            if (!parse_number(fields[0], tick.index)) throw ParseError("bad tick at row " + row, line_no);
            time = static_cast<double>(tick.index);
        } else {
            if (!parse_iso8601(fields[0], time)) throw ParseError("bad timestamp at row " + row, line_no);
            tick.index = static_cast<std::int64_t>(ticks.size());
        }
        if (!ticks.empty() && !(time > last_time)) {
            throw ParseError("non-increasing tick at row " + row, line_no);
        }
        if (!parse_number(fields[1], tick.price) || !std::isfinite(tick.price)) {
            throw ParseError("non-numeric price at row " + row, line_no);
        }
        if (!(tick.price > 0.0)) throw ParseError("non-positive price at row " + row, line_no);
        last_time = time;
        ticks.push_back(tick);
    }
    if (!column) throw ParseError("missing header", line_no);
    if (ticks.size() < 2) throw ParseError("fewer than 2 data rows", line_no);
    return PriceSeries(std::move(ticks), std::move(source));
}

PriceSeries parse_csv_text(std::string_view text, std::string source) {
    std::istringstream in{std::string(text)};
    return parse_csv(in, std::move(source));
}

PriceSeries read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_csv(in, path);
}

std::string render_csv(const PriceSeries& series, const std::string& comment) {
    std::string out;
    if (!comment.empty()) out += "# " + comment + "\n";
    out += "t,price\n";
    for (const auto& t : series.ticks()) {
        out += std::to_string(t.index) + "," + format_double(t.price) + "\n";
    }
    return out;
}

PriceSeries resample(const PriceSeries& series, std::size_t stride) {
    if (stride == 0) throw std::invalid_argument("resample stride must be positive");
    std::vector<Tick> out;
    for (std::size_t end = stride; end <= series.size(); end += stride) {
        out.push_back({static_cast<std::int64_t>(out.size()), series.price(end - 1)});
    }
    return PriceSeries(std::move(out), series.source(), series.tick_label() + "x" + std::to_string(stride));
}

ScenarioKind parse_scenario_kind(std::string_view name) {
    if (name == "constant") return ScenarioKind::constant;
    if (name == "linear") return ScenarioKind::linear;
    if (name == "sine") return ScenarioKind::sine;
    if (name == "crash") return ScenarioKind::crash;
    throw std::invalid_argument("unknown scenario kind '" + std::string(name) + "'");
}

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::constant: return "constant";
        case ScenarioKind::linear: return "linear";
        case ScenarioKind::sine: return "sine";
        case ScenarioKind::crash: return "crash";
    }
    return "unknown";
}

std::pair<std::size_t, std::size_t> crash_window(std::size_t length, const ScenarioParams& params) {
    const double at = params.crash_at.value_or(0.4);
    const double width = params.crash_width.value_or(0.02);
    if (!(at >= 0.0 && at <= 1.0) || !(width > 0.0 && width <= 1.0)) {
        throw std::invalid_argument("crash position and width must be fractions of the length");
    }
    const auto start = static_cast<std::size_t>(std::llround(at * static_cast<double>(length)));
    const auto w = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(width * static_cast<double>(length))));
    return {start, start + w};
}

PriceSeries generate_synthetic(ScenarioKind kind, std::size_t length, const ScenarioParams& params,
                               std::uint64_t seed) {
    if (length < 2) throw std::invalid_argument("synthetic series needs length >= 2");
    if (!std::isfinite(params.level) || !(params.level > 0.0)) throw std::invalid_argument("level must be positive");
    const double noise_frac = params.noise.value_or(kind == ScenarioKind::crash ? 5e-4 : 0.0);
    if (!std::isfinite(noise_frac) || noise_frac < 0.0) throw std::invalid_argument("noise must be non-negative");
    const double walk_frac = params.walk.value_or(kind == ScenarioKind::crash ? 2e-4 : 0.0);
    if (!std::isfinite(walk_frac) || walk_frac < 0.0) throw std::invalid_argument("walk must be non-negative");
    if (kind == ScenarioKind::sine && !(params.period > 0.0)) throw std::invalid_argument("sine period must be positive");

    std::size_t crash_start = 0;
    std::size_t crash_end = 0;
    double drop = 0.0;
    if (kind == ScenarioKind::crash) {
        std::tie(crash_start, crash_end) = crash_window(length, params);
        const double depth = params.depth.value_or(0.05);
        if (!std::isfinite(depth) || depth < 0.0 || depth >= 1.0) throw std::invalid_argument("crash depth must be in [0, 1)");
        drop = depth * params.level;
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double noise_sd = noise_frac * params.level;
    const double walk_sd = walk_frac * params.level;
    double walk = 0.0;

    std::vector<double> prices(length);
    for (std::size_t t = 0; t < length; ++t) {
        const double x = static_cast<double>(t);
        double q = params.level;
        switch (kind) {
            case ScenarioKind::constant: break;
            case ScenarioKind::linear: q += params.slope * x; break;
            case ScenarioKind::sine: q += params.amplitude * std::sin(2.0 * M_PI * x / params.period); break;
            case ScenarioKind::crash: {
                const double width = static_cast<double>(crash_end - crash_start);
                const double progress = std::clamp((x - static_cast<double>(crash_start)) / width, 0.0, 1.0);
                q -= drop * progress;
                if (t > crash_end) q += params.recovery_drift * params.level * static_cast<double>(t - crash_end);
                break;
            }
        }
        if (walk_sd > 0.0 && t > 0) walk += walk_sd * gauss(rng);
        q += walk;
        if (noise_sd > 0.0) q += noise_sd * gauss(rng);
        prices[t] = q;
    }
    for (std::size_t t = 0; t < length; ++t) {
        if (!std::isfinite(prices[t]) || !(prices[t] > 0.0)) {
            throw std::invalid_argument("scenario produces a non-positive price at tick " + std::to_string(t));
        }
    }
    return PriceSeries::from_prices(prices, "synthetic:" + to_string(kind));
}

PriceSeries generate_synthetic(const Scenario& scenario) {
    return generate_synthetic(scenario.kind, scenario.length, scenario.params, scenario.seed);
}

}  // namespace rfim
