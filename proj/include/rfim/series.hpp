// Price series: CSV ingestion, validation, resampling and synthetic scenarios.
#ifndef RFIM_SERIES_HPP
#define RFIM_SERIES_HPP

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rfim {

struct Tick {
    std::int64_t index = 0;
    double price = 0.0;
};

/// Ordered price observations q(t). Indices strictly increase, prices are
/// finite and positive, and there are at least two ticks.
class PriceSeries {
public:
    PriceSeries() = default;
    PriceSeries(std::vector<Tick> ticks, std::string source = {}, std::string tick_label = "tick");

    /// Convenience constructor with indices 0..n-1.
    static PriceSeries from_prices(const std::vector<double>& prices, std::string source = {});

    std::size_t size() const { return ticks_.size(); }
    double price(std::size_t i) const { return ticks_.at(i).price; }
    const std::vector<Tick>& ticks() const { return ticks_; }
    std::vector<double> prices() const;

    const std::string& source() const { return source_; }
    const std::string& tick_label() const { return tick_label_; }

private:
    std::vector<Tick> ticks_;
    std::string source_;
    std::string tick_label_ = "tick";
};

/// Parse failure carrying the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line) : std::runtime_error(what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Reads "t,price" or "timestamp,price" CSV. Lines starting with '#' and blank
/// lines are skipped. ISO-8601 timestamps become 0-based ticks in file order.
PriceSeries parse_csv(std::istream& in, std::string source = "csv");
PriceSeries parse_csv_text(std::string_view text, std::string source = "csv");
PriceSeries read_csv_file(const std::string& path);

/// "t,price" CSV, 17 significant digits, optionally preceded by a comment line.
std::string render_csv(const PriceSeries& series, const std::string& comment = {});

/// Keeps the last price of every `stride` consecutive ticks, reindexed from 0.
PriceSeries resample(const PriceSeries& series, std::size_t stride);

enum class ScenarioKind { constant, linear, sine, crash };

ScenarioKind parse_scenario_kind(std::string_view name);
std::string to_string(ScenarioKind kind);

/// Scenario parameters. Fractions are relative to `length` or `level`.
/// Unset crash fields take the defaults: crash at 40% of the length, a drop of
/// 5% of the level over 2% of the length, noise 0.05% of the level and a
/// random-walk component with per-tick steps of 0.02% of the level.
struct ScenarioParams {
    double level = 100.0;
    double slope = 0.0;       ///< linear: price change per tick
    double amplitude = 1.0;   ///< sine
    double period = 100.0;    ///< sine, in ticks
    std::optional<double> crash_at;     ///< crash start, as a fraction of length
    std::optional<double> crash_width;  ///< ticks over which the drop happens, fraction of length
    std::optional<double> depth;        ///< total drop, fraction of level
    double recovery_drift = 1e-5;       ///< crash: per-tick drift after the drop, fraction of level
    std::optional<double> noise;        ///< Gaussian noise sd, fraction of level (crash default 5e-4, else 0)
    std::optional<double> walk;         ///< random-walk step sd per tick, fraction of level (crash default 2e-4, else 0)
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::constant;
    std::size_t length = 0;
    ScenarioParams params;
    std::uint64_t seed = 0;
};

/// Deterministic synthetic series; pure function of the scenario.
PriceSeries generate_synthetic(ScenarioKind kind, std::size_t length, const ScenarioParams& params,
                               std::uint64_t seed);
PriceSeries generate_synthetic(const Scenario& scenario);

/// Tick where the crash begins and ends for the given scenario.
std::pair<std::size_t, std::size_t> crash_window(std::size_t length, const ScenarioParams& params);

}  // namespace rfim

#endif  // RFIM_SERIES_HPP
