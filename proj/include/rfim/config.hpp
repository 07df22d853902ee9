// JSON documents for learning configs and synthetic scenarios.
#ifndef RFIM_CONFIG_HPP
#define RFIM_CONFIG_HPP

#include <string>

#include "json.hpp"
#include "rfim/learning.hpp"
#include "rfim/series.hpp"

namespace rfim {

/// Keys: eta, tau, M, J0, h0, mu0, grad_steps_per_tick, history_cap (null or
/// positive), sigma_mode ("per_term" | "literal"), learn_mu. Missing keys keep
/// their defaults; when "tau" is given without "M", M follows tau.
LearningConfig learning_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const LearningConfig& config);

/// Keys: kind, length, seed, level, slope, amplitude, period, crash_at,
/// crash_width, depth, recovery_drift, noise, walk.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const Scenario& scenario);

nlohmann::json read_json_file(const std::string& path);

}  // namespace rfim

#endif  // RFIM_CONFIG_HPP
