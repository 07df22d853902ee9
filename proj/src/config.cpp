#include "rfim/config.hpp"

#include <fstream>
#include <stdexcept>

namespace rfim {

namespace {

const std::initializer_list<const char*> kLearningKeys = {
    "eta", "tau", "M", "J0", "h0", "mu0", "grad_steps_per_tick", "history_cap", "sigma_mode", "learn_mu"};

const std::initializer_list<const char*> kScenarioKeys = {
    "kind", "length", "seed", "level", "slope", "amplitude", "period",
    "crash_at", "crash_width", "depth", "recovery_drift", "noise", "walk"};

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const char* what) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool found = false;
        for (const char* k : known) found = found || key == k;
        if (!found) throw std::invalid_argument(std::string("unknown ") + what + " key '" + key + "'");
    }
}

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void read_optional(const nlohmann::json& j, const char* key, std::optional<double>& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<double>();
}

}  // namespace

LearningConfig learning_config_from_json(const nlohmann::json& j) {
    reject_unknown(j, kLearningKeys, "learning config");
    LearningConfig c;
    try {
        read_if(j, "eta", c.eta);
        read_if(j, "tau", c.tau);
        c.M = c.tau;
        read_if(j, "M", c.M);
        read_if(j, "J0", c.init.J);
        read_if(j, "h0", c.init.h);
        read_if(j, "mu0", c.init.mu);
        read_if(j, "grad_steps_per_tick", c.grad_steps_per_tick);
        read_if(j, "learn_mu", c.learn_mu);
        if (j.contains("history_cap") && !j.at("history_cap").is_null()) {
            const auto cap = j.at("history_cap").get<long long>();
            if (cap < 1) throw std::invalid_argument("history_cap must be >= 1");
            c.history_cap = static_cast<std::size_t>(cap);
        }
        if (j.contains("sigma_mode")) c.sigma_mode = parse_sigma_mode(j.at("sigma_mode").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("learning config: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::ordered_json to_json(const LearningConfig& c) {
    nlohmann::ordered_json j;
    j["eta"] = c.eta;
    j["tau"] = c.tau;
    j["M"] = c.M;
    j["J0"] = c.init.J;
    j["h0"] = c.init.h;
    j["mu0"] = c.init.mu;
    j["grad_steps_per_tick"] = c.grad_steps_per_tick;
    j["history_cap"] = c.history_cap ? nlohmann::ordered_json(*c.history_cap) : nlohmann::ordered_json(nullptr);
    j["sigma_mode"] = to_string(c.sigma_mode);
    j["learn_mu"] = c.learn_mu;
    return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
    reject_unknown(j, kScenarioKeys, "scenario");
    Scenario s;
    try {
        if (!j.contains("kind") || !j.contains("length")) throw std::invalid_argument("scenario needs kind and length");
        s.kind = parse_scenario_kind(j.at("kind").get<std::string>());
        const auto length = j.at("length").get<long long>();
        if (length < 2) throw std::invalid_argument("scenario length must be >= 2");
        s.length = static_cast<std::size_t>(length);
        read_if(j, "seed", s.seed);
        read_if(j, "level", s.params.level);
        read_if(j, "slope", s.params.slope);
        read_if(j, "amplitude", s.params.amplitude);
        read_if(j, "period", s.params.period);
        read_if(j, "recovery_drift", s.params.recovery_drift);
        read_optional(j, "crash_at", s.params.crash_at);
        read_optional(j, "crash_width", s.params.crash_width);
        read_optional(j, "depth", s.params.depth);
        read_optional(j, "noise", s.params.noise);
        read_optional(j, "walk", s.params.walk);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("scenario: ") + e.what());
    }
    return s;
}

nlohmann::ordered_json to_json(const Scenario& s) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json j;
    j["kind"] = to_string(s.kind);
    j["length"] = s.length;
    j["seed"] = s.seed;
    j["level"] = s.params.level;
    j["slope"] = s.params.slope;
    j["amplitude"] = s.params.amplitude;
    j["period"] = s.params.period;
    j["crash_at"] = opt(s.params.crash_at);
    j["crash_width"] = opt(s.params.crash_width);
    j["depth"] = opt(s.params.depth);
    j["recovery_drift"] = s.params.recovery_drift;
    j["noise"] = opt(s.params.noise);
    j["walk"] = opt(s.params.walk);
    return j;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

}  // namespace rfim
