#include "shmopt/presets.hpp"

#include "shmopt/serialize.hpp"

namespace shmopt {

namespace {

using nlohmann::json;

json sweep_preset(const json& control_set, const json& penalty) {
    return json{
        {"control_set", control_set},
        {"harmonics", {{"cos", {1, 5, 7, 11, 13}}, {"sin", {1, 5, 7, 11, 13}}}},
        {"m_pattern", {{"a", {1, 0, 0, 0, 0}}, {"b", {1, 0, 0, 0, 0}}}},
        {"m", 0.5},
        {"m_values", {{"from", -0.8}, {"to", 0.8}, {"step", 0.05}}},
        {"penalty", penalty},
        {"grid", {{"n", 630}}},
        {"warm_start", true},
        {"seed", 1},
    };
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig6-bilevel", "fig6-bang-off-bang", "fig6-multilevel5", "fig8-counterexample",
            "fig2-baseline"};
}

nlohmann::json preset_config(const std::string& name) {
    if (name == "fig6-bilevel") {
        return sweep_preset(json::array({-1, 1}),
                            json{{"mode", "linear"}, {"alpha", 1.0}, {"beta", 0.0},
                                 {"epsilon", 1e-5}, {"theta", 1e5}});
    }
    if (name == "fig6-bang-off-bang") {
        return sweep_preset(json::array({-1, 0, 1}),
                            json{{"mode", "piecewise_affine"}, {"alpha", 1.0}, {"beta", 0.0},
                                 {"epsilon", 1e-5}, {"theta", 1e5}});
    }
    if (name == "fig6-multilevel5") {
        return sweep_preset(json::array({-1, -0.5, 0, 0.5, 1}),
                            json{{"mode", "piecewise_affine"}, {"alpha", 1.0}, {"beta", 0.0},
                                 {"epsilon", 1e-5}, {"theta", 1e5}});
    }
    if (name == "fig8-counterexample") {
        return sweep_preset(json::array({-1, -0.6, -0.2, 0.2, 0.6, 1}),
                            json{{"mode", "piecewise_affine"}, {"alpha", 1.0}, {"beta", 0.0},
                                 {"epsilon", 1e-5}, {"theta", 1e5}});
    }
    if (name == "fig2-baseline") {
        return json{
            {"control_set", {-1, 1}},
            {"harmonics", {{"cos", json::array({1})}, {"sin", json::array({1})}}},
            {"switches", 3},
            {"m_pattern", {{"a", json::array({0})}, {"b", json::array({1})}}},
            {"m_values", {{"from", 0.0}, {"to", 1.3}, {"step", 0.1}}},
            {"restarts", 50},
            {"seed", 1},
        };
    }
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace shmopt
