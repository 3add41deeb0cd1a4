#pragma once

#include "fog/agents/deep_q.hpp"
#include "fog/baselines/baselines.hpp"
#include "fog/sim/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fog::harness {

enum class ParameterSet
{
    PaperTable,
    DeskFeasible
};

enum class AgentKind
{
    DRQN,
    DCQN,
    DQN,
    Baseline
};

std::string to_string(ParameterSet p);
std::string to_string(AgentKind a);
ParameterSet parameter_set_from_string(const std::string& s);
AgentKind agent_kind_from_string(const std::string& s);

/// Per-set defaults for the quantities the two bundled parameter sets disagree on.
struct ParameterPreset
{
    double packet_bits;
    double slot_ms;
    int buffer_cap;
    double cloud_distance_m;
};
ParameterPreset preset(ParameterSet p);

/// Everything one run needs. Optional fields fall back to the parameter set.
struct ScenarioConfig
{
    int nodes = 5;
    int slices = 3;
    int scenario_case = 2;
    std::string traffic = "normal";
    // overrides the traffic level when set
    std::optional<double> lambda;
    // per [node][slice], overrides both
    std::vector<std::vector<double>> arrival_rates;
    std::uint64_t seed = 1;
    std::int64_t iterations = 30000;
    AgentKind agent = AgentKind::DRQN;
    baselines::AllocRule alloc = baselines::AllocRule::RoundRobin;
    double buffer_threshold = 0.8;
    ParameterSet params = ParameterSet::DeskFeasible;

    std::optional<double> packet_bits;
    std::optional<double> slot_ms;
    std::optional<int> buffer_cap;
    double overflow_weight = 1.0;
    double area_m = 100.0;
    std::optional<double> cloud_distance_m;
    double cloud_cpu_unit_ghz = 10.0;

    int feedback_delay = 0;
    std::int64_t episode_length = 2000;
    std::int64_t metrics_window = 5000;
    std::int64_t curve_block = 500;
    bool normalize_obs = true;
    std::int64_t checkpoint_every = 0;

    agents::AgentConfig agent_config;

    double traffic_rate() const;
    sim::NetworkConfig network() const;
    void validate() const;
};

nlohmann::ordered_json to_json(const ScenarioConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

/// Slice list for case 1..3, first `count` slices.
std::vector<sim::SliceSpec> case_slices(int scenario_case, int count, double packet_bits, int buffer_cap,
                                        double arrival_rate, double overflow_weight);

} // namespace fog::harness
