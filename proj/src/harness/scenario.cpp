#include "fog/harness/scenario.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace fog::harness {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(ParameterSet p)
{
    return p == ParameterSet::PaperTable ? "paper-table" : "desk-feasible";
}

std::string to_string(AgentKind a)
{
    switch (a) {
    case AgentKind::DRQN: return "drqn";
    case AgentKind::DCQN: return "dcqn";
    case AgentKind::DQN: return "dqn";
    case AgentKind::Baseline: return "baseline";
    }
    return "?";
}

ParameterSet parameter_set_from_string(const std::string& s)
{
    if (s == "paper-table")
        return ParameterSet::PaperTable;
    if (s == "desk-feasible")
        return ParameterSet::DeskFeasible;
    throw std::invalid_argument("unknown parameter set '" + s + "' (paper-table|desk-feasible)");
}

AgentKind agent_kind_from_string(const std::string& s)
{
    if (s == "drqn")
        return AgentKind::DRQN;
    if (s == "dcqn")
        return AgentKind::DCQN;
    if (s == "dqn")
        return AgentKind::DQN;
    if (s == "baseline")
        return AgentKind::Baseline;
    throw std::invalid_argument("unknown agent '" + s + "' (drqn|dcqn|dqn|baseline)");
}

ParameterPreset preset(ParameterSet p)
{
    if (p == ParameterSet::PaperTable)
        return {5e6, 1.0, 10, 1e4};
    return {5e4, 5.0, 1, 150.0};
}

namespace {

struct ResourceType
{
    const char* name;
    double cpu_density;
    double mem_mb;
};

constexpr ResourceType standard{"standard", 400, 400};
constexpr ResourceType cpu_heavy{"cpu", 600, 400};
constexpr ResourceType mem_heavy{"memory", 200, 1200};

struct DelayClass
{
    const char* name;
    double budget_ms;
};

constexpr DelayClass critical{"critical", 10};
constexpr DelayClass sensitive{"sensitive", 50};
constexpr DelayClass tolerant{"tolerant", 100};

} // namespace

std::vector<sim::SliceSpec> case_slices(int scenario_case, int count, double packet_bits, int buffer_cap,
                                        double arrival_rate, double overflow_weight)
{
    std::vector<std::pair<ResourceType, DelayClass>> cells;
    switch (scenario_case) {
    case 1: cells = {{standard, critical}, {cpu_heavy, critical}, {mem_heavy, critical}}; break;
    case 2: cells = {{standard, critical}, {standard, sensitive}, {standard, tolerant}}; break;
    case 3: cells = {{standard, critical}, {cpu_heavy, critical}, {standard, sensitive}}; break;
    default: throw std::invalid_argument("case must be 1, 2 or 3");
    }
    if (count < 1 || count > 3)
        throw std::invalid_argument("slice count must be 1..3");
    std::vector<sim::SliceSpec> out;
    for (int k = 0; k < count; ++k) {
        const auto& [res, delay] = cells[static_cast<std::size_t>(k)];
        sim::SliceSpec s;
        s.name = std::string(res.name) + "-" + delay.name;
        s.packet_bits = packet_bits;
        s.delay_budget_ms = delay.budget_ms;
        s.cpu_density = res.cpu_density;
        s.mem_demand_mb = res.mem_mb;
        s.arrival_rate = arrival_rate;
        s.overflow_weight = overflow_weight;
        s.buffer_cap = buffer_cap;
        out.push_back(s);
    }
    return out;
}

double ScenarioConfig::traffic_rate() const
{
    if (lambda)
        return *lambda;
    if (traffic == "normal")
        return 0.6;
    if (traffic == "heavy")
        return 0.8;
    throw std::invalid_argument("traffic must be normal or heavy");
}

void ScenarioConfig::validate() const
{
    if (nodes < 1 || iterations < 0 || feedback_delay < 0 || episode_length < 1 || metrics_window < 1 ||
        curve_block < 1)
        throw std::invalid_argument("scenario: counts must be positive (iterations may be 0)");
    const double rate = traffic_rate();
    if (!(rate >= 0.0 && rate <= 1.0))
        throw std::invalid_argument("scenario: arrival rate must be in [0,1]");
    if (!(buffer_threshold > 0.0 && buffer_threshold <= 1.0))
        throw std::invalid_argument("scenario: buffer threshold must be in (0,1]");
    if (!(area_m > 0.0 && cloud_distance_m.value_or(1.0) > 0.0 && cloud_cpu_unit_ghz > 0.0))
        throw std::invalid_argument("scenario: area, cloud distance and cloud speed must be positive");
}

sim::NetworkConfig ScenarioConfig::network() const
{
    validate();
    const auto p = preset(params);
    const double slot = slot_ms.value_or(p.slot_ms);
    const int cap = buffer_cap.value_or(p.buffer_cap);
    const double bits = packet_bits.value_or(p.packet_bits);

    sim::NetworkConfig c;
    c.slices = case_slices(scenario_case, slices, bits, cap, traffic_rate(), overflow_weight);
    c.arrival_rates = arrival_rates;

    static constexpr double mem_choices_mb[] = {2400, 4000, 8000};
    Rng topo(mix_seed(seed, 0x70));
    for (int i = 0; i < nodes; ++i) {
        sim::NodeSpec n;
        n.position = {topo.uniform(0.0, area_m), topo.uniform(0.0, area_m)};
        n.cpu_capacity_hz = static_cast<double>(5 + topo.below(6)) * 1e9;
        n.mem_capacity_mb = mem_choices_mb[topo.below(3)];
        n.cpu_unit_hz = 1e9;
        n.mem_unit_mb = 400;
        n.bandwidth_hz = 1e6;
        n.tx_power_w = 0.1;
        c.nodes.push_back(n);
    }
    c.cloud.position = {area_m / 2 + cloud_distance_m.value_or(p.cloud_distance_m), area_m / 2};
    c.cloud.cpu_unit_hz = cloud_cpu_unit_ghz * 1e9;
    c.cloud.mem_unit_mb = 400;
    c.channel.slot_ms = slot;
    c.seed = mix_seed(seed, 0x5e);
    c.validate();
    return c;
}

ordered_json to_json(const ScenarioConfig& c)
{
    ordered_json j;
    j["nodes"] = c.nodes;
    j["slices"] = c.slices;
    j["case"] = c.scenario_case;
    j["traffic"] = c.traffic;
    j["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
    j["arrival_rates"] = c.arrival_rates;
    j["seed"] = c.seed;
    j["iterations"] = c.iterations;
    j["agent"] = to_string(c.agent);
    j["alloc"] = std::string(baselines::to_string(c.alloc));
    j["buffer_threshold"] = c.buffer_threshold;
    j["params"] = to_string(c.params);
    j["packet_bits"] = c.packet_bits ? json(*c.packet_bits) : json(nullptr);
    j["slot_ms"] = c.slot_ms ? json(*c.slot_ms) : json(nullptr);
    j["buffer_cap"] = c.buffer_cap ? json(*c.buffer_cap) : json(nullptr);
    j["overflow_weight"] = c.overflow_weight;
    j["area_m"] = c.area_m;
    j["cloud_distance_m"] = c.cloud_distance_m ? json(*c.cloud_distance_m) : json(nullptr);
    j["cloud_cpu_unit_ghz"] = c.cloud_cpu_unit_ghz;
    j["feedback_delay"] = c.feedback_delay;
    j["episode_length"] = c.episode_length;
    j["metrics_window"] = c.metrics_window;
    j["curve_block"] = c.curve_block;
    j["normalize_obs"] = c.normalize_obs;
    j["checkpoint_every"] = c.checkpoint_every;

    const auto& a = c.agent_config;
    ordered_json l;
    l["gamma"] = a.gamma;
    l["lr"] = a.adam.lr;
    l["batch"] = a.batch;
    l["target_sync"] = a.target_sync;
    l["learn_start"] = a.learn_start;
    l["seq"] = a.seq;
    l["replay_capacity"] = a.replay_capacity;
    l["eps_start"] = a.epsilon.start;
    l["eps_min"] = a.epsilon.min;
    l["eps_renewal_period"] = a.epsilon.renewal_period;
    l["eps_renewal_factor"] = a.epsilon.renewal_factor;
    l["eps_rule"] = a.epsilon.rule == agents::DecayRule::ReachFloor ? "reach-floor" : "log-ratio";
    l["clip_norm"] = a.clip_norm;
    l["conv1"] = a.sizes.conv1;
    l["conv2"] = a.sizes.conv2;
    l["recurrent"] = a.sizes.recurrent;
    l["hidden"] = a.sizes.hidden;
    l["mlp"] = a.sizes.mlp;
    j["learning"] = l;
    return j;
}

namespace {

template <class T>
void take(const json& j, const char* key, T& out, std::set<std::string>& seen)
{
    seen.insert(key);
    if (j.contains(key) && !j.at(key).is_null())
        out = j.at(key).get<T>();
}

template <class T>
void take_opt(const json& j, const char* key, std::optional<T>& out, std::set<std::string>& seen)
{
    seen.insert(key);
    if (j.contains(key) && !j.at(key).is_null())
        out = j.at(key).get<T>();
}

void reject_unknown(const json& j, const std::set<std::string>& seen, const std::string& where)
{
    for (const auto& [k, v] : j.items())
        if (!seen.count(k))
            throw std::invalid_argument("unknown key '" + k + "' in " + where);
}

} // namespace

ScenarioConfig scenario_from_json(const json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("scenario must be a JSON object");
    ScenarioConfig c;
    std::set<std::string> seen;
    take(j, "nodes", c.nodes, seen);
    take(j, "slices", c.slices, seen);
    take(j, "case", c.scenario_case, seen);
    take(j, "traffic", c.traffic, seen);
    take_opt(j, "lambda", c.lambda, seen);
    take(j, "arrival_rates", c.arrival_rates, seen);
    take(j, "seed", c.seed, seen);
    take(j, "iterations", c.iterations, seen);
    std::string agent = to_string(c.agent), alloc(baselines::to_string(c.alloc)), params = to_string(c.params);
    take(j, "agent", agent, seen);
    take(j, "alloc", alloc, seen);
    take(j, "params", params, seen);
    c.agent = agent_kind_from_string(agent);
    c.alloc = baselines::alloc_rule_from_string(alloc);
    c.params = parameter_set_from_string(params);
    take(j, "buffer_threshold", c.buffer_threshold, seen);
    take_opt(j, "packet_bits", c.packet_bits, seen);
    take_opt(j, "slot_ms", c.slot_ms, seen);
    take_opt(j, "buffer_cap", c.buffer_cap, seen);
    take(j, "overflow_weight", c.overflow_weight, seen);
    take(j, "area_m", c.area_m, seen);
    take_opt(j, "cloud_distance_m", c.cloud_distance_m, seen);
    take(j, "cloud_cpu_unit_ghz", c.cloud_cpu_unit_ghz, seen);
    take(j, "feedback_delay", c.feedback_delay, seen);
    take(j, "episode_length", c.episode_length, seen);
    take(j, "metrics_window", c.metrics_window, seen);
    take(j, "curve_block", c.curve_block, seen);
    take(j, "normalize_obs", c.normalize_obs, seen);
    take(j, "checkpoint_every", c.checkpoint_every, seen);

    seen.insert("learning");
    if (j.contains("learning")) {
        const json& l = j.at("learning");
        auto& a = c.agent_config;
        std::set<std::string> ls;
        take(l, "gamma", a.gamma, ls);
        take(l, "lr", a.adam.lr, ls);
        take(l, "batch", a.batch, ls);
        take(l, "target_sync", a.target_sync, ls);
        take(l, "learn_start", a.learn_start, ls);
        take(l, "seq", a.seq, ls);
        take(l, "replay_capacity", a.replay_capacity, ls);
        take(l, "eps_start", a.epsilon.start, ls);
        take(l, "eps_min", a.epsilon.min, ls);
        take(l, "eps_renewal_period", a.epsilon.renewal_period, ls);
        take(l, "eps_renewal_factor", a.epsilon.renewal_factor, ls);
        std::string rule = a.epsilon.rule == agents::DecayRule::ReachFloor ? "reach-floor" : "log-ratio";
        take(l, "eps_rule", rule, ls);
        if (rule == "reach-floor")
            a.epsilon.rule = agents::DecayRule::ReachFloor;
        else if (rule == "log-ratio")
            a.epsilon.rule = agents::DecayRule::LogRatio;
        else
            throw std::invalid_argument("eps_rule must be reach-floor or log-ratio");
        take(l, "clip_norm", a.clip_norm, ls);
        take(l, "conv1", a.sizes.conv1, ls);
        take(l, "conv2", a.sizes.conv2, ls);
        take(l, "recurrent", a.sizes.recurrent, ls);
        take(l, "hidden", a.sizes.hidden, ls);
        take(l, "mlp", a.sizes.mlp, ls);
        reject_unknown(l, ls, "learning");
    }
    reject_unknown(j, seen, "scenario");
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return scenario_from_json(j);
}

} // namespace fog::harness
