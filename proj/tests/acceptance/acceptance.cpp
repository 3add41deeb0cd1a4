// One PASS/FAIL line per acceptance criterion. `fog_acceptance [name...]`
// runs a subset; names are the first word of each line.

#include "../unit/fixtures.hpp"

#include "fog/agents/deep_q.hpp"
#include "fog/agents/tabular.hpp"
#include "fog/harness/runner.hpp"
#include "fog/nn/gradcheck.hpp"
#include "fog/nn/layers.hpp"
#include "fog/sim/formulas.hpp"
#include "fog/sim/reward.hpp"
#include "fog/sim/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace fog;
namespace fs = std::filesystem;

namespace {

struct Verdict
{
    bool pass = true;
    std::ostringstream detail;
    std::string failures;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            failures += (pass ? "" : "; ") + what;
            pass = false;
        }
    }
};

bool rel_close(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

std::string fmt(double v, int prec = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

std::string pct(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return buf;
}

// ------------------------------------------------------------------ formulas

sim::NodeSpec radio_node()
{
    return test::fog_node(0.0, 0.0, 5, 4000);
}

sim::ChannelParams radio_channel()
{
    sim::ChannelParams ch;
    ch.noise_psd = 3.981e-21;
    return ch;
}

// Runs one scripted task from arrival to resolution and returns its record.
sim::Resolution scripted_task(sim::NetworkConfig cfg, int route_code)
{
    sim::Simulator sim(cfg);
    const int I = sim.node_count();
    sim.override_arrivals(0, {1});
    for (int i = 1; i < I; ++i)
        sim.override_arrivals(i, {0});
    std::vector<sim::ActionPair> first(static_cast<std::size_t>(I), sim::ActionPair{{0}, {0}});
    first[0].offload = {route_code};
    auto res = sim.step(first);
    for (int t = 1; t < 200 && res.resolved.empty(); ++t) {
        std::vector<sim::ActionPair> acts;
        for (int i = 0; i < I; ++i) {
            const auto obs = sim.observe(i);
            sim::ActionPair a{{0}, {0}};
            // start anything waiting
            a.allocate[0] = std::min(obs.buffer_len[0] - obs.in_progress[0], obs.cpu_avail);
            acts.push_back(a);
        }
        res = sim.step(acts);
    }
    if (res.resolved.size() != 1)
        throw std::runtime_error("scripted task did not resolve");
    return res.resolved[0];
}

Verdict formulas()
{
    Verdict v;
    const auto n = radio_node();
    const auto ch = radio_channel();
    v.require(rel_close(sim::transmission_rate(n, {50.0, 0.0}, 1, ch), 11973012.329143154, 1e-9), "rate n=1");
    v.require(rel_close(sim::transmission_rate(n, {30.0, 40.0}, 2, ch), 6486416.441174723, 1e-9), "rate n=2");
    v.require(sim::transmission_slots(n, {50.0, 0.0}, false, 5e6, 1, ch) == 418, "transmission 418 slots");
    v.require(sim::transmission_slots(n, {50.0, 0.0}, false, 5e4, 1, ch) == 5, "transmission 5 slots");
    v.require(sim::transmission_slots(n, n.position, true, 5e6, 1, ch) == 0, "local transmission 0");

    auto sl = test::standard_slice(10, 0.5);
    sl.packet_bits = 5e6;
    v.require(sim::processing_slots(1e9, sl, ch) == 2000, "processing 2000 slots");
    sl.packet_bits = 5e4;
    v.require(sim::processing_slots(1e9, sl, ch) == 20, "processing 20 slots");

    const std::vector<int> mem_units{1, 1, 3};
    v.require(sim::occupied_resources(std::vector<int>{1, 1, 0}, mem_units) == sim::ResourceUnits{2, 2}, "occupied (2,2)");
    v.require(sim::occupied_resources(std::vector<int>{0, 0, 2}, mem_units) == sim::ResourceUnits{2, 6}, "occupied (2,6)");
    v.require(sim::available_resources({6, 10}, {2, 2}) == sim::ResourceUnits{4, 8}, "available (4,8)");

    std::vector<sim::SliceSpec> three(3, test::standard_slice(10, 0.5));
    const std::vector<sim::OutcomeRecord> one{{0, sim::Outcome::Succeeded}};
    v.require(rel_close(sim::local_reward(one, three), 1.0 / 3.0, 1e-9), "reward +1/3");
    const std::vector<sim::OutcomeRecord> mixed{
        {0, sim::Outcome::Succeeded}, {1, sim::Outcome::TimedOut}, {2, sim::Outcome::Dropped}};
    v.require(rel_close(sim::local_reward(mixed, three), -2.0 / 3.0, 1e-9), "reward -2/3");
    v.require(rel_close(sim::global_reward(std::vector<double>{0.333, -0.667, 0, 0, 0}), -0.334, 1e-9), "global -0.334");

    agents::TabularQ q(3);
    q.row_mut({1})[1] = 2.0;
    const double upd = agents::tabular_q_update(q, {0}, 0, 1.0, {1}, 0.5, 0.98);
    v.require(rel_close(upd, 1.48, 1e-9), "tabular 1.48");

    // latency = transit + wait + processing for local, peer and cloud routes
    auto cfg = test::small_network(2, 1, 0.0);
    cfg.cloud.position = {60.0, 0.0};
    const auto local = scripted_task(cfg, 1);
    v.require(local.outcome == sim::Outcome::Succeeded && local.transit_slots == 0 && local.wait_slots == 1 &&
                  local.processing_slots == 20 && local.latency_slots == 21,
              "local latency 0+1+20");
    const auto peer = scripted_task(cfg, 2);
    v.require(peer.outcome == sim::Outcome::Succeeded && peer.transit_slots == 5 && peer.processing_slots == 20 &&
                  peer.latency_slots == peer.transit_slots + peer.wait_slots + peer.processing_slots,
              "peer latency 5+w+20");
    const auto cloud = scripted_task(cfg, 3);
    const auto cloud_transit = sim::transmission_slots(cfg.nodes[0], cfg.cloud.position, false, 5e4, 1, cfg.channel);
    v.require(cloud.outcome == sim::Outcome::Succeeded && cloud.wait_slots == 0 && cloud.processing_slots == 2 &&
                  cloud.transit_slots == cloud_transit && cloud.latency_slots == cloud_transit + 2,
              "cloud latency t+0+2");
    v.detail << "rates, delays, resources, rewards, tabular update and three latency routes";
    return v;
}

// --------------------------------------------------------------- constraints

// Every action index decoded once: mixed radix with slice 0 least
// significant, offload digits above the allocation digits.
struct DecodeTable
{
    int K = 0;
    std::vector<int> f, w;

    DecodeTable(int I, const std::vector<int>& wmax) : K(static_cast<int>(wmax.size()))
    {
        std::int64_t alloc_count = 1, offload_count = 1;
        for (int m : wmax) {
            alloc_count *= m + 1;
            offload_count *= I + 2;
        }
        for (std::int64_t x = 0; x < alloc_count * offload_count; ++x) {
            std::int64_t off = x / alloc_count, al = x % alloc_count;
            for (int k = 0; k < K; ++k) {
                f.push_back(static_cast<int>(off % (I + 2)));
                off /= I + 2;
                w.push_back(static_cast<int>(al % (wmax[static_cast<std::size_t>(k)] + 1)));
                al /= wmax[static_cast<std::size_t>(k)] + 1;
            }
        }
    }

    std::int64_t size() const { return static_cast<std::int64_t>(f.size()) / K; }

    bool admissible(std::int64_t x, const sim::Observation& o, const std::vector<int>& mem_units) const
    {
        const int* fx = f.data() + x * K;
        const int* wx = w.data() + x * K;
        int cpu = 0, mem = 0;
        for (int k = 0; k < K; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            if ((fx[k] == 0) != (o.arrivals[ku] == 0))
                return false;
            if (wx[k] > o.buffer_len[ku] - o.in_progress[ku])
                return false;
            cpu += wx[k];
            mem += wx[k] * mem_units[ku];
        }
        return cpu <= o.cpu_avail && mem <= o.mem_avail;
    }
};

Verdict constraints()
{
    Verdict v;
    struct Setup
    {
        int nodes, slices, cap;
        double rate, slot_ms;
        std::int64_t slots;
    };
    // 3 * 150000 + 2 * 150000 + 2 * 125000 = 1,000,000 observations
    const std::vector<Setup> setups{{3, 2, 3, 0.7, 1.0, 150000}, {2, 3, 1, 0.8, 2.0, 150000}, {2, 2, 4, 0.9, 1.0, 125000}};
    std::int64_t observations = 0, admitted = 0, violations = 0, disagreements = 0;
    Rng rng(2024);
    for (std::size_t s = 0; s < setups.size(); ++s) {
        const auto& su = setups[s];
        auto cfg = test::small_network(su.nodes, su.slices, su.rate, 40, su.cap, 11 + s);
        cfg.channel.slot_ms = su.slot_ms;
        cfg.nodes[0].cpu_capacity_hz = 3e9;
        cfg.nodes[1].mem_capacity_mb = 1200;
        for (int k = 0; k < su.slices; ++k)
            cfg.slices[static_cast<std::size_t>(k)].mem_demand_mb = 400.0 * (k + 1);
        sim::Simulator sim(cfg);
        std::vector<DecodeTable> tables;
        std::vector<std::vector<int>> mem_units(static_cast<std::size_t>(su.nodes));
        for (int i = 0; i < su.nodes; ++i) {
            tables.emplace_back(su.nodes, sim.action_space(i).max_alloc());
            for (int k = 0; k < su.slices; ++k)
                mem_units[static_cast<std::size_t>(i)].push_back(cfg.mem_units_per_task(i, k));
        }
        for (std::int64_t t = 0; t < su.slots; ++t) {
            std::vector<sim::ActionPair> acts;
            for (int i = 0; i < su.nodes; ++i) {
                const auto obs = sim.observe(i);
                const auto& space = sim.action_space(i);
                const auto mask = space.mask(obs);
                const auto& table = tables[static_cast<std::size_t>(i)];
                if (table.size() != static_cast<std::int64_t>(mask.size()))
                    ++violations;
                std::vector<std::int64_t> valid;
                for (std::int64_t x = 0; x < static_cast<std::int64_t>(mask.size()); ++x) {
                    const bool ok = table.admissible(x, obs, mem_units[static_cast<std::size_t>(i)]);
                    if (mask[static_cast<std::size_t>(x)]) {
                        valid.push_back(x);
                        if (!ok)
                            ++violations;
                    } else if (ok) {
                        ++disagreements;
                    }
                }
                ++observations;
                admitted += static_cast<std::int64_t>(valid.size());
                if (valid.empty()) {
                    ++violations;
                    valid.push_back(space.idle_local_index(obs));
                }
                acts.push_back(space.decode(valid[rng.below(valid.size())]));
            }
            sim.step(acts);
        }
    }
    v.require(observations >= 1000000, "fewer than 10^6 observations");
    v.require(violations == 0, std::to_string(violations) + " admitted actions violate a constraint");
    v.require(disagreements == 0, std::to_string(disagreements) + " valid actions masked out");

    // exhaustive oracle: K=2, I=2, caps <= 2
    std::int64_t states = 0, exhaustive_bad = 0;
    const int I = 2;
    for (int node = 0; node < I; ++node)
        for (int W0 = 0; W0 <= 2; ++W0)
            for (int W1 = 0; W1 <= 2; ++W1)
                for (int m1 = 1; m1 <= 2; ++m1) {
                    const std::vector<int> mu{1, m1};
                    const sim::ActionSpace space(node, I, {W0, W1}, mu);
                    const DecodeTable table(I, {W0, W1});
                    for (int a0 = 0; a0 <= 1; ++a0)
                    for (int a1 = 0; a1 <= 1; ++a1)
                    for (int b0 = 0; b0 <= 2; ++b0)
                    for (int b1 = 0; b1 <= 2; ++b1)
                    for (int e0 = 0; e0 <= b0; ++e0)
                    for (int e1 = 0; e1 <= b1; ++e1)
                    for (int rc = 0; rc <= 2; ++rc)
                    for (int rm = 0; rm <= 2; ++rm) {
                        const sim::Observation o{{a0, a1}, {b0, b1}, {e0, e1}, rc, rm};
                        const auto mask = space.mask(o);
                        ++states;
                        for (std::int64_t x = 0; x < space.size(); ++x) {
                            const bool ok = table.admissible(x, o, mu);
                            if (static_cast<bool>(mask[static_cast<std::size_t>(x)]) != ok)
                                ++exhaustive_bad;
                        }
                    }
                }
    v.require(exhaustive_bad == 0, std::to_string(exhaustive_bad) + " exhaustive mismatches");
    v.detail << observations << " reachable observations, " << admitted << " admitted actions re-checked, "
             << states << " exhaustive states";
    return v;
}

// ------------------------------------------------------------------ counting

Verdict counting()
{
    Verdict v;
    agents::SpaceCountInput in;
    in.nodes = 5;
    in.buffer_caps = {5, 5, 5};
    in.cpu_units = 5;
    in.mem_units = 5;
    in.max_alloc = {5, 5, 5};
    const auto c = agents::state_space_count(in);
    const auto product = c.product();
    const std::string digits = product.str();
    const int exponent = static_cast<int>(digits.size()) - 1;
    const double mantissa = std::stod(digits.substr(0, 1) + "." + digits.substr(1, 6));
    char four[16];
    std::snprintf(four, sizeof four, "%.3f", mantissa);
    v.require(std::string(four) == "9.955", "mantissa " + std::string(four));
    v.require(exponent == 11, "exponent " + std::to_string(exponent));
    const double tib = product.convert_to<double>() * 8.0 / std::pow(1024.0, 4);
    v.require(std::abs(tib - 7.24) < 0.01, "8-byte table size " + fmt(tib) + " TiB");
    v.detail << digits << " = " << four << "e" << exponent << " (|O| " << c.observations << ", |X| " << c.actions
             << "), " << fmt(tib, 4) << " TiB at 8 B/entry";
    return v;
}

// ----------------------------------------------------------------- gradients

Verdict gradients()
{
    Verdict v;
    nn::GradCheckOptions opt;
    opt.seed = 17;
    for (auto arch : {nn::Architecture::DRQN, nn::Architecture::DCQN, nn::Architecture::DQN}) {
        const auto rep = nn::check_architecture(arch, 8, 50, 10, opt);
        v.require(rep.probes >= 100, std::string(nn::to_string(arch)) + " has only " + std::to_string(rep.probes) + " probes");
        v.require(rep.passed(), std::string(nn::to_string(arch)) + " " + std::to_string(rep.failures) + " failures, worst " +
                                    fmt(rep.max_rel_error) + " at " + rep.worst.where);
        v.detail << nn::to_string(arch) << " " << rep.probes << " probes max " << fmt(rep.max_rel_error, 2) << "; ";
    }
    v.detail << "tolerance 1e-4";
    return v;
}

// ----------------------------------------------------------------------- gru

Verdict gru()
{
    Verdict v;
    Rng rng(5);
    const int H = 8, D = 5;
    nn::GRUWeights zero(D, H);
    std::int64_t exact = 0, gate_ok = 0;
    const int probes = 100000;
    nn::GRUWeights w(D, H);
    for (int p = 0; p < probes; ++p) {
        nn::Vec s(H), x(D);
        for (int i = 0; i < H; ++i)
            s(i) = rng.uniform(-3.0, 3.0);
        for (int i = 0; i < D; ++i)
            x(i) = rng.uniform(-3.0, 3.0);
        const nn::Vec out = nn::gru_cell(zero, s, x);
        bool all = true;
        for (int i = 0; i < H; ++i)
            all = all && out(i) == 0.5 * s(i);
        exact += all ? 1 : 0;

        if (p % 100 == 0)
            for (nn::Mat* m : {&w.ws_r, &w.wg_r, &w.bias_r, &w.ws_z, &w.wg_z, &w.bias_z, &w.ws, &w.wg, &w.bias})
                nn::uniform_fill(*m, 1.0, rng);
        nn::GRUGates g;
        nn::gru_cell(w, s, x, &g);
        gate_ok += (g.reset.minCoeff() > 0.0 && g.reset.maxCoeff() < 1.0 && g.update.minCoeff() > 0.0 &&
                    g.update.maxCoeff() < 1.0)
                       ? 1
                       : 0;
    }
    v.require(exact == probes, std::to_string(probes - exact) + " zero-weight steps differ from 0.5 s");
    v.require(gate_ok == probes, std::to_string(probes - gate_ok) + " gate vectors leave (0,1)");
    v.detail << probes << " zero-weight steps exact, " << probes << " random gate probes inside (0,1)";
    return v;
}

// ------------------------------------------------------------------- epsilon

Verdict epsilon()
{
    Verdict v;
    agents::EpsilonConfig c;
    v.require(c.start == 1.0 && c.min == 0.01 && c.renewal_period == 5000 && c.renewal_factor == 0.9,
              "default constants differ");
    agents::EpsilonSchedule s(c);
    v.require(s.value(0) == 1.0, "eps(0) != 1");
    double prev = 2.0, lowest = 1.0;
    int cycles = 0;
    bool monotone = true, peaks = true, floor_hit = true;
    const std::int64_t T = 20 * c.renewal_period;
    for (std::int64_t t = 0; t < T; ++t) {
        s.on_slot(t);
        const double e = s.value(t);
        lowest = std::min(lowest, e);
        if (t % c.renewal_period == 0) {
            const int n = static_cast<int>(t / c.renewal_period);
            const double peak = std::max(std::pow(0.9, n), c.min);
            peaks = peaks && std::abs(e - peak) <= 1e-12 * peak;
            ++cycles;
        } else {
            monotone = monotone && e <= prev;
        }
        if (t % c.renewal_period == c.renewal_period - 1)
            floor_hit = floor_hit && e <= 1.001 * c.min;
        prev = e;
    }
    v.require(monotone, "epsilon increases inside a cycle");
    v.require(peaks, "renewal peaks are not 0.9^n");
    v.require(lowest >= c.min, "epsilon below the floor");
    v.require(floor_hit, "cycle does not end at the floor");
    v.detail << cycles << " cycles: eps(0)=1, peaks 0.9^n, non-increasing within cycles, min " << fmt(lowest);
    return v;
}

// ---------------------------------------------------------------- tiny oracle

// One node, one slice, cap 1, 10 ms slots: a task must start in the slot after
// arrival to make its 40 ms budget; the cloud is out of reach.
sim::NetworkConfig tiny_network(std::uint64_t seed)
{
    auto cfg = test::small_network(1, 1, 0.5, 40, 1, seed);
    cfg.channel.slot_ms = 10.0;
    return cfg;
}

std::vector<int> key(const sim::Observation& o)
{
    std::vector<int> k;
    for (double d : o.flatten())
        k.push_back(static_cast<int>(d));
    return k;
}

Verdict tiny_oracle()
{
    Verdict v;
    const std::int64_t slots = 50000;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        // tabular learner under a uniformly random behaviour policy
        const auto cfg = tiny_network(seed);
        sim::Simulator tsim(cfg);
        const auto& space = tsim.action_space(0);
        agents::TabularQ table(static_cast<int>(space.size()));
        Rng behave(mix_seed(seed, 3));
        std::map<std::vector<int>, sim::Observation> reachable;
        auto obs = tsim.observe(0);
        for (std::int64_t t = 0; t < slots; ++t) {
            const auto mask = space.mask(obs);
            const int x = agents::random_valid_action(mask, behave);
            const auto res = tsim.step(std::vector<sim::ActionPair>{space.decode(x)});
            const auto next = res.next[0];
            agents::tabular_q_update(table, key(obs), x, res.local_rewards[0], key(next), 0.1, 0.98, space.mask(next));
            reachable.emplace(key(obs), obs);
            obs = next;
        }

        // deep Q agent on its own run of the same environment
        agents::AgentConfig ac;
        ac.arch = nn::Architecture::DQN;
        ac.sizes.mlp = {32, 32};
        ac.seq = 1;
        ac.learn_start = 1000;
        ac.target_sync = 250;
        ac.batch = 32;
        ac.replay_capacity = 10000;
        agents::DeepQAgent agent(ac, 5, static_cast<int>(space.size()), mix_seed(seed, 4));
        sim::Simulator dsim(cfg);
        obs = dsim.observe(0);
        for (std::int64_t t = 0; t < slots; ++t) {
            agent.begin_slot(t);
            const auto f = harness::features(obs, cfg, 0, true);
            agent.observe(f);
            const auto mask = space.mask(obs);
            const int x = agent.act(mask, t);
            const auto res = dsim.step(std::vector<sim::ActionPair>{space.decode(x)});
            agents::Transition tr;
            tr.window = agent.window();
            tr.action = x;
            tr.reward = res.local_rewards[0];
            tr.next_window = agent.peek_window(harness::features(res.next[0], cfg, 0, true));
            tr.next_mask = space.mask(res.next[0]);
            agent.replay().stage(std::move(tr), t);
            agent.end_slot(t);
            reachable.emplace(key(obs), obs);
            obs = res.next[0];
        }

        int agree = 0, decisions = 0;
        for (const auto& [k, o] : reachable) {
            const auto mask = space.mask(o);
            const auto row = table.row(k);
            const int tab = agents::masked_argmax(row, mask);
            const auto q = agent.q_values(harness::features(o, cfg, 0, true));
            const int deep = agents::masked_argmax(q, mask);
            const bool same = tab == deep;
            agree += same ? 1 : 0;
            if (std::count(mask.begin(), mask.end(), 1) > 1)
                ++decisions;
            if (!same) {
                std::ostringstream s;
                s << "seed " << seed << " state (";
                for (std::size_t i = 0; i < k.size(); ++i)
                    s << (i ? "," : "") << k[i];
                s << "): tabular " << tab << " deep " << deep;
                v.require(false, s.str());
            }
        }
        v.detail << "seed " << seed << ": " << agree << "/" << reachable.size() << " states agree (" << decisions
                 << " with a choice); ";
    }
    v.detail << slots << " slots each";
    return v;
}

// ---------------------------------------------------------------- scenarios

harness::ScenarioConfig desk_config()
{
    return harness::load_scenario(std::string(FOG_SOURCE_DIR) + "/configs/desk_feasible.json");
}

struct Trained
{
    std::map<std::string, std::vector<harness::RunResult>> runs;
};

Trained& trained()
{
    static Trained t;
    return t;
}

const std::vector<harness::RunResult>& runs_for(harness::AgentKind agent, baselines::AllocRule alloc)
{
    const std::string name =
        harness::to_string(agent) + (agent == harness::AgentKind::Baseline ? "-" + std::string(baselines::to_string(alloc)) : "");
    auto& slot = trained().runs[name];
    if (slot.empty()) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            auto c = desk_config();
            c.agent = agent;
            c.alloc = alloc;
            c.seed = seed;
            const auto t0 = std::chrono::steady_clock::now();
            slot.push_back(harness::run(c));
            const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::cerr << "  [" << name << " seed " << seed << ": " << fmt(s, 3) << " s]\n";
        }
    }
    return slot;
}

Verdict learning()
{
    Verdict v;
    const auto base = desk_config();
    v.require(base.nodes == 3 && base.slices == 2 && base.iterations == 30000 &&
                  base.params == harness::ParameterSet::DeskFeasible,
              "scenario is not desk-feasible I=3 K=2 3e4 slots");
    const std::int64_t width = base.iterations / 10;
    for (auto agent : {harness::AgentKind::DRQN, harness::AgentKind::DCQN, harness::AgentKind::DQN}) {
        const auto& rs = runs_for(agent, base.alloc);
        for (std::size_t s = 0; s < rs.size(); ++s) {
            const auto p = harness::learning_progress(rs[s].metrics.global_reward, base.agent_config.learn_start, width);
            const bool ok = p.passed(0.2);
            v.require(ok, harness::to_string(agent) + " seed " + std::to_string(s + 1));
            v.detail << harness::to_string(agent) << "/" << s + 1 << " " << fmt(p.first, 3) << "->" << fmt(p.last, 3)
                     << " (range " << fmt(p.range(), 3) << "); ";
        }
    }
    v.detail << "window " << width << " slots from learn_start " << base.agent_config.learn_start;
    return v;
}

struct Mean
{
    double success = 0.0, overflow = 0.0;
};

Mean mean_rates(const std::vector<harness::RunResult>& rs)
{
    Mean m;
    for (const auto& r : rs) {
        m.success += r.metrics.window.success_rate().value_or(0.0);
        m.overflow += r.metrics.window.overflow_rate().value_or(0.0);
    }
    m.success /= static_cast<double>(rs.size());
    m.overflow /= static_cast<double>(rs.size());
    return m;
}

Verdict ordering()
{
    Verdict v;
    const auto drqn = mean_rates(runs_for(harness::AgentKind::DRQN, baselines::AllocRule::RoundRobin));
    v.detail << "DRQN success " << pct(drqn.success) << " overflow " << pct(drqn.overflow);
    for (auto alloc : {baselines::AllocRule::RoundRobin, baselines::AllocRule::PriorityQueuing}) {
        const auto b = mean_rates(runs_for(harness::AgentKind::Baseline, alloc));
        const std::string name = "nearest+" + std::string(baselines::to_string(alloc));
        v.detail << "; " << name << " success " << pct(b.success) << " overflow " << pct(b.overflow);
        v.require(drqn.success >= b.success + 0.10, "success gap to " + name + " below 10 points");
        v.require(drqn.overflow <= 0.5 * b.overflow, "overflow not at most half of " + name);
    }
    return v;
}

Verdict load()
{
    Verdict v;
    const std::vector<double> lambdas{0.5, 0.7, 0.9};
    for (auto alloc : {baselines::AllocRule::PriorityQueuing, baselines::AllocRule::RoundRobin}) {
        std::vector<Mean> means(lambdas.size());
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            auto c = desk_config();
            c.agent = harness::AgentKind::Baseline;
            c.alloc = alloc;
            c.seed = seed;
            const auto pts = harness::sweep(c, lambdas);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                means[i].success += pts[i].result.metrics.window.success_rate().value_or(0.0) / 3.0;
                means[i].overflow += pts[i].result.metrics.window.overflow_rate().value_or(0.0) / 3.0;
            }
        }
        const std::string name(baselines::to_string(alloc));
        v.detail << name << ":";
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            v.detail << " " << lambdas[i] << "->" << pct(means[i].success) << "/" << pct(means[i].overflow);
            if (i > 0) {
                v.require(means[i].success <= means[i - 1].success, name + " success rises at lambda " + fmt(lambdas[i]));
                v.require(means[i].overflow >= means[i - 1].overflow, name + " overflow falls at lambda " + fmt(lambdas[i]));
            }
        }
        v.detail << "; ";
    }
    v.detail << "success/overflow, 3 seeds each";
    return v;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism()
{
    Verdict v;
    const auto root = fs::temp_directory_path() / ("fog_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    int files = 0;
    for (auto agent : {harness::AgentKind::Baseline, harness::AgentKind::DRQN}) {
        auto c = desk_config();
        c.agent = agent;
        c.alloc = baselines::AllocRule::PriorityQueuing;
        c.seed = 42;
        if (agent != harness::AgentKind::Baseline) {
            c.iterations = 3000;
            c.metrics_window = 1000;
            c.agent_config.learn_start = 1000;
            c.checkpoint_every = 1000;
        }
        const std::string tag = harness::to_string(agent);
        harness::RunOptions o;
        o.out_dir = (root / (tag + "_a")).string();
        const auto live = harness::run(c, o);
        o.out_dir = (root / (tag + "_b")).string();
        harness::run(c, o);
        for (const auto& entry : fs::recursive_directory_iterator(root / (tag + "_a"))) {
            if (!entry.is_regular_file())
                continue;
            const auto rel = fs::relative(entry.path(), root / (tag + "_a"));
            ++files;
            v.require(slurp(entry.path()) == slurp(root / (tag + "_b") / rel), tag + " " + rel.string() + " differs");
        }
        const auto replay = harness::compute_metrics_file((root / (tag + "_a") / "events.log").string());
        v.require(replay == live.metrics, tag + " replayed metrics differ from live");
        v.require(replay.to_json().dump() == live.metrics.to_json().dump(), tag + " replayed summary differs");
    }
    fs::remove_all(root);
    v.detail << files << " output files bitwise identical across repeated runs; replay equals live for baseline and DRQN";
    return v;
}

struct Criterion
{
    std::string name;
    std::string title;
    double limit_s;
    std::function<Verdict()> fn;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {"formulas", "formula suite to 1e-9", 1.0, formulas},
        {"constraints", "constraint soundness, 1e6 observations + exhaustive", 120.0, constraints},
        {"counting", "state/action counting 9.955e11", 1.0, counting},
        {"gradients", "finite-difference gradients, >=100 probes per architecture", 300.0, gradients},
        {"gru", "GRU analytics", 0.0, gru},
        {"epsilon", "epsilon schedule", 0.0, epsilon},
        {"tiny", "tiny-instance tabular vs deep Q argmax, 3 seeds", 600.0, tiny_oracle},
        {"learning", "learning progress, 3 variants x 3 seeds", 7200.0, learning},
        {"ordering", "DRQN vs nearest+RR and nearest+PQ", 0.0, ordering},
        {"load", "load monotonicity over lambda 0.5/0.7/0.9", 0.0, load},
        {"determinism", "bitwise determinism and log replay", 0.0, determinism},
    };
    std::set<std::string> only(argv + 1, argv + argc);
    int failed = 0, ran = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.name))
            continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.fn();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0.0 && secs > c.limit_s)
            v.require(false, "runtime " + fmt(secs, 3) + " s over the " + fmt(c.limit_s, 4) + " s limit");
        std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << " - " << c.title << " [" << fmt(secs, 3) << " s] "
                  << v.detail.str() << (v.pass ? "" : " | failed: " + v.failures) << std::endl;
        failed += v.pass ? 0 : 1;
    }
    if (ran == 0) {
        std::cerr << "no criterion matched\n";
        return 2;
    }
    std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
