#include "fog/harness/runner.hpp"

#include "fog/agents/deep_q.hpp"
#include "fog/baselines/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace fog::harness {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::vector<double> features(const sim::Observation& obs, const sim::NetworkConfig& config, int node,
                             bool normalize)
{
    std::vector<double> f = obs.flatten();
    if (!normalize)
        return f;
    const int K = obs.slice_count();
    for (int k = 0; k < K; ++k) {
        const double cap = config.slices[static_cast<std::size_t>(k)].buffer_cap;
        f[static_cast<std::size_t>(K + k)] /= cap;
        f[static_cast<std::size_t>(2 * K + k)] /= cap;
    }
    const auto& n = config.nodes[static_cast<std::size_t>(node)];
    f[static_cast<std::size_t>(3 * K)] /= n.cpu_units();
    f[static_cast<std::size_t>(3 * K + 1)] /= n.mem_units();
    return f;
}

namespace {

std::string num(double v)
{
    if (std::isnan(v))
        return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nn::Architecture arch_of(AgentKind a)
{
    switch (a) {
    case AgentKind::DRQN: return nn::Architecture::DRQN;
    case AgentKind::DCQN: return nn::Architecture::DCQN;
    case AgentKind::DQN: return nn::Architecture::DQN;
    case AgentKind::Baseline: break;
    }
    throw std::logic_error("baseline has no network");
}

void save_checkpoints(const fs::path& dir, const std::vector<std::unique_ptr<agents::DeepQAgent>>& learners)
{
    fs::create_directories(dir);
    for (std::size_t i = 0; i < learners.size(); ++i) {
        std::ofstream out(dir / ("agent_" + std::to_string(i) + ".bin"), std::ios::binary);
        learners[i]->save(out);
        if (!out)
            throw std::runtime_error("failed writing checkpoint " + (dir / ("agent_" + std::to_string(i) + ".bin")).string());
    }
}

ordered_json counters_json(const sim::TaskCounters& c, std::int64_t in_system)
{
    ordered_json j;
    j["created"] = c.created;
    j["succeeded"] = c.succeeded;
    j["timed_out"] = c.timed_out;
    j["dropped"] = c.dropped;
    j["in_system"] = in_system;
    return j;
}

} // namespace

RunResult run(const ScenarioConfig& config, const RunOptions& options)
{
    const sim::NetworkConfig net = config.network();
    sim::Simulator sim(net);
    const int I = net.node_count();
    const int K = net.slice_count();
    const bool learning = config.agent != AgentKind::Baseline;

    MetricsLayout layout;
    layout.nodes = I;
    layout.slices = K;
    layout.slot_ms = net.channel.slot_ms;
    layout.iterations = config.iterations;
    layout.window = config.metrics_window;
    layout.curve_block = config.curve_block;
    for (const auto& s : net.slices)
        layout.overflow_weights.push_back(s.overflow_weight);
    MetricsAccumulator acc(layout);

    const bool files = !options.out_dir.empty();
    const fs::path out_dir(options.out_dir);
    std::ofstream csv, events;
    std::optional<sim::EventLog> log;
    if (files) {
        fs::create_directories(out_dir);
        csv.open(out_dir / "metrics.csv");
        if (!csv)
            throw std::runtime_error("cannot write " + (out_dir / "metrics.csv").string());
        csv << "slot,node,eps,loss,reward,success,overflow,delay\n";
        if (options.write_events) {
            events.open(out_dir / "events.log");
            if (!events)
                throw std::runtime_error("cannot write " + (out_dir / "events.log").string());
            write_run_record(events, layout);
            log.emplace(events);
            sim.set_event_log(&*log);
        }
    }

    std::vector<std::unique_ptr<agents::DeepQAgent>> learners;
    std::vector<baselines::BaselinePolicy> policies;
    const int obs_dim = 3 * K + 2;
    for (int i = 0; i < I; ++i) {
        if (learning) {
            agents::AgentConfig ac = config.agent_config;
            ac.arch = arch_of(config.agent);
            learners.push_back(std::make_unique<agents::DeepQAgent>(
                ac, obs_dim, static_cast<int>(sim.action_space(i).size()), mix_seed(config.seed, 0xa0 + static_cast<std::uint64_t>(i))));
        } else {
            policies.emplace_back(net, i, baselines::BaselineConfig{config.buffer_threshold, config.alloc});
        }
    }

    RunResult result;
    result.loss.reserve(static_cast<std::size_t>(config.iterations));
    std::vector<sim::ActionPair> actions(static_cast<std::size_t>(I));
    std::vector<std::vector<double>> windows(static_cast<std::size_t>(I));
    std::vector<int> chosen(static_cast<std::size_t>(I), 0);
    std::vector<double> eps(static_cast<std::size_t>(I), std::numeric_limits<double>::quiet_NaN());
    std::vector<double> losses(static_cast<std::size_t>(I), std::numeric_limits<double>::quiet_NaN());
    std::int64_t t = 0;

    try {
        for (; t < config.iterations; ++t) {
            const auto obs = sim.observe_all();
            for (int i = 0; i < I; ++i) {
                const auto iu = static_cast<std::size_t>(i);
                if (learning) {
                    auto& agent = *learners[iu];
                    if (t % config.episode_length == 0)
                        agent.reset_history();
                    agent.begin_slot(t);
                    agent.observe(features(obs[iu], net, i, config.normalize_obs));
                    windows[iu] = agent.window();
                    const auto mask = sim.action_space(i).mask(obs[iu]);
                    chosen[iu] = agent.act(mask, t);
                    actions[iu] = sim.action_space(i).decode(chosen[iu]);
                    eps[iu] = t < agent.config().learn_start ? 1.0 : agent.epsilon(t);
                } else {
                    actions[iu] = policies[iu].act(obs[iu]);
                }
            }

            const auto step = sim.step(actions);
            if (options.check_invariants)
                sim.check_invariants();
            acc.slot_resolved(t, step.resolved);
            if (acc.last_local_rewards() != step.local_rewards)
                throw std::logic_error("metrics and simulator disagree on local rewards");
            const double psi = sim::global_reward(step.local_rewards);

            double loss_sum = 0.0;
            int trained = 0;
            for (int i = 0; i < I; ++i) {
                const auto iu = static_cast<std::size_t>(i);
                if (!learning)
                    continue;
                auto& agent = *learners[iu];
                agents::Transition tr;
                tr.window = std::move(windows[iu]);
                tr.action = chosen[iu];
                tr.reward = psi;
                tr.next_window = agent.peek_window(features(step.next[iu], net, i, config.normalize_obs));
                tr.next_mask = sim.action_space(i).mask(step.next[iu]);
                tr.terminal = (t + 1) % config.episode_length == 0;
                agent.replay().stage(std::move(tr), t + config.feedback_delay);
                losses[iu] = agent.end_slot(t);
                if (!std::isnan(losses[iu])) {
                    loss_sum += losses[iu];
                    ++trained;
                }
            }
            result.loss.push_back(trained ? loss_sum / trained : std::numeric_limits<double>::quiet_NaN());

            if (files) {
                std::vector<int> ok(static_cast<std::size_t>(I), 0), drop(static_cast<std::size_t>(I), 0);
                std::vector<std::int64_t> lat(static_cast<std::size_t>(I), 0);
                for (const auto& r : step.resolved) {
                    const auto o = static_cast<std::size_t>(r.origin);
                    if (r.outcome == sim::Outcome::Succeeded) {
                        ++ok[o];
                        lat[o] += r.latency_slots;
                    } else if (r.outcome == sim::Outcome::Dropped) {
                        ++drop[o];
                    }
                }
                for (int i = 0; i < I; ++i) {
                    const auto iu = static_cast<std::size_t>(i);
                    const double delay = ok[iu] ? static_cast<double>(lat[iu]) * net.channel.slot_ms / ok[iu]
                                                : std::numeric_limits<double>::quiet_NaN();
                    csv << t << ',' << i << ',' << num(eps[iu]) << ',' << num(losses[iu]) << ','
                        << num(step.local_rewards[iu]) << ',' << ok[iu] << ',' << drop[iu] << ',' << num(delay)
                        << '\n';
                }
            }
            if (learning && files && config.checkpoint_every > 0 && (t + 1) % config.checkpoint_every == 0)
                save_checkpoints(out_dir / "checkpoints", learners);
            if (options.progress && options.progress_every > 0 && (t + 1) % options.progress_every == 0)
                options.progress(t + 1);
        }
    } catch (const std::exception& e) {
        if (files) {
            ordered_json d;
            d["error"] = e.what();
            d["slot"] = t;
            d["counters"] = counters_json(sim.counters(), sim.in_system());
            d["train_steps"] = ordered_json::array();
            for (const auto& a : learners)
                d["train_steps"].push_back(a->train_steps());
            std::ofstream(out_dir / "diagnostic.json") << d.dump(2) << '\n';
        }
        throw;
    }

    acc.created(sim.counters().created);
    result.metrics = acc.finish();
    result.counters = sim.counters();
    result.in_system = sim.in_system();
    for (const auto& a : learners)
        result.train_steps.push_back(a->train_steps());

    if (files) {
        if (log)
            write_end_record(events, config.iterations);
        if (learning)
            save_checkpoints(out_dir / "checkpoints", learners);
        ordered_json s;
        s["config"] = to_json(config);
        s["metrics"] = result.metrics.to_json();
        s["counters"] = counters_json(result.counters, result.in_system);
        s["train_steps"] = result.train_steps;
        std::ofstream(out_dir / "summary.json") << s.dump(2) << '\n';
        if (!csv || (log && !events))
            throw std::runtime_error("failed writing run outputs in " + out_dir.string());
    }
    return result;
}

std::vector<SweepPoint> sweep(const ScenarioConfig& base, const std::vector<double>& lambdas, const RunOptions& options)
{
    if (lambdas.empty())
        throw std::invalid_argument("sweep: empty lambda list");
    std::vector<SweepPoint> out;
    for (double l : lambdas) {
        ScenarioConfig c = base;
        c.lambda = l;
        RunOptions o = options;
        if (!options.out_dir.empty()) {
            std::ostringstream name;
            name << "lambda_" << l;
            o.out_dir = (fs::path(options.out_dir) / name.str()).string();
        }
        out.push_back({l, run(c, o)});
    }
    if (!options.out_dir.empty())
        std::ofstream(fs::path(options.out_dir) / "sweep.json") << sweep_table(out).dump(2) << '\n';
    return out;
}

ordered_json sweep_table(const std::vector<SweepPoint>& points)
{
    ordered_json rows = ordered_json::array();
    auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
    for (const auto& p : points) {
        const auto& m = p.result.metrics;
        ordered_json r;
        r["lambda"] = p.lambda;
        r["success_rate"] = opt(m.window.success_rate());
        r["overflow_rate"] = opt(m.window.overflow_rate());
        r["timeout_rate"] = opt(m.window.timeout_rate());
        r["avg_delay_ms"] = opt(m.window.avg_delay_ms(m.layout.slot_ms));
        rows.push_back(r);
    }
    return rows;
}

Progress learning_progress(const std::vector<double>& global_reward, std::int64_t from, std::int64_t width)
{
    if (from < 0 || width < 1)
        throw std::invalid_argument("learning_progress: bad window");
    const auto means = sliding_means(global_reward, static_cast<std::size_t>(from), global_reward.size(),
                                     static_cast<std::size_t>(width));
    if (means.empty())
        throw std::invalid_argument("learning_progress: span shorter than one window");
    Progress p;
    p.first = means.front();
    p.last = means.back();
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    p.lo = *lo;
    p.hi = *hi;
    return p;
}

} // namespace fog::harness
