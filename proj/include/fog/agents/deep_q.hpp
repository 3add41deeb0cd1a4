#pragma once

#include "fog/agents/epsilon.hpp"
#include "fog/agents/replay.hpp"
#include "fog/common/random.hpp"
#include "fog/nn/adam.hpp"
#include "fog/nn/network.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <vector>

namespace fog::agents {

/// Uniform over valid actions with probability epsilon, otherwise the masked
/// argmax (lowest index on ties). Always consumes one draw for the coin flip.
int select_action(std::span<const double> q, std::span<const std::uint8_t> mask, double epsilon, Rng& rng);

/// Uniform over the valid actions.
int random_valid_action(std::span<const std::uint8_t> mask, Rng& rng);

/// Lowest-index argmax restricted to the mask.
int masked_argmax(std::span<const double> q, std::span<const std::uint8_t> mask);

/// reward + gamma * max over valid next actions, or reward alone when terminal.
double td_target(double reward, bool terminal, std::span<const double> next_q,
                 std::span<const std::uint8_t> next_mask, double gamma);

/// Mean squared TD error over the batch followed by one Adam step on `online`.
/// Targets come from `target` (evaluated before the online pass, so the same
/// network may serve as both). Returns the pre-update loss; throws on a
/// non-finite loss.
double train_step(nn::Network& online, nn::Network& target, nn::AdamState& adam,
                  std::span<const Transition* const> batch, double gamma, double clip_norm = 0.0);

struct AgentConfig
{
    nn::Architecture arch = nn::Architecture::DRQN;
    nn::ArchitectureSizes sizes;
    double gamma = 0.98;
    nn::AdamConfig adam;
    int batch = 32;
    std::int64_t target_sync = 1000;
    std::int64_t learn_start = 10000;
    int seq = 10;
    std::size_t replay_capacity = 10000;
    EpsilonConfig epsilon;
    // 0 disables gradient clipping
    double clip_norm = 0.0;
};

/// One fog node's learner: online and target networks, Adam state, replay
/// memory, epsilon schedule, observation history and its own random stream.
class DeepQAgent
{
public:
    DeepQAgent(AgentConfig config, int obs_dim, int action_dim, std::uint64_t seed);

    const AgentConfig& config() const { return config_; }
    int obs_dim() const { return obs_dim_; }
    int action_dim() const { return action_dim_; }

    /// Zero-pads the observation history.
    void reset_history();
    void observe(std::span<const double> obs);
    /// Current [seq x obs_dim] window, oldest row first.
    std::vector<double> window() const;
    /// The window observe(next) would produce, without changing the history.
    std::vector<double> peek_window(std::span<const double> next) const;

    std::vector<double> q_values(std::span<const double> window);
    double epsilon(std::int64_t t) const { return schedule_.value(t); }

    /// Uniform random before learn_start, epsilon-greedy after.
    int act(std::span<const std::uint8_t> mask, std::int64_t t);

    /// Per-slot bookkeeping before acting: epsilon renewal.
    void begin_slot(std::int64_t t) { schedule_.on_slot(t); }
    /// Trains once if t >= learn_start and enough samples are released, then
    /// syncs the target at multiples of the sync period. Returns the loss or NaN.
    double end_slot(std::int64_t t);

    void sync_target() { target_ = online_; }

    ReplayBuffer& replay() { return replay_; }
    nn::Network& online() { return online_; }
    nn::Network& target() { return target_; }
    const EpsilonSchedule& schedule() const { return schedule_; }
    std::int64_t train_steps() const { return train_steps_; }

    void save(std::ostream& out) const;
    void load(std::istream& in);

private:
    AgentConfig config_;
    int obs_dim_;
    int action_dim_;
    Rng rng_;
    nn::Network online_;
    nn::Network target_;
    nn::AdamState adam_;
    ReplayBuffer replay_;
    EpsilonSchedule schedule_;
    std::deque<std::vector<double>> history_;
    std::int64_t train_steps_ = 0;
};

} // namespace fog::agents
