#pragma once

#include "fog/common/random.hpp"
#include "fog/sim/action_space.hpp"
#include "fog/sim/formulas.hpp"
#include "fog/sim/model.hpp"
#include "fog/sim/reward.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace fog::sim {

enum class TaskStatus
{
    InTransit,
    Queued,
    Running,
    Succeeded,
    TimedOut,
    Dropped
};

struct Task
{
    std::uint64_t id = 0;
    int slice = 0;
    int origin = 0;
    // Fog node index, or node_count for the cloud.
    int processor = 0;
    std::int64_t created_slot = 0;
    std::int64_t deadline_slot = 0;
    std::int64_t arrival_slot = 0;
    std::int64_t start_slot = -1;
    // Slot boundary at which execution ends (start + processing slots).
    std::int64_t finish_time = -1;
    std::int64_t processing_slots = 0;
    TaskStatus status = TaskStatus::InTransit;
};

/// Everything recorded about a task when it leaves the system.
/// Latency components are -1 when the task never completed.
struct Resolution
{
    std::uint64_t task = 0;
    int origin = 0;
    int processor = 0;
    int slice = 0;
    std::int64_t created_slot = 0;
    std::int64_t resolved_slot = 0;
    Outcome outcome = Outcome::Succeeded;
    std::int64_t latency_slots = -1;
    std::int64_t transit_slots = -1;
    std::int64_t wait_slots = -1;
    std::int64_t processing_slots = -1;

    friend bool operator==(const Resolution&, const Resolution&) = default;
};

struct NodeState
{
    // Per slice, in enqueue order; holds queued and running tasks.
    std::vector<std::vector<Task>> buffers;
    std::vector<int> in_progress;
    std::vector<int> mem_units_per_task;
    ResourceUnits total;
    ResourceUnits occupied;

    int buffer_len(int slice) const { return static_cast<int>(buffers[static_cast<std::size_t>(slice)].size()); }
    ResourceUnits available() const { return available_resources(total, occupied); }
};

/// Local snapshot; reads nothing but the node's own state and arrivals.
Observation observe(const NodeState& node, std::span<const int> arrivals);

/// Independent Bernoulli draw per slice at the node's arrival rates.
std::vector<int> sample_arrivals(Rng& rng, const NetworkConfig& config, int node);

struct TaskCounters
{
    std::int64_t created = 0;
    std::int64_t succeeded = 0;
    std::int64_t timed_out = 0;
    std::int64_t dropped = 0;
};

/// Append-only line-delimited JSON record of every task event.
class EventLog
{
public:
    explicit EventLog(std::ostream& out) : out_(out) {}

    void header(const NetworkConfig& config);
    void created(std::int64_t slot, const Task& task, int route);
    void enqueued(std::int64_t slot, const Task& task);
    void started(std::int64_t slot, const Task& task);
    void resolved(const Resolution& r);

private:
    std::ostream& out_;
};

struct StepResult
{
    std::vector<double> local_rewards;
    std::vector<Observation> next;
    std::vector<Resolution> resolved;
};

/// Slot-stepped fog network. Single writer; step() is atomic: an invalid joint
/// action is rejected before any state changes.
class Simulator
{
public:
    explicit Simulator(NetworkConfig config);

    const NetworkConfig& config() const { return config_; }
    std::int64_t slot() const { return slot_; }
    int node_count() const { return config_.node_count(); }
    int cloud_index() const { return config_.node_count(); }

    const ActionSpace& action_space(int node) const { return spaces_[static_cast<std::size_t>(node)]; }
    const NodeState& node_state(int node) const { return nodes_[static_cast<std::size_t>(node)]; }
    const std::vector<int>& pending_arrivals(int node) const { return arrivals_[static_cast<std::size_t>(node)]; }
    std::int64_t processing_slots_at(int processor, int slice) const;

    Observation observe(int node) const;
    std::vector<Observation> observe_all() const;

    StepResult step(std::span<const ActionPair> actions);

    void set_event_log(EventLog* log);

    /// Replaces the arrivals pending for the current slot (scripted scenarios).
    void override_arrivals(int node, std::vector<int> arrivals);

    const TaskCounters& counters() const { return counters_; }
    std::int64_t in_system() const;

    /// Throws std::logic_error when resource, buffer or accounting invariants break.
    void check_invariants() const;

private:
    void resolve(const Task& task, std::int64_t slot, Outcome outcome, std::int64_t completion,
                 std::vector<Resolution>& out);
    void enqueue(Task task, int node, std::int64_t slot, std::vector<Resolution>& out);
    void start(Task& task, NodeState& node, int node_index, std::int64_t slot);

    NetworkConfig config_;
    std::vector<ActionSpace> spaces_;
    std::vector<NodeState> nodes_;
    std::vector<std::vector<int>> arrivals_;
    // processing slots per [processor][slice]; last row is the cloud
    std::vector<std::vector<std::int64_t>> processing_;
    std::vector<Task> transit_;
    std::vector<Task> cloud_;
    Rng rng_;
    std::int64_t slot_ = 0;
    std::uint64_t next_id_ = 0;
    TaskCounters counters_;
    EventLog* log_ = nullptr;
};

} // namespace fog::sim
