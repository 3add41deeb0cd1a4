#include "fog/sim/simulator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fog::sim {

using ordered_json = nlohmann::ordered_json;

Observation observe(const NodeState& node, std::span<const int> arrivals)
{
    Observation obs;
    const std::size_t K = node.buffers.size();
    obs.arrivals.assign(arrivals.begin(), arrivals.end());
    obs.buffer_len.resize(K);
    obs.in_progress.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        obs.buffer_len[k] = static_cast<int>(node.buffers[k].size());
        obs.in_progress[k] = node.in_progress[k];
    }
    const auto r = node.available();
    obs.cpu_avail = r.cpu;
    obs.mem_avail = r.mem;
    return obs;
}

std::vector<int> sample_arrivals(Rng& rng, const NetworkConfig& config, int node)
{
    std::vector<int> a(static_cast<std::size_t>(config.slice_count()));
    for (int k = 0; k < config.slice_count(); ++k)
        a[static_cast<std::size_t>(k)] = rng.bernoulli(config.arrival_rate(node, k)) ? 1 : 0;
    return a;
}

// ---------------------------------------------------------------------------

void EventLog::header(const NetworkConfig& config)
{
    ordered_json j;
    j["ev"] = "header";
    j["version"] = 1;
    j["nodes"] = config.node_count();
    j["slices"] = config.slice_count();
    j["slot_ms"] = config.channel.slot_ms;
    out_ << j.dump() << '\n';
}

void EventLog::created(std::int64_t slot, const Task& task, int route)
{
    ordered_json j;
    j["ev"] = "create";
    j["slot"] = slot;
    j["task"] = task.id;
    j["node"] = task.origin;
    j["slice"] = task.slice;
    j["deadline"] = task.deadline_slot;
    j["route"] = route;
    out_ << j.dump() << '\n';
}

void EventLog::enqueued(std::int64_t slot, const Task& task)
{
    ordered_json j;
    j["ev"] = "enqueue";
    j["slot"] = slot;
    j["task"] = task.id;
    j["node"] = task.processor;
    out_ << j.dump() << '\n';
}

void EventLog::started(std::int64_t slot, const Task& task)
{
    ordered_json j;
    j["ev"] = "start";
    j["slot"] = slot;
    j["task"] = task.id;
    j["node"] = task.processor;
    out_ << j.dump() << '\n';
}

void EventLog::resolved(const Resolution& r)
{
    ordered_json j;
    j["ev"] = "resolve";
    j["slot"] = r.resolved_slot;
    j["task"] = r.task;
    j["origin"] = r.origin;
    j["processor"] = r.processor;
    j["slice"] = r.slice;
    j["created"] = r.created_slot;
    j["outcome"] = to_string(r.outcome);
    j["latency"] = r.latency_slots;
    j["transit"] = r.transit_slots;
    j["wait"] = r.wait_slots;
    j["processing"] = r.processing_slots;
    out_ << j.dump() << '\n';
}

// ---------------------------------------------------------------------------

Simulator::Simulator(NetworkConfig config) : config_(std::move(config)), rng_(0)
{
    config_.validate();
    rng_ = Rng(mix_seed(config_.seed, 0x51u));
    const int I = config_.node_count();
    const int K = config_.slice_count();

    for (int i = 0; i < I; ++i) {
        spaces_.emplace_back(config_, i);
        NodeState n;
        n.buffers.resize(static_cast<std::size_t>(K));
        n.in_progress.assign(static_cast<std::size_t>(K), 0);
        for (int k = 0; k < K; ++k)
            n.mem_units_per_task.push_back(config_.mem_units_per_task(i, k));
        const auto& spec = config_.nodes[static_cast<std::size_t>(i)];
        n.total = {spec.cpu_units(), spec.mem_units()};
        nodes_.push_back(std::move(n));
    }
    processing_.resize(static_cast<std::size_t>(I + 1));
    for (int p = 0; p <= I; ++p) {
        const double unit = p < I ? config_.nodes[static_cast<std::size_t>(p)].cpu_unit_hz
                                  : config_.cloud.cpu_unit_hz;
        for (int k = 0; k < K; ++k)
            processing_[static_cast<std::size_t>(p)].push_back(
                processing_slots(unit, config_.slices[static_cast<std::size_t>(k)], config_.channel));
    }
    for (int i = 0; i < I; ++i)
        arrivals_.push_back(sample_arrivals(rng_, config_, i));
}

std::int64_t Simulator::processing_slots_at(int processor, int slice) const
{
    return processing_.at(static_cast<std::size_t>(processor)).at(static_cast<std::size_t>(slice));
}

void Simulator::set_event_log(EventLog* log)
{
    log_ = log;
    if (log_)
        log_->header(config_);
}

void Simulator::override_arrivals(int node, std::vector<int> arrivals)
{
    if (static_cast<int>(arrivals.size()) != config_.slice_count())
        throw std::invalid_argument("override_arrivals: slice count mismatch");
    arrivals_.at(static_cast<std::size_t>(node)) = std::move(arrivals);
}

Observation Simulator::observe(int node) const
{
    return sim::observe(nodes_.at(static_cast<std::size_t>(node)), arrivals_[static_cast<std::size_t>(node)]);
}

std::vector<Observation> Simulator::observe_all() const
{
    std::vector<Observation> out;
    for (int i = 0; i < node_count(); ++i)
        out.push_back(observe(i));
    return out;
}

std::int64_t Simulator::in_system() const
{
    std::int64_t n = static_cast<std::int64_t>(transit_.size() + cloud_.size());
    for (const auto& node : nodes_)
        for (const auto& b : node.buffers)
            n += static_cast<std::int64_t>(b.size());
    return n;
}

void Simulator::resolve(const Task& task, std::int64_t slot, Outcome outcome,
                        std::int64_t completion, std::vector<Resolution>& out)
{
    Resolution r;
    r.task = task.id;
    r.origin = task.origin;
    r.processor = task.processor;
    r.slice = task.slice;
    r.created_slot = task.created_slot;
    r.resolved_slot = slot;
    r.outcome = outcome;
    if (completion >= 0) {
        r.latency_slots = completion - task.created_slot;
        r.transit_slots = task.arrival_slot - task.created_slot;
        r.wait_slots = task.start_slot - task.arrival_slot;
        r.processing_slots = completion - task.start_slot;
    }
    switch (outcome) {
    case Outcome::Succeeded:
        ++counters_.succeeded;
        break;
    case Outcome::TimedOut:
        ++counters_.timed_out;
        break;
    case Outcome::Dropped:
        ++counters_.dropped;
        break;
    }
    if (log_)
        log_->resolved(r);
    out.push_back(r);
}

void Simulator::enqueue(Task task, int node, std::int64_t slot, std::vector<Resolution>& out)
{
    auto& state = nodes_[static_cast<std::size_t>(node)];
    const auto& slice = config_.slices[static_cast<std::size_t>(task.slice)];
    if (state.buffer_len(task.slice) >= slice.buffer_cap) {
        task.status = TaskStatus::Dropped;
        resolve(task, slot, Outcome::Dropped, -1, out);
        return;
    }
    task.status = TaskStatus::Queued;
    task.arrival_slot = slot;
    if (log_)
        log_->enqueued(slot, task);
    state.buffers[static_cast<std::size_t>(task.slice)].push_back(task);
}

void Simulator::start(Task& task, NodeState& node, int node_index, std::int64_t slot)
{
    task.status = TaskStatus::Running;
    task.start_slot = slot;
    task.processing_slots = processing_slots_at(node_index, task.slice);
    task.finish_time = slot + task.processing_slots;
    if (node_index < node_count()) {
        const auto k = static_cast<std::size_t>(task.slice);
        ++node.in_progress[k];
        node.occupied.cpu += 1;
        node.occupied.mem += node.mem_units_per_task[k];
        if (node.occupied.cpu > node.total.cpu || node.occupied.mem > node.total.mem)
            throw std::logic_error("Simulator: allocation exceeded the resource pool");
    }
    if (log_)
        log_->started(slot, task);
}

StepResult Simulator::step(std::span<const ActionPair> actions)
{
    const int I = node_count();
    const int K = config_.slice_count();
    const std::int64_t t = slot_;
    if (static_cast<int>(actions.size()) != I)
        throw std::invalid_argument("Simulator::step: expected one action per node");

    for (int i = 0; i < I; ++i) {
        if (!spaces_[static_cast<std::size_t>(i)].is_valid(observe(i), actions[static_cast<std::size_t>(i)])) {
            std::ostringstream os;
            os << "Simulator::step: invalid action for node " << i << " at slot " << t;
            throw std::invalid_argument(os.str());
        }
    }

    StepResult result;
    auto& resolved = result.resolved;

    // (a) route this slot's arrivals
    for (int i = 0; i < I; ++i) {
        const auto& act = actions[static_cast<std::size_t>(i)];
        const auto& src = config_.nodes[static_cast<std::size_t>(i)];
        int offloaded = 0;
        for (int k = 0; k < K; ++k) {
            const int f = act.offload[static_cast<std::size_t>(k)];
            if (f != 0 && f != i + 1)
                ++offloaded;
        }
        for (int k = 0; k < K; ++k) {
            if (!arrivals_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)])
                continue;
            const int f = act.offload[static_cast<std::size_t>(k)];
            Task task;
            task.id = next_id_++;
            task.slice = k;
            task.origin = i;
            task.processor = f - 1;
            task.created_slot = t;
            task.deadline_slot = t + config_.deadline_slots(k);
            ++counters_.created;
            if (log_)
                log_->created(t, task, f);
            if (f == i + 1) {
                enqueue(task, i, t, resolved);
                continue;
            }
            const Position dst = task.processor < I
                                     ? config_.nodes[static_cast<std::size_t>(task.processor)].position
                                     : config_.cloud.position;
            const auto transit = transmission_slots(
                src, dst, false, config_.slices[static_cast<std::size_t>(k)].packet_bits, offloaded,
                config_.channel);
            task.arrival_slot = t + std::max<std::int64_t>(transit, 1);
            task.status = TaskStatus::InTransit;
            transit_.push_back(task);
        }
    }

    // (b) deliver transfers that land this slot
    {
        std::vector<Task> still;
        still.reserve(transit_.size());
        for (auto& task : transit_) {
            if (task.arrival_slot > t) {
                still.push_back(task);
                continue;
            }
            if (task.processor == cloud_index()) {
                start(task, nodes_.front(), task.processor, t);
                cloud_.push_back(task);
            } else {
                enqueue(task, task.processor, t, resolved);
            }
        }
        transit_ = std::move(still);
    }

    // (c) allocations start the oldest waiting tasks
    for (int i = 0; i < I; ++i) {
        auto& node = nodes_[static_cast<std::size_t>(i)];
        const auto& act = actions[static_cast<std::size_t>(i)];
        for (int k = 0; k < K; ++k) {
            int want = act.allocate[static_cast<std::size_t>(k)];
            for (auto& task : node.buffers[static_cast<std::size_t>(k)]) {
                if (want == 0)
                    break;
                if (task.status != TaskStatus::Queued)
                    continue;
                start(task, node, i, t);
                --want;
            }
            if (want != 0)
                throw std::logic_error("Simulator: fewer waiting tasks than allocated");
        }
    }

    // (d) completions at the end of the slot
    const std::int64_t boundary = t + 1;
    auto complete = [&](const Task& task) {
        const Outcome o = task.finish_time < task.deadline_slot ? Outcome::Succeeded : Outcome::TimedOut;
        resolve(task, t, o, task.finish_time, resolved);
    };
    for (int i = 0; i < I; ++i) {
        auto& node = nodes_[static_cast<std::size_t>(i)];
        for (int k = 0; k < K; ++k) {
            auto& buf = node.buffers[static_cast<std::size_t>(k)];
            std::vector<Task> keep;
            keep.reserve(buf.size());
            for (auto& task : buf) {
                if (task.status == TaskStatus::Running && task.finish_time <= boundary) {
                    complete(task);
                    --node.in_progress[static_cast<std::size_t>(k)];
                    node.occupied.cpu -= 1;
                    node.occupied.mem -= node.mem_units_per_task[static_cast<std::size_t>(k)];
                } else {
                    keep.push_back(task);
                }
            }
            buf = std::move(keep);
        }
    }
    {
        std::vector<Task> keep;
        for (auto& task : cloud_) {
            if (task.finish_time <= boundary)
                complete(task);
            else
                keep.push_back(task);
        }
        cloud_ = std::move(keep);
    }

    // (e) anything still unfinished once its deadline has passed times out
    auto expire = [&](std::vector<Task>& tasks, NodeState* node) {
        std::vector<Task> keep;
        keep.reserve(tasks.size());
        for (auto& task : tasks) {
            if (boundary < task.deadline_slot) {
                keep.push_back(task);
                continue;
            }
            if (node && task.status == TaskStatus::Running) {
                const auto k = static_cast<std::size_t>(task.slice);
                --node->in_progress[k];
                node->occupied.cpu -= 1;
                node->occupied.mem -= node->mem_units_per_task[k];
            }
            resolve(task, t, Outcome::TimedOut, -1, resolved);
        }
        tasks = std::move(keep);
    };
    expire(transit_, nullptr);
    for (auto& node : nodes_)
        for (auto& buf : node.buffers)
            expire(buf, &node);
    expire(cloud_, nullptr);

    // (f) rewards, booked against the originating node
    result.local_rewards.assign(static_cast<std::size_t>(I), 0.0);
    {
        std::vector<std::vector<OutcomeRecord>> per_node(static_cast<std::size_t>(I));
        for (const auto& r : resolved)
            per_node[static_cast<std::size_t>(r.origin)].push_back({r.slice, r.outcome});
        for (int i = 0; i < I; ++i)
            result.local_rewards[static_cast<std::size_t>(i)] =
                local_reward(per_node[static_cast<std::size_t>(i)], config_.slices);
    }

    // (g) arrivals for the next slot
    for (int i = 0; i < I; ++i)
        arrivals_[static_cast<std::size_t>(i)] = sample_arrivals(rng_, config_, i);
    ++slot_;

    result.next = observe_all();
    return result;
}

void Simulator::check_invariants() const
{
    for (int i = 0; i < node_count(); ++i) {
        const auto& node = nodes_[static_cast<std::size_t>(i)];
        const auto g = occupied_resources(node.in_progress, node.mem_units_per_task);
        if (!(g == node.occupied))
            throw std::logic_error("invariant: occupied units disagree with in-progress counts");
        const auto r = node.available();
        if (r.cpu + g.cpu > node.total.cpu || r.mem + g.mem > node.total.mem)
            throw std::logic_error("invariant: resource conservation violated");
        for (int k = 0; k < config_.slice_count(); ++k) {
            const auto& buf = node.buffers[static_cast<std::size_t>(k)];
            int running = 0;
            for (const auto& task : buf)
                running += task.status == TaskStatus::Running ? 1 : 0;
            if (running != node.in_progress[static_cast<std::size_t>(k)])
                throw std::logic_error("invariant: in-progress count disagrees with buffer");
            if (static_cast<int>(buf.size()) > config_.slices[static_cast<std::size_t>(k)].buffer_cap)
                throw std::logic_error("invariant: buffer above capacity");
        }
    }
    const auto& c = counters_;
    if (c.created != c.succeeded + c.timed_out + c.dropped + in_system())
        throw std::logic_error("invariant: task accounting does not balance");
}

} // namespace fog::sim
