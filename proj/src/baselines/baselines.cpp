#include "fog/baselines/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fog::baselines {

std::string_view to_string(AllocRule rule)
{
    return rule == AllocRule::RoundRobin ? "rr" : "pq";
}

AllocRule alloc_rule_from_string(std::string_view name)
{
    if (name == "rr")
        return AllocRule::RoundRobin;
    if (name == "pq")
        return AllocRule::PriorityQueuing;
    throw std::invalid_argument("unknown allocation rule '" + std::string(name) + "'");
}

int nearest_neighbor(const sim::NetworkConfig& config, int node)
{
    const auto& here = config.nodes[static_cast<std::size_t>(node)].position;
    int best = node;
    double best_d = 0.0;
    for (int j = 0; j < config.node_count(); ++j) {
        if (j == node)
            continue;
        const double d = sim::distance(here, config.nodes[static_cast<std::size_t>(j)].position);
        if (best == node || d < best_d) {
            best = j;
            best_d = d;
        }
    }
    return best;
}

int threshold_nearest_offload(const sim::Observation& obs, const sim::NetworkConfig& config, int node, int slice,
                              double threshold)
{
    const double cap = config.slices[static_cast<std::size_t>(slice)].buffer_cap;
    const double fill = obs.buffer_len[static_cast<std::size_t>(slice)] / cap;
    return fill > threshold ? nearest_neighbor(config, node) : node;
}

namespace {

int waiting(const sim::Observation& obs, int k)
{
    return obs.buffer_len[static_cast<std::size_t>(k)] - obs.in_progress[static_cast<std::size_t>(k)];
}

} // namespace

std::vector<int> RoundRobin::allocate(const sim::Observation& obs, const sim::ActionSpace& space)
{
    const int slices = obs.slice_count();
    std::vector<int> w(static_cast<std::size_t>(slices), 0);
    int cpu = obs.cpu_avail;
    int mem = obs.mem_avail;
    bool granted = true;
    while (granted) {
        granted = false;
        for (int step = 0; step < slices; ++step) {
            const int k = (pointer_ + step) % slices;
            const auto ku = static_cast<std::size_t>(k);
            const int m = space.mem_units_per_task()[ku];
            if (w[ku] < waiting(obs, k) && w[ku] < space.max_alloc()[ku] && cpu >= 1 && mem >= m) {
                ++w[ku];
                --cpu;
                mem -= m;
                pointer_ = (k + 1) % slices;
                granted = true;
                break;
            }
        }
    }
    return w;
}

std::vector<int> pq_allocate(const sim::Observation& obs, const sim::ActionSpace& space,
                             const std::vector<sim::SliceSpec>& slices)
{
    const int count = obs.slice_count();
    std::vector<int> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return slices[static_cast<std::size_t>(a)].delay_budget_ms < slices[static_cast<std::size_t>(b)].delay_budget_ms;
    });
    std::vector<int> w(static_cast<std::size_t>(count), 0);
    int cpu = obs.cpu_avail;
    int mem = obs.mem_avail;
    for (int k : order) {
        const auto ku = static_cast<std::size_t>(k);
        const int m = space.mem_units_per_task()[ku];
        const int n = std::min({waiting(obs, k), space.max_alloc()[ku], cpu, m > 0 ? mem / m : cpu});
        if (n <= 0)
            continue;
        w[ku] = n;
        cpu -= n;
        mem -= n * m;
    }
    return w;
}

BaselinePolicy::BaselinePolicy(const sim::NetworkConfig& config, int node, BaselineConfig bc)
    : config_(&config), node_(node), bc_(bc), space_(config, node)
{
    if (!(bc.buffer_threshold > 0.0 && bc.buffer_threshold <= 1.0))
        throw std::invalid_argument("BaselinePolicy: threshold must be in (0,1]");
}

sim::ActionPair BaselinePolicy::act(const sim::Observation& obs)
{
    sim::ActionPair a;
    for (int k = 0; k < obs.slice_count(); ++k) {
        if (obs.arrivals[static_cast<std::size_t>(k)] == 0)
            a.offload.push_back(0);
        else
            a.offload.push_back(threshold_nearest_offload(obs, *config_, node_, k, bc_.buffer_threshold) + 1);
    }
    a.allocate = bc_.alloc == AllocRule::RoundRobin ? rr_.allocate(obs, space_) : pq_allocate(obs, space_, config_->slices);
    return a;
}

} // namespace fog::baselines
