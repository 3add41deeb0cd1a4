#pragma once

#include "fog/sim/action_space.hpp"
#include "fog/sim/model.hpp"

#include <string_view>
#include <vector>

namespace fog::baselines {

enum class AllocRule
{
    RoundRobin,
    PriorityQueuing
};

std::string_view to_string(AllocRule rule);
AllocRule alloc_rule_from_string(std::string_view name);

struct BaselineConfig
{
    double buffer_threshold = 0.8;
    AllocRule alloc = AllocRule::RoundRobin;
};

/// Closest other fog node, lowest index on ties; the node itself when alone.
int nearest_neighbor(const sim::NetworkConfig& config, int node);

/// Destination node for an arrival on slice k: the nearest neighbor when the
/// buffer is above the threshold fraction of its capacity, else the node itself.
int threshold_nearest_offload(const sim::Observation& obs, const sim::NetworkConfig& config, int node, int slice,
                              double threshold);

/// Rotating one-task-per-visit grants; the pointer persists across slots.
class RoundRobin
{
public:
    std::vector<int> allocate(const sim::Observation& obs, const sim::ActionSpace& space);
    int pointer() const { return pointer_; }

private:
    int pointer_ = 0;
};

/// Ascending delay budget (lower slice index on ties), each slice served as far
/// as resources allow before the next. A slice whose memory demand does not fit
/// is skipped.
std::vector<int> pq_allocate(const sim::Observation& obs, const sim::ActionSpace& space,
                             const std::vector<sim::SliceSpec>& slices);

class BaselinePolicy
{
public:
    BaselinePolicy(const sim::NetworkConfig& config, int node, BaselineConfig bc);

    sim::ActionPair act(const sim::Observation& obs);

private:
    const sim::NetworkConfig* config_;
    int node_;
    BaselineConfig bc_;
    sim::ActionSpace space_;
    RoundRobin rr_;
};

} // namespace fog::baselines
