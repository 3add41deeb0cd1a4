#pragma once

#include "fog/sim/model.hpp"

#include <cstdint>
#include <vector>

namespace fog::sim {

/// Local view of one fog node at the start of a slot: (A, B, B^e, R).
struct Observation
{
    std::vector<int> arrivals;
    std::vector<int> buffer_len;
    std::vector<int> in_progress;
    int cpu_avail = 0;
    int mem_avail = 0;

    int slice_count() const { return static_cast<int>(arrivals.size()); }
    int dim() const { return 3 * slice_count() + 2; }

    /// Flattened as A, B, B^e, r^c, r^m.
    std::vector<double> flatten() const;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Offload codes: 0 = no arrival, j+1 = fog node j (own index means local),
/// node_count+1 = cloud.
struct ActionPair
{
    std::vector<int> offload;
    std::vector<int> allocate;

    friend bool operator==(const ActionPair&, const ActionPair&) = default;
};

/// Flat action indexing for one node. The index is offload_code * alloc_count +
/// alloc_code, both mixed-radix with slice 0 as the least significant digit.
class ActionSpace
{
public:
    ActionSpace(int node, int node_count, std::vector<int> max_alloc,
                std::vector<int> mem_units_per_task);
    ActionSpace(const NetworkConfig& config, int node);

    int node() const { return node_; }
    int node_count() const { return node_count_; }
    int slice_count() const { return static_cast<int>(max_alloc_.size()); }
    int local_code() const { return node_ + 1; }
    int cloud_code() const { return node_count_ + 1; }
    const std::vector<int>& max_alloc() const { return max_alloc_; }
    const std::vector<int>& mem_units_per_task() const { return mem_units_; }

    std::int64_t size() const { return offload_count_ * alloc_count_; }
    std::int64_t offload_count() const { return offload_count_; }
    std::int64_t alloc_count() const { return alloc_count_; }

    ActionPair decode(std::int64_t index) const;
    std::int64_t encode(const ActionPair& action) const;

    /// Direct check of the four action constraints against `obs`.
    bool is_valid(const Observation& obs, const ActionPair& action) const;

    /// mask[x] != 0 iff decode(x) satisfies the constraints.
    std::vector<std::uint8_t> mask(const Observation& obs) const;

    /// The index with no offload decision beyond what arrivals force and w = 0.
    /// Every arrival is routed locally; valid whenever local routing is.
    std::int64_t idle_local_index(const Observation& obs) const;

private:
    int node_;
    int node_count_;
    std::vector<int> max_alloc_;
    std::vector<int> mem_units_;
    std::int64_t offload_count_ = 1;
    std::int64_t alloc_count_ = 1;
};

} // namespace fog::sim
