#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fog::sim {

struct Position
{
    double x = 0.0;
    double y = 0.0;
};

double distance(const Position& a, const Position& b);

/// Static parameters of one slice (task type). Units: bits, ms, cycles/bit, MB.
struct SliceSpec
{
    std::string name;
    double packet_bits = 0.0;
    double delay_budget_ms = 0.0;
    double cpu_density = 0.0;
    double mem_demand_mb = 0.0;
    double arrival_rate = 0.0;
    double overflow_weight = 1.0;
    int buffer_cap = 1;

    void validate() const;
};

struct NodeSpec
{
    Position position;
    double cpu_capacity_hz = 0.0;
    double mem_capacity_mb = 0.0;
    double cpu_unit_hz = 0.0;
    double mem_unit_mb = 0.0;
    double bandwidth_hz = 0.0;
    double tx_power_w = 0.0;

    int cpu_units() const;
    int mem_units() const;
    void validate() const;
};

/// The cloud has no buffer and no resource cap.
struct CloudSpec
{
    Position position;
    double cpu_unit_hz = 0.0;
    double mem_unit_mb = 0.0;
};

enum class LogBase
{
    Two,
    Natural
};

struct ChannelParams
{
    double path_loss_const = 1e-3;
    double path_loss_exp = 4.0;
    double noise_psd = 3.981071705534972e-21;
    double slot_ms = 1.0;
    LogBase log_base = LogBase::Two;

    void validate() const;
};

/// Fully resolved description of one fog network instance.
struct NetworkConfig
{
    std::vector<NodeSpec> nodes;
    std::vector<SliceSpec> slices;
    CloudSpec cloud;
    ChannelParams channel;
    // Optional [node][slice] override of SliceSpec::arrival_rate.
    std::vector<std::vector<double>> arrival_rates;
    std::uint64_t seed = 0;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int slice_count() const { return static_cast<int>(slices.size()); }

    double arrival_rate(int node, int slice) const;
    // ceil(L^m_k / eta^m_i)
    int mem_units_per_task(int node, int slice) const;
    // W^max_{i,k} = min(buffer cap, floor(U^m_i / L^m_k))
    int max_alloc(int node, int slice) const;
    // Deadline offset in slots, ceil(D^max_k / dt).
    int deadline_slots(int slice) const;

    /// Throws std::invalid_argument with a diagnostic on any infeasible setting.
    void validate() const;
};

/// Converts a duration in seconds to whole slots, rounding up. Values within
/// 1e-9 relative of an integer snap to it so 0.02 s / 1 ms is 20, not 21.
std::int64_t seconds_to_slots(double seconds, double slot_ms);

} // namespace fog::sim
