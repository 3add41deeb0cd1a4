#pragma once

#include "fog/sim/model.hpp"

#include <vector>

namespace fog::test {

inline sim::SliceSpec standard_slice(double budget_ms, double rate, int cap = 10)
{
    sim::SliceSpec s;
    s.name = "std";
    s.packet_bits = 5e4;
    s.delay_budget_ms = budget_ms;
    s.cpu_density = 400;
    s.mem_demand_mb = 400;
    s.arrival_rate = rate;
    s.overflow_weight = 1.0;
    s.buffer_cap = cap;
    return s;
}

inline sim::NodeSpec fog_node(double x, double y, double cpu_ghz = 5, double mem_mb = 4000)
{
    sim::NodeSpec n;
    n.position = {x, y};
    n.cpu_capacity_hz = cpu_ghz * 1e9;
    n.mem_capacity_mb = mem_mb;
    n.cpu_unit_hz = 1e9;
    n.mem_unit_mb = 400;
    n.bandwidth_hz = 1e6;
    n.tx_power_w = 0.1;
    return n;
}

/// Desk-scale network: `nodes` fog nodes 50 m apart on a line, `slices`
/// standard slices, 1 ms slots, cloud 10 km away.
inline sim::NetworkConfig small_network(int nodes, int slices, double rate, double budget_ms = 50,
                                        int cap = 10, std::uint64_t seed = 1)
{
    sim::NetworkConfig c;
    for (int i = 0; i < nodes; ++i)
        c.nodes.push_back(fog_node(50.0 * i, 0.0));
    for (int k = 0; k < slices; ++k)
        c.slices.push_back(standard_slice(budget_ms, rate, cap));
    c.cloud.position = {1e4, 0.0};
    c.cloud.cpu_unit_hz = 1e10;
    c.cloud.mem_unit_mb = 400;
    c.channel.slot_ms = 1.0;
    c.seed = seed;
    return c;
}

} // namespace fog::test
