#pragma once

#include "fog/sim/model.hpp"

#include <cstdint>
#include <span>

namespace fog::sim {

/// Shannon rate in bit/s when `src` shares its bandwidth among `concurrent`
/// offloaded tasks. Throws std::invalid_argument for zero distance or
/// concurrent < 1.
double transmission_rate(const NodeSpec& src, const Position& dst, int concurrent,
                         const ChannelParams& channel);

/// Transit delay in slots; zero when the task stays local.
std::int64_t transmission_slots(const NodeSpec& src, const Position& dst, bool local,
                                double packet_bits, int concurrent,
                                const ChannelParams& channel);

/// Execution time in slots on one CPU unit of speed `cpu_unit_hz`.
std::int64_t processing_slots(double cpu_unit_hz, const SliceSpec& slice,
                              const ChannelParams& channel);

struct ResourceUnits
{
    int cpu = 0;
    int mem = 0;

    friend bool operator==(const ResourceUnits&, const ResourceUnits&) = default;
};

/// g^c = sum of in-progress counts, g^m = sum of in-progress * memory units per task.
ResourceUnits occupied_resources(std::span<const int> in_progress,
                                 std::span<const int> mem_units_per_task);

/// r = N - g. Throws std::logic_error if the result would be negative.
ResourceUnits available_resources(const ResourceUnits& total, const ResourceUnits& occupied);

} // namespace fog::sim
