#include "fog/sim/formulas.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fog::sim {

double transmission_rate(const NodeSpec& src, const Position& dst, int concurrent,
                         const ChannelParams& channel)
{
    if (concurrent < 1)
        throw std::invalid_argument("transmission_rate: concurrent offload count must be >= 1");
    const double d = distance(src.position, dst);
    if (!(d > 0.0))
        throw std::invalid_argument("transmission_rate: zero distance has no rate");

    const double share = src.bandwidth_hz / concurrent;
    const double gain = channel.path_loss_const * std::pow(d, -channel.path_loss_exp);
    const double snr = gain * src.tx_power_w / (share * channel.noise_psd);
    const double nats = std::log1p(snr);
    const double capacity = channel.log_base == LogBase::Two ? nats / std::numbers::ln2 : nats;
    return share * capacity;
}

std::int64_t transmission_slots(const NodeSpec& src, const Position& dst, bool local,
                                double packet_bits, int concurrent,
                                const ChannelParams& channel)
{
    if (local)
        return 0;
    const double rate = transmission_rate(src, dst, concurrent, channel);
    return seconds_to_slots(packet_bits / rate, channel.slot_ms);
}

std::int64_t processing_slots(double cpu_unit_hz, const SliceSpec& slice,
                              const ChannelParams& channel)
{
    if (!(cpu_unit_hz > 0.0))
        throw std::invalid_argument("processing_slots: cpu unit must be > 0");
    const double cycles = slice.packet_bits * slice.cpu_density;
    return seconds_to_slots(cycles / cpu_unit_hz, channel.slot_ms);
}

ResourceUnits occupied_resources(std::span<const int> in_progress,
                                 std::span<const int> mem_units_per_task)
{
    if (in_progress.size() != mem_units_per_task.size())
        throw std::invalid_argument("occupied_resources: slice count mismatch");
    ResourceUnits g;
    for (std::size_t k = 0; k < in_progress.size(); ++k) {
        g.cpu += in_progress[k];
        g.mem += in_progress[k] * mem_units_per_task[k];
    }
    return g;
}

ResourceUnits available_resources(const ResourceUnits& total, const ResourceUnits& occupied)
{
    const ResourceUnits r{total.cpu - occupied.cpu, total.mem - occupied.mem};
    if (r.cpu < 0 || r.mem < 0)
        throw std::logic_error("available_resources: occupied units exceed the pool");
    return r;
}

} // namespace fog::sim
