#include "fog/sim/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fog::sim {

namespace {

[[noreturn]] void reject(const std::string& what)
{
    throw std::invalid_argument(what);
}

} // namespace

double distance(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

void SliceSpec::validate() const
{
    if (!(packet_bits > 0.0))
        reject("slice '" + name + "': packet_bits must be > 0");
    if (!(delay_budget_ms > 0.0))
        reject("slice '" + name + "': delay_budget_ms must be > 0");
    if (!(cpu_density >= 0.0))
        reject("slice '" + name + "': cpu_density must be >= 0");
    if (!(mem_demand_mb > 0.0))
        reject("slice '" + name + "': mem_demand_mb must be > 0");
    if (!(arrival_rate >= 0.0 && arrival_rate <= 1.0))
        reject("slice '" + name + "': arrival_rate must lie in [0, 1]");
    if (!(overflow_weight >= 0.0))
        reject("slice '" + name + "': overflow_weight must be >= 0");
    if (buffer_cap < 1)
        reject("slice '" + name + "': buffer_cap must be >= 1");
}

int NodeSpec::cpu_units() const
{
    return static_cast<int>(std::floor(cpu_capacity_hz / cpu_unit_hz + 1e-9));
}

int NodeSpec::mem_units() const
{
    return static_cast<int>(std::floor(mem_capacity_mb / mem_unit_mb + 1e-9));
}

void NodeSpec::validate() const
{
    if (!(cpu_unit_hz > 0.0) || !(mem_unit_mb > 0.0))
        reject("node: resource units must be > 0");
    if (cpu_unit_hz > cpu_capacity_hz || mem_unit_mb > mem_capacity_mb)
        reject("node: resource unit exceeds capacity");
    if (cpu_units() < 1 || mem_units() < 1)
        reject("node: needs at least one CPU and one memory unit");
    if (!(bandwidth_hz > 0.0) || !(tx_power_w > 0.0))
        reject("node: bandwidth and tx power must be > 0");
}

void ChannelParams::validate() const
{
    if (!(path_loss_const > 0.0) || !(path_loss_exp > 0.0))
        reject("channel: path loss constant and exponent must be > 0");
    if (!(noise_psd > 0.0))
        reject("channel: noise_psd must be > 0");
    if (!(slot_ms > 0.0))
        reject("channel: slot_ms must be > 0");
}

double NetworkConfig::arrival_rate(int node, int slice) const
{
    if (!arrival_rates.empty())
        return arrival_rates.at(static_cast<std::size_t>(node)).at(static_cast<std::size_t>(slice));
    return slices.at(static_cast<std::size_t>(slice)).arrival_rate;
}

int NetworkConfig::mem_units_per_task(int node, int slice) const
{
    const auto& n = nodes.at(static_cast<std::size_t>(node));
    const auto& s = slices.at(static_cast<std::size_t>(slice));
    const double q = s.mem_demand_mb / n.mem_unit_mb;
    return static_cast<int>(std::ceil(q - 1e-9 * q));
}

int NetworkConfig::max_alloc(int node, int slice) const
{
    const auto& n = nodes.at(static_cast<std::size_t>(node));
    const auto& s = slices.at(static_cast<std::size_t>(slice));
    const int by_memory = static_cast<int>(std::floor(n.mem_capacity_mb / s.mem_demand_mb + 1e-9));
    return std::min(s.buffer_cap, by_memory);
}

int NetworkConfig::deadline_slots(int slice) const
{
    const auto& s = slices.at(static_cast<std::size_t>(slice));
    return static_cast<int>(seconds_to_slots(s.delay_budget_ms / 1000.0, channel.slot_ms));
}

void NetworkConfig::validate() const
{
    if (nodes.empty())
        reject("config: at least one fog node is required");
    if (slices.empty())
        reject("config: at least one slice is required");
    channel.validate();
    for (const auto& s : slices)
        s.validate();
    for (const auto& n : nodes)
        n.validate();
    if (!(cloud.cpu_unit_hz > 0.0) || !(cloud.mem_unit_mb > 0.0))
        reject("config: cloud resource units must be > 0");
    if (!arrival_rates.empty()) {
        if (arrival_rates.size() != nodes.size())
            reject("config: arrival_rates must have one row per node");
        for (const auto& row : arrival_rates) {
            if (row.size() != slices.size())
                reject("config: arrival_rates rows must have one entry per slice");
            for (double r : row)
                if (!(r >= 0.0 && r <= 1.0))
                    reject("config: arrival rates must lie in [0, 1]");
        }
    }
    for (int i = 0; i < node_count(); ++i) {
        for (int k = 0; k < slice_count(); ++k) {
            if (max_alloc(i, k) < 1) {
                std::ostringstream os;
                os << "config: node " << i << " cannot hold a single task of slice '"
                   << slices[static_cast<std::size_t>(k)].name << "' (W^max = 0)";
                reject(os.str());
            }
            if (mem_units_per_task(i, k) > nodes[static_cast<std::size_t>(i)].mem_units()) {
                std::ostringstream os;
                os << "config: node " << i << " lacks memory units for slice '"
                   << slices[static_cast<std::size_t>(k)].name << "'";
                reject(os.str());
            }
        }
        for (int j = 0; j < i; ++j)
            if (distance(nodes[static_cast<std::size_t>(i)].position,
                         nodes[static_cast<std::size_t>(j)].position) == 0.0)
                reject("config: two fog nodes share a position");
    }
}

std::int64_t seconds_to_slots(double seconds, double slot_ms)
{
    const double q = seconds * 1000.0 / slot_ms;
    const double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q)))
        return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::ceil(q));
}

} // namespace fog::sim
