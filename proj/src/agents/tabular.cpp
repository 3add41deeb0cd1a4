#include "fog/agents/tabular.hpp"

#include <algorithm>
#include <stdexcept>

namespace fog::agents {

double TabularQ::get(const std::vector<int>& obs, int action) const
{
    const auto it = table_.find(obs);
    return it == table_.end() ? 0.0 : it->second[static_cast<std::size_t>(action)];
}

std::vector<double> TabularQ::row(const std::vector<int>& obs) const
{
    const auto it = table_.find(obs);
    return it == table_.end() ? std::vector<double>(static_cast<std::size_t>(actions_), 0.0) : it->second;
}

std::vector<double>& TabularQ::row_mut(const std::vector<int>& obs)
{
    auto [it, fresh] = table_.try_emplace(obs);
    if (fresh)
        it->second.assign(static_cast<std::size_t>(actions_), 0.0);
    return it->second;
}

double TabularQ::max_value(const std::vector<int>& obs, std::span<const std::uint8_t> mask) const
{
    const auto r = row(obs);
    bool any = false;
    double best = 0.0;
    for (std::size_t a = 0; a < r.size(); ++a) {
        if (!mask.empty() && !mask[a])
            continue;
        best = any ? std::max(best, r[a]) : r[a];
        any = true;
    }
    if (!any)
        throw std::invalid_argument("TabularQ::max_value: no admissible action");
    return best;
}

double tabular_q_update(TabularQ& table, const std::vector<int>& obs, int action, double reward,
                        const std::vector<int>& next_obs, double alpha, double gamma,
                        std::span<const std::uint8_t> next_mask, bool terminal)
{
    const double target = terminal ? reward : reward + gamma * table.max_value(next_obs, next_mask);
    double& q = table.row_mut(obs)[static_cast<std::size_t>(action)];
    q = (1.0 - alpha) * q + alpha * target;
    return q;
}

SpaceCount state_space_count(const SpaceCountInput& in)
{
    if (in.buffer_caps.size() != in.max_alloc.size() || in.buffer_caps.empty())
        throw std::invalid_argument("state_space_count: per-slice lists must be non-empty and equal length");
    SpaceCount c;
    c.observations = BigInt(1 + in.cpu_units) * BigInt(1 + in.mem_units);
    c.actions = 1;
    for (std::size_t k = 0; k < in.buffer_caps.size(); ++k) {
        const BigInt b = 1 + in.buffer_caps[k];
        c.observations *= 2 * b * b;
        c.actions *= BigInt(in.nodes + 2) * BigInt(1 + in.max_alloc[k]);
    }
    return c;
}

SpaceCount state_space_count(const sim::NetworkConfig& config, int node)
{
    SpaceCountInput in;
    in.nodes = config.node_count();
    const auto& spec = config.nodes[static_cast<std::size_t>(node)];
    in.cpu_units = spec.cpu_units();
    in.mem_units = spec.mem_units();
    for (int k = 0; k < config.slice_count(); ++k) {
        in.buffer_caps.push_back(config.slices[static_cast<std::size_t>(k)].buffer_cap);
        in.max_alloc.push_back(config.max_alloc(node, k));
    }
    return state_space_count(in);
}

} // namespace fog::agents
