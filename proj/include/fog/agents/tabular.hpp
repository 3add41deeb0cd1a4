#pragma once

#include "fog/sim/model.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace fog::agents {

/// Q-table keyed by the raw observation vector; unseen rows read as zero.
class TabularQ
{
public:
    explicit TabularQ(int action_count) : actions_(action_count) {}

    int action_count() const { return actions_; }
    std::size_t states() const { return table_.size(); }

    double get(const std::vector<int>& obs, int action) const;
    std::vector<double> row(const std::vector<int>& obs) const;
    std::vector<double>& row_mut(const std::vector<int>& obs);

    /// Max over the actions admitted by `mask`, or over all when `mask` is empty.
    double max_value(const std::vector<int>& obs, std::span<const std::uint8_t> mask = {}) const;

private:
    int actions_;
    std::map<std::vector<int>, std::vector<double>> table_;
};

/// Q(o,x) <- (1 - alpha) Q(o,x) + alpha (reward + gamma max_x' Q(o',x')).
/// `next_mask` restricts the max to valid next actions when non-empty.
double tabular_q_update(TabularQ& table, const std::vector<int>& obs, int action, double reward,
                        const std::vector<int>& next_obs, double alpha, double gamma,
                        std::span<const std::uint8_t> next_mask = {}, bool terminal = false);

using BigInt = boost::multiprecision::cpp_int;

struct SpaceCountInput
{
    int nodes = 0;
    std::vector<int> buffer_caps; // per slice
    int cpu_units = 0;
    int mem_units = 0;
    std::vector<int> max_alloc; // per slice
};

struct SpaceCount
{
    BigInt observations;
    BigInt actions;
    BigInt product() const { return observations * actions; }
};

/// |O| = prod_k 2 (1 + cap_k)^2 * (1 + N^c)(1 + N^m);  |X| = (I + 2)^K prod_k (1 + W_k).
SpaceCount state_space_count(const SpaceCountInput& in);
SpaceCount state_space_count(const sim::NetworkConfig& config, int node);

} // namespace fog::agents
