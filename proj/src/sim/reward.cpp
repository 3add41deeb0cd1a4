#include "fog/sim/reward.hpp"

#include <stdexcept>
#include <string>

namespace fog::sim {

const char* to_string(Outcome outcome)
{
    switch (outcome) {
    case Outcome::Succeeded:
        return "succeeded";
    case Outcome::TimedOut:
        return "timed_out";
    case Outcome::Dropped:
        return "dropped";
    }
    return "?";
}

Outcome outcome_from_string(std::string_view name)
{
    if (name == "succeeded")
        return Outcome::Succeeded;
    if (name == "timed_out")
        return Outcome::TimedOut;
    if (name == "dropped")
        return Outcome::Dropped;
    throw std::invalid_argument("unknown outcome '" + std::string(name) + "'");
}

double local_reward(std::span<const OutcomeRecord> records, std::span<const SliceSpec> slices)
{
    if (slices.empty())
        throw std::invalid_argument("local_reward: no slices");
    double sum = 0.0;
    for (const auto& r : records) {
        const auto& slice = slices[static_cast<std::size_t>(r.slice)];
        sum += r.outcome == Outcome::Succeeded ? 1.0 : -1.0;
        if (r.outcome == Outcome::Dropped)
            sum -= slice.overflow_weight;
    }
    return sum / static_cast<double>(slices.size());
}

double global_reward(std::span<const double> local_rewards)
{
    double sum = 0.0;
    for (double r : local_rewards)
        sum += r;
    return sum;
}

} // namespace fog::sim
