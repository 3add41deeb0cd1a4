#pragma once

#include "fog/sim/model.hpp"

#include <span>
#include <string_view>

namespace fog::sim {

enum class Outcome
{
    Succeeded,
    TimedOut,
    Dropped
};

const char* to_string(Outcome outcome);
Outcome outcome_from_string(std::string_view name);

/// A resolved task as seen by the reward: which slice, and how it ended.
/// Dropped tasks also count as failed, so they score -1 - xi_k.
struct OutcomeRecord
{
    int slice = 0;
    Outcome outcome = Outcome::Succeeded;
};

/// psi_i = (1/K) * sum over records of (+1 | -1) - xi_k * [dropped].
double local_reward(std::span<const OutcomeRecord> records, std::span<const SliceSpec> slices);

/// psi = sum_i psi_i; every agent trains on this one scalar.
double global_reward(std::span<const double> local_rewards);

} // namespace fog::sim
