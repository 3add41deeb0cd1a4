#include "fog/agents/epsilon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fog::agents {

EpsilonSchedule::EpsilonSchedule(EpsilonConfig config) : config_(config), start_(config.start)
{
    if (!(config.min > 0.0) || config.min > config.start || config.start > 1.0)
        throw std::invalid_argument("EpsilonSchedule: need 0 < min <= start <= 1");
    if (config.renewal_period < 1)
        throw std::invalid_argument("EpsilonSchedule: renewal period must be positive");
    if (!(config.renewal_factor > 0.0 && config.renewal_factor < 1.0))
        throw std::invalid_argument("EpsilonSchedule: renewal factor must be in (0,1)");
    decay_ = decay_for(config_, start_);
}

double EpsilonSchedule::decay_for(const EpsilonConfig& c, double start)
{
    const double r = static_cast<double>(c.renewal_period);
    const double d = c.rule == DecayRule::ReachFloor ? (std::log(start) - std::log(c.min)) / r
                                                     : -std::log(c.min / r) - start / r;
    // a peak already below the floor would otherwise make epsilon grow within the cycle
    return std::max(d, 0.0);
}

double EpsilonSchedule::value(std::int64_t t) const
{
    const auto phase = static_cast<double>(t % config_.renewal_period);
    return std::max(std::exp(-decay_ * phase + std::log(start_)), config_.min);
}

void EpsilonSchedule::renew()
{
    start_ *= config_.renewal_factor;
    decay_ = decay_for(config_, start_);
}

void EpsilonSchedule::on_slot(std::int64_t t)
{
    if (t > 0 && t % config_.renewal_period == 0)
        renew();
}

} // namespace fog::agents
