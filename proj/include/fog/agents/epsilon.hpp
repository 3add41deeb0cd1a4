#pragma once

#include <cstdint>

namespace fog::agents {

enum class DecayRule
{
    // decay = (ln start - ln min) / R: reaches the floor at the end of each cycle
    ReachFloor,
    // decay = -ln(min / R) - start / R; collapses to the floor within a slot
    LogRatio
};

struct EpsilonConfig
{
    double start = 1.0;
    double min = 0.01;
    std::int64_t renewal_period = 5000;
    double renewal_factor = 0.9;
    DecayRule rule = DecayRule::ReachFloor;
};

/// Exponentially decaying epsilon that restarts every renewal period from a
/// geometrically shrinking peak.
class EpsilonSchedule
{
public:
    explicit EpsilonSchedule(EpsilonConfig config = {});

    /// max(exp(-decay * (t mod R) + ln start), min)
    double value(std::int64_t t) const;

    /// start <- factor * start, decay recomputed.
    void renew();
    /// Renews when t is a positive multiple of the period.
    void on_slot(std::int64_t t);

    double start() const { return start_; }
    double decay() const { return decay_; }
    const EpsilonConfig& config() const { return config_; }
    void restore(double start, double decay)
    {
        start_ = start;
        decay_ = decay;
    }

    static double decay_for(const EpsilonConfig& c, double start);

private:
    EpsilonConfig config_;
    double start_;
    double decay_;
};

} // namespace fog::agents
