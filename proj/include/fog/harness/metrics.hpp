#pragma once

#include "fog/sim/simulator.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fog::harness {

/// Outcome tallies over a set of resolved tasks.
struct Tally
{
    std::int64_t resolved = 0;
    std::int64_t succeeded = 0;
    std::int64_t timed_out = 0;
    std::int64_t dropped = 0;
    // realized latency of succeeded tasks, in slots
    std::int64_t latency_slots = 0;

    void add(const sim::Resolution& r);
    Tally& operator+=(const Tally& o);

    // absent when nothing resolved
    std::optional<double> success_rate() const;
    std::optional<double> overflow_rate() const;
    std::optional<double> timeout_rate() const;
    std::optional<double> avg_delay_ms(double slot_ms) const;

    friend bool operator==(const Tally&, const Tally&) = default;
};

struct MetricsLayout
{
    int nodes = 0;
    int slices = 0;
    double slot_ms = 1.0;
    std::int64_t iterations = 0;
    // tasks created in [iterations - window, iterations) form the reported window
    std::int64_t window = 5000;
    std::int64_t curve_block = 500;
    std::vector<double> overflow_weights;

    friend bool operator==(const MetricsLayout&, const MetricsLayout&) = default;
};

struct Range
{
    std::optional<double> min;
    std::optional<double> max;
    friend bool operator==(const Range&, const Range&) = default;
};

struct RunMetrics
{
    MetricsLayout layout;
    std::int64_t created = 0;
    Tally overall;
    Tally window;
    // trailing-window tallies by origin node and by slice
    std::vector<Tally> per_node;
    std::vector<Tally> per_slice;
    Range node_success;
    Range node_overflow;
    Range node_delay_ms;
    // sum of local rewards per slot
    std::vector<double> global_reward;
    // block means of global_reward
    std::vector<double> reward_curve;

    std::int64_t window_begin() const;
    nlohmann::ordered_json to_json() const;

    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Builds RunMetrics from resolution records; the live run and the event-log
/// replay feed it the same records in the same order.
class MetricsAccumulator
{
public:
    explicit MetricsAccumulator(MetricsLayout layout);

    void created(std::int64_t n) { created_ += n; }
    /// All resolutions of slot `slot`, in simulator order.
    void slot_resolved(std::int64_t slot, const std::vector<sim::Resolution>& resolved);
    RunMetrics finish() const;

    /// Per-origin local rewards of the slot last passed to slot_resolved.
    const std::vector<double>& last_local_rewards() const { return last_local_; }

private:
    MetricsLayout layout_;
    std::vector<sim::SliceSpec> slices_;
    std::int64_t created_ = 0;
    Tally overall_;
    Tally window_;
    std::vector<Tally> per_node_;
    std::vector<Tally> per_slice_;
    std::vector<double> reward_;
    std::vector<double> last_local_;
};

/// Writes the harness "run" record that makes an event log self-describing.
void write_run_record(std::ostream& out, const MetricsLayout& layout);
void write_end_record(std::ostream& out, std::int64_t slots);

/// Recomputes the metrics from a complete event log. Throws std::runtime_error
/// naming the line number on malformed input.
RunMetrics compute_metrics(std::istream& log);
RunMetrics compute_metrics_file(const std::string& path);

/// Mean of each sliding window of `width` consecutive values over [from, to).
std::vector<double> sliding_means(const std::vector<double>& v, std::size_t from, std::size_t to, std::size_t width);

} // namespace fog::harness
