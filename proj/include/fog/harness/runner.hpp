#pragma once

#include "fog/harness/metrics.hpp"
#include "fog/harness/scenario.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fog::harness {

struct RunOptions
{
    // empty: no files are written
    std::string out_dir;
    bool write_events = true;
    bool check_invariants = true;
    // called every `progress_every` slots with the slot index
    std::function<void(std::int64_t)> progress;
    std::int64_t progress_every = 1000;
};

struct RunResult
{
    RunMetrics metrics;
    sim::TaskCounters counters;
    std::int64_t in_system = 0;
    std::vector<std::int64_t> train_steps;
    // mean training loss per slot over nodes that trained, NaN otherwise
    std::vector<double> loss;
};

/// Agent input features for one observation; normalized divides queue lengths
/// by the buffer cap and free units by the node's totals.
std::vector<double> features(const sim::Observation& obs, const sim::NetworkConfig& config, int node,
                             bool normalize);

/// Runs the per-slot lockstep protocol for config.iterations slots. Throws on
/// divergence or a broken simulator invariant, after writing diagnostic.json.
RunResult run(const ScenarioConfig& config, const RunOptions& options = {});

struct SweepPoint
{
    double lambda = 0.0;
    RunResult result;
};

/// One independent run per arrival rate, each in out_dir/lambda_<value>.
std::vector<SweepPoint> sweep(const ScenarioConfig& base, const std::vector<double>& lambdas,
                              const RunOptions& options = {});

nlohmann::ordered_json sweep_table(const std::vector<SweepPoint>& points);

/// Sliding-window reward comparison between the start of learning and the end
/// of the run.
struct Progress
{
    double first = 0.0;
    double last = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    double improvement() const { return last - first; }
    double range() const { return hi - lo; }
    bool passed(double fraction) const { return improvement() >= fraction * range(); }
};

/// Windows of `width` slots sliding over [from, end). Throws when the span is
/// shorter than one window.
Progress learning_progress(const std::vector<double>& global_reward, std::int64_t from, std::int64_t width);

} // namespace fog::harness
