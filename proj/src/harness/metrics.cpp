#include "fog/harness/metrics.hpp"

#include "fog/sim/reward.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace fog::harness {

using nlohmann::json;
using nlohmann::ordered_json;

void Tally::add(const sim::Resolution& r)
{
    ++resolved;
    switch (r.outcome) {
    case sim::Outcome::Succeeded:
        ++succeeded;
        latency_slots += r.latency_slots;
        break;
    case sim::Outcome::TimedOut: ++timed_out; break;
    case sim::Outcome::Dropped: ++dropped; break;
    }
}

Tally& Tally::operator+=(const Tally& o)
{
    resolved += o.resolved;
    succeeded += o.succeeded;
    timed_out += o.timed_out;
    dropped += o.dropped;
    latency_slots += o.latency_slots;
    return *this;
}

namespace {

std::optional<double> ratio(std::int64_t num, std::int64_t den)
{
    if (den == 0)
        return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

json opt(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

} // namespace

std::optional<double> Tally::success_rate() const { return ratio(succeeded, resolved); }
std::optional<double> Tally::overflow_rate() const { return ratio(dropped, resolved); }
std::optional<double> Tally::timeout_rate() const { return ratio(timed_out, resolved); }

std::optional<double> Tally::avg_delay_ms(double slot_ms) const
{
    const auto m = ratio(latency_slots, succeeded);
    if (!m)
        return std::nullopt;
    return *m * slot_ms;
}

std::int64_t RunMetrics::window_begin() const
{
    return std::max<std::int64_t>(0, layout.iterations - layout.window);
}

namespace {

ordered_json tally_json(const Tally& t, double slot_ms)
{
    ordered_json j;
    j["resolved"] = t.resolved;
    j["succeeded"] = t.succeeded;
    j["timed_out"] = t.timed_out;
    j["dropped"] = t.dropped;
    j["success_rate"] = opt(t.success_rate());
    j["overflow_rate"] = opt(t.overflow_rate());
    j["timeout_rate"] = opt(t.timeout_rate());
    j["avg_delay_ms"] = opt(t.avg_delay_ms(slot_ms));
    return j;
}

ordered_json range_json(const Range& r)
{
    ordered_json j;
    j["min"] = opt(r.min);
    j["max"] = opt(r.max);
    return j;
}

void widen(Range& r, const std::optional<double>& v)
{
    if (!v)
        return;
    r.min = r.min ? std::min(*r.min, *v) : *v;
    r.max = r.max ? std::max(*r.max, *v) : *v;
}

} // namespace

ordered_json RunMetrics::to_json() const
{
    const double ms = layout.slot_ms;
    ordered_json j;
    j["slots"] = layout.iterations;
    j["slot_ms"] = ms;
    j["window"] = {{"from", window_begin()}, {"to", layout.iterations}};
    j["created"] = created;
    j["aggregate"] = tally_json(window, ms);
    j["overall"] = tally_json(overall, ms);
    j["per_node"] = json::array();
    for (const auto& t : per_node)
        j["per_node"].push_back(tally_json(t, ms));
    j["per_slice"] = json::array();
    for (const auto& t : per_slice)
        j["per_slice"].push_back(tally_json(t, ms));
    j["node_range"] = {{"success_rate", range_json(node_success)},
                       {"overflow_rate", range_json(node_overflow)},
                       {"avg_delay_ms", range_json(node_delay_ms)}};
    j["reward_curve"] = {{"block", layout.curve_block}, {"mean", reward_curve}};
    return j;
}

MetricsAccumulator::MetricsAccumulator(MetricsLayout layout)
    : layout_(std::move(layout)), per_node_(static_cast<std::size_t>(layout_.nodes)),
      per_slice_(static_cast<std::size_t>(layout_.slices))
{
    if (layout_.nodes < 1 || layout_.slices < 1 ||
        static_cast<int>(layout_.overflow_weights.size()) != layout_.slices)
        throw std::invalid_argument("MetricsAccumulator: inconsistent layout");
    if (layout_.window < 1 || layout_.curve_block < 1)
        throw std::invalid_argument("MetricsAccumulator: window and curve block must be positive");
    for (double w : layout_.overflow_weights) {
        sim::SliceSpec s;
        s.overflow_weight = w;
        slices_.push_back(s);
    }
    reward_.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, layout_.iterations)));
}

void MetricsAccumulator::slot_resolved(std::int64_t slot, const std::vector<sim::Resolution>& resolved)
{
    if (slot != static_cast<std::int64_t>(reward_.size()))
        throw std::logic_error("MetricsAccumulator: slots must be fed in order");
    const std::int64_t from = std::max<std::int64_t>(0, layout_.iterations - layout_.window);
    std::vector<std::vector<sim::OutcomeRecord>> per_origin(static_cast<std::size_t>(layout_.nodes));
    for (const auto& r : resolved) {
        if (r.origin < 0 || r.origin >= layout_.nodes || r.slice < 0 || r.slice >= layout_.slices)
            throw std::invalid_argument("MetricsAccumulator: resolution outside the layout");
        per_origin[static_cast<std::size_t>(r.origin)].push_back({r.slice, r.outcome});
        overall_.add(r);
        if (r.created_slot >= from) {
            window_.add(r);
            per_node_[static_cast<std::size_t>(r.origin)].add(r);
            per_slice_[static_cast<std::size_t>(r.slice)].add(r);
        }
    }
    last_local_.assign(static_cast<std::size_t>(layout_.nodes), 0.0);
    for (int i = 0; i < layout_.nodes; ++i)
        last_local_[static_cast<std::size_t>(i)] = sim::local_reward(per_origin[static_cast<std::size_t>(i)], slices_);
    reward_.push_back(sim::global_reward(last_local_));
}

RunMetrics MetricsAccumulator::finish() const
{
    RunMetrics m;
    m.layout = layout_;
    m.created = created_;
    m.overall = overall_;
    m.window = window_;
    m.per_node = per_node_;
    m.per_slice = per_slice_;
    for (const auto& t : per_node_) {
        widen(m.node_success, t.success_rate());
        widen(m.node_overflow, t.overflow_rate());
        widen(m.node_delay_ms, t.avg_delay_ms(layout_.slot_ms));
    }
    m.global_reward = reward_;
    const auto block = static_cast<std::size_t>(layout_.curve_block);
    for (std::size_t b = 0; b < reward_.size(); b += block) {
        const std::size_t e = std::min(reward_.size(), b + block);
        double s = 0.0;
        for (std::size_t t = b; t < e; ++t)
            s += reward_[t];
        m.reward_curve.push_back(s / static_cast<double>(e - b));
    }
    return m;
}

void write_run_record(std::ostream& out, const MetricsLayout& layout)
{
    ordered_json j;
    j["ev"] = "run";
    j["iterations"] = layout.iterations;
    j["window"] = layout.window;
    j["curve_block"] = layout.curve_block;
    j["overflow_weights"] = layout.overflow_weights;
    out << j.dump() << '\n';
}

void write_end_record(std::ostream& out, std::int64_t slots)
{
    ordered_json j;
    j["ev"] = "end";
    j["slots"] = slots;
    out << j.dump() << '\n';
}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what)
{
    throw std::runtime_error("event log line " + std::to_string(line) + ": " + what);
}

} // namespace

RunMetrics compute_metrics(std::istream& in)
{
    std::optional<MetricsLayout> layout;
    bool have_header = false;
    int nodes = 0, slices = 0;
    double slot_ms = 0.0;
    std::optional<MetricsAccumulator> acc;
    std::int64_t next_slot = 0;
    std::int64_t current = -1;
    std::vector<sim::Resolution> pending;
    std::int64_t created = 0;
    bool ended = false;

    auto flush_until = [&](std::int64_t slot) {
        // feeds every slot strictly before `slot`
        while (next_slot < slot) {
            if (next_slot == current)
                acc->slot_resolved(next_slot, pending), pending.clear();
            else
                acc->slot_resolved(next_slot, {});
            ++next_slot;
        }
    };

    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.empty())
            continue;
        if (ended)
            fail(line, "record after end");
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            fail(line, std::string("invalid JSON: ") + e.what());
        }
        try {
            const std::string ev = j.at("ev").get<std::string>();
            if (ev == "header") {
                if (j.at("version").get<int>() != 1)
                    fail(line, "unsupported log version");
                nodes = j.at("nodes").get<int>();
                slices = j.at("slices").get<int>();
                slot_ms = j.at("slot_ms").get<double>();
                have_header = true;
            } else if (ev == "run") {
                MetricsLayout l;
                l.iterations = j.at("iterations").get<std::int64_t>();
                l.window = j.at("window").get<std::int64_t>();
                l.curve_block = j.at("curve_block").get<std::int64_t>();
                l.overflow_weights = j.at("overflow_weights").get<std::vector<double>>();
                layout = l;
            } else if (ev == "create" || ev == "enqueue" || ev == "start" || ev == "resolve" || ev == "end") {
                if (!have_header || !layout)
                    fail(line, "event before header and run records");
                if (!acc) {
                    layout->nodes = nodes;
                    layout->slices = slices;
                    layout->slot_ms = slot_ms;
                    acc.emplace(*layout);
                }
                if (ev == "create") {
                    ++created;
                } else if (ev == "resolve") {
                    sim::Resolution r;
                    r.resolved_slot = j.at("slot").get<std::int64_t>();
                    r.task = j.at("task").get<std::uint64_t>();
                    r.origin = j.at("origin").get<int>();
                    r.processor = j.at("processor").get<int>();
                    r.slice = j.at("slice").get<int>();
                    r.created_slot = j.at("created").get<std::int64_t>();
                    r.outcome = sim::outcome_from_string(j.at("outcome").get<std::string>());
                    r.latency_slots = j.at("latency").get<std::int64_t>();
                    r.transit_slots = j.at("transit").get<std::int64_t>();
                    r.wait_slots = j.at("wait").get<std::int64_t>();
                    r.processing_slots = j.at("processing").get<std::int64_t>();
                    if (r.resolved_slot < next_slot || (current >= 0 && r.resolved_slot < current))
                        fail(line, "resolution slots out of order");
                    if (r.resolved_slot >= layout->iterations)
                        fail(line, "resolution after the last slot");
                    if (r.resolved_slot != current) {
                        flush_until(r.resolved_slot);
                        current = r.resolved_slot;
                    }
                    pending.push_back(r);
                } else if (ev == "end") {
                    const auto slots = j.at("slots").get<std::int64_t>();
                    if (slots != layout->iterations)
                        fail(line, "end record disagrees with the run length");
                    flush_until(slots);
                    ended = true;
                }
            } else {
                fail(line, "unknown event '" + ev + "'");
            }
        } catch (const json::exception& e) {
            fail(line, std::string("bad record: ") + e.what());
        } catch (const std::invalid_argument& e) {
            fail(line, e.what());
        }
    }
    if (!ended)
        fail(line + 1, "log is incomplete (no end record)");
    acc->created(created);
    return acc->finish();
}

RunMetrics compute_metrics_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open event log " + path);
    return compute_metrics(in);
}

std::vector<double> sliding_means(const std::vector<double>& v, std::size_t from, std::size_t to, std::size_t width)
{
    std::vector<double> out;
    to = std::min(to, v.size());
    if (width == 0 || from >= to || to - from < width)
        return out;
    double s = 0.0;
    for (std::size_t t = from; t < from + width; ++t)
        s += v[t];
    out.push_back(s / static_cast<double>(width));
    for (std::size_t t = from + width; t < to; ++t) {
        s += v[t] - v[t - width];
        out.push_back(s / static_cast<double>(width));
    }
    return out;
}

} // namespace fog::harness
