#include "fog/sim/action_space.hpp"

#include <stdexcept>

namespace fog::sim {

std::vector<double> Observation::flatten() const
{
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(dim()));
    for (int v : arrivals)
        out.push_back(v);
    for (int v : buffer_len)
        out.push_back(v);
    for (int v : in_progress)
        out.push_back(v);
    out.push_back(cpu_avail);
    out.push_back(mem_avail);
    return out;
}

ActionSpace::ActionSpace(int node, int node_count, std::vector<int> max_alloc,
                         std::vector<int> mem_units_per_task)
    : node_(node), node_count_(node_count), max_alloc_(std::move(max_alloc)),
      mem_units_(std::move(mem_units_per_task))
{
    if (node < 0 || node >= node_count)
        throw std::invalid_argument("ActionSpace: node index out of range");
    if (max_alloc_.empty() || max_alloc_.size() != mem_units_.size())
        throw std::invalid_argument("ActionSpace: per-slice vectors must be non-empty and agree");
    for (std::size_t k = 0; k < max_alloc_.size(); ++k) {
        if (max_alloc_[k] < 0 || mem_units_[k] < 1)
            throw std::invalid_argument("ActionSpace: bad per-slice limits");
        offload_count_ *= node_count_ + 2;
        alloc_count_ *= max_alloc_[k] + 1;
    }
}

namespace {

std::vector<int> max_allocs(const NetworkConfig& config, int node)
{
    std::vector<int> out;
    for (int k = 0; k < config.slice_count(); ++k)
        out.push_back(config.max_alloc(node, k));
    return out;
}

std::vector<int> mem_units(const NetworkConfig& config, int node)
{
    std::vector<int> out;
    for (int k = 0; k < config.slice_count(); ++k)
        out.push_back(config.mem_units_per_task(node, k));
    return out;
}

} // namespace

ActionSpace::ActionSpace(const NetworkConfig& config, int node)
    : ActionSpace(node, config.node_count(), max_allocs(config, node), mem_units(config, node))
{
}

ActionPair ActionSpace::decode(std::int64_t index) const
{
    if (index < 0 || index >= size())
        throw std::out_of_range("ActionSpace::decode: index out of range");
    ActionPair a;
    std::int64_t off = index / alloc_count_;
    std::int64_t alloc = index % alloc_count_;
    const int K = slice_count();
    a.offload.resize(static_cast<std::size_t>(K));
    a.allocate.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        a.offload[static_cast<std::size_t>(k)] = static_cast<int>(off % (node_count_ + 2));
        off /= node_count_ + 2;
        const int radix = max_alloc_[static_cast<std::size_t>(k)] + 1;
        a.allocate[static_cast<std::size_t>(k)] = static_cast<int>(alloc % radix);
        alloc /= radix;
    }
    return a;
}

std::int64_t ActionSpace::encode(const ActionPair& action) const
{
    const int K = slice_count();
    if (static_cast<int>(action.offload.size()) != K || static_cast<int>(action.allocate.size()) != K)
        throw std::invalid_argument("ActionSpace::encode: slice count mismatch");
    std::int64_t off = 0;
    std::int64_t alloc = 0;
    for (int k = K - 1; k >= 0; --k) {
        const int f = action.offload[static_cast<std::size_t>(k)];
        const int w = action.allocate[static_cast<std::size_t>(k)];
        if (f < 0 || f > node_count_ + 1 || w < 0 || w > max_alloc_[static_cast<std::size_t>(k)])
            throw std::out_of_range("ActionSpace::encode: component out of range");
        off = off * (node_count_ + 2) + f;
        alloc = alloc * (max_alloc_[static_cast<std::size_t>(k)] + 1) + w;
    }
    return off * alloc_count_ + alloc;
}

bool ActionSpace::is_valid(const Observation& obs, const ActionPair& action) const
{
    const int K = slice_count();
    if (obs.slice_count() != K || static_cast<int>(action.offload.size()) != K ||
        static_cast<int>(action.allocate.size()) != K)
        return false;
    int cpu = 0;
    int mem = 0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
        const int f = action.offload[k];
        const int w = action.allocate[k];
        if (f < 0 || f > node_count_ + 1 || w < 0 || w > max_alloc_[k])
            return false;
        if ((f == 0) != (obs.arrivals[k] == 0))
            return false;
        if (w > obs.buffer_len[k] - obs.in_progress[k])
            return false;
        cpu += w;
        mem += w * mem_units_[k];
    }
    return cpu <= obs.cpu_avail && mem <= obs.mem_avail;
}

std::vector<std::uint8_t> ActionSpace::mask(const Observation& obs) const
{
    const int K = slice_count();
    if (obs.slice_count() != K)
        throw std::invalid_argument("ActionSpace::mask: slice count mismatch");

    std::vector<std::uint8_t> off_ok(static_cast<std::size_t>(offload_count_), 1);
    for (std::int64_t code = 0; code < offload_count_; ++code) {
        std::int64_t c = code;
        bool ok = true;
        for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
            const int f = static_cast<int>(c % (node_count_ + 2));
            c /= node_count_ + 2;
            if ((f == 0) != (obs.arrivals[k] == 0)) {
                ok = false;
                break;
            }
        }
        off_ok[static_cast<std::size_t>(code)] = ok ? 1 : 0;
    }

    std::vector<std::uint8_t> alloc_ok(static_cast<std::size_t>(alloc_count_), 0);
    for (std::int64_t code = 0; code < alloc_count_; ++code) {
        std::int64_t c = code;
        int cpu = 0;
        int mem = 0;
        bool ok = true;
        for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
            const int radix = max_alloc_[k] + 1;
            const int w = static_cast<int>(c % radix);
            c /= radix;
            if (w > obs.buffer_len[k] - obs.in_progress[k]) {
                ok = false;
                break;
            }
            cpu += w;
            mem += w * mem_units_[k];
        }
        alloc_ok[static_cast<std::size_t>(code)] =
            (ok && cpu <= obs.cpu_avail && mem <= obs.mem_avail) ? 1 : 0;
    }

    std::vector<std::uint8_t> out(static_cast<std::size_t>(size()), 0);
    for (std::int64_t o = 0; o < offload_count_; ++o) {
        if (!off_ok[static_cast<std::size_t>(o)])
            continue;
        const std::size_t base = static_cast<std::size_t>(o * alloc_count_);
        for (std::int64_t a = 0; a < alloc_count_; ++a)
            out[base + static_cast<std::size_t>(a)] = alloc_ok[static_cast<std::size_t>(a)];
    }
    return out;
}

std::int64_t ActionSpace::idle_local_index(const Observation& obs) const
{
    ActionPair a;
    for (int v : obs.arrivals) {
        a.offload.push_back(v ? local_code() : 0);
        a.allocate.push_back(0);
    }
    return encode(a);
}

} // namespace fog::sim
