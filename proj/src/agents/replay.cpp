#include "fog/agents/replay.hpp"

#include <cmath>
#include <stdexcept>

namespace fog::agents {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0)
        throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    ring_.reserve(capacity);
}

void ReplayBuffer::push(Transition t)
{
    if (!std::isfinite(t.reward))
        throw std::invalid_argument("ReplayBuffer: non-finite reward");
    if (ring_.size() < capacity_) {
        ring_.push_back(std::move(t));
        return;
    }
    ring_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

void ReplayBuffer::stage(Transition t, std::int64_t ready_slot)
{
    if (!pending_.empty() && ready_slot < pending_.back().first)
        throw std::invalid_argument("ReplayBuffer: staged transitions must be in slot order");
    pending_.emplace_back(ready_slot, std::move(t));
}

void ReplayBuffer::release(std::int64_t slot)
{
    while (!pending_.empty() && pending_.front().first <= slot) {
        push(std::move(pending_.front().second));
        pending_.pop_front();
    }
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n, Rng& rng) const
{
    if (ring_.empty())
        throw std::logic_error("ReplayBuffer: sampling an empty buffer");
    std::vector<const Transition*> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(&ring_[rng.below(ring_.size())]);
    return out;
}

} // namespace fog::agents
