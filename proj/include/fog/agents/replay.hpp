#pragma once

#include "fog/common/random.hpp"

#include <cstdint>
#include <deque>
#include <vector>

namespace fog::agents {

struct Transition
{
    // [seq x obs_dim] row-major windows
    std::vector<double> window;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_window;
    std::vector<std::uint8_t> next_mask;
    bool terminal = false;
};

/// Fixed-capacity ring with FIFO eviction. Transitions first wait in a pending
/// queue until their shared reward is complete; only released ones are sampled.
class ReplayBuffer
{
public:
    explicit ReplayBuffer(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return ring_.size(); }
    std::size_t pending() const { return pending_.size(); }

    void push(Transition t);
    /// Holds `t` back until release() is called with a slot >= ready_slot.
    void stage(Transition t, std::int64_t ready_slot);
    void release(std::int64_t slot);

    /// Uniform with replacement.
    std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

    /// i-th stored transition, oldest first.
    const Transition& at(std::size_t i) const { return ring_[(head_ + i) % ring_.size()]; }

private:
    std::size_t capacity_;
    std::vector<Transition> ring_;
    std::size_t head_ = 0;
    std::deque<std::pair<std::int64_t, Transition>> pending_;
};

} // namespace fog::agents
