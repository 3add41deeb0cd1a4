#include "fog/agents/deep_q.hpp"
#include "fog/agents/epsilon.hpp"
#include "fog/agents/replay.hpp"
#include "fog/agents/tabular.hpp"
#include "fog/nn/gradcheck.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

using namespace fog::agents;
using fog::Rng;
namespace nn = fog::nn;

TEST_CASE("epsilon schedule values")
{
    EpsilonSchedule s;
    CHECK(s.value(0) == 1.0);
    // decay reaches the floor at the end of the cycle
    CHECK(s.decay() == doctest::Approx((std::log(1.0) - std::log(0.01)) / 5000));
    CHECK(s.value(4999) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(s.value(4999) >= 0.01);
    CHECK(s.value(2500) == doctest::Approx(0.1));

    s.renew();
    CHECK(s.start() == doctest::Approx(0.9));
    CHECK(s.value(5000) == doctest::Approx(0.9));
    for (int n = 2; n <= 10; ++n) {
        s.renew();
        CHECK(s.start() == doctest::Approx(std::pow(0.9, n)));
    }
}

TEST_CASE("epsilon clamps at the floor once the peak falls below it")
{
    EpsilonSchedule s;
    for (int n = 0; n < 60; ++n)
        s.renew();
    CHECK(s.start() < 0.01);
    CHECK(s.decay() == 0.0);
    for (int t : {0, 1, 1234, 4999})
        CHECK(s.value(t) == 0.01);
}

TEST_CASE("log-ratio decay collapses epsilon to the floor after one slot")
{
    EpsilonConfig c;
    c.rule = DecayRule::LogRatio;
    EpsilonSchedule s(c);
    CHECK(s.decay() == doctest::Approx(-std::log(0.01 / 5000) - 1.0 / 5000));
    CHECK(s.value(0) == 1.0);
    CHECK(s.value(1) == 0.01);
}

TEST_CASE("epsilon stays in bounds and is non-increasing within each cycle")
{
    EpsilonSchedule s;
    double prev = 2.0;
    std::vector<double> peaks;
    for (std::int64_t t = 0; t < 60000; ++t) {
        s.on_slot(t);
        const double e = s.value(t);
        REQUIRE(e >= 0.01);
        REQUIRE(e <= 1.0);
        if (t % 5000 == 0) {
            peaks.push_back(e);
            prev = e;
        } else {
            REQUIRE(e <= prev);
            prev = e;
        }
    }
    for (std::size_t n = 0; n < peaks.size(); ++n)
        CHECK(peaks[n] == doctest::Approx(std::max(std::pow(0.9, static_cast<double>(n)), 0.01)));
}

TEST_CASE("masked greedy selection")
{
    Rng rng(1);
    const std::vector<double> q{5, 1, 9};
    const std::vector<std::uint8_t> mask{1, 1, 0};
    CHECK(select_action(q, mask, 0.0, rng) == 0);

    const std::vector<double> ties{3, 7, 7, 7};
    const std::vector<std::uint8_t> all{1, 1, 1, 1};
    CHECK(select_action(ties, all, 0.0, rng) == 1);

    const std::vector<std::uint8_t> one{0, 0, 1};
    for (double eps : {0.0, 0.5, 1.0})
        for (int i = 0; i < 50; ++i)
            CHECK(select_action(q, one, eps, rng) == 2);

    const std::vector<std::uint8_t> none{0, 0, 0};
    CHECK_THROWS(select_action(q, none, 0.0, rng));
}

TEST_CASE("exploration is uniform over valid actions")
{
    Rng rng(99);
    const std::vector<double> q{0, 100, 0};
    const std::vector<std::uint8_t> mask{1, 0, 1};
    std::vector<int> hits(3, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        ++hits[static_cast<std::size_t>(select_action(q, mask, 1.0, rng))];
    CHECK(hits[1] == 0);
    CHECK(std::abs(hits[0] / double(draws) - 0.5) <= 0.01);
    CHECK(std::abs(hits[2] / double(draws) - 0.5) <= 0.01);
}

TEST_CASE("td target")
{
    const std::vector<double> next{1.0, 5.0, -3.0};
    const std::vector<std::uint8_t> mask{1, 0, 1};
    CHECK(td_target(0.2, false, next, mask, 0.98) == doctest::Approx(1.18));
    CHECK(td_target(0.2, true, next, mask, 0.98) == 0.2);
    const std::vector<double> flat{2.5, 2.5, 2.5};
    for (const auto& m : {std::vector<std::uint8_t>{1, 0, 0}, std::vector<std::uint8_t>{1, 1, 1}})
        CHECK(td_target(-1.0, false, flat, m, 0.98) == doctest::Approx(-1.0 + 0.98 * 2.5));
}

TEST_CASE("replay ring evicts oldest and holds back pending transitions")
{
    ReplayBuffer buf(3);
    for (int i = 0; i < 5; ++i) {
        Transition t;
        t.action = i;
        buf.push(t);
        CHECK(buf.size() == std::min(i + 1, 3));
    }
    CHECK(buf.at(0).action == 2);
    CHECK(buf.at(2).action == 4);

    ReplayBuffer delayed(10);
    Transition t;
    t.action = 7;
    delayed.stage(t, 5);
    delayed.release(4);
    CHECK(delayed.size() == 0);
    CHECK(delayed.pending() == 1);
    CHECK_THROWS(delayed.sample(1, *std::make_unique<Rng>(1)));
    delayed.release(5);
    CHECK(delayed.size() == 1);
    Rng rng(2);
    CHECK(delayed.sample(4, rng)[3]->action == 7);

    Transition bad;
    bad.reward = std::nan("");
    CHECK_THROWS(delayed.push(bad));
}

namespace {

// A single Dense(1 -> 1) "network": Q = w * x + b.
nn::Network scalar_net(double w, double b)
{
    nn::Network net({1, 1});
    auto d = std::make_unique<nn::Dense>(1, 1);
    d->w(0, 0) = w;
    d->b(0, 0) = b;
    net.add(std::move(d));
    return net;
}

Transition scalar_transition(double x, double reward, bool terminal)
{
    Transition t;
    t.window = {x};
    t.next_window = {x};
    t.next_mask = {1};
    t.reward = reward;
    t.terminal = terminal;
    return t;
}

} // namespace

TEST_CASE("train step on a satisfied target leaves the loss at zero")
{
    auto net = scalar_net(2.0, 0.5);
    auto target = net;
    nn::AdamState adam(net.params());
    const auto t = scalar_transition(1.5, 3.5, true);
    const Transition* batch[] = {&t};
    const auto before = net.flat_params();
    CHECK(train_step(net, target, adam, batch, 0.98) == 0.0);
    CHECK(net.flat_params() == before);
}

TEST_CASE("one train step reduces the loss of a single-sample linear problem")
{
    auto net = scalar_net(0.3, 0.0);
    auto target = net;
    nn::AdamState adam(net.params());
    const auto t = scalar_transition(2.0, 1.0, true);
    const Transition* batch[] = {&t};
    const double before = train_step(net, target, adam, batch, 0.98);
    auto frozen = net;
    nn::AdamState scratch(frozen.params());
    const double after = train_step(frozen, target, scratch, batch, 0.98);
    CHECK(before == doctest::Approx((0.6 - 1.0) * (0.6 - 1.0)));
    CHECK(after < before);
}

TEST_CASE("td loss gradient matches finite differences")
{
    Rng rng(12);
    auto net = nn::build_architecture(nn::Architecture::DRQN, 4, 6, 6, rng);
    auto target = nn::build_architecture(nn::Architecture::DRQN, 4, 6, 6, rng);
    std::vector<Transition> data(5);
    for (auto& t : data) {
        t.window.resize(24);
        t.next_window.resize(24);
        for (double& v : t.window)
            v = rng.uniform(0, 2);
        for (double& v : t.next_window)
            v = rng.uniform(0, 2);
        t.action = static_cast<int>(rng.below(6));
        t.reward = rng.uniform(-1, 1);
        t.next_mask = {1, 0, 1, 1, 0, 1};
        t.terminal = rng.bernoulli(0.3);
    }
    std::vector<const Transition*> batch;
    for (const auto& t : data)
        batch.push_back(&t);

    // Analytic gradient: run train_step with lr = 0 so params stay put, then read grads.
    nn::AdamState still(net.params(), {0.0, 0.9, 0.999, 1e-8});
    train_step(net, target, still, batch, 0.98);
    const auto analytic = net.flat_grads();

    const auto loss_at = [&](const std::vector<double>& p) {
        auto probe = net;
        probe.set_flat_params(p);
        nn::AdamState z(probe.params(), {0.0, 0.9, 0.999, 1e-8});
        return train_step(probe, target, z, batch, 0.98);
    };
    auto params = net.flat_params();
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
        const auto idx = static_cast<std::size_t>(rng.below(params.size()));
        const double saved = params[idx];
        params[idx] = saved + 1e-5;
        const double up = loss_at(params);
        params[idx] = saved - 1e-5;
        const double down = loss_at(params);
        params[idx] = saved;
        const double numeric = (up - down) / 2e-5;
        CAPTURE(idx);
        CHECK(nn::relative_error(analytic[idx], numeric, 1e-6) <= 1e-4);
        ++checked;
    }
    CHECK(checked == 60);
}

TEST_CASE("tabular update arithmetic")
{
    TabularQ table(2);
    const std::vector<int> o{0}, next{1};
    table.row_mut(next)[1] = 2.0;
    CHECK(tabular_q_update(table, o, 0, 1.0, next, 0.5, 0.98) == doctest::Approx(1.48));

    TabularQ frozen(2);
    frozen.row_mut(o)[1] = 0.7;
    CHECK(tabular_q_update(frozen, o, 1, 5.0, next, 0.0, 0.98) == 0.7);

    TabularQ myopic(2);
    myopic.row_mut(next)[0] = 100.0;
    CHECK(tabular_q_update(myopic, o, 1, -0.25, next, 1.0, 0.0) == -0.25);

    TabularQ masked(3);
    masked.row_mut(next) = {9.0, 1.0, 4.0};
    const std::vector<std::uint8_t> m{0, 1, 1};
    CHECK(tabular_q_update(masked, o, 0, 0.0, next, 1.0, 0.5, m) == 2.0);
    CHECK(tabular_q_update(masked, o, 2, 0.0, next, 1.0, 0.5, {}, true) == 0.0);
}

TEST_CASE("state and action space counting")
{
    SpaceCountInput big;
    big.nodes = 5;
    big.buffer_caps = {5, 5, 5};
    big.cpu_units = 5;
    big.mem_units = 5;
    big.max_alloc = {5, 5, 5};
    const auto c = state_space_count(big);
    CHECK(c.observations == BigInt(72) * 72 * 72 * 36);
    CHECK(c.actions == BigInt(7 * 7 * 7) * (6 * 6 * 6));
    CHECK(c.product() == BigInt("995515121664"));

    SpaceCountInput tiny;
    tiny.nodes = 0;
    tiny.buffer_caps = {0};
    tiny.max_alloc = {0};
    const auto t = state_space_count(tiny);
    CHECK(t.observations == 2);
    CHECK(t.actions == 2);

    SpaceCountInput wide = tiny;
    wide.buffer_caps = {1};
    CHECK(state_space_count(wide).observations == 4 * t.observations);
}

namespace {

AgentConfig tiny_agent_config()
{
    AgentConfig c;
    c.arch = nn::Architecture::DQN;
    c.sizes.mlp = {8};
    c.seq = 2;
    c.batch = 4;
    c.learn_start = 5;
    c.target_sync = 3;
    c.replay_capacity = 50;
    return c;
}

void feed(DeepQAgent& agent, std::int64_t t, Rng& rng)
{
    std::vector<double> obs(3);
    for (double& v : obs)
        v = static_cast<double>(rng.below(3));
    Transition tr;
    tr.window = agent.window();
    agent.observe(obs);
    tr.next_window = agent.window();
    tr.action = static_cast<int>(rng.below(4));
    tr.reward = rng.uniform(-1, 1);
    tr.next_mask = {1, 1, 0, 1};
    agent.replay().stage(std::move(tr), t);
}

} // namespace

TEST_CASE("agent history is zero padded and slides")
{
    DeepQAgent agent(tiny_agent_config(), 3, 4, 1);
    CHECK(agent.window() == std::vector<double>(6, 0.0));
    agent.observe(std::vector<double>{1, 2, 3});
    CHECK(agent.window() == std::vector<double>{0, 0, 0, 1, 2, 3});
    agent.observe(std::vector<double>{4, 5, 6});
    agent.observe(std::vector<double>{7, 8, 9});
    CHECK(agent.window() == std::vector<double>{4, 5, 6, 7, 8, 9});
    agent.reset_history();
    CHECK(agent.window() == std::vector<double>(6, 0.0));
}

TEST_CASE("agent acts validly, trains after learn_start and syncs the target on schedule")
{
    DeepQAgent agent(tiny_agent_config(), 3, 4, 7);
    Rng rng(3);
    const std::vector<std::uint8_t> mask{0, 1, 1, 0};
    auto target_before = agent.target().flat_params();
    for (std::int64_t t = 0; t < 20; ++t) {
        agent.begin_slot(t);
        const int a = agent.act(mask, t);
        CHECK((a == 1 || a == 2));
        feed(agent, t, rng);
        const double loss = agent.end_slot(t);
        CHECK(std::isnan(loss) == (t < 5));
        const auto target_now = agent.target().flat_params();
        if (t % 3 != 0)
            CHECK(target_now == target_before);
        else
            CHECK(target_now == agent.online().flat_params());
        target_before = target_now;
    }
    CHECK(agent.train_steps() == 15);
}

TEST_CASE("sync period 1 is the same as bootstrapping from the online network")
{
    // With C = 1 the target is refreshed every slot, so each train step sees a
    // target equal to the online parameters; compare against using online for both.
    auto cfg = tiny_agent_config();
    cfg.target_sync = 1;
    cfg.learn_start = 0;
    DeepQAgent agent(cfg, 3, 4, 11);
    auto mirror = agent.online();
    nn::AdamState mirror_adam(mirror.params(), cfg.adam);
    Rng data(5);
    Rng sampler(fog::mix_seed(11, 1));
    for (std::int64_t t = 0; t < 30; ++t) {
        agent.begin_slot(t);
        feed(agent, t, data);
        agent.replay().release(t);
        if (agent.replay().size() >= 4) {
            // same draws as the agent's own sampling stream
            const auto batch = agent.replay().sample(4, sampler);
            train_step(mirror, mirror, mirror_adam, batch, cfg.gamma);
        }
        agent.end_slot(t);
        CHECK(agent.online().flat_params() == mirror.flat_params());
    }
}

TEST_CASE("agent checkpoint round trip restores behaviour exactly")
{
    auto cfg = tiny_agent_config();
    DeepQAgent a(cfg, 3, 4, 21);
    Rng rng(8);
    for (std::int64_t t = 0; t < 12; ++t) {
        a.begin_slot(t);
        feed(a, t, rng);
        a.end_slot(t);
    }
    std::stringstream buf;
    a.save(buf);
    DeepQAgent b(cfg, 3, 4, 999);
    b.load(buf);
    CHECK(b.online().flat_params() == a.online().flat_params());
    CHECK(b.target().flat_params() == a.target().flat_params());
    CHECK(b.window() == a.window());
    const std::vector<std::uint8_t> mask{1, 1, 1, 1};
    for (std::int64_t t = 12; t < 20; ++t)
        CHECK(a.act(mask, t) == b.act(mask, t));
}
