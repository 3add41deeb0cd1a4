#include "fog/agents/deep_q.hpp"

#include "fog/nn/checkpoint.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace fog::agents {

int masked_argmax(std::span<const double> q, std::span<const std::uint8_t> mask)
{
    if (q.size() != mask.size())
        throw std::invalid_argument("masked_argmax: size mismatch");
    int best = -1;
    for (std::size_t a = 0; a < q.size(); ++a)
        if (mask[a] && (best < 0 || q[a] > q[static_cast<std::size_t>(best)]))
            best = static_cast<int>(a);
    if (best < 0)
        throw std::invalid_argument("masked_argmax: no valid action");
    return best;
}

int random_valid_action(std::span<const std::uint8_t> mask, Rng& rng)
{
    std::size_t valid = 0;
    for (auto m : mask)
        valid += m ? 1 : 0;
    if (valid == 0)
        throw std::invalid_argument("random_valid_action: no valid action");
    auto pick = rng.below(valid);
    for (std::size_t a = 0; a < mask.size(); ++a)
        if (mask[a] && pick-- == 0)
            return static_cast<int>(a);
    return -1; // unreachable
}

int select_action(std::span<const double> q, std::span<const std::uint8_t> mask, double epsilon, Rng& rng)
{
    if (rng.bernoulli(epsilon))
        return random_valid_action(mask, rng);
    return masked_argmax(q, mask);
}

double td_target(double reward, bool terminal, std::span<const double> next_q,
                 std::span<const std::uint8_t> next_mask, double gamma)
{
    if (terminal)
        return reward;
    return reward + gamma * next_q[static_cast<std::size_t>(masked_argmax(next_q, next_mask))];
}

double train_step(nn::Network& online, nn::Network& target, nn::AdamState& adam,
                  std::span<const Transition* const> batch, double gamma, double clip_norm)
{
    const int n = static_cast<int>(batch.size());
    if (n == 0)
        throw std::invalid_argument("train_step: empty batch");
    const nn::Shape in = online.input_shape();
    std::vector<const double*> windows, next;
    for (const Transition* t : batch) {
        windows.push_back(t->window.data());
        next.push_back(t->next_window.data());
    }

    const nn::Mat next_q = target.forward(nn::pack_windows(next, in), n);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b) {
        const Transition& t = *batch[static_cast<std::size_t>(b)];
        y[static_cast<std::size_t>(b)] =
            td_target(t.reward, t.terminal, std::span<const double>(next_q.col(b).data(), static_cast<std::size_t>(next_q.rows())),
                      t.next_mask, gamma);
    }

    const nn::Mat q = online.forward(nn::pack_windows(windows, in), n);
    nn::Mat grad = nn::Mat::Zero(q.rows(), q.cols());
    double loss = 0.0;
    for (int b = 0; b < n; ++b) {
        const int a = batch[static_cast<std::size_t>(b)]->action;
        const double d = q(a, b) - y[static_cast<std::size_t>(b)];
        loss += d * d;
        grad(a, b) = 2.0 * d / n;
    }
    loss /= n;
    if (!std::isfinite(loss))
        throw std::runtime_error("train_step: non-finite loss (diverged)");

    online.backward(grad);
    const auto grads = online.grads();
    if (clip_norm > 0.0)
        nn::clip_grad_norm(grads, clip_norm);
    nn::adam_step(online.params(), grads, adam);
    return loss;
}

DeepQAgent::DeepQAgent(AgentConfig config, int obs_dim, int action_dim, std::uint64_t seed)
    : config_(std::move(config)),
      obs_dim_(obs_dim),
      action_dim_(action_dim),
      rng_(mix_seed(seed, 1)),
      replay_(config_.replay_capacity),
      schedule_(config_.epsilon)
{
    if (!(config_.gamma > 0.0 && config_.gamma < 1.0))
        throw std::invalid_argument("DeepQAgent: gamma must be in (0,1)");
    if (config_.batch < 1 || config_.target_sync < 1 || config_.seq < 1)
        throw std::invalid_argument("DeepQAgent: batch, sync period and seq must be positive");
    Rng init(mix_seed(seed, 0));
    online_ = nn::build_architecture(config_.arch, obs_dim, action_dim, config_.seq, init, config_.sizes);
    target_ = online_;
    adam_ = nn::AdamState(online_.params(), config_.adam);
    reset_history();
}

void DeepQAgent::reset_history()
{
    history_.assign(static_cast<std::size_t>(config_.seq), std::vector<double>(static_cast<std::size_t>(obs_dim_), 0.0));
}

void DeepQAgent::observe(std::span<const double> obs)
{
    if (static_cast<int>(obs.size()) != obs_dim_)
        throw std::invalid_argument("DeepQAgent::observe: observation size mismatch");
    history_.pop_front();
    history_.emplace_back(obs.begin(), obs.end());
}

std::vector<double> DeepQAgent::window() const
{
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(config_.seq * obs_dim_));
    for (const auto& row : history_)
        w.insert(w.end(), row.begin(), row.end());
    return w;
}

std::vector<double> DeepQAgent::peek_window(std::span<const double> next) const
{
    if (static_cast<int>(next.size()) != obs_dim_)
        throw std::invalid_argument("DeepQAgent::peek_window: observation size mismatch");
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(config_.seq * obs_dim_));
    for (std::size_t r = 1; r < history_.size(); ++r)
        w.insert(w.end(), history_[r].begin(), history_[r].end());
    w.insert(w.end(), next.begin(), next.end());
    return w;
}

std::vector<double> DeepQAgent::q_values(std::span<const double> window)
{
    const double* p = window.data();
    const nn::Mat y = online_.forward(nn::pack_windows(std::span<const double* const>(&p, 1), online_.input_shape()), 1);
    return {y.data(), y.data() + y.size()};
}

int DeepQAgent::act(std::span<const std::uint8_t> mask, std::int64_t t)
{
    if (static_cast<int>(mask.size()) != action_dim_)
        throw std::invalid_argument("DeepQAgent::act: mask size mismatch");
    if (t < config_.learn_start)
        return random_valid_action(mask, rng_);
    const auto w = window();
    const auto q = q_values(w);
    return select_action(q, mask, schedule_.value(t), rng_);
}

double DeepQAgent::end_slot(std::int64_t t)
{
    replay_.release(t);
    double loss = std::numeric_limits<double>::quiet_NaN();
    if (t >= config_.learn_start && replay_.size() >= static_cast<std::size_t>(config_.batch)) {
        const auto batch = replay_.sample(static_cast<std::size_t>(config_.batch), rng_);
        loss = train_step(online_, target_, adam_, batch, config_.gamma, config_.clip_norm);
        ++train_steps_;
    }
    if (t > 0 && t % config_.target_sync == 0)
        sync_target();
    return loss;
}

void DeepQAgent::save(std::ostream& out) const
{
    out.write("FQAG", 4);
    nn::write_u64(out, nn::checkpoint_version);
    nn::save_network(out, online_);
    nn::save_network(out, target_);
    nn::save_adam(out, adam_);
    nn::write_f64(out, schedule_.start());
    nn::write_f64(out, schedule_.decay());
    nn::write_u64(out, static_cast<std::uint64_t>(train_steps_));
    const std::string rng = rng_.state();
    nn::write_u64(out, rng.size());
    out.write(rng.data(), static_cast<std::streamsize>(rng.size()));
    for (const auto& row : history_)
        for (double v : row)
            nn::write_f64(out, v);
    if (!out)
        throw std::runtime_error("DeepQAgent::save: write failed");
}

void DeepQAgent::load(std::istream& in)
{
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "FQAG" || nn::read_u64(in) != nn::checkpoint_version)
        throw std::runtime_error("DeepQAgent::load: not an agent checkpoint");
    auto online = nn::load_network(in);
    auto target = nn::load_network(in);
    if (online.parameter_count() != online_.parameter_count() || online.arch != online_.arch)
        throw std::runtime_error("DeepQAgent::load: checkpoint architecture differs");
    auto adam = nn::load_adam(in);
    const double start = nn::read_f64(in);
    const double decay = nn::read_f64(in);
    const auto steps = static_cast<std::int64_t>(nn::read_u64(in));
    std::string rng(nn::read_u64(in), '\0');
    in.read(rng.data(), static_cast<std::streamsize>(rng.size()));
    for (auto& row : history_)
        for (double& v : row)
            v = nn::read_f64(in);
    online_ = std::move(online);
    target_ = std::move(target);
    adam_ = std::move(adam);
    schedule_.restore(start, decay);
    train_steps_ = steps;
    rng_.restore(rng);
}

} // namespace fog::agents
