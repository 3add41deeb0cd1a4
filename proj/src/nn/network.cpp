#include "fog/nn/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fog::nn {

std::string_view to_string(Architecture arch)
{
    switch (arch) {
    case Architecture::DRQN: return "drqn";
    case Architecture::DCQN: return "dcqn";
    case Architecture::DQN: return "dqn";
    }
    return "?";
}

Architecture architecture_from_string(std::string_view name)
{
    if (name == "drqn")
        return Architecture::DRQN;
    if (name == "dcqn")
        return Architecture::DCQN;
    if (name == "dqn")
        return Architecture::DQN;
    throw std::invalid_argument("unknown architecture '" + std::string(name) + "'");
}

Network::Network(const Network& other) : arch(other.arch), input_(other.input_)
{
    layers_.reserve(other.layers_.size());
    for (const auto& l : other.layers_)
        layers_.push_back(l->clone());
}

Network& Network::operator=(const Network& other)
{
    if (this != &other) {
        Network copy(other);
        *this = std::move(copy);
    }
    return *this;
}

void Network::add(std::unique_ptr<Layer> layer)
{
    if (!(layer->input_shape() == output_shape()))
        throw std::invalid_argument("Network::add: " + std::string(to_string(layer->kind())) +
                                    " input shape does not match the previous output");
    layers_.push_back(std::move(layer));
}

Shape Network::output_shape() const
{
    return layers_.empty() ? input_ : layers_.back()->output_shape();
}

std::vector<LayerSpec> Network::describe() const
{
    std::vector<LayerSpec> out;
    for (const auto& l : layers_)
        out.push_back({l->kind(), l->input_shape(), l->output_shape()});
    return out;
}

Mat Network::forward(const Mat& x, int batch)
{
    Mat a = x;
    for (auto& l : layers_)
        a = l->forward(a, batch);
    return a;
}

Mat Network::backward(const Mat& grad_out)
{
    Mat g = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
        g = (*it)->backward(g);
    return g;
}

std::vector<double> Network::forward(const Tensor& window)
{
    if (window.shape.size() != 2 || window.shape[0] != input_.length || window.shape[1] != input_.channels)
        throw std::invalid_argument("Network::forward: window must be [" + std::to_string(input_.length) + " x " +
                                    std::to_string(input_.channels) + "]");
    const double* p = window.data.data();
    const Mat y = forward(pack_windows(std::span<const double* const>(&p, 1), input_), 1);
    return {y.data(), y.data() + y.size()};
}

std::vector<Mat*> Network::params()
{
    std::vector<Mat*> out;
    for (auto& l : layers_)
        for (Mat* p : l->params())
            out.push_back(p);
    return out;
}

std::vector<const Mat*> Network::params() const
{
    std::vector<const Mat*> out;
    for (const auto& l : layers_)
        for (Mat* p : l->params())
            out.push_back(p);
    return out;
}

std::vector<Mat*> Network::grads()
{
    std::vector<Mat*> out;
    for (auto& l : layers_)
        for (Mat* g : l->grads())
            out.push_back(g);
    return out;
}

std::size_t Network::parameter_count() const
{
    std::size_t n = 0;
    for (const Mat* p : params())
        n += static_cast<std::size_t>(p->size());
    return n;
}

std::vector<double> Network::flat_params() const
{
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const Mat* p : params())
        out.insert(out.end(), p->data(), p->data() + p->size());
    return out;
}

void Network::set_flat_params(std::span<const double> values)
{
    if (values.size() != parameter_count())
        throw std::invalid_argument("Network::set_flat_params: size mismatch");
    std::size_t o = 0;
    for (Mat* p : params()) {
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(o), p->size(), p->data());
        o += static_cast<std::size_t>(p->size());
    }
}

std::vector<double> Network::flat_grads()
{
    std::vector<double> out;
    for (Mat* g : grads())
        out.insert(out.end(), g->data(), g->data() + g->size());
    return out;
}

Mat pack_windows(std::span<const double* const> windows, Shape input)
{
    const int batch = static_cast<int>(windows.size());
    Mat x(input.channels, static_cast<Eigen::Index>(input.length) * batch);
    for (int b = 0; b < batch; ++b)
        for (int t = 0; t < input.length; ++t)
            for (int c = 0; c < input.channels; ++c)
                x(c, static_cast<Eigen::Index>(t) * batch + b) = windows[static_cast<std::size_t>(b)][t * input.channels + c];
    return x;
}

namespace {

template <class L, class... Args>
L& push(Network& net, Args&&... args)
{
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    net.add(std::move(layer));
    return ref;
}

void dense_relu(Network& net, int out, Rng& rng, bool relu = true)
{
    auto& d = push<Dense>(net, net.output_shape().channels, out);
    glorot_uniform(d.w, static_cast<int>(d.w.cols()), out, rng);
    if (relu)
        push<ReLU>(net, net.output_shape());
}

void conv_relu(Network& net, int filters, Rng& rng)
{
    const Shape in = net.output_shape();
    auto& c = push<Conv1D>(net, in, filters);
    glorot_uniform(c.w, Conv1D::kernel * in.channels, Conv1D::kernel * filters, rng);
    push<ReLU>(net, net.output_shape());
}

} // namespace

Network build_architecture(Architecture arch, int obs_dim, int action_dim, int seq, Rng& rng,
                           const ArchitectureSizes& sizes)
{
    if (obs_dim < 1 || action_dim < 1 || seq < 1)
        throw std::invalid_argument("build_architecture: dimensions must be positive");
    if (arch != Architecture::DQN && seq < 2 * (Conv1D::kernel - 1) + 1)
        throw std::invalid_argument("build_architecture: two kernel-3 convolutions need seq >= 5");

    Network net({obs_dim, seq});
    net.arch = arch;
    switch (arch) {
    case Architecture::DRQN: {
        conv_relu(net, sizes.conv1, rng);
        conv_relu(net, sizes.conv2, rng);
        auto& g = push<GRU>(net, net.output_shape(), sizes.recurrent);
        const double bound = 1.0 / std::sqrt(static_cast<double>(sizes.recurrent));
        for (Mat* m : {&g.wt.ws_r, &g.wt.wg_r, &g.wt.ws_z, &g.wt.wg_z, &g.wt.ws, &g.wt.wg})
            uniform_fill(*m, bound, rng);
        dense_relu(net, sizes.hidden, rng);
        break;
    }
    case Architecture::DCQN:
        conv_relu(net, sizes.conv1, rng);
        conv_relu(net, sizes.conv2, rng);
        push<Flatten>(net, net.output_shape());
        dense_relu(net, sizes.recurrent, rng);
        dense_relu(net, sizes.hidden, rng);
        break;
    case Architecture::DQN:
        push<Flatten>(net, net.output_shape());
        for (int h : sizes.mlp)
            dense_relu(net, h, rng);
        break;
    }
    dense_relu(net, action_dim, rng, false);
    return net;
}

} // namespace fog::nn
