#pragma once

#include "fog/common/random.hpp"
#include "fog/nn/layers.hpp"
#include "fog/nn/tensor.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace fog::nn {

enum class Architecture
{
    DRQN,
    DCQN,
    DQN
};

std::string_view to_string(Architecture arch);
Architecture architecture_from_string(std::string_view name);

struct LayerSpec
{
    LayerKind kind;
    Shape in;
    Shape out;
};

/// Layer chain from a [seq x obs_dim] window to one value per action.
class Network
{
public:
    Network() = default;
    explicit Network(Shape input) : input_(input) {}
    Network(const Network& other);
    Network& operator=(const Network& other);
    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    /// The layer's input shape must equal the current output shape.
    void add(std::unique_ptr<Layer> layer);

    Shape input_shape() const { return input_; }
    Shape output_shape() const;
    int output_size() const { return output_shape().channels; }
    std::size_t layer_count() const { return layers_.size(); }
    Layer& layer(std::size_t i) { return *layers_[i]; }
    const Layer& layer(std::size_t i) const { return *layers_[i]; }
    std::vector<LayerSpec> describe() const;

    /// x: input_channels x (seq * batch), time-major. Returns outputs x batch.
    Mat forward(const Mat& x, int batch);
    /// Input gradient; parameter gradients are left in grads().
    Mat backward(const Mat& grad_out);

    /// Single window given as a [seq x obs_dim] tensor.
    std::vector<double> forward(const Tensor& window);

    std::vector<Mat*> params();
    std::vector<Mat*> grads();
    std::vector<const Mat*> params() const;
    std::size_t parameter_count() const;
    std::vector<double> flat_params() const;
    void set_flat_params(std::span<const double> values);
    std::vector<double> flat_grads();

    Architecture arch = Architecture::DQN;

private:
    Shape input_;
    std::vector<std::unique_ptr<Layer>> layers_;
};

/// Packs windows stored row-major as [seq][obs] into the batched layout.
Mat pack_windows(std::span<const double* const> windows, Shape input);

struct ArchitectureSizes
{
    int conv1 = 32;
    int conv2 = 64;
    int recurrent = 128;
    int hidden = 64;
    std::vector<int> mlp{64, 128, 128, 64};
};

Network build_architecture(Architecture arch, int obs_dim, int action_dim, int seq, Rng& rng,
                           const ArchitectureSizes& sizes = {});

} // namespace fog::nn
