#pragma once

#include "fog/common/random.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string_view>
#include <vector>

namespace fog::nn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class LayerKind
{
    Dense,
    Conv1D,
    GRU,
    ReLU,
    Flatten
};

std::string_view to_string(LayerKind kind);

/// Per-sample activation shape: `channels` features at each of `length` time steps.
/// Vectors have length 1.
struct Shape
{
    int channels = 0;
    int length = 1;

    friend bool operator==(const Shape&, const Shape&) = default;
};

// Batched activations are stored as channels x (length * batch), time-major:
// column t * batch + b holds step t of sample b.
class Layer
{
public:
    explicit Layer(Shape in) : in_(in) {}
    virtual ~Layer() = default;

    virtual LayerKind kind() const = 0;
    virtual Shape output_shape() const = 0;
    Shape input_shape() const { return in_; }

    /// Caches what backward() needs.
    virtual Mat forward(const Mat& x, int batch) = 0;
    /// Overwrites parameter gradients and returns the input gradient.
    virtual Mat backward(const Mat& grad_out) = 0;

    virtual std::vector<Mat*> params() { return {}; }
    virtual std::vector<Mat*> grads() { return {}; }
    virtual std::unique_ptr<Layer> clone() const = 0;

protected:
    void check_input(const Mat& x, int batch) const;

    Shape in_;
};

class Dense final : public Layer
{
public:
    Dense(int in, int out);

    LayerKind kind() const override { return LayerKind::Dense; }
    Shape output_shape() const override { return {static_cast<int>(w.rows()), 1}; }
    Mat forward(const Mat& x, int batch) override;
    Mat backward(const Mat& grad_out) override;
    std::vector<Mat*> params() override { return {&w, &b}; }
    std::vector<Mat*> grads() override { return {&dw, &db}; }
    std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

    Mat w, b;
    Mat dw, db;

private:
    Mat x_;
};

/// Stride 1, kernel 3, no padding, along the time axis.
class Conv1D final : public Layer
{
public:
    static constexpr int kernel = 3;

    Conv1D(Shape in, int filters);

    LayerKind kind() const override { return LayerKind::Conv1D; }
    Shape output_shape() const override { return {static_cast<int>(w.rows()), in_.length - kernel + 1}; }
    Mat forward(const Mat& x, int batch) override;
    Mat backward(const Mat& grad_out) override;
    std::vector<Mat*> params() override { return {&w, &b}; }
    std::vector<Mat*> grads() override { return {&dw, &db}; }
    std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv1D>(*this); }

    // filters x (kernel * channels); column j * channels + c is tap j of channel c
    Mat w, b;
    Mat dw, db;

private:
    Mat cols_;
    int batch_ = 0;
};

class ReLU final : public Layer
{
public:
    explicit ReLU(Shape in) : Layer(in) {}

    LayerKind kind() const override { return LayerKind::ReLU; }
    Shape output_shape() const override { return in_; }
    Mat forward(const Mat& x, int batch) override;
    Mat backward(const Mat& grad_out) override;
    std::unique_ptr<Layer> clone() const override { return std::make_unique<ReLU>(*this); }

private:
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> active_;
};

/// Sequence to vector: feature t * channels + c.
class Flatten final : public Layer
{
public:
    explicit Flatten(Shape in) : Layer(in) {}

    LayerKind kind() const override { return LayerKind::Flatten; }
    Shape output_shape() const override { return {in_.channels * in_.length, 1}; }
    Mat forward(const Mat& x, int batch) override;
    Mat backward(const Mat& grad_out) override;
    std::unique_ptr<Layer> clone() const override { return std::make_unique<Flatten>(*this); }

private:
    int batch_ = 0;
};

/// Gate weights: `ws_*` act on the previous state, `wg_*` on the input.
struct GRUWeights
{
    Mat ws_r, wg_r, bias_r;
    Mat ws_z, wg_z, bias_z;
    Mat ws, wg, bias;

    GRUWeights() = default;
    GRUWeights(int inputs, int units);

    int units() const { return static_cast<int>(ws.rows()); }
    int inputs() const { return static_cast<int>(wg.cols()); }
};

struct GRUGates
{
    Vec reset, update, candidate;
};

Vec gru_cell(const GRUWeights& w, const Vec& s_prev, const Vec& input, GRUGates* gates = nullptr);

/// Runs the cell over the whole sequence from a zero state and emits the final state.
class GRU final : public Layer
{
public:
    GRU(Shape in, int units);

    LayerKind kind() const override { return LayerKind::GRU; }
    Shape output_shape() const override { return {wt.units(), 1}; }
    Mat forward(const Mat& x, int batch) override;
    Mat backward(const Mat& grad_out) override;
    std::vector<Mat*> params() override;
    std::vector<Mat*> grads() override;
    std::unique_ptr<Layer> clone() const override { return std::make_unique<GRU>(*this); }

    GRUWeights wt;
    GRUWeights grad;

private:
    Mat x_;
    // per step, units x batch blocks laid out like the input
    Mat prev_, r_, z_, c_, rs_;
    int batch_ = 0;
};

/// Uniform in +-sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Mat& m, int fan_in, int fan_out, Rng& rng);
void uniform_fill(Mat& m, double bound, Rng& rng);

} // namespace fog::nn
