#include "fog/nn/layers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fog::nn {

std::string_view to_string(LayerKind kind)
{
    switch (kind) {
    case LayerKind::Dense: return "dense";
    case LayerKind::Conv1D: return "conv1d";
    case LayerKind::GRU: return "gru";
    case LayerKind::ReLU: return "relu";
    case LayerKind::Flatten: return "flatten";
    }
    return "?";
}

void Layer::check_input(const Mat& x, int batch) const
{
    if (batch < 1 || x.rows() != in_.channels || x.cols() != static_cast<Eigen::Index>(in_.length) * batch)
        throw std::invalid_argument(std::string(to_string(kind())) + ": input is " + std::to_string(x.rows()) + "x" +
                                    std::to_string(x.cols()) + ", expected " + std::to_string(in_.channels) + "x" +
                                    std::to_string(in_.length) + "*" + std::to_string(batch));
}

void uniform_fill(Mat& m, double bound, Rng& rng)
{
    // column-major fill order is part of the determinism contract
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m(i, j) = rng.uniform(-bound, bound);
}

void glorot_uniform(Mat& m, int fan_in, int fan_out, Rng& rng)
{
    uniform_fill(m, std::sqrt(6.0 / (fan_in + fan_out)), rng);
}

// ---------------------------------------------------------------- dense

Dense::Dense(int in, int out)
    : Layer({in, 1}), w(Mat::Zero(out, in)), b(Mat::Zero(out, 1)), dw(Mat::Zero(out, in)), db(Mat::Zero(out, 1))
{
    if (in < 1 || out < 1)
        throw std::invalid_argument("Dense: sizes must be positive");
}

Mat Dense::forward(const Mat& x, int batch)
{
    check_input(x, batch);
    x_ = x;
    Mat y = w * x;
    y.colwise() += b.col(0);
    return y;
}

Mat Dense::backward(const Mat& g)
{
    dw.noalias() = g * x_.transpose();
    db = g.rowwise().sum();
    return w.transpose() * g;
}

// ---------------------------------------------------------------- conv1d

Conv1D::Conv1D(Shape in, int filters)
    : Layer(in),
      w(Mat::Zero(filters, kernel * in.channels)),
      b(Mat::Zero(filters, 1)),
      dw(Mat::Zero(filters, kernel * in.channels)),
      db(Mat::Zero(filters, 1))
{
    if (filters < 1 || in.channels < 1)
        throw std::invalid_argument("Conv1D: sizes must be positive");
    if (in.length < kernel)
        throw std::invalid_argument("Conv1D: sequence length " + std::to_string(in.length) +
                                    " shorter than the kernel");
}

Mat Conv1D::forward(const Mat& x, int batch)
{
    check_input(x, batch);
    batch_ = batch;
    const int c = in_.channels;
    const int out_len = in_.length - kernel + 1;
    cols_.resize(kernel * c, static_cast<Eigen::Index>(out_len) * batch);
    for (int t = 0; t < out_len; ++t)
        for (int j = 0; j < kernel; ++j)
            cols_.block(j * c, t * batch, c, batch) = x.block(0, (t + j) * batch, c, batch);
    Mat y = w * cols_;
    y.colwise() += b.col(0);
    return y;
}

Mat Conv1D::backward(const Mat& g)
{
    const int c = in_.channels;
    const int out_len = in_.length - kernel + 1;
    dw.noalias() = g * cols_.transpose();
    db = g.rowwise().sum();
    const Mat dcols = w.transpose() * g;
    Mat dx = Mat::Zero(c, static_cast<Eigen::Index>(in_.length) * batch_);
    for (int t = 0; t < out_len; ++t)
        for (int j = 0; j < kernel; ++j)
            dx.block(0, (t + j) * batch_, c, batch_) += dcols.block(j * c, t * batch_, c, batch_);
    return dx;
}

// ---------------------------------------------------------------- relu

Mat ReLU::forward(const Mat& x, int batch)
{
    check_input(x, batch);
    active_ = x.array() > 0.0;
    return active_.select(x, 0.0);
}

Mat ReLU::backward(const Mat& g)
{
    return active_.select(g, 0.0);
}

// ---------------------------------------------------------------- flatten

Mat Flatten::forward(const Mat& x, int batch)
{
    check_input(x, batch);
    batch_ = batch;
    const int c = in_.channels;
    Mat y(static_cast<Eigen::Index>(c) * in_.length, batch);
    for (int t = 0; t < in_.length; ++t)
        y.block(t * c, 0, c, batch) = x.block(0, t * batch, c, batch);
    return y;
}

Mat Flatten::backward(const Mat& g)
{
    const int c = in_.channels;
    Mat dx(c, static_cast<Eigen::Index>(in_.length) * batch_);
    for (int t = 0; t < in_.length; ++t)
        dx.block(0, t * batch_, c, batch_) = g.block(t * c, 0, c, batch_);
    return dx;
}

// ---------------------------------------------------------------- gru

namespace {

Mat sigmoid(const Mat& a)
{
    return (1.0 / (1.0 + (-a.array()).exp())).matrix();
}

Mat tanh_fast(const Mat& a)
{
    return (1.0 - 2.0 / ((2.0 * a.array()).exp() + 1.0)).matrix();
}

} // namespace

GRUWeights::GRUWeights(int inputs, int units)
    : ws_r(Mat::Zero(units, units)),
      wg_r(Mat::Zero(units, inputs)),
      bias_r(Mat::Zero(units, 1)),
      ws_z(Mat::Zero(units, units)),
      wg_z(Mat::Zero(units, inputs)),
      bias_z(Mat::Zero(units, 1)),
      ws(Mat::Zero(units, units)),
      wg(Mat::Zero(units, inputs)),
      bias(Mat::Zero(units, 1))
{
}

Vec gru_cell(const GRUWeights& w, const Vec& s_prev, const Vec& input, GRUGates* gates)
{
    if (s_prev.size() != w.units() || input.size() != w.inputs())
        throw std::invalid_argument("gru_cell: dimension mismatch");
    const Vec r = sigmoid(w.ws_r * s_prev + w.wg_r * input + w.bias_r.col(0));
    const Vec z = sigmoid(w.ws_z * s_prev + w.wg_z * input + w.bias_z.col(0));
    const Vec rs = r.cwiseProduct(s_prev);
    const Vec cand = tanh_fast(w.ws * rs + w.wg * input + w.bias.col(0));
    Vec s = z.cwiseProduct(s_prev) + (Vec::Ones(z.size()) - z).cwiseProduct(cand);
    if (gates)
        *gates = {r, z, cand};
    return s;
}

GRU::GRU(Shape in, int units) : Layer(in), wt(in.channels, units), grad(in.channels, units)
{
    if (units < 1 || in.channels < 1 || in.length < 1)
        throw std::invalid_argument("GRU: sizes must be positive");
}

std::vector<Mat*> GRU::params()
{
    return {&wt.ws_r, &wt.wg_r, &wt.bias_r, &wt.ws_z, &wt.wg_z, &wt.bias_z, &wt.ws, &wt.wg, &wt.bias};
}

std::vector<Mat*> GRU::grads()
{
    return {&grad.ws_r, &grad.wg_r, &grad.bias_r, &grad.ws_z, &grad.wg_z, &grad.bias_z,
            &grad.ws, &grad.wg, &grad.bias};
}

Mat GRU::forward(const Mat& x, int batch)
{
    check_input(x, batch);
    x_ = x;
    batch_ = batch;
    const int h = wt.units();
    const int len = in_.length;
    const Eigen::Index cols = static_cast<Eigen::Index>(len) * batch;

    Mat xr = wt.wg_r * x;
    xr.colwise() += wt.bias_r.col(0);
    Mat xz = wt.wg_z * x;
    xz.colwise() += wt.bias_z.col(0);
    Mat xc = wt.wg * x;
    xc.colwise() += wt.bias.col(0);

    prev_.resize(h, cols);
    r_.resize(h, cols);
    z_.resize(h, cols);
    c_.resize(h, cols);
    rs_.resize(h, cols);

    Mat s = Mat::Zero(h, batch);
    for (int t = 0; t < len; ++t) {
        const Eigen::Index o = static_cast<Eigen::Index>(t) * batch;
        prev_.middleCols(o, batch) = s;
        auto r = r_.middleCols(o, batch);
        auto z = z_.middleCols(o, batch);
        auto c = c_.middleCols(o, batch);
        auto rs = rs_.middleCols(o, batch);
        r = sigmoid(wt.ws_r * s + xr.middleCols(o, batch));
        z = sigmoid(wt.ws_z * s + xz.middleCols(o, batch));
        rs = r.cwiseProduct(s);
        c = tanh_fast(wt.ws * rs + xc.middleCols(o, batch));
        s = (z.array() * s.array() + (1.0 - z.array()) * c.array()).matrix();
    }
    return s;
}

Mat GRU::backward(const Mat& g)
{
    const int h = wt.units();
    const int len = in_.length;
    const int batch = batch_;
    const Eigen::Index cols = static_cast<Eigen::Index>(len) * batch;

    Mat dar(h, cols), daz(h, cols), dac(h, cols);
    Mat ds = g;
    for (int t = len - 1; t >= 0; --t) {
        const Eigen::Index o = static_cast<Eigen::Index>(t) * batch;
        const auto prev = prev_.middleCols(o, batch).array();
        const auto r = r_.middleCols(o, batch).array();
        const auto z = z_.middleCols(o, batch).array();
        const auto c = c_.middleCols(o, batch).array();

        auto ac = dac.middleCols(o, batch);
        auto az = daz.middleCols(o, batch);
        auto ar = dar.middleCols(o, batch);
        ac = (ds.array() * (1.0 - z) * (1.0 - c * c)).matrix();
        az = (ds.array() * (prev - c) * z * (1.0 - z)).matrix();
        const Mat drs = wt.ws.transpose() * ac;
        ar = (drs.array() * prev * r * (1.0 - r)).matrix();

        Mat next = (ds.array() * z + drs.array() * r).matrix();
        next.noalias() += wt.ws_r.transpose() * ar;
        next.noalias() += wt.ws_z.transpose() * az;
        ds = std::move(next);
    }

    grad.ws.noalias() = dac * rs_.transpose();
    grad.ws_r.noalias() = dar * prev_.transpose();
    grad.ws_z.noalias() = daz * prev_.transpose();
    grad.wg.noalias() = dac * x_.transpose();
    grad.wg_r.noalias() = dar * x_.transpose();
    grad.wg_z.noalias() = daz * x_.transpose();
    grad.bias = dac.rowwise().sum();
    grad.bias_r = dar.rowwise().sum();
    grad.bias_z = daz.rowwise().sum();

    Mat dx = wt.wg.transpose() * dac;
    dx.noalias() += wt.wg_r.transpose() * dar;
    dx.noalias() += wt.wg_z.transpose() * daz;
    return dx;
}

} // namespace fog::nn
