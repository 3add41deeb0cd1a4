#include "fog/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fog::nn {

namespace {

constexpr std::array<char, 4> net_magic{'F', 'Q', 'N', 'N'};
constexpr std::array<char, 4> adam_magic{'F', 'Q', 'A', 'D'};

void expect(std::istream& in, const std::array<char, 4>& magic, const char* what)
{
    std::array<char, 4> got{};
    in.read(got.data(), 4);
    if (!in || got != magic)
        throw std::runtime_error(std::string("checkpoint: bad ") + what + " header");
    const auto version = read_u64(in);
    if (version != checkpoint_version)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
}

std::unique_ptr<Layer> make_layer(LayerKind kind, Shape in, int out)
{
    switch (kind) {
    case LayerKind::Dense: return std::make_unique<Dense>(in.channels, out);
    case LayerKind::Conv1D: return std::make_unique<Conv1D>(in, out);
    case LayerKind::GRU: return std::make_unique<GRU>(in, out);
    case LayerKind::ReLU: return std::make_unique<ReLU>(in);
    case LayerKind::Flatten: return std::make_unique<Flatten>(in);
    }
    throw std::runtime_error("checkpoint: unknown layer kind");
}

} // namespace

void write_u64(std::ostream& out, std::uint64_t v)
{
    static_assert(std::endian::native == std::endian::little);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in)
{
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in)
        throw std::runtime_error("checkpoint: truncated stream");
    return v;
}

void write_f64(std::ostream& out, double v)
{
    write_u64(out, std::bit_cast<std::uint64_t>(v));
}

double read_f64(std::istream& in)
{
    return std::bit_cast<double>(read_u64(in));
}

void write_matrix(std::ostream& out, const Mat& m)
{
    write_u64(out, static_cast<std::uint64_t>(m.rows()));
    write_u64(out, static_cast<std::uint64_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Mat read_matrix(std::istream& in)
{
    const auto rows = read_u64(in);
    const auto cols = read_u64(in);
    if (rows > (1u << 24) || cols > (1u << 24))
        throw std::runtime_error("checkpoint: implausible matrix size");
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in)
        throw std::runtime_error("checkpoint: truncated matrix");
    return m;
}

void save_network(std::ostream& out, const Network& net)
{
    out.write(net_magic.data(), 4);
    write_u64(out, checkpoint_version);
    write_u64(out, static_cast<std::uint64_t>(net.arch));
    write_u64(out, static_cast<std::uint64_t>(net.input_shape().channels));
    write_u64(out, static_cast<std::uint64_t>(net.input_shape().length));
    const auto specs = net.describe();
    write_u64(out, specs.size());
    for (const auto& s : specs) {
        write_u64(out, static_cast<std::uint64_t>(s.kind));
        write_u64(out, static_cast<std::uint64_t>(s.out.channels));
    }
    const auto params = net.params();
    write_u64(out, params.size());
    for (const Mat* p : params)
        write_matrix(out, *p);
    if (!out)
        throw std::runtime_error("checkpoint: write failed");
}

Network load_network(std::istream& in)
{
    expect(in, net_magic, "network");
    const auto arch = static_cast<Architecture>(read_u64(in));
    const int channels = static_cast<int>(read_u64(in));
    const int length = static_cast<int>(read_u64(in));
    Network net({channels, length});
    net.arch = arch;
    const auto layers = read_u64(in);
    for (std::uint64_t i = 0; i < layers; ++i) {
        const auto kind = static_cast<LayerKind>(read_u64(in));
        const int out = static_cast<int>(read_u64(in));
        net.add(make_layer(kind, net.output_shape(), out));
    }
    auto params = net.params();
    if (read_u64(in) != params.size())
        throw std::runtime_error("checkpoint: parameter count mismatch");
    for (Mat* p : params) {
        Mat m = read_matrix(in);
        if (m.rows() != p->rows() || m.cols() != p->cols())
            throw std::runtime_error("checkpoint: parameter shape mismatch");
        *p = std::move(m);
    }
    return net;
}

void save_adam(std::ostream& out, const AdamState& s)
{
    out.write(adam_magic.data(), 4);
    write_u64(out, checkpoint_version);
    write_f64(out, s.config.lr);
    write_f64(out, s.config.beta1);
    write_f64(out, s.config.beta2);
    write_f64(out, s.config.eps);
    write_u64(out, static_cast<std::uint64_t>(s.step));
    write_u64(out, s.m.size());
    for (std::size_t i = 0; i < s.m.size(); ++i) {
        write_matrix(out, s.m[i]);
        write_matrix(out, s.v[i]);
    }
}

AdamState load_adam(std::istream& in)
{
    expect(in, adam_magic, "optimizer");
    AdamState s;
    s.config.lr = read_f64(in);
    s.config.beta1 = read_f64(in);
    s.config.beta2 = read_f64(in);
    s.config.eps = read_f64(in);
    s.step = static_cast<std::int64_t>(read_u64(in));
    const auto n = read_u64(in);
    for (std::uint64_t i = 0; i < n; ++i) {
        s.m.push_back(read_matrix(in));
        s.v.push_back(read_matrix(in));
    }
    return s;
}

} // namespace fog::nn
