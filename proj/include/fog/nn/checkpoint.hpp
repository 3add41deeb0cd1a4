#pragma once

#include "fog/nn/adam.hpp"
#include "fog/nn/network.hpp"

#include <iosfwd>

namespace fog::nn {

// Binary, little-endian host doubles. Layout: magic, version, architecture and
// dims, then every parameter matrix as (rows, cols, column-major data).
inline constexpr std::uint32_t checkpoint_version = 1;

void save_network(std::ostream& out, const Network& net);
/// Rebuilds the architecture recorded in the stream and restores its parameters.
Network load_network(std::istream& in);

void save_adam(std::ostream& out, const AdamState& state);
AdamState load_adam(std::istream& in);

// Primitive helpers shared by the agent checkpoint.
void write_u64(std::ostream& out, std::uint64_t v);
std::uint64_t read_u64(std::istream& in);
void write_f64(std::ostream& out, double v);
double read_f64(std::istream& in);
void write_matrix(std::ostream& out, const Mat& m);
Mat read_matrix(std::istream& in);

} // namespace fog::nn
