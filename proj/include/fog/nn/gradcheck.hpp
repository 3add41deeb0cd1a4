#pragma once

#include "fog/nn/network.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fog::nn {

struct GradCheckOptions
{
    double step = 1e-5;
    double tolerance = 1e-4;
    // Denominator floor for the relative error; keeps near-zero gradients from
    // turning round-off into a spurious failure.
    double floor = 1e-6;
    int draws = 8;
    int batch = 3;
    int probes_per_tensor = 1;
    int input_probes = 4;
    std::uint64_t seed = 1;
};

struct GradProbe
{
    std::string where;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
};

struct GradCheckReport
{
    int probes = 0;
    int failures = 0;
    double max_rel_error = 0.0;
    GradProbe worst;

    bool passed() const { return probes > 0 && failures == 0; }
    void merge(const GradCheckReport& other);
};

double relative_error(double analytic, double numeric, double floor);

/// Compares backward() against central differences of L = sum(u .* net(x)) at
/// randomly chosen parameter and input coordinates.
GradCheckReport check_gradients(Network& net, const Mat& x, int batch, Rng& rng, const GradCheckOptions& opt);

/// Fresh random networks (including nonzero biases) and inputs, `opt.draws` times.
GradCheckReport check_architecture(Architecture arch, int obs_dim, int action_dim, int seq,
                                   const GradCheckOptions& opt, const ArchitectureSizes& sizes = {});

/// Randomizes every parameter of `net` in +-scale, biases included.
void randomize(Network& net, double scale, Rng& rng);

} // namespace fog::nn
