#pragma once

#include "fog/nn/layers.hpp"

#include <cstdint>
#include <vector>

namespace fog::nn {

struct AdamConfig
{
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState
{
    AdamConfig config;
    std::vector<Mat> m;
    std::vector<Mat> v;
    std::int64_t step = 0;

    AdamState() = default;
    AdamState(const std::vector<Mat*>& params, AdamConfig cfg = {});
};

/// One bias-corrected Adam update in place.
void adam_step(const std::vector<Mat*>& params, const std::vector<Mat*>& grads, AdamState& state);

double grad_norm(const std::vector<Mat*>& grads);

/// Rescales gradients to at most `max_norm` (global L2). Returns the norm before clipping.
double clip_grad_norm(const std::vector<Mat*>& grads, double max_norm);

} // namespace fog::nn
