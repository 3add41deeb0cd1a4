#include "fog/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace fog::nn {

AdamState::AdamState(const std::vector<Mat*>& params, AdamConfig cfg) : config(cfg)
{
    for (const Mat* p : params) {
        m.push_back(Mat::Zero(p->rows(), p->cols()));
        v.push_back(Mat::Zero(p->rows(), p->cols()));
    }
}

void adam_step(const std::vector<Mat*>& params, const std::vector<Mat*>& grads, AdamState& s)
{
    if (params.size() != grads.size() || params.size() != s.m.size())
        throw std::invalid_argument("adam_step: parameter list mismatch");
    const auto& c = s.config;
    ++s.step;
    const double corr1 = 1.0 - std::pow(c.beta1, static_cast<double>(s.step));
    const double corr2 = 1.0 - std::pow(c.beta2, static_cast<double>(s.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Mat& p = *params[i];
        const Mat& g = *grads[i];
        if (p.rows() != g.rows() || p.cols() != g.cols() || p.rows() != s.m[i].rows() || p.cols() != s.m[i].cols())
            throw std::invalid_argument("adam_step: shape mismatch");
        s.m[i] = c.beta1 * s.m[i] + (1.0 - c.beta1) * g;
        s.v[i] = c.beta2 * s.v[i] + (1.0 - c.beta2) * g.cwiseProduct(g);
        p.array() -= c.lr * (s.m[i].array() / corr1) / ((s.v[i].array() / corr2).sqrt() + c.eps);
    }
}

double grad_norm(const std::vector<Mat*>& grads)
{
    double sq = 0.0;
    for (const Mat* g : grads)
        sq += g->squaredNorm();
    return std::sqrt(sq);
}

double clip_grad_norm(const std::vector<Mat*>& grads, double max_norm)
{
    const double norm = grad_norm(grads);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (Mat* g : grads)
            *g *= scale;
    }
    return norm;
}

} // namespace fog::nn
