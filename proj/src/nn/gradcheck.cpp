#include "fog/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace fog::nn {

void GradCheckReport::merge(const GradCheckReport& o)
{
    probes += o.probes;
    failures += o.failures;
    if (o.probes > 0 && (worst.where.empty() || o.max_rel_error > max_rel_error)) {
        max_rel_error = o.max_rel_error;
        worst = o.worst;
    }
}

double relative_error(double a, double n, double floor)
{
    return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

namespace {

double weighted_sum(const Mat& y, const Mat& u)
{
    return y.cwiseProduct(u).sum();
}

void record(GradCheckReport& rep, std::string where, double a, double n, const GradCheckOptions& opt)
{
    const double e = relative_error(a, n, opt.floor);
    ++rep.probes;
    if (!(e <= opt.tolerance))
        ++rep.failures;
    if (e >= rep.max_rel_error || rep.worst.where.empty()) {
        rep.max_rel_error = std::max(rep.max_rel_error, e);
        rep.worst = {std::move(where), a, n, e};
    }
}

} // namespace

void randomize(Network& net, double scale, Rng& rng)
{
    for (Mat* p : net.params())
        uniform_fill(*p, scale, rng);
}

GradCheckReport check_gradients(Network& net, const Mat& x, int batch, Rng& rng, const GradCheckOptions& opt)
{
    GradCheckReport rep;
    const Mat y = net.forward(x, batch);
    Mat u(y.rows(), y.cols());
    uniform_fill(u, 1.0, rng);
    const Mat dx = net.backward(u);

    const auto params = net.params();
    const auto grads = net.grads();
    const double h = opt.step;
    for (std::size_t i = 0; i < params.size(); ++i) {
        Mat& p = *params[i];
        for (int k = 0; k < opt.probes_per_tensor; ++k) {
            const auto idx = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(p.size())));
            const double saved = p.data()[idx];
            p.data()[idx] = saved + h;
            const double up = weighted_sum(net.forward(x, batch), u);
            p.data()[idx] = saved - h;
            const double down = weighted_sum(net.forward(x, batch), u);
            p.data()[idx] = saved;
            record(rep, "param " + std::to_string(i) + "[" + std::to_string(idx) + "]", grads[i]->data()[idx],
                   (up - down) / (2.0 * h), opt);
        }
    }

    Mat xp = x;
    for (int k = 0; k < opt.input_probes; ++k) {
        const auto idx = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(x.size())));
        const double saved = xp.data()[idx];
        xp.data()[idx] = saved + h;
        const double up = weighted_sum(net.forward(xp, batch), u);
        xp.data()[idx] = saved - h;
        const double down = weighted_sum(net.forward(xp, batch), u);
        xp.data()[idx] = saved;
        record(rep, "input[" + std::to_string(idx) + "]", dx.data()[idx], (up - down) / (2.0 * h), opt);
    }
    return rep;
}

GradCheckReport check_architecture(Architecture arch, int obs_dim, int action_dim, int seq,
                                   const GradCheckOptions& opt, const ArchitectureSizes& sizes)
{
    GradCheckReport total;
    Rng rng(opt.seed);
    for (int d = 0; d < opt.draws; ++d) {
        Network net = build_architecture(arch, obs_dim, action_dim, seq, rng, sizes);
        for (Mat* p : net.params())
            if (p->cols() == 1)
                uniform_fill(*p, 0.1, rng);
        Mat x(obs_dim, static_cast<Eigen::Index>(seq) * opt.batch);
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                x(i, j) = rng.uniform(0.0, 2.0);
        total.merge(check_gradients(net, x, opt.batch, rng, opt));
    }
    return total;
}

} // namespace fog::nn
