#include "temporank/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "temporank/kernels.hpp"

namespace temporank {

void RmsProp::update(Tensor& param, const Tensor& grad) {
    if (!param.same_shape(grad)) throw std::invalid_argument("rmsprop: shape mismatch");
    Tensor& acc = acc_.try_emplace(&param, Tensor(param.shape)).first->second;
    for (std::size_t i = 0; i < param.size(); ++i) {
        double g = grad[i];
        acc[i] = rho * acc[i] + (1.0 - rho) * g * g;
        param[i] -= lr * g / (std::sqrt(acc[i]) + eps);
    }
}

void RmsProp::step(Graph& g, double clip_norm) {
    auto pgs = g.param_grads();
    double factor = 1.0;
    if (clip_norm > 0.0) {
        double sq = 0.0;
        for (const auto& pg : pgs) sq += kernels::dot(pg.grad->data.data(), pg.grad->data.data(), pg.grad->size());
        double norm = std::sqrt(sq);
        if (norm > clip_norm) factor = clip_norm / norm;
    }
    for (const auto& pg : pgs) {
        if (factor == 1.0) {
            update(*pg.storage, *pg.grad);
        } else {
            Tensor scaled = *pg.grad;
            kernels::scale(factor, scaled.data.data(), scaled.size());
            update(*pg.storage, scaled);
        }
    }
}

double clip_global_norm(const std::vector<Tensor*>& grads, double max_norm) {
    double sq = 0.0;
    for (const Tensor* g : grads) sq += kernels::dot(g->data.data(), g->data.data(), g->size());
    double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        double factor = max_norm / norm;
        for (Tensor* g : grads)
            for (double& v : g->data) v *= factor;
    }
    return norm;
}

}  // namespace temporank
