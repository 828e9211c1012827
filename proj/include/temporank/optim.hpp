#pragma once

#include <unordered_map>

#include "temporank/tensor.hpp"

namespace temporank {

// acc <- rho*acc + (1-rho)*g^2;  p <- p - lr * g / (sqrt(acc) + eps)
struct RmsProp {
    double lr = 0.001;
    double rho = 0.9;
    double eps = 1e-8;

    // Single-tensor update; accumulator state is keyed by storage address.
    void update(Tensor& param, const Tensor& grad);

    // Applies every parameter gradient recorded in the graph, optionally
    // clipping the concatenated gradient to a global L2 norm first.
    void step(Graph& g, double clip_norm = 0.0);

  private:
    std::unordered_map<const Tensor*, Tensor> acc_;
};

// Scales the set of gradients in place so their joint L2 norm is at most
// max_norm; returns the pre-clip norm.
double clip_global_norm(const std::vector<Tensor*>& grads, double max_norm);

}  // namespace temporank
