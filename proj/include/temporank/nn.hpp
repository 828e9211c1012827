#pragma once

#include <utility>

#include "temporank/rng.hpp"
#include "temporank/tensor.hpp"

namespace temporank {

// One LSTM direction with gates packed i, f, g, o along the first axis.
struct LstmParams {
    Tensor w_x;  // [4H, D]
    Tensor w_h;  // [4H, H]
    Tensor b;    // [4H]

    std::size_t hidden() const { return w_h.cols(); }
    std::size_t input_dim() const { return w_x.cols(); }
};

// Uniform [-0.08, 0.08] weights, forget-gate bias 1.0.
LstmParams make_lstm(std::size_t input_dim, std::size_t hidden, Rng& rng);

struct LstmVars {
    Var w_x, w_h, b;
    std::size_t hidden = 0;
};

LstmVars bind_lstm(Graph& g, LstmParams& params, bool trainable);

// i,f,o = sigmoid(.), g = tanh(.); c = f*c_prev + i*g; h = o*tanh(c)
std::pair<Var, Var> lstm_step(const LstmVars& lstm, Var x, Var h_prev, Var c_prev);

}  // namespace temporank
