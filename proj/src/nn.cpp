#include "temporank/nn.hpp"

#include <stdexcept>

namespace temporank {

LstmParams make_lstm(std::size_t input_dim, std::size_t hidden, Rng& rng) {
    LstmParams p;
    p.w_x = Tensor({4 * hidden, input_dim});
    p.w_h = Tensor({4 * hidden, hidden});
    p.b = Tensor({4 * hidden});
    for (double& v : p.w_x.data) v = rng.uniform(-0.08, 0.08);
    for (double& v : p.w_h.data) v = rng.uniform(-0.08, 0.08);
    // forget gate occupies the second block
    for (std::size_t i = hidden; i < 2 * hidden; ++i) p.b[i] = 1.0;
    return p;
}

LstmVars bind_lstm(Graph& g, LstmParams& params, bool trainable) {
    LstmVars vars;
    vars.hidden = params.hidden();
    if (trainable) {
        vars.w_x = g.param(&params.w_x);
        vars.w_h = g.param(&params.w_h);
        vars.b = g.param(&params.b);
    } else {
        vars.w_x = g.frozen(params.w_x);
        vars.w_h = g.frozen(params.w_h);
        vars.b = g.frozen(params.b);
    }
    return vars;
}

std::pair<Var, Var> lstm_step(const LstmVars& lstm, Var x, Var h_prev, Var c_prev) {
    const std::size_t h = lstm.hidden;
    Var z = add(add(matmul(lstm.w_x, x), matmul(lstm.w_h, h_prev)), lstm.b);
    Var gate_i = sigmoid(slice(z, 0, h));
    Var gate_f = sigmoid(slice(z, h, h));
    Var cand = tanh_(slice(z, 2 * h, h));
    Var gate_o = sigmoid(slice(z, 3 * h, h));
    Var c = add(mul(gate_f, c_prev), mul(gate_i, cand));
    Var out = mul(gate_o, tanh_(c));
    return {out, c};
}

}  // namespace temporank
