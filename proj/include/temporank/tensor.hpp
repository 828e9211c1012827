#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

namespace temporank {

// Dense row-major 64-bit float tensor.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        data.assign(numel(shape), 0.0);
    }
    Tensor(std::vector<std::size_t> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {}

    static std::size_t numel(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return n;
    }
    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor scalar(double v) { return Tensor({1}, {v}); }
    static Tensor vector(std::vector<double> v) {
        std::size_t n = v.size();
        return Tensor({n}, std::move(v));
    }

    std::size_t size() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }
    std::size_t rows() const { return shape.at(0); }
    std::size_t cols() const { return shape.at(1); }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
    bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

std::string shape_str(const Tensor& t);

class Graph;

// Light handle into a Graph node.
struct Var {
    Graph* graph = nullptr;
    std::uint32_t id = 0;
};

// Reverse-mode autodiff tape. Nodes are recorded in topological order by
// construction; backward() walks them once in reverse. Single-threaded by
// design — one graph per training step or inference sequence.
class Graph {
  public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    // Leaf holding a copy of `t`.
    Var constant(Tensor t) { return make_leaf(std::move(t), false, nullptr); }

    // Differentiable leaf (no parameter storage attached).
    Var leaf(Tensor t) { return make_leaf(std::move(t), true, nullptr); }

    // Trainable parameter; repeated binds of the same storage return the
    // same node, so shared weights accumulate gradients in one place.
    Var param(Tensor* storage);

    // Parameter bound read-only (stage-B freeze path).
    Var frozen(const Tensor& storage) { return make_leaf(storage, false, nullptr); }

    const Tensor& val(Var v) const { return nodes_[v.id].value; }
    const Tensor& grad(Var v) const;

    // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
    // reachable differentiable node. `loss` must be scalar.
    void backward(Var loss);

    std::size_t size() const { return nodes_.size(); }

    struct ParamGrad {
        Tensor* storage;
        const Tensor* grad;
    };
    // Parameter gradients after backward(), in bind order (deterministic).
    std::vector<ParamGrad> param_grads() const;

    // --- used by op implementations ---
    Var make_node(Tensor value, std::vector<std::uint32_t> parents,
                  std::function<void(Graph&, std::uint32_t)> backprop);
    Tensor& grad_buffer(std::uint32_t id) { return nodes_[id].grad; }
    const Tensor& value_of(std::uint32_t id) const { return nodes_[id].value; }
    bool needs_grad(std::uint32_t id) const { return nodes_[id].requires_grad; }

  private:
    struct Node {
        Tensor value;
        Tensor grad;  // allocated during backward
        bool requires_grad = false;
        Tensor* param_storage = nullptr;
        std::vector<std::uint32_t> parents;
        std::function<void(Graph&, std::uint32_t)> backprop;
    };

    Var make_leaf(Tensor t, bool requires_grad, Tensor* storage);

    std::vector<Node> nodes_;
    // bind order preserved so downstream reductions stay deterministic
    std::vector<std::pair<Tensor*, std::uint32_t>> param_list_;
};

// --- primitives (every one registers a backward rule) ---

Var matmul(Var a, Var b);                 // [m,k]x[k,n] -> [m,n]; [m,k]x[k] -> [m]
Var add(Var a, Var b);                    // same shape
Var add_rowwise(Var m, Var v);            // [t,f] + [f] broadcast over rows
Var mul(Var a, Var b);                    // elementwise
Var scale(Var a, double c);
Var concat(const std::vector<Var>& parts);  // rank-1 concatenation
Var slice(Var v, std::size_t from, std::size_t len);  // rank-1
Var relu(Var x);
Var tanh_(Var x);
Var sigmoid(Var x);
Var softmax(Var x);                       // over the last dimension
Var conv1d(Var input, Var filters, std::size_t width);  // [t,d], [f,width*d] -> [t-width+1,f]
Var maxpool_over_time(Var m);             // [t,f] -> [f]
Var bilinear(Var x, Var m, Var y);        // x^T M y -> [1]
Var embedding_lookup(Var table, const std::vector<std::size_t>& ids);  // [v,d] -> [|ids|,d]
Var nll_loss(Var probabilities, std::size_t target);  // -log(p[target]) -> [1]
Var sum(Var v);                           // -> [1]
Var sqrt_(Var v);                         // elementwise, positive inputs
Var div(Var a, Var b);                    // elementwise same shape

// Max over coordinates of |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
// using central differences on a scalar-valued function of x.
double gradient_check(const std::function<Var(Graph&, Var)>& f, const Tensor& x,
                      double delta = 1e-5);

// Checkpoint format: one raw little-endian float64 blob, plus a JSON
// manifest at <path>.json mapping name -> shape and byte offset.
void checkpoint_save(const std::vector<std::pair<std::string, const Tensor*>>& named,
                     const std::string& path);
std::map<std::string, Tensor> checkpoint_load(const std::string& path);

}  // namespace temporank
