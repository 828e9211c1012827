#include "temporank/tensor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "temporank/kernels.hpp"

namespace temporank {

std::string shape_str(const Tensor& t) {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < t.shape.size(); ++i) {
        if (i) out << ",";
        out << t.shape[i];
    }
    out << "]";
    return out.str();
}

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a) {
    throw std::invalid_argument(std::string(op) + ": bad shape " + shape_str(a));
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
    throw std::invalid_argument(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " +
                                shape_str(b));
}

void ensure_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) shape_error(op, a, b);
}

Graph& common_graph(Var a, Var b) {
    if (a.graph != b.graph) throw std::invalid_argument("op spans two graphs");
    return *a.graph;
}

}  // namespace

Var Graph::make_leaf(Tensor t, bool requires_grad, Tensor* storage) {
    Node node;
    node.value = std::move(t);
    node.requires_grad = requires_grad;
    node.param_storage = storage;
    nodes_.push_back(std::move(node));
    return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Graph::param(Tensor* storage) {
    for (const auto& [ptr, id] : param_list_)
        if (ptr == storage) return Var{this, id};
    Var v = make_leaf(*storage, true, storage);
    param_list_.emplace_back(storage, v.id);
    return v;
}

const Tensor& Graph::grad(Var v) const {
    const Node& node = nodes_[v.id];
    if (!node.requires_grad) throw std::logic_error("grad(): node does not require gradients");
    if (node.grad.size() != node.value.size())
        throw std::logic_error("grad(): backward() has not populated this node");
    return node.grad;
}

Var Graph::make_node(Tensor value, std::vector<std::uint32_t> parents,
                     std::function<void(Graph&, std::uint32_t)> backprop) {
    Node node;
    node.value = std::move(value);
    for (std::uint32_t p : parents)
        if (nodes_[p].requires_grad) node.requires_grad = true;
    node.parents = std::move(parents);
    if (node.requires_grad) node.backprop = std::move(backprop);
    nodes_.push_back(std::move(node));
    return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

void Graph::backward(Var loss) {
    if (loss.graph != this) throw std::invalid_argument("backward: loss from another graph");
    Node& loss_node = nodes_[loss.id];
    if (loss_node.value.size() != 1) throw std::invalid_argument("backward: loss must be scalar");
    if (!loss_node.requires_grad)
        throw std::invalid_argument("backward: loss does not depend on any differentiable leaf");

    std::vector<char> reachable(loss.id + 1, 0);
    reachable[loss.id] = 1;
    for (std::uint32_t id = loss.id + 1; id-- > 0;) {
        if (!reachable[id]) continue;
        for (std::uint32_t p : nodes_[id].parents) reachable[p] = 1;
    }
    for (std::uint32_t id = 0; id <= loss.id; ++id) {
        Node& n = nodes_[id];
        if (!reachable[id] || !n.requires_grad) continue;
        if (n.grad.size() != n.value.size())
            n.grad = Tensor(n.value.shape);
        else
            n.grad.fill(0.0);
    }
    loss_node.grad[0] = 1.0;
    for (std::uint32_t id = loss.id + 1; id-- > 0;) {
        Node& n = nodes_[id];
        if (reachable[id] && n.requires_grad && n.backprop) n.backprop(*this, id);
    }
}

std::vector<Graph::ParamGrad> Graph::param_grads() const {
    std::vector<ParamGrad> out;
    out.reserve(param_list_.size());
    for (const auto& [storage, id] : param_list_) {
        const Node& n = nodes_[id];
        if (n.grad.size() == n.value.size()) out.push_back({storage, &n.grad});
    }
    return out;
}

// --- primitives ---

Var matmul(Var av, Var bv) {
    Graph& g = common_graph(av, bv);
    const Tensor& a = g.val(av);
    const Tensor& b = g.val(bv);
    if (a.rank() != 2) shape_error("matmul", a, b);
    const std::size_t m = a.rows(), k = a.cols();

    if (b.rank() == 1) {
        if (b.shape[0] != k) shape_error("matmul", a, b);
        Tensor out({m});
        for (std::size_t i = 0; i < m; ++i) out[i] = kernels::dot(&a.data[i * k], b.data.data(), k);
        return g.make_node(std::move(out), {av.id, bv.id}, [av, bv, m, k](Graph& gg, std::uint32_t self) {
            const Tensor& dout = gg.grad_buffer(self);
            const Tensor& aa = gg.value_of(av.id);
            const Tensor& bb = gg.value_of(bv.id);
            if (gg.needs_grad(av.id)) {
                Tensor& da = gg.grad_buffer(av.id);
                for (std::size_t i = 0; i < m; ++i)
                    kernels::axpy(dout[i], bb.data.data(), &da.data[i * k], k);
            }
            if (gg.needs_grad(bv.id)) {
                Tensor& db = gg.grad_buffer(bv.id);
                for (std::size_t i = 0; i < m; ++i)
                    kernels::axpy(dout[i], &aa.data[i * k], db.data.data(), k);
            }
        });
    }

    if (b.rank() != 2 || b.rows() != k) shape_error("matmul", a, b);
    const std::size_t n = b.cols();
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p)
            kernels::axpy(a.at(i, p), &b.data[p * n], &out.data[i * n], n);
    return g.make_node(std::move(out), {av.id, bv.id}, [av, bv, m, k, n](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        const Tensor& aa = gg.value_of(av.id);
        const Tensor& bb = gg.value_of(bv.id);
        if (gg.needs_grad(av.id)) {
            Tensor& da = gg.grad_buffer(av.id);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p)
                    da.data[i * k + p] += kernels::dot(&dout.data[i * n], &bb.data[p * n], n);
        }
        if (gg.needs_grad(bv.id)) {
            Tensor& db = gg.grad_buffer(bv.id);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p)
                    kernels::axpy(aa.data[i * k + p], &dout.data[i * n], &db.data[p * n], n);
        }
    });
}

Var add(Var av, Var bv) {
    Graph& g = common_graph(av, bv);
    const Tensor& a = g.val(av);
    const Tensor& b = g.val(bv);
    ensure_same_shape("add", a, b);
    Tensor out(a.shape);
    kernels::add(a.data.data(), b.data.data(), out.data.data(), a.size());
    return g.make_node(std::move(out), {av.id, bv.id}, [av, bv](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        if (gg.needs_grad(av.id))
            kernels::axpy(1.0, dout.data.data(), gg.grad_buffer(av.id).data.data(), dout.size());
        if (gg.needs_grad(bv.id))
            kernels::axpy(1.0, dout.data.data(), gg.grad_buffer(bv.id).data.data(), dout.size());
    });
}

Var add_rowwise(Var mv, Var vv) {
    Graph& g = common_graph(mv, vv);
    const Tensor& m = g.val(mv);
    const Tensor& v = g.val(vv);
    if (m.rank() != 2 || v.rank() != 1 || v.shape[0] != m.cols()) shape_error("add_rowwise", m, v);
    const std::size_t rows = m.rows(), cols = m.cols();
    Tensor out({rows, cols});
    for (std::size_t r = 0; r < rows; ++r)
        kernels::add(&m.data[r * cols], v.data.data(), &out.data[r * cols], cols);
    return g.make_node(std::move(out), {mv.id, vv.id}, [mv, vv, rows, cols](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        if (gg.needs_grad(mv.id))
            kernels::axpy(1.0, dout.data.data(), gg.grad_buffer(mv.id).data.data(), dout.size());
        if (gg.needs_grad(vv.id)) {
            Tensor& dv = gg.grad_buffer(vv.id);
            for (std::size_t r = 0; r < rows; ++r)
                kernels::axpy(1.0, &dout.data[r * cols], dv.data.data(), cols);
        }
    });
}

Var mul(Var av, Var bv) {
    Graph& g = common_graph(av, bv);
    const Tensor& a = g.val(av);
    const Tensor& b = g.val(bv);
    ensure_same_shape("mul", a, b);
    Tensor out(a.shape);
    kernels::mul(a.data.data(), b.data.data(), out.data.data(), a.size());
    return g.make_node(std::move(out), {av.id, bv.id}, [av, bv](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        const Tensor& aa = gg.value_of(av.id);
        const Tensor& bb = gg.value_of(bv.id);
        if (gg.needs_grad(av.id)) {
            Tensor& da = gg.grad_buffer(av.id);
            for (std::size_t i = 0; i < dout.size(); ++i) da[i] += dout[i] * bb[i];
        }
        if (gg.needs_grad(bv.id)) {
            Tensor& db = gg.grad_buffer(bv.id);
            for (std::size_t i = 0; i < dout.size(); ++i) db[i] += dout[i] * aa[i];
        }
    });
}

Var scale(Var av, double c) {
    Graph& g = *av.graph;
    const Tensor& a = g.val(av);
    Tensor out = a;
    kernels::scale(c, out.data.data(), out.size());
    return g.make_node(std::move(out), {av.id}, [av, c](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        if (gg.needs_grad(av.id))
            kernels::axpy(c, dout.data.data(), gg.grad_buffer(av.id).data.data(), dout.size());
    });
}

Var concat(const std::vector<Var>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat: no inputs");
    Graph& g = *parts[0].graph;
    std::size_t total = 0;
    std::vector<std::uint32_t> ids;
    ids.reserve(parts.size());
    for (Var p : parts) {
        const Tensor& t = g.val(p);
        if (t.rank() != 1) shape_error("concat", t);
        total += t.size();
        ids.push_back(p.id);
    }
    Tensor out({total});
    std::size_t offset = 0;
    for (Var p : parts) {
        const Tensor& t = g.val(p);
        std::copy(t.data.begin(), t.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(offset));
        offset += t.size();
    }
    auto parent_ids = ids;
    return g.make_node(std::move(out), std::move(ids), [parent_ids](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        std::size_t offset = 0;
        for (std::uint32_t pid : parent_ids) {
            std::size_t n = gg.value_of(pid).size();
            if (gg.needs_grad(pid))
                kernels::axpy(1.0, &dout.data[offset], gg.grad_buffer(pid).data.data(), n);
            offset += n;
        }
    });
}

Var slice(Var vv, std::size_t from, std::size_t len) {
    Graph& g = *vv.graph;
    const Tensor& v = g.val(vv);
    if (v.rank() != 1 || from + len > v.size()) shape_error("slice", v);
    Tensor out({len});
    std::copy(v.data.begin() + static_cast<std::ptrdiff_t>(from),
              v.data.begin() + static_cast<std::ptrdiff_t>(from + len), out.data.begin());
    return g.make_node(std::move(out), {vv.id}, [vv, from, len](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        if (gg.needs_grad(vv.id))
            kernels::axpy(1.0, dout.data.data(), &gg.grad_buffer(vv.id).data[from], len);
    });
}

Var relu(Var xv) {
    Graph& g = *xv.graph;
    const Tensor& x = g.val(xv);
    Tensor out(x.shape);
    kernels::relu(x.data.data(), out.data.data(), x.size());
    return g.make_node(std::move(out), {xv.id}, [xv](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        if (!gg.needs_grad(xv.id)) return;
        const Tensor& x = gg.value_of(xv.id);
        Tensor& dx = gg.grad_buffer(xv.id);
        for (std::size_t i = 0; i < dout.size(); ++i)
            if (x[i] > 0.0) dx[i] += dout[i];
    });
}

Var tanh_(Var xv) {
    Graph& g = *xv.graph;
    const Tensor& x = g.val(xv);
    Tensor out(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
    return g.make_node(std::move(out), {xv.id}, [xv](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        if (!gg.needs_grad(xv.id)) return;
        const Tensor& y = gg.value_of(self);
        Tensor& dx = gg.grad_buffer(xv.id);
        for (std::size_t i = 0; i < dout.size(); ++i) dx[i] += dout[i] * (1.0 - y[i] * y[i]);
    });
}

Var sigmoid(Var xv) {
    Graph& g = *xv.graph;
    const Tensor& x = g.val(xv);
    Tensor out(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-x[i]));
    return g.make_node(std::move(out), {xv.id}, [xv](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        if (!gg.needs_grad(xv.id)) return;
        const Tensor& y = gg.value_of(self);
        Tensor& dx = gg.grad_buffer(xv.id);
        for (std::size_t i = 0; i < dout.size(); ++i) dx[i] += dout[i] * y[i] * (1.0 - y[i]);
    });
}

namespace {

void softmax_row(const double* x, double* y, std::size_t n) {
    double m = kernels::max(x, n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = std::exp(x[i] - m);
        z += y[i];
    }
    kernels::scale(1.0 / z, y, n);
}

}  // namespace

Var softmax(Var xv) {
    Graph& g = *xv.graph;
    const Tensor& x = g.val(xv);
    if (x.rank() < 1 || x.rank() > 2) shape_error("softmax", x);
    const std::size_t cols = x.shape.back();
    const std::size_t rows = x.size() / cols;
    if (cols == 0) shape_error("softmax", x);
    Tensor out(x.shape);
    for (std::size_t r = 0; r < rows; ++r) softmax_row(&x.data[r * cols], &out.data[r * cols], cols);
    return g.make_node(std::move(out), {xv.id}, [xv, rows, cols](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        if (!gg.needs_grad(xv.id)) return;
        const Tensor& y = gg.value_of(self);
        Tensor& dx = gg.grad_buffer(xv.id);
        for (std::size_t r = 0; r < rows; ++r) {
            const double* yr = &y.data[r * cols];
            const double* dr = &dout.data[r * cols];
            double inner = kernels::dot(yr, dr, cols);
            for (std::size_t i = 0; i < cols; ++i) dx.data[r * cols + i] += yr[i] * (dr[i] - inner);
        }
    });
}

Var conv1d(Var inv, Var fv, std::size_t width) {
    Graph& g = common_graph(inv, fv);
    const Tensor& input = g.val(inv);
    const Tensor& filters = g.val(fv);
    if (input.rank() != 2 || filters.rank() != 2) shape_error("conv1d", input, filters);
    const std::size_t t_len = input.rows(), d = input.cols();
    const std::size_t f_count = filters.rows();
    if (width == 0 || t_len < width || filters.cols() != width * d) shape_error("conv1d", input, filters);
    const std::size_t out_len = t_len - width + 1;
    // valid padding, stride 1; each window is contiguous in row-major layout
    Tensor out({out_len, f_count});
    const std::size_t wd = width * d;
    for (std::size_t t = 0; t < out_len; ++t)
        for (std::size_t f = 0; f < f_count; ++f)
            out.at(t, f) = kernels::dot(&input.data[t * d], &filters.data[f * wd], wd);
    return g.make_node(std::move(out), {inv.id, fv.id},
                       [inv, fv, out_len, f_count, d, wd](Graph& gg, std::uint32_t self) {
                           const Tensor& dout = gg.grad_buffer(self);
                           const Tensor& input = gg.value_of(inv.id);
                           const Tensor& filters = gg.value_of(fv.id);
                           if (gg.needs_grad(inv.id)) {
                               Tensor& din = gg.grad_buffer(inv.id);
                               for (std::size_t t = 0; t < out_len; ++t)
                                   for (std::size_t f = 0; f < f_count; ++f)
                                       kernels::axpy(dout.at(t, f), &filters.data[f * wd],
                                                     &din.data[t * d], wd);
                           }
                           if (gg.needs_grad(fv.id)) {
                               Tensor& df = gg.grad_buffer(fv.id);
                               for (std::size_t t = 0; t < out_len; ++t)
                                   for (std::size_t f = 0; f < f_count; ++f)
                                       kernels::axpy(dout.at(t, f), &input.data[t * d],
                                                     &df.data[f * wd], wd);
                           }
                       });
}

Var maxpool_over_time(Var mv) {
    Graph& g = *mv.graph;
    const Tensor& m = g.val(mv);
    if (m.rank() != 2 || m.rows() == 0) shape_error("maxpool_over_time", m);
    const std::size_t rows = m.rows(), cols = m.cols();
    Tensor out({cols});
    std::vector<std::size_t> argmax(cols, 0);
    for (std::size_t c = 0; c < cols; ++c) {
        double best = m.at(0, c);
        for (std::size_t r = 1; r < rows; ++r)
            if (m.at(r, c) > best) {
                best = m.at(r, c);
                argmax[c] = r;
            }
        out[c] = best;
    }
    return g.make_node(std::move(out), {mv.id}, [mv, argmax, cols](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        if (!gg.needs_grad(mv.id)) return;
        Tensor& dm = gg.grad_buffer(mv.id);
        for (std::size_t c = 0; c < cols; ++c) dm.at(argmax[c], c) += dout[c];
    });
}

Var bilinear(Var xv, Var mv, Var yv) {
    Graph& g = common_graph(xv, mv);
    common_graph(mv, yv);
    const Tensor& x = g.val(xv);
    const Tensor& m = g.val(mv);
    const Tensor& y = g.val(yv);
    if (x.rank() != 1 || y.rank() != 1 || m.rank() != 2 || m.rows() != x.size() || m.cols() != y.size())
        shape_error("bilinear", m, x);
    const std::size_t a = x.size(), b = y.size();
    // my = M y, saved for both the forward value and dx
    Tensor my({a});
    for (std::size_t i = 0; i < a; ++i) my[i] = kernels::dot(&m.data[i * b], y.data.data(), b);
    Tensor out = Tensor::scalar(kernels::dot(x.data.data(), my.data.data(), a));
    return g.make_node(std::move(out), {xv.id, mv.id, yv.id},
                       [xv, mv, yv, my, a, b](Graph& gg, std::uint32_t self) {
                           const double dz = gg.grad_buffer(self)[0];
                           const Tensor& x = gg.value_of(xv.id);
                           const Tensor& m = gg.value_of(mv.id);
                           const Tensor& y = gg.value_of(yv.id);
                           if (gg.needs_grad(xv.id))
                               kernels::axpy(dz, my.data.data(), gg.grad_buffer(xv.id).data.data(), a);
                           if (gg.needs_grad(yv.id)) {
                               Tensor& dy = gg.grad_buffer(yv.id);
                               for (std::size_t i = 0; i < a; ++i)
                                   kernels::axpy(dz * x[i], &m.data[i * b], dy.data.data(), b);
                           }
                           if (gg.needs_grad(mv.id)) {
                               Tensor& dm = gg.grad_buffer(mv.id);
                               for (std::size_t i = 0; i < a; ++i)
                                   kernels::axpy(dz * x[i], y.data.data(), &dm.data[i * b], b);
                           }
                       });
}

Var embedding_lookup(Var tablev, const std::vector<std::size_t>& ids) {
    Graph& g = *tablev.graph;
    const Tensor& table = g.val(tablev);
    if (table.rank() != 2) shape_error("embedding_lookup", table);
    const std::size_t d = table.cols();
    for (std::size_t id : ids)
        if (id >= table.rows())
            throw std::out_of_range("embedding_lookup: row " + std::to_string(id) + " out of range");
    Tensor out({ids.size(), d});
    for (std::size_t t = 0; t < ids.size(); ++t)
        std::memcpy(&out.data[t * d], &table.data[ids[t] * d], d * sizeof(double));
    return g.make_node(std::move(out), {tablev.id}, [tablev, ids, d](Graph& gg, std::uint32_t self) {
        if (!gg.needs_grad(tablev.id)) return;
        const Tensor& dout = gg.grad_buffer(self);
        Tensor& dt = gg.grad_buffer(tablev.id);
        for (std::size_t t = 0; t < ids.size(); ++t)
            kernels::axpy(1.0, &dout.data[t * d], &dt.data[ids[t] * d], d);
    });
}

Var nll_loss(Var pv, std::size_t target) {
    Graph& g = *pv.graph;
    const Tensor& p = g.val(pv);
    if (p.rank() != 1 || target >= p.size()) shape_error("nll_loss", p);
    Tensor out = Tensor::scalar(-std::log(p[target]));
    return g.make_node(std::move(out), {pv.id}, [pv, target](Graph& gg, std::uint32_t self) {
        const double dz = gg.grad_buffer(self)[0];
        if (!gg.needs_grad(pv.id)) return;
        const Tensor& p = gg.value_of(pv.id);
        gg.grad_buffer(pv.id)[target] -= dz / p[target];
    });
}

Var sum(Var vv) {
    Graph& g = *vv.graph;
    const Tensor& v = g.val(vv);
    Tensor out = Tensor::scalar(kernels::sum(v.data.data(), v.size()));
    return g.make_node(std::move(out), {vv.id}, [vv](Graph& gg, std::uint32_t self) {
        const double dz = gg.grad_buffer(self)[0];
        if (!gg.needs_grad(vv.id)) return;
        Tensor& dv = gg.grad_buffer(vv.id);
        for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += dz;
    });
}

Var sqrt_(Var vv) {
    Graph& g = *vv.graph;
    const Tensor& v = g.val(vv);
    Tensor out(v.shape);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::sqrt(v[i]);
    return g.make_node(std::move(out), {vv.id}, [vv](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        if (!gg.needs_grad(vv.id)) return;
        const Tensor& y = gg.value_of(self);
        Tensor& dv = gg.grad_buffer(vv.id);
        for (std::size_t i = 0; i < dout.size(); ++i) dv[i] += dout[i] * 0.5 / y[i];
    });
}

Var div(Var av, Var bv) {
    Graph& g = common_graph(av, bv);
    const Tensor& a = g.val(av);
    const Tensor& b = g.val(bv);
    ensure_same_shape("div", a, b);
    Tensor out(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] / b[i];
    return g.make_node(std::move(out), {av.id, bv.id}, [av, bv](Graph& gg, std::uint32_t self) {
        const Tensor& dout = gg.grad_buffer(self);
        const Tensor& aa = gg.value_of(av.id);
        const Tensor& bb = gg.value_of(bv.id);
        if (gg.needs_grad(av.id)) {
            Tensor& da = gg.grad_buffer(av.id);
            for (std::size_t i = 0; i < dout.size(); ++i) da[i] += dout[i] / bb[i];
        }
        if (gg.needs_grad(bv.id)) {
            Tensor& db = gg.grad_buffer(bv.id);
            for (std::size_t i = 0; i < dout.size(); ++i) db[i] -= dout[i] * aa[i] / (bb[i] * bb[i]);
        }
    });
}

double gradient_check(const std::function<Var(Graph&, Var)>& f, const Tensor& x, double delta) {
    Tensor analytic;
    {
        Graph g;
        Var xv = g.leaf(x);
        Var loss = f(g, xv);
        g.backward(loss);
        analytic = g.grad(xv);
    }
    auto eval = [&f](const Tensor& point) {
        Graph g;
        Var xv = g.constant(point);
        Var loss = f(g, xv);
        if (g.val(loss).size() != 1) throw std::invalid_argument("gradient_check: f must be scalar");
        return g.val(loss)[0];
    };
    double worst = 0.0;
    Tensor probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double orig = probe[i];
        probe[i] = orig + delta;
        double fp = eval(probe);
        probe[i] = orig - delta;
        double fm = eval(probe);
        probe[i] = orig;
        double numeric = (fp - fm) / (2.0 * delta);
        double a = analytic[i];
        double err = std::fabs(a - numeric) / std::max(1e-8, std::fabs(a) + std::fabs(numeric));
        worst = std::max(worst, err);
    }
    return worst;
}

void checkpoint_save(const std::vector<std::pair<std::string, const Tensor*>>& named,
                     const std::string& path) {
    std::vector<std::pair<std::string, const Tensor*>> sorted = named;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write checkpoint: " + path);
    nlohmann::json manifest = nlohmann::json::object();
    std::uint64_t offset = 0;
    for (const auto& [name, tensor] : sorted) {
        if (manifest.contains(name)) throw std::invalid_argument("duplicate checkpoint entry: " + name);
        manifest[name] = {{"shape", tensor->shape}, {"offset", offset}};
        static_assert(sizeof(double) == 8);
        bin.write(reinterpret_cast<const char*>(tensor->data.data()),
                  static_cast<std::streamsize>(tensor->data.size() * 8));
        offset += tensor->data.size() * 8;
    }
    if (!bin) throw std::runtime_error("checkpoint write failed: " + path);
    bin.close();
    std::ofstream meta(path + ".json");
    if (!meta) throw std::runtime_error("cannot write checkpoint manifest: " + path + ".json");
    meta << manifest.dump(2) << "\n";
}

std::map<std::string, Tensor> checkpoint_load(const std::string& path) {
    std::ifstream meta(path + ".json");
    if (!meta) throw std::runtime_error("cannot open checkpoint manifest: " + path + ".json");
    nlohmann::json manifest = nlohmann::json::parse(meta);
    std::ifstream bin(path, std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open checkpoint: " + path);
    std::map<std::string, Tensor> out;
    for (const auto& [name, entry] : manifest.items()) {
        std::vector<std::size_t> shape = entry.at("shape").get<std::vector<std::size_t>>();
        std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
        Tensor t(shape);
        bin.seekg(static_cast<std::streamoff>(offset));
        bin.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.size() * 8));
        if (!bin) throw std::runtime_error("truncated checkpoint: " + path);
        out.emplace(name, std::move(t));
    }
    return out;
}

}  // namespace temporank
