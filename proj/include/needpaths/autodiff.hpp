// Minimal reverse-mode automatic differentiation on a tape of vector-valued
// nodes. Parameters live outside the tape as named tensors whose gradients
// accumulate across backward passes; intermediate nodes are rebuilt per
// forward pass. All arithmetic is 64-bit.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "needpaths/common.hpp"

namespace needpaths {

// A parameter tensor: matrix (rows x cols) or vector (cols == 1), with an
// accumulated gradient of the same shape.
struct Tensor {
  std::string name;
  std::size_t rows = 0, cols = 1;
  std::vector<double> value;  // row-major
  std::vector<double> grad;

  Tensor() = default;
  Tensor(std::string n, std::size_t r, std::size_t c)
      : name(std::move(n)), rows(r), cols(c), value(r * c, 0.0), grad(r * c, 0.0) {}

  std::size_t size() const { return value.size(); }
  double& at(std::size_t r, std::size_t c) { return value[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return value[r * cols + c]; }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

// Handle to a tape node.
struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

class Tape {
 public:
  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

  const std::vector<double>& value(Var v) const { return nodes_[check(v)].value; }
  const std::vector<double>& gradient(Var v) const { return nodes_[check(v)].grad; }

  // Leaf constant; receives no gradient routing.
  Var constant(std::vector<double> value) {
    return push(std::move(value), {});
  }

  Var zeros(std::size_t n) { return constant(std::vector<double>(n, 0.0)); }

  // Leaf that mirrors a full tensor (used for bias vectors); gradients flow
  // into the tensor.
  Var param(Tensor& t) {
    Var v = push(t.value, {});
    Tensor* tp = &t;
    nodes_[v.id].back = [this, v, tp]() {
      const auto& g = nodes_[v.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) tp->grad[i] += g[i];
    };
    return v;
  }

  // y = W x (matrix-vector product).
  Var matvec(Tensor& W, Var x) {
    const auto& xv = value(x);
    if (xv.size() != W.cols) {
      throw data_error("matvec shape mismatch for " + W.name + ": " + std::to_string(W.cols) +
                       " vs " + std::to_string(xv.size()));
    }
    std::vector<double> y(W.rows, 0.0);
    for (std::size_t r = 0; r < W.rows; ++r) {
      double acc = 0.0;
      const double* row = W.value.data() + r * W.cols;
      for (std::size_t c = 0; c < W.cols; ++c) acc += row[c] * xv[c];
      y[r] = acc;
    }
    Var out = push(std::move(y), {});
    Tensor* Wp = &W;
    nodes_[out.id].back = [this, out, x, Wp]() {
      const auto& g = nodes_[out.id].grad;
      const auto& xv = nodes_[x.id].value;
      auto& xg = nodes_[x.id].grad;
      for (std::size_t r = 0; r < Wp->rows; ++r) {
        const double gr = g[r];
        if (gr == 0.0) continue;
        double* wg = Wp->grad.data() + r * Wp->cols;
        const double* wv = Wp->value.data() + r * Wp->cols;
        for (std::size_t c = 0; c < Wp->cols; ++c) {
          wg[c] += gr * xv[c];
          xg[c] += gr * wv[c];
        }
      }
    };
    return out;
  }

  // y = W x + b.
  Var affine(Tensor& W, Tensor& b, Var x) { return add(matvec(W, x), param(b)); }

  Var add(Var a, Var b) {
    const auto& av = value(a);
    const auto& bv = value(b);
    require_same(av, bv, "add");
    std::vector<double> y(av.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] + bv[i];
    Var out = push(std::move(y), {});
    nodes_[out.id].back = [this, out, a, b]() {
      const auto& g = nodes_[out.id].grad;
      auto& ga = nodes_[a.id].grad;
      auto& gb = nodes_[b.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[i] += g[i];
        gb[i] += g[i];
      }
    };
    return out;
  }

  // Element-wise product.
  Var hadamard(Var a, Var b) {
    const auto& av = value(a);
    const auto& bv = value(b);
    require_same(av, bv, "hadamard");
    std::vector<double> y(av.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] * bv[i];
    Var out = push(std::move(y), {});
    nodes_[out.id].back = [this, out, a, b]() {
      const auto& g = nodes_[out.id].grad;
      const auto& av = nodes_[a.id].value;
      const auto& bv = nodes_[b.id].value;
      auto& ga = nodes_[a.id].grad;
      auto& gb = nodes_[b.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[i] += g[i] * bv[i];
        gb[i] += g[i] * av[i];
      }
    };
    return out;
  }

  Var sigmoid(Var a) {
    const auto& av = value(a);
    std::vector<double> y(av.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 1.0 / (1.0 + std::exp(-av[i]));
    Var out = push(std::move(y), {});
    nodes_[out.id].back = [this, out, a]() {
      const auto& g = nodes_[out.id].grad;
      const auto& yv = nodes_[out.id].value;
      auto& ga = nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * yv[i] * (1.0 - yv[i]);
    };
    return out;
  }

  Var tanh_(Var a) {
    const auto& av = value(a);
    std::vector<double> y(av.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(av[i]);
    Var out = push(std::move(y), {});
    nodes_[out.id].back = [this, out, a]() {
      const auto& g = nodes_[out.id].grad;
      const auto& yv = nodes_[out.id].value;
      auto& ga = nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - yv[i] * yv[i]);
    };
    return out;
  }

  // ReLU with subgradient 0 at 0.
  Var relu(Var a) {
    const auto& av = value(a);
    std::vector<double> y(av.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] > 0.0 ? av[i] : 0.0;
    Var out = push(std::move(y), {});
    nodes_[out.id].back = [this, out, a]() {
      const auto& g = nodes_[out.id].grad;
      const auto& av = nodes_[a.id].value;
      auto& ga = nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (av[i] > 0.0) ga[i] += g[i];
      }
    };
    return out;
  }

  Var slice(Var a, std::size_t offset, std::size_t length) {
    const auto& av = value(a);
    if (offset + length > av.size()) throw data_error("slice out of range");
    std::vector<double> y(av.begin() + static_cast<std::ptrdiff_t>(offset),
                          av.begin() + static_cast<std::ptrdiff_t>(offset + length));
    Var out = push(std::move(y), {});
    nodes_[out.id].back = [this, out, a, offset]() {
      const auto& g = nodes_[out.id].grad;
      auto& ga = nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[offset + i] += g[i];
    };
    return out;
  }

  Var concat(const std::vector<Var>& parts) {
    std::vector<double> y;
    for (Var p : parts) {
      const auto& pv = value(p);
      y.insert(y.end(), pv.begin(), pv.end());
    }
    Var out = push(std::move(y), {});
    std::vector<Var> parts_copy = parts;
    nodes_[out.id].back = [this, out, parts_copy]() {
      const auto& g = nodes_[out.id].grad;
      std::size_t offset = 0;
      for (Var p : parts_copy) {
        auto& pg = nodes_[p.id].grad;
        for (std::size_t i = 0; i < pg.size(); ++i) pg[i] += g[offset + i];
        offset += pg.size();
      }
    };
    return out;
  }

  // Scalar dot product -> size-1 node.
  Var dot(Var a, Var b) {
    const auto& av = value(a);
    const auto& bv = value(b);
    require_same(av, bv, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
    Var out = push({acc}, {});
    nodes_[out.id].back = [this, out, a, b]() {
      const double g = nodes_[out.id].grad[0];
      if (g == 0.0) return;
      const auto& av = nodes_[a.id].value;
      const auto& bv = nodes_[b.id].value;
      auto& ga = nodes_[a.id].grad;
      auto& gb = nodes_[b.id].grad;
      for (std::size_t i = 0; i < av.size(); ++i) {
        ga[i] += g * bv[i];
        gb[i] += g * av[i];
      }
    };
    return out;
  }

  // Collects size-1 nodes into one vector node.
  Var stack_scalars(const std::vector<Var>& scalars) {
    std::vector<double> y;
    y.reserve(scalars.size());
    for (Var s : scalars) {
      const auto& sv = value(s);
      if (sv.size() != 1) throw data_error("stack_scalars expects size-1 nodes");
      y.push_back(sv[0]);
    }
    Var out = push(std::move(y), {});
    std::vector<Var> copy = scalars;
    nodes_[out.id].back = [this, out, copy]() {
      const auto& g = nodes_[out.id].grad;
      for (std::size_t i = 0; i < copy.size(); ++i) nodes_[copy[i].id].grad[0] += g[i];
    };
    return out;
  }

  // y_i = v_i / sum(v). The caller guarantees a positive sum (sigmoid inputs).
  Var normalize_sum(Var a) {
    const auto& av = value(a);
    double sum = 0.0;
    for (double v : av) sum += v;
    if (!(sum > 0.0)) throw data_error("normalize_sum requires a positive total");
    std::vector<double> y(av.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] / sum;
    Var out = push(std::move(y), {});
    nodes_[out.id].back = [this, out, a, sum]() {
      const auto& g = nodes_[out.id].grad;
      const auto& yv = nodes_[out.id].value;
      auto& ga = nodes_[a.id].grad;
      double weighted = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) weighted += g[i] * yv[i];
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += (g[i] - weighted) / sum;
    };
    return out;
  }

  // y = sum_i w_i item_i, with w a vector node aligned to items.
  Var weighted_sum(const std::vector<Var>& items, Var weights) {
    const auto& wv = value(weights);
    if (items.size() != wv.size()) throw data_error("weighted_sum arity mismatch");
    if (items.empty()) throw data_error("weighted_sum requires at least one item");
    const std::size_t m = value(items[0]).size();
    std::vector<double> y(m, 0.0);
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& iv = value(items[i]);
      require_same(y, iv, "weighted_sum");
      for (std::size_t j = 0; j < m; ++j) y[j] += wv[i] * iv[j];
    }
    Var out = push(std::move(y), {});
    std::vector<Var> copy = items;
    nodes_[out.id].back = [this, out, copy, weights]() {
      const auto& g = nodes_[out.id].grad;
      const auto& wv = nodes_[weights.id].value;
      auto& wg = nodes_[weights.id].grad;
      for (std::size_t i = 0; i < copy.size(); ++i) {
        const auto& iv = nodes_[copy[i].id].value;
        auto& ig = nodes_[copy[i].id].grad;
        double acc = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
          acc += g[j] * iv[j];
          ig[j] += g[j] * wv[i];
        }
        wg[i] += acc;
      }
    };
    return out;
  }

  // Weighted binary cross entropy over all labels with internal probability
  // clamp to [eps, 1-eps]; the clamp is exact in the backward pass (zero
  // gradient outside the clamp window).
  // L = -sum_z [ w_z y_z log p_z + (1 - w_z)(1 - y_z) log(1 - p_z) ]
  Var weighted_bce(Var probs, const std::vector<double>& gold, const std::vector<double>& weights,
                   double eps = 1e-7) {
    const auto& pv = value(probs);
    if (pv.size() != gold.size() || pv.size() != weights.size()) {
      throw data_error("weighted_bce arity mismatch");
    }
    double loss = 0.0;
    for (std::size_t z = 0; z < pv.size(); ++z) {
      const double p = std::min(std::max(pv[z], eps), 1.0 - eps);
      loss -= weights[z] * gold[z] * std::log(p) +
              (1.0 - weights[z]) * (1.0 - gold[z]) * std::log(1.0 - p);
    }
    Var out = push({loss}, {});
    std::vector<double> gold_copy = gold;
    std::vector<double> w_copy = weights;
    nodes_[out.id].back = [this, out, probs, gold_copy, w_copy, eps]() {
      const double g = nodes_[out.id].grad[0];
      if (g == 0.0) return;
      const auto& pv = nodes_[probs.id].value;
      auto& pg = nodes_[probs.id].grad;
      for (std::size_t z = 0; z < pv.size(); ++z) {
        if (pv[z] < eps || pv[z] > 1.0 - eps) continue;  // clamped: zero gradient
        const double p = pv[z];
        const double d = -(w_copy[z] * gold_copy[z] / p) +
                         (1.0 - w_copy[z]) * (1.0 - gold_copy[z]) / (1.0 - p);
        pg[z] += g * d;
      }
    };
    return out;
  }

  // Reverse pass from `root` (size-1), seeding with `seed` (e.g. 1/batch for
  // mean-reduced batch losses). Gradients accumulate into node grads and
  // parameter tensors.
  void backward(Var root, double seed = 1.0) {
    auto& rn = nodes_[check(root)];
    if (rn.value.size() != 1) throw data_error("backward root must be a scalar node");
    rn.grad[0] += seed;
    for (std::int32_t i = root.id; i >= 0; --i) {
      if (nodes_[static_cast<std::size_t>(i)].back) nodes_[static_cast<std::size_t>(i)].back();
    }
  }

 private:
  struct Node {
    std::vector<double> value;
    std::vector<double> grad;
    std::function<void()> back;
  };

  std::size_t check(Var v) const {
    if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size()) {
      throw data_error("invalid tape variable");
    }
    return static_cast<std::size_t>(v.id);
  }

  static void require_same(const std::vector<double>& a, const std::vector<double>& b,
                           const char* op) {
    if (a.size() != b.size()) {
      throw data_error(std::string(op) + " shape mismatch: " + std::to_string(a.size()) + " vs " +
                       std::to_string(b.size()));
    }
  }

  Var push(std::vector<double> value, std::function<void()> back) {
    Node n;
    n.grad.assign(value.size(), 0.0);
    n.value = std::move(value);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::int32_t>(nodes_.size()) - 1};
  }

  std::vector<Node> nodes_;
};

}  // namespace needpaths
