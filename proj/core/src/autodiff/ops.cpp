// Copyright 2026 The gctransfer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gct/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace gct::ad {
namespace {

// Dense kernels. Every output element accumulates over the inner index in
// ascending order, so results do not depend on buffer addresses.

// One R x NB block of c: the partial products of each element are summed in
// a register tile over ascending p, then added to c once.
template <typename T, std::size_t R, std::size_t NB, bool Full>
inline void gemm_tile(const T* a, const T* b, T* c, std::size_t k, std::size_t n, std::size_t i, std::size_t j0,
                      std::size_t jn) {
  const std::size_t w = Full ? NB : jn;
  T acc[R][NB] = {};
  for (std::size_t p = 0; p < k; ++p) {
    const T* bp = b + p * n + j0;
    T ar[R];
    for (std::size_t r = 0; r < R; ++r) ar[r] = a[(i + r) * k + p];
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t r = 0; r < R; ++r) acc[r][j] += ar[r] * bp[j];
    }
  }
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t j = 0; j < w; ++j) c[(i + r) * n + j0 + j] += acc[r][j];
  }
}

template <typename T, std::size_t R>
void gemm_rows(const T* a, const T* b, T* c, std::size_t k, std::size_t n, std::size_t i) {
  constexpr std::size_t nb = 256 / sizeof(T);
  std::size_t j0 = 0;
  for (; j0 + nb <= n; j0 += nb) gemm_tile<T, R, nb, true>(a, b, c, k, n, i, j0, nb);
  if (j0 < n) gemm_tile<T, R, nb, false>(a, b, c, k, n, i, j0, n - j0);
}

/// c[m x n] += a[m x k] * b[k x n], row-major.
template <typename T>
void gemm_acc(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) gemm_rows<T, 4>(a, b, c, k, n, i);
  for (; i < m; ++i) gemm_rows<T, 1>(a, b, c, k, n, i);
}

template <typename T>
std::vector<T> transposed(std::span<const T> a, std::size_t m, std::size_t n) {
  std::vector<T> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a[i * n + j];
  }
  return out;
}

template <typename T>
void require_matrix(const Var<T>& x, const char* op) {
  if (x.shape().size() != 2) {
    throw DimensionError(std::string(op) + ": expected a 2-D tensor, got " + to_string(x.shape()));
  }
}

template <typename T>
void require_same_shape(const Var<T>& a, const Var<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                         to_string(b.shape()));
  }
}

// Runs fn on the gradient slot of `target` when it takes part in differentiation.
template <typename T, typename Fn>
void accumulate_if(Tape<T>& tape, std::size_t target, Fn&& fn) {
  if (tape.requires_grad(target)) fn(tape.grad_buffer(target));
}

}  // namespace

template <typename T>
Var<T> per_vertex_linear(const Var<T>& x, const Var<T>& weight, const Var<T>& bias) {
  require_matrix(x, "per_vertex_linear");
  require_matrix(weight, "per_vertex_linear");
  const std::size_t c_in = x.rows(), verts = x.cols(), c_out = weight.rows();
  if (weight.cols() != c_in || bias.size() != c_out) {
    throw DimensionError("per_vertex_linear: weight " + to_string(weight.shape()) + " and bias " +
                         to_string(bias.shape()) + " incompatible with input " + to_string(x.shape()));
  }
  std::vector<T> out(c_out * verts);
  const auto b = bias.value();
  for (std::size_t c = 0; c < c_out; ++c) std::fill_n(out.begin() + static_cast<long>(c * verts), verts, b[c]);
  gemm_acc(weight.value().data(), x.value().data(), out.data(), c_out, c_in, verts);
  const std::size_t xi = x.id(), wi = weight.id(), bi = bias.id();
  return x.tape().record({c_out, verts}, std::move(out), {x, weight, bias},
                         [=](Tape<T>& tape, std::size_t self) {
                           const auto g = tape.grad(self);
                           accumulate_if(tape, xi, [&](std::span<T> dx) {
                             const auto wt = transposed(tape.value(wi), c_out, c_in);
                             gemm_acc(wt.data(), g.data(), dx.data(), c_in, c_out, verts);
                           });
                           accumulate_if(tape, wi, [&](std::span<T> dw) {
                             const auto xt = transposed(tape.value(xi), c_in, verts);
                             gemm_acc(g.data(), xt.data(), dw.data(), c_out, verts, c_in);
                           });
                           accumulate_if(tape, bi, [&](std::span<T> db) {
                             for (std::size_t c = 0; c < c_out; ++c) {
                               T acc{0};
                               for (std::size_t v = 0; v < verts; ++v) acc += g[c * verts + v];
                               db[c] += acc;
                             }
                           });
                         });
}

template <typename T>
Var<T> instance_norm(const Var<T>& x, T eps) {
  require_matrix(x, "instance_norm");
  const std::size_t channels = x.rows(), verts = x.cols();
  if (verts < 2) {
    throw NumericError("instance_norm: need at least 2 vertices for statistics, got " +
                       std::to_string(verts));
  }
  auto in = x.value();
  std::vector<T> out(in.size());
  std::vector<T> inv_std(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    const T* row = in.data() + c * verts;
    T mean = 0;
    for (std::size_t v = 0; v < verts; ++v) mean += row[v];
    mean /= static_cast<T>(verts);
    T var = 0;
    for (std::size_t v = 0; v < verts; ++v) var += (row[v] - mean) * (row[v] - mean);
    var /= static_cast<T>(verts);
    const T s = T{1} / std::sqrt(var + eps);
    inv_std[c] = s;
    for (std::size_t v = 0; v < verts; ++v) out[c * verts + v] = (row[v] - mean) * s;
  }
  const std::size_t xi = x.id();
  return x.tape().record({channels, verts}, std::move(out), {x},
                         [=, inv_std = std::move(inv_std)](Tape<T>& tape, std::size_t self) {
                           auto g = tape.grad(self);
                           auto y = tape.value(self);
                           auto dx = tape.grad_buffer(xi);
                           const T n = static_cast<T>(verts);
                           for (std::size_t c = 0; c < channels; ++c) {
                             const std::size_t base = c * verts;
                             T mean_g = 0, mean_gy = 0;
                             for (std::size_t v = 0; v < verts; ++v) {
                               mean_g += g[base + v];
                               mean_gy += g[base + v] * y[base + v];
                             }
                             mean_g /= n;
                             mean_gy /= n;
                             for (std::size_t v = 0; v < verts; ++v) {
                               dx[base + v] += inv_std[c] * (g[base + v] - mean_g - y[base + v] * mean_gy);
                             }
                           }
                         });
}

template <typename T>
Var<T> softmax_over_keys(const Var<T>& scores) {
  require_matrix(scores, "softmax_over_keys");
  const std::size_t rows = scores.rows(), cols = scores.cols();
  auto in = scores.value();
  std::vector<T> out(in.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = in.data() + r * cols;
    T mx = row[0];
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::isfinite(row[c])) throw NumericError("softmax_over_keys: non-finite score");
      mx = std::max(mx, row[c]);
    }
    // Normalising in double keeps float rows summing to 1 within ~1e-7.
    // Subnormal weights are flushed to zero: they carry no usable mass and
    // slow every product that consumes them.
    double total = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      out[r * cols + c] = std::exp(row[c] - mx);
      total += static_cast<double>(out[r * cols + c]);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const T w = static_cast<T>(static_cast<double>(out[r * cols + c]) / total);
      out[r * cols + c] = w < std::numeric_limits<T>::min() ? T{0} : w;
    }
  }
  const std::size_t si = scores.id();
  return scores.tape().record({rows, cols}, std::move(out), {scores},
                              [=](Tape<T>& tape, std::size_t self) {
                                auto g = tape.grad(self);
                                auto y = tape.value(self);
                                auto dx = tape.grad_buffer(si);
                                for (std::size_t r = 0; r < rows; ++r) {
                                  const std::size_t base = r * cols;
                                  T dot = 0;
                                  for (std::size_t c = 0; c < cols; ++c) dot += g[base + c] * y[base + c];
                                  for (std::size_t c = 0; c < cols; ++c) {
                                    dx[base + c] += y[base + c] * (g[base + c] - dot);
                                  }
                                }
                              });
}

template <typename T>
Var<T> batched_matmul(const Var<T>& a, const Var<T>& b) {
  require_matrix(a, "batched_matmul");
  require_matrix(b, "batched_matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw DimensionError("batched_matmul: inner dimensions differ, " + to_string(a.shape()) + " x " +
                         to_string(b.shape()));
  }
  std::vector<T> out(m * n, T{0});
  gemm_acc(a.value().data(), b.value().data(), out.data(), m, k, n);
  const std::size_t ai = a.id(), bi = b.id();
  return a.tape().record({m, n}, std::move(out), {a, b}, [=](Tape<T>& tape, std::size_t self) {
    const auto g = tape.grad(self);
    accumulate_if(tape, ai, [&](std::span<T> da) {
      const auto bt = transposed(tape.value(bi), k, n);
      gemm_acc(g.data(), bt.data(), da.data(), m, n, k);
    });
    accumulate_if(tape, bi, [&](std::span<T> db) {
      const auto at = transposed(tape.value(ai), m, k);
      gemm_acc(at.data(), g.data(), db.data(), k, m, n);
    });
  });
}

template <typename T>
Var<T> transpose(const Var<T>& a) {
  require_matrix(a, "transpose");
  const std::size_t m = a.rows(), n = a.cols();
  const std::size_t ai = a.id();
  return a.tape().record({n, m}, transposed(a.value(), m, n), {a}, [=](Tape<T>& tape, std::size_t self) {
    const auto g = tape.grad(self);
    auto da = tape.grad_buffer(ai);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) da[i * n + j] += g[j * m + i];
    }
  });
}

template <typename T>
Var<T> activation(const Var<T>& x, Activation kind) {
  auto in = x.value();
  std::vector<T> out(in.size());
  if (kind == Activation::relu) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > T{0} ? in[i] : T{0};
  } else {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::tanh(in[i]);
  }
  const std::size_t xi = x.id();
  return x.tape().record(x.shape(), std::move(out), {x}, [=](Tape<T>& tape, std::size_t self) {
    auto g = tape.grad(self);
    auto dx = tape.grad_buffer(xi);
    if (kind == Activation::relu) {
      auto xin = tape.value(xi);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (xin[i] > T{0}) dx[i] += g[i];
      }
    } else {
      auto y = tape.value(self);
      for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * (T{1} - y[i] * y[i]);
    }
  });
}

template <typename T>
Var<T> scale_and_add(const Var<T>& att_out, const Var<T>& gamma, const Var<T>& residual) {
  require_same_shape(att_out, residual, "scale_and_add");
  if (gamma.size() != 1) {
    throw DimensionError("scale_and_add: gamma must be a scalar, got " + to_string(gamma.shape()));
  }
  const T gam = gamma.value()[0];
  auto a = att_out.value();
  auto r = residual.value();
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = gam * a[i] + r[i];
  const std::size_t ai = att_out.id(), gi = gamma.id(), ri = residual.id();
  return att_out.tape().record(att_out.shape(), std::move(out), {att_out, gamma, residual},
                               [=](Tape<T>& tape, std::size_t self) {
                                 auto g = tape.grad(self);
                                 const T gv = tape.value(gi)[0];
                                 accumulate_if(tape, ai, [&](std::span<T> da) {
                                   for (std::size_t i = 0; i < g.size(); ++i) da[i] += gv * g[i];
                                 });
                                 accumulate_if(tape, gi, [&](std::span<T> dg) {
                                   auto av = tape.value(ai);
                                   T acc = 0;
                                   for (std::size_t i = 0; i < g.size(); ++i) acc += av[i] * g[i];
                                   dg[0] += acc;
                                 });
                                 accumulate_if(tape, ri, [&](std::span<T> dr) {
                                   for (std::size_t i = 0; i < g.size(); ++i) dr[i] += g[i];
                                 });
                               });
}

template <typename T>
Var<T> max_over_vertices(const Var<T>& x, std::size_t target_v) {
  require_matrix(x, "max_over_vertices");
  const std::size_t channels = x.rows(), verts = x.cols();
  if (target_v == 0 || verts < target_v) {
    throw DimensionError("max_over_vertices: cannot reduce " + std::to_string(verts) + " vertices to " +
                         std::to_string(target_v));
  }
  auto in = x.value();
  std::vector<T> out(channels * target_v);
  std::vector<std::size_t> winner(out.size());
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t j = 0; j < target_v; ++j) {
      const std::size_t lo = j * verts / target_v, hi = (j + 1) * verts / target_v;
      std::size_t best = lo;
      for (std::size_t v = lo + 1; v < hi; ++v) {
        if (in[c * verts + v] > in[c * verts + best]) best = v;
      }
      out[c * target_v + j] = in[c * verts + best];
      winner[c * target_v + j] = c * verts + best;
    }
  }
  const std::size_t xi = x.id();
  return x.tape().record({channels, target_v}, std::move(out), {x},
                         [=, winner = std::move(winner)](Tape<T>& tape, std::size_t self) {
                           auto g = tape.grad(self);
                           auto dx = tape.grad_buffer(xi);
                           for (std::size_t i = 0; i < g.size(); ++i) dx[winner[i]] += g[i];
                         });
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require_same_shape(a, b, "add");
  auto av = a.value();
  auto bv = b.value();
  std::vector<T> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i];
  const std::size_t ai = a.id(), bi = b.id();
  return a.tape().record(a.shape(), std::move(out), {a, b}, [=](Tape<T>& tape, std::size_t self) {
    auto g = tape.grad(self);
    for (std::size_t target : {ai, bi}) {
      accumulate_if(tape, target, [&](std::span<T> d) {
        for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
      });
    }
  });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  require_same_shape(a, b, "mul");
  auto av = a.value();
  auto bv = b.value();
  std::vector<T> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i];
  const std::size_t ai = a.id(), bi = b.id();
  return a.tape().record(a.shape(), std::move(out), {a, b}, [=](Tape<T>& tape, std::size_t self) {
    auto g = tape.grad(self);
    accumulate_if(tape, ai, [&](std::span<T> da) {
      auto other = tape.value(bi);
      for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * other[i];
    });
    accumulate_if(tape, bi, [&](std::span<T> db) {
      auto other = tape.value(ai);
      for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i] * other[i];
    });
  });
}

template <typename T>
Var<T> scale(const Var<T>& x, T factor) {
  auto in = x.value();
  std::vector<T> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = factor * in[i];
  const std::size_t xi = x.id();
  return x.tape().record(x.shape(), std::move(out), {x}, [=](Tape<T>& tape, std::size_t self) {
    auto g = tape.grad(self);
    auto dx = tape.grad_buffer(xi);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += factor * g[i];
  });
}

template <typename T>
Var<T> sum(const Var<T>& x) {
  T total = 0;
  for (T v : x.value()) total += v;
  const std::size_t xi = x.id();
  return x.tape().record({1}, {total}, {x}, [=](Tape<T>& tape, std::size_t self) {
    const T g = tape.grad(self)[0];
    for (T& d : tape.grad_buffer(xi)) d += g;
  });
}

#define GCT_INSTANTIATE_OPS(T)                                                          \
  template Var<T> per_vertex_linear(const Var<T>&, const Var<T>&, const Var<T>&);       \
  template Var<T> instance_norm(const Var<T>&, T);                                      \
  template Var<T> softmax_over_keys(const Var<T>&);                                     \
  template Var<T> batched_matmul(const Var<T>&, const Var<T>&);                         \
  template Var<T> transpose(const Var<T>&);                                             \
  template Var<T> activation(const Var<T>&, Activation);                                \
  template Var<T> scale_and_add(const Var<T>&, const Var<T>&, const Var<T>&);           \
  template Var<T> max_over_vertices(const Var<T>&, std::size_t);                        \
  template Var<T> add(const Var<T>&, const Var<T>&);                                    \
  template Var<T> mul(const Var<T>&, const Var<T>&);                                    \
  template Var<T> scale(const Var<T>&, T);                                              \
  template Var<T> sum(const Var<T>&);

GCT_INSTANTIATE_OPS(float)
GCT_INSTANTIATE_OPS(double)

#undef GCT_INSTANTIATE_OPS

}  // namespace gct::ad
