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

#include "gct/losses/losses.hpp"

#include <cmath>
#include <string>

#include "gct/autodiff/ops.hpp"

namespace gct::losses {
namespace {

template <typename T>
std::size_t check_coords(const ad::Var<T>& pred, const ad::Var<T>& gt, const char* op) {
  if (pred.shape().size() != 2 || pred.rows() != 3 || pred.shape() != gt.shape()) {
    throw LossError(std::string(op) + ": expected matching 3xV tensors, got " + ad::to_string(pred.shape()) +
                    " and " + ad::to_string(gt.shape()));
  }
  return pred.cols();
}

template <typename T, typename Fn>
void if_grad(ad::Tape<T>& tape, std::size_t id, Fn&& fn) {
  if (tape.requires_grad(id)) fn(tape.grad_buffer(id));
}

}  // namespace

void LossWeights::validate() const {
  for (double w : {lambda_rec, lambda_edge, lambda_contra}) {
    if (!std::isfinite(w) || w < 0.0) throw LossError("loss weights must be finite and non-negative");
  }
}

template <typename T>
ad::Var<T> reconstruction_loss(const ad::Var<T>& pred, const ad::Var<T>& gt) {
  const std::size_t n = check_coords(pred, gt, "reconstruction_loss");
  auto a = pred.value();
  auto b = gt.value();
  T total = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const T dx = a[v] - b[v], dy = a[n + v] - b[n + v], dz = a[2 * n + v] - b[2 * n + v];
    total += dx * dx + dy * dy + dz * dz;
  }
  total /= static_cast<T>(n);
  const std::size_t pi = pred.id(), gi = gt.id();
  return pred.tape().record({1}, {total}, {pred, gt}, [=](ad::Tape<T>& tape, std::size_t self) {
    const T g = tape.grad(self)[0] * T{2} / static_cast<T>(n);
    auto pv = tape.value(pi);
    auto gv = tape.value(gi);
    if_grad(tape, pi, [&](std::span<T> d) {
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += g * (pv[i] - gv[i]);
    });
    if_grad(tape, gi, [&](std::span<T> d) {
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= g * (pv[i] - gv[i]);
    });
  });
}

template <typename T>
ad::Var<T> edge_loss(const ad::Var<T>& pred, const ad::Var<T>& gt, const mesh::EdgeSet& edges) {
  const std::size_t n = check_coords(pred, gt, "edge_loss");
  if (edges.empty()) throw LossError("edge_loss: empty edge set");
  for (const auto& [p, q] : edges) {
    if (p >= n || q >= n) throw LossError("edge_loss: edge index out of range");
  }
  auto a = pred.value();
  auto b = gt.value();
  auto length = [n](std::span<const T> x, std::size_t p, std::size_t q) {
    T s = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const T d = x[k * n + p] - x[k * n + q];
      s += d * d;
    }
    return s;
  };
  T total = 0;
  for (const auto& [p, q] : edges) {
    const T r = std::sqrt(length(a, p, q)) - std::sqrt(length(b, p, q));
    total += r * r;
  }
  const T count = static_cast<T>(edges.size());
  total /= count;
  const std::size_t pi = pred.id(), gi = gt.id();
  return pred.tape().record({1}, {total}, {pred, gt}, [=](ad::Tape<T>& tape, std::size_t self) {
    const T g = tape.grad(self)[0] * T{2} / count;
    auto pv = tape.value(pi);
    auto gv = tape.value(gi);
    const bool dp = tape.requires_grad(pi), dg = tape.requires_grad(gi);
    std::span<T> dpred = dp ? tape.grad_buffer(pi) : std::span<T>{};
    std::span<T> dgt = dg ? tape.grad_buffer(gi) : std::span<T>{};
    const T floor = static_cast<T>(kNormFloor);
    for (const auto& [p, q] : edges) {
      const T lp2 = length(pv, p, q), lg2 = length(gv, p, q);
      const T r = std::sqrt(lp2) - std::sqrt(lg2);
      const T cp = g * r / std::sqrt(std::max(lp2, floor));
      const T cg = g * r / std::sqrt(std::max(lg2, floor));
      for (std::size_t k = 0; k < 3; ++k) {
        if (dp) {
          const T e = pv[k * n + p] - pv[k * n + q];
          dpred[k * n + p] += cp * e;
          dpred[k * n + q] -= cp * e;
        }
        if (dg) {
          const T e = gv[k * n + p] - gv[k * n + q];
          dgt[k * n + p] -= cg * e;
          dgt[k * n + q] += cg * e;
        }
      }
    }
  });
}

template <typename T>
ad::Var<T> cgc_loss(const ad::Var<T>& pred, const ad::Var<T>& gt, const mesh::VertexRings& rings) {
  const std::size_t n = check_coords(pred, gt, "cgc_loss");
  if (rings.size() != n) {
    throw LossError("cgc_loss: rings describe " + std::to_string(rings.size()) + " vertices, tensors have " +
                    std::to_string(n));
  }
  for (const auto& ring : rings.neighbors) {
    for (auto q : ring) {
      if (q >= n) throw LossError("cgc_loss: ring index out of range");
    }
  }
  auto a = pred.value();
  auto b = gt.value();
  // Difference of corresponding edge vectors, expressed at vertex p.
  auto diff = [n](std::span<const T> x, std::span<const T> y, std::size_t p, std::size_t q, std::size_t k) {
    return (x[k * n + q] - x[k * n + p]) - (y[k * n + q] - y[k * n + p]);
  };
  T total = 0;
  for (std::size_t p = 0; p < n; ++p) {
    for (auto q : rings[p]) {
      T s = 0;
      for (std::size_t k = 0; k < 3; ++k) {
        const T d = diff(a, b, p, q, k);
        s += d * d;
      }
      total += std::sqrt(s);
    }
  }
  total /= static_cast<T>(n);
  const std::size_t pi = pred.id(), gi = gt.id();
  return pred.tape().record({1}, {total}, {pred, gt}, [=](ad::Tape<T>& tape, std::size_t self) {
    const T g = tape.grad(self)[0] / static_cast<T>(n);
    auto pv = tape.value(pi);
    auto gv = tape.value(gi);
    const bool dp = tape.requires_grad(pi), dg = tape.requires_grad(gi);
    std::span<T> dpred = dp ? tape.grad_buffer(pi) : std::span<T>{};
    std::span<T> dgt = dg ? tape.grad_buffer(gi) : std::span<T>{};
    const T floor = static_cast<T>(kNormFloor);
    for (std::size_t p = 0; p < n; ++p) {
      for (auto q : rings[p]) {
        T d[3];
        T s = 0;
        for (std::size_t k = 0; k < 3; ++k) {
          d[k] = diff(pv, gv, p, q, k);
          s += d[k] * d[k];
        }
        const T c = g / std::sqrt(std::max(s, floor));
        for (std::size_t k = 0; k < 3; ++k) {
          if (dp) {
            dpred[k * n + q] += c * d[k];
            dpred[k * n + p] -= c * d[k];
          }
          if (dg) {
            dgt[k * n + q] -= c * d[k];
            dgt[k * n + p] += c * d[k];
          }
        }
      }
    }
  });
}

template <typename T>
LossTerms<T> full_loss(const ad::Var<T>& pred, const ad::Var<T>& gt, const mesh::EdgeSet& edges,
                       const mesh::VertexRings& rings, const LossWeights& weights) {
  weights.validate();
  LossTerms<T> terms;
  terms.rec = reconstruction_loss(pred, gt);
  terms.edge = edge_loss(pred, gt, edges);
  terms.cgc = cgc_loss(pred, gt, rings);
  terms.total = ad::add(ad::add(ad::scale(terms.rec, static_cast<T>(weights.lambda_rec)),
                                ad::scale(terms.edge, static_cast<T>(weights.lambda_edge))),
                        ad::scale(terms.cgc, static_cast<T>(weights.lambda_contra)));
  return terms;
}

double pmd(const mesh::Mesh& pred, const mesh::Mesh& gt) {
  const std::size_t n = pred.vertex_count();
  if (n != gt.vertex_count() || n == 0) {
    throw LossError("pmd: vertex counts differ (" + std::to_string(n) + " vs " +
                    std::to_string(gt.vertex_count()) + ")");
  }
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& a = gt.vertices()[v];
    const auto& b = pred.vertices()[v];
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    total += dx * dx + dy * dy + dz * dz;
  }
  return total / static_cast<double>(n);
}

#define GCT_INSTANTIATE_LOSSES(T)                                                                    \
  template ad::Var<T> reconstruction_loss(const ad::Var<T>&, const ad::Var<T>&);                    \
  template ad::Var<T> edge_loss(const ad::Var<T>&, const ad::Var<T>&, const mesh::EdgeSet&);        \
  template ad::Var<T> cgc_loss(const ad::Var<T>&, const ad::Var<T>&, const mesh::VertexRings&);     \
  template LossTerms<T> full_loss(const ad::Var<T>&, const ad::Var<T>&, const mesh::EdgeSet&,       \
                                  const mesh::VertexRings&, const LossWeights&);

GCT_INSTANTIATE_LOSSES(float)
GCT_INSTANTIATE_LOSSES(double)

#undef GCT_INSTANTIATE_LOSSES

}  // namespace gct::losses
