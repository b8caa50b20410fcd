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

#include "gct/model/network.hpp"

#include <cmath>
#include <random>

#include "gct/autodiff/ops.hpp"

namespace gct::model {
namespace {

class LayoutBuilder {
 public:
  explicit LayoutBuilder(Layout& layout) : layout_(layout) {}

  std::size_t add(std::string name, ad::Shape shape) {
    layout_.names.push_back(std::move(name));
    layout_.shapes.push_back(std::move(shape));
    return layout_.names.size() - 1;
  }

  LinearSlot linear(const std::string& prefix, std::size_t c_in, std::size_t c_out) {
    LinearSlot slot;
    slot.weight = add(prefix + ".weight", {c_out, c_in});
    slot.bias = add(prefix + ".bias", {c_out});
    return slot;
  }

  std::vector<LinearSlot> encoder(const std::string& prefix, const std::vector<std::size_t>& widths) {
    std::vector<LinearSlot> layers;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
      layers.push_back(linear(prefix + ".conv" + std::to_string(i), widths[i], widths[i + 1]));
    }
    return layers;
  }

  DecoderSlot decoder(const std::string& prefix, std::size_t width) {
    DecoderSlot d;
    d.query = linear(prefix + ".query", width, width);
    d.key = linear(prefix + ".key", width, width);
    d.value = linear(prefix + ".value", width, width);
    d.gamma = add(prefix + ".gamma", {1});
    for (std::size_t i = 0; i < 3; ++i) {
      const auto p = prefix + ".norm" + std::to_string(i);
      d.norms[i].scale = linear(p + ".scale", 3, width);
      d.norms[i].shift = linear(p + ".shift", 3, width);
      d.convs[i] = linear(prefix + ".conv" + std::to_string(i), width, width);
    }
    return d;
  }

 private:
  Layout& layout_;
};

template <typename T>
LinearVars<T> bind_linear(const std::vector<ad::Var<T>>& leaves, const LinearSlot& slot) {
  return {leaves[slot.weight], leaves[slot.bias]};
}

template <typename T>
std::vector<LinearVars<T>> bind_linears(const std::vector<ad::Var<T>>& leaves,
                                        const std::vector<LinearSlot>& slots) {
  std::vector<LinearVars<T>> out;
  for (const auto& s : slots) out.push_back(bind_linear(leaves, s));
  return out;
}

}  // namespace

Layout build_layout(const ModelConfig& config) {
  config.validate();
  Layout layout;
  LayoutBuilder b(layout);
  const auto enc = config.encoder_widths();
  const auto dec = config.decoder_widths();
  const std::size_t latent = enc.back();

  if (config.architecture == Architecture::gc_transformer) {
    layout.identity_encoder = b.encoder("identity_encoder", enc);
    layout.pose_encoder = b.encoder("pose_encoder", enc);
    layout.identity_in = b.linear("identity_in", latent, dec[0]);
    layout.pose_in = b.linear("pose_in", latent, dec[0]);
    for (std::size_t k = 0; k < dec.size(); ++k) {
      layout.decoders.push_back(b.decoder("decoder" + std::to_string(k), dec[k]));
      if (k + 1 < dec.size()) {
        layout.identity_reduce.push_back(b.linear("identity_reduce" + std::to_string(k), dec[k], dec[k + 1]));
        layout.pose_reduce.push_back(b.linear("pose_reduce" + std::to_string(k), dec[k], dec[k + 1]));
      }
    }
  } else {
    layout.identity_encoder = b.encoder("encoder", enc);
    for (std::size_t k = 0; k < dec.size(); ++k) {
      layout.decoders.push_back(b.decoder("decoder" + std::to_string(k), dec[k]));
      if (k + 1 < dec.size()) {
        layout.pose_reduce.push_back(b.linear("reduce" + std::to_string(k), dec[k], dec[k + 1]));
      }
    }
  }
  layout.head = b.linear("head", dec.back(), 3);
  return layout;
}

ModelParams<float> init_params(const ModelConfig& config, std::uint64_t seed) {
  const Layout layout = build_layout(config);
  ModelParams<float> params{config, layout.names, {}};
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < layout.shapes.size(); ++i) {
    const auto& shape = layout.shapes[i];
    ad::Array<float> tensor(shape, 0.0f);
    if (shape.size() == 2) {
      const double bound = std::sqrt(1.0 / static_cast<double>(shape[1]));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (auto& w : tensor.data) w = static_cast<float>(dist(rng));
    }
    params.tensors.push_back(std::move(tensor));
  }
  return params;
}

template <typename T>
BoundModel<T> bind(ad::Tape<T>& tape, const ModelParams<T>& params, bool requires_grad) {
  const Layout layout = build_layout(params.config);
  if (layout.names != params.names) throw ConfigError("parameter set does not match its configuration");
  for (std::size_t i = 0; i < layout.shapes.size(); ++i) {
    if (layout.shapes[i] != params.tensors[i].shape) {
      throw ConfigError("parameter '" + layout.names[i] + "' has shape " +
                        ad::to_string(params.tensors[i].shape) + ", expected " + ad::to_string(layout.shapes[i]));
    }
  }
  BoundModel<T> m;
  m.config = params.config;
  for (const auto& t : params.tensors) m.leaves.push_back(tape.leaf(t, requires_grad));
  m.identity_encoder = bind_linears(m.leaves, layout.identity_encoder);
  m.pose_encoder = bind_linears(m.leaves, layout.pose_encoder);
  if (params.config.architecture == Architecture::gc_transformer) {
    m.identity_in = bind_linear(m.leaves, layout.identity_in);
    m.pose_in = bind_linear(m.leaves, layout.pose_in);
  }
  for (const auto& d : layout.decoders) {
    DecoderVars<T> dv;
    dv.attention = {bind_linear(m.leaves, d.query), bind_linear(m.leaves, d.key), bind_linear(m.leaves, d.value),
                    m.leaves[d.gamma]};
    for (std::size_t i = 0; i < 3; ++i) {
      dv.norms[i] = {bind_linear(m.leaves, d.norms[i].scale), bind_linear(m.leaves, d.norms[i].shift)};
      dv.convs[i] = bind_linear(m.leaves, d.convs[i]);
    }
    m.decoders.push_back(dv);
  }
  m.identity_reduce = bind_linears(m.leaves, layout.identity_reduce);
  m.pose_reduce = bind_linears(m.leaves, layout.pose_reduce);
  m.head = bind_linear(m.leaves, layout.head);
  return m;
}

template <typename T>
ad::Var<T> linear(const ad::Var<T>& x, const LinearVars<T>& layer) {
  return ad::per_vertex_linear(x, layer.weight, layer.bias);
}

template <typename T>
ad::Var<T> encode(const ad::Var<T>& xyz, const std::vector<LinearVars<T>>& layers) {
  ad::Var<T> h = xyz;
  for (const auto& layer : layers) h = ad::relu(ad::instance_norm(linear(h, layer)));
  return h;
}

template <typename T>
AttentionResult<T> cross_attention(const ad::Var<T>& z_pose, const ad::Var<T>& z_id,
                                   const AttentionVars<T>& vars) {
  if (z_pose.shape() != z_id.shape()) {
    throw ad::DimensionError("cross_attention: embeddings differ, " + ad::to_string(z_pose.shape()) + " vs " +
                             ad::to_string(z_id.shape()));
  }
  const auto q = linear(z_pose, vars.query);
  const auto k = linear(z_id, vars.key);
  const auto v = linear(z_id, vars.value);
  const auto weights = ad::softmax_over_keys(ad::batched_matmul(ad::transpose(q), k));
  const auto attended = ad::batched_matmul(v, ad::transpose(weights));
  return {ad::scale_and_add(attended, vars.gamma, z_pose), weights};
}

template <typename T>
ad::Var<T> norm_block(const ad::Var<T>& z, const ad::Var<T>& cond_xyz, const NormBlockVars<T>& vars) {
  if (z.cols() != cond_xyz.cols()) {
    throw ad::DimensionError("norm_block: embedding has " + std::to_string(z.cols()) +
                             " vertices, conditioning mesh " + std::to_string(cond_xyz.cols()));
  }
  const auto normalized = ad::instance_norm(z);
  return ad::add(ad::mul(linear(cond_xyz, vars.scale), normalized), linear(cond_xyz, vars.shift));
}

template <typename T>
DecoderResult<T> decoder_block(const ad::Var<T>& z_pose, const ad::Var<T>& z_id, const ad::Var<T>& cond_xyz,
                               const DecoderVars<T>& vars, bool attention_enabled) {
  DecoderResult<T> result;
  ad::Var<T> mixed = z_pose;
  if (attention_enabled) {
    auto att = cross_attention(z_pose, z_id, vars.attention);
    mixed = att.output;
    result.attention = att.weights;
  }
  const auto a1 = ad::relu(linear(norm_block(mixed, cond_xyz, vars.norms[0]), vars.convs[0]));
  const auto a2 = ad::relu(linear(norm_block(a1, cond_xyz, vars.norms[1]), vars.convs[1]));
  const auto b1 = ad::relu(linear(norm_block(mixed, cond_xyz, vars.norms[2]), vars.convs[2]));
  result.output = ad::add(a2, b1);
  return result;
}

template <typename T>
ForwardResult<T> forward(const BoundModel<T>& model, const ad::Var<T>& identity_xyz, const ad::Var<T>& pose_xyz) {
  if (identity_xyz.shape() != pose_xyz.shape() || identity_xyz.rows() != 3) {
    throw ad::DimensionError("forward: identity " + ad::to_string(identity_xyz.shape()) + " and pose " +
                             ad::to_string(pose_xyz.shape()) + " must both be 3 x V");
  }
  ForwardResult<T> result;
  const bool att = model.config.attention_enabled;
  auto run_decoder = [&](std::size_t k, const ad::Var<T>& zp, const ad::Var<T>& zi) {
    auto d = decoder_block(zp, zi, identity_xyz, model.decoders[k], att);
    if (att) result.attention.push_back(d.attention);
    return d.output;
  };

  ad::Var<T> h;
  if (model.config.architecture == Architecture::gc_transformer) {
    auto id = linear(encode(identity_xyz, model.identity_encoder), model.identity_in);
    auto ps = linear(encode(pose_xyz, model.pose_encoder), model.pose_in);
    for (std::size_t k = 0; k < model.decoders.size(); ++k) {
      h = run_decoder(k, ps, id);
      if (k + 1 < model.decoders.size()) {
        id = linear(id, model.identity_reduce[k]);
        ps = linear(h, model.pose_reduce[k]);
      }
    }
  } else {
    const auto z_target = encode(identity_xyz, model.identity_encoder);
    const auto z_partner = encode(pose_xyz, model.identity_encoder);
    h = run_decoder(0, z_partner, z_target);
    for (std::size_t k = 1; k < model.decoders.size(); ++k) {
      const auto z = linear(h, model.pose_reduce[k - 1]);
      h = run_decoder(k, z, z);
    }
  }
  result.output = ad::tanh(linear(h, model.head));
  return result;
}

template <typename T>
ad::Var<T> latent_code(const BoundModel<T>& model, const ad::Var<T>& xyz) {
  const auto& encoder =
      model.config.architecture == Architecture::gc_transformer ? model.pose_encoder : model.identity_encoder;
  return ad::max_over_vertices(encode(xyz, encoder), 1);
}

mesh::Mesh run_forward(const ModelParams<float>& params, const mesh::Mesh& identity, const mesh::Mesh& pose) {
  if (!mesh::same_topology(identity, pose)) throw mesh::MeshError("identity and pose meshes differ in topology");
  ad::Tape<float> tape(ad::TapeMode::frozen);
  const auto model = bind(tape, params, false);
  const auto out = forward(model, tape.constant(mesh::to_array<float>(identity)),
                           tape.constant(mesh::to_array<float>(pose)));
  return mesh::from_array(out.output.to_array(), identity);
}

std::vector<float> run_latent_code(const ModelParams<float>& params, const mesh::Mesh& mesh) {
  ad::Tape<float> tape(ad::TapeMode::frozen);
  const auto model = bind(tape, params, false);
  const auto code = latent_code(model, tape.constant(mesh::to_array<float>(mesh)));
  return {code.value().begin(), code.value().end()};
}

#define GCT_INSTANTIATE_NETWORK(T)                                                                              \
  template BoundModel<T> bind(ad::Tape<T>&, const ModelParams<T>&, bool);                                      \
  template ad::Var<T> linear(const ad::Var<T>&, const LinearVars<T>&);                                         \
  template ad::Var<T> encode(const ad::Var<T>&, const std::vector<LinearVars<T>>&);                            \
  template AttentionResult<T> cross_attention(const ad::Var<T>&, const ad::Var<T>&, const AttentionVars<T>&);  \
  template ad::Var<T> norm_block(const ad::Var<T>&, const ad::Var<T>&, const NormBlockVars<T>&);               \
  template DecoderResult<T> decoder_block(const ad::Var<T>&, const ad::Var<T>&, const ad::Var<T>&,             \
                                          const DecoderVars<T>&, bool);                                        \
  template ForwardResult<T> forward(const BoundModel<T>&, const ad::Var<T>&, const ad::Var<T>&);               \
  template ad::Var<T> latent_code(const BoundModel<T>&, const ad::Var<T>&);

GCT_INSTANTIATE_NETWORK(float)
GCT_INSTANTIATE_NETWORK(double)

#undef GCT_INSTANTIATE_NETWORK

}  // namespace gct::model
