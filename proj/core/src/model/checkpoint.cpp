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

#include "gct/model/checkpoint.hpp"

#include <boost/crc.hpp>
#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "gct/model/network.hpp"

namespace gct::model {
namespace {

constexpr char kMagic[4] = {'G', 'C', 'T', 'F'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { bytes.insert(bytes.end(), p, p + n); }

  std::vector<char> bytes;
};

class Reader {
 public:
  explicit Reader(std::vector<char> data) : data_(std::move(data)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool at_end() const { return pos_ == data_.size(); }
  const char* take(std::size_t n) {
    need(n);
    const char* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw CheckpointError("checkpoint is truncated");
  }
  std::vector<char> data_;
  std::size_t pos_ = 0;
};

void write_channels(Writer& w, const std::vector<std::size_t>& channels) {
  w.u32(static_cast<std::uint32_t>(channels.size()));
  for (auto c : channels) w.u32(static_cast<std::uint32_t>(c));
}

std::vector<std::size_t> read_channels(Reader& r) {
  const auto n = r.u32();
  if (n > 64) throw CheckpointError("implausible channel list length");
  std::vector<std::size_t> out(n);
  for (auto& c : out) c = r.u32();
  return out;
}

std::uint32_t crc_of(const ad::Array<float>& t) {
  Writer w;
  for (float v : t.data) w.f32(v);
  boost::crc_32_type crc;
  crc.process_bytes(w.bytes.data(), w.bytes.size());
  return crc.checksum();
}

}  // namespace

std::filesystem::path manifest_path(const std::filesystem::path& checkpoint) {
  auto p = checkpoint;
  p += ".manifest";
  return p;
}

void save_checkpoint(const ModelParams<float>& params, const std::filesystem::path& path) {
  const auto& cfg = params.config;
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.u32(cfg.architecture == Architecture::lir ? 1u : 0u);
  w.u32(cfg.attention_enabled ? 1u : 0u);
  w.f64(cfg.desk_scale_factor);
  w.u32(static_cast<std::uint32_t>(cfg.num_decoders));
  write_channels(w, cfg.encoder_channels);
  write_channels(w, cfg.decoder_channels);
  w.u32(static_cast<std::uint32_t>(params.tensors.size()));
  for (const auto& t : params.tensors) {
    w.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (auto e : t.shape) w.u32(static_cast<std::uint32_t>(e));
    for (float v : t.data) w.f32(v);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out.write(w.bytes.data(), static_cast<std::streamsize>(w.bytes.size()));
  if (!out) throw CheckpointError("write failed for " + path.string());

  std::ofstream manifest(manifest_path(path), std::ios::binary);
  if (!manifest) throw CheckpointError("cannot write checkpoint manifest");
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    manifest << fmt::format("{}\t{}\t{:08x}\n", params.names[i], ad::to_string(params.tensors[i].shape),
                            crc_of(params.tensors[i]));
  }
}

ModelParams<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));
  if (std::memcmp(r.take(4), kMagic, 4) != 0) throw CheckpointError(path.string() + " is not a checkpoint");
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint format version " + std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
  }
  ModelConfig cfg;
  cfg.architecture = r.u32() == 1u ? Architecture::lir : Architecture::gc_transformer;
  cfg.attention_enabled = r.u32() != 0u;
  cfg.desk_scale_factor = r.f64();
  cfg.num_decoders = r.u32();
  cfg.encoder_channels = read_channels(r);
  cfg.decoder_channels = read_channels(r);
  const Layout layout = build_layout(cfg);

  const auto count = r.u32();
  if (count != layout.shapes.size()) {
    throw CheckpointError("checkpoint holds " + std::to_string(count) + " tensors, configuration needs " +
                          std::to_string(layout.shapes.size()));
  }
  ModelParams<float> params{cfg, layout.names, {}};
  for (std::size_t i = 0; i < count; ++i) {
    const auto rank = r.u32();
    ad::Shape shape(rank);
    for (auto& e : shape) e = r.u32();
    if (shape != layout.shapes[i]) {
      throw CheckpointError("tensor '" + layout.names[i] + "' has shape " + ad::to_string(shape) + ", expected " +
                            ad::to_string(layout.shapes[i]));
    }
    ad::Array<float> t(shape);
    for (auto& v : t.data) v = r.f32();
    params.tensors.push_back(std::move(t));
  }
  if (!r.at_end()) throw CheckpointError("trailing bytes after the last tensor");
  return params;
}

}  // namespace gct::model
