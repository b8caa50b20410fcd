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

#include "gct/synth/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>

#include "gct/mesh/obj_io.hpp"

namespace gct::synth {
namespace {

std::size_t pick_other(std::mt19937_64& rng, std::size_t lo, std::size_t hi, std::size_t avoid) {
  std::uniform_int_distribution<std::size_t> dist(lo, hi - 1);
  std::size_t v = dist(rng);
  while (v == avoid && hi - lo > 1) v = dist(rng);
  return v;
}

std::string mesh_name(std::size_t identity, std::size_t pose) {
  return fmt::format("meshes/id{:03}_pose{:04}.obj", identity, pose);
}

}  // namespace

void SplitSpec::validate() const {
  if (n_identities < 2 || n_poses < 2) throw SynthError("need at least two training identities and poses");
  if (held_out_identities < 1 || held_out_poses < 1) throw SynthError("need held-out identities and poses");
  if (test_pairs < 1) throw SynthError("test splits need at least one pair");
  if (test_pairs > held_out_identities * n_poses || test_pairs > held_out_identities * held_out_poses) {
    throw SynthError("more test pairs requested than distinct held-out combinations");
  }
  resolution.validate();
}

DatasetSplit make_dataset(const SplitSpec& spec, std::uint64_t seed) {
  spec.validate();
  DatasetSplit split;
  split.spec = spec;
  split.seed = seed;
  std::mt19937_64 rng(seed);
  const std::size_t n_id = spec.n_identities + spec.held_out_identities;
  const std::size_t n_pose = spec.n_poses + spec.held_out_poses;
  for (std::size_t i = 0; i < n_id; ++i) split.identities.push_back(sample_identity(rng));
  for (std::size_t i = 0; i < n_pose; ++i) split.poses.push_back(sample_pose(rng, spec.regime));

  for (std::size_t a = 0; a < spec.n_identities; ++a) {
    for (std::size_t b = 0; b < spec.n_poses; ++b) {
      PairRecord r;
      r.identity = a;
      r.pose = b;
      r.identity_pose = pick_other(rng, 0, spec.n_poses, b);
      r.pose_donor = pick_other(rng, 0, spec.n_identities, a);
      split.train.push_back(r);
    }
  }

  auto sample_test = [&](std::size_t pose_lo, std::size_t pose_hi) {
    std::vector<std::pair<std::size_t, std::size_t>> combos;
    for (std::size_t a = spec.n_identities; a < n_id; ++a) {
      for (std::size_t b = pose_lo; b < pose_hi; ++b) combos.emplace_back(a, b);
    }
    std::shuffle(combos.begin(), combos.end(), rng);
    std::vector<PairRecord> out;
    for (std::size_t i = 0; i < spec.test_pairs; ++i) {
      PairRecord r;
      r.identity = combos[i].first;
      r.pose = combos[i].second;
      r.identity_pose = pick_other(rng, 0, spec.n_poses, r.pose);
      r.pose_donor = pick_other(rng, 0, spec.n_identities, spec.n_identities);
      out.push_back(r);
    }
    return out;
  };
  split.seen = sample_test(0, spec.n_poses);
  split.unseen = sample_test(spec.n_poses, n_pose);
  return split;
}

mesh::Mesh DatasetSplit::mesh(std::size_t identity, std::size_t pose) const {
  return generate_mesh(identities.at(identity), poses.at(pose), spec.resolution);
}

mesh::PosePair DatasetSplit::pair(const PairRecord& r) const {
  return {mesh(r.identity, r.identity_pose), mesh(r.pose_donor, r.pose), mesh(r.identity, r.pose)};
}

PairSets DatasetSplit::materialize() const {
  std::map<std::pair<std::size_t, std::size_t>, mesh::Mesh> cache;
  auto get = [&](std::size_t a, std::size_t b) -> const mesh::Mesh& {
    auto it = cache.find({a, b});
    if (it == cache.end()) it = cache.emplace(std::pair{a, b}, mesh(a, b)).first;
    return it->second;
  };
  auto build = [&](const std::vector<PairRecord>& records) {
    std::vector<mesh::PosePair> out;
    for (const auto& r : records) {
      out.push_back({get(r.identity, r.identity_pose), get(r.pose_donor, r.pose), get(r.identity, r.pose)});
    }
    return out;
  };
  return {build(train), build(seen), build(unseen)};
}

void write_dataset(const DatasetSplit& split, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "meshes");
  std::map<std::pair<std::size_t, std::size_t>, bool> written;
  auto ensure = [&](std::size_t a, std::size_t b) {
    const auto name = mesh_name(a, b);
    if (!written[{a, b}]) {
      mesh::save_obj(split.mesh(a, b), dir / name);
      written[{a, b}] = true;
    }
    return std::filesystem::path(name);
  };
  auto manifest = [&](const std::vector<PairRecord>& records, const char* file) {
    std::vector<mesh::PairPaths> paths;
    for (const auto& r : records) {
      paths.push_back({ensure(r.identity, r.identity_pose), ensure(r.pose_donor, r.pose), ensure(r.identity, r.pose)});
    }
    mesh::write_manifest(paths, dir / file);
  };
  manifest(split.train, "train.txt");
  manifest(split.seen, "seen.txt");
  manifest(split.unseen, "unseen.txt");

  std::ofstream desc(dir / "dataset.txt", std::ios::binary);
  const auto& s = split.spec;
  desc << "seed=" << split.seed << "\n"
       << "n_identities=" << s.n_identities << "\n"
       << "n_poses=" << s.n_poses << "\n"
       << "held_out_identities=" << s.held_out_identities << "\n"
       << "held_out_poses=" << s.held_out_poses << "\n"
       << "test_pairs=" << s.test_pairs << "\n"
       << "regime=" << to_string(s.regime) << "\n"
       << "segments=" << s.resolution.segments << "\n"
       << "rings=" << s.resolution.rings << "\n"
       << "vertex_count=" << s.resolution.vertex_count() << "\n";
  for (const auto& r : identity_ranges()) desc << "alpha." << r.name << "=" << fmt::format("{},{}", r.lo, r.hi) << "\n";
  for (const auto& r : pose_limits()) desc << "beta." << r.name << "=" << fmt::format("{},{}", r.lo, r.hi) << "\n";
  if (!desc) throw SynthError("cannot write dataset descriptor in " + dir.string());
}

PairSets load_dataset(const std::filesystem::path& dir) {
  auto load = [&](const char* file) {
    std::vector<mesh::PosePair> out;
    std::map<std::filesystem::path, mesh::Mesh> cache;
    auto get = [&](const std::filesystem::path& p) -> const mesh::Mesh& {
      auto it = cache.find(p);
      if (it == cache.end()) it = cache.emplace(p, mesh::load_obj(p)).first;
      return it->second;
    };
    for (const auto& paths : mesh::read_manifest(dir / file)) {
      mesh::PosePair pair{get(paths.identity), get(paths.pose), get(paths.ground_truth)};
      mesh::check_pair(pair);
      out.push_back(std::move(pair));
    }
    return out;
  };
  return {load("train.txt"), load("seen.txt"), load("unseen.txt")};
}

}  // namespace gct::synth
