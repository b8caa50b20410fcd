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

#include "gct/mesh/pair.hpp"

#include <fstream>
#include <sstream>

#include "gct/mesh/obj_io.hpp"

namespace gct::mesh {

std::vector<PairPaths> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open manifest " + path.string());
  const auto base = path.parent_path();
  std::vector<PairPaths> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string a, b, c, extra;
    if (!(tokens >> a) || a[0] == '#') continue;
    if (!(tokens >> b >> c) || (tokens >> extra)) {
      throw MeshError(path.string() + ":" + std::to_string(line_no) + ": expected three paths");
    }
    auto resolve = [&](const std::string& p) {
      std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    pairs.push_back({resolve(a), resolve(b), resolve(c)});
  }
  return pairs;
}

void write_manifest(const std::vector<PairPaths>& pairs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MeshError("cannot write manifest " + path.string());
  for (const auto& p : pairs) {
    out << p.identity.generic_string() << ' ' << p.pose.generic_string() << ' '
        << p.ground_truth.generic_string() << '\n';
  }
}

void check_pair(const PosePair& pair) {
  if (pair.identity.vertex_count() < 4) throw MeshError("pair meshes need at least 4 vertices");
  if (!same_topology(pair.identity, pair.pose) || !same_topology(pair.identity, pair.ground_truth)) {
    throw MeshError("pair meshes do not share topology");
  }
}

PosePair load_pair(const PairPaths& paths) {
  PosePair pair{load_obj(paths.identity), load_obj(paths.pose), load_obj(paths.ground_truth)};
  check_pair(pair);
  return pair;
}

}  // namespace gct::mesh
