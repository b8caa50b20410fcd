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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "gct/mesh/normalize.hpp"
#include "gct/mesh/obj_io.hpp"
#include "gct/mesh/pair.hpp"
#include "gct/mesh/topology.hpp"

namespace {

using namespace gct::mesh;
namespace fs = std::filesystem;

Mesh tetrahedron() {
  return Mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}});
}

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gct_mesh_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

TEST(MeshTest, ValidatesFaces) {
  EXPECT_THROW(Mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {}), MeshError);
  EXPECT_THROW(Mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 3}}), MeshError);
  EXPECT_THROW(Mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 1}}), MeshError);
  EXPECT_NO_THROW(tetrahedron());
}

TEST(MeshTest, ArrayRoundTripIsChannelMajor) {
  const auto m = tetrahedron();
  const auto a = to_array<double>(m);
  EXPECT_EQ(a.shape, (gct::ad::Shape{3, 4}));
  EXPECT_EQ(a(2, 3), 1.0);
  EXPECT_EQ(from_array(a, m), m);
}

TEST(MeshTest, PermutationRoundTrip) {
  const auto m = tetrahedron();
  const std::vector<std::uint32_t> perm{2, 0, 3, 1};
  const auto p = permute_vertices(m, perm);
  EXPECT_EQ(p.vertices()[2], m.vertices()[0]);
  EXPECT_EQ(permute_vertices(p, invert_permutation(perm)), m);
  EXPECT_THROW(permute_vertices(m, {0, 0, 1, 2}), MeshError);
}

TEST(TopologyTest, TetrahedronRingsAndEdges) {
  const auto m = tetrahedron();
  const auto rings = vertex_rings(m);
  ASSERT_EQ(rings.size(), 4u);
  EXPECT_EQ(rings[0], (std::vector<std::uint32_t>{1, 2, 3}));
  const auto edges = edge_set(m);
  EXPECT_EQ(edges.size(), 6u);
  for (const auto& [p, q] : edges) EXPECT_LT(p, q);
}

TEST(TopologyTest, RingsAreSymmetric) {
  const Mesh m({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {2, 0, 0}}, {{0, 1, 2}, {0, 2, 3}, {1, 4, 2}});
  const auto rings = vertex_rings(m);
  for (std::uint32_t p = 0; p < rings.size(); ++p) {
    for (auto q : rings[p]) {
      const auto& back = rings[q];
      EXPECT_NE(std::find(back.begin(), back.end(), p), back.end());
    }
  }
  EXPECT_EQ(rings[4], (std::vector<std::uint32_t>{1, 2}));
}

TEST(NormalizeTest, FitsUnitCubeAndInverts) {
  const Mesh m({{10, 0, 0}, {14, 1, 0}, {10, 2, 1}, {12, 0, 3}}, {{0, 1, 2}, {0, 2, 3}});
  const auto n = normalize_to_unit_cube(m);
  double lo = 1e9, hi = -1e9;
  for (const auto& v : n.mesh.vertices()) {
    for (double c : v) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  EXPECT_NEAR(hi, kUnitCubeMargin, 1e-12);
  EXPECT_NEAR(lo, -kUnitCubeMargin, 1e-12);
  const auto back = invert_frame(n.mesh, n.frame);
  for (std::size_t i = 0; i < 4; ++i) {
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(back.vertices()[i][k], m.vertices()[i][k], 1e-12);
  }
}

TEST(NormalizeTest, ZeroExtentRejected) {
  const Mesh m({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}, {{0, 1, 2}});
  EXPECT_THROW(unit_cube_frame(m), MeshError);
}

TEST(ObjTest, RoundTripIsExact) {
  const auto dir = temp_dir("roundtrip");
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<Vec3> verts(4);
  for (auto& v : verts) {
    for (auto& c : v) c = dist(rng);
  }
  const auto m = tetrahedron().with_vertices(verts);
  save_obj(m, dir / "m.obj");
  EXPECT_EQ(load_obj(dir / "m.obj"), m);
}

TEST(ObjTest, ParsesSuffixesNegativeIndicesAndQuads) {
  const auto dir = temp_dir("parse");
  write_file(dir / "q.obj",
             "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\n"
             "f 1/1/1 2/1/1 3/1/1 4/1/1\nf -4 -2 -1\n");
  const auto m = load_obj(dir / "q.obj");
  EXPECT_EQ(m.vertex_count(), 4u);
  ASSERT_EQ(m.face_count(), 3u);
  EXPECT_EQ(m.faces()[0], (Face{0, 1, 2}));
  EXPECT_EQ(m.faces()[1], (Face{0, 2, 3}));
  EXPECT_EQ(m.faces()[2], (Face{0, 2, 3}));
}

TEST(ObjTest, BadIndexReportsLine) {
  const auto dir = temp_dir("bad");
  write_file(dir / "b.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n");
  try {
    load_obj(dir / "b.obj");
    FAIL();
  } catch (const MeshError& e) {
    EXPECT_NE(std::string(e.what()).find(":4:"), std::string::npos) << e.what();
  }
  write_file(dir / "z.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n");
  EXPECT_THROW(load_obj(dir / "z.obj"), MeshError);
  EXPECT_THROW(load_obj(dir / "missing.obj"), MeshError);
}

TEST(PairTest, ManifestRoundTripResolvesRelativePaths) {
  const auto dir = temp_dir("manifest");
  const auto m = tetrahedron();
  save_obj(m, dir / "a.obj");
  save_obj(m, dir / "b.obj");
  write_file(dir / "pairs.txt", "# identity pose gt\na.obj b.obj a.obj\n\n");
  const auto paths = read_manifest(dir / "pairs.txt");
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].pose, dir / "b.obj");
  const auto pair = load_pair(paths[0]);
  EXPECT_EQ(pair.ground_truth, m);

  write_manifest(paths, dir / "copy.txt");
  EXPECT_EQ(read_manifest(dir / "copy.txt"), paths);
}

TEST(PairTest, CheckPairRejectsTopologyMismatchAndTinyMeshes) {
  const auto m = tetrahedron();
  const Mesh other({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}});
  EXPECT_THROW(check_pair({m, other, m}), MeshError);
  const Mesh tri({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  EXPECT_THROW(check_pair({tri, tri, tri}), MeshError);
  EXPECT_NO_THROW(check_pair({m, m, m}));
}

TEST(ObjTest, QuadSplitFixtureAndByteStableWrites) {
  const auto dir = temp_dir("fixture");
  write_file(dir / "quad.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3\nf 1 3 4\n");
  const auto m = load_obj(dir / "quad.obj");
  EXPECT_EQ(m.vertex_count(), 4u);
  EXPECT_EQ(m.face_count(), 2u);
  save_obj(m, dir / "a.obj");
  save_obj(m, dir / "b.obj");
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_EQ(slurp(dir / "a.obj"), slurp(dir / "b.obj"));
  EXPECT_EQ(load_obj(dir / "a.obj").vertex_count(), 4u);
}

TEST(TopologyTest, SingleTriangleRing) {
  const Mesh m({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  EXPECT_EQ(vertex_rings(m)[0], (std::vector<std::uint32_t>{1, 2}));
}

TEST(TopologyTest, RandomMeshMatchesBruteForceScan) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::uint32_t> pick(0, 49);
  std::vector<Vec3> verts(50, Vec3{0, 0, 0});
  std::vector<Face> faces;
  while (faces.size() < 80) {
    Face f{pick(rng), pick(rng), pick(rng)};
    if (f[0] != f[1] && f[1] != f[2] && f[0] != f[2]) faces.push_back(f);
  }
  const Mesh m(verts, faces);
  const auto rings = vertex_rings(m);
  for (std::uint32_t p = 0; p < 50; ++p) {
    std::vector<std::uint32_t> expected;
    for (std::uint32_t q = 0; q < 50; ++q) {
      bool adjacent = false;
      for (const auto& f : faces) {
        const bool has_p = f[0] == p || f[1] == p || f[2] == p;
        const bool has_q = f[0] == q || f[1] == q || f[2] == q;
        adjacent = adjacent || (p != q && has_p && has_q);
      }
      if (adjacent) expected.push_back(q);
    }
    EXPECT_EQ(rings[p], expected) << "vertex " << p;
  }
}

TEST(NormalizeTest, CubeClosedFormAndIdempotence) {
  std::vector<Vec3> corners;
  for (int i = 0; i < 8; ++i) corners.push_back({10.0 * (i & 1), 10.0 * ((i >> 1) & 1), 10.0 * ((i >> 2) & 1)});
  const Mesh cube(corners, {{0, 1, 3}, {0, 3, 2}, {4, 5, 7}, {4, 7, 6}});
  const auto frame = unit_cube_frame(cube);
  for (double c : frame.center) EXPECT_DOUBLE_EQ(c, 5.0);
  EXPECT_NEAR(frame.scale, 10.0 / 1.9, 1e-12);

  const auto once = normalize_to_unit_cube(cube).mesh;
  const auto twice = normalize_to_unit_cube(once);
  EXPECT_NEAR(twice.frame.scale, 1.0, 1e-12);
  for (std::size_t i = 0; i < 8; ++i) {
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(twice.mesh.vertices()[i][k], once.vertices()[i][k], 1e-12);
  }
}

TEST(MeshTest, IdentityPermutationAndRelabelledEdges) {
  const auto m = tetrahedron();
  std::vector<std::uint32_t> id(4);
  std::iota(id.begin(), id.end(), 0u);
  EXPECT_EQ(permute_vertices(m, id), m);

  const std::vector<std::uint32_t> perm{3, 1, 0, 2};
  EdgeSet relabelled;
  for (auto [p, q] : edge_set(m)) relabelled.emplace_back(std::min(perm[p], perm[q]), std::max(perm[p], perm[q]));
  std::sort(relabelled.begin(), relabelled.end());
  EXPECT_EQ(edge_set(permute_vertices(m, perm)), relabelled);
}

}  // namespace
