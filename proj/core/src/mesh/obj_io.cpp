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

#include "gct/mesh/obj_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace gct::mesh {
namespace {

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw MeshError(path.string() + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view token, const std::filesystem::path& path, std::size_t line) {
  double value = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) fail_line(path, line, "bad coordinate '" + std::string(token) + "'");
  return value;
}

long parse_index(std::string_view token, const std::filesystem::path& path, std::size_t line) {
  token = token.substr(0, token.find('/'));
  long value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc{} || ptr != end) {
    fail_line(path, line, "bad face index '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

Mesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open " + path.string());

  std::vector<Vec3> verts;
  std::vector<std::vector<long>> polygons;
  std::vector<std::size_t> polygon_lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tag;
    if (!(tokens >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v{};
      std::string tok;
      for (int k = 0; k < 3; ++k) {
        if (!(tokens >> tok)) fail_line(path, line_no, "vertex needs three coordinates");
        v[k] = parse_double(tok, path, line_no);
      }
      verts.push_back(v);
    } else if (tag == "f") {
      std::vector<long> poly;
      std::string tok;
      while (tokens >> tok) poly.push_back(parse_index(tok, path, line_no));
      if (poly.size() < 3) fail_line(path, line_no, "face needs at least three vertices");
      polygons.push_back(std::move(poly));
      polygon_lines.push_back(line_no);
    }
  }

  const long n = static_cast<long>(verts.size());
  std::vector<Face> faces;
  for (std::size_t p = 0; p < polygons.size(); ++p) {
    std::vector<std::uint32_t> idx;
    for (long raw : polygons[p]) {
      long zero_based = raw > 0 ? raw - 1 : n + raw;
      if (raw == 0 || zero_based < 0 || zero_based >= n) {
        fail_line(path, polygon_lines[p], "face index " + std::to_string(raw) + " out of range");
      }
      idx.push_back(static_cast<std::uint32_t>(zero_based));
    }
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) faces.push_back({idx[0], idx[k], idx[k + 1]});
  }
  return Mesh(std::move(verts), std::move(faces));
}

void save_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MeshError("cannot write " + path.string());
  fmt::memory_buffer buf;
  for (const auto& v : mesh.vertices()) fmt::format_to(std::back_inserter(buf), "v {:.17g} {:.17g} {:.17g}\n", v[0], v[1], v[2]);
  for (const auto& f : mesh.faces()) fmt::format_to(std::back_inserter(buf), "f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw MeshError("write failed for " + path.string());
}

}  // namespace gct::mesh
