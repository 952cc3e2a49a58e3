// Copyright 2026 The graphmem authors
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

#include "graphmem/graph.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace graphmem {

Adjacency build_adjacency(const Graph& g) {
  Adjacency adj;
  adj.in_offsets.assign(g.n + 1, 0);
  adj.out_degree.assign(g.n, 0);
  for (const Edge& e : g.edges) {
    adj.in_offsets[e.dst + 1]++;
    adj.out_degree[e.src]++;
  }
  for (uint64_t v = 0; v < g.n; ++v) adj.in_offsets[v + 1] += adj.in_offsets[v];
  adj.in_neighbors.resize(g.m);
  std::vector<uint64_t> cursor(adj.in_offsets.begin(), adj.in_offsets.end() - 1);
  for (const Edge& e : g.edges) adj.in_neighbors[cursor[e.dst]++] = {e.src, e.weight};
  for (uint64_t v = 0; v < g.n; ++v) {
    std::sort(adj.in_neighbors.begin() + adj.in_offsets[v],
              adj.in_neighbors.begin() + adj.in_offsets[v + 1]);
  }
  return adj;
}

Graph load_snap_edge_list(const std::string& path, bool weighted,
                          bool undirected_duplicate) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);

  struct RawEdge {
    uint64_t src, dst;
    uint32_t weight;
  };
  std::vector<RawEdge> raw;
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    const char* p = line.c_str() + pos;
    char* end = nullptr;
    errno = 0;
    uint64_t src = std::strtoull(p, &end, 10);
    if (end == p || errno) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed edge line");
    }
    p = end;
    uint64_t dst = std::strtoull(p, &end, 10);
    if (end == p || errno) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed edge line");
    }
    uint32_t weight = 1;
    if (weighted) {
      p = end;
      uint64_t w = std::strtoull(p, &end, 10);
      if (end != p) weight = static_cast<uint32_t>(w);
    }
    raw.push_back({src, dst, weight});
  }
  if (raw.empty()) throw std::runtime_error("empty graph file: " + path);

  // SNAP ids can be sparse; compact them preserving numeric order.
  std::vector<uint64_t> ids;
  ids.reserve(raw.size() * 2);
  for (const RawEdge& e : raw) {
    ids.push_back(e.src);
    ids.push_back(e.dst);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::unordered_map<uint64_t, VertexId> remap;
  remap.reserve(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) remap[ids[i]] = static_cast<VertexId>(i);

  Graph g;
  g.n = ids.size();
  g.directed = !undirected_duplicate;
  g.edges.reserve(raw.size() * (undirected_duplicate ? 2 : 1));
  for (const RawEdge& e : raw) {
    VertexId s = remap[e.src], d = remap[e.dst];
    g.edges.push_back({s, d, e.weight});
    if (undirected_duplicate) g.edges.push_back({d, s, e.weight});
  }
  g.m = g.edges.size();
  return g;
}

namespace {
constexpr char kCacheMagic[8] = {'G', 'M', 'G', 'R', 'A', 'P', 'H', '1'};

template <typename T>
void write_le(std::ofstream& out, T value) {
  char buf[sizeof(T)];
  for (size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(buf, sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  T value = 0;
  for (size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(buf[i]) << (8 * i);
  return value;
}
}  // namespace

void save_graph_cache(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write graph cache: " + path);
  out.write(kCacheMagic, sizeof(kCacheMagic));
  write_le<uint64_t>(out, g.n);
  write_le<uint64_t>(out, g.m);
  write_le<uint8_t>(out, g.directed ? 1 : 0);
  for (const Edge& e : g.edges) {
    write_le<uint32_t>(out, e.src);
    write_le<uint32_t>(out, e.dst);
    write_le<uint32_t>(out, e.weight);
  }
}

Graph load_graph_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open graph cache: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("bad graph cache magic: " + path);
  }
  Graph g;
  g.n = read_le<uint64_t>(in);
  g.m = read_le<uint64_t>(in);
  g.directed = read_le<uint8_t>(in) != 0;
  g.edges.resize(g.m);
  for (Edge& e : g.edges) {
    e.src = read_le<uint32_t>(in);
    e.dst = read_le<uint32_t>(in);
    e.weight = read_le<uint32_t>(in);
  }
  if (!in) throw std::runtime_error("truncated graph cache: " + path);
  return g;
}

GraphStats graph_stats(const Graph& g) {
  GraphStats s;
  s.n = g.n;
  s.m = g.m;
  s.avg_degree = g.n == 0 ? 0.0 : static_cast<double>(g.m) / static_cast<double>(g.n);
  std::vector<uint32_t> degree(g.n, 0);
  uint32_t max_degree = 0;
  for (const Edge& e : g.edges) max_degree = std::max(max_degree, ++degree[e.src]);
  s.degree_histogram.assign(max_degree + 1, 0);
  for (uint64_t v = 0; v < g.n; ++v) s.degree_histogram[degree[v]]++;
  return s;
}

std::vector<VertexId> pick_roots(uint64_t n, int count, uint32_t seed) {
  if (n == 0) throw std::runtime_error("pick_roots: empty vertex set");
  std::mt19937 gen(seed);
  std::vector<VertexId> roots;
  roots.reserve(count);
  for (int i = 0; i < count; ++i) roots.push_back(static_cast<VertexId>(gen() % n));
  return roots;
}

EdgeListPartitions partition_edge_list(const Graph& g, uint64_t k) {
  if (k < 1) throw std::runtime_error("partition_edge_list: k must be >= 1");
  EdgeListPartitions p;
  p.k = k;
  p.n = g.n;
  p.K = g.n == 0 ? 1 : (g.n + k - 1) / k;
  p.parts.resize(p.K);
  for (const Edge& e : g.edges) p.parts[e.src / k].push_back(e);
  return p;
}

EdgeListPartitions sort_partition_edges_by_destination(EdgeListPartitions p) {
  for (auto& part : p.parts) {
    std::stable_sort(part.begin(), part.end(),
                     [](const Edge& a, const Edge& b) { return a.dst < b.dst; });
  }
  p.dst_sorted = true;
  return p;
}

CsrPartitions build_partitioned_csr(const Graph& g, uint64_t k) {
  if (k < 1) throw std::runtime_error("build_partitioned_csr: k must be >= 1");
  CsrPartitions c;
  c.k = k;
  c.n = g.n;
  c.K = g.n == 0 ? 1 : (g.n + k - 1) / k;
  c.pointers.assign(c.K, std::vector<uint32_t>(g.n + 1, 0));
  c.neighbors.resize(c.K);
  // Inverted edges: row = original destination, stored id = original source,
  // partitioned by the stored id's interval.
  for (const Edge& e : g.edges) c.pointers[e.src / k][e.dst + 1]++;
  for (uint64_t part = 0; part < c.K; ++part) {
    auto& ptr = c.pointers[part];
    for (uint64_t v = 0; v < g.n; ++v) ptr[v + 1] += ptr[v];
    c.neighbors[part].resize(ptr[g.n]);
  }
  std::vector<std::vector<uint32_t>> cursor(c.K);
  for (uint64_t part = 0; part < c.K; ++part) {
    cursor[part].assign(c.pointers[part].begin(), c.pointers[part].end() - 1);
  }
  for (const Edge& e : g.edges) {
    uint64_t part = e.src / k;
    c.neighbors[part][cursor[part][e.dst]++] = e.src;
  }
  for (uint64_t part = 0; part < c.K; ++part) {
    auto& ptr = c.pointers[part];
    auto& nbr = c.neighbors[part];
    for (uint64_t v = 0; v < g.n; ++v) {
      std::sort(nbr.begin() + ptr[v], nbr.begin() + ptr[v + 1]);
    }
  }
  return c;
}

}  // namespace graphmem
