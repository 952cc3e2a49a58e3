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

#ifndef GRAPHMEM_GRAPH_HPP
#define GRAPHMEM_GRAPH_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace graphmem {

using VertexId = uint32_t;

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  uint32_t weight = 1;
};

/// A directed graph held as an ordered edge list plus lazily built
/// adjacency indices for the reference solvers.
struct Graph {
  uint64_t n = 0;  // vertex count, ids dense in [0, n)
  uint64_t m = 0;  // edge count, equals edges.size()
  bool directed = true;
  std::vector<Edge> edges;
};

/// In-adjacency of a graph: for each vertex the (source, weight) pairs of
/// its incoming edges, sorted by source id. Used by the pull-style solvers.
struct Adjacency {
  std::vector<uint64_t> in_offsets;           // length n + 1
  std::vector<std::pair<VertexId, uint32_t>> in_neighbors;
  std::vector<uint32_t> out_degree;           // length n
};

Adjacency build_adjacency(const Graph& g);

// SNAP plain-text edge list: whitespace separated "src dst [weight]" lines,
// '#' starts a comment line. Vertex ids are compacted to a dense [0, n)
// range in first-seen numeric order. When undirected_duplicate is set every
// edge is stored in both directions.
Graph load_snap_edge_list(const std::string& path, bool weighted = false,
                          bool undirected_duplicate = false);

// Binary cache of a parsed graph (magic header, little-endian counts).
void save_graph_cache(const Graph& g, const std::string& path);
Graph load_graph_cache(const std::string& path);

struct GraphStats {
  uint64_t n = 0;
  uint64_t m = 0;
  double avg_degree = 0.0;
  std::vector<uint64_t> degree_histogram;  // index = out-degree
};

GraphStats graph_stats(const Graph& g);

/// Experiment roots drawn from the standard 32-bit Mersenne Twister,
/// reduced to [0, n) by modulo.
std::vector<VertexId> pick_roots(uint64_t n, int count, uint32_t seed);

// ---------------------------------------------------------------------------
// Partitioned layouts

/// Horizontally partitioned edge list: edge e lives in partition
/// floor(src(e) / k), K = ceil(n / k).
struct EdgeListPartitions {
  uint64_t k = 0;  // vertices per partition
  uint64_t K = 0;  // partition count
  uint64_t n = 0;
  bool dst_sorted = false;
  std::vector<std::vector<Edge>> parts;
};

EdgeListPartitions partition_edge_list(const Graph& g, uint64_t k);

/// Stable sort of each partition's edges by destination vertex.
EdgeListPartitions sort_partition_edges_by_destination(EdgeListPartitions p);

/// Horizontally partitioned CSR over the inverted edges. Partition P holds,
/// for every destination vertex, the slice of its in-neighbors whose id lies
/// in P's vertex interval. pointers has length n + 1 per partition.
struct CsrPartitions {
  uint64_t k = 0;
  uint64_t K = 0;
  uint64_t n = 0;
  std::vector<std::vector<uint32_t>> pointers;
  std::vector<std::vector<VertexId>> neighbors;
};

CsrPartitions build_partitioned_csr(const Graph& g, uint64_t k);

}  // namespace graphmem

#endif  // GRAPHMEM_GRAPH_HPP
