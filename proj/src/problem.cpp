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

#include "graphmem/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graphmem {

const char* problem_name(Problem p) {
  switch (p) {
    case Problem::BFS: return "bfs";
    case Problem::SSSP: return "sssp";
    case Problem::WCC: return "wcc";
    case Problem::SpMV: return "spmv";
    case Problem::PR: return "pr";
  }
  return "?";
}

Problem problem_from_name(const std::string& name) {
  if (name == "bfs") return Problem::BFS;
  if (name == "sssp") return Problem::SSSP;
  if (name == "wcc") return Problem::WCC;
  if (name == "spmv") return Problem::SpMV;
  if (name == "pr") return Problem::PR;
  throw std::runtime_error("unknown problem: " + name);
}

uint64_t unreached_sentinel(int value_width_bits) {
  if (value_width_bits >= 64) return ~uint64_t{0};
  return (uint64_t{1} << value_width_bits) - 1;
}

namespace {

// One synchronous min-propagation sweep; reads prev, writes next.
bool sweep_min_synchronous(const Graph& g, const ProblemSpec& spec, uint64_t sentinel,
                           const std::vector<double>& prev, std::vector<double>& next) {
  next = prev;
  bool changed = false;
  for (const Edge& e : g.edges) {
    if (prev[e.src] >= static_cast<double>(sentinel) && spec.problem != Problem::WCC) continue;
    double cand;
    switch (spec.problem) {
      case Problem::BFS: cand = prev[e.src] + 1; break;
      case Problem::SSSP: cand = prev[e.src] + e.weight; break;
      default: cand = prev[e.src]; break;  // WCC
    }
    if (cand >= static_cast<double>(sentinel)) continue;
    if (cand < next[e.dst]) {
      next[e.dst] = cand;
      changed = true;
    }
  }
  return changed;
}

// One in-place sweep over partitions in ascending (partition, vertex) order,
// pulling along inverted edges and applying updates immediately.
bool sweep_min_in_place(const Graph& g, const Adjacency& adj, const ProblemSpec& spec,
                        uint64_t sentinel, uint64_t k, std::vector<double>& values) {
  bool changed = false;
  uint64_t parts = g.n == 0 ? 1 : (g.n + k - 1) / k;
  for (uint64_t part = 0; part < parts; ++part) {
    VertexId lo = static_cast<VertexId>(part * k);
    VertexId hi = static_cast<VertexId>(std::min<uint64_t>(g.n, (part + 1) * k));
    for (uint64_t v = 0; v < g.n; ++v) {
      for (uint64_t i = adj.in_offsets[v]; i < adj.in_offsets[v + 1]; ++i) {
        auto [u, w] = adj.in_neighbors[i];
        if (u < lo || u >= hi) continue;
        if (values[u] >= static_cast<double>(sentinel) && spec.problem != Problem::WCC) continue;
        double cand;
        switch (spec.problem) {
          case Problem::BFS: cand = values[u] + 1; break;
          case Problem::SSSP: cand = values[u] + w; break;
          default: cand = values[u]; break;
        }
        if (cand >= static_cast<double>(sentinel)) continue;
        if (cand < values[v]) {
          values[v] = cand;
          changed = true;
        }
      }
    }
  }
  return changed;
}

// Stationary sweeps (PR, SpMV) read a snapshot of the previous round, so
// synchronous and in-place modes coincide. The sum runs in ascending
// (partition, neighbor) order to pin the floating-point result.
void sweep_stationary(const Graph& g, const Adjacency& adj, const ProblemSpec& spec, uint64_t k,
                      const std::vector<double>& prev, std::vector<double>& next) {
  uint64_t parts = g.n == 0 ? 1 : (g.n + k - 1) / k;
  double base = 0.0;
  if (spec.problem == Problem::PR) base = (1.0 - spec.damping) / static_cast<double>(g.n);
  std::fill(next.begin(), next.end(), base);
  for (uint64_t part = 0; part < parts; ++part) {
    VertexId lo = static_cast<VertexId>(part * k);
    VertexId hi = static_cast<VertexId>(std::min<uint64_t>(g.n, (part + 1) * k));
    for (uint64_t v = 0; v < g.n; ++v) {
      double sum = 0.0;
      for (uint64_t i = adj.in_offsets[v]; i < adj.in_offsets[v + 1]; ++i) {
        auto [u, w] = adj.in_neighbors[i];
        if (u < lo || u >= hi) continue;
        if (spec.problem == Problem::PR) {
          sum += prev[u] / static_cast<double>(adj.out_degree[u]);
        } else {
          sum += prev[u] * static_cast<double>(w);
        }
      }
      if (spec.problem == Problem::PR && spec.damp_sum) sum *= spec.damping;
      next[v] += sum;
    }
  }
}

}  // namespace

SolveResult reference_solve(const Graph& g, const ProblemSpec& spec, SolveMode mode,
                            uint64_t partition_vertices) {
  if (needs_root(spec.problem)) {
    if (!spec.root) throw std::runtime_error("reference_solve: root required");
    if (*spec.root >= g.n) throw std::runtime_error("reference_solve: root out of range");
  }
  uint64_t k = partition_vertices == 0 ? std::max<uint64_t>(g.n, 1) : partition_vertices;
  uint64_t sentinel = unreached_sentinel(spec.value_width_bits);

  SolveResult result;
  result.values.assign(g.n, 0.0);

  if (is_stationary(spec.problem)) {
    double init = spec.initial_value >= 0 ? spec.initial_value : 1.0 / static_cast<double>(g.n);
    std::fill(result.values.begin(), result.values.end(), init);
    Adjacency adj = build_adjacency(g);
    std::vector<double> next(g.n);
    for (int it = 0; it < spec.max_iterations; ++it) {
      sweep_stationary(g, adj, spec, k, result.values, next);
      result.values.swap(next);
    }
    result.iterations = spec.max_iterations;
    return result;
  }

  if (spec.problem == Problem::WCC) {
    for (uint64_t v = 0; v < g.n; ++v) result.values[v] = static_cast<double>(v);
  } else {
    std::fill(result.values.begin(), result.values.end(), static_cast<double>(sentinel));
    result.values[*spec.root] = 0.0;
  }

  if (mode == SolveMode::Synchronous) {
    std::vector<double> next;
    bool changed = true;
    while (changed) {
      changed = sweep_min_synchronous(g, spec, sentinel, result.values, next);
      result.values.swap(next);
      result.iterations++;
    }
  } else {
    Adjacency adj = build_adjacency(g);
    bool changed = true;
    while (changed) {
      changed = sweep_min_in_place(g, adj, spec, sentinel, k, result.values);
      result.iterations++;
    }
  }
  return result;
}

}  // namespace graphmem
