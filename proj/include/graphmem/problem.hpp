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

#ifndef GRAPHMEM_PROBLEM_HPP
#define GRAPHMEM_PROBLEM_HPP

#include <optional>
#include <string>
#include <vector>

#include "graphmem/graph.hpp"

namespace graphmem {

enum class Problem { BFS, SSSP, WCC, SpMV, PR };

const char* problem_name(Problem p);
Problem problem_from_name(const std::string& name);

/// True for problems that run a fixed number of sweeps instead of
/// iterating to a fixpoint.
inline bool is_stationary(Problem p) { return p == Problem::SpMV || p == Problem::PR; }
inline bool needs_root(Problem p) { return p == Problem::BFS || p == Problem::SSSP; }

struct ProblemSpec {
  Problem problem = Problem::WCC;
  std::optional<VertexId> root;
  int value_width_bits = 32;
  double damping = 0.85;      // PR only
  int max_iterations = 1;     // stationary problems
  bool damp_sum = true;       // standard PR form multiplies the sum by d
  double initial_value = -1;  // PR/SpMV vector seed; < 0 means 1/n
};

/// Largest representable value of the configured width; marks unreached
/// vertices for BFS/SSSP.
uint64_t unreached_sentinel(int value_width_bits);

enum class SolveMode {
  Synchronous,  // sweeps read only previous-round values
  InPlace,      // updates applied immediately in (partition, vertex) order
};

struct SolveResult {
  std::vector<double> values;
  int iterations = 0;  // sweeps executed, including the final no-change one
};

/// Functional reference solution for all five problems. partition_vertices
/// fixes the in-place sweep order to the accelerator's partition interval
/// size; 0 means one partition spanning the whole vertex range.
SolveResult reference_solve(const Graph& g, const ProblemSpec& spec, SolveMode mode,
                            uint64_t partition_vertices = 0);

}  // namespace graphmem

#endif  // GRAPHMEM_PROBLEM_HPP
