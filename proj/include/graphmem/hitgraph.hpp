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

#ifndef GRAPHMEM_HITGRAPH_HPP
#define GRAPHMEM_HITGRAPH_HPP

#include <vector>

#include "graphmem/flow.hpp"
#include "graphmem/graph.hpp"
#include "graphmem/problem.hpp"

namespace graphmem {

struct HitGraphOpts {
  bool update_merging = true;
  bool active_bitmap_filter = true;
  bool partition_skipping = true;
};

/// Edge-centric scatter/gather accelerator: p processing elements, one per
/// memory channel, each with q pipelines that bound how many edges or
/// updates can enter per clock.
struct HitGraphParams {
  int p = 4;
  int q = 8;
  int value_width_bits = 32;
  bool weighted = true;
  HitGraphOpts opts;
};

struct AccelResult {
  SimResult sim;
  std::vector<double> values;
  std::vector<uint64_t> updates_per_iteration;  // u, before cache-line merging
  uint64_t scatter_partitions = 0;              // scheduled (not skipped), all iterations
  uint64_t gather_partitions = 0;
};

/// Simulates scatter/gather edge-centric processing over horizontally
/// partitioned edge lists until values converge (or for max_iterations on
/// the stationary problems). The DRAM channel count must equal params.p;
/// update merging requires destination-sorted partitions.
AccelResult run_hitgraph(const EdgeListPartitions& parts, const ProblemSpec& spec,
                         const HitGraphParams& params, DramSim& dram,
                         const EngineConfig& engine_config);

}  // namespace graphmem

#endif  // GRAPHMEM_HITGRAPH_HPP
