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

#ifndef GRAPHMEM_ACCUGRAPH_HPP
#define GRAPHMEM_ACCUGRAPH_HPP

#include <vector>

#include "graphmem/flow.hpp"
#include "graphmem/graph.hpp"
#include "graphmem/problem.hpp"

namespace graphmem {

struct AccuGraphOpts {
  bool prefetch_skipping = true;
  bool partition_skipping = true;
};

/// Vertex-centric pull accelerator: vertex pipelines bound how many
/// destinations enter per clock, edge pipelines how many neighbor values
/// enter per clock, and the prefetched partition's source values live in
/// on-chip BRAM split across banks that each serve one request per cycle.
struct AccuGraphParams {
  int vertex_pipelines = 8;
  int edge_pipelines = 16;
  int vertex_pipeline_size = 8;
  int edge_pipeline_size = 8;
  int value_width_bits = 32;
  int bram_banks = 16;
  AccuGraphOpts opts;
};

struct AccuGraphResult {
  SimResult sim;
  std::vector<double> values;
  uint64_t partitions_scanned = 0;     // not skipped, all iterations
  uint64_t prefetches = 0;             // partition prefetches actually issued
  uint64_t value_reads_filtered = 0;   // destination reads served from BRAM
  uint64_t neighbor_elements = 0;      // neighbor ids pulled from memory
};

/// Simulates pull-based processing over inverted-CSR partitions, applying
/// updates in place, until values converge (or for max_iterations on the
/// stationary problems). Edge weights are not representable in the CSR, so
/// SSSP and SpMV run with unit weights.
AccuGraphResult run_accugraph(const CsrPartitions& csr, const ProblemSpec& spec,
                              const AccuGraphParams& params, DramSim& dram,
                              const EngineConfig& engine_config);

}  // namespace graphmem

#endif  // GRAPHMEM_ACCUGRAPH_HPP
