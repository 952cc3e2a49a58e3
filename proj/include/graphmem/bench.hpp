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

#ifndef GRAPHMEM_BENCH_HPP
#define GRAPHMEM_BENCH_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graphmem/accugraph.hpp"
#include "graphmem/dram.hpp"
#include "graphmem/hitgraph.hpp"
#include "graphmem/problem.hpp"

namespace graphmem {

enum class Accel { HitGraph, AccuGraph };

const char* accel_name(Accel a);
Accel accel_from_name(const std::string& name);

/// The 20 experiment roots of the published runs come from mt19937 with
/// this seed, reduced modulo n.
constexpr uint32_t kRootSeed = 3483584297u;

struct RootsPolicy {
  std::vector<VertexId> fixed;  // takes precedence when non-empty
  int random_count = 0;         // 0: single run rooted at 0 (if needed)
  uint32_t seed = kRootSeed;
};

struct ExperimentConfig {
  Accel accelerator = Accel::HitGraph;
  ProblemSpec problem;
  std::string dataset;  // edge-list path; empty when the graph is given directly
  std::string graph_name = "unnamed";
  DramConfig dram;
  HitGraphParams hitgraph;
  AccuGraphParams accugraph;
  uint64_t partition_vertices = 0;  // 0: one partition spanning all vertices
  double accel_mhz = 200.0;
  RootsPolicy roots;
  int repetitions = 1;
};

struct ResultRecord {
  std::string accelerator;
  std::string problem;
  std::string graph;
  VertexId root = 0;
  int iterations = 0;
  uint64_t cycles = 0;
  double runtime_s = 0.0;
  double greps = 0.0;
  uint64_t row_hits = 0;
  uint64_t row_misses = 0;
  uint64_t row_conflicts = 0;
  uint64_t bytes_read = 0;
  uint64_t bytes_written = 0;
};

// --- metrics ---------------------------------------------------------------

/// Read edges per second: m edges per iteration, i iterations, runtime r.
double compute_reps(uint64_t m, int iterations, double runtime_s);
double percentage_error(double simulated, double truth);
/// sigma / mu over the samples (population standard deviation).
double coefficient_of_variation(const std::vector<double>& samples);

// --- published reference numbers --------------------------------------------

struct GroundTruth {
  double truth = 0.0;       // measured on the original hardware
  double simulation = 0.0;  // reported by the original simulation study
};

/// Published per-(accelerator, problem, graph) results: seconds for the
/// scatter/gather accelerator, GREPS for the pull accelerator. Graphs go by
/// their two-letter abbreviations (wt, lj, sd, ...).
std::optional<GroundTruth> ground_truth(Accel a, Problem p, const std::string& graph_abbr);

struct DatasetInfo {
  std::string name;
  std::string abbr;
  uint64_t n = 0;
  uint64_t m = 0;
  double avg_degree = 0.0;
  bool directed = true;
  bool large = false;  // gated behind --large in the CLI
};

const std::vector<DatasetInfo>& dataset_catalog();
std::optional<DatasetInfo> dataset_info(const std::string& name_or_abbr);

// --- profiles ----------------------------------------------------------------

/// Published benchmark configuration for one accelerator/problem/graph
/// combination (memory geometry, data widths, partition sizes).
ExperimentConfig reproduction_config(Accel a, Problem p, const std::string& graph_name,
                                     uint64_t n);
/// Both accelerators on identical memory and partitioning, for head-to-head
/// comparison.
ExperimentConfig comparability_config(Accel a, Problem p, const std::string& graph_name);

// --- execution ---------------------------------------------------------------

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config, const Graph& g);
/// Runs independent experiments on worker threads; results keep config order.
std::vector<std::vector<ResultRecord>> run_experiments(
    const std::vector<ExperimentConfig>& configs, const std::vector<const Graph*>& graphs,
    int threads = 0);

// --- emission ----------------------------------------------------------------

void write_csv(const std::vector<ResultRecord>& records, std::ostream& out);
void write_json(const std::vector<ResultRecord>& records, std::ostream& out);
std::vector<ResultRecord> read_json(std::istream& in);
/// Plot data for the performance-by-average-degree trend: one line per
/// record, columns graph, avg_degree, greps.
void write_degree_plot(const std::vector<ResultRecord>& records, std::ostream& out);

// --- configuration files -------------------------------------------------------

/// Parses the TOML subset used by experiment files: top-level and [section]
/// tables with string, integer, float, boolean, and integer-array values.
ExperimentConfig parse_experiment_toml(std::istream& in);
ExperimentConfig load_experiment_toml(const std::string& path);

}  // namespace graphmem

#endif  // GRAPHMEM_BENCH_HPP
