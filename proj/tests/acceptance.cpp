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
//
// End-to-end acceptance checks, one criterion per invocation:
//   acceptance <1..7>
// Prints one PASS/FAIL/SKIP line. Exit 0 on pass, 1 on fail, 77 when the
// criterion needs dataset files that are not present (set GRAPHMEM_DATASETS
// to the directory holding the edge lists; default ./data).

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "graphmem/accugraph.hpp"
#include "graphmem/bench.hpp"
#include "graphmem/dram.hpp"
#include "graphmem/hitgraph.hpp"
#include "graphmem/problem.hpp"
#include "test_fixtures.hpp"

using namespace graphmem;
using namespace graphmem::testing;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitSkip = 77;

struct Verdict {
  int exit_code = kExitPass;
  std::string message;
};

std::string datasets_dir() {
  const char* env = std::getenv("GRAPHMEM_DATASETS");
  return env ? env : "data";
}

std::optional<Graph> load_dataset(const std::string& name, bool weighted) {
  auto info = dataset_info(name);
  for (const char* ext : {".el", ".txt", ".edges"}) {
    std::filesystem::path p = std::filesystem::path(datasets_dir()) / (name + ext);
    if (std::filesystem::exists(p)) {
      return load_snap_edge_list(p.string(), weighted, info && !info->directed);
    }
  }
  return std::nullopt;
}

DramConfig hitgraph_dram(int channels) {
  DramConfig c;
  c.standard = DramStandard::DDR3;
  c.channels = channels;
  c.ranks = 2;
  c.speed_grade = "1600K";
  c.organization = "8Gb_x16";
  return c;
}

DramConfig accugraph_dram() {
  DramConfig c;
  c.standard = DramStandard::DDR4;
  c.channels = 1;
  c.ranks = 1;
  c.speed_grade = "2400R";
  c.organization = "4Gb_x16";
  return c;
}

struct NamedGraph {
  std::string name;
  Graph graph;
  uint64_t k;  // partition interval
};

std::vector<NamedGraph> small_suite() {
  std::vector<NamedGraph> suite;
  suite.push_back({"example", example_graph(), 3});
  suite.push_back({"bfs-example", bfs_example_graph(), 3});
  suite.push_back({"chain-64", chain_graph(64), 16});
  suite.push_back({"random-1k", random_graph(1000, 4000, 101), 256});
  suite.push_back({"random-10k", random_graph(10000, 40000, 202), 2048});
  return suite;
}

AccelResult hitgraph_run(const Graph& g, const ProblemSpec& spec, uint64_t k, bool opts_on) {
  HitGraphParams params;
  params.weighted = false;
  params.value_width_bits = spec.value_width_bits;
  params.opts.update_merging = opts_on;
  params.opts.active_bitmap_filter = opts_on;
  params.opts.partition_skipping = opts_on;
  EdgeListPartitions parts = partition_edge_list(g, k);
  if (params.opts.update_merging) {
    parts = sort_partition_edges_by_destination(std::move(parts));
  }
  DramSim dram(hitgraph_dram(params.p));
  return run_hitgraph(parts, spec, params, dram, EngineConfig{});
}

AccuGraphResult accugraph_run(const Graph& g, const ProblemSpec& spec, uint64_t k, bool opts_on) {
  AccuGraphParams params;
  params.value_width_bits = spec.value_width_bits;
  params.opts.prefetch_skipping = opts_on;
  params.opts.partition_skipping = opts_on;
  CsrPartitions csr = build_partitioned_csr(g, k);
  DramSim dram(accugraph_dram());
  return run_accugraph(csr, spec, params, dram, EngineConfig{});
}

bool values_match(Problem p, const std::vector<double>& got, const std::vector<double>& want,
                  std::string* why) {
  if (got.size() != want.size()) {
    *why = "value count mismatch";
    return false;
  }
  const bool exact = p == Problem::BFS || p == Problem::SSSP || p == Problem::WCC;
  for (size_t i = 0; i < got.size(); ++i) {
    const bool ok = exact ? got[i] == want[i] : std::abs(got[i] - want[i]) <= 1e-9;
    if (!ok) {
      std::ostringstream os;
      os << "vertex " << i << ": got " << got[i] << ", want " << want[i];
      *why = os.str();
      return false;
    }
  }
  return true;
}

ProblemSpec make_spec(Problem p) {
  ProblemSpec spec;
  spec.problem = p;
  if (needs_root(p)) spec.root = 0;
  spec.max_iterations = 3;
  return spec;
}

// --- criterion 1: final vertex values equal the reference solvers -------------

Verdict criterion_values() {
  const Problem problems[] = {Problem::BFS, Problem::SSSP, Problem::WCC, Problem::PR,
                              Problem::SpMV};
  int cases = 0;
  for (const NamedGraph& ng : small_suite()) {
    for (Problem p : problems) {
      ProblemSpec spec = make_spec(p);
      SolveResult sync = reference_solve(ng.graph, spec, SolveMode::Synchronous, ng.k);
      SolveResult inplace = reference_solve(ng.graph, spec, SolveMode::InPlace, ng.k);
      for (bool opts_on : {true, false}) {
        std::string why;
        auto hg = hitgraph_run(ng.graph, spec, ng.k, opts_on);
        if (!values_match(p, hg.values, sync.values, &why)) {
          return {kExitFail, "hitgraph " + std::string(problem_name(p)) + " on " + ng.name +
                                 (opts_on ? "" : " (opts off)") + ": " + why};
        }
        auto ag = accugraph_run(ng.graph, spec, ng.k, opts_on);
        if (!values_match(p, ag.values, inplace.values, &why)) {
          return {kExitFail, "accugraph " + std::string(problem_name(p)) + " on " + ng.name +
                                 (opts_on ? "" : " (opts off)") + ": " + why};
        }
        cases += 2;
      }
    }
  }

  // The real-graph half of the criterion needs slashdot and dblp on disk.
  int datasets = 0;
  for (const char* name : {"slashdot", "dblp"}) {
    auto g = load_dataset(name, false);
    if (!g) continue;
    ++datasets;
    const uint64_t k = 1'024'000;
    for (Problem p : {Problem::BFS, Problem::WCC}) {
      ProblemSpec spec = make_spec(p);
      std::string why;
      auto hg = hitgraph_run(*g, spec, k, true);
      SolveResult sync = reference_solve(*g, spec, SolveMode::Synchronous, k);
      if (!values_match(p, hg.values, sync.values, &why)) {
        return {kExitFail, "hitgraph " + std::string(problem_name(p)) + " on " + name + ": " + why};
      }
      auto ag = accugraph_run(*g, spec, k, true);
      SolveResult inplace = reference_solve(*g, spec, SolveMode::InPlace, k);
      if (!values_match(p, ag.values, inplace.values, &why)) {
        return {kExitFail,
                "accugraph " + std::string(problem_name(p)) + " on " + name + ": " + why};
      }
      cases += 2;
    }
  }
  std::ostringstream os;
  os << cases << " accelerator runs match the reference solvers";
  if (datasets < 2) {
    os << "; SKIP: slashdot/dblp edge lists not under " << datasets_dir() << "/";
    return {kExitSkip, os.str()};
  }
  return {kExitPass, os.str()};
}

// --- criterion 2: iteration counts ---------------------------------------------

Verdict criterion_iterations() {
  int cases = 0;
  for (const NamedGraph& ng : small_suite()) {
    for (Problem p : {Problem::BFS, Problem::SSSP, Problem::WCC}) {
      ProblemSpec spec = make_spec(p);
      SolveResult sync = reference_solve(ng.graph, spec, SolveMode::Synchronous, ng.k);
      auto hg = hitgraph_run(ng.graph, spec, ng.k, true);
      if (hg.sim.iterations != sync.iterations) {
        std::ostringstream os;
        os << "hitgraph " << problem_name(p) << " on " << ng.name << ": " << hg.sim.iterations
           << " iterations, oracle " << sync.iterations;
        return {kExitFail, os.str()};
      }
      ++cases;
      if (p == Problem::WCC) {
        auto ag = accugraph_run(ng.graph, spec, ng.k, true);
        if (ag.sim.iterations > hg.sim.iterations) {
          std::ostringstream os;
          os << "wcc on " << ng.name << ": pull took " << ag.sim.iterations
             << " iterations, scatter/gather " << hg.sim.iterations;
          return {kExitFail, os.str()};
        }
        ++cases;
      }
    }
  }
  std::ostringstream os;
  os << cases << " iteration-count checks hold";
  return {kExitPass, os.str()};
}

// --- criterion 3: memory-model properties ----------------------------------------

struct NullSink : CompletionSink {
  void on_complete(const MemRequest&) override {}
};

// Streams `lines` cache-line reads through channel 0 and returns
// (bytes per memory cycle, total cycles).
std::pair<double, uint64_t> stream_bandwidth(DramSim& sim, const std::vector<uint64_t>& addrs) {
  NullSink sink;
  size_t sent = 0, done = 0;
  while (done < addrs.size()) {
    while (sent < addrs.size() && sim.enqueue({addrs[sent], false, &sink, sent})) ++sent;
    done += sim.tick().size();
  }
  const double bytes = static_cast<double>(addrs.size()) * DramTimings::kLineBytes;
  return {bytes / static_cast<double>(sim.cycle()), sim.cycle()};
}

Verdict criterion_dram() {
  // One DDR3 channel isolates the properties; DDR4 bank-group timing caps a
  // strictly sequential single-channel stream at tCCD_L instead of the burst.
  DramConfig cfg = hitgraph_dram(1);
  const double peak = 16.0;  // 64 bytes per BL8 burst of 4 cycles

  // Read latency on an idle device: at least the CAS latency plus the burst.
  {
    DramSim sim(cfg);
    NullSink sink;
    sim.enqueue({0, false, &sink, 0});
    while (!sim.idle()) {
      if (!sim.tick().empty()) break;
    }
    const uint64_t latency = sim.cycle();
    const uint64_t floor = static_cast<uint64_t>(sim.timings().tCL) + DramTimings::kBurstCycles;
    if (latency < floor) {
      std::ostringstream os;
      os << "idle read latency " << latency << " < tCL + burst = " << floor;
      return {kExitFail, os.str()};
    }
  }

  // Sequential stream: near-peak bandwidth.
  double sequential_bw = 0.0;
  {
    DramSim sim(cfg);
    std::vector<uint64_t> addrs;
    for (uint64_t i = 0; i < 4096; ++i) addrs.push_back(sim.make_address(0, i));
    auto [bw, cycles] = stream_bandwidth(sim, addrs);
    (void)cycles;
    sequential_bw = bw;
    if (bw > peak) {
      return {kExitFail, "sequential bandwidth " + std::to_string(bw) + " exceeds peak"};
    }
    if (bw < 0.9 * peak) {
      std::ostringstream os;
      os << "sequential bandwidth " << bw << " B/cycle < 90% of peak " << peak;
      return {kExitFail, os.str()};
    }
  }

  // Random same-bank row-conflict stream: a small fraction of sequential.
  {
    DramSim sim(cfg);
    // Collect one line address per row, all in the first bank of channel 0.
    std::vector<uint64_t> addrs;
    const auto first = sim.map_address(sim.make_address(0, 0));
    for (uint64_t i = 0; addrs.size() < 1024 && i < 1u << 22; ++i) {
      uint64_t a = sim.make_address(0, i);
      DramCoord c = sim.map_address(a);
      if (c.rank == first.rank && c.bank_group == first.bank_group && c.bank == first.bank &&
          c.row == addrs.size()) {
        addrs.push_back(a);
      }
    }
    if (addrs.size() < 64) return {kExitFail, "could not build a row-conflict stream"};
    auto [bw, cycles] = stream_bandwidth(sim, addrs);
    (void)cycles;
    if (bw > peak) {
      return {kExitFail, "conflict-stream bandwidth " + std::to_string(bw) + " exceeds peak"};
    }
    if (bw >= 0.3 * sequential_bw) {
      std::ostringstream os;
      os << "row-conflict bandwidth " << bw << " not below 30% of sequential " << sequential_bw;
      return {kExitFail, os.str()};
    }
  }

  // Address mapping is a bijection on a small geometry.
  {
    DramConfig small = accugraph_dram();  // DDR4: exercises the bank-group bits
    small.channels = 2;
    small.ranks = 2;
    DramOrg org;
    org.bank_groups = 2;
    org.banks_per_group = 2;
    org.rows = 8;
    org.columns = 32;
    DramSim sim(small, DramTimings{}, org);
    const uint64_t lines = sim.capacity_bytes() / DramTimings::kLineBytes;
    std::set<std::tuple<int, int, int, int, uint64_t, uint64_t>> seen;
    for (uint64_t line = 0; line < lines; ++line) {
      DramCoord c = sim.map_address(line * DramTimings::kLineBytes);
      if (c.channel >= small.channels || c.rank >= small.ranks || c.bank_group >= org.bank_groups ||
          c.bank >= org.banks_per_group || c.row >= org.rows || c.column >= org.lines_per_row()) {
        return {kExitFail, "mapped coordinate out of range at line " + std::to_string(line)};
      }
      seen.insert({c.channel, c.rank, c.bank_group, c.bank, c.row, c.column});
    }
    if (seen.size() != lines) {
      std::ostringstream os;
      os << "mapping not injective: " << seen.size() << " coordinates for " << lines << " lines";
      return {kExitFail, os.str()};
    }
  }

  std::ostringstream os;
  os << "latency floor, bandwidth bounds (sequential " << sequential_bw
     << " B/cycle), and bijective mapping hold";
  return {kExitPass, os.str()};
}

// --- criterion 4: desk-scale reproduction vs the published simulation --------------

Verdict criterion_reproduction() {
  struct Check {
    Accel a;
    Problem p;
    const char* graph;
    double tolerance;  // percent
  };
  std::vector<Check> checks;
  for (const char* g : {"slashdot", "dblp", "youtube", "wiki-talk"}) {
    for (Problem p : {Problem::BFS, Problem::PR, Problem::WCC}) {
      checks.push_back({Accel::AccuGraph, p, g, 20.0});
    }
  }
  for (const char* g : {"wiki-talk", "roadnet-ca", "berk-stan"}) {
    for (Problem p : {Problem::SpMV, Problem::PR, Problem::WCC}) {
      checks.push_back({Accel::HitGraph, p, g, 20.0});
    }
    checks.push_back({Accel::HitGraph, Problem::SSSP, g, 50.0});
  }

  int ran = 0, missing = 0;
  std::vector<std::string> failures;
  for (const Check& c : checks) {
    auto info = dataset_info(c.graph);
    auto truth = ground_truth(c.a, c.p, info->abbr);
    auto g = load_dataset(c.graph, c.a == Accel::HitGraph);
    if (!g) {
      ++missing;
      continue;
    }
    ExperimentConfig cfg = reproduction_config(c.a, c.p, c.graph, g->n);
    cfg.graph_name = c.graph;
    auto records = run_experiment(cfg, *g);
    double s = 0.0;
    std::vector<double> runtimes;
    for (const ResultRecord& r : records) {
      s += c.a == Accel::HitGraph ? r.runtime_s : r.greps;
      runtimes.push_back(r.runtime_s);
    }
    s /= static_cast<double>(records.size());
    const double err = percentage_error(s, truth->simulation);
    std::ostringstream os;
    os << accel_name(c.a) << " " << problem_name(c.p) << " " << c.graph << ": " << s << " vs "
       << truth->simulation << " (" << err << "% error)";
    if (c.a == Accel::HitGraph && c.p == Problem::SSSP) {
      os << ", CoV " << coefficient_of_variation(runtimes);
    }
    std::cout << "  " << os.str() << "\n";
    if (err > c.tolerance) failures.push_back(os.str());
    ++ran;
  }
  if (ran == 0) {
    return {kExitSkip, "no reproduction datasets under " + datasets_dir() + "/"};
  }
  if (!failures.empty()) {
    return {kExitFail, std::to_string(failures.size()) + " runs out of tolerance; first: " +
                           failures.front()};
  }
  std::ostringstream os;
  os << ran << " reproduction runs within tolerance";
  if (missing > 0) {
    os << "; SKIP: " << missing << " dataset runs unavailable";
    return {kExitSkip, os.str()};
  }
  return {kExitPass, os.str()};
}

// --- criterion 5: head-to-head comparison -------------------------------------------

Verdict criterion_comparability() {
  struct Case {
    std::string name;
    Graph graph;
    bool high_degree;
  };
  std::vector<Case> cases;
  cases.push_back({"sparse-2k", random_graph(2000, 5000, 7), false});
  cases.push_back({"medium-1k", random_graph(1000, 12000, 9), false});
  cases.push_back({"dense-500", random_graph(500, 20000, 11), true});
  cases.push_back({"dense-800", random_graph(800, 40000, 13), true});

  std::ostringstream detail;
  for (const Case& c : cases) {
    ExperimentConfig hg = comparability_config(Accel::HitGraph, Problem::WCC, c.name);
    ExperimentConfig ag = comparability_config(Accel::AccuGraph, Problem::WCC, c.name);
    auto rh = run_experiment(hg, c.graph);
    auto ra = run_experiment(ag, c.graph);
    const double factor = rh[0].runtime_s / ra[0].runtime_s;
    detail << " " << c.name << " x" << factor;
    if (ra[0].runtime_s >= rh[0].runtime_s) {
      std::ostringstream os;
      os << "pull model not faster on " << c.name << ": " << ra[0].runtime_s << " s vs "
         << rh[0].runtime_s << " s";
      return {kExitFail, os.str()};
    }
    if (c.high_degree && factor < 1.5) {
      std::ostringstream os;
      os << "factor " << factor << " < 1.5 on high-degree graph " << c.name;
      return {kExitFail, os.str()};
    }
  }
  return {kExitPass, "pull model faster on all graphs; factors:" + detail.str()};
}

// --- criterion 6: skipping optimizations ----------------------------------------------

Verdict criterion_optimizations() {
  int cases = 0;
  for (const NamedGraph& ng : small_suite()) {
    for (Problem p : {Problem::BFS, Problem::WCC}) {
      ProblemSpec spec = make_spec(p);
      auto on = accugraph_run(ng.graph, spec, ng.k, true);
      auto off = accugraph_run(ng.graph, spec, ng.k, false);
      if (static_cast<double>(on.sim.accel_cycles) >
          1.01 * static_cast<double>(off.sim.accel_cycles)) {
        std::ostringstream os;
        os << problem_name(p) << " on " << ng.name << ": skipping slows the run, "
           << on.sim.accel_cycles << " vs " << off.sim.accel_cycles << " cycles";
        return {kExitFail, os.str()};
      }
      ++cases;
    }
  }

  // On a single-partition graph every iteration beyond the first reuses the
  // prefetched values, so prefetch skipping must show up from iteration 2 on.
  Graph g = random_graph(512, 2048, 21);
  ProblemSpec spec = make_spec(Problem::WCC);
  auto on = accugraph_run(g, spec, g.n, true);
  auto off = accugraph_run(g, spec, g.n, false);
  if (on.sim.iterations < 2) return {kExitFail, "single-partition probe converged too fast"};
  if (on.prefetches != 1 || off.prefetches != static_cast<uint64_t>(off.sim.iterations)) {
    return {kExitFail, "prefetch counters do not reflect skipping"};
  }
  if (on.sim.accel_cycles >= off.sim.accel_cycles) {
    std::ostringstream os;
    os << "no prefetch-skipping gain: " << on.sim.accel_cycles << " vs " << off.sim.accel_cycles
       << " cycles";
    return {kExitFail, os.str()};
  }
  std::ostringstream os;
  os << cases << " runs never slowed; single-partition prefetch skipping saves "
     << off.sim.accel_cycles - on.sim.accel_cycles << " cycles over " << on.sim.iterations
     << " iterations";
  return {kExitPass, os.str()};
}

// --- criterion 7: throughput grows with average degree -----------------------------------

Verdict criterion_degree_trend() {
  const bool large = std::getenv("GRAPHMEM_LARGE") != nullptr;
  std::vector<std::string> names = {"youtube", "slashdot"};
  if (large) {
    names.push_back("live-journal");
    names.push_back("orkut");
  }
  std::vector<std::pair<double, double>> points;  // (avg degree, GREPS)
  int missing = 0;
  for (const std::string& name : names) {
    auto g = load_dataset(name, false);
    if (!g) {
      ++missing;
      continue;
    }
    ExperimentConfig cfg = reproduction_config(Accel::AccuGraph, Problem::WCC, name, g->n);
    cfg.graph_name = name;
    auto records = run_experiment(cfg, *g);
    points.emplace_back(dataset_info(name)->avg_degree, records[0].greps);
  }
  if (points.size() < 2) {
    return {kExitSkip, "degree-trend datasets not under " + datasets_dir() + "/"};
  }
  std::sort(points.begin(), points.end());
  for (size_t i = 1; i < points.size(); ++i) {
    if (points[i].second < 0.95 * points[i - 1].second) {
      std::ostringstream os;
      os << "throughput drops with degree: " << points[i - 1].second << " GREPS at degree "
         << points[i - 1].first << " vs " << points[i].second << " at " << points[i].first;
      return {kExitFail, os.str()};
    }
  }
  std::ostringstream os;
  os << "nondecreasing over " << points.size() << " graphs";
  if (missing > 0) {
    os << "; SKIP: " << missing << " datasets unavailable";
    return {kExitSkip, os.str()};
  }
  return {kExitPass, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <1..7>\n";
    return kExitFail;
  }
  const int criterion = std::atoi(argv[1]);
  static const char* kTitles[] = {
      "",
      "final values match the reference solvers",
      "iteration counts reproduce the oracles",
      "memory-model timing properties",
      "desk-scale reproduction of the published results",
      "pull model beats scatter/gather on comparable memory",
      "skipping optimizations never slow a run",
      "throughput grows with average degree",
  };
  if (criterion < 1 || criterion > 7) {
    std::cerr << "usage: acceptance <1..7>\n";
    return kExitFail;
  }

  Verdict v;
  try {
    switch (criterion) {
      case 1: v = criterion_values(); break;
      case 2: v = criterion_iterations(); break;
      case 3: v = criterion_dram(); break;
      case 4: v = criterion_reproduction(); break;
      case 5: v = criterion_comparability(); break;
      case 6: v = criterion_optimizations(); break;
      case 7: v = criterion_degree_trend(); break;
    }
  } catch (const std::exception& e) {
    v = {kExitFail, std::string("exception: ") + e.what()};
  }
  const char* status = v.exit_code == kExitPass   ? "PASS"
                       : v.exit_code == kExitSkip ? "SKIP"
                                                  : "FAIL";
  std::cout << "criterion " << criterion << " (" << kTitles[criterion] << "): " << status << " — "
            << v.message << "\n";
  return v.exit_code;
}
