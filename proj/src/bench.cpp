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

#include "graphmem/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <variant>

namespace graphmem {

const char* accel_name(Accel a) { return a == Accel::HitGraph ? "hitgraph" : "accugraph"; }

Accel accel_from_name(const std::string& name) {
  if (name == "hitgraph") return Accel::HitGraph;
  if (name == "accugraph") return Accel::AccuGraph;
  throw std::runtime_error("unknown accelerator: " + name);
}

// --- metrics -----------------------------------------------------------------

double compute_reps(uint64_t m, int iterations, double runtime_s) {
  return static_cast<double>(m) * iterations / runtime_s;
}

double percentage_error(double simulated, double truth) {
  return 100.0 * std::abs(simulated - truth) / truth;
}

double coefficient_of_variation(const std::vector<double>& samples) {
  if (samples.empty()) return 0.0;
  double mu = 0.0;
  for (double s : samples) mu += s;
  mu /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mu) * (s - mu);
  var /= static_cast<double>(samples.size());
  return std::sqrt(var) / mu;
}

// --- published reference numbers ----------------------------------------------

namespace {

struct TruthRow {
  Accel a;
  Problem p;
  const char* graph;
  double truth;
  double simulation;
};

// Scatter/gather accelerator, runtimes in seconds.
// Pull accelerator, throughput in GREPS.
const TruthRow kTruth[] = {
    {Accel::HitGraph, Problem::SpMV, "bk", 0.0032, 0.0026},
    {Accel::HitGraph, Problem::SpMV, "wt", 0.0050, 0.0066},
    {Accel::HitGraph, Problem::SpMV, "rd", 0.0028, 0.0027},
    {Accel::HitGraph, Problem::SpMV, "lj", 0.0362, 0.0411},
    {Accel::HitGraph, Problem::SpMV, "tw", 0.6525, 0.8184},
    {Accel::HitGraph, Problem::SpMV, "r21", 0.0567, 0.0484},
    {Accel::HitGraph, Problem::SpMV, "r24", 0.1435, 0.0770},
    {Accel::HitGraph, Problem::PR, "bk", 0.0030, 0.0026},
    {Accel::HitGraph, Problem::PR, "wt", 0.0045, 0.0066},
    {Accel::HitGraph, Problem::PR, "rd", 0.0027, 0.0027},
    {Accel::HitGraph, Problem::PR, "lj", 0.0327, 0.0411},
    {Accel::HitGraph, Problem::PR, "tw", 0.5904, 0.8184},
    {Accel::HitGraph, Problem::PR, "r21", 0.0534, 0.0484},
    {Accel::HitGraph, Problem::PR, "r24", 0.1403, 0.0770},
    {Accel::HitGraph, Problem::SSSP, "bk", 0.7824, 1.2554},
    {Accel::HitGraph, Problem::SSSP, "wt", 0.0255, 0.0027},
    {Accel::HitGraph, Problem::SSSP, "rd", 1.1133, 1.3436},
    {Accel::HitGraph, Problem::SSSP, "lj", 0.5921, 0.3872},
    {Accel::HitGraph, Problem::SSSP, "tw", 5.5768, 6.2380},
    {Accel::HitGraph, Problem::SSSP, "r21", 0.9671, 0.0725},
    {Accel::HitGraph, Problem::SSSP, "r24", 0.9213, 0.1111},
    {Accel::HitGraph, Problem::WCC, "bk", 1.7690, 1.8578},
    {Accel::HitGraph, Problem::WCC, "wt", 0.0460, 0.0461},
    {Accel::HitGraph, Problem::WCC, "rd", 1.4800, 1.4526},
    {Accel::HitGraph, Problem::WCC, "lj", 0.4130, 0.4694},
    {Accel::HitGraph, Problem::WCC, "tw", 6.6170, 9.4139},
    {Accel::HitGraph, Problem::WCC, "r21", 0.4500, 0.4653},
    {Accel::HitGraph, Problem::WCC, "r24", 1.1080, 0.9307},
    {Accel::AccuGraph, Problem::BFS, "sd", 2.867, 2.880},
    {Accel::AccuGraph, Problem::BFS, "db", 2.397, 2.515},
    {Accel::AccuGraph, Problem::BFS, "yt", 1.899, 2.530},
    {Accel::AccuGraph, Problem::BFS, "wt", 1.653, 1.999},
    {Accel::AccuGraph, Problem::BFS, "lj", 3.370, 2.946},
    {Accel::AccuGraph, Problem::BFS, "or", 3.638, 3.192},
    {Accel::AccuGraph, Problem::PR, "sd", 2.242, 2.518},
    {Accel::AccuGraph, Problem::PR, "db", 1.931, 1.944},
    {Accel::AccuGraph, Problem::PR, "yt", 1.560, 1.978},
    {Accel::AccuGraph, Problem::PR, "wt", 1.318, 1.283},
    {Accel::AccuGraph, Problem::PR, "lj", 1.921, 1.926},
    {Accel::AccuGraph, Problem::PR, "or", 2.587, 2.920},
    {Accel::AccuGraph, Problem::WCC, "sd", 2.950, 2.634},
    {Accel::AccuGraph, Problem::WCC, "db", 2.468, 2.183},
    {Accel::AccuGraph, Problem::WCC, "yt", 1.954, 2.284},
    {Accel::AccuGraph, Problem::WCC, "wt", 1.729, 1.532},
    {Accel::AccuGraph, Problem::WCC, "lj", 2.407, 2.254},
    {Accel::AccuGraph, Problem::WCC, "or", 3.365, 2.998},
};

const std::vector<DatasetInfo> kDatasets = {
    {"live-journal", "lj", 4847571, 68993773, 14.23, true, true},
    {"wiki-talk", "wt", 2394385, 5021410, 2.10, true, false},
    {"twitter", "tw", 41652230, 1468364884, 35.25, true, true},
    {"rmat-24-16", "r24", 16777216, 268435456, 16.00, true, true},
    {"rmat-21-86", "r21", 2097152, 180355072, 86.00, true, true},
    {"roadnet-ca", "rd", 1971281, 2766607, 2.81, false, false},
    {"berk-stan", "bk", 685231, 7600595, 11.09, true, false},
    {"orkut", "or", 3072627, 117185083, 76.28, false, true},
    {"youtube", "yt", 1157828, 2987624, 5.16, false, false},
    {"dblp", "db", 425957, 1049866, 4.93, false, false},
    {"slashdot", "sd", 82168, 948464, 11.54, true, false},
};

}  // namespace

std::optional<GroundTruth> ground_truth(Accel a, Problem p, const std::string& graph_abbr) {
  for (const TruthRow& row : kTruth) {
    if (row.a == a && row.p == p && graph_abbr == row.graph) {
      return GroundTruth{row.truth, row.simulation};
    }
  }
  return std::nullopt;
}

const std::vector<DatasetInfo>& dataset_catalog() { return kDatasets; }

std::optional<DatasetInfo> dataset_info(const std::string& name_or_abbr) {
  for (const DatasetInfo& d : kDatasets) {
    if (d.name == name_or_abbr || d.abbr == name_or_abbr) return d;
  }
  return std::nullopt;
}

// --- profiles ------------------------------------------------------------------

namespace {

DramConfig hitgraph_repro_dram() {
  DramConfig c;
  c.standard = DramStandard::DDR3;
  c.channels = 4;
  c.ranks = 2;
  c.speed_grade = "1600K";
  c.organization = "8Gb_x16";
  return c;
}

DramConfig accugraph_repro_dram() {
  DramConfig c;
  c.standard = DramStandard::DDR4;
  c.channels = 1;
  c.ranks = 1;
  c.speed_grade = "2400R";
  c.organization = "4Gb_x16";
  return c;
}

DramConfig comparability_dram() {
  DramConfig c = accugraph_repro_dram();
  c.organization = "8Gb_x16";
  return c;
}

}  // namespace

ExperimentConfig reproduction_config(Accel a, Problem p, const std::string& graph_name,
                                     uint64_t n) {
  ExperimentConfig cfg;
  cfg.accelerator = a;
  cfg.problem.problem = p;
  cfg.graph_name = graph_name;
  if (a == Accel::HitGraph) {
    if (p == Problem::BFS) {
      throw std::invalid_argument("reproduction profile: scatter/gather runs no BFS");
    }
    cfg.dram = hitgraph_repro_dram();
    cfg.hitgraph = HitGraphParams{};  // p=4, q=8, weighted, 32-bit values
    cfg.partition_vertices = 256'000;
    cfg.problem.value_width_bits = 32;
    if (p == Problem::SSSP) cfg.roots.random_count = 20;
  } else {
    if (p != Problem::BFS && p != Problem::PR && p != Problem::WCC) {
      throw std::invalid_argument("reproduction profile: pull model runs BFS, PR, WCC");
    }
    cfg.dram = accugraph_repro_dram();
    cfg.accugraph = AccuGraphParams{};
    const int width = p == Problem::BFS ? 8 : 32;
    cfg.accugraph.value_width_bits = width;
    cfg.problem.value_width_bits = width;
    // All vertices fit in BRAM except the two largest PR/WCC workloads.
    const bool big = graph_name == "live-journal" || graph_name == "lj" ||
                     graph_name == "orkut" || graph_name == "or";
    cfg.partition_vertices =
        (p != Problem::BFS && big) ? std::min<uint64_t>(1'700'000, n) : 0;
  }
  if (needs_root(p) && cfg.roots.random_count == 0) cfg.roots.fixed = {0};
  return cfg;
}

ExperimentConfig comparability_config(Accel a, Problem p, const std::string& graph_name) {
  if (p == Problem::SpMV) {
    throw std::invalid_argument("comparability profile: SpMV is not part of the study");
  }
  ExperimentConfig cfg;
  cfg.accelerator = a;
  cfg.problem.problem = p;
  cfg.problem.value_width_bits = 32;
  cfg.graph_name = graph_name;
  cfg.dram = comparability_dram();
  cfg.partition_vertices = 1'024'000;
  cfg.hitgraph.p = 1;
  cfg.hitgraph.q = 16;
  cfg.hitgraph.weighted = false;
  if (needs_root(p)) cfg.roots.fixed = {0};
  return cfg;
}

// --- execution -------------------------------------------------------------------

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config, const Graph& g) {
  const uint64_t k =
      config.partition_vertices == 0 ? std::max<uint64_t>(g.n, 1) : config.partition_vertices;

  std::vector<VertexId> roots;
  if (needs_root(config.problem.problem)) {
    if (!config.roots.fixed.empty()) {
      roots = config.roots.fixed;
    } else if (config.roots.random_count > 0) {
      roots = pick_roots(g.n, config.roots.random_count, config.roots.seed);
    } else {
      roots = {0};
    }
  } else {
    roots = {0};
  }

  // Prepared once; shared read-only across roots and repetitions.
  EdgeListPartitions parts;
  CsrPartitions csr;
  if (config.accelerator == Accel::HitGraph) {
    parts = partition_edge_list(g, k);
    if (config.hitgraph.opts.update_merging) {
      parts = sort_partition_edges_by_destination(std::move(parts));
    }
  } else {
    csr = build_partitioned_csr(g, k);
  }

  EngineConfig engine_config;
  engine_config.accel_mhz = config.accel_mhz;

  std::vector<ResultRecord> records;
  for (VertexId root : roots) {
    for (int rep = 0; rep < config.repetitions; ++rep) {
      ProblemSpec spec = config.problem;
      if (needs_root(spec.problem)) spec.root = root;
      DramSim dram(config.dram);

      SimResult sim;
      if (config.accelerator == Accel::HitGraph) {
        HitGraphParams params = config.hitgraph;
        params.value_width_bits = spec.value_width_bits;
        sim = run_hitgraph(parts, spec, params, dram, engine_config).sim;
      } else {
        AccuGraphParams params = config.accugraph;
        params.value_width_bits = spec.value_width_bits;
        sim = run_accugraph(csr, spec, params, dram, engine_config).sim;
      }

      ResultRecord r;
      r.accelerator = accel_name(config.accelerator);
      r.problem = problem_name(spec.problem);
      r.graph = config.graph_name;
      r.root = needs_root(spec.problem) ? root : 0;
      r.iterations = sim.iterations;
      r.cycles = sim.accel_cycles;
      r.runtime_s = sim.runtime_s;
      r.greps = compute_reps(g.m, sim.iterations, sim.runtime_s) / 1e9;
      r.row_hits = sim.dram.row_hits;
      r.row_misses = sim.dram.row_misses;
      r.row_conflicts = sim.dram.row_conflicts;
      r.bytes_read = sim.dram.bytes_read;
      r.bytes_written = sim.dram.bytes_written;
      records.push_back(std::move(r));
    }
  }
  return records;
}

std::vector<std::vector<ResultRecord>> run_experiments(
    const std::vector<ExperimentConfig>& configs, const std::vector<const Graph*>& graphs,
    int threads) {
  if (configs.size() != graphs.size()) {
    throw std::invalid_argument("run_experiments: one graph per config required");
  }
  std::vector<std::vector<ResultRecord>> results(configs.size());
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(configs.size())));

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
      results[i] = run_experiment(configs[i], *graphs[i]);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

// --- emission ----------------------------------------------------------------------

namespace {
constexpr const char* kCsvHeader =
    "accelerator,problem,graph,root,iterations,cycles,runtime_s,greps,"
    "row_hits,row_misses,row_conflicts,bytes_read,bytes_written";
}

void write_csv(const std::vector<ResultRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const ResultRecord& r : records) {
    out << r.accelerator << ',' << r.problem << ',' << r.graph << ',' << r.root << ','
        << r.iterations << ',' << r.cycles << ',' << r.runtime_s << ',' << r.greps << ','
        << r.row_hits << ',' << r.row_misses << ',' << r.row_conflicts << ',' << r.bytes_read
        << ',' << r.bytes_written << '\n';
  }
}

void write_json(const std::vector<ResultRecord>& records, std::ostream& out) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ResultRecord& r : records) {
    arr.push_back({{"accelerator", r.accelerator},
                   {"problem", r.problem},
                   {"graph", r.graph},
                   {"root", r.root},
                   {"iterations", r.iterations},
                   {"cycles", r.cycles},
                   {"runtime_s", r.runtime_s},
                   {"greps", r.greps},
                   {"row_hits", r.row_hits},
                   {"row_misses", r.row_misses},
                   {"row_conflicts", r.row_conflicts},
                   {"bytes_read", r.bytes_read},
                   {"bytes_written", r.bytes_written}});
  }
  out << arr.dump(2) << '\n';
}

std::vector<ResultRecord> read_json(std::istream& in) {
  nlohmann::json arr = nlohmann::json::parse(in);
  std::vector<ResultRecord> records;
  for (const auto& j : arr) {
    ResultRecord r;
    r.accelerator = j.at("accelerator");
    r.problem = j.at("problem");
    r.graph = j.at("graph");
    r.root = j.at("root");
    r.iterations = j.at("iterations");
    r.cycles = j.at("cycles");
    r.runtime_s = j.at("runtime_s");
    r.greps = j.at("greps");
    r.row_hits = j.at("row_hits");
    r.row_misses = j.at("row_misses");
    r.row_conflicts = j.at("row_conflicts");
    r.bytes_read = j.at("bytes_read");
    r.bytes_written = j.at("bytes_written");
    records.push_back(std::move(r));
  }
  return records;
}

void write_degree_plot(const std::vector<ResultRecord>& records, std::ostream& out) {
  out << "graph,avg_degree,greps\n";
  for (const ResultRecord& r : records) {
    auto info = dataset_info(r.graph);
    const double deg = info ? info->avg_degree : 0.0;
    out << r.graph << ',' << deg << ',' << r.greps << '\n';
  }
}

// --- configuration files --------------------------------------------------------------

namespace {

struct TomlValue {
  std::variant<std::string, int64_t, double, bool, std::vector<int64_t>> v;
};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

TomlValue parse_value(const std::string& raw, int line_no) {
  const std::string text = trim(raw);
  if (text.empty()) throw std::runtime_error("config line " + std::to_string(line_no) + ": empty value");
  if (text.front() == '"') {
    size_t end = text.find('"', 1);
    if (end == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) + ": unterminated string");
    }
    return {text.substr(1, end - 1)};
  }
  if (text == "true") return {true};
  if (text == "false") return {false};
  if (text.front() == '[') {
    if (text.back() != ']') {
      throw std::runtime_error("config line " + std::to_string(line_no) + ": unterminated array");
    }
    std::vector<int64_t> items;
    std::stringstream ss(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) items.push_back(std::stoll(item));
    }
    return {items};
  }
  if (text.find('.') != std::string::npos || text.find('e') != std::string::npos) {
    return {std::stod(text)};
  }
  return {static_cast<int64_t>(std::stoll(text))};
}

int64_t as_int(const TomlValue& v) { return std::get<int64_t>(v.v); }
bool as_bool(const TomlValue& v) { return std::get<bool>(v.v); }
double as_double(const TomlValue& v) {
  if (std::holds_alternative<int64_t>(v.v)) return static_cast<double>(std::get<int64_t>(v.v));
  return std::get<double>(v.v);
}
const std::string& as_string(const TomlValue& v) { return std::get<std::string>(v.v); }

}  // namespace

ExperimentConfig parse_experiment_toml(std::istream& in) {
  std::map<std::string, TomlValue> kv;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::runtime_error("config line " + std::to_string(line_no) + ": bad section");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string full = section.empty() ? key : section + "." + key;
    kv.emplace(full, parse_value(line.substr(eq + 1), line_no));
  }

  ExperimentConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "accelerator") {
      cfg.accelerator = accel_from_name(as_string(value));
    } else if (key == "problem") {
      cfg.problem.problem = problem_from_name(as_string(value));
    } else if (key == "dataset") {
      cfg.dataset = as_string(value);
    } else if (key == "graph") {
      cfg.graph_name = as_string(value);
    } else if (key == "repetitions") {
      cfg.repetitions = static_cast<int>(as_int(value));
    } else if (key == "accel_mhz") {
      cfg.accel_mhz = as_double(value);
    } else if (key == "partition_vertices") {
      cfg.partition_vertices = static_cast<uint64_t>(as_int(value));
    } else if (key == "value_width_bits") {
      cfg.problem.value_width_bits = static_cast<int>(as_int(value));
    } else if (key == "max_iterations") {
      cfg.problem.max_iterations = static_cast<int>(as_int(value));
    } else if (key == "damping") {
      cfg.problem.damping = as_double(value);
    } else if (key == "initial_value") {
      cfg.problem.initial_value = as_double(value);
    } else if (key == "roots") {
      for (int64_t r : std::get<std::vector<int64_t>>(value.v)) {
        cfg.roots.fixed.push_back(static_cast<VertexId>(r));
      }
    } else if (key == "root_count") {
      cfg.roots.random_count = static_cast<int>(as_int(value));
    } else if (key == "root_seed") {
      cfg.roots.seed = static_cast<uint32_t>(as_int(value));
    } else if (key == "dram.standard") {
      const std::string& s = as_string(value);
      if (s == "DDR3") {
        cfg.dram.standard = DramStandard::DDR3;
      } else if (s == "DDR4") {
        cfg.dram.standard = DramStandard::DDR4;
      } else {
        throw std::runtime_error("unknown DRAM standard: " + s);
      }
    } else if (key == "dram.channels") {
      cfg.dram.channels = static_cast<int>(as_int(value));
    } else if (key == "dram.ranks") {
      cfg.dram.ranks = static_cast<int>(as_int(value));
    } else if (key == "dram.speed_grade") {
      cfg.dram.speed_grade = as_string(value);
    } else if (key == "dram.organization") {
      cfg.dram.organization = as_string(value);
    } else if (key == "hitgraph.p") {
      cfg.hitgraph.p = static_cast<int>(as_int(value));
    } else if (key == "hitgraph.q") {
      cfg.hitgraph.q = static_cast<int>(as_int(value));
    } else if (key == "hitgraph.weighted") {
      cfg.hitgraph.weighted = as_bool(value);
    } else if (key == "hitgraph.update_merging") {
      cfg.hitgraph.opts.update_merging = as_bool(value);
    } else if (key == "hitgraph.active_bitmap_filter") {
      cfg.hitgraph.opts.active_bitmap_filter = as_bool(value);
    } else if (key == "hitgraph.partition_skipping") {
      cfg.hitgraph.opts.partition_skipping = as_bool(value);
    } else if (key == "accugraph.vertex_pipelines") {
      cfg.accugraph.vertex_pipelines = static_cast<int>(as_int(value));
    } else if (key == "accugraph.edge_pipelines") {
      cfg.accugraph.edge_pipelines = static_cast<int>(as_int(value));
    } else if (key == "accugraph.vertex_pipeline_size") {
      cfg.accugraph.vertex_pipeline_size = static_cast<int>(as_int(value));
    } else if (key == "accugraph.edge_pipeline_size") {
      cfg.accugraph.edge_pipeline_size = static_cast<int>(as_int(value));
    } else if (key == "accugraph.bram_banks") {
      cfg.accugraph.bram_banks = static_cast<int>(as_int(value));
    } else if (key == "accugraph.prefetch_skipping") {
      cfg.accugraph.opts.prefetch_skipping = as_bool(value);
    } else if (key == "accugraph.partition_skipping") {
      cfg.accugraph.opts.partition_skipping = as_bool(value);
    } else {
      throw std::runtime_error("unknown config key: " + key);
    }
  }
  cfg.hitgraph.value_width_bits = cfg.problem.value_width_bits;
  cfg.accugraph.value_width_bits = cfg.problem.value_width_bits;
  return cfg;
}

ExperimentConfig load_experiment_toml(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return parse_experiment_toml(in);
}

}  // namespace graphmem
