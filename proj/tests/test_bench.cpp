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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "graphmem/bench.hpp"
#include "test_fixtures.hpp"

using namespace graphmem;
using namespace graphmem::testing;

TEST_CASE("bench: metric formulas") {
  // REPS = m * i / r, GREPS scales by 1e9.
  CHECK(compute_reps(1'000'000, 3, 2.0) == doctest::Approx(1.5e6));
  CHECK(compute_reps(10, 1, 1.0) == doctest::Approx(10.0));

  // e = 100 * |s - t| / t, relative to the measured truth.
  CHECK(percentage_error(1.14, 1.0) == doctest::Approx(14.0));
  CHECK(percentage_error(0.86, 1.0) == doctest::Approx(14.0));
  CHECK(percentage_error(2.0, 2.0) == doctest::Approx(0.0));

  // Population sigma / mu: {1, 3} has mu 2 and sigma 1.
  CHECK(coefficient_of_variation({1.0, 3.0}) == doctest::Approx(0.5));
  CHECK(coefficient_of_variation({5.0, 5.0, 5.0}) == doctest::Approx(0.0));
  CHECK(coefficient_of_variation({}) == doctest::Approx(0.0));
}

TEST_CASE("bench: accelerator names round-trip") {
  CHECK(accel_from_name(accel_name(Accel::HitGraph)) == Accel::HitGraph);
  CHECK(accel_from_name(accel_name(Accel::AccuGraph)) == Accel::AccuGraph);
  CHECK_THROWS(accel_from_name("tesseract"));
}

TEST_CASE("bench: published reference numbers") {
  auto hg = ground_truth(Accel::HitGraph, Problem::WCC, "wt");
  REQUIRE(hg.has_value());
  CHECK(hg->truth == doctest::Approx(0.0460));
  CHECK(hg->simulation == doctest::Approx(0.0461));

  auto ag = ground_truth(Accel::AccuGraph, Problem::WCC, "wt");
  REQUIRE(ag.has_value());
  CHECK(ag->truth == doctest::Approx(1.729));
  CHECK(ag->simulation == doctest::Approx(1.532));

  auto bfs = ground_truth(Accel::AccuGraph, Problem::BFS, "sd");
  REQUIRE(bfs.has_value());
  CHECK(bfs->truth == doctest::Approx(2.867));
  CHECK(bfs->simulation == doctest::Approx(2.880));

  // The scatter/gather study has no BFS column; the pull study has no SpMV.
  CHECK_FALSE(ground_truth(Accel::HitGraph, Problem::BFS, "wt").has_value());
  CHECK_FALSE(ground_truth(Accel::AccuGraph, Problem::SpMV, "wt").has_value());
  CHECK_FALSE(ground_truth(Accel::HitGraph, Problem::WCC, "zz").has_value());

  // 7 graphs x 4 problems + 6 graphs x 3 problems.
  int rows = 0;
  for (Accel a : {Accel::HitGraph, Accel::AccuGraph}) {
    for (Problem p : {Problem::SpMV, Problem::PR, Problem::SSSP, Problem::WCC, Problem::BFS}) {
      for (const DatasetInfo& d : dataset_catalog()) {
        if (ground_truth(a, p, d.abbr)) ++rows;
      }
    }
  }
  CHECK(rows == 28 + 18);
}

TEST_CASE("bench: dataset catalog") {
  CHECK(dataset_catalog().size() == 11);

  auto wt = dataset_info("wiki-talk");
  REQUIRE(wt.has_value());
  CHECK(wt->abbr == "wt");
  CHECK(wt->n == 2'394'385);
  CHECK(wt->m == 5'021'410);
  CHECK(wt->directed);
  CHECK_FALSE(wt->large);

  auto tw = dataset_info("tw");
  REQUIRE(tw.has_value());
  CHECK(tw->name == "twitter");
  CHECK(tw->m == 1'468'364'884);
  CHECK(tw->large);

  auto rd = dataset_info("rd");
  REQUIRE(rd.has_value());
  CHECK_FALSE(rd->directed);

  CHECK_FALSE(dataset_info("nonexistent").has_value());

  // Stated average degrees match m / n (2m / n when undirected) to the
  // printed precision.
  for (const DatasetInfo& d : dataset_catalog()) {
    const double computed =
        (d.directed ? 1.0 : 2.0) * static_cast<double>(d.m) / static_cast<double>(d.n);
    CHECK(std::abs(computed - d.avg_degree) < 0.3);
  }
}

TEST_CASE("bench: reproduction profiles") {
  ExperimentConfig hg = reproduction_config(Accel::HitGraph, Problem::SSSP, "wiki-talk", 2'394'385);
  CHECK(hg.dram.standard == DramStandard::DDR3);
  CHECK(hg.dram.channels == 4);
  CHECK(hg.dram.ranks == 2);
  CHECK(hg.dram.speed_grade == "1600K");
  CHECK(hg.hitgraph.p == 4);
  CHECK(hg.hitgraph.q == 8);
  CHECK(hg.hitgraph.weighted);
  CHECK(hg.partition_vertices == 256'000);
  CHECK(hg.problem.value_width_bits == 32);
  CHECK(hg.roots.random_count == 20);
  CHECK(hg.roots.seed == kRootSeed);
  CHECK_THROWS_AS((void)reproduction_config(Accel::HitGraph, Problem::BFS, "wiki-talk", 1),
                  std::invalid_argument);

  ExperimentConfig bfs = reproduction_config(Accel::AccuGraph, Problem::BFS, "slashdot", 82'168);
  CHECK(bfs.dram.standard == DramStandard::DDR4);
  CHECK(bfs.dram.channels == 1);
  CHECK(bfs.dram.ranks == 1);
  CHECK(bfs.dram.speed_grade == "2400R");
  CHECK(bfs.dram.organization == "4Gb_x16");
  CHECK(bfs.accugraph.vertex_pipelines == 8);
  CHECK(bfs.accugraph.edge_pipelines == 16);
  CHECK(bfs.problem.value_width_bits == 8);
  CHECK(bfs.partition_vertices == 0);  // whole graph in one partition
  CHECK(bfs.roots.fixed == std::vector<VertexId>{0});

  ExperimentConfig pr = reproduction_config(Accel::AccuGraph, Problem::PR, "orkut", 3'072'627);
  CHECK(pr.problem.value_width_bits == 32);
  CHECK(pr.partition_vertices == 1'700'000);
  ExperimentConfig prs = reproduction_config(Accel::AccuGraph, Problem::PR, "slashdot", 82'168);
  CHECK(prs.partition_vertices == 0);
  CHECK_THROWS_AS((void)reproduction_config(Accel::AccuGraph, Problem::SSSP, "slashdot", 1),
                  std::invalid_argument);
}

TEST_CASE("bench: comparability profile") {
  for (Accel a : {Accel::HitGraph, Accel::AccuGraph}) {
    ExperimentConfig cfg = comparability_config(a, Problem::WCC, "wiki-talk");
    CHECK(cfg.dram.standard == DramStandard::DDR4);
    CHECK(cfg.dram.channels == 1);
    CHECK(cfg.dram.organization == "8Gb_x16");
    CHECK(cfg.partition_vertices == 1'024'000);
    CHECK(cfg.problem.value_width_bits == 32);
  }
  ExperimentConfig hg = comparability_config(Accel::HitGraph, Problem::BFS, "wiki-talk");
  CHECK(hg.hitgraph.p == 1);
  CHECK(hg.hitgraph.q == 16);
  CHECK_FALSE(hg.hitgraph.weighted);
  CHECK(hg.problem.value_width_bits == 32);  // BFS also runs at full width here
  CHECK_THROWS_AS((void)comparability_config(Accel::HitGraph, Problem::SpMV, "wiki-talk"),
                  std::invalid_argument);
}

namespace {

ExperimentConfig toy_config(Accel a, Problem p) {
  ExperimentConfig cfg;
  cfg.accelerator = a;
  cfg.problem.problem = p;
  cfg.graph_name = "toy";
  cfg.partition_vertices = 64;
  if (a == Accel::HitGraph) {
    cfg.dram.channels = cfg.hitgraph.p;
    cfg.hitgraph.weighted = false;
  } else {
    cfg.dram.standard = DramStandard::DDR4;
    cfg.dram.speed_grade = "2400R";
    cfg.dram.organization = "4Gb_x16";
  }
  return cfg;
}

}  // namespace

TEST_CASE("bench: run_experiment record shape") {
  Graph g = random_graph(128, 512, 11);
  ExperimentConfig cfg = toy_config(Accel::AccuGraph, Problem::BFS);
  cfg.roots.fixed = {0, 5, 9};
  cfg.repetitions = 2;

  auto records = run_experiment(cfg, g);
  REQUIRE(records.size() == 6);
  CHECK(records[0].root == 0);
  CHECK(records[1].root == 0);
  CHECK(records[2].root == 5);
  CHECK(records[5].root == 9);
  for (const ResultRecord& r : records) {
    CHECK(r.accelerator == "accugraph");
    CHECK(r.problem == "bfs");
    CHECK(r.graph == "toy");
    CHECK(r.iterations >= 1);
    CHECK(r.cycles > 0);
    CHECK(r.runtime_s > 0.0);
    CHECK(r.greps == doctest::Approx(compute_reps(g.m, r.iterations, r.runtime_s) / 1e9));
    CHECK(r.bytes_read > 0);
  }
  // Repetitions of a deterministic simulation agree exactly.
  CHECK(records[0].cycles == records[1].cycles);
  CHECK(coefficient_of_variation({records[0].runtime_s, records[1].runtime_s}) ==
        doctest::Approx(0.0));
}

TEST_CASE("bench: random roots follow the seeded generator") {
  Graph g = random_graph(100, 400, 23);
  ExperimentConfig cfg = toy_config(Accel::AccuGraph, Problem::BFS);
  cfg.roots.random_count = 4;
  cfg.roots.seed = 99;

  auto records = run_experiment(cfg, g);
  REQUIRE(records.size() == 4);
  auto expect = pick_roots(g.n, 4, 99);
  for (size_t i = 0; i < 4; ++i) CHECK(records[i].root == expect[i]);
}

TEST_CASE("bench: run_experiments keeps config order") {
  Graph a = random_graph(64, 256, 7);
  Graph b = random_graph(96, 300, 8);
  ExperimentConfig ca = toy_config(Accel::AccuGraph, Problem::WCC);
  ca.graph_name = "a";
  ExperimentConfig cb = toy_config(Accel::HitGraph, Problem::WCC);
  cb.graph_name = "b";

  auto batched = run_experiments({ca, cb, ca}, {&a, &b, &a}, 3);
  REQUIRE(batched.size() == 3);
  CHECK(batched[0][0].graph == "a");
  CHECK(batched[1][0].graph == "b");
  CHECK(batched[1][0].accelerator == "hitgraph");
  // Same config, same graph: identical results independent of scheduling.
  CHECK(batched[0][0].cycles == batched[2][0].cycles);
  CHECK(batched[0][0].cycles == run_experiment(ca, a)[0].cycles);
}

TEST_CASE("bench: csv and json emission") {
  Graph g = random_graph(64, 200, 5);
  ExperimentConfig cfg = toy_config(Accel::AccuGraph, Problem::WCC);
  auto records = run_experiment(cfg, g);

  std::ostringstream csv;
  write_csv(records, csv);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "accelerator,problem,graph,root,iterations,cycles,runtime_s,greps,"
        "row_hits,row_misses,row_conflicts,bytes_read,bytes_written");
  int count = 0;
  std::string row;
  while (std::getline(lines, row)) ++count;
  CHECK(count == static_cast<int>(records.size()));

  std::stringstream json;
  write_json(records, json);
  auto parsed = read_json(json);
  REQUIRE(parsed.size() == records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(parsed[i].accelerator == records[i].accelerator);
    CHECK(parsed[i].problem == records[i].problem);
    CHECK(parsed[i].cycles == records[i].cycles);
    CHECK(parsed[i].runtime_s == doctest::Approx(records[i].runtime_s));
    CHECK(parsed[i].bytes_written == records[i].bytes_written);
  }
}

TEST_CASE("bench: degree plot data") {
  ResultRecord r;
  r.graph = "wiki-talk";
  r.greps = 1.5;
  std::ostringstream out;
  write_degree_plot({r}, out);
  CHECK(out.str() == "graph,avg_degree,greps\nwiki-talk,2.1,1.5\n");
}

TEST_CASE("bench: experiment config parsing") {
  std::istringstream in(R"(# full experiment description
accelerator = "hitgraph"
problem = "sssp"
graph = "wiki-talk"
dataset = "data/wiki-talk.el"
repetitions = 2
partition_vertices = 256000
accel_mhz = 150.0
value_width_bits = 32
root_count = 20
root_seed = 3483584297

[dram]
standard = "DDR3"  # trailing comment
channels = 4
ranks = 2
speed_grade = "1600K"
organization = "8Gb_x16"

[hitgraph]
p = 4
q = 8
weighted = true
update_merging = false
)");
  ExperimentConfig cfg = parse_experiment_toml(in);
  CHECK(cfg.accelerator == Accel::HitGraph);
  CHECK(cfg.problem.problem == Problem::SSSP);
  CHECK(cfg.graph_name == "wiki-talk");
  CHECK(cfg.dataset == "data/wiki-talk.el");
  CHECK(cfg.repetitions == 2);
  CHECK(cfg.partition_vertices == 256'000);
  CHECK(cfg.accel_mhz == doctest::Approx(150.0));
  CHECK(cfg.roots.random_count == 20);
  CHECK(cfg.roots.seed == kRootSeed);
  CHECK(cfg.dram.standard == DramStandard::DDR3);
  CHECK(cfg.dram.channels == 4);
  CHECK(cfg.dram.ranks == 2);
  CHECK(cfg.hitgraph.p == 4);
  CHECK(cfg.hitgraph.weighted);
  CHECK_FALSE(cfg.hitgraph.opts.update_merging);
  CHECK(cfg.hitgraph.value_width_bits == 32);

  std::istringstream roots(R"(
accelerator = "accugraph"
problem = "bfs"
value_width_bits = 8
roots = [1, 2, 3]
[accugraph]
edge_pipelines = 8
prefetch_skipping = false
)");
  ExperimentConfig ag = parse_experiment_toml(roots);
  CHECK(ag.accelerator == Accel::AccuGraph);
  CHECK(ag.roots.fixed == std::vector<VertexId>{1, 2, 3});
  CHECK(ag.accugraph.edge_pipelines == 8);
  CHECK_FALSE(ag.accugraph.opts.prefetch_skipping);
  CHECK(ag.accugraph.value_width_bits == 8);

  std::istringstream bad1("accelerator = \"hitgraph\"\nbogus_key = 1\n");
  CHECK_THROWS(parse_experiment_toml(bad1));
  std::istringstream bad2("accelerator\n");
  CHECK_THROWS(parse_experiment_toml(bad2));
  std::istringstream bad3("[dram\nchannels = 1\n");
  CHECK_THROWS(parse_experiment_toml(bad3));
  CHECK_THROWS(load_experiment_toml("/nonexistent/experiment.toml"));
}

TEST_CASE("bench: comparability run on a toy graph") {
  Graph g = random_graph(200, 900, 17);
  ExperimentConfig hg = comparability_config(Accel::HitGraph, Problem::WCC, "toy");
  ExperimentConfig ag = comparability_config(Accel::AccuGraph, Problem::WCC, "toy");
  hg.dram.channels = hg.hitgraph.p;  // hold for any p

  auto rh = run_experiment(hg, g);
  auto ra = run_experiment(ag, g);
  REQUIRE(rh.size() == 1);
  REQUIRE(ra.size() == 1);
  CHECK(rh[0].runtime_s > 0.0);
  CHECK(ra[0].runtime_s > 0.0);
  // Identical memory system for both accelerators.
  CHECK(hg.dram.standard == ag.dram.standard);
  CHECK(hg.dram.organization == ag.dram.organization);
  // The pull model needs fewer passes than scatter/gather on WCC.
  CHECK(ra[0].iterations <= rh[0].iterations);
}
