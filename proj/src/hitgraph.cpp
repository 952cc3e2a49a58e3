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

#include "graphmem/hitgraph.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>

namespace graphmem {

namespace {

constexpr uint64_t align_line(uint64_t bytes) { return (bytes + 63) & ~uint64_t{63}; }

struct Update {
  VertexId dst = 0;
  double value = 0.0;
};

/// Drives one full run: scatter all partitions, barrier, gather all
/// partitions, barrier, repeat until no value changes.
class HitGraphController : public Controller {
 public:
  HitGraphController(const EdgeListPartitions& parts, const ProblemSpec& spec,
                     const HitGraphParams& params, DramSim& dram)
      : parts_(parts), spec_(spec), params_(params), dram_(dram) {
    k_ = parts.k;
    K_ = parts.K;
    n_ = parts.n;
    value_bytes_ = static_cast<uint32_t>(params.value_width_bits / 8);
    edge_bytes_ = params.weighted ? 12 : 8;
    sentinel_ = static_cast<double>(unreached_sentinel(params.value_width_bits));
    stationary_ = is_stationary(spec.problem);

    build_layout();
    init_state();
    build_topology();
  }

  void on_accel_tick(Engine& engine) override {
    switch (phase_) {
      case Phase::Scatter: {
        bool all_done = true;
        for (auto& ch : chans_) {
          advance_scatter(ch);
          all_done = all_done && ch.st == ChState::Done;
        }
        if (all_done) {
          for (auto& prod : update_prods_) prod->set_open(false);
          phase_ = Phase::ScatterBarrier;
        }
        break;
      }
      case Phase::ScatterBarrier:
        if (engine.quiescent()) start_gather();
        break;
      case Phase::Gather: {
        bool all_done = true;
        for (auto& ch : chans_) {
          advance_gather(ch);
          all_done = all_done && ch.st == ChState::Done;
        }
        if (all_done) phase_ = Phase::GatherBarrier;
        break;
      }
      case Phase::GatherBarrier:
        if (engine.quiescent()) finish_iteration();
        break;
      case Phase::Finished:
        break;
    }
  }

  bool done(const Engine&) const override { return phase_ == Phase::Finished; }
  const char* phase() const override {
    switch (phase_) {
      case Phase::Scatter:
      case Phase::ScatterBarrier: return "scatter";
      case Phase::Gather:
      case Phase::GatherBarrier: return "gather";
      default: return "done";
    }
  }
  int iterations() const override { return iterations_; }

  FlowNode* root() { return root_.get(); }
  std::vector<FlowNode*> nodes() {
    std::vector<FlowNode*> all;
    for (auto& n : owned_nodes_) all.push_back(n.get());
    return all;
  }
  const std::vector<double>& values() const { return values_; }
  const std::vector<uint64_t>& updates_per_iteration() const { return updates_per_iter_; }
  uint64_t scatter_partitions() const { return scatter_partitions_; }
  uint64_t gather_partitions() const { return gather_partitions_; }

 private:
  enum class Phase { Scatter, ScatterBarrier, Gather, GatherBarrier, Finished };
  enum class ChState { Idle, PrefetchWait, StreamWait, Done };

  struct Channel {
    int id = 0;
    std::vector<uint32_t> owned;  // partitions, ascending
    size_t idx = 0;
    ChState st = ChState::Idle;
    uint64_t expect = 0;
    uint64_t returned = 0;
    // Scatter-side merge window: consecutive same-destination updates fold
    // into one record before hitting the crossbar.
    bool has_pending = false;
    Update pending;
    uint32_t pending_part = 0;
    // Topology: reads (prefetch unbounded, streams rate-limited to q).
    JobProducer* prefetch = nullptr;
    JobProducer* stream = nullptr;
    JobProducer* value_writes = nullptr;
  };

  uint64_t interval_lo(uint32_t part) const { return part * k_; }
  uint64_t interval_size(uint32_t part) const {
    return std::min<uint64_t>(n_, (part + 1) * k_) - part * k_;
  }

  void build_layout() {
    channel_of_.resize(K_);
    value_off_.resize(K_);
    edge_off_.resize(K_);
    update_off_.resize(K_);
    std::vector<uint64_t> update_cap(K_, 0);
    for (const auto& pedges : parts_.parts) {
      for (const Edge& e : pedges) update_cap[e.dst / k_] += 1;
    }
    std::vector<uint64_t> cursor(params_.p, 0);
    for (uint32_t p = 0; p < K_; ++p) {
      channel_of_[p] = static_cast<int>(p % params_.p);
      value_off_[p] = cursor[channel_of_[p]];
      cursor[channel_of_[p]] += align_line(interval_size(p) * value_bytes_);
    }
    for (uint32_t p = 0; p < K_; ++p) {
      edge_off_[p] = cursor[channel_of_[p]];
      cursor[channel_of_[p]] += align_line(parts_.parts[p].size() * edge_bytes_);
    }
    for (uint32_t p = 0; p < K_; ++p) {
      update_off_[p] = cursor[channel_of_[p]];
      cursor[channel_of_[p]] += align_line(update_cap[p] * kUpdateBytes);
    }
    for (int c = 0; c < params_.p; ++c) {
      if (cursor[c] > dram_.channel_capacity_bytes()) {
        throw std::runtime_error("hitgraph: graph does not fit in channel " + std::to_string(c));
      }
    }
  }

  void init_state() {
    values_.assign(n_, 0.0);
    active_.assign(n_, false);
    changed_now_.assign(n_, false);
    part_active_count_.assign(K_, 0);
    queues_.resize(K_);

    if (stationary_) {
      double init = spec_.initial_value >= 0 ? spec_.initial_value : 1.0 / static_cast<double>(n_);
      std::fill(values_.begin(), values_.end(), init);
      std::fill(active_.begin(), active_.end(), true);
      for (uint32_t p = 0; p < K_; ++p) part_active_count_[p] = interval_size(p);
      if (spec_.problem == Problem::PR) {
        out_degree_.assign(n_, 0);
        for (const auto& pedges : parts_.parts) {
          for (const Edge& e : pedges) out_degree_[e.src] += 1;
        }
      }
    } else if (spec_.problem == Problem::WCC) {
      for (uint64_t v = 0; v < n_; ++v) values_[v] = static_cast<double>(v);
      std::fill(active_.begin(), active_.end(), true);
      for (uint32_t p = 0; p < K_; ++p) part_active_count_[p] = interval_size(p);
    } else {
      std::fill(values_.begin(), values_.end(), sentinel_);
      values_[*spec_.root] = 0.0;
      active_[*spec_.root] = true;
      part_active_count_[*spec_.root / k_] = 1;
    }
  }

  uint64_t physical(int channel, uint64_t local) const {
    return dram_.make_address(channel, local / 64) + local % 64;
  }

  void build_topology() {
    auto root = std::make_unique<Merger>("pe_merge", MergePolicy::RoundRobin);
    chans_.resize(params_.p);
    for (int c = 0; c < params_.p; ++c) {
      Channel& ch = chans_[c];
      ch.id = c;
      auto translate = [this, c](uint64_t local) { return physical(c, local); };
      auto prefetch = std::make_unique<JobProducer>("pe" + std::to_string(c) + ".prefetch");
      prefetch->set_translator(translate);
      auto stream =
          std::make_unique<JobProducer>("pe" + std::to_string(c) + ".stream", params_.q);
      stream->set_translator(translate);
      auto reads = std::make_unique<Merger>("pe" + std::to_string(c) + ".reads",
                                            MergePolicy::Direct);
      reads->add_input(prefetch.get());
      reads->add_input(stream.get());
      auto read_clb =
          std::make_unique<CacheLineBuffer>("pe" + std::to_string(c) + ".read_lines", reads.get());
      auto writes = std::make_unique<JobProducer>("pe" + std::to_string(c) + ".value_writes");
      writes->set_translator(translate);
      auto write_clb = std::make_unique<CacheLineBuffer>(
          "pe" + std::to_string(c) + ".value_write_lines", writes.get());
      ch.prefetch = prefetch.get();
      ch.stream = stream.get();
      ch.value_writes = writes.get();
      root->add_input(read_clb.get());
      root->add_input(write_clb.get());
      owned_nodes_.push_back(std::move(prefetch));
      owned_nodes_.push_back(std::move(stream));
      owned_nodes_.push_back(std::move(reads));
      owned_nodes_.push_back(std::move(read_clb));
      owned_nodes_.push_back(std::move(writes));
      owned_nodes_.push_back(std::move(write_clb));
    }
    for (uint32_t p = 0; p < K_; ++p) {
      chans_[channel_of_[p]].owned.push_back(p);
      const int c = channel_of_[p];
      auto prod = std::make_unique<JobProducer>("part" + std::to_string(p) + ".update_writes");
      prod->set_translator([this, c](uint64_t local) { return physical(c, local); });
      prod->set_open(true);  // updates trickle in all scatter phase long
      auto clb = std::make_unique<CacheLineBuffer>(
          "part" + std::to_string(p) + ".update_write_lines", prod.get());
      update_prods_.push_back(prod.get());
      root->add_input(clb.get());
      owned_nodes_.push_back(std::move(prod));
      owned_nodes_.push_back(std::move(clb));
    }
    root_ = std::move(root);
  }

  // --- callbacks -----------------------------------------------------------

  static void on_prefetch_elem(void* ctx, uint64_t channel, uint64_t) {
    auto* self = static_cast<HitGraphController*>(ctx);
    self->chans_[channel].returned += 1;
  }

  static void on_edge_elem(void* ctx, uint64_t part, uint64_t index) {
    auto* self = static_cast<HitGraphController*>(ctx);
    self->handle_edge(static_cast<uint32_t>(part), index);
  }

  static void on_update_elem(void* ctx, uint64_t part, uint64_t index) {
    auto* self = static_cast<HitGraphController*>(ctx);
    self->handle_update(static_cast<uint32_t>(part), index);
  }

  // --- scatter -------------------------------------------------------------

  bool skip_scatter(uint32_t part) const {
    return params_.opts.partition_skipping && part_active_count_[part] == 0;
  }

  void advance_scatter(Channel& ch) {
    if (ch.st == ChState::Idle) {
      while (ch.idx < ch.owned.size() && skip_scatter(ch.owned[ch.idx])) ++ch.idx;
      if (ch.idx == ch.owned.size()) {
        ch.st = ChState::Done;
        return;
      }
      const uint32_t part = ch.owned[ch.idx];
      ch.expect = interval_size(part);
      ch.returned = 0;
      ch.prefetch->push_job(value_off_[part], ch.expect, value_bytes_, false,
                            FlowCallback{&on_prefetch_elem, this, static_cast<uint64_t>(ch.id)});
      scatter_partitions_ += 1;
      ch.st = ChState::PrefetchWait;
      return;
    }
    if (ch.st == ChState::PrefetchWait && ch.returned == ch.expect) {
      const uint32_t part = ch.owned[ch.idx];
      const uint64_t edges = parts_.parts[part].size();
      if (edges == 0) {
        finish_scatter_partition(ch);
        return;
      }
      ch.expect = edges;
      ch.returned = 0;
      ch.stream->push_job(edge_off_[part], edges, edge_bytes_, false,
                          FlowCallback{&on_edge_elem, this, part});
      ch.st = ChState::StreamWait;
      return;
    }
    if (ch.st == ChState::StreamWait && ch.returned == ch.expect) finish_scatter_partition(ch);
  }

  void finish_scatter_partition(Channel& ch) {
    if (ch.has_pending) {
      emit_update(ch.pending_part, ch.pending);
      ch.has_pending = false;
    }
    ch.idx += 1;
    ch.st = ChState::Idle;
  }

  void handle_edge(uint32_t part, uint64_t index) {
    Channel& ch = chans_[channel_of_[part]];
    ch.returned += 1;
    const Edge& e = parts_.parts[part][index];
    if (params_.opts.active_bitmap_filter && !active_[e.src]) return;

    double value;
    const double src = values_[e.src];
    switch (spec_.problem) {
      case Problem::BFS: value = std::min(src + 1.0, sentinel_); break;
      case Problem::SSSP: value = std::min(src + e.weight, sentinel_); break;
      case Problem::WCC: value = src; break;
      case Problem::SpMV: value = src * static_cast<double>(e.weight); break;
      case Problem::PR: {
        value = src / static_cast<double>(out_degree_[e.src]);
        if (spec_.damp_sum) value *= spec_.damping;
        break;
      }
    }

    const uint32_t dest_part = e.dst / static_cast<uint32_t>(k_);
    if (params_.opts.update_merging) {
      if (ch.has_pending && ch.pending.dst == e.dst) {
        if (stationary_) {
          ch.pending.value += value;
        } else {
          ch.pending.value = std::min(ch.pending.value, value);
        }
        return;
      }
      if (ch.has_pending) emit_update(ch.pending_part, ch.pending);
      ch.pending = Update{e.dst, value};
      ch.pending_part = dest_part;
      ch.has_pending = true;
      return;
    }
    emit_update(dest_part, Update{e.dst, value});
  }

  void emit_update(uint32_t dest_part, const Update& u) {
    queues_[dest_part].push_back(u);
    updates_this_iter_ += 1;
    const uint64_t slot = queues_[dest_part].size() - 1;
    update_prods_[dest_part]->push_job(update_off_[dest_part] + slot * kUpdateBytes, 1,
                                       kUpdateBytes, true);
  }

  // --- gather --------------------------------------------------------------

  bool skip_gather(uint32_t part) const {
    if (stationary_) return false;  // interval must still be reset/rewritten
    return params_.opts.partition_skipping && queues_[part].empty();
  }

  void start_gather() {
    phase_ = Phase::Gather;
    for (auto& ch : chans_) {
      ch.idx = 0;
      ch.st = ChState::Idle;
      ch.value_writes->set_open(true);
    }
  }

  void advance_gather(Channel& ch) {
    if (ch.st == ChState::Idle) {
      while (ch.idx < ch.owned.size() && skip_gather(ch.owned[ch.idx])) ++ch.idx;
      if (ch.idx == ch.owned.size()) {
        ch.value_writes->set_open(false);
        ch.st = ChState::Done;
        return;
      }
      const uint32_t part = ch.owned[ch.idx];
      if (stationary_) {
        const double base =
            spec_.problem == Problem::PR ? (1.0 - spec_.damping) / static_cast<double>(n_) : 0.0;
        const uint64_t lo = interval_lo(part);
        for (uint64_t v = lo; v < lo + interval_size(part); ++v) values_[v] = base;
      }
      ch.expect = interval_size(part);
      ch.returned = 0;
      ch.prefetch->push_job(value_off_[part], ch.expect, value_bytes_, false,
                            FlowCallback{&on_prefetch_elem, this, static_cast<uint64_t>(ch.id)});
      gather_partitions_ += 1;
      ch.st = ChState::PrefetchWait;
      return;
    }
    if (ch.st == ChState::PrefetchWait && ch.returned == ch.expect) {
      const uint32_t part = ch.owned[ch.idx];
      const uint64_t count = queues_[part].size();
      if (count == 0) {
        ch.idx += 1;
        ch.st = ChState::Idle;
        return;
      }
      ch.expect = count;
      ch.returned = 0;
      ch.stream->push_job(update_off_[part], count, kUpdateBytes, false,
                          FlowCallback{&on_update_elem, this, part});
      ch.st = ChState::StreamWait;
      return;
    }
    if (ch.st == ChState::StreamWait && ch.returned == ch.expect) {
      ch.idx += 1;
      ch.st = ChState::Idle;
    }
  }

  void handle_update(uint32_t part, uint64_t index) {
    Channel& ch = chans_[channel_of_[part]];
    ch.returned += 1;
    const Update& u = queues_[part][index];
    bool write;
    if (stationary_) {
      values_[u.dst] += u.value;
      write = true;
    } else {
      write = u.value < values_[u.dst];
      if (write) {
        values_[u.dst] = u.value;
        if (!changed_now_[u.dst]) {
          changed_now_[u.dst] = true;
          changed_any_ = true;
        }
      }
    }
    if (write) {
      const uint64_t local =
          value_off_[part] + (u.dst - interval_lo(part)) * uint64_t{value_bytes_};
      ch.value_writes->push_job(local, 1, value_bytes_, true);
    }
  }

  // --- iteration bookkeeping -----------------------------------------------

  void finish_iteration() {
    iterations_ += 1;
    updates_per_iter_.push_back(updates_this_iter_);
    updates_this_iter_ = 0;
    for (auto& q : queues_) q.clear();

    bool stop;
    if (stationary_) {
      stop = iterations_ >= spec_.max_iterations;
    } else {
      stop = !changed_any_;
      active_ = changed_now_;
      std::fill(changed_now_.begin(), changed_now_.end(), false);
      std::fill(part_active_count_.begin(), part_active_count_.end(), 0);
      for (uint64_t v = 0; v < n_; ++v) {
        if (active_[v]) part_active_count_[v / k_] += 1;
      }
      changed_any_ = false;
    }
    if (stop) {
      phase_ = Phase::Finished;
      return;
    }
    phase_ = Phase::Scatter;
    for (auto& ch : chans_) {
      ch.idx = 0;
      ch.st = ChState::Idle;
    }
    for (auto& prod : update_prods_) prod->set_open(true);
  }

  static constexpr uint32_t kUpdateBytes = 8;

  const EdgeListPartitions& parts_;
  const ProblemSpec& spec_;
  const HitGraphParams& params_;
  DramSim& dram_;

  uint64_t k_ = 0, K_ = 0, n_ = 0;
  uint32_t value_bytes_ = 4, edge_bytes_ = 8;
  double sentinel_ = 0.0;
  bool stationary_ = false;

  std::vector<int> channel_of_;
  std::vector<uint64_t> value_off_, edge_off_, update_off_;

  std::vector<double> values_;
  std::vector<uint32_t> out_degree_;
  std::vector<bool> active_, changed_now_;
  std::vector<uint64_t> part_active_count_;
  std::vector<std::vector<Update>> queues_;
  bool changed_any_ = false;

  Phase phase_ = Phase::Scatter;
  int iterations_ = 0;
  uint64_t updates_this_iter_ = 0;
  std::vector<uint64_t> updates_per_iter_;
  uint64_t scatter_partitions_ = 0;
  uint64_t gather_partitions_ = 0;

  std::vector<Channel> chans_;
  std::vector<JobProducer*> update_prods_;
  std::vector<std::unique_ptr<FlowNode>> owned_nodes_;
  std::unique_ptr<Merger> root_;
};

}  // namespace

AccelResult run_hitgraph(const EdgeListPartitions& parts, const ProblemSpec& spec,
                         const HitGraphParams& params, DramSim& dram,
                         const EngineConfig& engine_config) {
  if (params.p < 1 || params.q < 1) throw std::invalid_argument("hitgraph: p and q must be >= 1");
  if (params.p != dram.config().channels) {
    throw std::invalid_argument("hitgraph: PE count must equal DRAM channel count");
  }
  if (params.opts.update_merging && !parts.dst_sorted) {
    throw std::invalid_argument("hitgraph: update merging requires destination-sorted partitions");
  }
  if (needs_root(spec.problem)) {
    if (!spec.root || *spec.root >= parts.n) throw std::invalid_argument("hitgraph: invalid root");
  }

  HitGraphController controller(parts, spec, params, dram);
  Engine engine(dram, engine_config);
  engine.register_node(controller.root());
  for (FlowNode* node : controller.nodes()) engine.register_node(node);
  engine.set_root(controller.root());

  AccelResult result;
  result.sim = engine.run(controller);
  result.values = controller.values();
  result.updates_per_iteration = controller.updates_per_iteration();
  result.scatter_partitions = controller.scatter_partitions();
  result.gather_partitions = controller.gather_partitions();
  return result;
}

}  // namespace graphmem
