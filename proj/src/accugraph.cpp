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

#include "graphmem/accugraph.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

namespace graphmem {

namespace {

constexpr uint64_t align_line(uint64_t bytes) { return (bytes + 63) & ~uint64_t{63}; }

/// Drives one full run: for each iteration, scan the partitions in
/// ascending order (prefetch the partition's source values, then pull every
/// destination's in-slice), applying value updates in place.
class AccuGraphController : public Controller {
 public:
  AccuGraphController(const CsrPartitions& csr, const ProblemSpec& spec,
                      const AccuGraphParams& params, DramSim& dram)
      : csr_(csr), spec_(spec), params_(params), dram_(dram) {
    k_ = csr.k;
    K_ = csr.K;
    n_ = csr.n;
    value_bytes_ = static_cast<uint32_t>(params.value_width_bits / 8);
    sentinel_ = static_cast<double>(unreached_sentinel(params.value_width_bits));
    stationary_ = is_stationary(spec.problem);

    build_layout();
    init_state();
    build_topology();
  }

  void on_accel_tick(Engine& engine) override {
    now_ = engine.now();
    switch (st_) {
      case St::PickPartition: pick_partition(); break;
      case St::PrefetchWait:
        if (prefetch_returned_ == prefetch_expect_) start_scan();
        break;
      case St::Scan: scan_tick(); break;
      case St::Drain:
        if (engine.quiescent()) {
          part_idx_ += 1;
          st_ = St::PickPartition;
        }
        break;
      case St::Finished: break;
    }
  }

  bool done(const Engine&) const override { return st_ == St::Finished; }
  const char* phase() const override {
    switch (st_) {
      case St::PrefetchWait: return "prefetch";
      case St::Scan:
      case St::Drain: return "scan";
      default: return "control";
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
  uint64_t partitions_scanned() const { return partitions_scanned_; }
  uint64_t prefetches() const { return prefetches_; }
  uint64_t value_reads_filtered() const { return value_filter_->dropped(); }
  uint64_t neighbor_elements() const { return neighbor_elements_; }

 private:
  enum class St { PickPartition, PrefetchWait, Scan, Drain, Finished };

  uint64_t interval_lo(uint32_t part) const { return part * k_; }
  uint64_t interval_hi(uint32_t part) const { return std::min<uint64_t>(n_, (part + 1) * k_); }

  /// Lines interleave round-robin over the channels so sequential streams
  /// spread their load; with one channel this is the identity layout.
  uint64_t physical(uint64_t local) const {
    const uint64_t line = local / 64;
    const int channels = dram_.config().channels;
    return dram_.make_address(static_cast<int>(line % channels), line / channels) + local % 64;
  }

  void build_layout() {
    uint64_t cursor = 0;
    value_off_ = cursor;
    cursor += align_line(n_ * value_bytes_);
    ptr_off_.resize(K_);
    nbr_off_.resize(K_);
    for (uint32_t p = 0; p < K_; ++p) {
      ptr_off_[p] = cursor;
      cursor += align_line((n_ + 1) * 4);
      nbr_off_[p] = cursor;
      cursor += align_line(csr_.neighbors[p].size() * 4);
    }
    const uint64_t capacity =
        dram_.channel_capacity_bytes() * static_cast<uint64_t>(dram_.config().channels);
    if (cursor > capacity) throw std::runtime_error("accugraph: graph does not fit in memory");
  }

  void init_state() {
    values_.assign(n_, 0.0);
    changed_last_.assign(n_, false);
    changed_now_.assign(n_, false);

    if (stationary_) {
      double init = spec_.initial_value >= 0 ? spec_.initial_value : 1.0 / static_cast<double>(n_);
      std::fill(values_.begin(), values_.end(), init);
      std::fill(changed_last_.begin(), changed_last_.end(), true);
      if (spec_.problem == Problem::PR) {
        out_degree_.assign(n_, 0);
        for (const auto& nbrs : csr_.neighbors) {
          for (VertexId u : nbrs) out_degree_[u] += 1;
        }
      }
      begin_stationary_pass();
    } else if (spec_.problem == Problem::WCC) {
      for (uint64_t v = 0; v < n_; ++v) values_[v] = static_cast<double>(v);
      std::fill(changed_last_.begin(), changed_last_.end(), true);
    } else {
      std::fill(values_.begin(), values_.end(), sentinel_);
      values_[*spec_.root] = 0.0;
      changed_last_[*spec_.root] = true;
    }
    recount_changed_sources();
    dest_changed_.assign(n_, 0);
    val_arrived_.assign(n_, 0);
    bank_free_.assign(params_.bram_banks, 0);
    pending_neighbors_.assign(n_, 0);
  }

  void begin_stationary_pass() {
    prev_ = values_;
    const double base =
        spec_.problem == Problem::PR ? (1.0 - spec_.damping) / static_cast<double>(n_) : 0.0;
    std::fill(values_.begin(), values_.end(), base);
    written_.assign(n_, 0);
  }

  void recount_changed_sources() {
    part_changed_count_.assign(K_, 0);
    part_changed_now_count_.assign(K_, 0);
    for (uint64_t v = 0; v < n_; ++v) {
      if (changed_last_[v]) part_changed_count_[v / k_] += 1;
    }
  }

  void build_topology() {
    auto prefetch = std::make_unique<JobProducer>("prefetch");
    auto values = std::make_unique<JobProducer>("values",
                                                static_cast<uint32_t>(params_.vertex_pipelines));
    auto pointers = std::make_unique<JobProducer>("pointers",
                                                  static_cast<uint32_t>(params_.vertex_pipelines));
    auto neighbors = std::make_unique<JobProducer>("neighbors",
                                                   static_cast<uint32_t>(params_.edge_pipelines));
    auto writes = std::make_unique<JobProducer>("writes");
    for (auto* p : {prefetch.get(), values.get(), pointers.get(), neighbors.get(), writes.get()}) {
      p->set_translator([this](uint64_t local) { return physical(local); });
    }

    // Destination reads for vertices of the prefetched partition are served
    // from BRAM; the element index rides on the callback.
    auto filter = std::make_unique<RequestFilter>(
        "value_filter", values.get(), [this](const FlowRequest& req) {
          const uint64_t dest = req.cb.arg0 + req.cb.arg1;
          return dest < interval_lo(cur_part_) || dest >= interval_hi(cur_part_);
        });
    value_filter_ = filter.get();

    auto prefetch_clb = std::make_unique<CacheLineBuffer>("prefetch_lines", prefetch.get());
    auto value_clb = std::make_unique<CacheLineBuffer>("value_lines", filter.get());
    auto ptr_clb = std::make_unique<CacheLineBuffer>("pointer_lines", pointers.get());
    auto nbr_clb = std::make_unique<CacheLineBuffer>("neighbor_lines", neighbors.get());
    auto write_clb = std::make_unique<CacheLineBuffer>("write_lines", writes.get());

    auto vp = std::make_unique<Merger>("value_ptr_merge", MergePolicy::RoundRobin);
    vp->add_input(value_clb.get());
    vp->add_input(ptr_clb.get());

    auto root = std::make_unique<Merger>("root", MergePolicy::Priority);
    root->add_input(write_clb.get(), 0);
    root->add_input(nbr_clb.get(), 1);
    root->add_input(vp.get(), 2);
    root->add_input(prefetch_clb.get(), 3);

    prefetch_ = prefetch.get();
    values_prod_ = values.get();
    pointers_ = pointers.get();
    neighbors_ = neighbors.get();
    writes_ = writes.get();

    owned_nodes_.push_back(std::move(prefetch));
    owned_nodes_.push_back(std::move(values));
    owned_nodes_.push_back(std::move(filter));
    owned_nodes_.push_back(std::move(pointers));
    owned_nodes_.push_back(std::move(neighbors));
    owned_nodes_.push_back(std::move(writes));
    owned_nodes_.push_back(std::move(prefetch_clb));
    owned_nodes_.push_back(std::move(value_clb));
    owned_nodes_.push_back(std::move(ptr_clb));
    owned_nodes_.push_back(std::move(nbr_clb));
    owned_nodes_.push_back(std::move(write_clb));
    owned_nodes_.push_back(std::move(vp));
    root_ = std::move(root);
  }

  // --- callbacks -----------------------------------------------------------

  static void on_prefetch_elem(void* ctx, uint64_t, uint64_t) {
    static_cast<AccuGraphController*>(ctx)->prefetch_returned_ += 1;
  }

  static void on_value_elem(void* ctx, uint64_t base, uint64_t index) {
    auto* self = static_cast<AccuGraphController*>(ctx);
    self->val_arrived_[base + index] = 1;
  }

  static void on_pointer_elem(void* ctx, uint64_t, uint64_t) {
    static_cast<AccuGraphController*>(ctx)->ptr_arrived_ += 1;
  }

  static void on_neighbor_elem(void* ctx, uint64_t dest, uint64_t index) {
    auto* self = static_cast<AccuGraphController*>(ctx);
    self->handle_neighbor(static_cast<VertexId>(dest), index);
  }

  // --- partition scheduling ------------------------------------------------

  /// A partition runs when any of its source values changed in the last
  /// pass or earlier in the current one; the latter keeps in-place chains
  /// propagating within a single pass exactly like the unskipped schedule.
  bool skip_partition(uint32_t part) const {
    if (stationary_) return false;  // every source contributes each sweep
    return params_.opts.partition_skipping && part_changed_count_[part] == 0 &&
           part_changed_now_count_[part] == 0;
  }

  void pick_partition() {
    while (part_idx_ < K_ && skip_partition(static_cast<uint32_t>(part_idx_))) ++part_idx_;
    if (part_idx_ == K_) {
      finish_pass();
      return;
    }
    cur_part_ = static_cast<uint32_t>(part_idx_);
    sweep_partition(cur_part_);
    partitions_scanned_ += 1;

    if (params_.opts.prefetch_skipping && prefetched_ == static_cast<int64_t>(cur_part_)) {
      start_scan();
      return;
    }
    prefetched_ = cur_part_;
    prefetch_expect_ = interval_hi(cur_part_) - interval_lo(cur_part_);
    prefetch_returned_ = 0;
    prefetch_->push_job(value_off_ + interval_lo(cur_part_) * value_bytes_, prefetch_expect_,
                        value_bytes_, false, FlowCallback{&on_prefetch_elem, this});
    prefetches_ += 1;
    st_ = St::PrefetchWait;
  }

  void start_scan() {
    std::fill(val_arrived_.begin(), val_arrived_.end(), 0);
    ptr_arrived_ = 0;
    dest_head_ = 0;
    completed_ = 0;
    neighbors_->set_open(true);
    writes_->set_open(true);
    values_prod_->push_job(value_off_, n_, value_bytes_, false,
                           FlowCallback{&on_value_elem, this});
    pointers_->push_job(ptr_off_[cur_part_], n_ + 1, 4, false,
                        FlowCallback{&on_pointer_elem, this});
    st_ = St::Scan;
  }

  void scan_tick() {
    drain_bank_defers();
    advance_head();
  }

  /// BRAM reads whose bank was busy resolve on later cycles.
  void drain_bank_defers() {
    while (!bank_defer_.empty() && bank_defer_.begin()->first <= now_) {
      std::vector<VertexId> ready = std::move(bank_defer_.begin()->second);
      bank_defer_.erase(bank_defer_.begin());
      for (VertexId v : ready) {
        if (--pending_neighbors_[v] == 0) complete_dest(v);
      }
    }
  }

  /// Destinations enter the vertex pipelines in ascending id order once
  /// both their value and their pointer pair have arrived.
  void advance_head() {
    const auto& ptr = csr_.pointers[cur_part_];
    while (dest_head_ < n_ && val_arrived_[dest_head_] && ptr_arrived_ >= dest_head_ + 2) {
      const VertexId v = static_cast<VertexId>(dest_head_);
      const uint64_t count = ptr[v + 1] - ptr[v];
      dest_head_ += 1;
      if (count == 0) {
        complete_dest(v);
        continue;
      }
      pending_neighbors_[v] = count;
      neighbor_elements_ += count;
      neighbors_->push_job(nbr_off_[cur_part_] + uint64_t{ptr[v]} * 4, count, 4, false,
                           FlowCallback{&on_neighbor_elem, this, v});
    }
    if (dest_head_ == n_) neighbors_->set_open(false);
  }

  void handle_neighbor(VertexId dest, uint64_t index) {
    const auto& ptr = csr_.pointers[cur_part_];
    const VertexId id = csr_.neighbors[cur_part_][ptr[dest] + index];
    const int bank = static_cast<int>(id % params_.bram_banks);
    // Data lands between accelerator ticks; the BRAM read happens on the
    // next one.
    const uint64_t cycle = now_ + 1;
    const uint64_t ready = std::max(cycle, bank_free_[bank]);
    bank_free_[bank] = ready + 1;
    if (ready <= cycle) {
      if (--pending_neighbors_[dest] == 0) complete_dest(dest);
    } else {
      bank_defer_[ready].push_back(dest);
    }
  }

  void complete_dest(VertexId v) {
    completed_ += 1;
    if (dest_changed_[v]) {
      writes_->push_job(value_off_ + uint64_t{v} * value_bytes_, 1, value_bytes_, true);
    }
    if (completed_ == n_) {
      writes_->set_open(false);
      st_ = St::Drain;
    }
  }

  // --- functional sweep ----------------------------------------------------

  /// Computes the partition's contribution up front in the exact in-place
  /// order; the request topology above replays the same work for timing.
  void sweep_partition(uint32_t part) {
    const auto& ptr = csr_.pointers[part];
    const auto& nbr = csr_.neighbors[part];
    if (stationary_) {
      for (uint64_t v = 0; v < n_; ++v) {
        double sum = 0.0;
        for (uint32_t i = ptr[v]; i < ptr[v + 1]; ++i) {
          const VertexId u = nbr[i];
          sum += spec_.problem == Problem::PR ? prev_[u] / static_cast<double>(out_degree_[u])
                                              : prev_[u];
        }
        if (spec_.problem == Problem::PR && spec_.damp_sum) sum *= spec_.damping;
        const double old = written_[v] ? values_[v] : prev_[v];
        const double next = values_[v] + sum;
        dest_changed_[v] = next != old;
        values_[v] = next;
        if (dest_changed_[v]) written_[v] = 1;
      }
      return;
    }
    for (uint64_t v = 0; v < n_; ++v) {
      bool changed = false;
      for (uint32_t i = ptr[v]; i < ptr[v + 1]; ++i) {
        const VertexId u = nbr[i];
        if (values_[u] >= sentinel_ && spec_.problem != Problem::WCC) continue;
        double cand;
        switch (spec_.problem) {
          case Problem::BFS: cand = values_[u] + 1; break;
          case Problem::SSSP: cand = values_[u] + 1; break;  // unit weights
          default: cand = values_[u]; break;                 // WCC
        }
        if (cand >= sentinel_) {
          throw std::overflow_error(
              "accugraph: distance " + std::to_string(static_cast<uint64_t>(cand)) +
              " does not fit in a " + std::to_string(params_.value_width_bits) + "-bit value");
        }
        if (cand < values_[v]) {
          values_[v] = cand;
          changed = true;
        }
      }
      dest_changed_[v] = changed;
      if (changed && !changed_now_[v]) {
        changed_now_[v] = 1;
        part_changed_now_count_[v / k_] += 1;
        changed_any_ = true;
      }
    }
  }

  // --- pass bookkeeping ----------------------------------------------------

  void finish_pass() {
    iterations_ += 1;
    bool stop;
    if (stationary_) {
      stop = iterations_ >= spec_.max_iterations;
      if (!stop) begin_stationary_pass();
    } else {
      stop = !changed_any_;
      changed_last_.assign(changed_now_.begin(), changed_now_.end());
      std::fill(changed_now_.begin(), changed_now_.end(), 0);
      changed_any_ = false;
      recount_changed_sources();
    }
    if (stop) {
      st_ = St::Finished;
      return;
    }
    part_idx_ = 0;
    st_ = St::PickPartition;
  }

  const CsrPartitions& csr_;
  const ProblemSpec& spec_;
  const AccuGraphParams& params_;
  DramSim& dram_;

  uint64_t k_ = 0, K_ = 0, n_ = 0;
  uint32_t value_bytes_ = 4;
  double sentinel_ = 0.0;
  bool stationary_ = false;

  uint64_t value_off_ = 0;
  std::vector<uint64_t> ptr_off_, nbr_off_;

  std::vector<double> values_, prev_;
  std::vector<uint32_t> out_degree_;
  std::vector<bool> changed_last_;
  std::vector<uint8_t> changed_now_, dest_changed_, written_;
  std::vector<uint64_t> part_changed_count_, part_changed_now_count_;
  bool changed_any_ = false;

  St st_ = St::PickPartition;
  uint64_t now_ = 0;
  uint64_t part_idx_ = 0;
  uint32_t cur_part_ = 0;
  int64_t prefetched_ = -1;
  uint64_t prefetch_expect_ = 0, prefetch_returned_ = 0;
  uint64_t ptr_arrived_ = 0;
  std::vector<uint8_t> val_arrived_;
  uint64_t dest_head_ = 0, completed_ = 0;
  std::vector<uint64_t> pending_neighbors_;
  std::vector<uint64_t> bank_free_;
  std::map<uint64_t, std::vector<VertexId>> bank_defer_;

  int iterations_ = 0;
  uint64_t partitions_scanned_ = 0;
  uint64_t prefetches_ = 0;
  uint64_t neighbor_elements_ = 0;

  JobProducer* prefetch_ = nullptr;
  JobProducer* values_prod_ = nullptr;
  JobProducer* pointers_ = nullptr;
  JobProducer* neighbors_ = nullptr;
  JobProducer* writes_ = nullptr;
  RequestFilter* value_filter_ = nullptr;
  std::vector<std::unique_ptr<FlowNode>> owned_nodes_;
  std::unique_ptr<Merger> root_;
};

}  // namespace

AccuGraphResult run_accugraph(const CsrPartitions& csr, const ProblemSpec& spec,
                              const AccuGraphParams& params, DramSim& dram,
                              const EngineConfig& engine_config) {
  if (params.vertex_pipelines < 1 || params.edge_pipelines < 1 || params.bram_banks < 1 ||
      params.vertex_pipeline_size < 1) {
    throw std::invalid_argument("accugraph: pipeline and bank counts must be >= 1");
  }
  if (static_cast<uint64_t>(params.edge_pipelines) * 4 > 64) {
    throw std::invalid_argument("accugraph: edge pipelines exceed one cache line per cycle");
  }
  if (needs_root(spec.problem)) {
    if (!spec.root || *spec.root >= csr.n) throw std::invalid_argument("accugraph: invalid root");
  }

  AccuGraphController controller(csr, spec, params, dram);
  Engine engine(dram, engine_config);
  engine.register_node(controller.root());
  for (FlowNode* node : controller.nodes()) engine.register_node(node);
  engine.set_root(controller.root());

  AccuGraphResult result;
  result.sim = engine.run(controller);
  result.values = controller.values();
  result.partitions_scanned = controller.partitions_scanned();
  result.prefetches = controller.prefetches();
  result.value_reads_filtered = controller.value_reads_filtered();
  result.neighbor_elements = controller.neighbor_elements();
  return result;
}

}  // namespace graphmem
