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

#ifndef GRAPHMEM_FLOW_HPP
#define GRAPHMEM_FLOW_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphmem/dram.hpp"

namespace graphmem {

/// Zero-latency control-flow callback: computations and on-chip accesses
/// are instantaneous, so completion handlers run the moment data arrives.
struct FlowCallback {
  void (*fn)(void*, uint64_t, uint64_t) = nullptr;
  void* ctx = nullptr;
  uint64_t arg0 = 0;
  uint64_t arg1 = 0;
  void fire() const {
    if (fn) fn(ctx, arg0, arg1);
  }
};

/// An element-granular memory access before cache-line mapping.
struct FlowRequest {
  uint64_t addr = 0;
  uint32_t bytes = 4;
  bool write = false;
  FlowCallback cb;
};

/// A node in the request topology. Downstream nodes pull; a node offers at
/// most what its per-tick budget allows and reports whether more output can
/// ever appear without new upstream work.
class FlowNode {
 public:
  explicit FlowNode(std::string name) : name_(std::move(name)) {}
  virtual ~FlowNode() = default;

  /// Pulls the next request available this tick; false when none.
  virtual bool next(FlowRequest& out) = 0;
  /// True when no output can appear until new work arrives upstream.
  virtual bool exhausted() const = 0;
  /// exhausted() and nothing buffered or awaiting memory inside the node.
  virtual bool quiescent() const { return exhausted(); }
  virtual void begin_tick() {}

  const std::string& name() const { return name_; }
  uint64_t emitted() const { return emitted_; }

 protected:
  std::string name_;
  uint64_t emitted_ = 0;
};

/// Turns control-flow triggers into request streams. Work arrives as jobs
/// (base address, element count, element width); elements are emitted in
/// order, optionally rate limited per accelerator tick. Each element fires
/// fn(ctx, tag, element_index) when its data arrives.
class JobProducer : public FlowNode {
 public:
  JobProducer(std::string name, uint32_t rate_limit = 0)
      : FlowNode(std::move(name)), rate_limit_(rate_limit) {}

  void push_job(uint64_t base, uint64_t count, uint32_t elem_bytes, bool write,
                FlowCallback cb_template = {});
  /// While open, an empty job queue means "waiting", not "done"; cache-line
  /// buffers downstream keep partial lines held.
  void set_open(bool open) { open_ = open; }
  void set_rate_limit(uint32_t per_tick) { rate_limit_ = per_tick; }
  /// Maps job-local byte offsets to physical addresses (e.g. a channel's
  /// interleaved slice of the address space). Must preserve line locality.
  void set_translator(std::function<uint64_t(uint64_t)> translate) {
    translate_ = std::move(translate);
  }

  bool next(FlowRequest& out) override;
  bool exhausted() const override { return jobs_.empty() && !tail_ && !open_; }
  void begin_tick() override { emitted_this_tick_ = 0; }

  uint64_t produced_elements() const { return produced_; }

 private:
  struct Job {
    uint64_t base;
    uint64_t count;
    uint32_t elem_bytes;
    bool write;
    FlowCallback cb;
  };
  std::deque<Job> jobs_;
  std::optional<FlowRequest> tail_;  // second fragment of a line-crossing element
  std::function<uint64_t(uint64_t)> translate_;
  uint64_t cursor_ = 0;
  uint32_t rate_limit_;
  uint32_t emitted_this_tick_ = 0;
  uint64_t produced_ = 0;
  bool open_ = false;
};

/// Merges subsequent requests to the same 64-byte line into one aligned
/// request; all merged callbacks fire when the line arrives. An element that
/// straddles a line boundary requests both lines, its callback riding on the
/// later one. Lines are dispatched to their callbacks in emission order.
class CacheLineBuffer : public FlowNode {
 public:
  CacheLineBuffer(std::string name, FlowNode* input)
      : FlowNode(std::move(name)), input_(input) {}

  bool next(FlowRequest& out) override;
  bool exhausted() const override { return input_->exhausted() && !pending_ && ready_.empty(); }
  bool quiescent() const override {
    return input_->quiescent() && !pending_ && ready_.empty() && outstanding_.empty();
  }
  void begin_tick() override { input_->begin_tick(); }

  uint64_t elements_in() const { return elements_in_; }

 private:
  static void line_done_thunk(void* ctx, uint64_t seq, uint64_t);
  void emit_pending();

  FlowNode* input_;
  bool pending_ = false;
  uint64_t pending_line_ = 0;
  bool pending_write_ = false;
  std::vector<FlowCallback> pending_cbs_;
  std::deque<FlowRequest> ready_;  // emitted lines not yet pulled downstream

  struct Entry {
    std::vector<FlowCallback> cbs;
    bool done = false;
  };
  std::deque<Entry> outstanding_;
  uint64_t head_seq_ = 0;
  uint64_t next_seq_ = 0;
  uint64_t elements_in_ = 0;
};

/// Discards requests whose data is already on chip; dropped requests are
/// served instantly (their callbacks fire in the same tick).
class RequestFilter : public FlowNode {
 public:
  RequestFilter(std::string name, FlowNode* input, std::function<bool(const FlowRequest&)> keep)
      : FlowNode(std::move(name)), input_(input), keep_(std::move(keep)) {}

  bool next(FlowRequest& out) override;
  bool exhausted() const override { return input_->exhausted(); }
  bool quiescent() const override { return input_->quiescent(); }
  void begin_tick() override { input_->begin_tick(); }

  uint64_t dropped() const { return dropped_; }

 private:
  FlowNode* input_;
  std::function<bool(const FlowRequest&)> keep_;
  uint64_t dropped_ = 0;
};

enum class MergePolicy { Direct, RoundRobin, Priority };

/// Merges request streams. Direct passes inputs through in fixed order,
/// round-robin rotates over nonempty inputs, priority always serves the
/// highest-priority nonempty input (lower number wins, ties by input order).
class Merger : public FlowNode {
 public:
  Merger(std::string name, MergePolicy policy) : FlowNode(std::move(name)), policy_(policy) {}

  void add_input(FlowNode* node, int priority = 0);
  bool duplicate_priority_warning() const { return duplicate_priorities_; }

  bool next(FlowRequest& out) override;
  bool exhausted() const override;
  bool quiescent() const override;
  void begin_tick() override;

 private:
  MergePolicy policy_;
  std::vector<std::pair<int, FlowNode*>> inputs_;  // (priority, node)
  size_t cursor_ = 0;
  bool duplicate_priorities_ = false;
};

/// Feeds the root stream into the DRAM model; a rejected request (channel
/// queue full) is held and retried next tick, stalling upstream in FIFO
/// order.
class DramEndpoint : public CompletionSink {
 public:
  DramEndpoint(DramSim& dram, FlowNode* root) : dram_(dram), root_(root) {}

  void pump();
  bool quiescent() const { return !held_ && live_slots_ == 0 && root_->quiescent(); }
  void on_complete(const MemRequest& req) override;

  uint64_t sent() const { return sent_; }
  uint64_t retries() const { return retries_; }

 private:
  DramSim& dram_;
  FlowNode* root_;
  std::optional<FlowRequest> held_;
  std::vector<FlowCallback> slots_;
  std::vector<uint64_t> free_slots_;
  uint64_t live_slots_ = 0;
  uint64_t sent_ = 0;
  uint64_t retries_ = 0;
};

struct EngineConfig {
  double accel_mhz = 200.0;
  uint64_t deadlock_tick_budget = 10'000'000;
};

struct SimResult {
  uint64_t accel_cycles = 0;
  double runtime_s = 0.0;
  int iterations = 1;
  DramStats dram;
  std::map<std::string, uint64_t> request_counts;  // per-node emissions
  std::map<std::string, uint64_t> phase_cycles;    // accelerator cycles per phase
  uint64_t dram_requests = 0;
};

class Engine;

/// Drives an accelerator model: reconfigures producers as phases advance
/// and reports when the workload is finished.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void on_accel_tick(Engine& engine) = 0;
  virtual bool done(const Engine& engine) const = 0;
  virtual const char* phase() const { return "run"; }
  virtual int iterations() const { return 1; }
};

/// Ticks the accelerator model and the DRAM model in their exact rational
/// clock ratio and collects the run metrics.
class Engine {
 public:
  Engine(DramSim& dram, const EngineConfig& config);

  void register_node(FlowNode* node) { nodes_.push_back(node); }
  void set_root(FlowNode* root);

  SimResult run(Controller& controller);

  uint64_t now() const { return accel_cycle_; }
  bool quiescent() const;
  DramSim& dram() { return dram_; }
  DramEndpoint& endpoint() { return *endpoint_; }

  static double mem_ticks_per_accel_tick(const EngineConfig& config, const DramSim& dram);

 private:
  DramSim& dram_;
  EngineConfig config_;
  std::vector<FlowNode*> nodes_;
  std::optional<DramEndpoint> endpoint_;
  uint64_t accel_cycle_ = 0;
  std::map<std::string, uint64_t> result_phase_;
};

}  // namespace graphmem

#endif  // GRAPHMEM_FLOW_HPP
