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

#include "graphmem/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace graphmem {

namespace {
constexpr uint64_t kLineMask = ~uint64_t{63};
}

void JobProducer::push_job(uint64_t base, uint64_t count, uint32_t elem_bytes, bool write,
                           FlowCallback cb_template) {
  if (elem_bytes == 0) throw std::invalid_argument("JobProducer: zero element width");
  if (count == 0) return;  // empty job: nothing to emit, stream stays as-is
  jobs_.push_back(Job{base, count, elem_bytes, write, cb_template});
}

bool JobProducer::next(FlowRequest& out) {
  if (tail_) {
    out = *tail_;
    tail_.reset();
    return true;
  }
  if (jobs_.empty()) return false;
  if (rate_limit_ != 0 && emitted_this_tick_ >= rate_limit_) return false;
  const Job& job = jobs_.front();
  const uint64_t local = job.base + cursor_ * job.elem_bytes;
  out.bytes = job.elem_bytes;
  out.write = job.write;
  out.cb = job.cb;
  out.cb.arg1 = cursor_;
  // An element crossing a line boundary splits into two fragments so the
  // address translation (which is only line-locality-preserving) stays
  // valid; the callback rides on the trailing fragment.
  const uint64_t head_room = 64 - local % 64;
  if (job.elem_bytes > head_room) {
    FlowRequest tail = out;
    tail.addr = translate_ ? translate_(local + head_room) : local + head_room;
    tail.bytes = static_cast<uint32_t>(job.elem_bytes - head_room);
    tail_ = tail;
    out.bytes = static_cast<uint32_t>(head_room);
    out.cb = FlowCallback{};
  }
  out.addr = translate_ ? translate_(local) : local;
  ++cursor_;
  ++emitted_this_tick_;
  ++produced_;
  ++emitted_;
  if (cursor_ == job.count) {
    jobs_.pop_front();
    cursor_ = 0;
  }
  return true;
}

void CacheLineBuffer::line_done_thunk(void* ctx, uint64_t seq, uint64_t) {
  auto* self = static_cast<CacheLineBuffer*>(ctx);
  self->outstanding_[seq - self->head_seq_].done = true;
  while (!self->outstanding_.empty() && self->outstanding_.front().done) {
    for (const FlowCallback& cb : self->outstanding_.front().cbs) cb.fire();
    self->outstanding_.pop_front();
    ++self->head_seq_;
  }
}

void CacheLineBuffer::emit_pending() {
  FlowRequest out;
  out.addr = pending_line_;
  out.bytes = 64;
  out.write = pending_write_;
  out.cb = FlowCallback{&CacheLineBuffer::line_done_thunk, this, next_seq_, 0};
  outstanding_.push_back(Entry{std::move(pending_cbs_), false});
  pending_cbs_.clear();
  pending_ = false;
  ready_.push_back(out);
  ++next_seq_;
  ++emitted_;
}

bool CacheLineBuffer::next(FlowRequest& out) {
  FlowRequest in;
  while (ready_.empty() && input_->next(in)) {
    ++elements_in_;
    const uint64_t first = in.addr & kLineMask;
    const uint64_t last = (in.addr + in.bytes - 1) & kLineMask;
    if (pending_ && (first != pending_line_ || in.write != pending_write_)) emit_pending();
    if (!pending_) {
      pending_ = true;
      pending_line_ = first;
      pending_write_ = in.write;
    }
    if (last == pending_line_) {
      pending_cbs_.push_back(in.cb);
      continue;
    }
    // The element straddles onto the next line: its first line is complete,
    // the callback waits for the later line.
    emit_pending();
    pending_ = true;
    pending_line_ = last;
    pending_write_ = in.write;
    pending_cbs_.assign(1, in.cb);
  }
  if (ready_.empty() && pending_ && input_->exhausted()) emit_pending();
  if (ready_.empty()) return false;
  out = ready_.front();
  ready_.pop_front();
  return true;
}

bool RequestFilter::next(FlowRequest& out) {
  FlowRequest in;
  while (input_->next(in)) {
    if (keep_(in)) {
      out = in;
      ++emitted_;
      return true;
    }
    in.cb.fire();
    ++dropped_;
  }
  return false;
}

void Merger::add_input(FlowNode* node, int priority) {
  for (const auto& [prio, existing] : inputs_) {
    (void)existing;
    if (policy_ == MergePolicy::Priority && prio == priority) duplicate_priorities_ = true;
  }
  inputs_.emplace_back(priority, node);
  if (policy_ == MergePolicy::Priority) {
    std::stable_sort(inputs_.begin(), inputs_.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  }
}

bool Merger::next(FlowRequest& out) {
  const size_t n = inputs_.size();
  if (n == 0) return false;
  if (policy_ == MergePolicy::RoundRobin) {
    for (size_t i = 0; i < n; ++i) {
      const size_t idx = (cursor_ + i) % n;
      if (inputs_[idx].second->next(out)) {
        cursor_ = (idx + 1) % n;
        ++emitted_;
        return true;
      }
    }
    return false;
  }
  // Direct and Priority both scan in stored order (priority-sorted for the
  // latter), so a lower-priority input is never served while a higher one
  // has a request ready.
  for (auto& [prio, node] : inputs_) {
    (void)prio;
    if (node->next(out)) {
      ++emitted_;
      return true;
    }
  }
  return false;
}

bool Merger::exhausted() const {
  for (const auto& [prio, node] : inputs_) {
    (void)prio;
    if (!node->exhausted()) return false;
  }
  return true;
}

bool Merger::quiescent() const {
  for (const auto& [prio, node] : inputs_) {
    (void)prio;
    if (!node->quiescent()) return false;
  }
  return true;
}

void Merger::begin_tick() {
  for (auto& [prio, node] : inputs_) {
    (void)prio;
    node->begin_tick();
  }
}

void DramEndpoint::pump() {
  FlowRequest req;
  while (true) {
    if (held_) {
      req = *held_;
    } else if (!root_->next(req)) {
      return;
    }
    uint64_t slot;
    if (!free_slots_.empty()) {
      slot = free_slots_.back();
    } else {
      slot = slots_.size();
    }
    MemRequest mem{req.addr & kLineMask, req.write, this, slot};
    if (!dram_.enqueue(mem)) {
      held_ = req;
      ++retries_;
      return;
    }
    if (!free_slots_.empty()) {
      free_slots_.pop_back();
      slots_[slot] = req.cb;
    } else {
      slots_.push_back(req.cb);
    }
    held_.reset();
    ++live_slots_;
    ++sent_;
  }
}

void DramEndpoint::on_complete(const MemRequest& req) {
  FlowCallback cb = slots_[req.tag];
  free_slots_.push_back(req.tag);
  --live_slots_;
  cb.fire();
}

Engine::Engine(DramSim& dram, const EngineConfig& config) : dram_(dram), config_(config) {
  if (config.accel_mhz <= 0) throw std::invalid_argument("Engine: accelerator clock must be positive");
}

void Engine::set_root(FlowNode* root) { endpoint_.emplace(dram_, root); }

bool Engine::quiescent() const {
  if (!endpoint_ || !endpoint_->quiescent()) return false;
  for (const FlowNode* node : nodes_) {
    if (!node->quiescent()) return false;
  }
  return dram_.idle();
}

double Engine::mem_ticks_per_accel_tick(const EngineConfig& config, const DramSim& dram) {
  return static_cast<double>(dram.timings().freq_khz) / (config.accel_mhz * 1000.0);
}

SimResult Engine::run(Controller& controller) {
  if (!endpoint_) throw std::logic_error("Engine: no root node set");
  const uint64_t accel_khz = static_cast<uint64_t>(std::llround(config_.accel_mhz * 1000.0));
  const uint64_t mem_khz = dram_.timings().freq_khz;

  uint64_t mem_ticks = 0;
  uint64_t last_progress = 0;
  uint64_t ticks_since_progress = 0;

  auto progress_token = [&]() {
    const DramStats& s = dram_.stats();
    return endpoint_->sent() + s.reads + s.writes + (dram_.idle() ? 1 : 0);
  };

  while (!(controller.done(*this) && quiescent())) {
    // Interleave the two clock domains by absolute time: the accelerator's
    // (a+1)-th tick lands at (a+1)/accel_khz, memory's at (m+1)/mem_khz.
    if ((accel_cycle_ + 1) * mem_khz <= (mem_ticks + 1) * accel_khz) {
      for (FlowNode* node : nodes_) node->begin_tick();
      controller.on_accel_tick(*this);
      endpoint_->pump();
      result_phase_[controller.phase()] += 1;
      ++accel_cycle_;
    } else {
      dram_.tick();
      ++mem_ticks;
    }

    const uint64_t token = progress_token();
    if (token != last_progress) {
      last_progress = token;
      ticks_since_progress = 0;
    } else if (++ticks_since_progress > config_.deadlock_tick_budget) {
      std::ostringstream msg;
      msg << "engine deadlock: no progress for " << config_.deadlock_tick_budget
          << " ticks at accel cycle " << accel_cycle_ << "; node states:";
      for (const FlowNode* node : nodes_) {
        msg << " " << node->name() << (node->quiescent() ? "=idle" : "=busy");
      }
      msg << " dram=" << (dram_.idle() ? "idle" : "busy")
          << " endpoint=" << (endpoint_->quiescent() ? "idle" : "busy");
      throw std::runtime_error(msg.str());
    }
  }

  SimResult result;
  result.accel_cycles = accel_cycle_;
  result.runtime_s = static_cast<double>(accel_cycle_) / (config_.accel_mhz * 1e6);
  result.iterations = controller.iterations();
  result.dram = dram_.stats();
  result.dram_requests = endpoint_->sent();
  for (const FlowNode* node : nodes_) result.request_counts[node->name()] = node->emitted();
  result.phase_cycles = result_phase_;
  return result;
}

}  // namespace graphmem
