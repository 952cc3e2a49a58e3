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

#ifndef GRAPHMEM_DRAM_HPP
#define GRAPHMEM_DRAM_HPP

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace graphmem {

enum class DramStandard { DDR3, DDR4 };
enum class SchedulerPolicy { FCFS, FRFCFS };
enum class AddrField { Channel, Column, Rank, BankGroup, Bank, Row };

struct DramConfig {
  DramStandard standard = DramStandard::DDR3;
  int channels = 1;
  int ranks = 1;
  std::string speed_grade = "1600K";   // e.g. "1600K", "2400R"
  std::string organization = "8Gb_x16";
  // Address bit assignment from LSB of the cache-line address upward.
  // Empty selects the default channel-first scheme.
  std::vector<AddrField> addressing;
  SchedulerPolicy scheduler = SchedulerPolicy::FRFCFS;
  int queue_depth = 32;
  bool refresh_enabled = true;
};

/// Timing parameters in memory-clock cycles (tCK in ns).
struct DramTimings {
  double tCK_ns = 1.25;
  uint64_t freq_khz = 800000;  // memory clock (half the data rate)
  int tCL = 11;
  int tRCD = 11;
  int tRP = 11;
  int tRAS = 28;
  int tRC = 39;
  int tRTP = 6;
  int tWR = 12;
  int tCCD_S = 4;
  int tCCD_L = 4;  // == tCCD_S for DDR3
  int tRRD = 6;
  int tFAW = 32;
  int tREFI = 6240;
  int tRFC = 280;
  static constexpr int kBurstCycles = 4;  // BL8 at double data rate
  static constexpr int kLineBytes = 64;
};

/// Per-rank geometry as seen over the 64-bit channel bus. One column access
/// moves 8 bytes; a cache line is one BL8 burst of 8 columns.
struct DramOrg {
  int bank_groups = 1;
  int banks_per_group = 8;
  uint64_t rows = 65536;
  uint64_t columns = 1024;  // device columns per row
  int banks() const { return bank_groups * banks_per_group; }
  uint64_t lines_per_row() const { return columns / 8; }
  uint64_t row_bytes() const { return columns * 8; }
};

struct DramCoord {
  int channel = 0;
  int rank = 0;
  int bank_group = 0;
  int bank = 0;
  uint64_t row = 0;
  uint64_t column = 0;  // cache-line index within the row
};

struct DramStats {
  uint64_t reads = 0;
  uint64_t writes = 0;
  uint64_t row_hits = 0;
  uint64_t row_misses = 0;
  uint64_t row_conflicts = 0;
  uint64_t bytes_read = 0;
  uint64_t bytes_written = 0;
  std::vector<uint64_t> channel_busy_cycles;
};

class CompletionSink;

struct MemRequest {
  uint64_t addr = 0;
  bool write = false;
  CompletionSink* sink = nullptr;
  uint64_t tag = 0;
};

class CompletionSink {
 public:
  virtual ~CompletionSink() = default;
  virtual void on_complete(const MemRequest& req) = 0;
};

/// Cycle-level DDR3/DDR4 request/response timing model. No data is stored;
/// requests flow in via enqueue() and completion callbacks flow out of
/// tick(), one memory-clock cycle at a time.
class DramSim {
 public:
  explicit DramSim(const DramConfig& config);
  DramSim(const DramConfig& config, const DramTimings& timings, const DramOrg& org);

  const DramTimings& timings() const { return timings_; }
  const DramOrg& organization() const { return org_; }
  const DramConfig& config() const { return config_; }
  uint64_t capacity_bytes() const { return capacity_; }
  uint64_t cycle() const { return cycle_; }

  DramCoord map_address(uint64_t addr) const;
  /// Byte address of the i-th cache line of a channel's private slice of
  /// the address space; inverse of map_address with the channel bits fixed.
  uint64_t make_address(int channel, uint64_t local_line) const;
  uint64_t channel_capacity_bytes() const { return capacity_ / config_.channels; }

  /// Accepts the request unless the target channel already holds
  /// queue-depth incomplete requests.
  bool enqueue(const MemRequest& req);

  /// Advances one memory-clock cycle; returns requests completed this cycle.
  const std::vector<MemRequest>& tick();

  bool idle() const;
  const DramStats& stats() const { return stats_; }

  void set_trace(std::ostream* out) { trace_ = out; }

  struct IssueRecord {
    uint64_t enqueue_cycle = 0;
    uint64_t activate_cycle = 0;  // == column_cycle for row hits
    uint64_t column_cycle = 0;
    uint64_t data_cycle = 0;
    uint64_t complete_cycle = 0;
    int kind = 0;  // 0 hit, 1 miss, 2 conflict
    bool write = false;
    DramCoord coord;
  };
  /// Per-request issue records for tests; enabled via record_issues().
  void record_issues(bool on) { record_issues_ = on; }
  const std::vector<IssueRecord>& issue_records() const { return issue_log_; }

 private:
  struct BankState {
    int64_t open_row = -1;
    uint64_t next_act = 0;
    uint64_t earliest_pre = 0;
  };
  struct RankState {
    uint64_t last_act = 0;
    std::deque<uint64_t> act_window;  // for tFAW
    uint64_t refresh_until = 0;
    uint64_t next_refresh = 0;
    std::vector<uint64_t> bg_last_col;
    uint64_t last_col = 0;
  };
  struct Pending {
    MemRequest req;
    DramCoord coord;
    uint64_t enqueue_cycle = 0;
  };
  struct Channel {
    std::deque<Pending> queue;
    std::vector<BankState> banks;  // ranks * banks
    std::vector<RankState> rank_state;
    uint64_t bus_free = 0;
    std::multimap<uint64_t, Pending> inflight;
  };

  void init(const DramConfig& config);
  void schedule_channel(Channel& ch, int ch_idx);
  void refresh_channel(Channel& ch);
  BankState& bank_of(Channel& ch, const DramCoord& c) {
    return ch.banks[c.rank * org_.banks() + c.bank_group * org_.banks_per_group + c.bank];
  }

  DramConfig config_;
  DramTimings timings_;
  DramOrg org_;
  std::vector<AddrField> scheme_;
  std::vector<int> field_bits_;
  uint64_t capacity_ = 0;
  uint64_t cycle_ = 0;
  std::vector<Channel> channels_;
  std::vector<MemRequest> completed_;
  DramStats stats_;
  std::ostream* trace_ = nullptr;
  bool record_issues_ = false;
  std::vector<IssueRecord> issue_log_;
};

/// Embedded JEDEC-style tables; throws on unknown tokens.
DramTimings lookup_speed_grade(DramStandard standard, const std::string& speed,
                               const std::string& organization);
DramOrg lookup_organization(DramStandard standard, const std::string& organization);

}  // namespace graphmem

#endif  // GRAPHMEM_DRAM_HPP
