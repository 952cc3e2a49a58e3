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

#include "graphmem/dram.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <stdexcept>

namespace graphmem {

namespace {

int log2_exact(uint64_t value, const char* what) {
  if (value == 0 || (value & (value - 1)) != 0) {
    throw std::runtime_error(std::string("dram: ") + what + " must be a power of two");
  }
  return std::countr_zero(value);
}

uint64_t parse_density_gbit(const std::string& organization) {
  size_t gb = organization.find("Gb");
  if (gb == std::string::npos) throw std::runtime_error("dram: bad organization token: " + organization);
  return std::stoull(organization.substr(0, gb));
}

uint64_t parse_width_bits(const std::string& organization) {
  size_t x = organization.find("_x");
  if (x == std::string::npos) throw std::runtime_error("dram: bad organization token: " + organization);
  return std::stoull(organization.substr(x + 2));
}

}  // namespace

DramOrg lookup_organization(DramStandard standard, const std::string& organization) {
  uint64_t density_gbit = parse_density_gbit(organization);
  uint64_t width = parse_width_bits(organization);
  if (width != 16) throw std::runtime_error("dram: unsupported device width in " + organization);
  DramOrg org;
  if (standard == DramStandard::DDR4) {
    org.bank_groups = 2;  // x16 DDR4 devices
    org.banks_per_group = 4;
  } else {
    org.bank_groups = 1;
    org.banks_per_group = 8;
  }
  org.columns = 1024;
  uint64_t device_bits = density_gbit << 30;
  org.rows = device_bits / (org.columns * width * org.banks());
  if (org.rows == 0) throw std::runtime_error("dram: unsupported organization " + organization);
  return org;
}

DramTimings lookup_speed_grade(DramStandard standard, const std::string& speed,
                               const std::string& organization) {
  uint64_t density_gbit = parse_density_gbit(organization);
  DramTimings t;
  if (standard == DramStandard::DDR3 && speed == "1600K") {
    t.tCK_ns = 1.25;
    t.freq_khz = 800000;
    t.tCL = 11;
    t.tRCD = 11;
    t.tRP = 11;
    t.tRAS = 28;
    t.tRC = 39;
    t.tRTP = 6;
    t.tWR = 12;
    t.tCCD_S = t.tCCD_L = 4;
    t.tRRD = 6;   // x16, 7.5 ns
    t.tFAW = 32;  // x16, 40 ns
    t.tREFI = 6240;
    t.tRFC = density_gbit >= 8 ? 280 : 208;  // 350 / 260 ns
  } else if (standard == DramStandard::DDR4 && speed == "2400R") {
    t.tCK_ns = 1.0 / 1.2;
    t.freq_khz = 1200000;
    t.tCL = 16;
    t.tRCD = 16;
    t.tRP = 16;
    t.tRAS = 32;
    t.tRC = 48;
    t.tRTP = 9;
    t.tWR = 18;
    t.tCCD_S = 4;
    t.tCCD_L = 6;
    t.tRRD = 8;   // x16, tRRD_L
    t.tFAW = 40;
    t.tREFI = 9360;
    t.tRFC = density_gbit >= 8 ? 420 : 312;  // 350 / 260 ns
  } else {
    throw std::runtime_error("dram: unknown speed grade " + speed + " for this standard");
  }
  return t;
}

DramSim::DramSim(const DramConfig& config)
    : DramSim(config, lookup_speed_grade(config.standard, config.speed_grade, config.organization),
              lookup_organization(config.standard, config.organization)) {}

DramSim::DramSim(const DramConfig& config, const DramTimings& timings, const DramOrg& org)
    : config_(config), timings_(timings), org_(org) {
  init(config);
}

void DramSim::init(const DramConfig& config) {
  if (config.standard == DramStandard::DDR3 && org_.bank_groups != 1) {
    throw std::runtime_error("dram: bank groups are a DDR4-only hierarchy level");
  }
  scheme_ = config.addressing;
  if (scheme_.empty()) {
    scheme_ = {AddrField::Channel, AddrField::Column, AddrField::Rank};
    if (config.standard == DramStandard::DDR4) scheme_.push_back(AddrField::BankGroup);
    scheme_.push_back(AddrField::Bank);
    scheme_.push_back(AddrField::Row);
  }
  field_bits_.clear();
  for (AddrField f : scheme_) {
    switch (f) {
      case AddrField::Channel: field_bits_.push_back(log2_exact(config.channels, "channel count")); break;
      case AddrField::Column: field_bits_.push_back(log2_exact(org_.lines_per_row(), "columns")); break;
      case AddrField::Rank: field_bits_.push_back(log2_exact(config.ranks, "rank count")); break;
      case AddrField::BankGroup: field_bits_.push_back(log2_exact(org_.bank_groups, "bank groups")); break;
      case AddrField::Bank: field_bits_.push_back(log2_exact(org_.banks_per_group, "banks")); break;
      case AddrField::Row: field_bits_.push_back(log2_exact(org_.rows, "rows")); break;
    }
  }
  capacity_ = uint64_t{64};
  for (int bits : field_bits_) capacity_ <<= bits;

  channels_.assign(config.channels, Channel{});
  for (Channel& ch : channels_) {
    ch.banks.assign(static_cast<size_t>(config.ranks) * org_.banks(), BankState{});
    ch.rank_state.assign(config.ranks, RankState{});
    for (RankState& r : ch.rank_state) {
      r.bg_last_col.assign(org_.bank_groups, 0);
      r.next_refresh = timings_.tREFI;
    }
  }
  stats_.channel_busy_cycles.assign(config.channels, 0);
}

DramCoord DramSim::map_address(uint64_t addr) const {
  if (addr >= capacity_) throw std::runtime_error("dram: address beyond capacity");
  uint64_t line = addr >> 6;
  DramCoord c;
  for (size_t i = 0; i < scheme_.size(); ++i) {
    uint64_t mask = (uint64_t{1} << field_bits_[i]) - 1;
    uint64_t v = line & mask;
    line >>= field_bits_[i];
    switch (scheme_[i]) {
      case AddrField::Channel: c.channel = static_cast<int>(v); break;
      case AddrField::Column: c.column = v; break;
      case AddrField::Rank: c.rank = static_cast<int>(v); break;
      case AddrField::BankGroup: c.bank_group = static_cast<int>(v); break;
      case AddrField::Bank: c.bank = static_cast<int>(v); break;
      case AddrField::Row: c.row = v; break;
    }
  }
  return c;
}

uint64_t DramSim::make_address(int channel, uint64_t local_line) const {
  uint64_t line = 0;
  int shift = 0;
  for (size_t i = 0; i < scheme_.size(); ++i) {
    uint64_t mask = (uint64_t{1} << field_bits_[i]) - 1;
    uint64_t v;
    if (scheme_[i] == AddrField::Channel) {
      v = static_cast<uint64_t>(channel) & mask;
    } else {
      v = local_line & mask;
      local_line >>= field_bits_[i];
    }
    line |= v << shift;
    shift += field_bits_[i];
  }
  if (local_line != 0) throw std::runtime_error("dram: channel slice exhausted");
  return line << 6;
}

bool DramSim::enqueue(const MemRequest& req) {
  DramCoord c = map_address(req.addr);
  Channel& ch = channels_[c.channel];
  if (ch.queue.size() + ch.inflight.size() >= static_cast<size_t>(config_.queue_depth)) return false;
  ch.queue.push_back({req, c, cycle_});
  return true;
}

void DramSim::refresh_channel(Channel& ch) {
  for (int r = 0; r < config_.ranks; ++r) {
    RankState& rank = ch.rank_state[r];
    if (cycle_ < rank.next_refresh) continue;
    // All banks of the rank go busy for tRFC; open rows are lost.
    uint64_t start = cycle_;
    for (int b = 0; b < org_.banks(); ++b) {
      BankState& bank = ch.banks[static_cast<size_t>(r) * org_.banks() + b];
      start = std::max({start, bank.earliest_pre, bank.next_act});
      bank.open_row = -1;
    }
    rank.refresh_until = start + timings_.tRFC;
    rank.next_refresh += timings_.tREFI;
  }
}

void DramSim::schedule_channel(Channel& ch, int ch_idx) {
  if (ch.queue.empty()) return;

  size_t pick = 0;
  if (config_.scheduler == SchedulerPolicy::FRFCFS) {
    for (size_t i = 0; i < ch.queue.size(); ++i) {
      const Pending& p = ch.queue[i];
      const BankState& bank =
          ch.banks[static_cast<size_t>(p.coord.rank) * org_.banks() +
                   p.coord.bank_group * org_.banks_per_group + p.coord.bank];
      if (bank.open_row == static_cast<int64_t>(p.coord.row)) {
        pick = i;
        break;
      }
    }
  }

  Pending p = ch.queue[pick];
  ch.queue.erase(ch.queue.begin() + pick);

  BankState& bank = bank_of(ch, p.coord);
  RankState& rank = ch.rank_state[p.coord.rank];
  uint64_t ready = std::max(cycle_, rank.refresh_until);

  IssueRecord rec;
  rec.enqueue_cycle = p.enqueue_cycle;
  rec.write = p.req.write;
  rec.coord = p.coord;

  uint64_t col_earliest;
  if (bank.open_row == static_cast<int64_t>(p.coord.row)) {
    rec.kind = 0;
    stats_.row_hits++;
    col_earliest = ready;
    rec.activate_cycle = ready;
  } else {
    uint64_t act = ready;
    if (bank.open_row >= 0) {
      rec.kind = 2;
      stats_.row_conflicts++;
      uint64_t pre = std::max(ready, bank.earliest_pre);
      act = pre + timings_.tRP;
    } else {
      rec.kind = 1;
      stats_.row_misses++;
    }
    act = std::max({act, bank.next_act, rank.last_act + timings_.tRRD});
    if (rank.act_window.size() >= 4) {
      act = std::max(act, rank.act_window.front() + timings_.tFAW);
      rank.act_window.pop_front();
    }
    rank.act_window.push_back(act);
    rank.last_act = act;
    bank.open_row = static_cast<int64_t>(p.coord.row);
    bank.next_act = act + timings_.tRC;
    bank.earliest_pre = act + timings_.tRAS;
    rec.activate_cycle = act;
    col_earliest = act + timings_.tRCD;
  }

  // Column command spacing (tCCD) and data bus occupancy.
  col_earliest = std::max(col_earliest, rank.last_col + timings_.tCCD_S);
  col_earliest = std::max(col_earliest, rank.bg_last_col[p.coord.bank_group] + timings_.tCCD_L);
  uint64_t data_start = std::max(col_earliest + timings_.tCL, ch.bus_free);
  uint64_t col = data_start - timings_.tCL;

  rank.last_col = col;
  rank.bg_last_col[p.coord.bank_group] = col;
  ch.bus_free = data_start + DramTimings::kBurstCycles;
  if (p.req.write) {
    bank.earliest_pre =
        std::max(bank.earliest_pre, data_start + DramTimings::kBurstCycles + timings_.tWR);
  } else {
    bank.earliest_pre = std::max(bank.earliest_pre, col + timings_.tRTP);
  }

  // Writes are posted: they complete when the write command issues. Reads
  // complete when the last burst arrives.
  uint64_t completion = p.req.write ? std::max(col, cycle_ + 1)
                                    : data_start + DramTimings::kBurstCycles;
  rec.column_cycle = col;
  rec.data_cycle = data_start;
  rec.complete_cycle = completion;

  if (p.req.write) {
    stats_.writes++;
    stats_.bytes_written += DramTimings::kLineBytes;
  } else {
    stats_.reads++;
    stats_.bytes_read += DramTimings::kLineBytes;
  }
  stats_.channel_busy_cycles[ch_idx] += DramTimings::kBurstCycles;
  if (record_issues_) issue_log_.push_back(rec);
  if (trace_) {
    *trace_ << cycle_ << ' ' << (p.req.write ? 'W' : 'R') << ' ' << p.req.addr << ' '
            << p.coord.channel << ' ' << p.coord.rank << ' '
            << (p.coord.bank_group * org_.banks_per_group + p.coord.bank) << ' ' << p.coord.row
            << ' ' << p.coord.column << ' ' << (completion - p.enqueue_cycle) << '\n';
  }
  ch.inflight.insert({completion, std::move(p)});
}

const std::vector<MemRequest>& DramSim::tick() {
  ++cycle_;
  completed_.clear();
  for (size_t i = 0; i < channels_.size(); ++i) {
    Channel& ch = channels_[i];
    if (config_.refresh_enabled) refresh_channel(ch);
    while (!ch.inflight.empty() && ch.inflight.begin()->first <= cycle_) {
      completed_.push_back(ch.inflight.begin()->second.req);
      ch.inflight.erase(ch.inflight.begin());
    }
    schedule_channel(ch, static_cast<int>(i));
  }
  for (const MemRequest& req : completed_) {
    if (req.sink) req.sink->on_complete(req);
  }
  return completed_;
}

bool DramSim::idle() const {
  for (const Channel& ch : channels_) {
    if (!ch.queue.empty() || !ch.inflight.empty()) return false;
  }
  return true;
}

}  // namespace graphmem
