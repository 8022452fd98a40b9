#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "memsched/types.hpp"

namespace memsched {

/// DDR timing in memory-controller cycles. Defaults are DDR3-1066 (8-8-8).
struct TimingParams {
  Cycle t_rcd = 8;         // activate -> column command
  Cycle t_rp = 8;          // precharge
  Cycle t_cl = 8;          // column access
  Cycle t_ccd = 4;         // column -> column
  Cycle bus_transfer = 4;  // data burst occupancy on the channel bus

  Cycle row_hit_latency() const { return t_cl; }
  Cycle row_closed_latency() const { return t_rcd + t_cl; }
  Cycle row_miss_latency() const { return t_rp + t_rcd + t_cl; }

  /// Throws ConfigError if any field is zero.
  void validate() const;

  friend bool operator==(const TimingParams&, const TimingParams&) = default;
};

struct Geometry {
  std::uint32_t channels = 4;
  std::uint32_t ranks_per_channel = 1;
  std::uint32_t banks_per_rank = 8;
  std::uint32_t row_bytes = 8192;
  std::uint32_t cache_block_bytes = 64;
  std::uint32_t rows_per_bank = 1u << 14;

  std::uint32_t banks_per_channel() const { return ranks_per_channel * banks_per_rank; }
  std::uint32_t blocks_per_row() const { return row_bytes / cache_block_bytes; }
  std::uint64_t capacity_bytes() const {
    return std::uint64_t{channels} * banks_per_channel() * rows_per_bank * row_bytes;
  }

  /// All counts must be powers of two and rows must hold whole cache blocks.
  void validate() const;

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

struct DecodedAddress {
  std::uint32_t channel = 0;
  std::uint32_t rank = 0;
  std::uint32_t bank = 0;
  std::uint32_t row = 0;
  std::uint32_t column = 0;

  friend auto operator<=>(const DecodedAddress&, const DecodedAddress&) = default;
};

enum class InterleaveKind : std::uint8_t { Row, CacheBlock, SubRow };

struct InterleavePolicy {
  InterleaveKind kind = InterleaveKind::Row;
  std::uint32_t blocks_per_stripe = 4;  // SubRow only

  static InterleavePolicy row() { return {InterleaveKind::Row, 4}; }
  static InterleavePolicy cache_block() { return {InterleaveKind::CacheBlock, 4}; }
  static InterleavePolicy sub_row(std::uint32_t blocks = 4) { return {InterleaveKind::SubRow, blocks}; }

  /// Cache blocks per stripe unit under this policy.
  std::uint32_t stripe_blocks(const Geometry& geo) const;
  void validate(const Geometry& geo) const;

  friend bool operator==(const InterleavePolicy&, const InterleavePolicy&) = default;
};

/// Maps a physical byte address to its DRAM coordinates. Consecutive stripe
/// units rotate channel fastest, then bank, then rank; the column comes from
/// the bits below the stripe boundary plus the bits above rank.
/// Throws OutOfRangeError for addresses beyond the geometry's capacity.
DecodedAddress decode_address(Addr addr, const Geometry& geo, const InterleavePolicy& policy);

/// Inverse of decode_address (returns the address of the cache block).
Addr encode_address(const DecodedAddress& d, const Geometry& geo, const InterleavePolicy& policy);

enum class RowStatus : std::uint8_t { Hit, Miss, Closed };

struct BankState {
  std::optional<std::uint32_t> open_row;
  Cycle ready_at = 0;  // earliest cycle the bank accepts its next command
};

RowStatus classify_access(const BankState& bank, std::uint32_t row);
Cycle service_latency(RowStatus status, const TimingParams& t);

struct BankIssue {
  BankState bank;       // state after the access
  Cycle data_start;     // first cycle of the data burst on the channel bus
  Cycle completion;     // data fully returned
  RowStatus status;
};

/// Issues one column access (with any precharge/activate it needs) to a bank.
/// The bank accepts its next column command t_ccd after this one, so a
/// stream of row hits completes every t_ccd cycles once the pipeline fills.
/// Throws ContractViolation if the bank is still busy at `now`.
BankIssue issue_to_bank(const BankState& bank, std::uint32_t row, Cycle now, const TimingParams& t);

enum class DramCommand : std::uint8_t {
  Activate,  // precharge (if a row is open) + activate; bank only
  Column,    // read/write burst on the open row; bank + data bus
};

struct CommandIssue {
  DramCommand command = DramCommand::Activate;
  RowStatus status = RowStatus::Closed;  // row-buffer state before the command
  Cycle data_start = 0;                  // Column only
  Cycle completion = 0;                  // Column only
};

/// Banks plus the shared data bus of one channel. A request whose row is not
/// open needs two commands: an Activate that opens its row, then a Column
/// access once the bank is ready. The data bus is claimed only by Column
/// commands, t_cl ahead, so bursts are granted in command order. Unloaded,
/// the two-command sequence completes at the same cycle issue_to_bank gives.
class ChannelState {
 public:
  ChannelState(const Geometry& geo, const TimingParams& timing);

  std::uint32_t bank_index(const DecodedAddress& d) const { return d.rank * banks_per_rank_ + d.bank; }
  const BankState& bank(std::uint32_t index) const { return banks_[index]; }
  const std::vector<BankState>& banks() const { return banks_; }
  /// End of the latest data burst granted so far.
  Cycle bus_free_at() const { return bus_free_at_; }
  bool bank_ready(std::uint32_t bank_index, Cycle now) const { return banks_[bank_index].ready_at <= now; }

  /// Bank ready and, for a row hit, the burst starting now + t_cl is clear
  /// of the previous one on the bus.
  bool can_issue(std::uint32_t bank_index, RowStatus status, Cycle now) const;

  /// The next command for `row`: Column if it is open, else Activate.
  /// Throws ContractViolation if can_issue() is false.
  CommandIssue issue(std::uint32_t bank_index, std::uint32_t row, Cycle now);

 private:
  TimingParams timing_;
  std::uint32_t banks_per_rank_;
  std::vector<BankState> banks_;
  Cycle bus_free_at_ = 0;
};

}  // namespace memsched
