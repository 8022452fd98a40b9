#include "memsched/dram.hpp"

#include <bit>

#include <fmt/core.h>

namespace memsched {

void TimingParams::validate() const {
  if (t_rcd == 0 || t_rp == 0 || t_cl == 0 || t_ccd == 0 || bus_transfer == 0) {
    throw ConfigError("timing parameters must all be >= 1 cycle");
  }
}

void Geometry::validate() const {
  auto pow2 = [](std::uint64_t v) { return v != 0 && std::has_single_bit(v); };
  if (!pow2(channels) || !pow2(ranks_per_channel) || !pow2(banks_per_rank) || !pow2(row_bytes) ||
      !pow2(cache_block_bytes) || !pow2(rows_per_bank)) {
    throw ConfigError("geometry counts and sizes must be powers of two");
  }
  if (row_bytes % cache_block_bytes != 0 || row_bytes < cache_block_bytes) {
    throw ConfigError("row size must be a multiple of the cache block size");
  }
}

std::uint32_t InterleavePolicy::stripe_blocks(const Geometry& geo) const {
  switch (kind) {
    case InterleaveKind::Row:
      return geo.blocks_per_row();
    case InterleaveKind::CacheBlock:
      return 1;
    case InterleaveKind::SubRow:
      return blocks_per_stripe;
  }
  return 1;
}

void InterleavePolicy::validate(const Geometry& geo) const {
  if (kind != InterleaveKind::SubRow) return;
  if (blocks_per_stripe == 0 || geo.blocks_per_row() % blocks_per_stripe != 0) {
    throw ConfigError(fmt::format("sub-row stripe of {} blocks must divide the {} blocks of a row",
                                  blocks_per_stripe, geo.blocks_per_row()));
  }
}

DecodedAddress decode_address(Addr addr, const Geometry& geo, const InterleavePolicy& policy) {
  if (addr >= geo.capacity_bytes()) {
    throw OutOfRangeError(fmt::format("address {:#x} beyond modeled capacity {:#x}", addr, geo.capacity_bytes()));
  }
  const std::uint64_t stripe = policy.stripe_blocks(geo);
  const std::uint64_t block = addr / geo.cache_block_bytes;
  const std::uint64_t within = block % stripe;
  std::uint64_t s = block / stripe;

  DecodedAddress d;
  d.channel = static_cast<std::uint32_t>(s % geo.channels);
  s /= geo.channels;
  d.bank = static_cast<std::uint32_t>(s % geo.banks_per_rank);
  s /= geo.banks_per_rank;
  d.rank = static_cast<std::uint32_t>(s % geo.ranks_per_channel);
  s /= geo.ranks_per_channel;

  const std::uint64_t stripes_per_row = geo.blocks_per_row() / stripe;
  d.column = static_cast<std::uint32_t>((s % stripes_per_row) * stripe + within);
  d.row = static_cast<std::uint32_t>(s / stripes_per_row);
  return d;
}

Addr encode_address(const DecodedAddress& d, const Geometry& geo, const InterleavePolicy& policy) {
  const std::uint64_t stripe = policy.stripe_blocks(geo);
  const std::uint64_t stripes_per_row = geo.blocks_per_row() / stripe;
  std::uint64_t s = std::uint64_t{d.row} * stripes_per_row + d.column / stripe;
  s = s * geo.ranks_per_channel + d.rank;
  s = s * geo.banks_per_rank + d.bank;
  s = s * geo.channels + d.channel;
  const std::uint64_t block = s * stripe + d.column % stripe;
  return block * geo.cache_block_bytes;
}

RowStatus classify_access(const BankState& bank, std::uint32_t row) {
  if (!bank.open_row) return RowStatus::Closed;
  return *bank.open_row == row ? RowStatus::Hit : RowStatus::Miss;
}

Cycle service_latency(RowStatus status, const TimingParams& t) {
  switch (status) {
    case RowStatus::Hit:
      return t.row_hit_latency();
    case RowStatus::Closed:
      return t.row_closed_latency();
    case RowStatus::Miss:
      return t.row_miss_latency();
  }
  return t.row_miss_latency();
}

BankIssue issue_to_bank(const BankState& bank, std::uint32_t row, Cycle now, const TimingParams& t) {
  if (bank.ready_at > now) {
    throw ContractViolation(fmt::format("bank busy until cycle {}, issue attempted at {}", bank.ready_at, now));
  }
  const RowStatus status = classify_access(bank, row);
  const Cycle latency = service_latency(status, t);
  BankIssue out;
  out.status = status;
  out.bank.open_row = row;
  // Precharge/activate occupy the bank; the column command itself pipelines.
  out.bank.ready_at = now + (latency - t.t_cl) + t.t_ccd;
  out.data_start = now + latency;
  out.completion = out.data_start + t.bus_transfer;
  return out;
}

ChannelState::ChannelState(const Geometry& geo, const TimingParams& timing)
    : timing_(timing), banks_per_rank_(geo.banks_per_rank), banks_(geo.banks_per_channel()) {}

bool ChannelState::can_issue(std::uint32_t bank_index, RowStatus status, Cycle now) const {
  if (banks_[bank_index].ready_at > now) return false;
  return status != RowStatus::Hit || now + timing_.t_cl >= bus_free_at_;
}

CommandIssue ChannelState::issue(std::uint32_t bank_index, std::uint32_t row, Cycle now) {
  BankState& b = banks_[bank_index];
  const RowStatus status = classify_access(b, row);
  if (!can_issue(bank_index, status, now)) {
    throw ContractViolation(fmt::format("channel cannot issue to bank {} at cycle {}", bank_index, now));
  }
  CommandIssue out;
  out.status = status;
  if (status == RowStatus::Hit) {
    out.command = DramCommand::Column;
    out.data_start = now + timing_.t_cl;
    out.completion = out.data_start + timing_.bus_transfer;
    b.ready_at = now + timing_.t_ccd;
    bus_free_at_ = out.completion;
  } else {
    out.command = DramCommand::Activate;
    b.open_row = row;
    b.ready_at = now + service_latency(status, timing_) - timing_.t_cl;
  }
  return out;
}

}  // namespace memsched
