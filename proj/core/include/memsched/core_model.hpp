#pragma once

#include <cstdint>
#include <vector>

#include "memsched/trace.hpp"
#include "memsched/types.hpp"

namespace memsched {

struct CoreParams {
  std::uint32_t issue_width = 3;
  std::uint32_t window_size = 128;
  std::uint32_t mshr_count = 8;

  void validate() const;

  friend bool operator==(const CoreParams&, const CoreParams&) = default;
};

/// Where a core sends its memory requests.
class MemoryPort {
 public:
  virtual ~MemoryPort() = default;
  /// False if the target queue is full (the core stalls and retries).
  virtual bool can_accept(AppId app, Addr block, AccessType type) = 0;
  virtual void send(AppId app, Addr block, AccessType type, Cycle now) = 0;
};

/// Trace-driven out-of-order core. Instructions enter an in-order window up
/// to issue_width per cycle and retire in order up to issue_width per cycle.
/// A read occupies a window slot until its data returns; reads to a block
/// that already owns an MSHR coalesce onto it. Writes are posted and retire
/// immediately once accepted by the memory system.
class Core {
 public:
  /// `wrap` restarts the trace from the beginning when it runs out.
  Core(AppId id, const Trace& trace, const CoreParams& params, std::uint32_t block_bytes, bool wrap);

  /// One cycle: fetch into the window (issuing requests), then retire.
  /// Returns the number of memory requests sent this cycle.
  std::uint32_t tick(Cycle now, MemoryPort& port);

  /// Data for `block` has returned: wake the waiting slots, free the MSHR.
  void complete(Addr block);

  AppId id() const { return id_; }
  std::uint64_t retired_instructions() const { return retired_; }
  std::uint64_t stall_cycles() const { return stall_cycles_; }
  std::uint64_t requests_sent() const { return requests_sent_; }
  std::uint64_t coalesced_reads() const { return coalesced_; }
  std::uint32_t window_occupancy() const { return count_; }
  std::uint32_t mshrs_in_use() const { return static_cast<std::uint32_t>(mshrs_.size()); }
  bool finished() const { return finished_; }

 private:
  struct Slot {
    Addr block = 0;
    bool ready = true;
  };

  bool at_trace_end() const;
  void advance_cursor();
  void push_slot(Slot s);

  AppId id_;
  const Trace* trace_;
  CoreParams params_;
  Addr block_mask_;
  bool wrap_;

  std::vector<Slot> window_;  // ring buffer
  std::uint32_t head_ = 0;
  std::uint32_t count_ = 0;
  std::vector<Addr> mshrs_;

  std::size_t cursor_ = 0;         // next record
  std::uint64_t gap_left_ = 0;     // non-memory instructions before it
  bool in_trailing_ = false;

  std::uint64_t retired_ = 0;
  std::uint64_t stall_cycles_ = 0;
  std::uint64_t requests_sent_ = 0;
  std::uint64_t coalesced_ = 0;
  bool finished_ = false;
};

/// Retired instructions per cycle. Throws ContractViolation if horizon == 0.
double measure_ipc(std::uint64_t retired_instructions, Cycle horizon);

}  // namespace memsched
