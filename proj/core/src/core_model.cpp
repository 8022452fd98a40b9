#include "memsched/core_model.hpp"

#include <algorithm>

#include <fmt/core.h>

namespace memsched {

void CoreParams::validate() const {
  if (issue_width == 0 || window_size == 0 || mshr_count == 0) {
    throw ConfigError("core issue width, window size and MSHR count must be >= 1");
  }
}

Core::Core(AppId id, const Trace& trace, const CoreParams& params, std::uint32_t block_bytes, bool wrap)
    : id_(id),
      trace_(&trace),
      params_(params),
      block_mask_(~static_cast<Addr>(block_bytes - 1)),
      wrap_(wrap),
      window_(params.window_size) {
  params_.validate();
  mshrs_.reserve(params.mshr_count);
  gap_left_ = trace.records.empty() ? trace.trailing_instructions : trace.records.front().gap;
  finished_ = trace.instruction_count() == 0;
}

bool Core::at_trace_end() const { return cursor_ == trace_->records.size() && gap_left_ == 0; }

void Core::advance_cursor() {
  ++cursor_;
  gap_left_ = cursor_ < trace_->records.size() ? trace_->records[cursor_].gap : trace_->trailing_instructions;
}

void Core::push_slot(Slot s) {
  window_[(head_ + count_) % params_.window_size] = s;
  ++count_;
}

std::uint32_t Core::tick(Cycle now, MemoryPort& port) {
  if (finished_) return 0;

  const auto& records = trace_->records;
  std::uint32_t fetched = 0;
  std::uint32_t sent = 0;
  while (fetched < params_.issue_width && count_ < params_.window_size) {
    if (gap_left_ > 0) {
      push_slot({0, true});
      --gap_left_;
      ++fetched;
      continue;
    }
    if (cursor_ == records.size()) {
      if (!wrap_) break;
      cursor_ = 0;
      gap_left_ = records.empty() ? trace_->trailing_instructions : records.front().gap;
      continue;
    }

    const TraceRecord& rec = records[cursor_];
    const Addr block = rec.address & block_mask_;
    if (rec.type == AccessType::Read) {
      if (std::find(mshrs_.begin(), mshrs_.end(), block) != mshrs_.end()) {
        ++coalesced_;
      } else {
        if (mshrs_.size() >= params_.mshr_count || !port.can_accept(id_, block, AccessType::Read)) break;
        port.send(id_, block, AccessType::Read, now);
        mshrs_.push_back(block);
        ++sent;
      }
      push_slot({block, false});
    } else {
      if (!port.can_accept(id_, block, AccessType::Write)) break;
      port.send(id_, block, AccessType::Write, now);
      ++sent;
      push_slot({block, true});
    }
    ++fetched;
    advance_cursor();
  }

  std::uint32_t retired_now = 0;
  while (retired_now < params_.issue_width && count_ > 0 && window_[head_].ready) {
    head_ = (head_ + 1) % params_.window_size;
    --count_;
    ++retired_now;
  }
  retired_ += retired_now;
  if (retired_now == 0 && count_ > 0) ++stall_cycles_;

  requests_sent_ += sent;
  if (!wrap_ && at_trace_end() && count_ == 0) finished_ = true;
  return sent;
}

void Core::complete(Addr block) {
  block &= block_mask_;
  const auto it = std::find(mshrs_.begin(), mshrs_.end(), block);
  if (it == mshrs_.end()) {
    throw InvariantViolation(fmt::format("core {}: completion for block {:#x} without an MSHR", id_, block));
  }
  mshrs_.erase(it);
  for (std::uint32_t i = 0; i < count_; ++i) {
    Slot& s = window_[(head_ + i) % params_.window_size];
    if (!s.ready && s.block == block) s.ready = true;
  }
}

double measure_ipc(std::uint64_t retired_instructions, Cycle horizon) {
  if (horizon == 0) throw ContractViolation("IPC horizon must be > 0 cycles");
  return static_cast<double>(retired_instructions) / static_cast<double>(horizon);
}

}  // namespace memsched
