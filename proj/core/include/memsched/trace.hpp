#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "memsched/types.hpp"

namespace memsched {

/// One post-cache memory access preceded by `gap` non-memory instructions.
struct TraceRecord {
  std::uint64_t gap = 0;
  Addr address = 0;
  AccessType type = AccessType::Read;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct Trace {
  std::vector<TraceRecord> records;
  // Non-memory instructions after the last record. Lets a trace with no
  // memory records still describe a finite instruction stream.
  std::uint64_t trailing_instructions = 0;

  std::uint64_t instruction_count() const;
  std::uint64_t memory_records() const { return records.size(); }

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// 64-bit FNV-1a over the trace content; used as a cache key.
std::uint64_t trace_hash(const Trace& trace);

// Text format, one record per line:
//   <gap:decimal> <address:0x-hex> <R|W>
// '#' starts a comment line. A comment of the form "# instructions <n>" is
// read back as the total instruction count (sets trailing_instructions).
Trace parse_trace(std::istream& in);
void write_trace(std::ostream& out, const Trace& trace);

Trace load_trace(const std::filesystem::path& path);
void save_trace(const std::filesystem::path& path, const Trace& trace);

}  // namespace memsched
