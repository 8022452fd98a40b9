#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memsched/trace.hpp"

namespace memsched {

/// Stationary synthetic application. Memory records arrive after a
/// geometric number of compute instructions (mean 1000/mpki - 1, so the
/// record itself makes the mean spacing 1000/mpki). Each record stays in the
/// current row at the next block with probability target_rbh, otherwise it
/// jumps to a different row chosen uniformly from the footprint.
///
/// The simulated core runs at the memory-controller clock. A clock_ratio of
/// k > 1 stands in for a core k times faster than the controller: each
/// trace instruction then represents k program instructions, so memory
/// records are k times denser per trace instruction than target_mpki says.
struct SyntheticProfile {
  std::string name;
  double target_mpki = 10.0;
  double target_rbh = 0.5;
  std::uint32_t footprint_rows = 1024;
  double read_fraction = 1.0;
  std::uint64_t length = 1'000'000;  // trace instructions
  std::uint64_t seed = 1;
  double clock_ratio = 1.0;

  bool memory_intensive() const { return target_mpki > 5.0; }
  /// Throws ConfigError on out-of-range fields.
  void validate() const;

  friend bool operator==(const SyntheticProfile&, const SyntheticProfile&) = default;
};

struct TraceLayout {
  std::uint32_t row_bytes = 8192;
  std::uint32_t block_bytes = 64;
};

Trace generate_trace(const SyntheticProfile& profile, const TraceLayout& layout = {});

/// Alone-run characteristics of a trace under a private-row model: a record
/// is a hit when it falls in the same row as the record before it.
struct TraceStats {
  std::uint64_t instructions = 0;
  std::uint64_t records = 0;
  std::uint64_t reads = 0;
  std::uint64_t row_hits = 0;
  double mpki = 0.0;  // per 1000 program instructions
  double rbh = 0.0;   // hits / (records - 1)
};

/// `clock_ratio` converts trace instructions back to program instructions.
TraceStats measure_trace(const Trace& trace, std::uint32_t row_bytes = 8192, double clock_ratio = 1.0);

/// Uniform double in [0, 1) from the top 53 bits of one draw. Spelled out
/// instead of using <random> distributions, whose algorithms are
/// implementation-defined, so traces are identical across standard libraries.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class IntensityCategory : std::uint8_t { Pct25 = 25, Pct50 = 50, Pct75 = 75, Pct100 = 100 };

inline constexpr IntensityCategory kAllCategories[] = {IntensityCategory::Pct25, IntensityCategory::Pct50,
                                                       IntensityCategory::Pct75, IntensityCategory::Pct100};

inline int category_percent(IntensityCategory c) { return static_cast<int>(c); }
/// Accepts 25, 50, 75, 100 with an optional trailing '%'.
IntensityCategory category_from_string(std::string_view text);

struct MixEntry {
  SyntheticProfile profile;
  std::uint32_t multiplicity = 1;
};

struct WorkloadMix {
  std::string name;
  IntensityCategory category = IntensityCategory::Pct50;
  std::vector<MixEntry> entries;

  std::uint32_t core_count() const;
  /// One profile per core, in entry order.
  std::vector<SyntheticProfile> expand() const;
};

/// The six reference (MPKI, RBH) pairs, in order: (52, 0.99), (146, 0.40),
/// (41, 0.89), (0.1, 0.85), (24, 0.91), (7, 0.49).
std::vector<SyntheticProfile> reference_profiles();

/// Profiles that mixes draw from: the reference set plus extra
/// non-intensive ones so low-intensity slots have some variety. Each has a
/// fixed seed, so a profile name always denotes the same trace.
std::vector<SyntheticProfile> profile_catalog();

/// `mixes_per_category` mixes for each intensity category. A mix in
/// category p% has round(core_count * p / 100) intensive profiles; all picks
/// are driven by `seed`. Throws ConfigError if core_count < 2.
std::vector<WorkloadMix> build_mix_suite(std::uint32_t core_count, std::uint64_t seed,
                                         std::uint32_t mixes_per_category = 5,
                                         std::span<const SyntheticProfile> catalog = {});

/// A mix as listed in a suite manifest: one trace path per core.
struct ManifestMix {
  std::string name;
  IntensityCategory category = IntensityCategory::Pct50;
  std::vector<std::filesystem::path> traces;
};

// Manifest lines: "<mix> <category%> <trace path>", one per core, '#'
// comments allowed. Relative paths are resolved against the manifest's
// directory when read.
void write_manifest(const std::filesystem::path& path, std::span<const ManifestMix> mixes);
std::vector<ManifestMix> read_manifest(const std::filesystem::path& path);

}  // namespace memsched
