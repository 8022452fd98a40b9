#include "memsched/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/core.h>

namespace memsched {

namespace {

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  return std::min(n - 1, static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n)));
}

// Number of failures before the first success of a Bernoulli(p) sequence.
std::uint64_t geometric(std::mt19937_64& rng, double p) {
  if (p >= 1.0) return 0;
  const double u = 1.0 - uniform01(rng);  // (0, 1]
  return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-p)));
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

SyntheticProfile make_profile(double mpki, double rbh, std::uint64_t seed) {
  SyntheticProfile p;
  p.name = fmt::format("m{}-r{:02d}", mpki, static_cast<int>(std::lround(rbh * 100)));
  p.target_mpki = mpki;
  p.target_rbh = rbh;
  p.seed = seed;
  return p;
}

}  // namespace

void SyntheticProfile::validate() const {
  if (!(target_mpki >= 0.0 && target_mpki <= 1000.0)) throw ConfigError(fmt::format("{}: MPKI must be in [0, 1000]", name));
  if (!(target_rbh >= 0.0 && target_rbh <= 1.0)) throw ConfigError(fmt::format("{}: RBH must be in [0, 1]", name));
  if (!(read_fraction >= 0.0 && read_fraction <= 1.0)) {
    throw ConfigError(fmt::format("{}: read fraction must be in [0, 1]", name));
  }
  if (footprint_rows == 0) throw ConfigError(fmt::format("{}: footprint must hold at least one row", name));
  if (length == 0) throw ConfigError(fmt::format("{}: length must be >= 1 instruction", name));
  if (!(clock_ratio >= 1.0)) throw ConfigError(fmt::format("{}: clock ratio must be >= 1", name));
}

Trace generate_trace(const SyntheticProfile& profile, const TraceLayout& layout) {
  profile.validate();
  if (layout.block_bytes == 0 || layout.row_bytes < layout.block_bytes || layout.row_bytes % layout.block_bytes) {
    throw ConfigError("trace layout: rows must hold a whole number of blocks");
  }

  Trace trace;
  if (profile.target_mpki == 0.0) {
    trace.trailing_instructions = profile.length;
    return trace;
  }

  std::mt19937_64 rng(profile.seed);
  // Saturates at one record per trace instruction.
  const double p = std::min(1.0, profile.target_mpki * profile.clock_ratio / 1000.0);
  const std::uint64_t blocks_per_row = layout.row_bytes / layout.block_bytes;
  std::uint64_t row = bounded(rng, profile.footprint_rows);
  std::uint64_t block = bounded(rng, blocks_per_row);
  std::uint64_t used = 0;
  bool first = true;

  for (;;) {
    const std::uint64_t gap = geometric(rng, p);
    if (gap >= profile.length - used) {
      trace.trailing_instructions = profile.length - used;
      break;
    }
    if (!first) {
      if (uniform01(rng) < profile.target_rbh || profile.footprint_rows == 1) {
        block = (block + 1) % blocks_per_row;
      } else {
        std::uint64_t next = bounded(rng, profile.footprint_rows - 1);
        if (next >= row) ++next;
        row = next;
        block = bounded(rng, blocks_per_row);
      }
    }
    first = false;
    const AccessType type = uniform01(rng) < profile.read_fraction ? AccessType::Read : AccessType::Write;
    trace.records.push_back({gap, row * layout.row_bytes + block * layout.block_bytes, type});
    used += gap + 1;
  }
  return trace;
}

TraceStats measure_trace(const Trace& trace, std::uint32_t row_bytes, double clock_ratio) {
  TraceStats s;
  s.instructions = trace.instruction_count();
  s.records = trace.records.size();
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    if (trace.records[i].type == AccessType::Read) ++s.reads;
    if (i > 0 && trace.records[i].address / row_bytes == trace.records[i - 1].address / row_bytes) ++s.row_hits;
  }
  s.mpki = s.instructions
               ? static_cast<double>(s.records) * 1000.0 / (static_cast<double>(s.instructions) * clock_ratio)
               : 0.0;
  s.rbh = s.records > 1 ? static_cast<double>(s.row_hits) / static_cast<double>(s.records - 1) : 0.0;
  return s;
}

IntensityCategory category_from_string(std::string_view text) {
  if (!text.empty() && text.back() == '%') text.remove_suffix(1);
  for (IntensityCategory c : kAllCategories) {
    if (text == std::to_string(category_percent(c))) return c;
  }
  throw ConfigError(fmt::format("unknown intensity category '{}'", text));
}

std::uint32_t WorkloadMix::core_count() const {
  std::uint32_t n = 0;
  for (const auto& e : entries) n += e.multiplicity;
  return n;
}

std::vector<SyntheticProfile> WorkloadMix::expand() const {
  std::vector<SyntheticProfile> out;
  for (const auto& e : entries) out.insert(out.end(), e.multiplicity, e.profile);
  return out;
}

std::vector<SyntheticProfile> reference_profiles() {
  return {make_profile(52, 0.99, 101), make_profile(146, 0.40, 102), make_profile(41, 0.89, 103),
          make_profile(0.1, 0.85, 104), make_profile(24, 0.91, 105), make_profile(7, 0.49, 106)};
}

std::vector<SyntheticProfile> profile_catalog() {
  auto out = reference_profiles();
  for (auto p : {make_profile(0.5, 0.50, 201), make_profile(1, 0.70, 202), make_profile(2, 0.90, 203),
                 make_profile(3.5, 0.40, 204), make_profile(4.5, 0.75, 205)}) {
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<WorkloadMix> build_mix_suite(std::uint32_t core_count, std::uint64_t seed, std::uint32_t mixes_per_category,
                                         std::span<const SyntheticProfile> catalog) {
  if (core_count < 2) throw ConfigError("a workload mix needs at least 2 cores");
  const std::vector<SyntheticProfile> fallback = catalog.empty() ? profile_catalog() : std::vector<SyntheticProfile>{};
  if (catalog.empty()) catalog = fallback;

  // Re-seed the catalog from the suite seed; a profile keeps one seed across
  // all mixes so its trace (and alone run) is shared.
  std::vector<SyntheticProfile> intensive;
  std::vector<SyntheticProfile> light;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    SyntheticProfile p = catalog[i];
    p.seed = splitmix(seed ^ splitmix(p.seed + i));
    (p.memory_intensive() ? intensive : light).push_back(std::move(p));
  }
  if (intensive.empty() || light.empty()) {
    throw ConfigError("profile catalog needs both memory-intensive and non-intensive profiles");
  }

  std::mt19937_64 rng(seed);
  std::vector<WorkloadMix> suite;
  for (IntensityCategory cat : kAllCategories) {
    const auto heavy = static_cast<std::uint32_t>(std::lround(core_count * category_percent(cat) / 100.0));
    for (std::uint32_t m = 0; m < mixes_per_category; ++m) {
      WorkloadMix mix;
      mix.name = fmt::format("i{}-{:02d}", category_percent(cat), m);
      mix.category = cat;
      // Redraw a mix that repeats an earlier one in its category, a bounded
      // number of times (small catalogs may not have enough combinations).
      for (int attempt = 0; attempt < 32; ++attempt) {
        // Counted per profile name so entries come out in a stable order.
        std::map<std::string, MixEntry> picks;
        for (std::uint32_t c = 0; c < core_count; ++c) {
          const auto& pool = c < heavy ? intensive : light;
          const SyntheticProfile& p = pool[bounded(rng, pool.size())];
          auto [it, fresh] = picks.try_emplace(p.name, MixEntry{p, 0});
          ++it->second.multiplicity;
        }
        mix.entries.clear();
        for (auto& [name, entry] : picks) mix.entries.push_back(std::move(entry));
        const bool repeat = std::any_of(suite.end() - m, suite.end(), [&](const WorkloadMix& other) {
          return std::equal(other.entries.begin(), other.entries.end(), mix.entries.begin(), mix.entries.end(),
                            [](const MixEntry& a, const MixEntry& b) {
                              return a.profile.name == b.profile.name && a.multiplicity == b.multiplicity;
                            });
        });
        if (!repeat) break;
      }
      suite.push_back(std::move(mix));
    }
  }
  return suite;
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestMix> mixes) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write manifest {}", path.string()));
  out << "# memsched suite manifest: <mix> <category%> <trace>\n";
  for (const auto& mix : mixes) {
    for (const auto& t : mix.traces) out << mix.name << ' ' << category_percent(mix.category) << ' ' << t.string() << '\n';
  }
  if (!out) throw ConfigError(fmt::format("failed writing manifest {}", path.string()));
}

std::vector<ManifestMix> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open manifest {}", path.string()));
  const auto base = path.parent_path();
  std::vector<ManifestMix> mixes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream fields(line);
    std::string name, category, trace, extra;
    if (!(fields >> name >> category >> trace) || (fields >> extra)) {
      throw ConfigError(fmt::format("{}:{}: expected '<mix> <category> <trace>'", path.string(), lineno));
    }
    const IntensityCategory cat = category_from_string(category);
    if (mixes.empty() || mixes.back().name != name) {
      for (const auto& m : mixes) {
        if (m.name == name) throw ConfigError(fmt::format("{}:{}: mix '{}' is not contiguous", path.string(), lineno, name));
      }
      mixes.push_back({name, cat, {}});
    } else if (mixes.back().category != cat) {
      throw ConfigError(fmt::format("{}:{}: mix '{}' changes category", path.string(), lineno, name));
    }
    std::filesystem::path p(trace);
    mixes.back().traces.push_back(p.is_relative() ? base / p : p);
  }
  return mixes;
}

}  // namespace memsched
