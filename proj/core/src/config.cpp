#include "memsched/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

namespace memsched {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::optional<std::uint64_t> to_uint(std::string_view s) {
  std::string digits;
  for (char c : s) {
    if (c != '_' && c != '\'') digits.push_back(c);
  }
  std::uint64_t v = 0;
  const auto* end = digits.data() + digits.size();
  const auto [ptr, ec] = std::from_chars(digits.data(), end, v);
  if (ec != std::errc{} || ptr != end || digits.empty()) return std::nullopt;
  return v;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() ? base / path : path;
}

}  // namespace

IniDocument IniDocument::parse(std::string_view text, std::string origin) {
  IniDocument doc;
  doc.origin_ = std::move(origin);
  std::string section;
  doc.sections_[section];
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(fmt::format("{}:{}: unterminated section header", doc.origin_, lineno));
      section = lower(trim(line.substr(1, line.size() - 2)));
      doc.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("{}:{}: expected 'key = value'", doc.origin_, lineno));
    const std::string key = lower(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", doc.origin_, lineno));
    auto& keys = doc.sections_[section];
    if (keys.contains(key)) {
      throw ConfigError(fmt::format("{}:{}: duplicate key '{}' in [{}]", doc.origin_, lineno, key, section));
    }
    keys.emplace(key, Value{std::string(trim(line.substr(eq + 1))), lineno});
  }
  return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

bool IniDocument::has_section(std::string_view section) const { return sections_.contains(section); }

bool IniDocument::has(std::string_view section, std::string_view key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.contains(key);
}

const IniDocument::Value* IniDocument::find(std::string_view section, std::string_view key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  k->second.used = true;
  return &k->second;
}

void IniDocument::fail(const Value& v, std::string_view key, std::string_view what) const {
  throw ConfigError(fmt::format("{}:{}: '{}' {} (got '{}')", origin_, v.line, key, what, v.text));
}

std::optional<std::string> IniDocument::get_string(std::string_view section, std::string_view key) const {
  const Value* v = find(section, key);
  if (!v) return std::nullopt;
  return v->text;
}

std::optional<std::uint64_t> IniDocument::get_uint(std::string_view section, std::string_view key) const {
  const Value* v = find(section, key);
  if (!v) return std::nullopt;
  if (lower(v->text) == "inf" || lower(v->text) == "unbounded") return kUnbounded;
  const auto n = to_uint(v->text);
  if (!n) fail(*v, key, "must be an unsigned integer");
  return n;
}

std::optional<double> IniDocument::get_double(std::string_view section, std::string_view key) const {
  const Value* v = find(section, key);
  if (!v) return std::nullopt;
  char* end = nullptr;
  const double d = std::strtod(v->text.c_str(), &end);
  if (v->text.empty() || end != v->text.c_str() + v->text.size()) fail(*v, key, "must be a number");
  return d;
}

std::optional<bool> IniDocument::get_bool(std::string_view section, std::string_view key) const {
  const Value* v = find(section, key);
  if (!v) return std::nullopt;
  const std::string t = lower(v->text);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  fail(*v, key, "must be true or false");
}

std::optional<std::vector<std::string>> IniDocument::get_list(std::string_view section, std::string_view key) const {
  const Value* v = find(section, key);
  if (!v) return std::nullopt;
  std::vector<std::string> out;
  std::string_view rest = v->text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void IniDocument::require_all_used() const {
  for (const auto& [section, keys] : sections_) {
    for (const auto& [key, v] : keys) {
      if (!v.used) throw ConfigError(fmt::format("{}:{}: unknown key '{}' in [{}]", origin_, v.line, key, section));
    }
  }
}

void ExperimentConfig::validate() const {
  sim.memory.validate();
  sim.core.validate();
  policy.validate();
  if (sim.horizon == 0) throw ConfigError("horizon_cycles must be >= 1");
  if (sim.horizon < policy.clearing_interval) {
    throw ConfigError(fmt::format("horizon_cycles ({}) must be >= clearing_interval ({})", sim.horizon,
                                  policy.clearing_interval));
  }
  if (schedulers.empty()) throw ConfigError("at least one scheduler is required");
  if (suite.cores < 2 && !manifest) throw ConfigError("a generated suite needs at least 2 cores");
  if (suite.trace_length == 0) throw ConfigError("trace_length must be >= 1");
  if (!(suite.clock_ratio >= 1.0)) throw ConfigError("clock_ratio must be >= 1");
  if (sweep.thresholds.empty() || sweep.intervals.empty()) throw ConfigError("sweep axes must not be empty");
  for (auto t : sweep.thresholds) {
    if (t == 0) throw ConfigError("sweep thresholds must be >= 1");
  }
  for (auto i : sweep.intervals) {
    if (i == 0) throw ConfigError("sweep intervals must be >= 1");
  }
  if (hwcost.cores == 0 || hwcost.queue_depth == 0) throw ConfigError("hwcost cores and queue_depth must be >= 1");
}

ExperimentConfig parse_experiment_config(const IniDocument& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  auto u32 = [&](std::string_view s, std::string_view k, std::uint32_t& out) {
    if (auto v = doc.get_uint(s, k)) {
      if (*v > 0xffffffffull) throw ConfigError(fmt::format("[{}] {} is too large", s, k));
      out = static_cast<std::uint32_t>(*v);
    }
  };
  auto u64 = [&](std::string_view s, std::string_view k, std::uint64_t& out) {
    if (auto v = doc.get_uint(s, k)) out = *v;
  };
  auto dbl = [&](std::string_view s, std::string_view k, double& out) {
    if (auto v = doc.get_double(s, k)) out = *v;
  };
  auto flag = [&](std::string_view s, std::string_view k, bool& out) {
    if (auto v = doc.get_bool(s, k)) out = *v;
  };

  // [experiment]
  if (auto v = doc.get_string("experiment", "name")) c.name = *v;
  u64("experiment", "seed", c.seed);
  u64("experiment", "horizon_cycles", c.sim.horizon);
  if (auto v = doc.get_string("experiment", "output_dir")) c.output_dir = resolve(base_dir, *v);
  if (auto v = doc.get_list("experiment", "schedulers")) {
    c.schedulers.clear();
    for (const auto& s : *v) c.schedulers.push_back(scheduler_from_name(s));
  }

  // [memory]
  auto& g = c.sim.memory.geometry;
  u32("memory", "channels", g.channels);
  u32("memory", "ranks_per_channel", g.ranks_per_channel);
  u32("memory", "banks_per_rank", g.banks_per_rank);
  u32("memory", "row_bytes", g.row_bytes);
  u32("memory", "cache_block_bytes", g.cache_block_bytes);
  u32("memory", "rows_per_bank", g.rows_per_bank);
  if (auto v = doc.get_string("memory", "interleave")) {
    const std::string k = lower(*v);
    if (k == "row") c.sim.memory.interleave.kind = InterleaveKind::Row;
    else if (k == "cache_block" || k == "block") c.sim.memory.interleave.kind = InterleaveKind::CacheBlock;
    else if (k == "sub_row" || k == "subrow") c.sim.memory.interleave.kind = InterleaveKind::SubRow;
    else throw ConfigError(fmt::format("unknown interleave policy '{}'", *v));
  }
  u32("memory", "stripe_blocks", c.sim.memory.interleave.blocks_per_stripe);
  auto& t = c.sim.memory.timing;
  u64("memory", "t_rcd", t.t_rcd);
  u64("memory", "t_rp", t.t_rp);
  u64("memory", "t_cl", t.t_cl);
  u64("memory", "t_ccd", t.t_ccd);
  u64("memory", "bus_transfer", t.bus_transfer);
  u32("memory", "read_queue", c.sim.memory.read_queue_capacity);
  u32("memory", "write_queue", c.sim.memory.write_queue_capacity);
  dbl("memory", "write_high_watermark", c.sim.memory.write_high_watermark);
  dbl("memory", "write_low_watermark", c.sim.memory.write_low_watermark);
  flag("memory", "partition_address_space", c.sim.partition_address_space);

  // [core]
  u32("core", "issue_width", c.sim.core.issue_width);
  u32("core", "window_size", c.sim.core.window_size);
  u32("core", "mshrs", c.sim.core.mshr_count);
  flag("core", "wrap_traces", c.sim.wrap_traces);

  // [policy]
  auto& p = c.policy;
  u64("policy", "frfcfs_cap", p.frfcfs_cap);
  u32("policy", "parbs_marking_cap", p.parbs_marking_cap);
  dbl("policy", "atlas_history_weight", p.atlas_history_weight);
  u64("policy", "atlas_quantum", p.atlas_quantum);
  dbl("policy", "tcm_cluster_thresh", p.tcm_cluster_thresh);
  u64("policy", "tcm_shuffle_interval", p.tcm_shuffle_interval);
  u64("policy", "tcm_interval_length", p.tcm_interval_length);
  u64("policy", "blacklisting_threshold", p.blacklisting_threshold);
  u64("policy", "clearing_interval", p.clearing_interval);
  flag("policy", "blacklist_on_exceed", p.blacklist_on_exceed);
  u64("policy", "cap_blacklist_hits", p.cap_blacklist_hits);

  // [workload]
  if (auto v = doc.get_string("workload", "manifest")) c.manifest = resolve(base_dir, *v);
  u32("workload", "cores", c.suite.cores);
  u32("workload", "mixes_per_category", c.suite.mixes_per_category);
  if (auto v = doc.get_uint("workload", "suite_seed")) c.suite.seed = *v;
  u64("workload", "trace_length", c.suite.trace_length);
  dbl("workload", "clock_ratio", c.suite.clock_ratio);
  if (auto v = doc.get_list("workload", "categories")) {
    c.suite.categories.clear();
    for (const auto& s : *v) c.suite.categories.push_back(category_from_string(s));
  }
  if (auto v = doc.get_string("workload", "trace_dir")) c.suite.output_dir = resolve(base_dir, *v);
  else c.suite.output_dir = resolve(base_dir, c.suite.output_dir.string());
  if (auto v = doc.get_list("workload", "mixes")) c.mix_filter = *v;

  // [sweep]
  if (auto v = doc.get_list("sweep", "thresholds")) {
    c.sweep.thresholds.clear();
    for (const auto& s : *v) {
      const auto n = to_uint(s);
      if (!n) throw ConfigError(fmt::format("[sweep] thresholds: '{}' is not an unsigned integer", s));
      c.sweep.thresholds.push_back(*n);
    }
  }
  if (auto v = doc.get_list("sweep", "intervals")) {
    c.sweep.intervals.clear();
    for (const auto& s : *v) {
      const auto n = to_uint(s);
      if (!n) throw ConfigError(fmt::format("[sweep] intervals: '{}' is not an unsigned integer", s));
      c.sweep.intervals.push_back(*n);
    }
  }
  c.sweep.default_threshold = p.blacklisting_threshold;
  c.sweep.default_interval = p.clearing_interval;

  // [hwcost]
  if (auto v = doc.get_list("hwcost", "schedulers")) {
    for (const auto& s : *v) c.hwcost.schedulers.emplace_back(scheduler_name(scheduler_from_name(s)));
  }
  u32("hwcost", "cores", c.hwcost.cores);
  u32("hwcost", "queue_depth", c.hwcost.queue_depth);
  u32("hwcost", "counter_bits", c.hwcost.widths.counter_bits);
  u32("hwcost", "threshold_bits", c.hwcost.widths.threshold_bits);
  u32("hwcost", "accumulator_bits", c.hwcost.widths.accumulator_bits);
  c.hwcost.widths.banks_per_channel = g.banks_per_channel();

  doc.require_all_used();
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  const IniDocument doc = IniDocument::load(path);
  return parse_experiment_config(doc, path.parent_path());
}

bool apply_seed_override(ExperimentConfig& config) {
  const char* env = std::getenv("MEMSCHED_SEED");
  if (env == nullptr || *env == '\0') return false;
  const auto v = to_uint(trim(env));
  if (!v) throw ConfigError(fmt::format("MEMSCHED_SEED='{}' is not an unsigned integer", env));
  config.seed = *v;
  return true;
}

}  // namespace memsched
