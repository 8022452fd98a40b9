#include <charconv>
#include <iterator>
#include <optional>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <fmt/core.h>

#include "memsched/trace.hpp"

namespace memsched {

std::uint64_t Trace::instruction_count() const {
  std::uint64_t n = trailing_instructions;
  for (const auto& r : records) n += r.gap + 1;
  return n;
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

void fnv_mix(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out, int base = 10) {
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out, base);
  return ec == std::errc{} && p == end;
}

}  // namespace

std::uint64_t trace_hash(const Trace& trace) {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, trace.records.size());
  for (const auto& r : trace.records) {
    fnv_mix(h, r.gap);
    fnv_mix(h, r.address);
    fnv_mix(h, static_cast<std::uint64_t>(r.type));
  }
  fnv_mix(h, trace.trailing_instructions);
  return h;
}

Trace parse_trace(std::istream& in) {
  Trace trace;
  std::optional<std::uint64_t> declared_total;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view sv = trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      constexpr std::string_view kPragma = "instructions";
      const std::string_view body = trim(sv.substr(1));
      if (body.starts_with(kPragma)) {
        std::uint64_t n = 0;
        if (parse_number(trim(body.substr(kPragma.size())), n)) declared_total = n;
      }
      continue;
    }

    const auto sp1 = sv.find(' ');
    const auto sp2 = sp1 == std::string_view::npos ? sp1 : sv.find(' ', sp1 + 1);
    if (sp2 == std::string_view::npos) {
      throw ConfigError(fmt::format("trace line {}: expected '<gap> <0xaddr> <R|W>'", lineno));
    }
    const std::string_view gap_s = sv.substr(0, sp1);
    const std::string_view addr_s = sv.substr(sp1 + 1, sp2 - sp1 - 1);
    const std::string_view kind_s = sv.substr(sp2 + 1);

    TraceRecord rec;
    if (!parse_number(gap_s, rec.gap)) {
      throw ConfigError(fmt::format("trace line {}: bad instruction gap '{}'", lineno, gap_s));
    }
    if (!addr_s.starts_with("0x") || !parse_number(addr_s.substr(2), rec.address, 16)) {
      throw ConfigError(fmt::format("trace line {}: bad address '{}'", lineno, addr_s));
    }
    if (kind_s == "R") {
      rec.type = AccessType::Read;
    } else if (kind_s == "W") {
      rec.type = AccessType::Write;
    } else {
      throw ConfigError(fmt::format("trace line {}: access kind must be R or W, got '{}'", lineno, kind_s));
    }
    trace.records.push_back(rec);
  }

  if (declared_total) {
    const std::uint64_t body = trace.instruction_count();
    if (*declared_total < body) {
      throw ConfigError(fmt::format("trace declares {} instructions but records cover {}", *declared_total, body));
    }
    trace.trailing_instructions = *declared_total - body;
  }
  return trace;
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << "# memsched trace\n";
  out << "# instructions " << trace.instruction_count() << '\n';
  std::string buf;
  for (const auto& r : trace.records) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{} {:#x} {}\n", r.gap, r.address,
                   r.type == AccessType::Read ? 'R' : 'W');
    out << buf;
  }
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open trace file '{}'", path.string()));
  return parse_trace(in);
}

void save_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write trace file '{}'", path.string()));
  write_trace(out, trace);
}

}  // namespace memsched
