#include "memsched/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/core.h>

namespace memsched {

namespace {

struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void mix(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  }
  void mix(double v) { mix(std::bit_cast<std::uint64_t>(v)); }
};

}  // namespace

void MemoryConfig::validate() const {
  geometry.validate();
  timing.validate();
  interleave.validate(geometry);
  if (read_queue_capacity == 0 || write_queue_capacity == 0) throw ConfigError("queue capacities must be >= 1");
  if (!(write_low_watermark >= 0.0 && write_low_watermark < write_high_watermark && write_high_watermark < 1.0)) {
    throw ConfigError("write watermarks must satisfy 0 <= low < high < 1");
  }
}

std::uint64_t MemoryConfig::hash() const {
  Fnv f;
  for (std::uint64_t v : {std::uint64_t{geometry.channels}, std::uint64_t{geometry.ranks_per_channel},
                          std::uint64_t{geometry.banks_per_rank}, std::uint64_t{geometry.row_bytes},
                          std::uint64_t{geometry.cache_block_bytes}, std::uint64_t{geometry.rows_per_bank},
                          timing.t_rcd, timing.t_rp, timing.t_cl, timing.t_ccd, timing.bus_transfer,
                          static_cast<std::uint64_t>(interleave.kind), std::uint64_t{interleave.blocks_per_stripe},
                          std::uint64_t{read_queue_capacity}, std::uint64_t{write_queue_capacity}}) {
    f.mix(v);
  }
  f.mix(write_high_watermark);
  f.mix(write_low_watermark);
  return f.h;
}

System::System(const SimConfig& config, std::span<const Trace* const> traces, const SchedulerFactory& make_sched,
               std::uint64_t seed)
    : config_(config), streaks_(config.memory.geometry.channels, static_cast<std::uint32_t>(traces.size())) {
  config_.memory.validate();
  config_.core.validate();
  if (traces.empty()) throw ConfigError("a system needs at least one application trace");

  const Geometry& geo = config_.memory.geometry;
  cores_.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    cores_.emplace_back(static_cast<AppId>(i), *traces[i], config_.core, geo.cache_block_bytes, config_.wrap_traces);
  }
  channels_.reserve(geo.channels);
  for (std::uint32_t c = 0; c < geo.channels; ++c) channels_.emplace_back(geo, config_.memory.timing);

  const std::size_t capacity =
      std::size_t{geo.channels} * (config_.memory.read_queue_capacity + config_.memory.write_queue_capacity);
  pool_.resize(capacity);
  free_.reserve(capacity);
  for (std::size_t i = capacity; i-- > 0;) free_.push_back(&pool_[i]);
  stats_.resize(traces.size());

  if (config_.partition_address_space) {
    const Addr rotation = Addr{geo.channels} * geo.banks_per_channel() * geo.row_bytes;
    const Addr share = geo.capacity_bytes() / traces.size();
    region_bytes_ = std::bit_floor(share);
    if (region_bytes_ < rotation) {
      throw ConfigError(fmt::format("{} applications do not fit in {} bytes of DRAM", traces.size(),
                                    geo.capacity_bytes()));
    }
  }

  SchedulerContext ctx;
  ctx.num_apps = static_cast<std::uint32_t>(traces.size());
  ctx.num_channels = geo.channels;
  ctx.banks_per_channel = geo.banks_per_channel();
  ctx.timing = config_.memory.timing;
  ctx.seed = seed;
  ctx.retired_instructions = [this](AppId a) { return cores_[a].retired_instructions(); };
  sched_ = make_sched(ctx);
  if (!sched_) throw ConfigError("scheduler factory returned no scheduler");
}

System::System(const SimConfig& config, std::span<const Trace* const> traces, SchedulerKind kind,
               const PolicyParams& params, std::uint64_t seed)
    : System(config, traces,
             [kind, &params](const SchedulerContext& ctx) { return make_scheduler(kind, params, ctx); }, seed) {}

DecodedAddress System::locate(AppId app, Addr block) const {
  const Addr physical = region_bytes_ ? Addr{app} * region_bytes_ + block % region_bytes_ : block;
  return decode_address(physical, config_.memory.geometry, config_.memory.interleave);
}

bool System::can_accept(AppId app, Addr block, AccessType type) {
  const auto d = locate(app, block);
  const Channel& ch = channels_[d.channel];
  if (free_.empty()) return false;
  return type == AccessType::Read ? ch.reads.size() < config_.memory.read_queue_capacity
                                  : ch.writes.size() < config_.memory.write_queue_capacity;
}

void System::send(AppId app, Addr block, AccessType type, Cycle now) {
  if (free_.empty()) throw InvariantViolation("request pool exhausted");
  MemoryRequest* r = free_.back();
  free_.pop_back();
  *r = MemoryRequest{};
  r->id = next_id_++;
  r->app = app;
  r->address = block;
  r->decoded = locate(app, block);
  r->type = type;
  r->arrival = now;

  Channel& ch = channels_[r->decoded.channel];
  (type == AccessType::Read ? ch.reads : ch.writes).push_back(r);
  ++stats_[app].requests_sent;
  sched_->on_arrival(*r, now);
}

void System::retire_completions() {
  while (!in_flight_.empty() && in_flight_.top().when <= now_) {
    const Pending p = in_flight_.top();
    in_flight_.pop();
    MemoryRequest* r = p.req;
    r->completed = p.when;
    if (r->type == AccessType::Read) {
      cores_[r->app].complete(r->address);
      AppRunStats& s = stats_[r->app];
      ++s.reads_completed;
      s.read_latency_sum += static_cast<double>(p.when - r->arrival);
    }
    free_.push_back(r);
  }
}

void System::schedule_channel(std::uint32_t index) {
  Channel& ch = channels_[index];
  const auto& mem = config_.memory;
  const double writes = static_cast<double>(ch.writes.size());
  if (!ch.draining && writes > mem.write_high_watermark * mem.write_queue_capacity) {
    ch.draining = true;
  } else if (ch.draining && writes <= mem.write_low_watermark * mem.write_queue_capacity) {
    ch.draining = false;
  }

  std::vector<MemoryRequest*>& queue = ch.draining ? ch.writes : ch.reads;
  if (queue.empty()) return;
  if (!ch.draining) sched_->prepare(index, ch.reads, now_);

  const auto pick = pick_command(*sched_, index, queue, ch.state, now_, nominees_);
  if (!pick) return;

  const auto it = std::find(queue.begin(), queue.end(), pick->request);
  MemoryRequest* r = *it;
  const CommandIssue cmd = ch.state.issue(pick->bank, r->decoded.row, now_);
  if (cmd.status != pick->status) {
    throw InvariantViolation(fmt::format("channel {}: row state changed under the scheduler at cycle {}", index, now_));
  }
  if (!r->row_status) r->row_status = cmd.status;
  if (cmd.command == DramCommand::Activate) return;

  // Served: the column access moves the data.
  *it = queue.back();
  queue.pop_back();
  r->issued = now_;
  const Candidate served{r, *r->row_status, pick->bank};
  sched_->on_issue(index, served, now_);
  streaks_.record(index, r->app);
  ++stats_[r->app].requests_served;
  if (served.status == RowStatus::Hit) ++stats_[r->app].row_hits_served;
  if (config_.record_issue_log) {
    log_.push_back({now_, index, r->app, r->id, pick->bank, r->decoded.row, served.status, r->type});
  }
  in_flight_.push({cmd.completion, r});
}

void System::step() {
  sched_->tick(now_);
  retire_completions();
  for (auto& core : cores_) core.tick(now_, *this);
  for (std::uint32_t c = 0; c < channels_.size(); ++c) schedule_channel(c);
  ++now_;
}

void System::run_until(Cycle end) {
  while (now_ < end) step();
}

RunResult System::run() {
  run_until(config_.horizon);
  return finish();
}

RunResult System::finish() {
  streaks_.flush();
  RunResult out;
  out.scheduler = std::string(sched_->name());
  out.horizon = now_;
  out.apps = stats_;
  for (std::size_t a = 0; a < cores_.size(); ++a) {
    AppRunStats& s = out.apps[a];
    s.retired_instructions = cores_[a].retired_instructions();
    s.ipc = now_ ? measure_ipc(s.retired_instructions, now_) : 0.0;
    s.stall_cycles = cores_[a].stall_cycles();
    s.streaks = streaks_.histogram(static_cast<AppId>(a));
  }
  out.incomplete_requests = pool_.size() - free_.size();
  out.issue_log = log_;
  return out;
}

RunResult simulate(const SimConfig& config, std::span<const Trace* const> traces, SchedulerKind kind,
                   const PolicyParams& params, std::uint64_t seed) {
  System sys(config, traces, kind, params, seed);
  return sys.run();
}

}  // namespace memsched
