#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "memsched/scheduler.hpp"
#include "memsched/simulator.hpp"
#include "memsched/workload.hpp"

using namespace memsched;

namespace {

// A full read queue spread over the banks of one channel, half row hits.
struct QueueFixture {
  explicit QueueFixture(std::size_t n) : reqs(n) {
    for (std::size_t i = 0; i < n; ++i) {
      reqs[i].id = i;
      reqs[i].app = static_cast<AppId>(i % 8);
      reqs[i].arrival = i;
      cands.push_back({&reqs[i], i % 2 ? RowStatus::Hit : RowStatus::Miss, static_cast<std::uint32_t>(i % 8)});
    }
  }
  std::vector<MemoryRequest> reqs;
  std::vector<Candidate> cands;
};

void BM_PickNext(benchmark::State& state, SchedulerKind kind) {
  QueueFixture q(static_cast<std::size_t>(state.range(0)));
  SchedulerContext ctx;
  ctx.num_apps = 8;
  auto sched = make_scheduler(kind, PolicyParams{}, ctx);
  Cycle now = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pick_next(*sched, 0, q.cands, now++));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_PickNext, frfcfs, SchedulerKind::FrFcfs)->Arg(16)->Arg(128);
BENCHMARK_CAPTURE(BM_PickNext, bliss, SchedulerKind::Bliss)->Arg(16)->Arg(128);
BENCHMARK_CAPTURE(BM_PickNext, tcm, SchedulerKind::Tcm)->Arg(16)->Arg(128);

void BM_SystemCycles(benchmark::State& state, SchedulerKind kind) {
  std::vector<Trace> traces;
  for (const auto& p : build_mix_suite(8, 7, 1).back().expand()) {
    SyntheticProfile q = p;
    q.length = 200'000;
    traces.push_back(generate_trace(q));
  }
  std::vector<const Trace*> ptrs;
  for (const auto& t : traces) ptrs.push_back(&t);
  SimConfig sim;
  constexpr Cycle kCycles = 20'000;
  for (auto _ : state) {
    System sys(sim, ptrs, kind, PolicyParams{}, 1);
    sys.run_until(kCycles);
    benchmark::DoNotOptimize(sys.core(0).retired_instructions());
  }
  state.counters["cycles/s"] = benchmark::Counter(static_cast<double>(kCycles) * static_cast<double>(state.iterations()),
                                                  benchmark::Counter::kIsRate);
}
BENCHMARK_CAPTURE(BM_SystemCycles, frfcfs, SchedulerKind::FrFcfs)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SystemCycles, bliss, SchedulerKind::Bliss)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SystemCycles, tcm, SchedulerKind::Tcm)->Unit(benchmark::kMillisecond);

void BM_GenerateTrace(benchmark::State& state) {
  SyntheticProfile p = reference_profiles()[0];
  p.length = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_trace(p).records.size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateTrace)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
