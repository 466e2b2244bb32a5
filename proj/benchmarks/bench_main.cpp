#include <benchmark/benchmark.h>

#include <random>

#include "ppcb/agents.hpp"
#include "ppcb/envelope.hpp"
#include "ppcb/experiments.hpp"

namespace {

using namespace ppcb;

// K agents, m experts, one context per expert, random CTRs.
struct Fixture {
  AuctionInstance instance;
  ExpertClass experts;
  PiTable pi;
  std::vector<double> bids;

  Fixture(std::size_t K, std::size_t m) {
    std::mt19937_64 rng(K * 1000 + m);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    instance.num_agents = K;
    instance.num_contexts = m;
    instance.horizon = 1000;
    instance.context_probs.assign(m, 1.0 / static_cast<double>(m));
    instance.ctr = Matrix<double>(m, K);
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t a = 0; a < K; ++a) instance.ctr(x, a) = unit(rng);
    for (std::size_t a = 0; a < K; ++a) instance.values.push_back(unit(rng));
    experts.table = Matrix<AgentId>(m, m);
    for (std::size_t h = 0; h < m; ++h)
      for (std::size_t x = 0; x < m; ++x) experts.table(h, x) = (h + x) % K;
    pi = exact_pi_table(instance, experts);
    bids = instance.values;
  }
};

void BM_BuildEnvelope(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(build_envelope(f.pi, f.bids, 0));
}
BENCHMARK(BM_BuildEnvelope)->Args({3, 3})->Args({5, 16})->Args({10, 64});

void BM_MyersonPayment(benchmark::State& state) {
  const Fixture f(5, static_cast<std::size_t>(state.range(0)));
  const Envelope env = build_envelope(f.pi, f.bids, 0);
  double b = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(myerson_payment(env, b));
    b = b >= 1.0 ? 0.0 : b + 1e-3;
  }
}
BENCHMARK(BM_MyersonPayment)->Arg(3)->Arg(64);

void BM_BestResponse(benchmark::State& state) {
  const Fixture f(5, static_cast<std::size_t>(state.range(0)));
  const MechanismSnapshot snapshot{f.pi, f.pi};
  for (auto _ : state) benchmark::DoNotOptimize(best_response(snapshot, f.bids, 0, f.bids[0]));
}
BENCHMARK(BM_BestResponse)->Arg(3)->Arg(16);

void BM_RunTruthful(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  RunConfig config = basic_config(example_instance(), example_experts(),
                                  {MechanismKind::kContextualGreedy, 0.2, 0}, T, 1);
  config.keep_rounds = false;
  for (auto _ : state) benchmark::DoNotOptimize(run(config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(T));
}
BENCHMARK(BM_RunTruthful)->Arg(10000);

void BM_RunAlphaRational(benchmark::State& state) {
  const auto T = static_cast<std::size_t>(state.range(0));
  RunConfig config = basic_config(example_instance(), example_experts(),
                                  {MechanismKind::kContextualGreedy, 0.2, 0}, T, 1);
  config.policies.assign(3, AgentPolicy::alpha_rational(0.05));
  config.keep_rounds = false;
  for (auto _ : state) benchmark::DoNotOptimize(run(config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(T));
}
BENCHMARK(BM_RunAlphaRational)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
