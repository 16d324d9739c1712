#include <benchmark/benchmark.h>

#include "projprime/arith.hpp"
#include "projprime/bunyakovsky.hpp"
#include "projprime/projective.hpp"
#include "projprime/search.hpp"

using namespace projprime;

namespace {

void BM_FixedNReference(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(search::reference::search_fixed_n(n, 200000, {}));
}

void BM_FixedNParallel(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  search::RunControl c;
  c.workers = static_cast<int>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(search::search_fixed_n(n, 200000, 20000, {}, projective::kDefaultTrialBound, c));
}

void BM_PolyCountReference(benchmark::State& state) {
  const auto f = bunyakovsky::IntPolynomial::parse("1,1,1");
  for (auto _ : state)
    benchmark::DoNotOptimize(bunyakovsky::reference::count_prime_values(f, 200000, bunyakovsky::ValueDomain::Naturals));
}

void BM_PolyCountParallel(benchmark::State& state) {
  const auto f = bunyakovsky::IntPolynomial::parse("1,1,1");
  bunyakovsky::CountOptions o;
  o.workers = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        bunyakovsky::count_prime_values(f, 200000, bunyakovsky::ValueDomain::Naturals, {}, o));
}

void BM_IsPrimeRepunit(benchmark::State& state) {
  const BigInt m = projective::repunit(BigInt(3), static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(arith::is_prime(m));
}

}  // namespace

BENCHMARK(BM_FixedNReference)->Arg(3)->Arg(31)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FixedNParallel)->Args({3, 1})->Args({3, 0})->Args({31, 1})->Args({31, 0})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PolyCountReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PolyCountParallel)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IsPrimeRepunit)->Arg(71)->Arg(541)->Arg(1091)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
