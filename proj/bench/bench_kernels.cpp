#include <benchmark/benchmark.h>
#include <omp.h>

#include "burststream/prospicient.hpp"

using namespace bst;

namespace {

BitMatrix square(size_t n, uint64_t seed) {
  Rng rng(seed);
  return BitMatrix::random(n, n, rng);
}

void BM_RankReference(benchmark::State &st) {
  const BitMatrix m = square(size_t(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(reference::rank(m));
}

void BM_RankKernel(benchmark::State &st) {
  const BitMatrix m = square(size_t(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(rank(m));
}

void BM_SolveReference(benchmark::State &st) {
  const size_t n = size_t(st.range(0));
  Rng rng(2);
  const BitMatrix a = BitMatrix::random_invertible(n, rng);
  const BitVector b = BitVector::random(n, rng);
  for (auto _ : st) benchmark::DoNotOptimize(reference::solve_unique(a, b));
}

void BM_SolveKernel(benchmark::State &st) {
  const size_t n = size_t(st.range(0));
  Rng rng(2);
  const BitMatrix a = BitMatrix::random_invertible(n, rng);
  const BitVector b = BitVector::random(n, rng);
  for (auto _ : st) benchmark::DoNotOptimize(solve_unique(a, b));
}

void BM_SolveFixed(benchmark::State &st) {
  const size_t n = size_t(st.range(0));
  Rng rng(2);
  const FixedSolver s(BitMatrix::random_invertible(n, rng));
  const BitVector b = BitVector::random(n, rng);
  for (auto _ : st) benchmark::DoNotOptimize(s.solve(b));
}

// Packet encoding of a whole trace; the argument is the thread count.
void BM_EncodeTrace(benchmark::State &st) {
  Rng rng(3);
  const auto spec = DiagonalSourceSpec::random({3, 2, 1}, rng);
  const ProspicientCodec codec(spec, 1, 1, make_bincode(spec, 1, 1, 256, 8, 4));
  const StreamTrace tr = gen_diagonal(spec, 256, 64, 5);
  omp_set_num_threads(int(st.range(0)));
  codec.encode(tr);
  for (auto _ : st) benchmark::DoNotOptimize(codec.encode(tr));
}

}  // namespace

BENCHMARK(BM_RankReference)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_RankKernel)->Arg(64)->Arg(256)->Arg(512)->Arg(2048);
BENCHMARK(BM_SolveReference)->Arg(64)->Arg(256);
BENCHMARK(BM_SolveKernel)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_SolveFixed)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_EncodeTrace)->Arg(1)->DenseRange(2, 8, 2)->UseRealTime();

BENCHMARK_MAIN();
