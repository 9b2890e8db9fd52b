// Serial reference kernels against their OpenMP counterparts. The argument is
// the cube side, so the voxel count is side^3.

#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "skillroute/kernels.hpp"

namespace {

using namespace skillroute;
namespace k = skillroute::kernels;

struct Fixture {
  Volume volume;
  MaskVolume mask;
  std::vector<double> values;
  std::vector<k::FeatureRow> features;
  std::vector<k::ClassRow> probs;
  std::vector<std::uint8_t> labels;
  k::WeightMatrix weights{};

  explicit Fixture(std::size_t side)
      : volume(Dims{side, side, side}, {}, random_values(side * side * side)),
        mask(Dims{side, side, side}, {}, std::vector<std::uint8_t>(side * side * side, 1)) {
    const std::size_t n = side * side * side;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    values.assign(volume.values().begin(), volume.values().end());
    features.resize(n);
    for (auto& f : features) f = {u(rng), u(rng), u(rng), 1.0};
    for (auto& row : weights)
      for (double& w : row) w = u(rng) - 0.5;
    probs.resize(n);
    k::serial::softmax_forward(features, weights, probs);
    labels.resize(n);
    for (auto& l : labels) l = static_cast<std::uint8_t>(rng() % kClassCount);
  }

  static std::vector<double> random_values(std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
  }
};

const Fixture& fixture(std::size_t side) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(side);
  if (it == cache.end()) it = cache.emplace(side, Fixture(side)).first;
  return it->second;
}

template <bool Parallel>
void BM_BinCounts(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto h = Parallel ? k::omp::bin_counts(f.values, 0, 1, 128)
                      : k::serial::bin_counts(f.values, 0, 1, 128);
    benchmark::DoNotOptimize(h);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.values.size()));
}

template <bool Parallel>
void BM_NeighborhoodStats(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto s = Parallel ? k::omp::neighborhood_stats(f.volume, f.mask)
                      : k::serial::neighborhood_stats(f.volume, f.mask);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.values.size()));
}

template <bool Parallel>
void BM_SoftmaxForward(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<k::ClassRow> out(f.features.size());
  for (auto _ : state) {
    if (Parallel) {
      k::omp::softmax_forward(f.features, f.weights, out);
    } else {
      k::serial::softmax_forward(f.features, f.weights, out);
    }
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Parallel>
void BM_DiceSums(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto s = Parallel ? k::omp::dice_sums(f.probs, f.labels) : k::serial::dice_sums(f.probs, f.labels);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.probs.size()));
}

template <bool Parallel>
void BM_WeightGradient(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  const k::ClassRow a{-0.01, -0.02, -0.03, -0.04}, b{1e-4, 2e-4, 3e-4, 4e-4};
  for (auto _ : state) {
    auto g = Parallel ? k::omp::softmax_weight_gradient(f.features, f.probs, f.labels, a, b)
                      : k::serial::softmax_weight_gradient(f.features, f.probs, f.labels, a, b);
    benchmark::DoNotOptimize(g);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.probs.size()));
}

template <bool Parallel>
void BM_KMeansAssign(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<std::uint8_t> assignment(f.values.size());
  const std::array<double, 3> centers{0.2, 0.5, 0.8};
  for (auto _ : state) {
    auto s = Parallel ? k::omp::kmeans_assign(f.values, centers, assignment)
                      : k::serial::kmeans_assign(f.values, centers, assignment);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.values.size()));
}

#define SKILLROUTE_BENCH_PAIR(fn)                                                 \
  BENCHMARK(fn<false>)->Name(#fn "/serial")->Arg(32)->Arg(64)->Arg(128)->UseRealTime(); \
  BENCHMARK(fn<true>)->Name(#fn "/omp")->Arg(32)->Arg(64)->Arg(128)->UseRealTime();

SKILLROUTE_BENCH_PAIR(BM_BinCounts)
SKILLROUTE_BENCH_PAIR(BM_NeighborhoodStats)
SKILLROUTE_BENCH_PAIR(BM_SoftmaxForward)
SKILLROUTE_BENCH_PAIR(BM_DiceSums)
SKILLROUTE_BENCH_PAIR(BM_WeightGradient)
SKILLROUTE_BENCH_PAIR(BM_KMeansAssign)

}  // namespace

BENCHMARK_MAIN();
