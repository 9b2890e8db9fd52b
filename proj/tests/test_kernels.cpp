#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "skillroute/kernels.hpp"
#include "support.hpp"

using namespace skillroute;
using namespace testing_support;
namespace k = skillroute::kernels;

namespace {

std::vector<k::FeatureRow> random_features(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0, 1);
  std::vector<k::FeatureRow> f(n);
  for (auto& r : f) r = {g(rng), g(rng), g(rng), 1.0};
  return f;
}

k::WeightMatrix random_weights(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0, 2);
  k::WeightMatrix w;
  for (auto& row : w)
    for (double& x : row) x = g(rng);
  return w;
}

void check_close(double a, double b) { CHECK(std::abs(a - b) <= 1e-10 * (1 + std::abs(b))); }

}  // namespace

// Sizes straddle the reduction chunk so partial chunks are exercised.
TEST_CASE("OpenMP kernels agree with the serial reference") {
  std::mt19937_64 rng(17);
  for (std::size_t n : {std::size_t{1}, std::size_t{100}, k::kReduceChunk - 1, k::kReduceChunk + 1,
                        3 * k::kReduceChunk + 77}) {
    CAPTURE(n);
    std::uniform_real_distribution<double> u(-0.2, 1.2);
    std::vector<double> values(n);
    for (double& v : values) v = u(rng);
    CHECK(k::serial::bin_counts(values, 0, 1, 37) == k::omp::bin_counts(values, 0, 1, 37));

    const auto features = random_features(rng, n);
    const auto w = random_weights(rng);
    std::vector<k::ClassRow> ps(n), po(n);
    k::serial::softmax_forward(features, w, ps);
    k::omp::softmax_forward(features, w, po);
    CHECK(ps == po);

    std::uniform_int_distribution<int> lab(0, 3);
    std::vector<std::uint8_t> labels(n);
    for (auto& l : labels) l = static_cast<std::uint8_t>(lab(rng));
    const k::DiceSums ds = k::serial::dice_sums(ps, labels);
    const k::DiceSums dp = k::omp::dice_sums(ps, labels);
    for (int c = 0; c < 4; ++c) {
      check_close(dp.intersection[c], ds.intersection[c]);
      check_close(dp.predicted[c], ds.predicted[c]);
      CHECK(dp.truth[c] == ds.truth[c]);
    }

    const k::ClassRow a{-0.3, -0.1, -0.7, -0.2}, b{0.01, 0.02, 0.03, 0.04};
    const auto gs = k::serial::softmax_weight_gradient(features, ps, labels, a, b);
    const auto gp = k::omp::softmax_weight_gradient(features, ps, labels, a, b);
    for (int c = 0; c < 4; ++c)
      for (int f = 0; f < 4; ++f) check_close(gp[c][f], gs[c][f]);

    const std::array<double, 3> centers{0.1, 0.5, 0.9};
    std::vector<std::uint8_t> as(n), ap(n);
    const auto ks = k::serial::kmeans_assign(values, centers, as);
    const auto kp = k::omp::kmeans_assign(values, centers, ap);
    CHECK(as == ap);
    for (int c = 0; c < 3; ++c) {
      CHECK(ks.count[c] == kp.count[c]);
      check_close(kp.sum[c], ks.sum[c]);
    }
  }
}

TEST_CASE("neighborhood statistics agree and match a hand computation") {
  const Volume v({3, 1, 1}, {}, {1, 2, 6});
  const MaskVolume m({3, 1, 1}, {}, {1, 1, 0});
  const auto s = k::serial::neighborhood_stats(v, m);
  CHECK(s.mean[0] == 1.5);
  CHECK(s.stddev[0] == 0.5);
  CHECK(s.mean[1] == 1.5);
  CHECK(s.mean[2] == 0.0);  // outside the mask

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const Dims d = random_dims(rng, 12);
    const Volume rv = random_volume(rng, d);
    const MaskVolume rm = random_mask(rng, d);
    const auto a = k::serial::neighborhood_stats(rv, rm);
    const auto b = k::omp::neighborhood_stats(rv, rm);
    CHECK(a.mean == b.mean);
    CHECK(a.stddev == b.stddev);
  }
}

TEST_CASE("OpenMP reductions do not depend on the thread count") {
  std::mt19937_64 rng(29);
  const std::size_t n = 5 * k::kReduceChunk + 3;
  const auto features = random_features(rng, n);
  const auto w = random_weights(rng);
  std::vector<k::ClassRow> p(n);
  k::serial::softmax_forward(features, w, p);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::uint8_t>(i % 4);

  const k::ClassRow a{-1, -1, -1, -1}, b{0.1, 0.1, 0.1, 0.1};
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  const auto one = k::omp::softmax_weight_gradient(features, p, labels, a, b);
  const auto d1 = k::omp::dice_sums(p, labels);
#ifdef _OPENMP
  omp_set_num_threads(7);
#endif
  const auto many = k::omp::softmax_weight_gradient(features, p, labels, a, b);
  const auto d7 = k::omp::dice_sums(p, labels);
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif
  CHECK(one == many);
  CHECK(d1.intersection == d7.intersection);
  CHECK(d1.predicted == d7.predicted);
}
