#include <doctest.h>

#include "skillroute/metrics.hpp"
#include "skillroute/segmenters.hpp"
#include "segmenter_fixtures.hpp"
#include "support.hpp"

#include <numeric>

using namespace skillroute;
using namespace testing_support;

namespace {

template <typename Fn>
ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoFailure;
}

SoftPrediction one_hot(const LabelVolume& l) {
  SoftPrediction p{l.dims(), std::vector<ClassRow>(l.size(), ClassRow{})};
  for (std::size_t i = 0; i < l.size(); ++i) p.probs[i][l[i]] = 1.0;
  return p;
}

}  // namespace

// --------------------------------------------------------------------------- k-means

TEST_CASE("k-means splits three separated constants exactly") {
  std::vector<double> values;
  for (double v : {0.9, 0.1, 0.5}) values.insert(values.end(), 20, v);
  const Volume vol({60, 1, 1}, {}, values);
  const LabelVolume l = segment_kmeans(vol, full_mask({60, 1, 1}));
  for (std::size_t i = 0; i < 60; ++i) {
    const std::uint8_t expected = values[i] == 0.1 ? kCsf : values[i] == 0.5 ? kGm : kWm;
    CHECK(l[i] == expected);
  }
}

TEST_CASE("k-means rejects degenerate inputs and labels background outside the mask") {
  CHECK(error_of([] { segment_kmeans(Volume({4, 1, 1}, {}, {2, 2, 2, 2}), full_mask({4, 1, 1})); }) ==
        ErrorCode::DegenerateClustering);
  CHECK(error_of([] { segment_kmeans(Volume({4, 1, 1}, {}, {1, 2, 1, 2}), full_mask({4, 1, 1})); }) ==
        ErrorCode::DegenerateClustering);
  CHECK(error_of([] { segment_kmeans(Volume({3, 1, 1}, {}, {1, 2, 3}), full_mask({1, 3, 1})); }) ==
        ErrorCode::DimsMismatch);

  const Volume v({7, 1, 1}, {}, {0.1, 0.1, 0.5, 0.5, 0.9, 0.9, 7});
  const LabelVolume l = segment_kmeans(v, MaskVolume({7, 1, 1}, {}, {1, 1, 1, 1, 1, 1, 0}));
  CHECK(l == LabelVolume({7, 1, 1}, {}, {1, 1, 2, 2, 3, 3, 0}));
}

TEST_CASE("k-means labels are ordered by cluster mean and independent of voxel order") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> values(300);
    for (double& v : values) v = g(rng);
    const Volume vol({300, 1, 1}, {}, values);
    const MaskVolume m = full_mask({300, 1, 1});
    const LabelVolume l = segment_kmeans(vol, m);
    std::array<double, 4> sum{}, n{};
    for (std::size_t i = 0; i < values.size(); ++i) {
      sum[l[i]] += values[i];
      n[l[i]] += 1;
    }
    CHECK(sum[1] / n[1] < sum[2] / n[2]);
    CHECK(sum[2] / n[2] < sum[3] / n[3]);

    // Same content, permuted grid: each voxel keeps its label.
    std::vector<std::size_t> perm(values.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> shuffled(values.size());
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = values[perm[i]];
    const LabelVolume ls = segment_kmeans(Volume({300, 1, 1}, {}, shuffled), m);
    for (std::size_t i = 0; i < perm.size(); ++i) CHECK(ls[i] == l[perm[i]]);
  }
}

// --------------------------------------------------------------------------- soft Dice

TEST_CASE("soft Dice loss of a perfect one-hot prediction is epsilon-limited") {
  std::mt19937_64 rng(37);
  const LabelVolume gt = random_labels(rng, {4, 4, 4});
  const auto r = soft_dice_loss(one_hot(gt), gt, full_mask({4, 4, 4}));
  CHECK(r.loss <= 1e-5);
  CHECK(r.loss >= 0);
}

TEST_CASE("uniform prediction against equal class quarters gives loss 3") {
  std::vector<std::uint8_t> labels(64);
  for (std::size_t i = 0; i < 64; ++i) labels[i] = static_cast<std::uint8_t>(i / 16);
  const LabelVolume gt({4, 4, 4}, {}, labels);
  const SoftPrediction uniform{{4, 4, 4}, std::vector<ClassRow>(64, ClassRow{0.25, 0.25, 0.25, 0.25})};
  const auto r = soft_dice_loss(uniform, gt, full_mask({4, 4, 4}));
  for (int c = 0; c < 4; ++c) CHECK(r.dsc[c] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(r.loss == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("a fully wrong one-hot prediction approaches loss 4") {
  std::vector<std::uint8_t> labels(64), wrong(64);
  for (std::size_t i = 0; i < 64; ++i) {
    labels[i] = static_cast<std::uint8_t>(i % 4);
    wrong[i] = static_cast<std::uint8_t>((i + 1) % 4);
  }
  const LabelVolume gt({4, 4, 4}, {}, labels);
  const auto r = soft_dice_loss(one_hot(LabelVolume({4, 4, 4}, {}, wrong)), gt, full_mask({4, 4, 4}));
  CHECK(r.loss == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("soft Dice loss matches the direct oracle and its gradient matches finite differences") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Dims d = random_dims(rng, 4);
    const LabelVolume gt = random_labels(rng, d);
    const MaskVolume m = random_mask(rng, d);
    SoftPrediction pred{d, std::vector<ClassRow>(d.voxel_count())};
    for (auto& row : pred.probs) {
      double s = 0;
      for (double& p : row) s += (p = u(rng));
      for (double& p : row) p /= s;
    }
    std::vector<std::array<double, 4>> probs(pred.probs.begin(), pred.probs.end());
    std::vector<int> labels(gt.values().begin(), gt.values().end());
    std::vector<bool> mask(m.values().begin(), m.values().end());

    const double eps = 1e-6;
    const auto r = soft_dice_loss(pred, gt, m, eps);
    CHECK(r.loss == doctest::Approx(soft_dice_oracle(probs, labels, mask, eps)).epsilon(1e-12));
    CHECK(r.loss >= 0);
    CHECK(r.loss <= 4);

    const double h = 1e-5;
    for (std::size_t v = 0; v < probs.size(); ++v) {
      for (int c = 0; c < 4; ++c) {
        auto up = probs, down = probs;
        up[v][c] += h;
        down[v][c] -= h;
        const double fd = (soft_dice_oracle(up, labels, mask, eps) -
                           soft_dice_oracle(down, labels, mask, eps)) / (2 * h);
        const double an = r.grad[v][c];
        const double scale = std::max({std::abs(fd), std::abs(an), 1e-12});
        CHECK(std::abs(an - fd) / scale < 1e-4);
      }
    }
  }
}

TEST_CASE("three-class loss drops the background term") {
  std::mt19937_64 rng(43);
  const LabelVolume gt = random_labels(rng, {3, 3, 3});
  const MaskVolume m = full_mask({3, 3, 3});
  SoftPrediction pred{{3, 3, 3}, std::vector<ClassRow>(27, ClassRow{0.1, 0.2, 0.3, 0.4})};
  const auto four = soft_dice_loss(pred, gt, m, 1e-6, true);
  const auto three = soft_dice_loss(pred, gt, m, 1e-6, false);
  CHECK(three.loss == doctest::Approx(four.loss - (1 - four.dsc[0])).epsilon(1e-12));
  for (const auto& g : three.grad) CHECK(g[0] == 0.0);
}

TEST_CASE("soft Dice loss errors") {
  const LabelVolume gt({2, 1, 1}, {}, {0, 1});
  const SoftPrediction pred{{2, 1, 1}, std::vector<ClassRow>(2, ClassRow{0.25, 0.25, 0.25, 0.25})};
  CHECK(error_of([&] { soft_dice_loss(pred, gt, full_mask({2, 1, 1}), 0.0); }) == ErrorCode::BadEpsilon);
  CHECK(error_of([&] { soft_dice_loss(pred, gt, full_mask({1, 2, 1})); }) == ErrorCode::DimsMismatch);
  const SoftPrediction wrong{{1, 2, 1}, pred.probs};
  CHECK(error_of([&] { soft_dice_loss(wrong, gt, full_mask({2, 1, 1})); }) == ErrorCode::DimsMismatch);
}

// --------------------------------------------------------------------------- classifier

TEST_CASE("training on the separable fixture converges") {
  const std::vector<LabeledVolume> data{separable_example()};
  const TrainResult r = train_voxel_classifier(data);
  REQUIRE(r.loss_trajectory.size() == TrainConfig{}.epochs + 1);
  CHECK(r.loss_trajectory.back() < kSeparableFinalLoss4);
  for (std::size_t e = 11; e < r.loss_trajectory.size(); ++e) {
    CHECK(r.loss_trajectory[e] <= r.loss_trajectory[e - 1] + 1e-9);
  }
  const auto pred = predict_voxel_classifier(r.params, data[0].volume, data[0].mask);
  const EvaluationReport rep = evaluate_volume(pred.labels, data[0].labels, data[0].mask);
  for (double d : rep.per_class_dsc) CHECK(d >= kSeparableMinDsc);

  TrainConfig three;
  three.include_background = false;
  CHECK(train_voxel_classifier(data, three).loss_trajectory.back() < kSeparableFinalLoss3);
}

TEST_CASE("one epoch records the initial and final loss") {
  TrainConfig cfg;
  cfg.epochs = 1;
  const TrainResult r = train_voxel_classifier({separable_example()}, cfg);
  CHECK(r.loss_trajectory.size() == 2);
  CHECK(r.loss_trajectory[1] < r.loss_trajectory[0]);

  cfg.epochs = 0;
  CHECK(error_of([&] { train_voxel_classifier({separable_example()}, cfg); }) == ErrorCode::BadConfig);
  CHECK(error_of([] { train_voxel_classifier({}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("training is deterministic for a fixed seed") {
  TrainConfig cfg;
  cfg.epochs = 20;
  const std::vector<LabeledVolume> data{separable_example()};
  const TrainResult a = train_voxel_classifier(data, cfg);
  const TrainResult b = train_voxel_classifier(data, cfg);
  CHECK(a.params == b.params);
  CHECK(a.loss_trajectory == b.loss_trajectory);
  cfg.seed = 43;
  CHECK_FALSE(train_voxel_classifier(data, cfg).params == a.params);
}

TEST_CASE("prediction: zero weights give uniform probabilities and background by tie-break") {
  std::mt19937_64 rng(47);
  const Dims d{5, 4, 3};
  const Volume v = random_volume(rng, d);
  const MaskVolume m = random_mask(rng, d);
  const Prediction p = predict_voxel_classifier(ModelParams{}, v, m);
  CHECK(p.labels.dims() == d);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(p.labels[i] == kBackground);
    if (m[i]) {
      for (double q : p.soft.probs[i]) CHECK(q == doctest::Approx(0.25));
    } else {
      CHECK(p.soft.probs[i] == ClassRow{1, 0, 0, 0});
    }
  }
}

TEST_CASE("prediction: a large intensity weight for WM labels bright voxels WM") {
  ModelParams params;
  params.weights[3][0] = 50;  // class 3, intensity feature
  params.weights[1][3] = 10;  // class 1 wins elsewhere through the bias feature
  const Volume v({4, 1, 1}, {}, {0.0, 0.1, 0.9, 1.0});
  const Prediction p = predict_voxel_classifier(params, v, full_mask({4, 1, 1}));
  CHECK(p.labels[0] == kCsf);
  CHECK(p.labels[1] == kCsf);
  CHECK(p.labels[2] == kWm);
  CHECK(p.labels[3] == kWm);
}

TEST_CASE("prediction probabilities sum to one and labels are their argmax") {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> g(0, 3);
  for (int trial = 0; trial < 10; ++trial) {
    ModelParams params;
    for (auto& row : params.weights)
      for (double& w : row) w = g(rng);
    const Dims d = random_dims(rng, 6);
    const Volume v = random_volume(rng, d);
    const MaskVolume m = random_mask(rng, d);
    const Prediction p = predict_voxel_classifier(params, v, m);
    for (std::size_t i = 0; i < v.size(); ++i) {
      double s = 0;
      for (double q : p.soft.probs[i]) {
        CHECK(q >= 0);
        s += q;
      }
      CHECK(std::abs(s - 1) <= 1e-9);
      CHECK(p.labels[i] == argmax_class(p.soft.probs[i]));
    }
  }
  CHECK(argmax_class({0.3, 0.3, 0.2, 0.2}) == 0);
  CHECK(argmax_class({0.1, 0.3, 0.3, 0.3}) == 1);
}
