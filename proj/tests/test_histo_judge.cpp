#include <doctest.h>

#include "skillroute/histo_judge.hpp"
#include "support.hpp"

using namespace skillroute;
using namespace testing_support;

namespace {

Histogram from_counts(std::vector<double> counts) {
  Histogram h;
  h.bin_count = counts.size();
  h.counts = std::move(counts);
  return h;
}

std::vector<std::size_t> positions(const PeakSet& ps) {
  std::vector<std::size_t> x;
  for (const Peak& p : ps.peaks) x.push_back(p.x);
  return x;
}

PeakSet peaks(std::initializer_list<std::pair<std::size_t, double>> list) {
  PeakSet ps;
  for (auto [x, y] : list) ps.peaks.push_back({x, y});
  return ps;
}

JudgementConfig bins100() {
  JudgementConfig cfg;
  cfg.bin_count = 100;
  return cfg;
}

}  // namespace

TEST_CASE("build_histogram bins by floor with the top value in the last bin") {
  const Histogram h = build_histogram({{0, 0.5, 1.0}, {}}, 2, 0, 1);
  CHECK(h.counts == std::vector<double>{1, 2});
  CHECK(h.total == 3);
  CHECK_FALSE(h.smoothed);

  CHECK(build_histogram({{0.1, 0.3, 0.5, 0.7, 0.9}, {}}, 5, 0, 1).counts ==
        std::vector<double>{1, 1, 1, 1, 1});
  CHECK(build_histogram({{0.2, 0.2, 0.2}, {}}, 4, 0.2, 1).counts ==
        std::vector<double>{3, 0, 0, 0});
  // Out-of-range values clamp to the end bins.
  CHECK(build_histogram({{-5, 7}, {}}, 3, 0, 1).counts == std::vector<double>{1, 0, 1});

  CHECK_THROWS_AS(build_histogram({{}, {}}, 4, 0, 1), Error);
  CHECK_THROWS_AS(build_histogram({{0.5}, {}}, 4, 1, 1), Error);
}

TEST_CASE("histogram counts always sum to the voxel count") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.5, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    MaskedVoxels mv;
    for (int i = 0; i < 1000 + trial * 37; ++i) mv.values.push_back(n(rng));
    const Histogram h = build_histogram(mv, 1 + static_cast<std::size_t>(trial) * 7, 0, 1);
    double sum = 0;
    for (double c : h.counts) sum += c;
    CHECK(sum == static_cast<double>(mv.values.size()));
  }
}

TEST_CASE("smoothing averages over the in-range part of the window") {
  CHECK(smooth_histogram(from_counts({0, 3, 0}), 3).counts == std::vector<double>{1.5, 1, 1.5});
  CHECK(smooth_histogram(from_counts({4, 1, 7, 2}), 1).counts == std::vector<double>{4, 1, 7, 2});
  CHECK(smooth_histogram(from_counts({2, 2, 2, 2, 2}), 5).counts ==
        std::vector<double>{2, 2, 2, 2, 2});
  const Histogram s = smooth_histogram(from_counts({1, 2, 3}), 3);
  CHECK(s.smoothed);
  CHECK(s.bin_count == 3);

  CHECK_THROWS_AS(smooth_histogram(from_counts({1, 2, 3}), 2), Error);
  CHECK_THROWS_AS(smooth_histogram(from_counts({1, 2, 3}), 5), Error);
  CHECK_THROWS_AS(smooth_histogram(from_counts({1, 2, 3}), 0), Error);
}

TEST_CASE("detect_peaks finds prominent local maxima") {
  PeakSet one = detect_peaks(from_counts({1, 5, 1}), 0.01);
  REQUIRE(one.n() == 1);
  CHECK(one.peaks[0] == Peak{1, 5});

  CHECK(positions(detect_peaks(from_counts({1, 5, 1, 4, 1}), 0.01)) ==
        std::vector<std::size_t>{1, 3});

  // The dip between 5 and 5.05 is 4.9, so the minor peak's prominence is 0.1,
  // below 0.1 * 5.05.
  CHECK(positions(detect_peaks(from_counts({1, 5, 4.9, 5.05, 1}), 0.1)) ==
        std::vector<std::size_t>{3});

  // Edges use one-sided tests; plateaus report their leftmost bin.
  CHECK(positions(detect_peaks(from_counts({6, 2, 3, 3, 1}), 0.0)) ==
        std::vector<std::size_t>{0, 2});
  CHECK(positions(detect_peaks(from_counts({1, 2, 3}), 0.0)) == std::vector<std::size_t>{2});
  CHECK(detect_peaks(from_counts({0, 0, 0}), 0.0).n() == 0);
  CHECK(detect_peaks(from_counts({}), 0.0).n() == 0);

  // An edge peak's base is set by its inner side alone.
  CHECK(positions(detect_peaks(from_counts({8, 1, 1, 10, 1}), 0.5)) ==
        std::vector<std::size_t>{0, 3});
  CHECK(positions(detect_peaks(from_counts({8, 7, 7.5, 10, 1}), 0.2)) ==
        std::vector<std::size_t>{3});
  CHECK(positions(detect_peaks(from_counts({4}), 0.5)) == std::vector<std::size_t>{0});
}

TEST_CASE("detect_peaks output is strictly increasing in x") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> c(1 + trial % 60);
    for (double& v : c) v = std::floor(u(rng) / 10);  // many ties
    const PeakSet ps = detect_peaks(from_counts(c), 0.05);
    for (std::size_t i = 1; i < ps.n(); ++i) CHECK(ps.peaks[i].x > ps.peaks[i - 1].x);
    for (const Peak& p : ps.peaks) {
      CHECK(p.x < c.size());
      CHECK(p.y > 0);
    }
  }
}

TEST_CASE("judge evaluates the three rules on the two rightmost peaks") {
  const RoutingDecision pass = judge(peaks({{30, 1000}, {50, 900}}), bins100());
  CHECK(pass.target == Target::SkilledA);
  CHECK(pass.separation.passed);
  CHECK(pass.separation.lhs == 20);
  CHECK(pass.separation.rhs == doctest::Approx(0.01));
  CHECK(pass.height.passed);
  CHECK(pass.height.rhs == doctest::Approx(800));
  CHECK(pass.position.passed);
  CHECK(pass.position.rhs == doctest::Approx(80));
  CHECK_FALSE(pass.degenerate);

  const RoutingDecision short_last = judge(peaks({{30, 1000}, {50, 700}}), bins100());
  CHECK(short_last.target == Target::SkilledB);
  CHECK_FALSE(short_last.height.passed);

  const RoutingDecision too_bright = judge(peaks({{30, 1000}, {90, 950}}), bins100());
  CHECK(too_bright.target == Target::SkilledB);
  CHECK_FALSE(too_bright.position.passed);
  CHECK(too_bright.height.passed);

  const RoutingDecision single = judge(peaks({{40, 10}}), bins100());
  CHECK(single.degenerate);
  CHECK(single.target == Target::SkilledB);
  CHECK(judge(PeakSet{}, bins100()).degenerate);

  // Only the last two peaks matter.
  CHECK(judge(peaks({{5, 10}, {30, 1000}, {50, 900}}), bins100()).target == Target::SkilledA);
}

TEST_CASE("separation threshold: literal default is vacuous, explicit value bites") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> x(0, 127);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t a = x(rng), b = x(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    CHECK(judge(peaks({{a, 10}, {b, 10}}), JudgementConfig{}).separation.passed);
  }
  JudgementConfig strict;
  strict.separation = 5;
  CHECK_FALSE(judge(peaks({{40, 10}, {44, 10}}), strict).separation.passed);
  CHECK(judge(peaks({{40, 10}, {46, 10}}), strict).separation.passed);
}

TEST_CASE("rule 2 is monotone in the height of the last peak") {
  for (double y = 0; y <= 2000; y += 25) {
    const bool now = judge(peaks({{30, 1000}, {50, y}}), bins100()).height.passed;
    const bool higher = judge(peaks({{30, 1000}, {50, y + 25}}), bins100()).height.passed;
    CHECK((!now || higher));
  }
}

TEST_CASE("invalid judgement configs are rejected") {
  JudgementConfig c;
  c.smoothing_window = 4;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.height_ratio = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.position_ratio = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.bin_count = 1;
  c.smoothing_window = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.separation = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}
