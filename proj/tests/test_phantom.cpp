#include <doctest.h>

#include "skillroute/histo_judge.hpp"
#include "skillroute/metrics.hpp"
#include "skillroute/phantom.hpp"
#include "skillroute/preprocess.hpp"
#include "support.hpp"

using namespace skillroute;
using namespace testing_support;

namespace {

PhantomSpec crisp_spec() {
  PhantomSpec s;
  s.tissue_stddevs = {1e-4, 1e-4, 1e-4};
  return s;
}

std::size_t peak_count(const Phantom& p) {
  const Volume n = normalize(p.volume, p.mask).first;
  return judge_volume(n, p.mask, JudgementConfig{}).peakset.peaks.size();
}

}  // namespace

TEST_CASE("near-constant tissues give exactly three histogram peaks") {
  CHECK(peak_count(generate_phantom(crisp_spec())) == 3);
}

TEST_CASE("merging GM and WM intensities leaves two peaks") {
  PhantomSpec s = crisp_spec();
  s.tissue_means = {0.2, 0.7, 0.7 + 1e-9};
  CHECK(peak_count(generate_phantom(s)) == 2);
}

TEST_CASE("phantoms are deterministic in their seed") {
  PhantomSpec s;
  s.dims = {12, 10, 8};
  s.bias_amplitude = 0.1;
  const Phantom a = generate_phantom(s);
  const Phantom b = generate_phantom(s);
  CHECK(a.volume == b.volume);
  CHECK(a.labels == b.labels);
  CHECK(a.mask == b.mask);
  s.seed = 2;
  const Phantom c = generate_phantom(s);
  CHECK_FALSE(a.volume == c.volume);
  CHECK(a.labels == c.labels);
}

TEST_CASE("phantom invariants hold across random specs") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    PhantomSpec s;
    s.dims = {20 + rng() % 13, 20 + rng() % 13, 20 + rng() % 13};
    const double a = u(rng), b = u(rng), c = u(rng), total = (a + b + c) / u(rng);
    s.tissue_fractions = {a / total, b / total, c / total};
    if (s.tissue_fractions[0] + s.tissue_fractions[1] + s.tissue_fractions[2] > 1) {
      s.tissue_fractions = {a / (a + b + c), b / (a + b + c), c / (a + b + c)};
    }
    s.bias_amplitude = trial % 2 ? 0.2 : 0.0;
    s.seed = rng();
    const Phantom p = generate_phantom(s);

    std::array<double, 4> n{};
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
      CHECK((p.labels[i] != kBackground) == (p.mask[i] == 1));
      CHECK(p.volume[i] >= 0);
      CHECK(p.volume[i] <= 1);
      if (!p.mask[i]) CHECK(p.volume[i] == 0);
      n[p.labels[i]] += 1;
    }
    const double inside = n[1] + n[2] + n[3];
    REQUIRE(inside > 0);
    const double share_sum =
        s.tissue_fractions[0] + s.tissue_fractions[1] + s.tissue_fractions[2];
    for (int t = 0; t < 3; ++t) {
      CHECK(std::abs(n[t + 1] / inside - s.tissue_fractions[t] / share_sum) <= 0.02);
    }
    CHECK(evaluate_volume(p.labels, p.labels, p.mask).macro_dsc == 1.0);
  }
}

TEST_CASE("invalid phantom specs are rejected") {
  auto code = [](PhantomSpec s) {
    try {
      generate_phantom(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoFailure;
  };
  PhantomSpec s;
  s.tissue_fractions = {0.5, 0.5, 0.5};
  CHECK(code(s) == ErrorCode::BadSpec);
  s = {};
  s.tissue_stddevs[1] = -1;
  CHECK(code(s) == ErrorCode::BadSpec);
  s = {};
  s.dims = {0, 4, 4};
  CHECK(code(s) == ErrorCode::BadSpec);
}
