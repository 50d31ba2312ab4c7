#include <cmath>
#include <vector>

#include "doctest.h"
#include "netdiff/errors.hpp"
#include "netdiff/rng.hpp"
#include "netdiff/schedule.hpp"
#include "netdiff/tensor.hpp"

using netdiff::model::NoiseSchedule;
using netdiff::model::ScheduleConfig;
using netdiff::numerics::Rng;
using netdiff::numerics::Tensor;

TEST_CASE("variance spacing is linear between the endpoints") {
  auto s = NoiseSchedule::build(ScheduleConfig{500, 1e-6, 2e-2});
  CHECK(s.beta(1) == doctest::Approx(1e-6).epsilon(1e-15));
  CHECK(s.beta(500) == doctest::Approx(2e-2).epsilon(1e-15));
  const double step = (2e-2 - 1e-6) / 499.0;
  for (int n = 2; n <= 500; ++n)
    CHECK(s.beta(n) - s.beta(n - 1) == doctest::Approx(step).epsilon(1e-9));
}

TEST_CASE("cumulative signal level matches a sequential long-double product") {
  auto s = NoiseSchedule::build(ScheduleConfig{500, 1e-6, 2e-2});
  CHECK(s.alpha_bar(0) == 1.0);
  long double prod = 1.0L;
  for (int n = 1; n <= 500; ++n) {
    prod *= 1.0L - static_cast<long double>(s.beta(n));
    const double expect = static_cast<double>(prod);
    CHECK(std::fabs(s.alpha_bar(n) - expect) / expect < 1e-12);
  }
  // strictly decreasing and bounded
  for (int n = 1; n <= 500; ++n) CHECK(s.alpha_bar(n) < s.alpha_bar(n - 1));
  CHECK(s.alpha_bar(500) > 0.0);
}

TEST_CASE("posterior noise scale follows the closed form and vanishes at n=1") {
  auto s = NoiseSchedule::build(ScheduleConfig{500, 1e-6, 2e-2});
  CHECK(s.sigma(1) == 0.0);  // alpha_bar(0) = 1 makes the first step noiseless
  for (int n = 2; n <= 500; ++n) {
    const double expect =
        std::sqrt(s.beta(n) * (1.0 - s.alpha_bar(n - 1)) / (1.0 - s.alpha_bar(n)));
    CHECK(s.sigma(n) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(s.sigma(n) > 0.0);
    CHECK(s.sigma(n) < std::sqrt(s.beta(n)) * 1.0000001);
  }
}

TEST_CASE("index bounds are enforced") {
  auto s = NoiseSchedule::build(ScheduleConfig{10, 1e-4, 0.1});
  CHECK(s.n_steps() == 10);
  CHECK_THROWS_AS(s.beta(0), netdiff::ContractError);
  CHECK_THROWS_AS(s.beta(11), netdiff::ContractError);
  CHECK_THROWS_AS(s.alpha_bar(-1), netdiff::ContractError);
  CHECK_THROWS_AS(s.alpha_bar(11), netdiff::ContractError);
  CHECK_THROWS_AS(s.sigma(0), netdiff::ContractError);
}

TEST_CASE("schedule configuration is validated") {
  CHECK_THROWS_AS(NoiseSchedule::build({1, 1e-6, 2e-2}), netdiff::ConfigError);
  CHECK_THROWS_AS(NoiseSchedule::build({100, 0.0, 2e-2}), netdiff::ConfigError);
  CHECK_THROWS_AS(NoiseSchedule::build({100, 2e-2, 1e-6}), netdiff::ConfigError);
  CHECK_THROWS_AS(NoiseSchedule::build({100, 1e-6, 1.0}), netdiff::ConfigError);
  (void)NoiseSchedule::build({2, 1e-6, 2e-2});  // minimal legal size
}

TEST_CASE("sampled noise levels interpolate adjacent signal levels") {
  auto s = NoiseSchedule::build(ScheduleConfig{50, 1e-4, 0.2});
  Rng rng(3, 0);
  const double top = std::sqrt(s.alpha_bar(1));
  const double bottom = std::sqrt(s.alpha_bar(50));
  for (int i = 0; i < 5000; ++i) {
    const double level = s.sample_noise_level(rng);
    CHECK(level >= bottom);
    CHECK(level <= top);
    // must lie inside some adjacent pair of signal levels
    bool inside = false;
    for (int n = 2; n <= 50 && !inside; ++n)
      inside = level >= std::sqrt(s.alpha_bar(n)) && level <= std::sqrt(s.alpha_bar(n - 1));
    CHECK(inside);
  }
}

TEST_CASE("noise levels cover the whole range densely") {
  auto s = NoiseSchedule::build(ScheduleConfig{50, 1e-4, 0.2});
  Rng rng(4, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 5000; ++i) {
    const double level = s.sample_noise_level(rng);
    lo = std::min(lo, level);
    hi = std::max(hi, level);
  }
  CHECK(lo < std::sqrt(s.alpha_bar(49)));  // reaches the noisiest band
  CHECK(hi > std::sqrt(s.alpha_bar(2)));   // reaches the cleanest band
}

TEST_CASE("closed-form corruption mixes signal and noise by the level") {
  Tensor x0({2, 4}, {1, -1, 0.5, 0, -0.25, 1, -1, 0.125});
  Tensor eps({2, 4}, {0.3, -0.7, 1.1, -0.2, 0.9, 0.0, -1.3, 0.4});
  const double level = 0.8;  // sqrt(alpha_bar)
  Tensor xn = NoiseSchedule::forward_diffuse(x0, eps, level);
  const double noise = std::sqrt(1.0 - level * level);
  for (std::int64_t i = 0; i < x0.size(); ++i)
    CHECK(xn[i] == doctest::Approx(level * x0[i] + noise * eps[i]).epsilon(1e-14));

  // per-row levels match the scalar form row by row
  Tensor levels({2, 1}, {0.9, 0.3});
  Tensor per_row = NoiseSchedule::forward_diffuse(x0, eps, levels);
  for (std::int64_t r = 0; r < 2; ++r) {
    Tensor row_x({1, 4});
    Tensor row_e({1, 4});
    for (std::int64_t c = 0; c < 4; ++c) {
      row_x[c] = x0.at(r, c);
      row_e[c] = eps.at(r, c);
    }
    Tensor expect = NoiseSchedule::forward_diffuse(row_x, row_e, levels[r]);
    for (std::int64_t c = 0; c < 4; ++c)
      CHECK(per_row.at(r, c) == expect[c]);
  }

  CHECK_THROWS_AS(NoiseSchedule::forward_diffuse(x0, eps, 0.0), netdiff::ContractError);
  CHECK_THROWS_AS(NoiseSchedule::forward_diffuse(x0, eps, 1.5), netdiff::ContractError);
  Tensor bad_eps({1, 3}, {0, 0, 0});
  CHECK_THROWS_AS(NoiseSchedule::forward_diffuse(x0, bad_eps, 0.5), netdiff::ContractError);
}

TEST_CASE("corruption statistics match the closed form at several depths") {
  // small version of the moment check: mean -> level*x0, var -> 1 - level^2
  auto s = NoiseSchedule::build(ScheduleConfig{100, 1e-5, 0.05});
  Tensor x0({1, 8}, {0.9, -0.9, 0.5, -0.5, 0.25, -0.25, 0.0, 1.0});
  Rng rng(42, 17);
  for (int n : {10, 60, 100}) {
    const double level = std::sqrt(s.alpha_bar(n));
    const int draws = 4000;
    std::vector<double> mean(8, 0.0), var(8, 0.0);
    for (int k = 0; k < draws; ++k) {
      Tensor eps = Tensor::gaussian(rng, {1, 8});
      Tensor xn = NoiseSchedule::forward_diffuse(x0, eps, level);
      for (int i = 0; i < 8; ++i) {
        mean[static_cast<std::size_t>(i)] += xn[i];
        var[static_cast<std::size_t>(i)] += xn[i] * xn[i];
      }
    }
    const double expect_var = 1.0 - level * level;
    const double se = std::sqrt(expect_var / draws);
    for (int i = 0; i < 8; ++i) {
      const auto u = static_cast<std::size_t>(i);
      mean[u] /= draws;
      var[u] = var[u] / draws - mean[u] * mean[u];
      CHECK(std::fabs(mean[u] - level * x0[i]) < 4.0 * se);
      CHECK(var[u] == doctest::Approx(expect_var).epsilon(0.15));
    }
  }
}
