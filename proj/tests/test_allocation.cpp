#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "obsched/allocation.hpp"
#include "obsched/dispositions.hpp"
#include "obsched/gains.hpp"
#include "obsched/rng.hpp"

using namespace obsched;

namespace {

// Contiguous K x t gain matrix with a view over it.
struct TestGains {
  int K;
  int t;
  std::vector<double> c;
  TestGains(int users, int beams, std::vector<double> values)
      : K(users), t(beams), c(std::move(values)) {}
  GainView view() const {
    return GainView{c.data(), K, t, static_cast<std::size_t>(t)};
  }
};

}  // namespace

TEST_CASE("binomial coefficients and subset enumeration") {
  REQUIRE(binomial(4, 2) == 6);
  REQUIRE(binomial(8, 0) == 1);
  REQUIRE(binomial(8, 8) == 1);
  REQUIRE(binomial(3, 5) == 0);

  const auto subsets = beam_subsets(4, 2);
  REQUIRE(subsets.size() == 6);
  REQUIRE(subsets[0] == std::vector<int>{0, 1});
  REQUIRE(subsets[1] == std::vector<int>{0, 2});
  REQUIRE(subsets[2] == std::vector<int>{0, 3});
  REQUIRE(subsets[3] == std::vector<int>{1, 2});
  REQUIRE(subsets[4] == std::vector<int>{1, 3});
  REQUIRE(subsets[5] == std::vector<int>{2, 3});

  REQUIRE_THROWS_AS(beam_subsets(4, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(beam_subsets(4, 5), std::invalid_argument);
}

TEST_CASE("dispositions round-trip through their index") {
  for (int t : {1, 2, 3, 4, 6}) {
    const auto all = all_dispositions(t);
    long expected = 0;
    for (int size = 1; size <= t; ++size) expected += binomial(t, size);
    REQUIRE(static_cast<long>(all.size()) == expected);
    for (const Disposition& d : all) {
      const Disposition rebuilt = make_disposition(t, d.t_active, d.index);
      REQUIRE(rebuilt.beams == d.beams);
      REQUIRE(static_cast<int>(d.beams.size()) == d.t_active);
    }
  }
  REQUIRE_THROWS_AS(make_disposition(4, 2, 6), std::invalid_argument);
}

TEST_CASE("snir matches the hand-computed two-beam case") {
  // c = [[2, 1]], p = (2, 1): user 1 on beam 0 sees 2*2 / (1 + 1*1) = 2.
  const TestGains gains(1, 2, {2.0, 1.0});
  const PowerRow p{2.0, 1.0};
  REQUIRE(snir(gains.view(), p, 1, 0) == Catch::Approx(2.0));
  // Zero own power gives zero SNIR regardless of interference.
  const PowerRow off{0.0, 1.0};
  REQUIRE(snir(gains.view(), off, 1, 0) == 0.0);
}

TEST_CASE("snir validates its arguments") {
  const TestGains gains(2, 2, {1.0, 1.0, 1.0, 1.0});
  const PowerRow p{1.0, 1.0};
  REQUIRE_THROWS_AS(snir(gains.view(), p, 0, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(snir(gains.view(), p, 3, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(snir(gains.view(), p, 1, 2), std::invalid_argument);
  const PowerRow wrong{1.0};
  REQUIRE_THROWS_AS(snir(gains.view(), wrong, 1, 0), std::invalid_argument);
  const PowerRow negative{-0.5, 1.0};
  REQUIRE_THROWS_AS(snir(gains.view(), negative, 1, 0), std::invalid_argument);
}

TEST_CASE("weighted metric sums mu-weighted rates minus power cost") {
  // Two beams, users 1 and 2, gains [[4, 1], [1, 4]], p = (1, 1),
  // mu = (1, 0.5), lambda = 0.1:
  //   user 1: gamma = 4/2 = 2, term 1*log2(3) - 0.1
  //   user 2: gamma = 4/2 = 2, term 0.5*log2(3) - 0.1
  const TestGains gains(2, 2, {4.0, 1.0, 1.0, 4.0});
  const UserRow u{1, 2};
  const PowerRow p{1.0, 1.0};
  const std::vector<double> mu{1.0, 0.5};
  const double expected = 1.5 * std::log2(3.0) - 0.2;
  REQUIRE(weighted_metric(u, p, mu, 0.1, gains.view()) == Catch::Approx(expected));

  // An active beam at zero power contributes nothing.
  const PowerRow half{1.0, 0.0};
  REQUIRE(weighted_metric(u, half, mu, 0.1, gains.view()) ==
          Catch::Approx(std::log2(5.0) - 0.1));
}

TEST_CASE("weighted metric rejects inconsistent rows") {
  const TestGains gains(2, 2, {1.0, 1.0, 1.0, 1.0});
  const std::vector<double> mu{1.0, 1.0};
  REQUIRE_THROWS_AS(
      weighted_metric({1, 1}, {1.0, 1.0}, mu, 0.0, gains.view()),
      std::invalid_argument);  // duplicate user
  REQUIRE_THROWS_AS(
      weighted_metric({1, 0}, {1.0, 1.0}, mu, 0.0, gains.view()),
      std::invalid_argument);  // idle beam with power
  REQUIRE_THROWS_AS(
      weighted_metric({3, 0}, {1.0, 0.0}, mu, 0.0, gains.view()),
      std::invalid_argument);  // user out of range
}

TEST_CASE("waterfill matches the closed form on one beam") {
  // mu = 2 ln2, lambda = 1, c = 1: level = 2, floor = 1 => p = 1.
  const TestGains gains(1, 1, {1.0});
  const UserRow u{1};
  const std::vector<double> mu{2.0 * k_ln2};
  const PowerRow p = waterfill(u, mu, 1.0, 0.0, gains.view());
  REQUIRE(p[0] == Catch::Approx(1.0));

  // Below the threshold the clamp engages: mu = ln2 => level = 1 = floor.
  const std::vector<double> low{k_ln2};
  REQUIRE(waterfill(u, low, 1.0, 0.0, gains.view())[0] == 0.0);
}

TEST_CASE("waterfill discounts cross-beam interference at the reference level") {
  // Two active beams, user 1 on beam 0: own gain 4, cross gain 2,
  // reference power 0.5 => floor = (1 + 0.5*2)/4 = 0.5.
  // mu = 1, lambda = 1/(2 ln2) => level = 2 => p = 1.5.
  const TestGains gains(2, 2, {4.0, 2.0, 3.0, 5.0});
  const UserRow u{1, 2};
  const std::vector<double> mu{1.0, 1.0};
  const double lambda = 1.0 / (2.0 * k_ln2);
  const PowerRow p = waterfill(u, mu, lambda, 0.5, gains.view());
  REQUIRE(p[0] == Catch::Approx(2.0 - 0.5));
  // user 2 on beam 1: floor = (1 + 0.5*3)/5 = 0.5 => p = 1.5 as well.
  REQUIRE(p[1] == Catch::Approx(1.5));

  REQUIRE_THROWS_AS(waterfill(u, mu, 0.0, 0.5, gains.view()),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(waterfill(u, mu, lambda, -1.0, gains.view()),
                    std::invalid_argument);
}

TEST_CASE("waterfill power never exceeds the price cap") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int K = 1 + static_cast<int>(rng.uniform() * 4);
    const int t = 1 + static_cast<int>(rng.uniform() * 4);
    TestGains gains(K, t, std::vector<double>(static_cast<std::size_t>(K) * t));
    for (auto& value : gains.c) value = -std::log(rng.uniform()) * 100.0;
    std::vector<double> mu(K);
    double mu_max = 0.0;
    for (auto& w : mu) {
      w = rng.uniform(0.1, 3.0);
      mu_max = std::max(mu_max, w);
    }
    const double lambda = rng.uniform(0.05, 5.0);
    const double V = rng.uniform(0.0, 1.0);
    UserRow u(t, 0);
    std::vector<int> order(K);
    for (int k = 0; k < K; ++k) order[k] = k + 1;
    for (int q = 0; q < std::min(K, t); ++q)
      if (rng.uniform() < 0.8) u[q] = order[q];

    const PowerRow p = waterfill(u, mu, lambda, V, gains.view());
    const double cap = mu_max / (lambda * k_ln2) + 1e-12;
    for (int q = 0; q < t; ++q) {
      REQUIRE(p[q] >= 0.0);
      REQUIRE(p[q] <= cap);
      if (u[q] == 0) REQUIRE(p[q] == 0.0);
    }
  }
}

TEST_CASE("optimal power fixed points are stationary") {
  // With a single active beam there is no cross-beam coupling, so the
  // converged power must be a stationary point of the full metric. (With
  // several active beams the search returns a best response per beam, not a
  // joint stationary point, and the returned iterate is the best seen by
  // metric rather than the last.)
  Rng rng(29);
  int interior = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int t = 2;
    TestGains gains(2, t, std::vector<double>(4));
    for (auto& value : gains.c) value = -std::log(rng.uniform()) * 30.0;
    const std::vector<double> mu{rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)};
    const double lambda = rng.uniform(0.3, 1.5);
    const UserRow u{1, 0};
    const PowerResult result = optimal_power(u, mu, lambda, gains.view(), 1e-12, 800);
    REQUIRE(result.converged);
    if (result.p[0] <= 1e-7) continue;
    ++interior;
    const double h = std::min(1e-6 * std::max(1.0, result.p[0]), 0.5 * result.p[0]);
    PowerRow up = result.p, down = result.p;
    up[0] += h;
    down[0] -= h;
    const double slope =
        (weighted_metric(u, up, mu, lambda, gains.view()) -
         weighted_metric(u, down, mu, lambda, gains.view())) /
        (2.0 * h);
    REQUIRE(std::abs(slope) < 1e-6);
  }
  REQUIRE(interior > 50);
}

TEST_CASE("optimal power never loses to its waterfill seed") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 2, t = 3;
    TestGains gains(K, t, std::vector<double>(static_cast<std::size_t>(K) * t));
    for (auto& value : gains.c) value = -std::log(rng.uniform()) * 60.0;
    const std::vector<double> mu{rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0)};
    const double lambda = rng.uniform(0.2, 2.0);
    const double V = rng.uniform(0.0, 0.4);
    const UserRow u{1, 2, 0};

    const PowerRow seed = waterfill(u, mu, lambda, V, gains.view());
    const double seed_metric = weighted_metric(u, seed, mu, lambda, gains.view());
    const PowerResult result =
        optimal_power(u, mu, lambda, gains.view(), 1e-9, 200, V);
    REQUIRE(result.metric >= seed_metric - 1e-12);
    REQUIRE(result.metric ==
            Catch::Approx(weighted_metric(u, result.p, mu, lambda, gains.view())));
  }
}

TEST_CASE("optimal power handles the all-idle row") {
  const TestGains gains(1, 2, {1.0, 1.0});
  const UserRow u{0, 0};
  const PowerResult result = optimal_power(u, {1.0}, 1.0, gains.view());
  REQUIRE(result.metric == 0.0);
  REQUIRE(result.converged);
  REQUIRE(result.p == PowerRow{0.0, 0.0});
}

TEST_CASE("allocation rows enforce the activity pairing") {
  Allocation alloc(2, 2);
  alloc.set_row(0, {1, 0}, {0.5, 0.0});
  REQUIRE(alloc.user(0, 0) == 1);
  REQUIRE(alloc.power(0, 0) == 0.5);
  REQUIRE(alloc.active_beams(0) == 1);

  // A zero-power beam is recorded as idle even if a user was proposed.
  alloc.set_row(1, {1, 2}, {0.0, 0.25});
  REQUIRE(alloc.user(1, 0) == 0);
  REQUIRE(alloc.user(1, 1) == 2);
  REQUIRE(alloc.active_beams(1) == 1);
  REQUIRE(alloc.total_power() == Catch::Approx(0.75));

  REQUIRE_THROWS_AS(alloc.set_row(0, {0, 0}, {0.1, 0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(alloc.set_row(0, {1, 1}, {0.1, 0.1}), std::invalid_argument);
  REQUIRE_THROWS_AS(alloc.set_row(5, {1, 0}, {0.1, 0.0}), std::invalid_argument);
}
