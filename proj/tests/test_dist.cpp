#include <doctest.h>

#include <cmath>

#include "entkit/gen.hpp"
#include "entkit/metrics.hpp"

using namespace entkit;

namespace {
const GroupContext kZ = GroupContext::z_lattice(1);
FinDist uz(std::vector<Coord> pts) {
  std::vector<CoordVec> s;
  for (Coord c : pts) s.push_back({c});
  return FinDist::uniform_on(kZ, s);
}
}  // namespace

TEST_CASE("entropy frozen values") {
  CHECK(entropy(uz({0, 1, 2})) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(entropy(FinDist::point_mass(kZ, {5})) == doctest::Approx(0.0));
  const FinDist p = FinDist::from_weights(
      kZ, {{{0}, 1.0 / 9}, {{1}, 2.0 / 9}, {{2}, 3.0 / 9}, {{3}, 2.0 / 9}, {{4}, 1.0 / 9}});
  // 5/3 ln 3 - 4/9 ln 2, expanded by hand
  CHECK(entropy(p) ==
        doctest::Approx(5.0 / 3.0 * std::log(3.0) - 4.0 / 9.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(entropy(p) == doctest::Approx(1.52296).epsilon(1e-5));
}

TEST_CASE("renyi identities on the self-convolution of {0,1,2}") {
  const FinDist conv = convolve(uz({0, 1, 2}), uz({0, 1, 2}), +1);
  CHECK(std::exp(renyi_entropy(conv, 0.0)) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(std::exp(renyi_entropy(conv, 2.0)) == doctest::Approx(81.0 / 19.0).epsilon(1e-12));
  CHECK(renyi_entropy(uz({0, 1, 2, 3}), 0.5) == doctest::Approx(std::log(4.0)));
  CHECK(renyi_entropy(uz({0, 1, 2, 3}), 3.0) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("convolution frozen cases") {
  const FinDist d = convolve(uz({0, 1}), uz({0, 1}), -1);
  CHECK(d.at({-1}) == doctest::Approx(0.25));
  CHECK(d.at({0}) == doctest::Approx(0.5));
  CHECK(d.at({1}) == doctest::Approx(0.25));

  const FinDist s = convolve(uz({0, 1, 2}), uz({0, 1, 2}), +1);
  CHECK(s.support_size() == 5);
  CHECK(s.at({0}) == doctest::Approx(1.0 / 9));
  CHECK(s.at({2}) == doctest::Approx(3.0 / 9));

  const FinDist p = uz({3, 7, 9});
  const FinDist same = convolve(p, FinDist::point_mass(kZ, {0}), +1);
  CHECK(same.mass == p.mass);
}

TEST_CASE("parallel gather matches the serial scatter kernel") {
  for (int t = 0; t < 25; ++t) {
    TrialRng rng(77, t);
    const GroupContext ctx = sample_ctx(rng);
    const FinDist p = sample_dist(rng, ctx, 1, 12);
    const FinDist q = sample_dist(rng, ctx, 1, 12);
    for (int sign : {+1, -1}) {
      const FinDist a = convolve(p, q, sign);
      const FinDist b = convolve_serial(p, q, sign);
      REQUIRE(a.support_size() == b.support_size());
      for (std::size_t i = 0; i < a.mass.size(); ++i) {
        CHECK(a.mass[i].first == b.mass[i].first);
        CHECK(a.mass[i].second == doctest::Approx(b.mass[i].second).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("kl divergence") {
  const FinDist p = FinDist::from_weights(kZ, {{{0}, 0.75}, {{1}, 0.25}});
  const FinDist u = uz({0, 1});
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  CHECK(kl_divergence(p, u) == doctest::Approx(std::log(2.0) - binary_entropy(0.25)).epsilon(1e-12));
  CHECK(kl_divergence(p, u) == doctest::Approx(0.130812).epsilon(1e-5));
  CHECK(std::isinf(kl_divergence(uz({0, 1, 2}), u)));
}

TEST_CASE("l1 distance to uniform and Pinsker") {
  const FinDist p = FinDist::from_weights(kZ, {{{0}, 0.75}, {{1}, 0.25}});
  const std::vector<CoordVec> two = {{0}, {1}};
  CHECK(l1_to_uniform(p, two) == doctest::Approx(0.5));
  CHECK(l1_to_uniform(uz({0, 1}), two) == doctest::Approx(0.0));
  const std::vector<CoordVec> four = {{0}, {1}, {2}, {3}};
  CHECK(l1_to_uniform(FinDist::point_mass(kZ, {0}), four) == doctest::Approx(1.5));
  CHECK(l1_to_uniform(p, two) <= std::sqrt(2.0 * kl_divergence(p, uz({0, 1}))));
}

TEST_CASE("pushforward") {
  const GroupContext z1 = GroupContext::z_lattice(1);
  const FinDist u4 = uz({0, 1, 2, 3});
  const FinDist m = pushforward(u4, Homomorphism::mod2(z1));
  CHECK(m.support_size() == 2);
  CHECK(m.at({0}) == doctest::Approx(0.5));
  const FinDist even = pushforward(uz({0, 2}), Homomorphism::mod2(z1));
  CHECK(even.support_size() == 1);
  CHECK(even.at({0}) == doctest::Approx(1.0));
  const FinDist dbl = pushforward(uz({0, 1}), Homomorphism::doubling(z1));
  CHECK(dbl.at({2}) == doctest::Approx(0.5));
  CHECK(entropy(m) <= entropy(u4) + 1e-12);
}

TEST_CASE("conditioning on fibers and the chain rule") {
  const Homomorphism mod2 = Homomorphism::mod2(kZ);
  const FinDist u4 = uz({0, 1, 2, 3});
  const FinDist f0 = condition_on_fiber(u4, mod2, {0});
  CHECK(f0.support() == std::vector<CoordVec>{{0}, {2}});
  CHECK(f0.at({0}) == doctest::Approx(0.5));
  const FinDist d0 = FinDist::point_mass(kZ, {0});
  CHECK(condition_on_fiber(d0, mod2, {0}).mass == d0.mass);
  CHECK_THROWS_AS(condition_on_fiber(uz({0, 2}), mod2, {1}), std::domain_error);

  // H(X) = H(X | pi(X)) + H(pi(X)) over random instances
  for (int t = 0; t < 50; ++t) {
    TrialRng rng(31, t);
    const FinDist p = sample_dist(rng, kZ, 1, 10);
    const double lhs = entropy(p);
    const double rhs =
        conditional_entropy_given_map(p, mod2) + entropy(pushforward(p, mod2));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("mass validation") {
  CHECK_THROWS_AS(FinDist::from_weights(kZ, {{{0}, 0.45}, {{1}, 0.45}}), std::domain_error);
  CHECK_THROWS_AS(FinDist::from_weights(kZ, {{{0}, -0.1}, {{1}, 1.1}}), std::domain_error);
  // tiny drift renormalizes
  const FinDist p = FinDist::from_weights(kZ, {{{0}, 0.5 + 4e-10}, {{1}, 0.5}});
  double total = 0;
  for (const auto& [v, w] : p.mass) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("max mass lower bound and joint marginals") {
  for (int t = 0; t < 200; ++t) {
    TrialRng rng(99, t);
    const GroupContext ctx = sample_ctx(rng);
    const FinDist p = sample_dist(rng, ctx, 1, 9);
    CHECK(p.max_mass() >= std::exp(-entropy(p)) - 1e-12);
  }
}
