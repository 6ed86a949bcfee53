#include <doctest.h>

#include <cmath>

#include "entkit/coupling.hpp"
#include "entkit/gen.hpp"
#include "entkit/metrics.hpp"

using namespace entkit;

namespace {

void check_certificate(const ThreeMarginalResult& res, const CouplingProblem& prob) {
  REQUIRE_FALSE(res.feasible);
  CHECK(res.certificate.min_slack >= -1e-9);
  CHECK(res.certificate.pairing < -1e-12);
  // re-pair against the inputs
  double pairing = 0;
  auto value_at = [](const std::vector<std::pair<CoordVec, double>>& f, const CoordVec& v) {
    for (const auto& [x, val] : f) {
      if (x == v) return val;
    }
    REQUIRE(false);
    return 0.0;
  };
  for (const auto& [v, w] : prob.p1.mass) pairing += w * value_at(res.certificate.f1, v);
  for (const auto& [v, w] : prob.p2.mass) pairing += w * value_at(res.certificate.f2, v);
  for (const auto& [v, w] : prob.p3.mass) pairing += w * value_at(res.certificate.f3, v);
  CHECK(pairing == doctest::Approx(res.certificate.pairing).epsilon(1e-9));
}

}  // namespace

TEST_CASE("three-marginal: independent uniform coupling case") {
  const GroupContext f2 = GroupContext::f2(1);
  const FinDist u = FinDist::uniform_on(f2, f2.elements());
  const ThreeMarginalResult res = solve_three_marginal({u, u, u});
  REQUIRE(res.feasible);
  CHECK(res.max_marginal_error <= 1e-9);
}

TEST_CASE("three-marginal: feasible outside the lemma hypothesis") {
  // X = Y uniform on Z/3 with X - Y forced to zero: the hypothesis quantity
  // is 4/3 > 1 yet the diagonal coupling works, so it must not be a precondition
  const GroupContext z3 = GroupContext::zmod({3});
  const FinDist u = FinDist::uniform_on(z3, z3.elements());
  const FinDist d0 = FinDist::point_mass(z3, {0});
  CouplingProblem prob{u, u, d0};
  CHECK(three_marginal_tv_sum(prob, z3.elements()) == doctest::Approx(4.0 / 3.0));
  const ThreeMarginalResult res = solve_three_marginal(prob);
  REQUIRE(res.feasible);
  CHECK(res.max_marginal_error <= 1e-9);
  for (const auto& [xy, w] : res.joint.mass) CHECK(xy.first == xy.second);
}

TEST_CASE("three-marginal: infeasible point masses with certificate") {
  const GroupContext f2 = GroupContext::f2(1);
  CouplingProblem prob{FinDist::point_mass(f2, {0}), FinDist::point_mass(f2, {0}),
                       FinDist::point_mass(f2, {1})};
  check_certificate(solve_three_marginal(prob), prob);
}

TEST_CASE("three-marginal: certificate for mass outside the difference window") {
  const GroupContext z = GroupContext::z_lattice(1);
  CouplingProblem prob{FinDist::uniform_on(z, {{0}, {1}}), FinDist::uniform_on(z, {{0}, {1}}),
                       FinDist::point_mass(z, {5})};
  check_certificate(solve_three_marginal(prob), prob);
}

TEST_CASE("three-marginal: lemma hypothesis forces feasibility (seeded sweep)") {
  for (int t = 0; t < 100; ++t) {
    TrialRng rng(1234, t);
    const GroupContext ctx =
        t % 2 == 0 ? GroupContext::f2(2) : GroupContext::zmod({5});
    const std::vector<CoordVec> h = ctx.elements();
    auto near_uniform = [&](double weight) {
      std::vector<std::pair<CoordVec, double>> w;
      const double u = 1.0 / double(h.size());
      std::vector<double> noise(h.size());
      double total = 0;
      for (double& x : noise) {
        x = -std::log(1.0 - rng.next_unit());
        total += x;
      }
      for (std::size_t i = 0; i < h.size(); ++i) {
        w.emplace_back(h[i], (1.0 - weight) * u + weight * noise[i] / total);
      }
      return FinDist::from_weights(ctx, std::move(w));
    };
    const double t1 = rng.next_unit() / 6, t2 = rng.next_unit() / 6, t3 = rng.next_unit() / 6;
    CouplingProblem prob{near_uniform(t1), near_uniform(t2), near_uniform(t3)};
    REQUIRE(three_marginal_tv_sum(prob, h) <= 1.0);
    const ThreeMarginalResult res = solve_three_marginal(prob);
    REQUIRE(res.feasible);
    CHECK(res.max_marginal_error <= 1e-9);
  }
}

TEST_CASE("uniform difference coupling") {
  const GroupContext z = GroupContext::z_lattice(1);
  const JointDist j = uniform_difference_coupling(z, {{0}, {1}});
  CHECK(j.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  auto at = [&](Coord a, Coord b) {
    for (const auto& [xy, w] : j.mass) {
      if (xy.first == CoordVec{a} && xy.second == CoordVec{b}) return w;
    }
    return 0.0;
  };
  CHECK(at(0, 1) == doctest::Approx(1.0 / 3));
  CHECK(at(1, 0) == doctest::Approx(1.0 / 3));
  CHECK(at(0, 0) == doctest::Approx(1.0 / 6));
  CHECK(at(1, 1) == doctest::Approx(1.0 / 6));
  const FinDist diff = j.difference_law();
  CHECK(diff.support_size() == 3);
  for (const auto& [v, w] : diff.mass) CHECK(w == doctest::Approx(1.0 / 3).epsilon(1e-12));

  // singleton S
  const JointDist j1 = uniform_difference_coupling(z, {{7}});
  CHECK(j1.mass.size() == 1);
  CHECK(j1.mass[0].second == doctest::Approx(1.0));

  // a subgroup of F2^2: the difference law is uniform on the subgroup itself
  const GroupContext f22 = GroupContext::f2(2);
  const auto h = SubgroupF2::span(2, {{1, 0}}).elements();
  const FinDist hdiff = uniform_difference_coupling(f22, h).difference_law();
  CHECK(hdiff.support_size() == h.size());
  for (const auto& [v, w] : hdiff.mass) CHECK(w == doctest::Approx(1.0 / h.size()));
}

TEST_CASE("uniform difference coupling: difference law uniform on random sets") {
  for (int t = 0; t < 60; ++t) {
    TrialRng rng(31337, t);
    const GroupContext ctx = sample_ctx(rng);
    const auto s = sample_set(rng, ctx, 1, 8);
    const JointDist j = uniform_difference_coupling(ctx, s);
    CHECK(j.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    const auto diff_set = sumset(ctx, s, s, -1);
    const FinDist law = j.difference_law();
    REQUIRE(law.support_size() == diff_set.size());
    for (const auto& [v, w] : law.mass) {
      CHECK(w == doctest::Approx(1.0 / double(diff_set.size())).epsilon(1e-12));
    }
    // marginal supports stay inside S
    for (const auto& [v, w] : j.marginal_first().mass) CHECK(set_contains(s, v));
    for (const auto& [v, w] : j.marginal_second().mass) CHECK(set_contains(s, v));
  }
}

TEST_CASE("near uniform selfcoupling") {
  const GroupContext f22 = GroupContext::f2(2);
  const auto h = f22.elements();
  // exactly uniform
  const JointDist j0 = near_uniform_selfcoupling(FinDist::uniform_on(f22, h), h);
  CHECK(l1_distance(j0.difference_law(), FinDist::uniform_on(f22, h)) <= 1e-9);

  // the (0.3, 0.25, 0.25, 0.2) example: hypothesis quantity 0.2 <= 1
  const FinDist p = FinDist::from_weights(
      f22, {{{0, 0}, 0.3}, {{0, 1}, 0.25}, {{1, 0}, 0.25}, {{1, 1}, 0.2}});
  const JointDist j = near_uniform_selfcoupling(p, h);
  CHECK(l1_distance(j.marginal_first(), p) <= 1e-9);
  CHECK(l1_distance(j.marginal_second(), p) <= 1e-9);
  CHECK(l1_distance(j.difference_law(), FinDist::uniform_on(f22, h)) <= 1e-9);

  // hypothesis violations are preconditions here
  const GroupContext f21 = GroupContext::f2(1);
  CHECK_THROWS_AS(near_uniform_selfcoupling(FinDist::point_mass(f21, {0}), f21.elements()),
                  std::domain_error);
  CHECK_THROWS_AS(near_uniform_selfcoupling(FinDist::uniform_on(f22, h), {{0, 0}, {0, 1}}),
                  std::domain_error);
}
