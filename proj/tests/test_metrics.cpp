#include <doctest.h>

#include <cmath>

#include "entkit/gen.hpp"
#include "entkit/metrics.hpp"
#include "support/dstar_oracle.hpp"

using namespace entkit;

namespace {
const GroupContext kZ = GroupContext::z_lattice(1);
FinDist uz(std::vector<Coord> pts) {
  std::vector<CoordVec> s;
  for (Coord c : pts) s.push_back({c});
  return FinDist::uniform_on(kZ, s);
}
}  // namespace

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)));
  CHECK(binary_entropy(0.25) ==
        doctest::Approx(2 * std::log(2.0) - 0.75 * std::log(3.0)).epsilon(1e-12));
  CHECK(binary_entropy(0.25) == doctest::Approx(0.562335).epsilon(1e-5));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.3) == doctest::Approx(binary_entropy(0.7)));
  CHECK_THROWS_AS(binary_entropy(1.2), std::domain_error);
}

TEST_CASE("sigma_ent frozen values") {
  const GroupContext f22 = GroupContext::f2(2);
  CHECK(sigma_ent(FinDist::uniform_on(f22, SubgroupF2::span(2, {{1, 0}}).elements())) ==
        doctest::Approx(1.0));
  CHECK(sigma_ent(FinDist::point_mass(kZ, {3})) == doctest::Approx(1.0));
  const double exact_sigma =
      std::exp(5.0 / 3.0 * std::log(3.0) - 4.0 / 9.0 * std::log(2.0) - std::log(3.0));
  CHECK(sigma_ent(uz({0, 1, 2})) == doctest::Approx(exact_sigma).epsilon(1e-12));
  CHECK(std::abs(sigma_ent(uz({0, 1, 2})) - 1.52852) < 1e-4);
  // exp(d_ent(X, -X)) identity
  const FinDist p = uz({0, 1, 3});
  CHECK(sigma_ent(p) == doctest::Approx(std::exp(d_ent(p, negate_dist(p)))).epsilon(1e-12));
}

TEST_CASE("d_ent frozen values") {
  const GroupContext f22 = GroupContext::f2(2);
  const auto h = SubgroupF2::span(2, {{1, 0}, {0, 1}});
  const FinDist uh = FinDist::uniform_on(f22, h.elements());
  CHECK(d_ent(uh, uh) == doctest::Approx(0.0));
  CHECK(d_ent(uz({0, 1}), uz({0, 1})) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  // uniform on a 2-point subset of a coset of a 4-element subgroup
  const auto h2 = SubgroupF2::span(2, {{1, 0}, {0, 1}});
  const FinDist us = FinDist::uniform_on(f22, {{0, 0}, {0, 1}});
  CHECK(d_ent(us, uh) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("d_ent_subgroup closed form") {
  const GroupContext f21 = GroupContext::f2(1);
  CHECK(d_ent_subgroup(FinDist::point_mass(f21, {0}), SubgroupF2::full(1)) ==
        doctest::Approx(0.5 * std::log(2.0)));
  const GroupContext f22 = GroupContext::f2(2);
  const FinDist u = FinDist::uniform_on(f22, f22.elements());
  CHECK(d_ent_subgroup(u, SubgroupF2::trivial(2)) == doctest::Approx(std::log(2.0)));
  CHECK(d_ent_subgroup(u, SubgroupF2::full(2)) == doctest::Approx(0.0));
  // agrees with the generic distance on random instances
  for (int t = 0; t < 100; ++t) {
    TrialRng rng(404, t);
    const GroupContext f23 = GroupContext::f2(3);
    const FinDist x = sample_dist(rng, f23, 1, 8);
    const auto subs = enumerate_subgroups(3);
    const SubgroupF2& h = subs[rng.uniform_int(0, std::int64_t(subs.size()) - 1)];
    const double direct = d_ent(x, FinDist::uniform_on(f23, h.elements()));
    CHECK(d_ent_subgroup(x, h) == doctest::Approx(direct).epsilon(1e-9));
  }
  // Z/12 subgroup via an explicit element set
  const GroupContext z12 = GroupContext::zmod({12});
  const std::vector<CoordVec> h3 = {{0}, {4}, {8}};
  const FinDist x = FinDist::uniform_on(z12, h3);
  CHECK(d_ent_subgroup(x, h3) == doctest::Approx(0.0));
}

TEST_CASE("energy") {
  CHECK(energy(kZ, {{0}, {1}, {2}}) == 19);
  CHECK(energy(kZ, {{7}}) == 1);
  const GroupContext f22 = GroupContext::f2(2);
  CHECK(energy(f22, f22.elements()) == 64);  // |A|^3 for a subgroup
  // parallel kernel matches the serial one above the dispatch threshold
  TrialRng rng(8, 0);
  const auto big = sample_set(rng, GroupContext::z_lattice(2), 80, 100, 40);
  CHECK(energy(GroupContext::z_lattice(2), big) == energy_serial(GroupContext::z_lattice(2), big));
}

TEST_CASE("sandwich report on {0,1,2}") {
  const MetricReport rep = sandwich_check(kZ, {{0}, {1}, {2}});
  CHECK(rep.energy == 19);
  CHECK(rep.energy_lower == doctest::Approx(27.0 / 19.0).epsilon(1e-12));
  CHECK(std::abs(rep.sigma_ent - 1.52852) < 1e-4);
  CHECK(rep.sigma_comb == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  for (const BoundCheck& b : rep.bounds_checked) CHECK(b.holds);

  const GroupContext f22 = GroupContext::f2(2);
  const MetricReport sub = sandwich_check(f22, f22.elements());
  CHECK(sub.energy_lower == doctest::Approx(1.0));
  CHECK(sub.sigma_ent == doctest::Approx(1.0));
  CHECK(sub.sigma_comb == doctest::Approx(1.0));

  const MetricReport r013 = sandwich_check(kZ, {{0}, {1}, {3}});
  CHECK(r013.energy == energy_serial(kZ, {{0}, {1}, {3}}));
  CHECK(r013.energy_lower <= r013.sigma_ent + 1e-9);
  CHECK(r013.sigma_ent <= r013.sigma_comb + 1e-9);
}

TEST_CASE("d_star hand-derived case and caps") {
  const DStarResult ds = d_star(uz({0, 1}), uz({0, 1}));
  CHECK(ds.converged);
  CHECK(ds.value == doctest::Approx(std::log(3.0) - std::log(2.0)).epsilon(1e-6));
  // optimal coupling puts 1/3 on the diagonal
  double diag = 0;
  for (const auto& [xy, w] : ds.coupling.mass) {
    if (xy.first == xy.second) diag += w;
  }
  CHECK(diag == doctest::Approx(1.0 / 3.0).epsilon(1e-5));

  CHECK(d_star(FinDist::point_mass(kZ, {4}), FinDist::point_mass(kZ, {9})).value ==
        doctest::Approx(0.0));

  DStarOptions tiny;
  tiny.support_cap = 3;
  CHECK_THROWS_AS(d_star(uz({0, 1, 2, 3}), uz({0, 1}), tiny), std::length_error);
}

TEST_CASE("d_star marginals stay prescribed") {
  for (int t = 0; t < 20; ++t) {
    TrialRng rng(5150, t);
    const GroupContext ctx = sample_ctx(rng);
    const FinDist p = sample_dist(rng, ctx, 1, 5);
    const FinDist q = sample_dist(rng, ctx, 1, 5);
    const DStarResult ds = d_star(p, q);
    CHECK(l1_distance(ds.coupling.marginal_first(), p) <= 1e-9);
    CHECK(l1_distance(ds.coupling.marginal_second(), q) <= 1e-9);
    CHECK(ds.value >= d_ent(p, q) - 1e-9);  // independent coupling is feasible
  }
}

TEST_CASE("d_star equals the subgroup distance when one side is uniform on a subgroup") {
  const GroupContext f22 = GroupContext::f2(2);
  for (int t = 0; t < 20; ++t) {
    TrialRng rng(606, t);
    const FinDist x = sample_dist(rng, f22, 1, 4);
    const auto h = SubgroupF2::span(2, {{1, 0}});
    const FinDist uh = FinDist::uniform_on(f22, h.elements());
    const DStarResult ds = d_star(x, uh);
    if (ds.gap < 1e-6) {
      CHECK(ds.value <= d_ent(x, uh) + 1e-6);
      CHECK(ds.value >= d_ent(x, uh) - 1e-6);
    }
  }
}

TEST_CASE("d_star against the exhaustive vertex oracle") {
  for (int t = 0; t < 40; ++t) {
    TrialRng rng(7777, t);
    const GroupContext ctx = sample_ctx(rng);
    const FinDist p = sample_dist(rng, ctx, 1, 4);
    const FinDist q = sample_dist(rng, ctx, 1, 4);
    const DStarResult fw = d_star(p, q);
    const testing::OracleResult oracle = testing::dstar_vertex_oracle(p, q);
    REQUIRE(fw.converged);
    REQUIRE(oracle.converged);
    CHECK(fw.value == doctest::Approx(oracle.value).epsilon(1e-5));
    const double d = d_ent(p, q);
    CHECK(d <= fw.value + fw.gap + 1e-9);
    CHECK(fw.value <= 3.0 * d + 1e-9);
  }
}
