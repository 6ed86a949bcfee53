#include <doctest.h>

#include <cmath>

#include "entkit/decompose.hpp"
#include "entkit/gen.hpp"
#include "entkit/io.hpp"

using namespace entkit;

namespace {

std::vector<CoordVec> box2() {
  return {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
}

std::vector<CoordVec> negate_all(const GroupContext& ctx, const std::vector<CoordVec>& s) {
  std::vector<CoordVec> out;
  for (const CoordVec& v : s) out.push_back(group_neg(ctx, v));
  return normalize_set(ctx, out);
}

void check_common(const GroupContext& ctx, const std::vector<CoordVec>& a,
                  const std::vector<CoordVec>& b, const DecompositionResult& r) {
  REQUIRE_FALSE(r.A_prime.empty());
  REQUIRE_FALSE(r.B_prime.empty());
  const auto an = normalize_set(ctx, a);
  const auto bn = normalize_set(ctx, b);
  for (const CoordVec& v : r.A_prime) CHECK(set_contains(an, v));
  for (const CoordVec& v : r.B_prime) CHECK(set_contains(bn, v));
  CHECK(r.bounds_hold);
}

}  // namespace

TEST_CASE("exact oracles: skew and affine dimension") {
  const GroupContext z1 = GroupContext::z_lattice(1);
  const GroupContext z2 = GroupContext::z_lattice(2);
  const GroupContext z3 = GroupContext::z_lattice(3);

  CHECK(skew_dimension_exact(z2, {{3, 4}}) == 0);
  CHECK(skew_dimension_exact(z2, {{0, 5}, {1, 5}, {2, 5}}) == 1);
  CHECK(skew_dimension_exact(z2, box2()) == 2);
  CHECK(skew_dimension_exact(z1, {{0}, {1}, {2}}) == 1);

  CHECK(affine_dimension(z3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}) == 2);
  CHECK(affine_dimension(z2, {{7, 7}}) == 0);
  CHECK(affine_dimension(z1, {{0}, {1}, {2}}) == 1);
  // collinear but not axis-aligned
  CHECK(affine_dimension(z2, {{0, 0}, {1, 2}, {2, 4}, {3, 6}}) == 1);

  // dim_* <= dim on random sets
  for (int t = 0; t < 200; ++t) {
    TrialRng rng(1717, t);
    const auto a = sample_set(rng, z2, 1, 12, 3);
    CHECK(skew_dimension_exact(z2, a) <= affine_dimension(z2, a));
  }
  std::vector<CoordVec> too_big;
  for (Coord i = 0; i < 65; ++i) too_big.push_back({i});
  CHECK_THROWS_AS(skew_dimension_exact(z1, too_big, 64), std::length_error);
}

TEST_CASE("skew decomposition: frozen cases") {
  const GroupContext z1 = GroupContext::z_lattice(1);
  const GroupContext z2 = GroupContext::z_lattice(2);

  const DecompositionResult single = skew_decompose(z1, {{4}}, {{9}});
  CHECK(single.A_prime == std::vector<CoordVec>{{4}});
  CHECK(single.size_loss == doctest::Approx(0.0));
  CHECK(single.dim_star_a == 0);
  CHECK(single.bounds_hold);

  const auto a = box2();
  const auto b = negate_all(z2, a);
  const DecompositionResult r = skew_decompose(z2, a, b);
  CHECK(r.k == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  check_common(z2, a, b, r);
  CHECK(r.dim_star_a <= r.dim_bound + 1e-9);

  std::vector<CoordVec> interval;
  for (Coord i = 0; i < 8; ++i) interval.push_back({i});
  const DecompositionResult r8 = skew_decompose(z1, interval, negate_all(z1, interval));
  check_common(z1, interval, negate_all(z1, interval), r8);
}

TEST_CASE("dim decomposition: frozen cases") {
  const GroupContext z1 = GroupContext::z_lattice(1);
  const GroupContext z2 = GroupContext::z_lattice(2);
  const GroupContext z3 = GroupContext::z_lattice(3);

  const DecompositionResult trivial = dim_decompose(z1, {{0}}, {{0}});
  CHECK(trivial.size_loss == doctest::Approx(0.0));
  CHECK(trivial.dim_a == 0);
  CHECK(trivial.bounds_hold);

  // all-even coordinates: the run must rebase through the halved sublattice
  std::vector<CoordVec> evens = {{0, 0}, {2, 0}, {0, 2}, {2, 2}};
  const DecompositionResult r = dim_decompose(z2, evens, evens);
  check_common(z2, evens, evens, r);
  bool reduced = false;
  for (const TraceNode& n : r.trace) reduced |= n.label == "reduce";
  CHECK(reduced);

  std::vector<CoordVec> cube;
  for (Coord x = 0; x < 2; ++x) {
    for (Coord y = 0; y < 2; ++y) {
      for (Coord z = 0; z < 2; ++z) cube.push_back({x, y, z});
    }
  }
  const DecompositionResult rc = dim_decompose(z3, cube, cube);
  check_common(z3, cube, cube, rc);
}

TEST_CASE("pfr decomposition: frozen cases and chain behaviour") {
  const GroupContext z2 = GroupContext::z_lattice(2);
  const DecompositionResult single = pfr_boosted_decompose(z2, {{5, 5}}, {{5, 5}});
  CHECK(single.size_loss == doctest::Approx(0.0));
  CHECK(single.bounds_hold);

  const auto a = box2();
  const DecompositionResult r = pfr_boosted_decompose(z2, a, a);
  check_common(z2, a, a, r);
  CHECK(r.dim_bound == doctest::Approx(40.0 / std::log(2.0) * r.k));

  // at k >= 1 the boosted loss budget is the smaller of the two
  const GroupContext z1 = GroupContext::z_lattice(1);
  std::vector<CoordVec> spread = {{0}, {1}, {2}, {4}, {8}, {16}, {32}, {64}};
  const auto nspread = negate_all(z1, spread);
  const DecompositionResult boosted = pfr_boosted_decompose(z1, spread, nspread);
  const DecompositionResult plain = dim_decompose(z1, spread, nspread);
  REQUIRE(boosted.k == doctest::Approx(plain.k));
  REQUIRE(boosted.k >= 1.0);
  CHECK(boosted.size_bound <= plain.size_bound + 1e-9);
  CHECK(boosted.bounds_hold);
  CHECK(plain.bounds_hold);
}

TEST_CASE("decomposition bounds on seeded instances, dims from the oracles") {
  const GroupContext z2 = GroupContext::z_lattice(2);
  int skew_checked = 0, dim_checked = 0, pfr_checked = 0;
  for (int t = 0; t < 40; ++t) {
    TrialRng rng(9000, t);
    const int d = 1 + int(rng.uniform_int(0, 1));
    const GroupContext ctx = GroupContext::z_lattice(d);
    const auto a = sample_set(rng, ctx, 1, 10, 3);
    const auto b = sample_set(rng, ctx, 1, 10, 3);

    const DecompositionResult rs = skew_decompose(ctx, a, b);
    check_common(ctx, a, b, rs);
    CHECK(skew_dimension_exact(ctx, rs.A_prime) <= rs.dim_bound + 1e-9);
    ++skew_checked;

    const DecompositionResult rd = dim_decompose(ctx, a, b);
    check_common(ctx, a, b, rd);
    CHECK(affine_dimension(ctx, rd.A_prime) <= rd.dim_bound + 1e-9);
    ++dim_checked;

    const DecompositionResult rp = pfr_boosted_decompose(ctx, a, b);
    check_common(ctx, a, b, rp);
    CHECK(affine_dimension(ctx, rp.A_prime) <= rp.dim_bound + 1e-9);
    ++pfr_checked;
  }
  CHECK(skew_checked == 40);
  CHECK(dim_checked == 40);
  CHECK(pfr_checked == 40);
  (void)z2;
}

TEST_CASE("traces replay deterministically") {
  const GroupContext z2 = GroupContext::z_lattice(2);
  TrialRng rng(512, 0);
  const auto a = sample_set(rng, z2, 4, 10, 3);
  const auto b = sample_set(rng, z2, 4, 10, 3);
  for (auto algo : {skew_decompose, dim_decompose, pfr_boosted_decompose}) {
    const DecompositionResult r1 = algo(z2, a, b, AlgoConfig{});
    const DecompositionResult r2 = algo(z2, a, b, AlgoConfig{});
    CHECK(io::decomposition_to_json(r1).dump() == io::decomposition_to_json(r2).dump());
  }
}

TEST_CASE("config invariants") {
  AlgoConfig cfg;
  CHECK(cfg.eps() == doctest::Approx(0.01));  // min(eps0, 1/24)
  CHECK(cfg.c_skew() == doctest::Approx(200.0));
  CHECK(cfg.delta() == doctest::Approx(std::log(20.0 / 19.0) / 32.0));
  CHECK(cfg.c1() == doctest::Approx(20.0 / cfg.delta()));
  cfg.eps_override = 0.5;  // above min(eps0, 1/24)
  CHECK_THROWS_AS(cfg.eps(), std::domain_error);
  cfg.eps_override = 0;
  cfg.eps0 = 0.05;
  CHECK(cfg.eps() == doctest::Approx(1.0 / 24.0));
}
