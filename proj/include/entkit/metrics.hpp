#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entkit/dist.hpp"

namespace entkit {

/// h(p) = p log 1/p + (1-p) log 1/(1-p); endpoints map to 0.
double binary_entropy(double pr);

/// Entropic doubling exp(H(X1+X2) - H(X)) for independent copies of X.
double sigma_ent(const FinDist& p);

/// Entropic Ruzsa distance H(X'-Y') - H(X')/2 - H(Y')/2 for independent copies.
double d_ent(const FinDist& p, const FinDist& q);
/// Additive variant H(X'+Y') - H(X')/2 - H(Y')/2 (= d_ent(p, -q)).
double d_ent_sum(const FinDist& p, const FinDist& q);

/// d_ent(X, U_H) via the closed form H(pi(X)) + (log|H| - H(X))/2,
/// pi the quotient map by H.
double d_ent_subgroup(const FinDist& p, const SubgroupF2& h);
/// Same for any finite subgroup given as an explicit element set
/// (validated to be a subgroup).
double d_ent_subgroup(const FinDist& p, const std::vector<CoordVec>& subgroup);

/// Entropy of the coset projection H(pi(X)) for the quotient by `subgroup`.
double quotient_entropy(const FinDist& p, const std::vector<CoordVec>& subgroup);

/// Additive energy |{(a1,a2,a3,a4) in A^4 : a1+a2 = a3+a4}|.
std::int64_t energy(const GroupContext& ctx, const std::vector<CoordVec>& A);
std::int64_t energy_serial(const GroupContext& ctx, const std::vector<CoordVec>& A);

struct BoundCheck {
  std::string name;
  double lhs = 0, rhs = 0;
  bool holds = false;
};

struct MetricReport {
  double sigma_ent = 0;
  double sigma_comb = 0;
  std::int64_t energy = 0;
  double energy_lower = 0;  // |A|^3 / E[A]
  double d_ent = 0;
  std::optional<double> d_star;
  std::optional<double> d_star_gap;
  std::vector<BoundCheck> bounds_checked;
};

/// |A|^3/E[A] <= sigma_ent[A] <= sigma[A], with all three values recorded.
MetricReport sandwich_check(const GroupContext& ctx, const std::vector<CoordVec>& A);

struct DStarOptions {
  double gap_tol = 1e-8;
  int max_iters = 10000;
  std::size_t support_cap = 64;
};

struct DStarResult {
  double value = 0;      // certified lower bound, from the returned coupling
  double gap = 0;        // duality gap: the supremum is <= value + gap
  int iterations = 0;
  bool converged = false;
  JointDist coupling;
};

/// Maximal entropic Ruzsa distance sup over couplings of
/// H(X'-Y') - H(X)/2 - H(Y)/2, by Frank-Wolfe over the transportation
/// polytope with exact linear-oracle steps and a duality-gap stopping rule.
DStarResult d_star(const FinDist& p, const FinDist& q, const DStarOptions& opt = {});

}  // namespace entkit
