#pragma once

#include <vector>

#include "entkit/dist.hpp"

namespace entkit {

/// Targets for a coupled pair (X, Y): p1 = law of X, p2 = law of Y,
/// p3 = law of X - Y, all on the same group.
struct CouplingProblem {
  FinDist p1, p2, p3;
};

/// Separating functions proving infeasibility:
/// f1(x) + f2(y) + f3(x-y) >= 0 on the whole window while
/// <f1,p1> + <f2,p2> + <f3,p3> < 0.
struct InfeasibilityCertificate {
  std::vector<std::pair<CoordVec, double>> f1, f2, f3;
  double pairing = 0;
  double min_slack = 0;
};

struct ThreeMarginalResult {
  bool feasible = false;
  JointDist joint;
  InfeasibilityCertificate certificate;
  double max_marginal_error = 0;  // when feasible
};

/// Finds a joint law of (X, Y) with the three prescribed marginals, or an
/// infeasibility certificate. Feasibility is decided exactly; the total
/// variation hypothesis of the near-uniform coupling lemma is sufficient,
/// not necessary, so it is deliberately not a precondition here.
ThreeMarginalResult solve_three_marginal(const CouplingProblem& prob, std::size_t var_cap = 4096);

/// The explicit self-coupling of U_S whose difference Z - Z' is exactly
/// uniform on S - S: density 1 / (|S-S| #{(t1,t2) in S^2 : t1-t2 = s1-s2}).
JointDist uniform_difference_coupling(const GroupContext& ctx, const std::vector<CoordVec>& S);

/// Self-coupling of p with difference uniform on the subgroup H. Enforces
/// the lemma hypothesis supp(p) <= H and ||p - u_H||_1 <= 1/2, then
/// delegates to the three-marginal solver.
JointDist near_uniform_selfcoupling(const FinDist& p, const std::vector<CoordVec>& H);

/// Sum of the three l1 distances to uniform-on-H (the lemma hypothesis
/// quantity).
double three_marginal_tv_sum(const CouplingProblem& prob, const std::vector<CoordVec>& H);

}  // namespace entkit
