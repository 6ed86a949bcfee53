#pragma once

#include <optional>
#include <string>
#include <vector>

#include "entkit/metrics.hpp"

namespace entkit {

/// Result of the KL-threshold extraction: the structured set
/// S = {x : p_X(x) > 0, D_KL(x - Y || X - Y) <= C k} with its certified
/// approximation and small-doubling bounds.
struct ExtractionResult {
  std::vector<CoordVec> S;
  double C_param = 0;
  double k = 0;                   // d_ent(X, Y)
  double p_mass = 0;              // P(X in S), >= 1 - 2/C
  double log_size_lower = 0;      // H(Y) - 2h(1-2/C) - 4k
  double bound_approx = 0;        // (C+2)k + h(1-2/C), bounds d*(U_S, Y)
  double bound_doubling = 0;      // (2C+4)k + 2h(1-2/C), bounds log|S-S|/|S|
  double measured_dist = 0;       // certified lower bound for d*(U_S, Y)
  double measured_dist_gap = 0;
  double measured_doubling = 0;   // log(|S-S|/|S|)
  bool dist_bound_holds = false;
  bool dist_bound_inconclusive = false;  // optimizer gap not below 1e-6
  bool doubling_bound_holds = false;
};

ExtractionResult extract_structured_set(const FinDist& pX, const FinDist& pY, double C,
                                        const DStarOptions& dstar_opt = {});

/// Freiman closure: when |S-S| < (3/2)|S| the difference set is a subgroup
/// (verified exhaustively here).
struct FreimanResult {
  bool is_group = false;
  std::vector<CoordVec> subgroup;  // S - S when is_group
  double ratio = 0;                // |S-S| / |S|
};
FreimanResult freiman_closure_test(const GroupContext& ctx, const std::vector<CoordVec>& S);

enum class LocalizeStatus { Ok, NotApplicable, ClosureFailed };

struct LocalizeResult {
  LocalizeStatus status = LocalizeStatus::NotApplicable;
  std::vector<CoordVec> subgroup;
  std::optional<SubgroupF2> subgroup_f2;  // filled on F2 contexts
  double eps = 0;                         // d_ent(X, Y)
  double dist_x = 0, dist_y = 0;          // d_ent(X, U_H), d_ent(Y, U_H)
  bool bound_holds = false;               // both distances <= 12 eps
  CoordVec shift;                         // mode-coset translation applied to X
  double closure_ratio = 0;
};

/// Locates a finite subgroup H with d_ent(X, U_H), d_ent(Y, U_H) <= 12 eps
/// when eps = d_ent(X, Y) <= eps0: KL-threshold extraction at C = eps^{-1/2},
/// Freiman closure of the extracted set, translation normalization. Over a
/// torsion-free lattice the only candidate is H = {0}.
LocalizeResult localize_subgroup(const FinDist& pX, const FinDist& pY, double eps0);

/// Both sides and the exact slack of the homomorphism fiber inequality
///   d(X1,X2) >= d(pi X1, pi X2) + sum p(y1) p(y2) d(fibers),
/// in the additive convention d(U,V) = H(U'+V') - H(U')/2 - H(V')/2;
/// slack = H(X1+X2 | Y1+Y2) - H(X1+X2 | Y1,Y2) exactly.
struct ProjectionAudit {
  double lhs = 0;
  double rhs_projected = 0;
  double rhs_fiber_sum = 0;
  double slack = 0;
  double slack_identity = 0;
  bool inequality_holds = false;
  bool identity_holds = false;
};
ProjectionAudit projection_inequality_audit(const FinDist& pX1, const FinDist& pX2,
                                            const Homomorphism& pi, double tol = 1e-9);

/// Fiber pair selected by the weighted pigeonhole trade-off
///   kbar log(1/(alpha_x beta_y)) <= M (k - d(U_{A_x}, U_{B_y})).
struct FiberPigeonholeWitness {
  CoordVec x, y;
  double alpha_x = 0, beta_y = 0;
  double k = 0, k_bar = 0, M = 0, k_prime = 0;
  bool inequality_holds = false;
};
FiberPigeonholeWitness fiber_pigeonhole(const GroupContext& ctx, const std::vector<CoordVec>& A,
                                        const std::vector<CoordVec>& B, const Homomorphism& phi);

/// d_ent(X, 2Y) and its torsion-free bound 5 d_ent(X, Y).
struct DoublingBound {
  double d_x_2y = 0;
  double bound = 0;
  bool holds = false;
};
DoublingBound torsion_free_doubling_bound(const FinDist& pX, const FinDist& pY);

/// H(X mod 2), H(Y mod 2) <= 10 d_ent(X, Y) over Z^D.
struct Mod2EntropyBound {
  double h_phi_x = 0, h_phi_y = 0;
  double bound = 0;
  bool holds = false;
};
Mod2EntropyBound mod2_entropy_bound(const FinDist& pX, const FinDist& pY);

/// Exhaustive subspace search: the H <= F2^D minimizing d_ent(X, U_H)
/// (ties: smaller H, then lexicographic basis).
struct PfrOracleResult {
  SubgroupF2 subgroup;
  double dist = 0;
};
PfrOracleResult brute_pfr_oracle(const FinDist& pX, int dim_cap = 5);

/// Greedy Ruzsa covering of A by translates of the subgroup H, seeded by
/// U = A intersect (H + x0). Every element of A is covered and the number of
/// translates is at most |A + U| / |U|.
struct RuzsaCover {
  std::vector<CoordVec> representatives;
  std::size_t cover_bound = 0;  // floor(|A + U| / |U|)
};
RuzsaCover ruzsa_cover(const GroupContext& ctx, const std::vector<CoordVec>& A,
                       const std::vector<CoordVec>& H, const CoordVec& x0);

}  // namespace entkit
