#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entkit/structure.hpp"

namespace entkit {

/// Constants for the recursive decompositions. Zero-valued overrides fall
/// back to the documented defaults, which keep every proof step licensed:
///   eps   <= min(eps0, 1/24), split threshold of the skew recursion
///   delta = log(20/19)/32, so the near-uniform case keeps the
///           concentration hypothesis P >= 1 - 1/20 available
///   c1    = max(20/delta, 100)
struct AlgoConfig {
  double eps0 = 0.01;
  double eps_override = 0;
  double delta_override = 0;
  double c1_override = 0;
  double c_pfr = 3.0 + 1e-9;
  int subgroup_dim_cap = 5;
  std::size_t skew_oracle_cap = 64;
  double tol = 1e-9;

  double eps() const;
  double delta() const;
  double c1() const;
  double c_skew() const { return 2.0 / eps(); }
  double c2_pfr() const;  // 40 / log 2
};

struct TraceNode {
  int index = 0;
  int parent = -1;
  int depth = 0;
  std::string label;  // base | case1 | case2-branch | fiber | h-full | chain-step | reduce
  std::int64_t size_a = 0, size_b = 0;
  int dim = 0;
  std::int64_t measure = 0;  // |A| * |B| (skew) or |A| + |B| (dim, pfr)
  double k = 0;
  double split_stat = 0;  // d_ent of the projections at the node
  double m_stat = 0;      // entropy sum of the projections
  double k_child = 0;
  double node_loss = 0;
  double node_loss_bound = 0;
  bool f_step_ok = true;
  bool hypothesis_ok = true;
  std::string note;
};

struct DecompositionResult {
  std::string algo;
  std::vector<CoordVec> A_prime, B_prime;
  double k = 0;
  double size_loss = 0;   // log(|A||B| / |A'||B'|)
  double size_bound = 0;  // C k (skew) or f(k)
  double dim_bound = 0;   // C k
  int dim_star_a = -1, dim_star_b = -1;  // exact oracle values (skew)
  int dim_a = -1, dim_b = -1;            // affine dimensions (dim, pfr)
  bool bounds_hold = false;
  bool hypothesis_clean = true;
  double measured_pfr_c = 0;  // largest subspace-oracle ratio seen (pfr)
  std::vector<TraceNode> trace;
};

/// Skew-dimension decomposition over Z^D: A' x B' with
/// |A'||B'| >= e^{-Ck}|A||B| and dim_*(A'), dim_*(B') <= Ck, C = 2/eps.
DecompositionResult skew_decompose(const GroupContext& ctx, const std::vector<CoordVec>& A,
                                   const std::vector<CoordVec>& B, const AlgoConfig& cfg = {});

/// Affine-dimension decomposition: loss bounded by f(k) = C1 k (1 + k),
/// dims bounded by C1 k. Mod-2 projection splitting with subgroup
/// localization in the near-uniform case.
DecompositionResult dim_decompose(const GroupContext& ctx, const std::vector<CoordVec>& A,
                                  const std::vector<CoordVec>& B, const AlgoConfig& cfg = {});

/// Same skeleton boosted by the iterated subspace chain: loss bounded by
/// f(k) = C1 k (1 + k^{1 - 1/C_PFR}), dims bounded by (40/log 2) k. The
/// subspace step uses the exhaustive oracle; its achieved constant is
/// measured and reported, not assumed.
DecompositionResult pfr_boosted_decompose(const GroupContext& ctx, const std::vector<CoordVec>& A,
                                          const std::vector<CoordVec>& B,
                                          const AlgoConfig& cfg = {});

/// Exact skew dimension by memoized recursion over coordinate fibers.
int skew_dimension_exact(const GroupContext& ctx, const std::vector<CoordVec>& A,
                         std::size_t cap = 64);

/// Rank over the rationals of A - A (exact integer elimination).
int affine_dimension(const GroupContext& ctx, const std::vector<CoordVec>& A);

}  // namespace entkit
