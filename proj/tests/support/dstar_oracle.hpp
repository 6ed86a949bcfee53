#pragma once

#include "entkit/dist.hpp"

namespace entkit::testing {

struct OracleResult {
  double value = 0;  // best certified value found
  double gap = 0;    // the supremum is <= value + gap
  bool converged = false;
};

/// Independent reference for the coupling maximization: enumerates every
/// vertex of the transportation polytope (spanning-tree basic solutions of
/// the bipartite flow), then maximizes the difference-law entropy over the
/// convex hull of their images with an exhaustive linear oracle and a
/// duality-gap certificate. Intended for supports up to 4.
OracleResult dstar_vertex_oracle(const FinDist& p, const FinDist& q, double gap_tol = 1e-7,
                                 int max_iters = 200000);

}  // namespace entkit::testing
