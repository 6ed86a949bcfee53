#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <vector>

namespace entkit::lp {

/// Sparse column entry of the constraint matrix.
struct Entry {
  std::size_t row;
  double coeff;
};

struct FeasibilityResult {
  bool feasible = false;
  /// Basic feasible point when feasible (size = number of columns).
  std::vector<double> x;
  /// Farkas vector when infeasible: y.A <= 0 componentwise, y.b > 0.
  std::vector<double> farkas;
};

/// Decides {x >= 0 : A x = b} by a phase-1 simplex with Bland's rule in
/// exact rational arithmetic. Requires b >= 0.
FeasibilityResult solve_equality_feasibility(std::size_t rows,
                                             const std::vector<std::vector<Entry>>& columns,
                                             const std::vector<mpq_class>& b);

/// Doubles convert exactly to rationals.
FeasibilityResult solve_equality_feasibility(std::size_t rows,
                                             const std::vector<std::vector<Entry>>& columns,
                                             const std::vector<double>& b);

/// Masses of a distribution as exact rationals scaled to sum to exactly 1,
/// so equality constraints built from several distributions stay consistent.
std::vector<mpq_class> exact_simplex_weights(const std::vector<double>& masses);

}  // namespace entkit::lp
