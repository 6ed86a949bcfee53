#include "entkit/lp.hpp"

#include <gmpxx.h>

#include <limits>
#include <stdexcept>

namespace entkit::lp {

FeasibilityResult solve_equality_feasibility(std::size_t rows,
                                             const std::vector<std::vector<Entry>>& columns,
                                             const std::vector<mpq_class>& b) {
  const std::size_t n = columns.size();
  const std::size_t ncols = n + rows;  // structural + artificial
  if (b.size() != rows) throw std::invalid_argument("lp: rhs size mismatch");

  // dense exact tableau; artificial variables start basic
  std::vector<std::vector<mpq_class>> t(rows, std::vector<mpq_class>(ncols, 0));
  std::vector<mpq_class> rhs(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (b[i] < 0) throw std::invalid_argument("lp: rhs must be non-negative");
    rhs[i] = b[i];
    t[i][n + i] = 1;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (const Entry& e : columns[j]) {
      if (e.row >= rows) throw std::invalid_argument("lp: row index out of range");
      t[e.row][j] += mpq_class(e.coeff);
    }
  }

  // reduced-cost row for min(sum of artificials): c_j - sum_i t[i][j]
  std::vector<mpq_class> obj(ncols, 0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < rows; ++i) obj[j] -= t[i][j];
  }
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = n + i;

  while (true) {
    // Bland: entering column = smallest index with negative reduced cost
    std::size_t enter = ncols;
    for (std::size_t j = 0; j < ncols; ++j) {
      if (obj[j] < 0) { enter = j; break; }
    }
    if (enter == ncols) break;

    // leaving row: minimum ratio, ties by smallest basic variable index
    std::size_t leave = rows;
    mpq_class best_ratio;
    for (std::size_t i = 0; i < rows; ++i) {
      if (t[i][enter] > 0) {
        mpq_class ratio = rhs[i] / t[i][enter];
        if (leave == rows || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave == rows) throw std::logic_error("lp: phase-1 objective unbounded");

    // pivot
    const mpq_class piv = t[leave][enter];
    for (std::size_t j = 0; j < ncols; ++j) t[leave][j] /= piv;
    rhs[leave] /= piv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == leave) continue;
      if (t[i][enter] != 0) {
        const mpq_class f = t[i][enter];
        for (std::size_t j = 0; j < ncols; ++j) t[i][j] -= f * t[leave][j];
        rhs[i] -= f * rhs[leave];
      }
    }
    if (obj[enter] != 0) {
      const mpq_class f = obj[enter];
      for (std::size_t j = 0; j < ncols; ++j) obj[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  mpq_class objective = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] >= n) objective += rhs[i];
  }

  FeasibilityResult res;
  if (objective == 0) {
    res.feasible = true;
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      if (basis[i] < n) res.x[basis[i]] = rhs[i].get_d();
    }
  } else {
    // duals from the artificial reduced costs: y_i = 1 - obj[n+i];
    // then y.A_j = -obj[j] <= 0 for structural j, and y.b = objective > 0.
    res.feasible = false;
    res.farkas.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      res.farkas[i] = mpq_class(1 - obj[n + i]).get_d();
    }
  }
  return res;
}

FeasibilityResult solve_equality_feasibility(std::size_t rows,
                                             const std::vector<std::vector<Entry>>& columns,
                                             const std::vector<double>& b) {
  std::vector<mpq_class> rhs;
  rhs.reserve(b.size());
  for (double v : b) rhs.emplace_back(v);
  return solve_equality_feasibility(rows, columns, rhs);
}

std::vector<mpq_class> exact_simplex_weights(const std::vector<double>& masses) {
  std::vector<mpq_class> out;
  out.reserve(masses.size());
  mpq_class sum = 0;
  for (double m : masses) {
    out.emplace_back(m);
    sum += out.back();
  }
  if (sum <= 0) throw std::invalid_argument("exact_simplex_weights: non-positive total mass");
  for (mpq_class& q : out) q /= sum;
  return out;
}

}  // namespace entkit::lp
