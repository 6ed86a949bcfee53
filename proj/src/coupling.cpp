#include "entkit/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "entkit/lp.hpp"

namespace entkit {

ThreeMarginalResult solve_three_marginal(const CouplingProblem& prob, std::size_t var_cap) {
  require_same_context(prob.p1.ctx, prob.p2.ctx);
  require_same_context(prob.p1.ctx, prob.p3.ctx);
  const GroupContext& ctx = prob.p1.ctx;

  const std::vector<CoordVec> s1 = prob.p1.support();
  const std::vector<CoordVec> s2 = prob.p2.support();
  const std::size_t n1 = s1.size(), n2 = s2.size();
  if (n1 * n2 > var_cap) throw std::length_error("solve_three_marginal: LP size exceeds cap");

  // difference window: Minkowski difference of the supports, plus any target
  // support of p3 outside it (those rows have no columns and force an
  // infeasibility certificate)
  std::vector<CoordVec> window = sumset(ctx, s1, s2, -1);
  {
    std::vector<CoordVec> all = window;
    for (const auto& [z, w] : prob.p3.mass) all.push_back(z);
    window = normalize_set(ctx, all);
  }
  const std::size_t nz = window.size();

  auto zrow = [&](const CoordVec& z) {
    auto it = std::lower_bound(window.begin(), window.end(), z, lex_less);
    return static_cast<std::size_t>(it - window.begin());
  };

  const std::size_t rows = n1 + n2 + nz;
  std::vector<std::vector<lp::Entry>> cols(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      std::vector<lp::Entry>& c = cols[i * n2 + j];
      c.push_back({i, 1.0});
      c.push_back({n1 + j, 1.0});
      c.push_back({n1 + n2 + zrow(group_sub(ctx, s1[i], s2[j])), 1.0});
    }
  }
  // each marginal is normalized to total mass exactly 1 in rational
  // arithmetic, so the three row blocks are mutually consistent
  std::vector<mpq_class> b(rows, 0);
  {
    std::vector<double> m1, m2, m3;
    for (const auto& [v, w] : prob.p1.mass) m1.push_back(w);
    for (const auto& [v, w] : prob.p2.mass) m2.push_back(w);
    for (const auto& [v, w] : prob.p3.mass) m3.push_back(w);
    const auto q1 = lp::exact_simplex_weights(m1);
    const auto q2 = lp::exact_simplex_weights(m2);
    const auto q3 = lp::exact_simplex_weights(m3);
    for (std::size_t i = 0; i < n1; ++i) b[i] = q1[i];
    for (std::size_t j = 0; j < n2; ++j) b[n1 + j] = q2[j];
    for (std::size_t r = 0; r < prob.p3.mass.size(); ++r) {
      b[n1 + n2 + zrow(prob.p3.mass[r].first)] = q3[r];
    }
  }

  lp::FeasibilityResult sol = lp::solve_equality_feasibility(rows, cols, b);

  ThreeMarginalResult res;
  res.feasible = sol.feasible;
  if (sol.feasible) {
    res.joint.ctx1 = ctx;
    res.joint.ctx2 = ctx;
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        const double w = sol.x[i * n2 + j];
        if (w > 0) res.joint.mass.push_back({{s1[i], s2[j]}, w});
      }
    }
    double err = 0;
    const FinDist m1 = res.joint.marginal_first();
    const FinDist m2 = res.joint.marginal_second();
    const FinDist m3 = res.joint.difference_law();
    err = std::max(err, l1_distance(m1, prob.p1));
    err = std::max(err, l1_distance(m2, prob.p2));
    err = std::max(err, l1_distance(m3, prob.p3));
    res.max_marginal_error = err;
  } else {
    // certificate f = -y, split along the three row blocks
    InfeasibilityCertificate& cert = res.certificate;
    for (std::size_t i = 0; i < n1; ++i) cert.f1.emplace_back(s1[i], -sol.farkas[i]);
    for (std::size_t j = 0; j < n2; ++j) cert.f2.emplace_back(s2[j], -sol.farkas[n1 + j]);
    for (std::size_t z = 0; z < nz; ++z) cert.f3.emplace_back(window[z], -sol.farkas[n1 + n2 + z]);
    double pairing = 0;
    for (std::size_t i = 0; i < n1; ++i) pairing += cert.f1[i].second * prob.p1.mass[i].second;
    for (std::size_t j = 0; j < n2; ++j) pairing += cert.f2[j].second * prob.p2.mass[j].second;
    for (const auto& [z, w] : prob.p3.mass) pairing += -sol.farkas[n1 + n2 + zrow(z)] * w;
    cert.pairing = pairing;
    double min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        const double s = cert.f1[i].second + cert.f2[j].second +
                         cert.f3[zrow(group_sub(ctx, s1[i], s2[j]))].second;
        min_slack = std::min(min_slack, s);
      }
    }
    cert.min_slack = min_slack;
  }
  return res;
}

JointDist uniform_difference_coupling(const GroupContext& ctx, const std::vector<CoordVec>& S) {
  std::vector<CoordVec> s = normalize_set(ctx, S);
  if (s.empty()) throw std::domain_error("uniform_difference_coupling: empty set");

  std::unordered_map<CoordVec, std::int64_t, ElementHash> rep_count;
  for (const CoordVec& a : s) {
    for (const CoordVec& b : s) ++rep_count[group_sub(ctx, a, b)];
  }
  const double nd = static_cast<double>(rep_count.size());

  JointDist joint;
  joint.ctx1 = ctx;
  joint.ctx2 = ctx;
  for (const CoordVec& a : s) {
    for (const CoordVec& b : s) {
      const double r = static_cast<double>(rep_count.at(group_sub(ctx, a, b)));
      joint.mass.push_back({{a, b}, 1.0 / (nd * r)});
    }
  }
  return joint;
}

JointDist near_uniform_selfcoupling(const FinDist& p, const std::vector<CoordVec>& H) {
  std::vector<CoordVec> h = normalize_set(p.ctx, H);
  for (const auto& [x, w] : p.mass) {
    if (!set_contains(h, x)) {
      throw std::domain_error("near_uniform_selfcoupling: support not contained in H");
    }
  }
  const double tv = l1_to_uniform(p, h);
  if (tv > 0.5 + 1e-12) {
    throw std::domain_error("near_uniform_selfcoupling: ||p - u_H||_1 = " + std::to_string(tv) +
                            " exceeds 1/2");
  }
  CouplingProblem prob{p, p, FinDist::uniform_on(p.ctx, h)};
  ThreeMarginalResult res = solve_three_marginal(prob);
  if (!res.feasible) {
    throw std::logic_error("near_uniform_selfcoupling: solver reported infeasible under the lemma hypothesis");
  }
  return res.joint;
}

double three_marginal_tv_sum(const CouplingProblem& prob, const std::vector<CoordVec>& H) {
  return l1_to_uniform(prob.p1, H) + l1_to_uniform(prob.p2, H) + l1_to_uniform(prob.p3, H);
}

}  // namespace entkit
