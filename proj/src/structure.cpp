#include "entkit/structure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace entkit {

namespace {

constexpr double kTol = 1e-9;

// Adds y's coset structure: quotient of a finite-context distribution by an
// explicit subgroup set, as a distribution on canonical coset representatives
// inside the same ambient context.
FinDist coset_pushforward(const FinDist& p, const std::vector<CoordVec>& h) {
  std::vector<std::pair<CoordVec, double>> w;
  w.reserve(p.mass.size());
  for (const auto& [x, px] : p.mass) {
    CoordVec best = group_add(p.ctx, x, h.front());
    for (std::size_t i = 1; i < h.size(); ++i) {
      CoordVec cand = group_add(p.ctx, x, h[i]);
      if (lex_less(cand, best)) best = std::move(cand);
    }
    w.emplace_back(std::move(best), px);
  }
  return FinDist::from_weights(p.ctx, std::move(w));
}

}  // namespace

ExtractionResult extract_structured_set(const FinDist& pX, const FinDist& pY, double C,
                                        const DStarOptions& dstar_opt) {
  if (C < 4.0) throw std::domain_error("extract_structured_set: C must be >= 4");
  require_same_context(pX.ctx, pY.ctx);
  const GroupContext& ctx = pX.ctx;

  ExtractionResult res;
  res.C_param = C;
  res.k = d_ent(pX, pY);
  const double h_term = binary_entropy(std::min(1.0, std::max(0.0, 1.0 - 2.0 / C)));
  res.bound_approx = (C + 2.0) * res.k + h_term;
  res.bound_doubling = (2.0 * C + 4.0) * res.k + 2.0 * h_term;
  res.log_size_lower = entropy(pY) - 2.0 * h_term - 4.0 * res.k;

  const FinDist diff = convolve(pX, pY, -1);
  const FinDist neg_y = negate_dist(pY);
  const double threshold = C * res.k + kTol;
  for (const auto& [x, px] : pX.mass) {
    if (kl_divergence(translate(neg_y, x), diff) <= threshold) {
      res.S.push_back(x);
      res.p_mass += px;
    }
  }
  if (res.S.empty()) throw std::logic_error("extract_structured_set: empty S");

  const std::vector<CoordVec> smm = sumset(ctx, res.S, res.S, -1);
  res.measured_doubling =
      std::log(static_cast<double>(smm.size()) / static_cast<double>(res.S.size()));
  res.doubling_bound_holds = res.measured_doubling <= res.bound_doubling + kTol;

  DStarResult ds = d_star(FinDist::uniform_on(ctx, res.S), pY, dstar_opt);
  res.measured_dist = ds.value;
  res.measured_dist_gap = ds.gap;
  res.dist_bound_inconclusive = !(ds.gap < 1e-6);
  res.dist_bound_holds = !res.dist_bound_inconclusive && ds.value <= res.bound_approx + kTol;
  return res;
}

FreimanResult freiman_closure_test(const GroupContext& ctx, const std::vector<CoordVec>& S) {
  std::vector<CoordVec> s = normalize_set(ctx, S);
  if (s.empty()) throw std::domain_error("freiman_closure_test: empty set");
  FreimanResult res;
  std::vector<CoordVec> diff = sumset(ctx, s, s, -1);
  res.ratio = static_cast<double>(diff.size()) / static_cast<double>(s.size());
  if (static_cast<double>(diff.size()) < 1.5 * static_cast<double>(s.size())) {
    for (const CoordVec& a : diff) {
      for (const CoordVec& b : diff) {
        if (!set_contains(diff, group_add(ctx, a, b))) {
          throw std::logic_error("freiman_closure_test: closure verification failed");
        }
      }
    }
    res.is_group = true;
    res.subgroup = std::move(diff);
  }
  return res;
}

LocalizeResult localize_subgroup(const FinDist& pX, const FinDist& pY, double eps0) {
  require_same_context(pX.ctx, pY.ctx);
  const GroupContext& ctx = pX.ctx;

  LocalizeResult res;
  res.eps = d_ent(pX, pY);
  res.shift = group_zero(ctx);
  if (res.eps > eps0) {
    res.status = LocalizeStatus::NotApplicable;
    return res;
  }

  if (ctx.torsion_free()) {
    // the only finite subgroup of a lattice is {0}
    res.subgroup = {group_zero(ctx)};
    res.dist_x = d_ent(pX, FinDist::point_mass(ctx, group_zero(ctx)));
    res.dist_y = d_ent(pY, FinDist::point_mass(ctx, group_zero(ctx)));
    res.bound_holds = res.dist_x <= 12 * res.eps + kTol && res.dist_y <= 12 * res.eps + kTol;
    res.status = LocalizeStatus::Ok;
    return res;
  }

  // KL-threshold set at C = eps^{-1/2} (degenerate threshold when eps = 0)
  const FinDist diff = convolve(pX, pY, -1);
  const FinDist neg_y = negate_dist(pY);
  const double threshold = (res.eps > 0 ? std::sqrt(res.eps) : 0.0) + kTol;
  std::vector<CoordVec> S;
  for (const auto& [x, px] : pX.mass) {
    if (kl_divergence(translate(neg_y, x), diff) <= threshold) S.push_back(x);
  }

  FreimanResult fr = freiman_closure_test(ctx, S);
  res.closure_ratio = fr.ratio;
  if (!fr.is_group) {
    res.status = LocalizeStatus::ClosureFailed;
    return res;
  }
  res.subgroup = fr.subgroup;
  if (ctx.kind == GroupKind::F2Vec) {
    res.subgroup_f2 = SubgroupF2::span(ctx.dim, res.subgroup);
  }

  // translation normalization: center X at its heaviest coset of H
  const FinDist coset_x = coset_pushforward(pX, res.subgroup);
  const auto mode = std::max_element(
      coset_x.mass.begin(), coset_x.mass.end(),
      [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return lex_less(b.first, a.first);  // heaviest coset, lex-least on ties
      });
  res.shift = group_neg(ctx, mode->first);

  const FinDist u_h = FinDist::uniform_on(ctx, res.subgroup);
  res.dist_x = d_ent(pX, u_h);
  res.dist_y = d_ent(pY, u_h);
  res.bound_holds = res.dist_x <= 12 * res.eps + kTol && res.dist_y <= 12 * res.eps + kTol;
  res.status = LocalizeStatus::Ok;
  return res;
}

ProjectionAudit projection_inequality_audit(const FinDist& pX1, const FinDist& pX2,
                                            const Homomorphism& pi, double tol) {
  require_same_context(pX1.ctx, pi.domain());
  require_same_context(pX2.ctx, pi.domain());

  ProjectionAudit audit;
  audit.lhs = d_ent_sum(pX1, pX2);
  const FinDist y1 = pushforward(pX1, pi);
  const FinDist y2 = pushforward(pX2, pi);
  audit.rhs_projected = d_ent_sum(y1, y2);

  // fiber term and H(X1+X2 | Y1, Y2), fiber by fiber
  double fiber_sum = 0;
  double h_sum_given_pair = 0;
  for (const auto& [v1, w1] : y1.mass) {
    const FinDist f1 = condition_on_fiber(pX1, pi, v1);
    for (const auto& [v2, w2] : y2.mass) {
      const FinDist f2 = condition_on_fiber(pX2, pi, v2);
      const FinDist s = convolve(f1, f2, +1);
      const double hs = entropy(s);
      fiber_sum += w1 * w2 * (hs - 0.5 * entropy(f1) - 0.5 * entropy(f2));
      h_sum_given_pair += w1 * w2 * hs;
    }
  }
  audit.rhs_fiber_sum = fiber_sum;
  audit.slack = audit.lhs - audit.rhs_projected - audit.rhs_fiber_sum;

  // H(X1+X2 | Y1+Y2): X1+X2 determines Y1+Y2 = pi(X1+X2)
  const FinDist sum_law = convolve(pX1, pX2, +1);
  const double h_sum_given_proj = conditional_entropy_given_map(sum_law, pi);
  audit.slack_identity = h_sum_given_proj - h_sum_given_pair;

  audit.inequality_holds = audit.slack >= -tol;
  audit.identity_holds = std::abs(audit.slack - audit.slack_identity) <= tol;
  return audit;
}

FiberPigeonholeWitness fiber_pigeonhole(const GroupContext& ctx, const std::vector<CoordVec>& A,
                                        const std::vector<CoordVec>& B, const Homomorphism& phi) {
  require_same_context(ctx, phi.domain());
  const std::vector<CoordVec> a = normalize_set(ctx, A);
  const std::vector<CoordVec> b = normalize_set(ctx, B);
  if (a.empty() || b.empty()) throw std::domain_error("fiber_pigeonhole: empty set");

  const FinDist ua = FinDist::uniform_on(ctx, a);
  const FinDist ub = FinDist::uniform_on(ctx, b);
  const FinDist ya = pushforward(ua, phi);
  const FinDist yb = pushforward(ub, phi);

  FiberPigeonholeWitness w;
  w.k = d_ent(ua, ub);
  w.k_bar = d_ent(ya, yb);
  w.M = entropy(ya) + entropy(yb);
  if (w.M <= 0) {
    throw std::domain_error("fiber_pigeonhole: both projections degenerate (M = 0)");
  }

  // exhaustive scan in lexicographic order; first satisfier wins
  for (const auto& [x, ax] : ya.mass) {
    std::vector<CoordVec> fiber_a;
    for (const CoordVec& e : a) {
      if (phi.apply(e) == x) fiber_a.push_back(e);
    }
    const FinDist uax = FinDist::uniform_on(ctx, fiber_a);
    for (const auto& [y, by] : yb.mass) {
      std::vector<CoordVec> fiber_b;
      for (const CoordVec& e : b) {
        if (phi.apply(e) == y) fiber_b.push_back(e);
      }
      const double kp = d_ent(uax, FinDist::uniform_on(ctx, fiber_b));
      const double lhs = w.k_bar * std::log(1.0 / (ax * by));
      const double rhs = w.M * (w.k - kp);
      if (lhs <= rhs + kTol) {
        w.x = x;
        w.y = y;
        w.alpha_x = ax;
        w.beta_y = by;
        w.k_prime = kp;
        w.inequality_holds = true;
        return w;
      }
    }
  }
  throw std::logic_error("fiber_pigeonhole: no witness found");
}

DoublingBound torsion_free_doubling_bound(const FinDist& pX, const FinDist& pY) {
  require_same_context(pX.ctx, pY.ctx);
  if (!pX.ctx.torsion_free()) {
    throw std::domain_error("torsion_free_doubling_bound: requires a torsion-free lattice");
  }
  DoublingBound res;
  const FinDist twoY = pushforward(pY, Homomorphism::doubling(pY.ctx));
  res.d_x_2y = d_ent(pX, twoY);
  res.bound = 5.0 * d_ent(pX, pY);
  res.holds = res.d_x_2y <= res.bound + kTol;
  return res;
}

Mod2EntropyBound mod2_entropy_bound(const FinDist& pX, const FinDist& pY) {
  require_same_context(pX.ctx, pY.ctx);
  if (pX.ctx.kind != GroupKind::ZLattice) {
    throw std::domain_error("mod2_entropy_bound: requires a Z lattice");
  }
  const Homomorphism phi = Homomorphism::mod2(pX.ctx);
  Mod2EntropyBound res;
  res.h_phi_x = entropy(pushforward(pX, phi));
  res.h_phi_y = entropy(pushforward(pY, phi));
  res.bound = 10.0 * d_ent(pX, pY);
  res.holds = res.h_phi_x <= res.bound + kTol && res.h_phi_y <= res.bound + kTol;
  return res;
}

PfrOracleResult brute_pfr_oracle(const FinDist& pX, int dim_cap) {
  if (pX.ctx.kind != GroupKind::F2Vec) {
    throw std::domain_error("brute_pfr_oracle: distribution must live on F2^D");
  }
  const int d = pX.ctx.dim;
  std::vector<SubgroupF2> subs = enumerate_subgroups(d, dim_cap);
  PfrOracleResult best;
  bool first = true;
  for (const SubgroupF2& h : subs) {
    const double dist = d_ent_subgroup(pX, h);
    // ties: smaller subgroup, then lexicographic basis (enumeration order)
    if (first || dist < best.dist - 1e-12) {
      best.subgroup = h;
      best.dist = dist;
      first = false;
    }
  }
  return best;
}

RuzsaCover ruzsa_cover(const GroupContext& ctx, const std::vector<CoordVec>& A,
                       const std::vector<CoordVec>& H, const CoordVec& x0) {
  const std::vector<CoordVec> a = normalize_set(ctx, A);
  const std::vector<CoordVec> h = normalize_set(ctx, H);
  const std::vector<CoordVec> coset = sumset(ctx, h, {canon(ctx, x0)}, +1);
  std::vector<CoordVec> u;
  for (const CoordVec& e : a) {
    if (set_contains(coset, e)) u.push_back(e);
  }
  if (u.empty()) throw std::domain_error("ruzsa_cover: A does not meet H + x0");

  // greedy maximal family with pairwise disjoint translates a_i + U;
  // every a in A then lies in some a_i + U - U, and U - U <= H
  RuzsaCover cover;
  std::vector<std::vector<CoordVec>> placed;  // the sets a_i + U
  for (const CoordVec& e : a) {
    std::vector<CoordVec> shifted = sumset(ctx, u, {e}, +1);
    bool disjoint = true;
    for (const std::vector<CoordVec>& other : placed) {
      for (const CoordVec& v : shifted) {
        if (set_contains(other, v)) { disjoint = false; break; }
      }
      if (!disjoint) break;
    }
    if (disjoint) {
      cover.representatives.push_back(e);
      placed.push_back(std::move(shifted));
    }
  }
  // certify: every element covered by some representative + H
  for (const CoordVec& e : a) {
    bool covered = false;
    for (const CoordVec& rep : cover.representatives) {
      if (set_contains(h, group_sub(ctx, e, rep))) { covered = true; break; }
    }
    if (!covered) throw std::logic_error("ruzsa_cover: uncovered element");
  }
  cover.cover_bound = sumset(ctx, a, u, +1).size() / u.size();
  if (cover.representatives.size() > cover.cover_bound) {
    throw std::logic_error("ruzsa_cover: covering bound violated");
  }
  return cover;
}

}  // namespace entkit
