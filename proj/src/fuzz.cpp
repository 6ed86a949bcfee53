#include "entkit/fuzz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "entkit/coupling.hpp"
#include "entkit/gen.hpp"
#include "entkit/io.hpp"
#include "entkit/structure.hpp"

namespace entkit {

namespace {

using io::json;
using io::round12;

struct Outcome {
  bool ok = true;
  double lhs = 0;
  double rhs = 0;
};

double utilization(const Outcome& o) {
  if (std::abs(o.rhs) > 1e-12) return o.lhs / o.rhs;
  return std::abs(o.lhs) <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
}

using CheckFn = std::function<Outcome(TrialRng&, double, json*)>;

struct Check {
  std::string name;
  CheckFn fn;
};

json instance_pair(const FinDist& x, const FinDist& y) {
  return json{{"x", io::dist_to_json(x)}, {"y", io::dist_to_json(y)}};
}

Outcome leq(double lhs, double rhs, double tol) { return {lhs <= rhs + tol, lhs, rhs}; }
Outcome close(double lhs, double rhs, double tol) {
  return {std::abs(lhs - rhs) <= tol, lhs, rhs};
}

// --- individual inequality checks -----------------------------------------

Outcome chk_triangle(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist x = sample_dist(rng, ctx, 1, 6);
  const FinDist y = sample_dist(rng, ctx, 1, 6);
  const FinDist z = sample_dist(rng, ctx, 1, 6);
  if (inst) {
    *inst = instance_pair(x, y);
    (*inst)["z"] = io::dist_to_json(z);
  }
  return leq(d_ent(x, z), d_ent(x, y) + d_ent(y, z), tol);
}

Outcome chk_improved_triangle(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist x = sample_dist(rng, ctx, 1, 5);
  const FinDist y = sample_dist(rng, ctx, 1, 5);
  const FinDist z = sample_dist(rng, ctx, 1, 5);
  if (inst) {
    *inst = instance_pair(x, y);
    (*inst)["z"] = io::dist_to_json(z);
  }
  const DStarResult ds = d_star(x, z);
  return leq(ds.value, d_ent(x, y) + d_ent(y, z), tol);
}

Outcome chk_dstar_sandwich(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist x = sample_dist(rng, ctx, 1, 5);
  const FinDist y = sample_dist(rng, ctx, 1, 5);
  if (inst) *inst = instance_pair(x, y);
  const double d = d_ent(x, y);
  const DStarResult ds = d_star(x, y);
  if (!(ds.gap < 1e-6)) return {true, 0, 1};  // not converged: no verdict
  const bool ok = d <= ds.value + ds.gap + tol && ds.value <= 3.0 * d + tol;
  return {ok, ds.value, 3.0 * d};
}

Outcome chk_entropy_range(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist x = sample_dist(rng, ctx, 1, 8);
  if (inst) *inst = io::dist_to_json(x);
  const double h = entropy(x);
  const bool ok = h >= -tol && h <= std::log(double(x.support_size())) + tol &&
                  x.max_mass() >= std::exp(-h) - tol;
  return {ok, h, std::log(double(x.support_size()))};
}

Outcome chk_submodularity(TrialRng& rng, double tol, json* inst) {
  // random joint table on a 3 x 3 x 3 cube
  const int na = 2 + int(rng.uniform_int(0, 1));
  const int nb = 2 + int(rng.uniform_int(0, 1));
  const int nc = 2 + int(rng.uniform_int(0, 1));
  std::vector<double> table(na * nb * nc);
  double total = 0;
  for (double& v : table) {
    v = -std::log(1.0 - rng.next_unit());
    total += v;
  }
  for (double& v : table) v /= total;
  auto ent = [&](auto&& proj) {
    std::map<std::vector<int>, double> m;
    for (int a = 0; a < na; ++a) {
      for (int b = 0; b < nb; ++b) {
        for (int c = 0; c < nc; ++c) m[proj(a, b, c)] += table[(a * nb + b) * nc + c];
      }
    }
    double h = 0;
    for (const auto& [k, p] : m) {
      if (p > 0) h -= p * std::log(p);
    }
    return h;
  };
  const double h_abc = ent([](int a, int b, int c) { return std::vector<int>{a, b, c}; });
  const double h_c = ent([](int, int, int c) { return std::vector<int>{c}; });
  const double h_ac = ent([](int a, int, int c) { return std::vector<int>{a, c}; });
  const double h_bc = ent([](int, int b, int c) { return std::vector<int>{b, c}; });
  if (inst) *inst = json{{"table", table}, {"shape", {na, nb, nc}}};
  return leq(h_abc + h_c, h_ac + h_bc, tol);
}

Outcome chk_difference_lower(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist x = sample_dist(rng, ctx, 1, 6);
  const FinDist y = sample_dist(rng, ctx, 1, 6);
  if (inst) *inst = instance_pair(x, y);
  return leq(std::max(entropy(x), entropy(y)), entropy(convolve(x, y, -1)), tol);
}

Outcome chk_kl_pinsker(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist q = sample_dist(rng, ctx, 2, 8);
  // p supported inside supp(q)
  TrialRng sub(rng.next_u64(), 0);
  std::vector<std::pair<CoordVec, double>> w;
  double total = 0;
  for (const auto& [v, qq] : q.mass) {
    const double e = -std::log(1.0 - sub.next_unit());
    w.emplace_back(v, e);
    total += e;
  }
  for (auto& [v, e] : w) e /= total;
  const FinDist p = FinDist::from_weights(ctx, std::move(w));
  if (inst) *inst = instance_pair(p, q);
  const double kl = kl_divergence(p, q);
  if (kl < -tol) return {false, kl, 0};
  return leq(l1_distance(p, q), std::sqrt(2.0 * kl), tol);
}

Outcome chk_kl_uniform_identity(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const std::vector<CoordVec> s = sample_set(rng, ctx, 2, 8);
  TrialRng sub(rng.next_u64(), 1);
  std::vector<std::pair<CoordVec, double>> w;
  double total = 0;
  for (const CoordVec& v : s) {
    const double e = -std::log(1.0 - sub.next_unit());
    w.emplace_back(v, e);
    total += e;
  }
  for (auto& [v, e] : w) e /= total;
  const FinDist p = FinDist::from_weights(ctx, std::move(w));
  if (inst) *inst = io::dist_to_json(p);
  const double kl = kl_divergence(p, FinDist::uniform_on(ctx, s));
  return close(kl, std::log(double(s.size())) - entropy(p), tol);
}

Outcome chk_renyi_monotone(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist x = sample_dist(rng, ctx, 1, 8);
  if (inst) *inst = io::dist_to_json(x);
  const double alphas[] = {0.0, 0.5, 1.0, 2.0, 3.0};
  double hv[5];
  for (int i = 0; i < 5; ++i) hv[i] = renyi_entropy(x, alphas[i]);
  bool ok = true;
  double worst_gap = -std::numeric_limits<double>::infinity();
  double wl = 0, wr = 1;
  for (int i = 1; i < 5; ++i) {
    if (hv[i] > hv[i - 1] + tol) ok = false;
    if (hv[i] - hv[i - 1] > worst_gap) {
      worst_gap = hv[i] - hv[i - 1];
      wl = hv[i];
      wr = hv[i - 1];
    }
  }
  return {ok, wl, wr};
}

Outcome chk_set_sandwich(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const std::vector<CoordVec> a = sample_set(rng, ctx, 1, 12);
  if (inst) *inst = io::set_to_json(ctx, a);
  const MetricReport rep = sandwich_check(ctx, a);
  const bool ok = rep.energy_lower <= rep.sigma_ent + tol && rep.sigma_ent <= rep.sigma_comb + tol;
  return {ok, rep.sigma_ent, rep.sigma_comb};
}

Homomorphism sample_hom(TrialRng& rng, const GroupContext& ctx) {
  if (ctx.kind == GroupKind::ZLattice) {
    switch (rng.uniform_int(0, 2)) {
      case 0: return Homomorphism::mod2(ctx);
      case 1: return Homomorphism::coord_project(ctx, int(rng.uniform_int(0, ctx.dim - 1)));
      default: return Homomorphism::doubling(ctx);
    }
  }
  if (ctx.kind == GroupKind::F2Vec) {
    std::vector<CoordVec> gens;
    const int ngen = int(rng.uniform_int(0, ctx.dim));
    for (int i = 0; i < ngen; ++i) {
      CoordVec g(ctx.dim);
      for (int j = 0; j < ctx.dim; ++j) g[j] = rng.uniform_int(0, 1);
      gens.push_back(std::move(g));
    }
    return Homomorphism::quotient_by(ctx, SubgroupF2::span(ctx.dim, gens));
  }
  return Homomorphism::doubling(ctx);
}

Outcome chk_projection_contraction(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist x = sample_dist(rng, ctx, 1, 6);
  const Homomorphism pi = sample_hom(rng, ctx);
  if (inst) {
    *inst = io::dist_to_json(x);
    (*inst)["hom"] = pi.describe();
  }
  return leq(sigma_ent(pushforward(x, pi)), sigma_ent(x), tol);
}

Outcome chk_projection_audit(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist x1 = sample_dist(rng, ctx, 1, 6);
  const FinDist x2 = sample_dist(rng, ctx, 1, 6);
  const Homomorphism pi = sample_hom(rng, ctx);
  if (inst) {
    *inst = instance_pair(x1, x2);
    (*inst)["hom"] = pi.describe();
  }
  const ProjectionAudit a = projection_inequality_audit(x1, x2, pi, tol);
  return {a.inequality_holds && a.identity_holds, a.rhs_projected + a.rhs_fiber_sum, a.lhs};
}

Outcome chk_kl_mixture_equality(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist z = sample_dist(rng, ctx, 1, 5);
  const FinDist y = sample_dist(rng, ctx, 1, 5);
  if (inst) *inst = instance_pair(z, y);
  const FinDist x = convolve(z, y, -1);  // equality case of the mixture bound
  double rhs = 0;
  const FinDist neg_y = negate_dist(y);
  for (const auto& [zv, pz] : z.mass) rhs += pz * kl_divergence(translate(neg_y, zv), x);
  return close(entropy(x) - entropy(y), rhs, tol);
}

Outcome chk_concentrated_self(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = GroupContext::zmod({7});
  const FinDist x = sample_concentrated(rng, ctx, 0.05);
  if (inst) *inst = io::dist_to_json(x);
  return leq(entropy(x), 2.0 * d_ent(x, x), tol);
}

Outcome chk_near_uniform_self(TrialRng& rng, double tol, json* inst) {
  // subgroup menu: subspaces of F2^3 and subgroups of Z/12
  std::vector<CoordVec> h;
  GroupContext ctx = GroupContext::f2(3);
  if (rng.uniform_int(0, 1) == 0) {
    const auto subs = enumerate_subgroups(3);
    const SubgroupF2& pick = subs[rng.uniform_int(1, std::int64_t(subs.size()) - 1)];
    h = pick.elements();
  } else {
    ctx = GroupContext::zmod({12});
    const Coord divisors[] = {1, 2, 3, 4, 6, 12};
    const Coord step = divisors[rng.uniform_int(0, 5)];
    for (Coord v = 0; v < 12; v += step) h.push_back({v});
  }
  const FinDist x = sample_near_uniform(rng, h, ctx, 0.125);
  if (inst) *inst = io::dist_to_json(x);
  return leq(std::log(double(h.size())) - entropy(x), 2.0 * d_ent(x, x), tol);
}

Outcome chk_doubling_factor5(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = GroupContext::z_lattice(1 + int(rng.uniform_int(0, 1)));
  const FinDist x = sample_dist(rng, ctx, 1, 6);
  const FinDist y = sample_dist(rng, ctx, 1, 6);
  if (inst) *inst = instance_pair(x, y);
  const DoublingBound b = torsion_free_doubling_bound(x, y);
  return leq(b.d_x_2y, b.bound, tol);
}

Outcome chk_mod2_factor10(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = GroupContext::z_lattice(1 + int(rng.uniform_int(0, 1)));
  const FinDist x = sample_dist(rng, ctx, 1, 6);
  const FinDist y = sample_dist(rng, ctx, 1, 6);
  if (inst) *inst = instance_pair(x, y);
  const Mod2EntropyBound b = mod2_entropy_bound(x, y);
  return leq(std::max(b.h_phi_x, b.h_phi_y), b.bound, tol);
}

FinDist mixed_with_uniform(TrialRng& rng, const GroupContext& ctx, double t) {
  const std::vector<CoordVec> all = ctx.elements();
  std::vector<double> noise(all.size());
  double total = 0;
  for (double& v : noise) {
    v = -std::log(1.0 - rng.next_unit());
    total += v;
  }
  std::vector<std::pair<CoordVec, double>> w;
  const double u = 1.0 / double(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    w.emplace_back(all[i], (1.0 - t) * u + t * noise[i] / total);
  }
  return FinDist::from_weights(ctx, std::move(w));
}

Outcome chk_three_marginal(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx =
      rng.uniform_int(0, 1) == 0 ? GroupContext::f2(2) : GroupContext::zmod({5});
  const std::vector<CoordVec> h = ctx.elements();
  // mixing weight 1/6 keeps the total variation sum under 1
  const double t1 = rng.next_unit() / 6.0;
  const double t2 = rng.next_unit() / 6.0;
  const double t3 = rng.next_unit() / 6.0;
  CouplingProblem prob{mixed_with_uniform(rng, ctx, t1), mixed_with_uniform(rng, ctx, t2),
                       mixed_with_uniform(rng, ctx, t3)};
  const double tv = three_marginal_tv_sum(prob, h);
  if (inst) {
    *inst = json{{"p1", io::dist_to_json(prob.p1)},
                 {"p2", io::dist_to_json(prob.p2)},
                 {"p3", io::dist_to_json(prob.p3)},
                 {"tv_sum", round12(tv)}};
  }
  const ThreeMarginalResult res = solve_three_marginal(prob);
  const bool ok = tv <= 1.0 + tol && res.feasible && res.max_marginal_error <= 1e-9;
  return {ok, tv, 1.0};
}

Outcome chk_dent_invariance(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist x = sample_dist(rng, ctx, 1, 6);
  const FinDist y = sample_dist(rng, ctx, 1, 6);
  CoordVec c(ctx.dim);
  for (int i = 0; i < ctx.dim; ++i) c[i] = rng.uniform_int(-3, 3);
  c = canon(ctx, c);
  if (inst) {
    *inst = instance_pair(x, y);
    (*inst)["shift"] = c;
  }
  const double d = d_ent(x, y);
  const bool ok = std::abs(d_ent(translate(x, c), y) - d) <= tol &&
                  std::abs(d_ent(x, translate(y, c)) - d) <= tol &&
                  std::abs(d_ent(negate_dist(x), negate_dist(y)) - d) <= tol &&
                  std::abs(d_ent(y, x) - d) <= tol &&
                  d >= std::abs(entropy(x) - entropy(y)) / 2.0 - tol;
  return {ok, std::abs(entropy(x) - entropy(y)) / 2.0, d};
}

Outcome chk_subgroup_identity(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = GroupContext::f2(3);
  const FinDist x = sample_dist(rng, ctx, 1, 8);
  const auto subs = enumerate_subgroups(3);
  const SubgroupF2& h = subs[rng.uniform_int(0, std::int64_t(subs.size()) - 1)];
  if (inst) {
    *inst = io::dist_to_json(x);
    (*inst)["subgroup"] = io::subgroup_to_json(h);
  }
  const double direct = d_ent(x, FinDist::uniform_on(ctx, h.elements()));
  const double formula = d_ent_subgroup(x, h);
  const double hpi = formula - 0.5 * (h.log_size() - entropy(x));
  const bool ok = std::abs(direct - formula) <= tol && hpi <= 2.0 * direct + tol;
  return {ok, formula, direct};
}

Outcome chk_extraction_bounds(TrialRng& rng, double tol, json* inst) {
  const GroupContext ctx = sample_ctx(rng);
  const FinDist x = sample_dist(rng, ctx, 1, 6);
  const FinDist y = sample_dist(rng, ctx, 1, 6);
  const double k = d_ent(x, y);
  double C = 4.0;
  switch (rng.uniform_int(0, 2)) {
    case 0: C = 4.0; break;
    case 1: C = 8.0; break;
    default: C = k > 0 ? std::max(4.0, 1.0 / std::sqrt(k)) : 4.0;
  }
  if (inst) {
    *inst = instance_pair(x, y);
    (*inst)["C"] = round12(C);
  }
  const ExtractionResult r = extract_structured_set(x, y, C);
  const double log_s = std::log(double(r.S.size()));
  bool ok = !r.S.empty() && r.p_mass >= 1.0 - 2.0 / C - tol && log_s >= r.log_size_lower - tol &&
            r.doubling_bound_holds && (r.dist_bound_holds || r.dist_bound_inconclusive);
  if (C == 4.0) {
    const FinDist us = FinDist::uniform_on(ctx, r.S);
    ok = ok && d_ent(us, y) <= 6.0 * k + std::log(2.0) + tol;
    const auto diff = sumset(ctx, r.S, r.S, -1);
    ok = ok && double(diff.size()) <= 4.0 * std::exp(12.0 * k) * double(r.S.size()) + tol;
  }
  return {ok, r.measured_doubling, r.bound_doubling};
}

const std::vector<Check>& registry() {
  static const std::vector<Check> checks = {
      {"ruzsa-triangle", chk_triangle},
      {"improved-triangle", chk_improved_triangle},
      {"dstar-sandwich", chk_dstar_sandwich},
      {"entropy-range", chk_entropy_range},
      {"submodularity", chk_submodularity},
      {"difference-entropy-lower", chk_difference_lower},
      {"kl-pinsker", chk_kl_pinsker},
      {"kl-uniform-identity", chk_kl_uniform_identity},
      {"renyi-monotone", chk_renyi_monotone},
      {"set-sandwich", chk_set_sandwich},
      {"projection-contraction", chk_projection_contraction},
      {"projection-fiber-audit", chk_projection_audit},
      {"kl-mixture-equality", chk_kl_mixture_equality},
      {"concentrated-self-distance", chk_concentrated_self},
      {"near-uniform-self-distance", chk_near_uniform_self},
      {"torsion-free-doubling-factor5", chk_doubling_factor5},
      {"mod2-entropy-factor10", chk_mod2_factor10},
      {"three-marginal-feasible", chk_three_marginal},
      {"dent-invariance", chk_dent_invariance},
      {"subgroup-distance-identity", chk_subgroup_identity},
      {"extraction-bounds", chk_extraction_bounds},
  };
  return checks;
}

std::uint64_t name_stream(const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

const std::vector<std::string>& fuzz_check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Check& c : registry()) out.push_back(c.name);
    return out;
  }();
  return names;
}

FuzzReport run_fuzz(const FuzzConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("run_fuzz: trials must be >= 1");
  std::vector<const Check*> selected;
  for (const Check& c : registry()) {
    if (cfg.selected.empty() ||
        std::find(cfg.selected.begin(), cfg.selected.end(), c.name) != cfg.selected.end()) {
      selected.push_back(&c);
    }
  }
  if (selected.empty()) throw std::invalid_argument("run_fuzz: no matching inequality");

  FuzzReport report;
  report.seed = cfg.seed;
  report.trials = cfg.trials;
  report.tolerance = cfg.tolerance;

  for (const Check* check : selected) {
    const std::uint64_t stream = name_stream(check->name);
    std::vector<Outcome> outcomes(cfg.trials);
#ifdef _OPENMP
    const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (int t = 0; t < cfg.trials; ++t) {
      TrialRng rng(cfg.seed, static_cast<std::uint64_t>(t), stream);
      outcomes[t] = check->fn(rng, cfg.tolerance, nullptr);
    }

    InequalityStat stat;
    stat.name = check->name;
    stat.trials = cfg.trials;
    int tightest = -1;
    double best_util = -1;
    for (int t = 0; t < cfg.trials; ++t) {
      if (!outcomes[t].ok) ++stat.failures;
      const double u = utilization(outcomes[t]);
      if (u > best_util) {
        best_util = u;
        tightest = t;
      }
    }
    stat.max_utilization = round12(best_util);
    if (tightest >= 0) {
      TrialRng rng(cfg.seed, static_cast<std::uint64_t>(tightest), stream);
      json inst;
      const Outcome o = check->fn(rng, cfg.tolerance, &inst);
      stat.tightest_lhs = round12(o.lhs);
      stat.tightest_rhs = round12(o.rhs);
      stat.tightest_instance = inst.dump();
    }
    report.total_failures += stat.failures;
    report.stats.push_back(std::move(stat));
  }
  return report;
}

std::string FuzzReport::to_json_bytes() const {
  json j;
  j["seed"] = seed;
  j["trials"] = trials;
  j["tolerance"] = tolerance;
  j["total_failures"] = total_failures;
  json stats_json = json::array();
  for (const InequalityStat& s : stats) {
    stats_json.push_back(json{{"name", s.name},
                              {"trials", s.trials},
                              {"failures", s.failures},
                              {"max_utilization", s.max_utilization},
                              {"tightest_lhs", s.tightest_lhs},
                              {"tightest_rhs", s.tightest_rhs},
                              {"tightest_instance", s.tightest_instance}});
  }
  j["inequalities"] = std::move(stats_json);
  return j.dump(2);
}

}  // namespace entkit
