#include "entkit/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace entkit {

namespace {

double xlog1overx(double p) { return p > 0 ? -p * std::log(p) : 0.0; }

std::string set_key(const std::vector<CoordVec>& s) {
  std::string key;
  key.reserve(s.size() * 9);
  for (const CoordVec& v : s) {
    for (Coord c : v) key.append(reinterpret_cast<const char*>(&c), sizeof(Coord));
    key.push_back('|');
  }
  return key;
}

// d_ent between uniform variables on two sets, memoized by canonical keys.
class UniformDistCache {
 public:
  explicit UniformDistCache(const GroupContext& ctx) : ctx_(ctx) {}

  double dist(const std::vector<CoordVec>& a, const std::vector<CoordVec>& b) {
    auto key = std::make_pair(set_key(a), set_key(b));
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double d = d_ent(FinDist::uniform_on(ctx_, a), FinDist::uniform_on(ctx_, b));
    cache_.emplace(std::move(key), d);
    return d;
  }

 private:
  GroupContext ctx_;
  std::map<std::pair<std::string, std::string>, double> cache_;
};

// ---------------------------------------------------------------------------
// Integer lattice normalization (Hermite form of the generated sublattice)

Coord checked_mul(Coord a, Coord b) {
  Coord r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("lattice: coordinate overflow");
  return r;
}

Coord checked_sub(Coord a, Coord b) {
  Coord r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("lattice: coordinate overflow");
  return r;
}

Coord checked_add(Coord a, Coord b) {
  Coord r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("lattice: coordinate overflow");
  return r;
}

// Row-style Hermite basis of the lattice generated by `gens`; rows have
// strictly increasing pivot columns with positive pivots.
std::vector<CoordVec> hermite_basis(std::vector<CoordVec> gens, int dim) {
  std::vector<CoordVec> rows;
  for (CoordVec& g : gens) {
    if (std::any_of(g.begin(), g.end(), [](Coord c) { return c != 0; })) rows.push_back(g);
  }
  std::vector<CoordVec> basis;
  int col = 0;
  while (col < dim && !rows.empty()) {
    // gcd-reduce the current column
    while (true) {
      std::size_t piv = rows.size();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][col] != 0 &&
            (piv == rows.size() || std::abs(rows[i][col]) < std::abs(rows[piv][col]))) {
          piv = i;
        }
      }
      if (piv == rows.size()) break;  // column clear
      std::swap(rows[piv], rows[0]);
      bool again = false;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][col] != 0) {
          const Coord q = rows[i][col] / rows[0][col];
          for (int j = 0; j < dim; ++j) {
            rows[i][j] = checked_sub(rows[i][j], checked_mul(q, rows[0][j]));
          }
          if (rows[i][col] != 0) again = true;
        }
      }
      if (!again) {
        if (rows[0][col] < 0) {
          for (int j = 0; j < dim; ++j) rows[0][j] = -rows[0][j];
        }
        basis.push_back(rows[0]);
        rows.erase(rows.begin());
        rows.erase(std::remove_if(rows.begin(), rows.end(),
                                  [](const CoordVec& r) {
                                    return std::all_of(r.begin(), r.end(),
                                                       [](Coord c) { return c == 0; });
                                  }),
                   rows.end());
        break;
      }
    }
    ++col;
  }
  // reduce entries above each pivot for a canonical form
  for (std::size_t i = basis.size(); i-- > 0;) {
    int p = 0;
    while (basis[i][p] == 0) ++p;
    for (std::size_t j = 0; j < i; ++j) {
      const Coord q = basis[j][p] >= 0 ? basis[j][p] / basis[i][p]
                                       : -((-basis[j][p] + basis[i][p] - 1) / basis[i][p]);
      if (q != 0) {
        for (int c = 0; c < dim; ++c) {
          basis[j][c] = checked_sub(basis[j][c], checked_mul(q, basis[i][c]));
        }
      }
    }
  }
  return basis;
}

struct LatticeFrame {
  bool changed = false;
  GroupContext ctx;                  // reduced context Z^r
  std::vector<CoordVec> A, B;        // sets in reduced coordinates
  CoordVec a0, b0;                   // base points in parent coordinates
  std::vector<CoordVec> basis;       // lattice basis rows in parent coordinates

  CoordVec lift(const CoordVec& reduced, const CoordVec& base,
                const GroupContext& parent_ctx) const {
    CoordVec v = base;
    for (std::size_t r = 0; r < basis.size(); ++r) {
      for (int j = 0; j < parent_ctx.dim; ++j) {
        v[j] = checked_add(v[j], checked_mul(reduced[r], basis[r][j]));
      }
    }
    return v;
  }
};

CoordVec coords_in_basis(const std::vector<CoordVec>& basis, CoordVec v, int dim) {
  CoordVec out(basis.size(), 0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    int p = 0;
    while (basis[i][p] == 0) ++p;
    if (v[p] % basis[i][p] != 0) throw std::logic_error("lattice: vector outside sublattice");
    const Coord q = v[p] / basis[i][p];
    out[i] = q;
    for (int j = 0; j < dim; ++j) v[j] = checked_sub(v[j], checked_mul(q, basis[i][j]));
  }
  if (std::any_of(v.begin(), v.end(), [](Coord c) { return c != 0; })) {
    throw std::logic_error("lattice: vector outside sublattice");
  }
  return out;
}

// Translate A, B to contain 0 and rewrite them in a basis of the sublattice
// generated by the differences, so the sets no longer sit inside cosets of a
// proper subgroup of the ambient lattice.
LatticeFrame reduce_lattice(const GroupContext& ctx, const std::vector<CoordVec>& A,
                            const std::vector<CoordVec>& B) {
  LatticeFrame f;
  f.a0 = A.front();
  f.b0 = B.front();
  std::vector<CoordVec> gens;
  for (const CoordVec& a : A) gens.push_back(group_sub(ctx, a, f.a0));
  for (const CoordVec& b : B) gens.push_back(group_sub(ctx, b, f.b0));
  f.basis = hermite_basis(std::move(gens), ctx.dim);
  const int r = static_cast<int>(f.basis.size());

  bool identity = r == ctx.dim;
  if (identity) {
    for (int i = 0; i < r && identity; ++i) {
      for (int j = 0; j < ctx.dim && identity; ++j) {
        if (f.basis[i][j] != (i == j ? 1 : 0)) identity = false;
      }
    }
  }
  if (identity) {
    f.changed = false;
    f.ctx = ctx;
    f.A = A;
    f.B = B;
    return f;
  }
  f.changed = true;
  f.ctx = GroupContext::z_lattice(r);
  for (const CoordVec& a : A) f.A.push_back(coords_in_basis(f.basis, group_sub(ctx, a, f.a0), ctx.dim));
  for (const CoordVec& b : B) f.B.push_back(coords_in_basis(f.basis, group_sub(ctx, b, f.b0), ctx.dim));
  f.A = normalize_set(f.ctx, f.A);
  f.B = normalize_set(f.ctx, f.B);
  return f;
}

// ---------------------------------------------------------------------------
// Shared recursion helpers

std::map<Coord, std::vector<CoordVec>> fibers_by_coord(const std::vector<CoordVec>& s, int c) {
  std::map<Coord, std::vector<CoordVec>> out;
  for (const CoordVec& v : s) out[v[c]].push_back(v);
  return out;
}

std::map<CoordVec, std::vector<CoordVec>, bool (*)(const CoordVec&, const CoordVec&)>
fibers_by_hom(const std::vector<CoordVec>& s, const Homomorphism& h) {
  std::map<CoordVec, std::vector<CoordVec>, bool (*)(const CoordVec&, const CoordVec&)> out(
      lex_less);
  for (const CoordVec& v : s) out[h.apply(v)].push_back(v);
  return out;
}

struct NodeBudget {
  std::vector<TraceNode>* trace;
  int next_index = 0;

  int open(int parent, int depth, const std::string& label, std::size_t na, std::size_t nb,
           int dim, std::int64_t measure) {
    TraceNode n;
    n.index = next_index++;
    n.parent = parent;
    n.depth = depth;
    n.label = label;
    n.size_a = static_cast<std::int64_t>(na);
    n.size_b = static_cast<std::int64_t>(nb);
    n.dim = dim;
    n.measure = measure;
    trace->push_back(n);
    return n.index;
  }
  TraceNode& at(int idx) { return (*trace)[idx]; }
};

void check_strict_decrease(const std::vector<TraceNode>& trace) {
  for (const TraceNode& n : trace) {
    if (n.parent >= 0 && n.label != "reduce") {
      const TraceNode& p = trace[n.parent];
      if (p.label == "reduce" ? n.measure > p.measure : n.measure >= p.measure) {
        throw std::logic_error("decompose: recursion measure did not decrease");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Skew-dimension decomposition

class SkewEngine {
 public:
  SkewEngine(const GroupContext& ctx, const AlgoConfig& cfg, std::vector<TraceNode>* trace)
      : ctx_(ctx), cfg_(cfg), cache_(ctx), nodes_{trace} {}

  std::pair<std::vector<CoordVec>, std::vector<CoordVec>> run(const std::vector<CoordVec>& A,
                                                              const std::vector<CoordVec>& B,
                                                              int parent, int depth) {
    const std::int64_t measure = static_cast<std::int64_t>(A.size() * B.size());
    // splitting coordinate: first one where a projection is not a singleton
    int split = -1;
    for (int c = 0; c < ctx_.dim; ++c) {
      auto varies = [&](const std::vector<CoordVec>& s) {
        for (const CoordVec& v : s) {
          if (v[c] != s.front()[c]) return true;
        }
        return false;
      };
      if (varies(A) || varies(B)) { split = c; break; }
    }
    if (split < 0) {
      nodes_.open(parent, depth, "base", A.size(), B.size(), ctx_.dim, measure);
      return {A, B};
    }

    const double k = cache_.dist(A, B);
    auto fa = fibers_by_coord(A, split);
    auto fb = fibers_by_coord(B, split);
    const double na = static_cast<double>(A.size()), nb = static_cast<double>(B.size());

    const GroupContext line = GroupContext::z_lattice(1);
    std::vector<std::pair<CoordVec, double>> wa, wb;
    for (const auto& [i, f] : fa) wa.push_back({{i}, static_cast<double>(f.size()) / na});
    for (const auto& [j, f] : fb) wb.push_back({{j}, static_cast<double>(f.size()) / nb});
    const double eps_split = d_ent(FinDist::from_weights(line, wa), FinDist::from_weights(line, wb));

    const double C = cfg_.c_skew();
    const double eps = cfg_.eps();

    if (eps_split <= eps) {
      // concentrated projections: one fiber pair already carries the bound
      const int idx =
          nodes_.open(parent, depth, "case1", A.size(), B.size(), ctx_.dim, measure);
      TraceNode& node = nodes_.at(idx);
      node.k = k;
      node.split_stat = eps_split;

      const Coord* pick_i = nullptr;
      const Coord* pick_j = nullptr;
      double fallback_score = 0;
      const Coord* fb_i = nullptr;
      const Coord* fb_j = nullptr;
      for (const auto& [i, fiber_a] : fa) {
        for (const auto& [j, fiber_b] : fb) {
          const double pi = static_cast<double>(fiber_a.size()) / na;
          const double pj = static_cast<double>(fiber_b.size()) / nb;
          const double kij = cache_.dist(fiber_a, fiber_b);
          const double score = kij - (std::log(pi) + std::log(pj)) / C;
          if (fb_i == nullptr || score < fallback_score - 1e-12) {
            fb_i = &i;
            fb_j = &j;
            fallback_score = score;
          }
          if (pick_i == nullptr && kij <= k + (std::log(pi) + std::log(pj)) / C + cfg_.tol) {
            pick_i = &i;
            pick_j = &j;
          }
        }
      }
      if (pick_i == nullptr) {
        node.hypothesis_ok = false;
        node.note = "no fiber satisfied the concentrated-case selection rule";
        pick_i = fb_i;
        pick_j = fb_j;
      }
      const std::vector<CoordVec>& Ai = fa.at(*pick_i);
      const std::vector<CoordVec>& Bj = fb.at(*pick_j);
      node.k_child = cache_.dist(Ai, Bj);
      node.node_loss = std::log(na / Ai.size()) + std::log(nb / Bj.size());
      // selection rule rearranged: the fiber loss must fit C (k - k')
      node.node_loss_bound = C * (k - node.k_child);
      node.f_step_ok = node.node_loss <= node.node_loss_bound + cfg_.tol;
      return run(Ai, Bj, idx, depth + 1);
    }

    // spread projections: recurse on every fiber pair with a real decrement
    const int idx =
        nodes_.open(parent, depth, "case2", A.size(), B.size(), ctx_.dim, measure);
    {
      TraceNode& node = nodes_.at(idx);
      node.k = k;
      node.split_stat = eps_split;
    }
    std::map<Coord, std::vector<CoordVec>> best_a;  // per row i
    std::map<Coord, std::vector<CoordVec>> best_b;  // per column j
    bool any = false;
    for (const auto& [i, fiber_a] : fa) {
      for (const auto& [j, fiber_b] : fb) {
        const double kij = cache_.dist(fiber_a, fiber_b);
        if (k - kij > eps / 2) {
          any = true;
          auto [ap, bp] = run(fiber_a, fiber_b, idx, depth + 1);
          auto& slot_a = best_a[i];
          if (ap.size() > slot_a.size()) slot_a = ap;
          auto& slot_b = best_b[j];
          if (bp.size() > slot_b.size()) slot_b = bp;
        }
      }
    }
    if (!any) throw std::logic_error("skew_decompose: spread case selected no fiber pair");
    std::vector<CoordVec> Ap, Bp;
    for (const auto& [i, s] : best_a) Ap.insert(Ap.end(), s.begin(), s.end());
    for (const auto& [j, s] : best_b) Bp.insert(Bp.end(), s.begin(), s.end());
    Ap = normalize_set(ctx_, Ap);
    Bp = normalize_set(ctx_, Bp);
    TraceNode& node = nodes_.at(idx);
    node.node_loss = std::log(na * nb / (static_cast<double>(Ap.size()) * Bp.size()));
    node.node_loss_bound = C * k;
    return {Ap, Bp};
  }

 private:
  GroupContext ctx_;
  AlgoConfig cfg_;
  UniformDistCache cache_;
  NodeBudget nodes_;
};

// ---------------------------------------------------------------------------
// Dimension decompositions (mod-2 splitting)

constexpr double kDelta0 = 0.05;  // concentration threshold 1/20

struct DimShared {
  AlgoConfig cfg;
  bool boosted = false;
  NodeBudget nodes;
  double measured_pfr_c = 0;

  double f_bound(double t) const {
    const double c1 = cfg.c1();
    if (boosted) return c1 * t * (1.0 + std::pow(t, 1.0 - 1.0 / cfg.c_pfr));
    return c1 * t * (1.0 + t);
  }
};

// One chain step: the subspace W >= H minimizing the subgroup distance of X
// in the quotient by H, evaluated entirely inside F2^D.
struct ChainStep {
  SubgroupF2 w;
  double dist_x = 0;
  double ratio = 0;  // dist / (k (1 + k^{C_PFR - 1}))
};

double subgroup_quotient_entropy(const FinDist& p, const SubgroupF2& h) {
  std::unordered_map<CoordVec, double, ElementHash> acc;
  for (const auto& [x, px] : p.mass) acc[h.reduce(x)] += px;
  double e = 0;
  for (const auto& [key, w] : acc) e += xlog1overx(w);
  return e;
}

// d_ent of the images of X, Y in F2^D / H, via the difference law.
double quotient_dist(const FinDist& diff_xy, const FinDist& x, const FinDist& y,
                     const SubgroupF2& h) {
  return subgroup_quotient_entropy(diff_xy, h) - 0.5 * subgroup_quotient_entropy(x, h) -
         0.5 * subgroup_quotient_entropy(y, h);
}

ChainStep best_superspace(const FinDist& x, const SubgroupF2& h, double k_here, double c_pfr,
                          int dim_cap) {
  const int d = x.ctx.dim;
  ChainStep best;
  bool first = true;
  for (const SubgroupF2& w : enumerate_subgroups(d, dim_cap)) {
    bool contains = true;
    for (const CoordVec& row : h.basis()) {
      if (!w.contains(row)) { contains = false; break; }
    }
    if (!contains) continue;
    // d_ent(psi_H X, U_{W/H}) = H(psi_W X) + (log|W/H| - H(psi_H X)) / 2
    const double dist = subgroup_quotient_entropy(x, w) +
                        0.5 * ((w.rank() - h.rank()) * std::log(2.0) -
                               subgroup_quotient_entropy(x, h));
    if (first || dist < best.dist_x - 1e-12) {
      best.w = w;
      best.dist_x = dist;
      first = false;
    }
  }
  const double denom = k_here * (1.0 + std::pow(k_here, c_pfr - 1.0));
  best.ratio = denom > 0 ? best.dist_x / denom : 0.0;
  return best;
}

std::pair<std::vector<CoordVec>, std::vector<CoordVec>> dim_recurse(
    DimShared& sh, const GroupContext& ctx, const std::vector<CoordVec>& A,
    const std::vector<CoordVec>& B, int parent, int depth);

// Split on the fibers of `split_hom` using the pigeonhole witness, recurse,
// and record the per-node loss bookkeeping.
std::pair<std::vector<CoordVec>, std::vector<CoordVec>> split_and_recurse(
    DimShared& sh, const GroupContext& ctx, const std::vector<CoordVec>& A,
    const std::vector<CoordVec>& B, const Homomorphism& split_hom, int node_idx, int depth,
    double k, double loss_coef_bound) {
  FiberPigeonholeWitness w = fiber_pigeonhole(ctx, A, B, split_hom);
  auto fa = fibers_by_hom(A, split_hom);
  auto fb = fibers_by_hom(B, split_hom);
  const std::vector<CoordVec>& Ax = fa.at(w.x);
  const std::vector<CoordVec>& By = fb.at(w.y);

  TraceNode& node = sh.nodes.at(node_idx);
  node.k = k;
  node.k_child = w.k_prime;
  node.node_loss = std::log(1.0 / (w.alpha_x * w.beta_y));
  if (w.k_bar > 0) {
    node.node_loss_bound = (w.M / w.k_bar) * (w.k - w.k_prime);
  } else {
    node.node_loss_bound = node.node_loss;  // degenerate split, flagged by caller
    node.hypothesis_ok = false;
    node.note += "|degenerate projection distance";
  }
  // monotone step for the loss budget: node loss must fit what f gives back
  const double budget = loss_coef_bound * (k - w.k_prime);
  node.f_step_ok = node.node_loss <= budget + sh.cfg.tol && w.k_prime <= k + sh.cfg.tol;
  if (!node.f_step_ok) node.note += "|f-step budget exceeded";

  auto [ap, bp] = dim_recurse(sh, ctx, Ax, By, node_idx, depth + 1);
  return {std::move(ap), std::move(bp)};
}

std::pair<std::vector<CoordVec>, std::vector<CoordVec>> dim_recurse(
    DimShared& sh, const GroupContext& ctx, const std::vector<CoordVec>& A,
    const std::vector<CoordVec>& B, int parent, int depth) {
  const std::int64_t measure = static_cast<std::int64_t>(A.size() + B.size());

  LatticeFrame frame = reduce_lattice(ctx, A, B);
  if (frame.changed) {
    const int idx = sh.nodes.open(parent, depth, "reduce", A.size(), B.size(), ctx.dim, measure);
    sh.nodes.at(idx).note = "rebased onto the difference sublattice, dim " +
                            std::to_string(ctx.dim) + " -> " + std::to_string(frame.ctx.dim);
    auto [ap, bp] = dim_recurse(sh, frame.ctx, frame.A, frame.B, idx, depth);
    std::vector<CoordVec> A_lift, B_lift;
    for (const CoordVec& v : ap) A_lift.push_back(frame.lift(v, frame.a0, ctx));
    for (const CoordVec& v : bp) B_lift.push_back(frame.lift(v, frame.b0, ctx));
    return {normalize_set(ctx, A_lift), normalize_set(ctx, B_lift)};
  }

  if (A.size() == 1 && B.size() == 1) {
    sh.nodes.open(parent, depth, "base", 1, 1, ctx.dim, measure);
    return {A, B};
  }

  const FinDist ua = FinDist::uniform_on(ctx, A);
  const FinDist ub = FinDist::uniform_on(ctx, B);
  const double k = d_ent(ua, ub);
  const Homomorphism phi = Homomorphism::mod2(ctx);
  const FinDist xa = pushforward(ua, phi);
  const FinDist xb = pushforward(ub, phi);
  const double eps_proj = d_ent(xa, xb);
  const double m_proj = entropy(xa) + entropy(xb);

  if (!sh.boosted && eps_proj > sh.cfg.delta()) {
    // uneven mod-2 projections: split directly on the mod-2 fibers
    const int idx = sh.nodes.open(parent, depth, "case1", A.size(), B.size(), ctx.dim, measure);
    TraceNode& node = sh.nodes.at(idx);
    node.split_stat = eps_proj;
    node.m_stat = m_proj;
    if (m_proj > 20.0 * k + sh.cfg.tol) {
      node.hypothesis_ok = false;
      node.note += "|mod-2 entropy exceeded 20k";
    }
    return split_and_recurse(sh, ctx, A, B, phi, idx, depth, k, sh.cfg.c1() * (1.0 + k));
  }

  // near-uniform mod-2 projections: pass to a subgroup of F2^D first
  SubgroupF2 h;
  bool substituted = false;
  std::string sub_note;
  if (sh.boosted) {
    // iterated subspace chain, halving the projected entropies
    const FinDist diff = convolve(xa, xb, -1);
    h = SubgroupF2::trivial(ctx.dim);
    const double c_stop = sh.cfg.c1() / 20.0;
    double hx = entropy(xa), hy = entropy(xb);
    double ki = eps_proj;
    int steps = 0;
    while (true) {
      const double stop_rhs = 8.0 * c_stop * ki * (1.0 + std::pow(ki, sh.cfg.c_pfr - 1.0));
      if (hx + hy <= stop_rhs + sh.cfg.tol) break;
      ChainStep step = best_superspace(xa, h, ki, sh.cfg.c_pfr, sh.cfg.subgroup_dim_cap);
      sh.measured_pfr_c = std::max(sh.measured_pfr_c, step.ratio);
      const double hx_next = subgroup_quotient_entropy(xa, step.w);
      const double hy_next = subgroup_quotient_entropy(xb, step.w);
      const bool grows = step.w.rank() > h.rank();
      const bool log_ok =
          (step.w.rank() - h.rank()) * std::log(2.0) <= hx + hy + sh.cfg.tol;  // chain growth
      const bool halves = hx_next + hy_next <= 0.5 * (hx + hy) + sh.cfg.tol;
      const int idx =
          sh.nodes.open(parent, depth, "chain-step", A.size(), B.size(), ctx.dim, measure);
      TraceNode& cn = sh.nodes.at(idx);
      cn.k = ki;
      cn.m_stat = hx + hy;
      cn.split_stat = step.dist_x;
      cn.note = "subspace rank " + std::to_string(h.rank()) + " -> " +
                std::to_string(step.w.rank());
      cn.f_step_ok = log_ok && halves;
      if (!grows || !log_ok || !halves) {
        cn.hypothesis_ok = false;
        cn.note += "|chain step unlicensed, stopping";
        break;
      }
      h = step.w;
      hx = hx_next;
      hy = hy_next;
      ki = quotient_dist(diff, xa, xb, h);
      if (++steps > ctx.dim + 1) throw std::logic_error("pfr chain failed to terminate");
    }
  } else {
    LocalizeResult loc = localize_subgroup(xa, xb, sh.cfg.eps0);
    if (loc.status == LocalizeStatus::Ok && loc.subgroup_f2.has_value()) {
      h = *loc.subgroup_f2;
      if (!loc.bound_holds) sub_note = "|localized subgroup missed the 12eps bound";
    } else {
      h = brute_pfr_oracle(xa, sh.cfg.subgroup_dim_cap).subgroup;
      substituted = true;
      sub_note = "|exhaustive subspace oracle substituted for localization";
    }
  }

  if (h.rank() == ctx.dim) {
    // the subgroup is everything: the ambient dimension is already bounded
    const int idx = sh.nodes.open(parent, depth, "h-full", A.size(), B.size(), ctx.dim, measure);
    TraceNode& node = sh.nodes.at(idx);
    node.k = k;
    node.split_stat = eps_proj;
    node.m_stat = m_proj;
    node.note = "subspace is all of F2^" + std::to_string(ctx.dim) + sub_note;
    const double dim_budget = sh.boosted ? sh.cfg.c2_pfr() * k : sh.cfg.c1() * k;
    node.f_step_ok = ctx.dim <= dim_budget + sh.cfg.tol;
    if (!node.f_step_ok) node.note += "|ambient dimension above budget";
    node.hypothesis_ok = node.f_step_ok && !substituted;
    return {A, B};
  }

  const Homomorphism tilde = Homomorphism::compose(phi, Homomorphism::quotient_by(phi.codomain(), h));
  const int idx = sh.nodes.open(parent, depth, "case2", A.size(), B.size(), ctx.dim, measure);
  TraceNode& node = sh.nodes.at(idx);
  node.split_stat = eps_proj;
  node.m_stat = m_proj;
  node.note = "quotient by subspace of rank " + std::to_string(h.rank()) + sub_note;
  if (substituted) node.hypothesis_ok = false;

  double loss_coef;
  if (sh.boosted) {
    const double gamma = 1.0 / sh.cfg.c_pfr;
    loss_coef = sh.cfg.c1() * (1.0 + std::pow(k, 1.0 - gamma));
  } else {
    // concentration licenses H(proj) <= 4 d(proj, proj'), so the ratio M/kbar
    // stays below 8; verified on the witness inside split_and_recurse
    const FinDist qa = pushforward(ua, tilde);
    const FinDist qb = pushforward(ub, tilde);
    if (qa.max_mass() < 1.0 - kDelta0 || qb.max_mass() < 1.0 - kDelta0) {
      node.hypothesis_ok = false;
      node.note += "|quotient projections not concentrated";
    }
    loss_coef = sh.cfg.c1() * (1.0 + k);
  }
  return split_and_recurse(sh, ctx, A, B, tilde, idx, depth, k, loss_coef);
}

DecompositionResult run_dim_family(const GroupContext& ctx, const std::vector<CoordVec>& A,
                                   const std::vector<CoordVec>& B, const AlgoConfig& cfg,
                                   bool boosted) {
  if (ctx.kind != GroupKind::ZLattice) {
    throw std::domain_error("decompose: sets must live in a Z lattice");
  }
  std::vector<CoordVec> a = normalize_set(ctx, A);
  std::vector<CoordVec> b = normalize_set(ctx, B);
  if (a.empty() || b.empty()) throw std::domain_error("decompose: empty input set");

  DecompositionResult res;
  res.algo = boosted ? "pfr" : "dim";
  DimShared sh{cfg, boosted, NodeBudget{&res.trace}, 0.0};
  auto [ap, bp] = dim_recurse(sh, ctx, a, b, -1, 0);
  res.A_prime = std::move(ap);
  res.B_prime = std::move(bp);
  res.measured_pfr_c = sh.measured_pfr_c;

  res.k = d_ent(FinDist::uniform_on(ctx, a), FinDist::uniform_on(ctx, b));
  res.size_loss = std::log(static_cast<double>(a.size()) * b.size() /
                           (static_cast<double>(res.A_prime.size()) * res.B_prime.size()));
  res.size_bound = sh.f_bound(res.k);
  res.dim_bound = (boosted ? cfg.c2_pfr() : cfg.c1()) * res.k;
  res.dim_a = affine_dimension(ctx, res.A_prime);
  res.dim_b = affine_dimension(ctx, res.B_prime);
  res.bounds_hold = res.size_loss <= res.size_bound + cfg.tol &&
                    res.dim_a <= res.dim_bound + cfg.tol && res.dim_b <= res.dim_bound + cfg.tol;
  res.hypothesis_clean = std::all_of(res.trace.begin(), res.trace.end(),
                                     [](const TraceNode& n) { return n.hypothesis_ok; });
  check_strict_decrease(res.trace);
  return res;
}

}  // namespace

// ---------------------------------------------------------------------------

double AlgoConfig::eps() const {
  const double base = eps_override > 0 ? eps_override : std::min(eps0, 1.0 / 24.0);
  if (base > std::min(eps0, 1.0 / 24.0) + 1e-15) {
    throw std::domain_error("AlgoConfig: eps must stay <= min(eps0, 1/24)");
  }
  return base;
}

double AlgoConfig::delta() const {
  if (delta_override > 0) return delta_override;
  return std::log(20.0 / 19.0) / 32.0;
}

double AlgoConfig::c1() const {
  if (c1_override > 0) return c1_override;
  return std::max(20.0 / delta(), 100.0);
}

double AlgoConfig::c2_pfr() const { return 40.0 / std::log(2.0); }

DecompositionResult skew_decompose(const GroupContext& ctx, const std::vector<CoordVec>& A,
                                   const std::vector<CoordVec>& B, const AlgoConfig& cfg) {
  if (ctx.kind != GroupKind::ZLattice) {
    throw std::domain_error("skew_decompose: sets must live in a Z lattice");
  }
  std::vector<CoordVec> a = normalize_set(ctx, A);
  std::vector<CoordVec> b = normalize_set(ctx, B);
  if (a.empty() || b.empty()) throw std::domain_error("skew_decompose: empty input set");

  DecompositionResult res;
  res.algo = "skew";
  SkewEngine engine(ctx, cfg, &res.trace);
  auto [ap, bp] = engine.run(a, b, -1, 0);
  res.A_prime = std::move(ap);
  res.B_prime = std::move(bp);

  res.k = d_ent(FinDist::uniform_on(ctx, a), FinDist::uniform_on(ctx, b));
  const double C = cfg.c_skew();
  res.size_loss = std::log(static_cast<double>(a.size()) * b.size() /
                           (static_cast<double>(res.A_prime.size()) * res.B_prime.size()));
  res.size_bound = C * res.k;
  res.dim_bound = C * res.k;
  res.dim_star_a = skew_dimension_exact(ctx, res.A_prime, cfg.skew_oracle_cap);
  res.dim_star_b = skew_dimension_exact(ctx, res.B_prime, cfg.skew_oracle_cap);
  res.bounds_hold = res.size_loss <= res.size_bound + cfg.tol &&
                    res.dim_star_a <= res.dim_bound + cfg.tol &&
                    res.dim_star_b <= res.dim_bound + cfg.tol;
  res.hypothesis_clean = std::all_of(res.trace.begin(), res.trace.end(),
                                     [](const TraceNode& n) { return n.hypothesis_ok; });
  check_strict_decrease(res.trace);
  return res;
}

DecompositionResult dim_decompose(const GroupContext& ctx, const std::vector<CoordVec>& A,
                                  const std::vector<CoordVec>& B, const AlgoConfig& cfg) {
  return run_dim_family(ctx, A, B, cfg, false);
}

DecompositionResult pfr_boosted_decompose(const GroupContext& ctx, const std::vector<CoordVec>& A,
                                          const std::vector<CoordVec>& B, const AlgoConfig& cfg) {
  return run_dim_family(ctx, A, B, cfg, true);
}

// ---------------------------------------------------------------------------
// Exact oracles

namespace {

int skew_dim_memo(const GroupContext& ctx, const std::vector<CoordVec>& A,
                  std::map<std::string, int>& memo) {
  if (A.size() <= 1) return 0;
  const std::string key = set_key(A);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  int best = ctx.dim + 1;
  for (int c = 0; c < ctx.dim; ++c) {
    bool constant = true;
    for (const CoordVec& v : A) {
      if (v[c] != A.front()[c]) { constant = false; break; }
    }
    if (constant) continue;  // cannot help: single fiber equal to A
    int worst = 0;
    for (const auto& [i, fiber] : fibers_by_coord(A, c)) {
      worst = std::max(worst, skew_dim_memo(ctx, fiber, memo));
    }
    best = std::min(best, 1 + worst);
  }
  if (best > ctx.dim) throw std::logic_error("skew_dimension_exact: no varying coordinate");
  memo.emplace(key, best);
  return best;
}

}  // namespace

int skew_dimension_exact(const GroupContext& ctx, const std::vector<CoordVec>& A,
                         std::size_t cap) {
  if (ctx.kind != GroupKind::ZLattice) {
    throw std::domain_error("skew_dimension_exact: Z lattice sets only");
  }
  std::vector<CoordVec> a = normalize_set(ctx, A);
  if (a.empty()) throw std::domain_error("skew_dimension_exact: empty set");
  if (a.size() > cap || ctx.dim > 8) {
    throw std::length_error("skew_dimension_exact: instance exceeds the oracle cap");
  }
  std::map<std::string, int> memo;
  return skew_dim_memo(ctx, a, memo);
}

int affine_dimension(const GroupContext& ctx, const std::vector<CoordVec>& A) {
  if (ctx.kind != GroupKind::ZLattice) {
    throw std::domain_error("affine_dimension: Z lattice sets only");
  }
  std::vector<CoordVec> a = normalize_set(ctx, A);
  if (a.empty()) throw std::domain_error("affine_dimension: empty set");
  // exact integer rank of {a - a0} by fraction-free elimination
  using Wide = __int128;
  std::vector<std::vector<Wide>> m;
  for (std::size_t i = 1; i < a.size(); ++i) {
    std::vector<Wide> row(ctx.dim);
    for (int j = 0; j < ctx.dim; ++j) row[j] = Wide(a[i][j]) - Wide(a[0][j]);
    m.push_back(std::move(row));
  }
  int rank = 0;
  const Wide limit = Wide(1) << 120;
  for (int col = 0; col < ctx.dim && rank < static_cast<int>(m.size()); ++col) {
    int piv = -1;
    for (std::size_t r = rank; r < m.size(); ++r) {
      if (m[r][col] != 0) { piv = static_cast<int>(r); break; }
    }
    if (piv < 0) continue;
    std::swap(m[rank], m[piv]);
    for (std::size_t r = rank + 1; r < m.size(); ++r) {
      if (m[r][col] == 0) continue;
      const Wide f1 = m[rank][col], f2 = m[r][col];
      for (int j = 0; j < ctx.dim; ++j) {
        m[r][j] = m[r][j] * f1 - m[rank][j] * f2;
        if (m[r][j] > limit || m[r][j] < -limit) {
          throw std::overflow_error("affine_dimension: elimination overflow");
        }
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace entkit
