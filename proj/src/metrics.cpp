#include "entkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace entkit {

namespace {

constexpr double kGradSmoothing = 1e-15;  // inside gradient evaluation only

double xlog1overx(double p) { return p > 0 ? -p * std::log(p) : 0.0; }

double entropy_of(const std::vector<double>& m) {
  double h = 0;
  for (double v : m) h += xlog1overx(v);
  return h;
}

void validate_subgroup_set(const GroupContext& ctx, const std::vector<CoordVec>& h) {
  if (h.empty()) throw std::domain_error("subgroup: empty set");
  if (!set_contains(h, group_zero(ctx))) throw std::domain_error("subgroup: missing zero");
  for (const CoordVec& a : h) {
    if (!set_contains(h, group_neg(ctx, a))) throw std::domain_error("subgroup: not closed under negation");
    for (const CoordVec& b : h) {
      if (!set_contains(h, group_add(ctx, a, b))) {
        throw std::domain_error("subgroup: not closed under addition");
      }
    }
  }
}

// Exact linear oracle over the transportation polytope: maximizes
// sum g[i][j] s[i][j] subject to row sums = a, column sums = b.
// Successive-shortest-path min-cost flow on the dense bipartite graph,
// deterministic tie-breaking by node index.
class TransportOracle {
 public:
  TransportOracle(std::vector<double> a, std::vector<double> b)
      : a_(std::move(a)), b_(std::move(b)), n_(a_.size()), m_(b_.size()) {}

  // returns the optimal vertex as a flat n*m row-major matrix
  std::vector<double> maximize(const std::vector<double>& gain) {
    const std::size_t V = n_ + m_;
    std::vector<double> cost(n_ * m_);
    for (std::size_t i = 0; i < n_ * m_; ++i) cost[i] = -gain[i];

    std::vector<double> flow(n_ * m_, 0.0);
    std::vector<double> pot(V, 0.0);
    for (std::size_t j = 0; j < m_; ++j) {
      double mn = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n_; ++i) mn = std::min(mn, cost[i * m_ + j]);
      pot[n_ + j] = mn;
    }
    std::vector<double> rem_a = a_, rem_b = b_;
    std::size_t active_b = m_;

    const std::size_t max_aug = 64 * (V + 1);
    std::size_t aug = 0;
    while (active_b > 0) {
      if (++aug > max_aug) throw std::logic_error("TransportOracle: augmentation cap exceeded");
      double supply_left = 0;
      for (std::size_t i = 0; i < n_; ++i) supply_left += rem_a[i];
      if (supply_left <= 0) break;  // remaining demands are rounding crumbs
      // multi-source Dijkstra over reduced costs
      std::vector<double> dist(V, std::numeric_limits<double>::infinity());
      std::vector<int> parent(V, -1);
      std::vector<char> done(V, 0);
      for (std::size_t i = 0; i < n_; ++i) {
        if (rem_a[i] > 0) dist[i] = 0;
      }
      std::size_t target = V;
      while (true) {
        std::size_t u = V;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t w = 0; w < V; ++w) {
          if (!done[w] && dist[w] < best) { best = dist[w]; u = w; }
        }
        if (u == V) break;
        done[u] = 1;
        if (u >= n_ && rem_b[u - n_] > 0) { target = u; break; }
        if (u < n_) {
          const std::size_t i = u;
          for (std::size_t j = 0; j < m_; ++j) {
            const double rc = cost[i * m_ + j] + pot[i] - pot[n_ + j];
            const double nd = dist[u] + std::max(rc, 0.0);
            if (nd < dist[n_ + j]) { dist[n_ + j] = nd; parent[n_ + j] = static_cast<int>(i); }
          }
        } else {
          const std::size_t j = u - n_;
          for (std::size_t i = 0; i < n_; ++i) {
            if (flow[i * m_ + j] > 0) {
              const double rc = -cost[i * m_ + j] + pot[n_ + j] - pot[i];
              const double nd = dist[u] + std::max(rc, 0.0);
              if (nd < dist[i]) { dist[i] = nd; parent[i] = static_cast<int>(n_ + j); }
            }
          }
        }
      }
      if (target == V) throw std::logic_error("TransportOracle: no augmenting path");
      // unreached nodes advance by the target distance as well, keeping every
      // residual reduced cost non-negative for the next round
      for (std::size_t w = 0; w < V; ++w) {
        pot[w] += std::min(dist[w], dist[target]);
      }
      // bottleneck along the path
      double bottleneck = rem_b[target - n_];
      for (std::size_t w = target; parent[w] >= 0;) {
        const std::size_t pw = static_cast<std::size_t>(parent[w]);
        if (w >= n_) {
          // forward arc pw -> w
        } else {
          bottleneck = std::min(bottleneck, flow[w * m_ + (pw - n_)]);
        }
        w = pw;
        if (parent[w] < 0) bottleneck = std::min(bottleneck, rem_a[w]);
      }
      // apply
      for (std::size_t w = target; parent[w] >= 0;) {
        const std::size_t pw = static_cast<std::size_t>(parent[w]);
        if (w >= n_) {
          flow[pw * m_ + (w - n_)] += bottleneck;
        } else {
          flow[w * m_ + (pw - n_)] -= bottleneck;
          if (flow[w * m_ + (pw - n_)] < 1e-18) flow[w * m_ + (pw - n_)] = 0;
        }
        w = pw;
      }
      std::size_t src = target;
      while (parent[src] >= 0) src = static_cast<std::size_t>(parent[src]);
      rem_a[src] -= bottleneck;
      if (rem_a[src] <= 1e-15 * a_[src]) rem_a[src] = 0;
      rem_b[target - n_] -= bottleneck;
      if (rem_b[target - n_] <= 1e-15 * b_[target - n_]) {
        rem_b[target - n_] = 0;
        --active_b;
      }
    }
    return flow;
  }

 private:
  std::vector<double> a_, b_;
  std::size_t n_, m_;
};

}  // namespace

double binary_entropy(double pr) {
  if (pr < 0.0 || pr > 1.0) throw std::domain_error("binary_entropy: argument outside [0,1]");
  if (pr == 0.0 || pr == 1.0) return 0.0;
  return -pr * std::log(pr) - (1.0 - pr) * std::log(1.0 - pr);
}

double sigma_ent(const FinDist& p) { return std::exp(entropy(convolve(p, p, +1)) - entropy(p)); }

double d_ent(const FinDist& p, const FinDist& q) {
  return entropy(convolve(p, q, -1)) - 0.5 * entropy(p) - 0.5 * entropy(q);
}

double d_ent_sum(const FinDist& p, const FinDist& q) {
  return entropy(convolve(p, q, +1)) - 0.5 * entropy(p) - 0.5 * entropy(q);
}

double quotient_entropy(const FinDist& p, const std::vector<CoordVec>& subgroup) {
  std::vector<CoordVec> h = normalize_set(p.ctx, subgroup);
  // coset key: lexicographically smallest member of x + H
  std::unordered_map<CoordVec, double, ElementHash> acc;
  for (const auto& [x, px] : p.mass) {
    CoordVec best = group_add(p.ctx, x, h.front());
    for (std::size_t i = 1; i < h.size(); ++i) {
      CoordVec cand = group_add(p.ctx, x, h[i]);
      if (lex_less(cand, best)) best = std::move(cand);
    }
    acc[best] += px;
  }
  double ent = 0;
  for (const auto& [key, w] : acc) ent += xlog1overx(w);
  return ent;
}

double d_ent_subgroup(const FinDist& p, const SubgroupF2& h) {
  if (p.ctx.kind != GroupKind::F2Vec || p.ctx.dim != h.dim()) {
    throw std::domain_error("d_ent_subgroup: distribution must live on F2^D matching H");
  }
  double hpi = 0;
  {
    std::unordered_map<CoordVec, double, ElementHash> acc;
    for (const auto& [x, px] : p.mass) acc[h.reduce(x)] += px;
    for (const auto& [key, w] : acc) hpi += xlog1overx(w);
  }
  return hpi + 0.5 * (h.log_size() - entropy(p));
}

double d_ent_subgroup(const FinDist& p, const std::vector<CoordVec>& subgroup) {
  std::vector<CoordVec> h = normalize_set(p.ctx, subgroup);
  validate_subgroup_set(p.ctx, h);
  const double log_h = std::log(static_cast<double>(h.size()));
  return quotient_entropy(p, h) + 0.5 * (log_h - entropy(p));
}

std::int64_t energy_serial(const GroupContext& ctx, const std::vector<CoordVec>& A) {
  if (A.empty()) throw std::domain_error("energy: empty set");
  std::vector<CoordVec> a = normalize_set(ctx, A);
  std::unordered_map<CoordVec, std::int64_t, ElementHash> r;
  for (const CoordVec& x : a) {
    for (const CoordVec& y : a) ++r[group_add(ctx, x, y)];
  }
  std::int64_t e = 0;
  for (const auto& [s, c] : r) e += c * c;
  return e;
}

std::int64_t energy(const GroupContext& ctx, const std::vector<CoordVec>& A) {
  if (A.empty()) throw std::domain_error("energy: empty set");
  std::vector<CoordVec> a = normalize_set(ctx, A);
  const std::int64_t n = static_cast<std::int64_t>(a.size());
  if (n < 64) return energy_serial(ctx, a);

  // per-thread representation counts over row chunks; integer merge is exact,
  // so the result does not depend on the thread count
  std::vector<std::unordered_map<CoordVec, std::int64_t, ElementHash>> partial;
#pragma omp parallel
  {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
    const int nt = omp_get_num_threads();
#else
    const int tid = 0, nt = 1;
#endif
#pragma omp single
    partial.resize(nt);
    std::unordered_map<CoordVec, std::int64_t, ElementHash>& mine = partial[tid];
#pragma omp barrier
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = 0; j < n; ++j) ++mine[group_add(ctx, a[i], a[j])];
    }
  }
  std::unordered_map<CoordVec, std::int64_t, ElementHash> r;
  for (auto& part : partial) {
    for (auto& [s, c] : part) r[s] += c;
  }
  std::int64_t e = 0;
  for (const auto& [s, c] : r) e += c * c;
  return e;
}

MetricReport sandwich_check(const GroupContext& ctx, const std::vector<CoordVec>& A) {
  std::vector<CoordVec> a = normalize_set(ctx, A);
  if (a.empty()) throw std::domain_error("sandwich_check: empty set");
  MetricReport rep;
  const double size = static_cast<double>(a.size());
  rep.energy = energy(ctx, a);
  rep.energy_lower = size * size * size / static_cast<double>(rep.energy);
  rep.sigma_comb = static_cast<double>(sumset(ctx, a, a, +1).size()) / size;
  FinDist u = FinDist::uniform_on(ctx, a);
  rep.sigma_ent = sigma_ent(u);
  rep.d_ent = std::log(rep.sigma_ent);
  rep.bounds_checked.push_back({"energy-lower-vs-sigma-ent", rep.energy_lower, rep.sigma_ent,
                                rep.energy_lower <= rep.sigma_ent + 1e-9});
  rep.bounds_checked.push_back({"sigma-ent-vs-doubling", rep.sigma_ent, rep.sigma_comb,
                                rep.sigma_ent <= rep.sigma_comb + 1e-9});
  return rep;
}

DStarResult d_star(const FinDist& p, const FinDist& q, const DStarOptions& opt) {
  require_same_context(p.ctx, q.ctx);
  if (p.support_size() > opt.support_cap || q.support_size() > opt.support_cap) {
    throw std::length_error("d_star: support size exceeds cap");
  }
  const GroupContext& ctx = p.ctx;
  const std::size_t n = p.support_size(), m = q.support_size();

  // difference-cell index per coupling cell
  std::vector<CoordVec> diffs;
  std::vector<std::size_t> diff_idx(n * m);
  {
    std::unordered_map<CoordVec, std::size_t, ElementHash> seen;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        CoordVec z = group_sub(ctx, p.mass[i].first, q.mass[j].first);
        auto [it, inserted] = seen.emplace(std::move(z), diffs.size());
        if (inserted) diffs.push_back(group_sub(ctx, p.mass[i].first, q.mass[j].first));
        diff_idx[i * m + j] = it->second;
      }
    }
  }
  const std::size_t nd = diffs.size();
  std::vector<double> pa(n), qb(m);
  for (std::size_t i = 0; i < n; ++i) pa[i] = p.mass[i].second;
  for (std::size_t j = 0; j < m; ++j) qb[j] = q.mass[j].second;

  std::vector<double> coupling(n * m), indep(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) indep[i * m + j] = pa[i] * qb[j];
  }
  coupling = indep;

  auto diff_law = [&](const std::vector<double>& s) {
    std::vector<double> mv(nd, 0.0);
    for (std::size_t c = 0; c < n * m; ++c) mv[diff_idx[c]] += s[c];
    return mv;
  };

  const double half_ents = 0.5 * entropy(p) + 0.5 * entropy(q);
  TransportOracle oracle(pa, qb);

  double gap = std::numeric_limits<double>::infinity();
  int iters = 0;
  for (; iters < opt.max_iters; ++iters) {
    // pull toward the independent coupling to keep the iterate interior,
    // so the linearized bound below is a valid certificate
    for (std::size_t c = 0; c < n * m; ++c) {
      coupling[c] = (1.0 - kInteriorMix) * coupling[c] + kInteriorMix * indep[c];
    }
    std::vector<double> mq = diff_law(coupling);
    std::vector<double> grad_cell(nd);
    for (std::size_t z = 0; z < nd; ++z) grad_cell[z] = -(1.0 + std::log(mq[z] + kGradSmoothing));
    std::vector<double> gain(n * m);
    for (std::size_t c = 0; c < n * m; ++c) gain[c] = grad_cell[diff_idx[c]];

    std::vector<double> vtx = oracle.maximize(gain);
    double g = 0;
    for (std::size_t c = 0; c < n * m; ++c) g += gain[c] * (vtx[c] - coupling[c]);
    gap = std::max(g, 0.0);
    if (gap < opt.gap_tol) break;

    // exact line search: the entropy along the segment is strictly concave
    std::vector<double> mv = diff_law(vtx);
    auto dphi = [&](double t) {
      double s = 0;
      for (std::size_t z = 0; z < nd; ++z) {
        const double mt = (1.0 - t) * mq[z] + t * mv[z];
        s += (mv[z] - mq[z]) * (-(1.0 + std::log(mt + kGradSmoothing)));
      }
      return s;
    };
    double t;
    if (dphi(1.0) >= 0) {
      t = 1.0;
    } else {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dphi(mid) > 0 ? lo : hi) = mid;
      }
      t = 0.5 * (lo + hi);
    }
    for (std::size_t c = 0; c < n * m; ++c) {
      coupling[c] = (1.0 - t) * coupling[c] + t * vtx[c];
    }
  }

  DStarResult res;
  res.iterations = iters;
  res.gap = gap;
  res.converged = gap < opt.gap_tol;
  res.value = entropy_of(diff_law(coupling)) - half_ents;
  res.coupling.ctx1 = ctx;
  res.coupling.ctx2 = ctx;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = coupling[i * m + j];
      if (w > 0) {
        res.coupling.mass.push_back({{p.mass[i].first, q.mass[j].first}, w});
      }
    }
  }
  return res;
}

}  // namespace entkit
