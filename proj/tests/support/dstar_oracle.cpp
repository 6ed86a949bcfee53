#include "support/dstar_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace entkit::testing {

namespace {

double entropy_of(const std::vector<double>& m) {
  double h = 0;
  for (double v : m) {
    if (v > 0) h -= v * std::log(v);
  }
  return h;
}

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

OracleResult dstar_vertex_oracle(const FinDist& p, const FinDist& q, double gap_tol,
                                 int max_iters) {
  require_same_context(p.ctx, q.ctx);
  const int n = static_cast<int>(p.support_size());
  const int m = static_cast<int>(q.support_size());
  if (n * m > 36) throw std::length_error("dstar_vertex_oracle: supports too large");

  // difference-cell index shared by every coupling
  std::vector<int> diff_idx(n * m);
  int nd = 0;
  {
    std::unordered_map<CoordVec, int, ElementHash> seen;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        CoordVec z = group_sub(p.ctx, p.mass[i].first, q.mass[j].first);
        auto [it, inserted] = seen.emplace(std::move(z), nd);
        if (inserted) ++nd;
        diff_idx[i * m + j] = it->second;
      }
    }
  }

  // all spanning trees of K_{n,m} -> all basic solutions; keep the feasible
  // ones (every vertex of the polytope arises this way)
  const int nedges = n * m;
  const int tree_edges = n + m - 1;
  std::vector<std::vector<double>> images;
  std::map<std::vector<long long>, bool> image_seen;

  std::vector<int> combo(tree_edges);
  std::iota(combo.begin(), combo.end(), 0);
  while (true) {
    Dsu dsu(n + m);
    bool acyclic = true;
    for (int e : combo) {
      if (!dsu.unite(e / m, n + e % m)) { acyclic = false; break; }
    }
    if (acyclic) {  // n+m-1 acyclic edges on n+m nodes: a spanning tree
      std::vector<double> rem(n + m);
      for (int i = 0; i < n; ++i) rem[i] = p.mass[i].second;
      for (int j = 0; j < m; ++j) rem[n + j] = q.mass[j].second;
      std::vector<int> degree(n + m, 0);
      std::vector<std::vector<int>> incident(n + m);
      for (int e : combo) {
        ++degree[e / m];
        ++degree[n + e % m];
        incident[e / m].push_back(e);
        incident[n + e % m].push_back(e);
      }
      std::vector<double> flow(nedges, 0.0);
      std::vector<char> used(nedges, 0);
      bool feasible = true;
      for (int step = 0; step < tree_edges; ++step) {
        int leaf = -1;
        for (int v = 0; v < n + m; ++v) {
          if (degree[v] == 1) { leaf = v; break; }
        }
        if (leaf < 0) { feasible = false; break; }
        int edge = -1;
        for (int e : incident[leaf]) {
          if (!used[e]) { edge = e; break; }
        }
        const double f = rem[leaf];
        if (f < -1e-12) { feasible = false; break; }
        flow[edge] = std::max(f, 0.0);
        used[edge] = 1;
        const int a = edge / m, b = n + edge % m;
        rem[a] -= flow[edge];
        rem[b] -= flow[edge];
        --degree[a];
        --degree[b];
      }
      if (feasible) {
        for (double f : flow) {
          if (f < -1e-12) { feasible = false; break; }
        }
      }
      if (feasible) {
        std::vector<double> img(nd, 0.0);
        for (int e = 0; e < nedges; ++e) img[diff_idx[e]] += std::max(flow[e], 0.0);
        std::vector<long long> key(nd);
        for (int z = 0; z < nd; ++z) key[z] = llround(img[z] * 1e12);
        if (!image_seen.count(key)) {
          image_seen.emplace(std::move(key), true);
          images.push_back(std::move(img));
        }
      }
    }
    // next combination
    int i = tree_edges - 1;
    while (i >= 0 && combo[i] == nedges - tree_edges + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (int j = i + 1; j < tree_edges; ++j) combo[j] = combo[j - 1] + 1;
  }
  if (images.empty()) throw std::logic_error("dstar_vertex_oracle: no feasible vertex");

  // maximize H over the convex hull of the images: pairwise steps with the
  // exhaustive linear oracle, tracking explicit vertex weights
  const std::size_t nv = images.size();
  std::vector<double> lambda(nv, 1.0 / static_cast<double>(nv));
  std::vector<double> cur(nd, 0.0);
  auto rebuild = [&] {
    std::fill(cur.begin(), cur.end(), 0.0);
    for (std::size_t v = 0; v < nv; ++v) {
      for (int z = 0; z < nd; ++z) cur[z] += lambda[v] * images[v][z];
    }
  };
  rebuild();

  double gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    if (it % 64 == 63) rebuild();
    std::vector<double> grad(nd);
    for (int z = 0; z < nd; ++z) grad[z] = -(1.0 + std::log(cur[z] + 1e-18));
    double cur_score = 0;
    for (int z = 0; z < nd; ++z) cur_score += grad[z] * cur[z];
    std::size_t fw = 0, away = nv;
    double fw_score = -std::numeric_limits<double>::infinity();
    double away_score = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < nv; ++v) {
      double s = 0;
      for (int z = 0; z < nd; ++z) s += grad[z] * images[v][z];
      if (s > fw_score + 1e-18) {
        fw_score = s;
        fw = v;
      }
      if (lambda[v] > 0 && s < away_score - 1e-18) {
        away_score = s;
        away = v;
      }
    }
    gap = std::max(fw_score - cur_score, 0.0);
    if (gap < gap_tol) break;
    if (away == nv || away == fw) break;

    // shift weight from the away vertex onto the best vertex
    const std::vector<double>& vin = images[fw];
    const std::vector<double>& vout = images[away];
    const double tmax = lambda[away];
    auto dphi = [&](double t) {
      double s = 0;
      for (int z = 0; z < nd; ++z) {
        const double mt = cur[z] + t * (vin[z] - vout[z]);
        s += (vin[z] - vout[z]) * (-(1.0 + std::log(std::max(mt, 0.0) + 1e-18)));
      }
      return s;
    };
    double t = tmax;
    if (dphi(tmax) < 0) {
      double lo = 0.0, hi = tmax;
      for (int b = 0; b < 90 && hi - lo > 1e-16; ++b) {
        const double mid = 0.5 * (lo + hi);
        (dphi(mid) > 0 ? lo : hi) = mid;
      }
      t = 0.5 * (lo + hi);
    }
    lambda[fw] += t;
    lambda[away] -= t;
    if (lambda[away] < 1e-17) lambda[away] = 0;
    for (int z = 0; z < nd; ++z) cur[z] = std::max(cur[z] + t * (vin[z] - vout[z]), 0.0);
  }

  OracleResult res;
  res.value = entropy_of(cur) - 0.5 * entropy(p) - 0.5 * entropy(q);
  res.gap = gap;
  res.converged = gap < gap_tol;
  return res;
}

}  // namespace entkit::testing
