#include "entkit/gen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace entkit {

GroupContext sample_ctx(TrialRng& rng) {
  switch (rng.uniform_int(0, 2)) {
    case 0: return GroupContext::z_lattice(2);
    case 1: return GroupContext::f2(3);
    default: return GroupContext::zmod({12});
  }
}

namespace {

CoordVec sample_element(TrialRng& rng, const GroupContext& ctx, Coord window) {
  CoordVec v(ctx.dim);
  switch (ctx.kind) {
    case GroupKind::ZLattice:
      for (int i = 0; i < ctx.dim; ++i) v[i] = rng.uniform_int(-window, window);
      break;
    case GroupKind::F2Vec:
    case GroupKind::QuotientF2:
      for (int i = 0; i < ctx.dim; ++i) v[i] = rng.uniform_int(0, 1);
      break;
    case GroupKind::ZModProduct:
      for (int i = 0; i < ctx.dim; ++i) v[i] = rng.uniform_int(0, ctx.moduli[i] - 1);
      break;
  }
  return canon(ctx, std::move(v));
}

}  // namespace

std::vector<CoordVec> sample_set(TrialRng& rng, const GroupContext& ctx, int min_size,
                                 int max_size, Coord window) {
  const int target = static_cast<int>(rng.uniform_int(min_size, max_size));
  std::vector<CoordVec> out;
  int guard = 0;
  while (static_cast<int>(out.size()) < target) {
    out.push_back(sample_element(rng, ctx, window));
    out = normalize_set(ctx, out);
    if (++guard > 64 * max_size) break;  // small groups may not have `target` elements
  }
  if (out.empty()) out.push_back(group_zero(ctx));
  return out;
}

FinDist sample_dist(TrialRng& rng, const GroupContext& ctx, int min_support, int max_support,
                    Coord window) {
  std::vector<CoordVec> support = sample_set(rng, ctx, min_support, max_support, window);
  std::vector<std::pair<CoordVec, double>> w;
  double total = 0;
  for (CoordVec& v : support) {
    const double e = -std::log(1.0 - rng.next_unit());  // Exp(1), Dirichlet(1,..,1) weights
    w.emplace_back(std::move(v), e);
    total += e;
  }
  for (auto& [v, x] : w) x /= total;
  return FinDist::from_weights(ctx, std::move(w));
}

FinDist sample_concentrated(TrialRng& rng, const GroupContext& ctx, double delta0, Coord window) {
  const CoordVec center = sample_element(rng, ctx, window);
  const double spread = rng.next_unit() * delta0;
  std::vector<std::pair<CoordVec, double>> w;
  w.emplace_back(center, 1.0 - spread);
  if (spread > 0) {
    const int extras = static_cast<int>(rng.uniform_int(1, 4));
    std::vector<double> parts(extras);
    double total = 0;
    for (double& p : parts) {
      p = -std::log(1.0 - rng.next_unit());
      total += p;
    }
    for (int i = 0; i < extras; ++i) {
      w.emplace_back(sample_element(rng, ctx, window), spread * parts[i] / total);
    }
  }
  return FinDist::from_weights(ctx, std::move(w));
}

FinDist sample_near_uniform(TrialRng& rng, const std::vector<CoordVec>& support,
                            const GroupContext& ctx, double slack) {
  const std::vector<CoordVec> s = normalize_set(ctx, support);
  const double n = static_cast<double>(s.size());
  // perturb uniform weights until the entropy deficit fits inside `slack`
  for (double scale = 0.5;; scale *= 0.5) {
    std::vector<std::pair<CoordVec, double>> w;
    double total = 0;
    for (const CoordVec& v : s) {
      const double x = 1.0 + scale * (2.0 * rng.next_unit() - 1.0);
      w.emplace_back(v, x);
      total += x;
    }
    for (auto& [v, x] : w) x /= total;
    FinDist d = FinDist::from_weights(ctx, std::move(w));
    if (std::log(n) - entropy(d) <= slack) return d;
    if (scale < 1e-6) return FinDist::uniform_on(ctx, s);
  }
}

}  // namespace entkit
