#include "entkit/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace entkit {

namespace {

constexpr double kMassSumTol = 1e-9;

double xlog1overx(double p) { return p > 0 ? -p * std::log(p) : 0.0; }

}  // namespace

FinDist FinDist::uniform_on(const GroupContext& ctx, const std::vector<CoordVec>& support) {
  if (support.empty()) throw std::domain_error("uniform_on: empty support");
  std::vector<CoordVec> s = normalize_set(ctx, support);
  FinDist d;
  d.ctx = ctx;
  const double w = 1.0 / static_cast<double>(s.size());
  d.mass.reserve(s.size());
  for (CoordVec& v : s) d.mass.emplace_back(std::move(v), w);
  return d;
}

FinDist FinDist::point_mass(const GroupContext& ctx, const CoordVec& x) {
  FinDist d;
  d.ctx = ctx;
  d.mass.emplace_back(canon(ctx, x), 1.0);
  return d;
}

FinDist FinDist::from_weights(const GroupContext& ctx,
                              std::vector<std::pair<CoordVec, double>> weights) {
  std::map<CoordVec, double, bool (*)(const CoordVec&, const CoordVec&)> acc(lex_less);
  for (auto& [v, w] : weights) {
    if (w < 0) throw std::domain_error("from_weights: negative mass");
    if (w == 0) continue;
    if (!std::isfinite(w)) throw std::domain_error("from_weights: non-finite mass");
    acc[canon(ctx, std::move(v))] += w;
  }
  double sum = 0;
  for (const auto& [v, w] : acc) sum += w;
  if (std::abs(sum - 1.0) > kMassSumTol) {
    throw std::domain_error("from_weights: mass sums to " + std::to_string(sum) +
                            ", outside 1 +- 1e-9");
  }
  FinDist d;
  d.ctx = ctx;
  d.mass.reserve(acc.size());
  for (const auto& [v, w] : acc) d.mass.emplace_back(v, w / sum);
  if (d.mass.empty()) throw std::domain_error("from_weights: empty distribution");
  return d;
}

double FinDist::at(const CoordVec& x) const {
  auto it = std::lower_bound(mass.begin(), mass.end(), x,
                             [](const auto& a, const CoordVec& b) { return lex_less(a.first, b); });
  if (it != mass.end() && it->first == x) return it->second;
  return 0.0;
}

std::vector<CoordVec> FinDist::support() const {
  std::vector<CoordVec> s;
  s.reserve(mass.size());
  for (const auto& [v, w] : mass) s.push_back(v);
  return s;
}

double FinDist::max_mass() const {
  double m = 0;
  for (const auto& [v, w] : mass) m = std::max(m, w);
  return m;
}

// ---------------------------------------------------------------------------
// JointDist

FinDist JointDist::marginal_first() const {
  std::vector<std::pair<CoordVec, double>> w;
  w.reserve(mass.size());
  for (const auto& [xy, p] : mass) w.emplace_back(xy.first, p);
  return FinDist::from_weights(ctx1, std::move(w));
}

FinDist JointDist::marginal_second() const {
  std::vector<std::pair<CoordVec, double>> w;
  w.reserve(mass.size());
  for (const auto& [xy, p] : mass) w.emplace_back(xy.second, p);
  return FinDist::from_weights(ctx2, std::move(w));
}

FinDist JointDist::difference_law() const {
  require_same_context(ctx1, ctx2);
  std::vector<std::pair<CoordVec, double>> w;
  w.reserve(mass.size());
  for (const auto& [xy, p] : mass) w.emplace_back(group_sub(ctx1, xy.first, xy.second), p);
  return FinDist::from_weights(ctx1, std::move(w));
}

double JointDist::entropy_joint() const {
  double h = 0;
  for (const auto& [xy, p] : mass) h += xlog1overx(p);
  return h;
}

double JointDist::total_mass() const {
  double s = 0;
  for (const auto& [xy, p] : mass) s += p;
  return s;
}

// ---------------------------------------------------------------------------
// Entropies

double entropy(const FinDist& p) {
  double h = 0;
  for (const auto& [v, w] : p.mass) h += xlog1overx(w);
  return h;
}

double renyi_entropy(const FinDist& p, double alpha) {
  if (alpha < 0) throw std::domain_error("renyi_entropy: alpha must be >= 0");
  if (alpha == 0.0) return std::log(static_cast<double>(p.mass.size()));
  if (alpha == 1.0) return entropy(p);
  double s = 0;
  for (const auto& [v, w] : p.mass) s += std::pow(w, alpha);
  return std::log(s) / (1.0 - alpha);
}

// ---------------------------------------------------------------------------
// Convolution kernels

FinDist convolve(const FinDist& p, const FinDist& q, int sign) {
  if (sign != 1 && sign != -1) throw std::domain_error("convolve: sign must be +1 or -1");
  require_same_context(p.ctx, q.ctx);
  const GroupContext& ctx = p.ctx;

  // output support: Minkowski combination of the two supports
  std::vector<CoordVec> out_support;
  out_support.reserve(p.mass.size() * q.mass.size());
  for (const auto& [x, px] : p.mass) {
    for (const auto& [y, qy] : q.mass) {
      out_support.push_back(sign > 0 ? group_add(ctx, x, y) : group_sub(ctx, x, y));
    }
  }
  std::sort(out_support.begin(), out_support.end(), lex_less);
  out_support.erase(std::unique(out_support.begin(), out_support.end()), out_support.end());

  std::unordered_map<CoordVec, double, ElementHash> qmap;
  qmap.reserve(q.mass.size() * 2);
  for (const auto& [y, qy] : q.mass) qmap.emplace(y, qy);

  // Gather per output cell: the inner accumulation order is fixed by p's
  // sorted support, so the result is identical for any thread count.
  const std::int64_t n = static_cast<std::int64_t>(out_support.size());
  std::vector<double> out_mass(n, 0.0);
#pragma omp parallel for schedule(static) if (n > 256)
  for (std::int64_t i = 0; i < n; ++i) {
    const CoordVec& z = out_support[i];
    double acc = 0;
    for (const auto& [x, px] : p.mass) {
      // z = x + sign*y  =>  y = sign*(z - x)
      CoordVec y = group_sub(ctx, z, x);
      if (sign < 0) y = group_neg(ctx, y);
      auto it = qmap.find(y);
      if (it != qmap.end()) acc += px * it->second;
    }
    out_mass[i] = acc;
  }

  FinDist d;
  d.ctx = ctx;
  d.mass.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) {
    if (out_mass[i] > 0) d.mass.emplace_back(std::move(out_support[i]), out_mass[i]);
  }
  return d;
}

FinDist convolve_serial(const FinDist& p, const FinDist& q, int sign) {
  if (sign != 1 && sign != -1) throw std::domain_error("convolve_serial: sign must be +1 or -1");
  require_same_context(p.ctx, q.ctx);
  std::map<CoordVec, double, bool (*)(const CoordVec&, const CoordVec&)> acc(lex_less);
  for (const auto& [x, px] : p.mass) {
    for (const auto& [y, qy] : q.mass) {
      CoordVec z = sign > 0 ? group_add(p.ctx, x, y) : group_sub(p.ctx, x, y);
      acc[std::move(z)] += px * qy;
    }
  }
  FinDist d;
  d.ctx = p.ctx;
  d.mass.reserve(acc.size());
  for (const auto& [v, w] : acc) d.mass.emplace_back(v, w);
  return d;
}

// ---------------------------------------------------------------------------
// Divergences

double kl_divergence(const FinDist& p, const FinDist& q) {
  double s = 0;
  for (const auto& [v, pv] : p.mass) {
    const double qv = q.at(v);
    if (qv <= 0) return std::numeric_limits<double>::infinity();
    s += pv * std::log(pv / qv);
  }
  return s;
}

double cross_entropy(const FinDist& p, const FinDist& q) {
  double s = 0;
  for (const auto& [v, pv] : p.mass) {
    const double qv = q.at(v);
    if (qv <= 0) return std::numeric_limits<double>::infinity();
    s -= pv * std::log(qv);
  }
  return s;
}

double l1_to_uniform(const FinDist& p, const std::vector<CoordVec>& S) {
  std::vector<CoordVec> s = normalize_set(p.ctx, S);
  if (s.empty()) throw std::domain_error("l1_to_uniform: empty set");
  const double u = 1.0 / static_cast<double>(s.size());
  double total = 0;
  for (const CoordVec& v : s) total += std::abs(p.at(v) - u);
  for (const auto& [v, pv] : p.mass) {
    if (!set_contains(s, v)) total += pv;
  }
  return total;
}

double l1_distance(const FinDist& p, const FinDist& q) {
  require_same_context(p.ctx, q.ctx);
  double total = 0;
  for (const auto& [v, pv] : p.mass) total += std::abs(pv - q.at(v));
  for (const auto& [v, qv] : q.mass) {
    if (p.at(v) == 0.0) total += qv;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Pushforward / conditioning

FinDist pushforward(const FinDist& p, const Homomorphism& h) {
  require_same_context(p.ctx, h.domain());
  std::vector<std::pair<CoordVec, double>> w;
  w.reserve(p.mass.size());
  for (const auto& [v, pv] : p.mass) w.emplace_back(h.apply(v), pv);
  return FinDist::from_weights(h.codomain(), std::move(w));
}

FinDist condition_on_fiber(const FinDist& p, const Homomorphism& h, const CoordVec& y) {
  require_same_context(p.ctx, h.domain());
  const CoordVec yc = canon(h.codomain(), y);
  std::vector<std::pair<CoordVec, double>> w;
  double total = 0;
  for (const auto& [v, pv] : p.mass) {
    if (h.apply(v) == yc) {
      w.emplace_back(v, pv);
      total += pv;
    }
  }
  if (total <= 0) throw std::domain_error("condition_on_fiber: zero-mass fiber");
  for (auto& [v, pv] : w) pv /= total;
  FinDist d;
  d.ctx = p.ctx;
  d.mass = std::move(w);
  return d;
}

double conditional_entropy_given_map(const FinDist& p, const Homomorphism& h) {
  FinDist py = pushforward(p, h);
  double s = 0;
  for (const auto& [y, w] : py.mass) {
    s += w * entropy(condition_on_fiber(p, h, y));
  }
  return s;
}

FinDist translate(const FinDist& p, const CoordVec& c) {
  std::vector<std::pair<CoordVec, double>> w;
  w.reserve(p.mass.size());
  for (const auto& [v, pv] : p.mass) w.emplace_back(group_add(p.ctx, v, c), pv);
  return FinDist::from_weights(p.ctx, std::move(w));
}

FinDist negate_dist(const FinDist& p) {
  std::vector<std::pair<CoordVec, double>> w;
  w.reserve(p.mass.size());
  for (const auto& [v, pv] : p.mass) w.emplace_back(group_neg(p.ctx, v), pv);
  return FinDist::from_weights(p.ctx, std::move(w));
}

}  // namespace entkit
