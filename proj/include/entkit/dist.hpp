#pragma once

#include <utility>
#include <vector>

#include "entkit/group.hpp"

namespace entkit {

/// Finitely supported probability distribution on a group context.
/// Support is sorted lexicographically; stored masses are strictly positive
/// and sum to 1 (inputs off by at most 1e-9 are renormalized, anything worse
/// is rejected).
struct FinDist {
  GroupContext ctx;
  std::vector<std::pair<CoordVec, double>> mass;

  static FinDist uniform_on(const GroupContext& ctx, const std::vector<CoordVec>& support);
  static FinDist point_mass(const GroupContext& ctx, const CoordVec& x);
  static FinDist from_weights(const GroupContext& ctx,
                              std::vector<std::pair<CoordVec, double>> weights);

  double at(const CoordVec& x) const;  // 0 if outside the support
  std::size_t support_size() const { return mass.size(); }
  std::vector<CoordVec> support() const;
  double max_mass() const;
};

/// Joint law of a pair over (ctx1, ctx2); rows sorted by (first, second).
struct JointDist {
  GroupContext ctx1, ctx2;
  std::vector<std::pair<std::pair<CoordVec, CoordVec>, double>> mass;

  FinDist marginal_first() const;
  FinDist marginal_second() const;
  /// Law of X - Y; requires ctx1 == ctx2.
  FinDist difference_law() const;
  double entropy_joint() const;
  double total_mass() const;
};

double entropy(const FinDist& p);
/// Renyi entropy H_alpha; alpha = 1 is Shannon, alpha = 0 is log support size.
double renyi_entropy(const FinDist& p, double alpha);

/// Law of X + sign*Y for independent X ~ p, Y ~ q. OpenMP gather kernel,
/// bitwise deterministic for any thread count.
FinDist convolve(const FinDist& p, const FinDist& q, int sign);
/// Serial scatter reference for the kernel above (tests and benchmarks).
FinDist convolve_serial(const FinDist& p, const FinDist& q, int sign);

/// D_KL(p || q); +infinity when supp(p) is not contained in supp(q).
double kl_divergence(const FinDist& p, const FinDist& q);
double cross_entropy(const FinDist& p, const FinDist& q);

/// l1 distance between p and the uniform distribution on S
/// (twice the total variation distance).
double l1_to_uniform(const FinDist& p, const std::vector<CoordVec>& S);
double l1_distance(const FinDist& p, const FinDist& q);

FinDist pushforward(const FinDist& p, const Homomorphism& h);
/// (X | h(X) = y), renormalized. Throws on a zero-mass fiber.
FinDist condition_on_fiber(const FinDist& p, const Homomorphism& h, const CoordVec& y);
/// Sum_y P(h(X)=y) H(X | h(X)=y), computed fiber by fiber.
double conditional_entropy_given_map(const FinDist& p, const Homomorphism& h);

FinDist translate(const FinDist& p, const CoordVec& c);  // law of X + c
FinDist negate_dist(const FinDist& p);                   // law of -X

}  // namespace entkit
