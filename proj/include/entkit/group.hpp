#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace entkit {

using Coord = std::int64_t;
using CoordVec = std::vector<Coord>;

/// A subspace H <= F2^D, stored as a reduced row-echelon basis.
/// The basis is canonical: rows sorted by pivot column, every pivot column
/// is zero in all other rows. Coset representatives produced by reduce()
/// are the lexicographically smallest members of their coset.
class SubgroupF2 {
 public:
  SubgroupF2() = default;
  static SubgroupF2 trivial(int dim);
  static SubgroupF2 full(int dim);
  /// Reduced echelon basis of the span of `gens` (each of length dim).
  static SubgroupF2 span(int dim, const std::vector<CoordVec>& gens);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(basis_.size()); }
  const std::vector<CoordVec>& basis() const { return basis_; }
  double log_size() const;
  std::int64_t size() const { return std::int64_t{1} << rank(); }

  bool contains(const CoordVec& v) const;
  /// Canonical coset representative of v + H.
  CoordVec reduce(CoordVec v) const;
  /// All 2^rank elements, lexicographically sorted.
  std::vector<CoordVec> elements() const;

  bool operator==(const SubgroupF2& o) const {
    return dim_ == o.dim_ && basis_ == o.basis_;
  }
  bool operator<(const SubgroupF2& o) const;  // rank, then lex basis

 private:
  int dim_ = 0;
  std::vector<CoordVec> basis_;  // echelon rows, pivots_ [i] = pivot col of row i
  std::vector<int> pivots_;
};

/// Every subspace of F2^dim exactly once, ordered by rank then
/// lexicographic basis. Throws std::length_error above `cap`.
std::vector<SubgroupF2> enumerate_subgroups(int dim, int cap = 5);

enum class GroupKind { ZLattice, F2Vec, ZModProduct, QuotientF2 };

/// Descriptor of the ambient abelian group an element or distribution
/// lives in. Immutable after construction.
struct GroupContext {
  GroupKind kind = GroupKind::ZLattice;
  int dim = 0;
  std::vector<Coord> moduli;                 // ZModProduct only, all >= 2
  std::shared_ptr<const SubgroupF2> quot;    // QuotientF2 only

  static GroupContext z_lattice(int d);
  static GroupContext f2(int d);
  static GroupContext zmod(std::vector<Coord> moduli);
  static GroupContext f2_quotient(SubgroupF2 h);

  bool operator==(const GroupContext& o) const;
  bool operator!=(const GroupContext& o) const { return !(*this == o); }

  bool finite() const { return kind != GroupKind::ZLattice; }
  bool torsion_free() const { return kind == GroupKind::ZLattice; }
  double log_order() const;                  // finite groups only
  std::vector<CoordVec> elements() const;    // finite groups only
  std::string describe() const;
};

void require_same_context(const GroupContext& a, const GroupContext& b);

/// Canonical representative (mod moduli / mod 2 / echelon-reduced coset rep).
CoordVec canon(const GroupContext& ctx, CoordVec v);
CoordVec group_zero(const GroupContext& ctx);
/// a + b, canonical. Z coordinates are checked 64-bit: overflow throws.
CoordVec group_add(const GroupContext& ctx, const CoordVec& a, const CoordVec& b);
CoordVec group_neg(const GroupContext& ctx, const CoordVec& a);
CoordVec group_sub(const GroupContext& ctx, const CoordVec& a, const CoordVec& b);

bool lex_less(const CoordVec& a, const CoordVec& b);

/// Sorted-unique element set in canonical form.
std::vector<CoordVec> normalize_set(const GroupContext& ctx, std::vector<CoordVec> elems);
bool set_contains(const std::vector<CoordVec>& sorted_set, const CoordVec& v);

/// {a + sign*b : a in A, b in B}, sorted unique. sign is +1 or -1.
std::vector<CoordVec> sumset(const GroupContext& ctx, const std::vector<CoordVec>& A,
                             const std::vector<CoordVec>& B, int sign);

/// Additive homomorphisms between group contexts.
class Homomorphism {
 public:
  static Homomorphism coord_project(const GroupContext& domain, int index);
  static Homomorphism mod2(const GroupContext& domain);  // Z^D -> F2^D
  static Homomorphism quotient_by(const GroupContext& domain, SubgroupF2 h);
  static Homomorphism doubling(const GroupContext& domain);  // x -> 2x
  static Homomorphism compose(Homomorphism first, Homomorphism then);

  const GroupContext& domain() const { return domain_; }
  const GroupContext& codomain() const { return codomain_; }
  CoordVec apply(const CoordVec& x) const;
  std::string describe() const;

 private:
  enum class Kind { CoordProject, Mod2, QuotientByH, Double, Compose };
  Homomorphism() = default;
  Kind kind_ = Kind::Double;
  GroupContext domain_, codomain_;
  int index_ = 0;
  std::shared_ptr<const SubgroupF2> h_;
  std::shared_ptr<const Homomorphism> first_, then_;
};

struct ElementHash {
  std::size_t operator()(const CoordVec& v) const noexcept;
};

}  // namespace entkit
