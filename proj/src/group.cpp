#include "entkit/group.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace entkit {

namespace {

Coord mod_reduce(Coord c, Coord m) {
  Coord r = c % m;
  return r < 0 ? r + m : r;
}

void check_len(int dim, const CoordVec& v, const char* what) {
  if (static_cast<int>(v.size()) != dim) {
    throw std::domain_error(std::string(what) + ": coordinate length " +
                            std::to_string(v.size()) + " != dimension " + std::to_string(dim));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SubgroupF2

SubgroupF2 SubgroupF2::trivial(int dim) {
  SubgroupF2 h;
  h.dim_ = dim;
  return h;
}

SubgroupF2 SubgroupF2::full(int dim) {
  std::vector<CoordVec> gens;
  for (int i = 0; i < dim; ++i) {
    CoordVec e(dim, 0);
    e[i] = 1;
    gens.push_back(e);
  }
  return span(dim, gens);
}

SubgroupF2 SubgroupF2::span(int dim, const std::vector<CoordVec>& gens) {
  SubgroupF2 h;
  h.dim_ = dim;
  for (const CoordVec& g : gens) {
    check_len(dim, g, "SubgroupF2::span");
    CoordVec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = mod_reduce(g[i], 2);
    // eliminate against current rows
    for (std::size_t r = 0; r < h.basis_.size(); ++r) {
      if (v[h.pivots_[r]]) {
        for (int i = 0; i < dim; ++i) v[i] ^= h.basis_[r][i];
      }
    }
    int pivot = -1;
    for (int i = 0; i < dim; ++i) {
      if (v[i]) { pivot = i; break; }
    }
    if (pivot < 0) continue;
    // back-eliminate the new pivot from existing rows
    for (std::size_t r = 0; r < h.basis_.size(); ++r) {
      if (h.basis_[r][pivot]) {
        for (int i = 0; i < dim; ++i) h.basis_[r][i] ^= v[i];
      }
    }
    h.basis_.push_back(v);
    h.pivots_.push_back(pivot);
  }
  // sort rows by pivot column
  std::vector<std::size_t> order(h.basis_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return h.pivots_[a] < h.pivots_[b]; });
  std::vector<CoordVec> basis;
  std::vector<int> pivots;
  for (std::size_t i : order) {
    basis.push_back(h.basis_[i]);
    pivots.push_back(h.pivots_[i]);
  }
  h.basis_ = std::move(basis);
  h.pivots_ = std::move(pivots);
  return h;
}

double SubgroupF2::log_size() const { return rank() * std::log(2.0); }

CoordVec SubgroupF2::reduce(CoordVec v) const {
  check_len(dim_, v, "SubgroupF2::reduce");
  for (int i = 0; i < dim_; ++i) v[i] = mod_reduce(v[i], 2);
  for (std::size_t r = 0; r < basis_.size(); ++r) {
    if (v[pivots_[r]]) {
      for (int i = 0; i < dim_; ++i) v[i] ^= basis_[r][i];
    }
  }
  return v;
}

bool SubgroupF2::contains(const CoordVec& v) const {
  CoordVec r = reduce(v);
  return std::all_of(r.begin(), r.end(), [](Coord c) { return c == 0; });
}

std::vector<CoordVec> SubgroupF2::elements() const {
  std::vector<CoordVec> out;
  const std::size_t n = std::size_t{1} << rank();
  out.reserve(n);
  for (std::size_t mask = 0; mask < n; ++mask) {
    CoordVec v(dim_, 0);
    for (int r = 0; r < rank(); ++r) {
      if (mask >> r & 1) {
        for (int i = 0; i < dim_; ++i) v[i] ^= basis_[r][i];
      }
    }
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

bool SubgroupF2::operator<(const SubgroupF2& o) const {
  if (rank() != o.rank()) return rank() < o.rank();
  return basis_ < o.basis_;
}

std::vector<SubgroupF2> enumerate_subgroups(int dim, int cap) {
  if (dim < 0) throw std::domain_error("enumerate_subgroups: negative dimension");
  if (dim > cap) {
    throw std::length_error("enumerate_subgroups: dimension " + std::to_string(dim) +
                            " above cap " + std::to_string(cap));
  }
  std::vector<SubgroupF2> out;
  for (int r = 0; r <= dim; ++r) {
    // choose pivot columns c_1 < ... < c_r, then enumerate free entries:
    // row i may have arbitrary bits in columns > pivot_i that are not pivots.
    std::vector<int> piv(r);
    std::vector<bool> choose(dim, false);
    std::fill(choose.begin(), choose.begin() + r, true);
    // iterate over all pivot-column subsets in lexicographic order
    std::vector<int> idx(r);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<std::pair<int, int>> free_cells;  // (row, col)
      for (int i = 0; i < r; ++i) {
        for (int c = idx[i] + 1; c < dim; ++c) {
          if (std::find(idx.begin(), idx.end(), c) == idx.end()) {
            free_cells.emplace_back(i, c);
          }
        }
      }
      const std::size_t nfree = free_cells.size();
      for (std::size_t mask = 0; mask < (std::size_t{1} << nfree); ++mask) {
        std::vector<CoordVec> rows(r, CoordVec(dim, 0));
        for (int i = 0; i < r; ++i) rows[i][idx[i]] = 1;
        for (std::size_t f = 0; f < nfree; ++f) {
          if (mask >> f & 1) rows[free_cells[f].first][free_cells[f].second] = 1;
        }
        out.push_back(SubgroupF2::span(dim, rows));
      }
      // next combination
      int i = r - 1;
      while (i >= 0 && idx[i] == dim - r + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// GroupContext

GroupContext GroupContext::z_lattice(int d) {
  if (d < 0) throw std::domain_error("z_lattice: negative dimension");
  GroupContext c;
  c.kind = GroupKind::ZLattice;
  c.dim = d;
  return c;
}

GroupContext GroupContext::f2(int d) {
  if (d < 0) throw std::domain_error("f2: negative dimension");
  GroupContext c;
  c.kind = GroupKind::F2Vec;
  c.dim = d;
  return c;
}

GroupContext GroupContext::zmod(std::vector<Coord> moduli) {
  for (Coord m : moduli) {
    if (m < 2) throw std::domain_error("zmod: all moduli must be >= 2");
  }
  GroupContext c;
  c.kind = GroupKind::ZModProduct;
  c.dim = static_cast<int>(moduli.size());
  c.moduli = std::move(moduli);
  return c;
}

GroupContext GroupContext::f2_quotient(SubgroupF2 h) {
  GroupContext c;
  c.kind = GroupKind::QuotientF2;
  c.dim = h.dim();
  c.quot = std::make_shared<const SubgroupF2>(std::move(h));
  return c;
}

bool GroupContext::operator==(const GroupContext& o) const {
  if (kind != o.kind || dim != o.dim || moduli != o.moduli) return false;
  if (kind == GroupKind::QuotientF2) return *quot == *o.quot;
  return true;
}

double GroupContext::log_order() const {
  switch (kind) {
    case GroupKind::F2Vec:
      return dim * std::log(2.0);
    case GroupKind::ZModProduct: {
      double s = 0;
      for (Coord m : moduli) s += std::log(static_cast<double>(m));
      return s;
    }
    case GroupKind::QuotientF2:
      return (dim - quot->rank()) * std::log(2.0);
    case GroupKind::ZLattice:
      break;
  }
  throw std::domain_error("log_order: infinite group");
}

std::vector<CoordVec> GroupContext::elements() const {
  std::vector<CoordVec> out;
  switch (kind) {
    case GroupKind::F2Vec: {
      for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
        CoordVec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = mask >> i & 1;
        out.push_back(std::move(v));
      }
      break;
    }
    case GroupKind::ZModProduct: {
      out.push_back(CoordVec(dim, 0));
      for (int i = 0; i < dim; ++i) {
        std::vector<CoordVec> next;
        for (const CoordVec& v : out) {
          for (Coord c = 0; c < moduli[i]; ++c) {
            CoordVec w = v;
            w[i] = c;
            next.push_back(std::move(w));
          }
        }
        out = std::move(next);
      }
      break;
    }
    case GroupKind::QuotientF2: {
      for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
        CoordVec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = mask >> i & 1;
        out.push_back(quot->reduce(std::move(v)));
      }
      break;
    }
    case GroupKind::ZLattice:
      throw std::domain_error("elements: infinite group");
  }
  std::sort(out.begin(), out.end(), lex_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string GroupContext::describe() const {
  std::ostringstream os;
  switch (kind) {
    case GroupKind::ZLattice: os << "Z^" << dim; break;
    case GroupKind::F2Vec: os << "F2^" << dim; break;
    case GroupKind::ZModProduct: {
      os << "Z/";
      for (std::size_t i = 0; i < moduli.size(); ++i) os << (i ? "xZ/" : "") << moduli[i];
      break;
    }
    case GroupKind::QuotientF2:
      os << "F2^" << dim << "/H(rank " << quot->rank() << ")";
      break;
  }
  return os.str();
}

void require_same_context(const GroupContext& a, const GroupContext& b) {
  if (!(a == b)) {
    throw std::domain_error("group context mismatch: " + a.describe() + " vs " + b.describe());
  }
}

// ---------------------------------------------------------------------------
// Element arithmetic

CoordVec canon(const GroupContext& ctx, CoordVec v) {
  check_len(ctx.dim, v, "canon");
  switch (ctx.kind) {
    case GroupKind::ZLattice:
      return v;
    case GroupKind::F2Vec:
      for (Coord& c : v) c = mod_reduce(c, 2);
      return v;
    case GroupKind::ZModProduct:
      for (int i = 0; i < ctx.dim; ++i) v[i] = mod_reduce(v[i], ctx.moduli[i]);
      return v;
    case GroupKind::QuotientF2:
      return ctx.quot->reduce(std::move(v));
  }
  throw std::logic_error("canon: bad kind");
}

CoordVec group_zero(const GroupContext& ctx) { return CoordVec(ctx.dim, 0); }

CoordVec group_add(const GroupContext& ctx, const CoordVec& a, const CoordVec& b) {
  check_len(ctx.dim, a, "group_add");
  check_len(ctx.dim, b, "group_add");
  CoordVec out(ctx.dim);
  if (ctx.kind == GroupKind::ZLattice) {
    for (int i = 0; i < ctx.dim; ++i) {
      if (__builtin_add_overflow(a[i], b[i], &out[i])) {
        throw std::overflow_error("group_add: 64-bit coordinate overflow");
      }
    }
    return out;
  }
  for (int i = 0; i < ctx.dim; ++i) out[i] = a[i] + b[i];
  return canon(ctx, std::move(out));
}

CoordVec group_neg(const GroupContext& ctx, const CoordVec& a) {
  check_len(ctx.dim, a, "group_neg");
  CoordVec out(ctx.dim);
  if (ctx.kind == GroupKind::ZLattice) {
    for (int i = 0; i < ctx.dim; ++i) {
      if (__builtin_sub_overflow(Coord{0}, a[i], &out[i])) {
        throw std::overflow_error("group_neg: 64-bit coordinate overflow");
      }
    }
    return out;
  }
  for (int i = 0; i < ctx.dim; ++i) out[i] = -a[i];
  return canon(ctx, std::move(out));
}

CoordVec group_sub(const GroupContext& ctx, const CoordVec& a, const CoordVec& b) {
  return group_add(ctx, a, group_neg(ctx, b));
}

bool lex_less(const CoordVec& a, const CoordVec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<CoordVec> normalize_set(const GroupContext& ctx, std::vector<CoordVec> elems) {
  for (CoordVec& v : elems) v = canon(ctx, std::move(v));
  std::sort(elems.begin(), elems.end(), lex_less);
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  return elems;
}

bool set_contains(const std::vector<CoordVec>& sorted_set, const CoordVec& v) {
  return std::binary_search(sorted_set.begin(), sorted_set.end(), v, lex_less);
}

std::vector<CoordVec> sumset(const GroupContext& ctx, const std::vector<CoordVec>& A,
                             const std::vector<CoordVec>& B, int sign) {
  if (sign != 1 && sign != -1) throw std::domain_error("sumset: sign must be +1 or -1");
  std::vector<CoordVec> out;
  out.reserve(A.size() * B.size());
  for (const CoordVec& a : A) {
    for (const CoordVec& b : B) {
      out.push_back(sign > 0 ? group_add(ctx, a, b) : group_sub(ctx, a, b));
    }
  }
  std::sort(out.begin(), out.end(), lex_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Homomorphism

Homomorphism Homomorphism::coord_project(const GroupContext& domain, int index) {
  if (domain.kind != GroupKind::ZLattice) {
    throw std::domain_error("coord_project: domain must be a Z lattice");
  }
  if (index < 0 || index >= domain.dim) throw std::domain_error("coord_project: bad index");
  Homomorphism h;
  h.kind_ = Kind::CoordProject;
  h.domain_ = domain;
  h.codomain_ = GroupContext::z_lattice(1);
  h.index_ = index;
  return h;
}

Homomorphism Homomorphism::mod2(const GroupContext& domain) {
  if (domain.kind != GroupKind::ZLattice) {
    throw std::domain_error("mod2: domain must be a Z lattice");
  }
  Homomorphism h;
  h.kind_ = Kind::Mod2;
  h.domain_ = domain;
  h.codomain_ = GroupContext::f2(domain.dim);
  return h;
}

Homomorphism Homomorphism::quotient_by(const GroupContext& domain, SubgroupF2 sub) {
  if (domain.kind != GroupKind::F2Vec || domain.dim != sub.dim()) {
    throw std::domain_error("quotient_by: domain must be F2^D matching the subgroup");
  }
  Homomorphism h;
  h.kind_ = Kind::QuotientByH;
  h.domain_ = domain;
  h.h_ = std::make_shared<const SubgroupF2>(std::move(sub));
  h.codomain_ = GroupContext::f2_quotient(*h.h_);
  return h;
}

Homomorphism Homomorphism::doubling(const GroupContext& domain) {
  Homomorphism h;
  h.kind_ = Kind::Double;
  h.domain_ = domain;
  h.codomain_ = domain;
  return h;
}

Homomorphism Homomorphism::compose(Homomorphism first, Homomorphism then) {
  require_same_context(first.codomain(), then.domain());
  Homomorphism h;
  h.kind_ = Kind::Compose;
  h.domain_ = first.domain();
  h.codomain_ = then.codomain();
  h.first_ = std::make_shared<const Homomorphism>(std::move(first));
  h.then_ = std::make_shared<const Homomorphism>(std::move(then));
  return h;
}

CoordVec Homomorphism::apply(const CoordVec& x) const {
  check_len(domain_.dim, x, "Homomorphism::apply");
  switch (kind_) {
    case Kind::CoordProject:
      return CoordVec{x[index_]};
    case Kind::Mod2: {
      CoordVec out(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = mod_reduce(x[i], 2);
      return out;
    }
    case Kind::QuotientByH:
      return h_->reduce(x);
    case Kind::Double:
      return group_add(domain_, x, x);
    case Kind::Compose:
      return then_->apply(first_->apply(x));
  }
  throw std::logic_error("Homomorphism::apply: bad kind");
}

std::string Homomorphism::describe() const {
  switch (kind_) {
    case Kind::CoordProject: return "proj" + std::to_string(index_);
    case Kind::Mod2: return "mod2";
    case Kind::QuotientByH: return "quot(rank " + std::to_string(h_->rank()) + ")";
    case Kind::Double: return "double";
    case Kind::Compose: return first_->describe() + ";" + then_->describe();
  }
  return "?";
}

std::size_t ElementHash::operator()(const CoordVec& v) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (Coord c : v) {
    std::uint64_t u = static_cast<std::uint64_t>(c);
    for (int i = 0; i < 8; ++i) {
      h ^= (u >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace entkit
