#include "flagdescent/autgroup.hpp"

#include <algorithm>

namespace flagdescent::autgroup {

using flags::enumerate_flags;
using linalg::annihilator;
using linalg::rref;

// ---------------------------------------------------------------------------
// Admissibility and duality

bool is_admissible(const FlagSignature& sig) {
  const std::uint32_t n = sig.ambient();
  if (n < 3) return true;
  const auto& d = sig.dims();
  const std::size_t r = d.size();
  for (std::size_t i = 0; i < r; ++i) {
    if (d[i] + d[r - 1 - i] != n) return true;
  }
  return false;
}

Flag dual_flag(const Flag& flag) {
  const std::uint32_t n = flag.signature().ambient();
  std::vector<std::uint32_t> dual_dims;
  for (auto it = flag.signature().dims().rbegin(); it != flag.signature().dims().rend(); ++it) {
    dual_dims.push_back(n - *it);
  }
  std::vector<Subspace> chain;
  for (auto it = flag.chain().rbegin(); it != flag.chain().rend(); ++it) {
    chain.push_back(annihilator(*it));
  }
  return Flag(FlagSignature(n, std::move(dual_dims)), std::move(chain));
}

Flag tau(const Flag& flag, const Matrix& j0) {
  const auto& d = flag.signature().dims();
  const std::uint32_t n = flag.signature().ambient();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] + d[d.size() - 1 - i] != n)
      throw PreconditionError("tau requires a self-dual signature");
  }
  if (!j0.is_invertible()) throw PreconditionError("j0 must be invertible");
  Flag dual = dual_flag(flag);
  std::vector<Subspace> chain;
  for (const auto& u : dual.chain()) chain.push_back(linalg::apply(j0, u));
  return Flag(dual.signature(), std::move(chain));
}

Flag tau(const Flag& flag) {
  return tau(flag, Matrix::identity(flag.field(), flag.signature().ambient()));
}

// ---------------------------------------------------------------------------
// ProjectiveMap

namespace {

Matrix canonical_lift(const Matrix& lift) {
  for (std::uint32_t i = 0; i < lift.rows(); ++i) {
    for (std::uint32_t j = 0; j < lift.cols(); ++j) {
      if (!lift.at(i, j).is_zero()) {
        return lift.scaled(lift.at(i, j).inverse());
      }
    }
  }
  throw PreconditionError("zero matrix is not projective");
}

}  // namespace

ProjectiveMap::ProjectiveMap(const Matrix& lift) : lift_(canonical_lift(lift)) {
  if (lift_.rows() != lift_.cols() || !lift_.is_invertible())
    throw PreconditionError("projective map requires an invertible lift");
}

Subspace ProjectiveMap::apply(const Subspace& u) const { return linalg::apply(lift_, u); }

Flag ProjectiveMap::apply(const Flag& flag) const {
  std::vector<Subspace> chain;
  for (const auto& u : flag.chain()) chain.push_back(apply(u));
  return Flag(flag.signature(), std::move(chain));
}

std::uint32_t ProjectiveMap::order(std::uint32_t max_order) const {
  Matrix acc = lift_;
  const Matrix id = Matrix::identity(lift_.field(), lift_.rows());
  for (std::uint32_t r = 1; r <= max_order; ++r) {
    if (acc.proportionality(id).has_value()) return r;
    acc = acc * lift_;
  }
  throw BudgetError("projective order exceeds the bound");
}

std::vector<ProjectiveMap> enumerate_pgl(std::uint32_t n, const FiniteField& field,
                                         const Budget& budget) {
  const std::uint64_t q = field.cardinality();
  std::uint64_t scan = 1;
  for (std::uint32_t i = 0; i < n * n && scan <= budget.max_items; ++i) scan *= q;
  budget.check_items(scan, "PGL enumeration scan");

  std::vector<ProjectiveMap> out;
  // Scan all matrices whose first nonzero entry (row-major) is 1: each
  // projective class of invertible matrices has exactly one such lift.
  std::vector<std::uint32_t> cells(std::size_t(n) * n, 0);
  while (true) {
    std::size_t first_nonzero = 0;
    while (first_nonzero < cells.size() && cells[first_nonzero] == 0) ++first_nonzero;
    if (first_nonzero < cells.size() && cells[first_nonzero] == 1) {
      Matrix m(field, n, n);
      for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j)
          m.set(i, j, field.element(cells[std::size_t(i) * n + j]));
      if (m.is_invertible()) out.emplace_back(ProjectiveMap(m));
    }
    // odometer over the cells
    std::size_t pos = cells.size();
    bool advanced = false;
    while (pos > 0) {
      --pos;
      if (cells[pos] + 1 < q) {
        ++cells[pos];
        std::fill(cells.begin() + std::ptrdiff_t(pos) + 1, cells.end(), 0u);
        advanced = true;
        break;
      }
      cells[pos] = 0;
    }
    if (!advanced) return out;
  }
}

// ---------------------------------------------------------------------------
// FlagContext

FlagContext::FlagContext(FlagSignature sig, FiniteField field, const Budget& budget)
    : sig_(std::move(sig)), field_(std::move(field)) {
  flags_ = enumerate_flags(sig_, field_, budget);
  index_.reserve(flags_.size());
  for (std::uint32_t i = 0; i < flags_.size(); ++i) index_.emplace(flags_[i].storage_key(), i);
}

std::uint32_t FlagContext::index_of(const Flag& flag) const {
  auto it = index_.find(flag.storage_key());
  if (it == index_.end()) throw PreconditionError("flag not in the enumerated context");
  return it->second;
}

std::vector<std::uint32_t> FlagContext::permutation(
    const std::function<Flag(const Flag&)>& map) const {
  std::vector<std::uint32_t> perm(flags_.size());
  std::vector<bool> hit(flags_.size(), false);
  for (std::uint32_t i = 0; i < flags_.size(); ++i) {
    std::uint32_t j = index_of(map(flags_[i]));
    perm[i] = j;
    if (hit[j]) throw PreconditionError("map is not a bijection on flags");
    hit[j] = true;
  }
  return perm;
}

std::optional<ProjectiveMap> is_pgl_induced(const std::vector<std::uint32_t>& perm,
                                            const FlagContext& ctx, const Budget& budget) {
  if (perm.size() != ctx.size()) throw PreconditionError("permutation size mismatch");
  const std::uint32_t n = ctx.signature().ambient();
  for (const auto& g : enumerate_pgl(n, ctx.field(), budget)) {
    bool match = true;
    for (std::uint32_t i = 0; i < ctx.size() && match; ++i) {
      match = ctx.index_of(g.apply(ctx.all()[i])) == perm[i];
    }
    if (match) return g;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// TwistedAction

namespace {

std::vector<SemilinearMap> build_maps(const GaloisGroup& group, const Matrix& basis,
                                      const std::vector<Matrix>& lifts) {
  if (lifts.size() != group.order()) throw PreconditionError("one lift per group element required");
  const std::uint32_t n = basis.rows();
  if (basis.cols() != n || !basis.is_invertible())
    throw PreconditionError("basis matrix must be invertible");
  if (!(basis.field() == group.top())) throw PreconditionError("basis not over the top field");
  const Matrix id = Matrix::identity(group.top(), n);
  if (!lifts[0].proportionality(id).has_value())
    throw PreconditionError("the identity lift must be scalar");
  // P: basis-to-standard coordinate change (basis vectors are rows).
  const Matrix p = basis.transpose();
  const Matrix p_inv = p.inverse();
  std::vector<SemilinearMap> maps;
  maps.reserve(lifts.size());
  for (std::uint32_t e = 0; e < lifts.size(); ++e) {
    if (lifts[e].rows() != n || lifts[e].cols() != n || !lifts[e].is_invertible())
      throw PreconditionError("lift must be an invertible n x n matrix");
    FieldAutomorphism s = group.element(e);
    maps.emplace_back(s, lifts[e] * p * p_inv.map_entries(s));
  }
  return maps;
}

}  // namespace

TwistedAction::TwistedAction(GaloisGroup group, Matrix basis, std::vector<Matrix> lifts)
    : group_(std::move(group)), basis_(std::move(basis)), lifts_(std::move(lifts)),
      maps_(build_maps(group_, basis_, lifts_)) {}

TwistedAction::TwistedAction(GaloisGroup group, std::vector<Matrix> lifts)
    : group_(std::move(group)),
      basis_(Matrix::identity(group_.top(), lifts.empty() ? 0 : lifts.front().rows())),
      lifts_(std::move(lifts)),
      maps_(build_maps(group_, basis_, lifts_)) {}

TwistedAction TwistedAction::trivial(const GaloisGroup& group, std::uint32_t n) {
  std::vector<Matrix> lifts(group.order(), Matrix::identity(group.top(), n));
  return TwistedAction(group, std::move(lifts));
}

Flag TwistedAction::apply(std::uint32_t e, const Flag& flag) const {
  const SemilinearMap& m = maps_[e % group_.order()];
  std::vector<Subspace> chain;
  for (const auto& u : flag.chain()) chain.push_back(m.apply(u));
  return Flag(flag.signature(), std::move(chain));
}

Subspace TwistedAction::apply(std::uint32_t e, const Subspace& u) const {
  return maps_[e % group_.order()].apply(u);
}

// ---------------------------------------------------------------------------
// Cocycle validation and fixed flags

CocycleReport validate_cocycle(const TwistedAction& action, const FlagSignature& probe,
                               const Budget& budget) {
  FlagContext ctx(probe, action.group().top(), budget);
  const std::uint32_t k = action.group().order();
  CocycleReport report;
  for (std::uint32_t e1 = 0; e1 < k; ++e1) {
    for (std::uint32_t e2 = 0; e2 < k; ++e2) {
      const std::uint32_t e12 = (e1 + e2) % k;
      for (const auto& flag : ctx.all()) {
        Flag lhs = action.apply(e12, flag);
        Flag rhs = action.apply(e1, action.apply(e2, flag));
        if (!(lhs == rhs)) {
          report.valid = false;
          report.violating_pair = {e1, e2};
          report.witness = flag.to_string();
          return report;
        }
      }
    }
  }
  return report;
}

std::vector<Flag> fixed_flags(const TwistedAction& action, const FlagSignature& sig,
                              const Budget& budget) {
  CocycleReport rep = validate_cocycle(action, sig, budget);
  if (!rep.valid) throw PreconditionError("twisted action is not a valid cocycle");
  std::vector<Flag> fixed;
  for (const auto& flag : enumerate_flags(sig, action.group().top(), budget)) {
    bool ok = true;
    for (std::uint32_t e = 1; e < action.group().order() && ok; ++e) {
      ok = action.apply(e, flag) == flag;
    }
    if (ok) fixed.push_back(flag);
  }
  return fixed;
}

std::vector<Flag> fixed_flags_of(const FlagContext& ctx,
                                 const std::vector<std::function<Flag(const Flag&)>>& maps) {
  std::vector<Flag> fixed;
  for (const auto& flag : ctx.all()) {
    bool ok = true;
    for (const auto& m : maps) {
      if (!(m(flag) == flag)) {
        ok = false;
        break;
      }
    }
    if (ok) fixed.push_back(flag);
  }
  return fixed;
}

}  // namespace flagdescent::autgroup
