#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flagdescent/fields.hpp"

namespace flagdescent::brauer {

using fields::FieldElement;
using fields::FiniteField;
using fields::Tower;

/// Exact rational scalars for the quaternion path.
using Rational = boost::rational<long long>;

/// One entry of a monomial multiplication table: b_i b_j = coeff * b_index.
template <typename S>
struct Monomial {
  std::uint32_t index = 0;
  S coeff;
};

template <typename S>
class TableAlgebra;

/// A value in a structure-constant algebra.  The owner must outlive the
/// element.
template <typename S>
class AlgebraElement {
 public:
  AlgebraElement(const TableAlgebra<S>* owner, std::vector<S> coeffs)
      : owner_(owner), coeffs_(std::move(coeffs)) {}

  const std::vector<S>& coefficients() const { return coeffs_; }
  const S& coeff(std::uint32_t i) const { return coeffs_[i]; }
  bool is_zero() const {
    for (const auto& c : coeffs_) {
      if (!(c == owner_->zero())) return false;
    }
    return true;
  }

  AlgebraElement operator+(const AlgebraElement& rhs) const {
    std::vector<S> out = coeffs_;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] + rhs.coeffs_[i];
    return AlgebraElement(owner_, std::move(out));
  }
  AlgebraElement operator-(const AlgebraElement& rhs) const {
    std::vector<S> out = coeffs_;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] - rhs.coeffs_[i];
    return AlgebraElement(owner_, std::move(out));
  }
  AlgebraElement operator*(const AlgebraElement& rhs) const {
    return AlgebraElement(owner_, owner_->mul(coeffs_, rhs.coeffs_));
  }
  bool operator==(const AlgebraElement& rhs) const { return coeffs_ == rhs.coeffs_; }

 private:
  const TableAlgebra<S>* owner_;
  std::vector<S> coeffs_;
};

/// A finite-dimensional associative algebra given by a monomial
/// multiplication table on its basis.  Scalars S form a field with
/// +, -, *, /, ==.
template <typename S>
class TableAlgebra {
 public:
  TableAlgebra(std::uint32_t dim, S zero, S one, std::vector<Monomial<S>> table)
      : dim_(dim), zero_(std::move(zero)), one_(std::move(one)), table_(std::move(table)) {
    if (table_.size() != std::size_t(dim_) * dim_)
      throw PreconditionError("multiplication table has the wrong size");
  }

  std::uint32_t dim() const { return dim_; }
  const S& zero() const { return zero_; }
  const S& one() const { return one_; }
  const Monomial<S>& product(std::uint32_t i, std::uint32_t j) const {
    return table_[std::size_t(i) * dim_ + j];
  }

  AlgebraElement<S> element(std::vector<S> coeffs) const {
    if (coeffs.size() != dim_) throw PreconditionError("coefficient vector length mismatch");
    return AlgebraElement<S>(this, std::move(coeffs));
  }
  AlgebraElement<S> zero_element() const {
    return AlgebraElement<S>(this, std::vector<S>(dim_, zero_));
  }
  AlgebraElement<S> basis_element(std::uint32_t i) const {
    std::vector<S> c(dim_, zero_);
    c[i] = one_;
    return AlgebraElement<S>(this, std::move(c));
  }

  std::vector<S> mul(const std::vector<S>& u, const std::vector<S>& v) const {
    std::vector<S> out(dim_, zero_);
    for (std::uint32_t i = 0; i < dim_; ++i) {
      if (u[i] == zero_) continue;
      for (std::uint32_t j = 0; j < dim_; ++j) {
        if (v[j] == zero_) continue;
        const Monomial<S>& m = product(i, j);
        out[m.index] = out[m.index] + u[i] * v[j] * m.coeff;
      }
    }
    return out;
  }

  /// (b_i b_j) b_k == b_i (b_j b_k) on all basis triples.
  bool verify_associativity() const {
    for (std::uint32_t i = 0; i < dim_; ++i) {
      for (std::uint32_t j = 0; j < dim_; ++j) {
        const Monomial<S>& ij = product(i, j);
        for (std::uint32_t k = 0; k < dim_; ++k) {
          const Monomial<S>& jk = product(j, k);
          const Monomial<S>& l = product(ij.index, k);
          const Monomial<S>& r = product(i, jk.index);
          if (l.index != r.index) return false;
          if (!(ij.coeff * l.coeff == jk.coeff * r.coeff)) return false;
        }
      }
    }
    return true;
  }

  /// Dimension of the center, by solving the commutation system x b_j = b_j x
  /// for all j exactly.
  std::uint32_t center_dimension() const;

  /// Matrix of left multiplication by u, row-major, acting on coefficient
  /// columns.
  std::vector<S> left_multiplication(const std::vector<S>& u) const {
    std::vector<S> m(std::size_t(dim_) * dim_, zero_);
    for (std::uint32_t j = 0; j < dim_; ++j) {
      // image of b_j
      for (std::uint32_t i = 0; i < dim_; ++i) {
        if (u[i] == zero_) continue;
        const Monomial<S>& mono = product(i, j);
        m[std::size_t(mono.index) * dim_ + j] = m[std::size_t(mono.index) * dim_ + j] + u[i] * mono.coeff;
      }
    }
    return m;
  }

 private:
  std::uint32_t dim_;
  S zero_, one_;
  std::vector<Monomial<S>> table_;
};

namespace detail {

/// In-place row reduction of a rows x cols matrix over the scalar field S.
/// Returns the rank.
template <typename S>
std::uint32_t generic_rank(std::vector<S>& m, std::uint32_t rows, std::uint32_t cols, const S& zero) {
  std::uint32_t r = 0;
  for (std::uint32_t c = 0; c < cols && r < rows; ++c) {
    std::uint32_t pivot = rows;
    for (std::uint32_t i = r; i < rows; ++i) {
      if (!(m[std::size_t(i) * cols + c] == zero)) {
        pivot = i;
        break;
      }
    }
    if (pivot == rows) continue;
    if (pivot != r) {
      for (std::uint32_t j = 0; j < cols; ++j)
        std::swap(m[std::size_t(r) * cols + j], m[std::size_t(pivot) * cols + j]);
    }
    S inv_p = m[std::size_t(r) * cols + c];
    for (std::uint32_t j = c; j < cols; ++j)
      m[std::size_t(r) * cols + j] = m[std::size_t(r) * cols + j] / inv_p;
    for (std::uint32_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      S f = m[std::size_t(i) * cols + c];
      if (f == zero) continue;
      for (std::uint32_t j = c; j < cols; ++j) {
        m[std::size_t(i) * cols + j] = m[std::size_t(i) * cols + j] - f * m[std::size_t(r) * cols + j];
      }
    }
    ++r;
  }
  return r;
}

/// A nonzero kernel vector of the rows x cols matrix, if one exists.
template <typename S>
std::optional<std::vector<S>> generic_kernel_vector(std::vector<S> m, std::uint32_t rows,
                                                    std::uint32_t cols, const S& zero,
                                                    const S& one) {
  std::vector<S> work = m;
  std::uint32_t rank = generic_rank(work, rows, cols, zero);
  if (rank == cols) return std::nullopt;
  // pivot columns of the reduced matrix
  std::vector<std::uint32_t> pivots;
  std::uint32_t r = 0;
  for (std::uint32_t c = 0; c < cols && r < rank; ++c) {
    if (!(work[std::size_t(r) * cols + c] == zero)) {
      pivots.push_back(c);
      ++r;
    }
  }
  // first free column
  std::uint32_t free_col = 0;
  {
    std::uint32_t pi = 0;
    for (std::uint32_t c = 0; c < cols; ++c) {
      if (pi < pivots.size() && pivots[pi] == c) {
        ++pi;
      } else {
        free_col = c;
        break;
      }
    }
  }
  std::vector<S> x(cols, zero);
  x[free_col] = one;
  for (std::uint32_t i = 0; i < pivots.size(); ++i) {
    x[pivots[i]] = zero - work[std::size_t(i) * cols + free_col];
  }
  return x;
}

}  // namespace detail

template <typename S>
std::uint32_t TableAlgebra<S>::center_dimension() const {
  // unknowns x_i; one equation per (j, output index)
  const std::uint32_t rows = dim_ * dim_;
  std::vector<S> m(std::size_t(rows) * dim_, zero_);
  for (std::uint32_t j = 0; j < dim_; ++j) {
    for (std::uint32_t i = 0; i < dim_; ++i) {
      const Monomial<S>& ij = product(i, j);
      const Monomial<S>& ji = product(j, i);
      std::size_t row_ij = std::size_t(j) * dim_ + ij.index;
      std::size_t row_ji = std::size_t(j) * dim_ + ji.index;
      m[row_ij * dim_ + i] = m[row_ij * dim_ + i] + ij.coeff;
      m[row_ji * dim_ + i] = m[row_ji * dim_ + i] - ji.coeff;
    }
  }
  std::uint32_t rank = detail::generic_rank(m, rows, dim_, zero_);
  return dim_ - rank;
}

/// A cyclic algebra by structure constants: generators x1, x2 with
/// x1^m = a, x2^m = b, x1 x2 = omega x2 x1; basis monomials x1^i x2^j
/// indexed by i*m + j.
template <typename S>
struct CyclicAlgebra {
  TableAlgebra<S> table;
  std::uint32_t m;
  S a, b, omega;

  AlgebraElement<S> monomial(std::uint32_t i, std::uint32_t j) const {
    return table.basis_element(i * m + j);
  }
  AlgebraElement<S> x1() const { return monomial(1 % m, 0); }
  AlgebraElement<S> x2() const { return monomial(0, 1 % m); }
  AlgebraElement<S> scalar(const S& s) const {
    std::vector<S> c(table.dim(), table.zero());
    c[0] = s;
    return table.element(std::move(c));
  }
};

namespace detail {

template <typename S>
TableAlgebra<S> cyclic_table(std::uint32_t m, const S& a, const S& b, const S& omega,
                             const S& zero, const S& one) {
  if (a == zero || b == zero) throw PreconditionError("cyclic algebra parameters must be nonzero");
  const std::uint32_t dim = m * m;
  // powers of omega, a, b
  std::vector<S> wpow(m + 1, one), apow(3, one), bpow(3, one);
  for (std::uint32_t i = 1; i <= m; ++i) wpow[i] = wpow[i - 1] * omega;
  apow[1] = a;
  apow[2] = a * a;
  bpow[1] = b;
  bpow[2] = b * b;
  std::vector<Monomial<S>> table(std::size_t(dim) * dim, Monomial<S>{0, zero});
  for (std::uint32_t i1 = 0; i1 < m; ++i1) {
    for (std::uint32_t j1 = 0; j1 < m; ++j1) {
      for (std::uint32_t i2 = 0; i2 < m; ++i2) {
        for (std::uint32_t j2 = 0; j2 < m; ++j2) {
          // x2^{j1} x1^{i2} = omega^{-j1 i2} x1^{i2} x2^{j1}
          std::uint32_t wexp = (m - (j1 * i2) % m) % m;
          S coeff = wpow[wexp];
          coeff = coeff * apow[(i1 + i2) / m];
          coeff = coeff * bpow[(j1 + j2) / m];
          std::uint32_t idx = ((i1 + i2) % m) * m + (j1 + j2) % m;
          table[(std::size_t(i1) * m + j1) * dim + (std::size_t(i2) * m + j2)] =
              Monomial<S>{idx, std::move(coeff)};
        }
      }
    }
  }
  TableAlgebra<S> alg(dim, zero, one, std::move(table));
  if (!alg.verify_associativity())
    throw Error("cyclic algebra table failed the associativity check");
  if (alg.center_dimension() != 1)
    throw Error("cyclic algebra center is not one-dimensional");
  return alg;
}

}  // namespace detail

/// Cyclic algebra over a finite field; omega is the canonical primitive
/// m-th root of unity (requires m | q - 1).
CyclicAlgebra<FieldElement> make_cyclic(const FiniteField& field, std::uint32_t m,
                                        const FieldElement& a, const FieldElement& b);

/// Cyclic algebra over the rationals; m must be 1 or 2 (the only primitive
/// roots of unity in Q are +-1).  m = 2, a = b = -1 gives the Hamilton
/// quaternions.
CyclicAlgebra<Rational> make_cyclic_rational(std::uint32_t m, const Rational& a, const Rational& b);

/// Reversed multiplication table; the opposite of the (a, b; omega) cyclic
/// presentation is the (a, b; omega^{-1}) one.
template <typename S>
CyclicAlgebra<S> opposite(const CyclicAlgebra<S>& alg) {
  const std::uint32_t dim = alg.table.dim();
  std::vector<Monomial<S>> table(std::size_t(dim) * dim, Monomial<S>{0, alg.table.zero()});
  for (std::uint32_t i = 0; i < dim; ++i)
    for (std::uint32_t j = 0; j < dim; ++j)
      table[std::size_t(i) * dim + j] = alg.table.product(j, i);
  TableAlgebra<S> opp(dim, alg.table.zero(), alg.table.one(), std::move(table));
  return CyclicAlgebra<S>{std::move(opp), alg.m, alg.a, alg.b, alg.table.one() / alg.omega};
}

/// Componentwise tensor product table; total dimension capped at 256.
template <typename S>
TableAlgebra<S> tensor_table(const TableAlgebra<S>& a, const TableAlgebra<S>& b) {
  const std::uint64_t dim = std::uint64_t(a.dim()) * b.dim();
  if (dim > 256) throw BudgetError("tensor product dimension exceeds 256");
  std::vector<Monomial<S>> table(dim * dim, Monomial<S>{0, a.zero()});
  for (std::uint32_t i1 = 0; i1 < a.dim(); ++i1)
    for (std::uint32_t j1 = 0; j1 < b.dim(); ++j1)
      for (std::uint32_t i2 = 0; i2 < a.dim(); ++i2)
        for (std::uint32_t j2 = 0; j2 < b.dim(); ++j2) {
          const Monomial<S>& ma = a.product(i1, i2);
          const Monomial<S>& mb = b.product(j1, j2);
          std::uint32_t row = i1 * b.dim() + j1;
          std::uint32_t col = i2 * b.dim() + j2;
          table[std::size_t(row) * dim + col] =
              Monomial<S>{ma.index * b.dim() + mb.index, ma.coeff * mb.coeff};
        }
  return TableAlgebra<S>(std::uint32_t(dim), a.zero(), a.one(), std::move(table));
}

// --- zero divisor search -----------------------------------------------------

enum class SearchStatus { found, none, budget_exceeded, not_searchable };

template <typename S>
struct ZeroDivisorResult {
  SearchStatus status = SearchStatus::none;
  std::vector<S> left, right;  // u v = 0 with both nonzero, when found
  std::string note;
};

/// Deterministic zero-divisor search over a finite field: scan elements in
/// canonical order while the space fits the budget, testing singularity of
/// left multiplication; above the budget, a seeded sampling phase runs and a
/// miss is reported as budget_exceeded rather than none.
ZeroDivisorResult<FieldElement> zero_divisor_search(const TableAlgebra<FieldElement>& alg,
                                                    const Budget& budget = {});

/// The rationals are not exhaustible; no search is attempted.
ZeroDivisorResult<Rational> zero_divisor_search(const TableAlgebra<Rational>& alg,
                                                const Budget& budget = {});

// --- norms over finite fields -------------------------------------------------

struct NormWitness {
  bool is_norm = false;
  FieldElement witness;  // top-field element with N(witness) = b, when is_norm
  bool always_norm = false;  // the norm map surjects onto the base units (verified)
};

/// Is b a norm from the top of the tower?  Exhaustive witness scan plus an
/// exhaustive surjectivity check.  b must be a nonzero base-field element.
NormWitness is_norm_finite(const Tower& tower, const FieldElement& b);

/// Degree of the extension generated by one root of x^m = a over F_q: the
/// least e >= 1 such that x^m = a has a solution in F_{q^e} (always <= m).
std::uint32_t norm_criterion_extension_degree(const FiniteField& field, std::uint32_t m,
                                              const FieldElement& a);

// --- quaternions over Q -------------------------------------------------------

/// Hilbert symbol (a, b)_v in {+1, -1}; v = 0 encodes the infinite place,
/// otherwise v is a prime.
int hilbert_symbol(long long a, long long b, long long v);

struct QuaternionVerdict {
  bool splits = false;
  long long a_reduced = 0, b_reduced = 0;  // squarefree parts
  std::vector<std::pair<long long, int>> local_symbols;  // (place, symbol); place 0 = infinity
  bool product_formula_ok = false;
};

/// Splitting of the rational quaternion algebra (a, b) by local symbols at
/// infinity, 2 and the odd primes dividing ab.  Splits iff every local
/// symbol is +1 iff b is a norm from Q(sqrt(a)).
QuaternionVerdict quaternion_splits_Q(long long a, long long b);

// --- the index chain for surfaces ---------------------------------------------

struct IndexFact {
  std::string subject;
  std::optional<std::uint64_t> value;
  std::vector<std::uint64_t> divisors;
  std::string note;

  /// Every asserted divisor divides the asserted value.
  bool consistent() const {
    if (!value) return true;
    for (auto d : divisors) {
      if (d == 0 || *value % d != 0) return false;
    }
    return true;
  }
};

struct Bs2Verdict {
  std::string branch;
  bool ruled = false;          // the configuration admits the claimed ruling
  bool contradiction = false;  // the hypothetical ruling refutes itself
  std::vector<IndexFact> facts;
  std::vector<std::string> deductions;
};

/// Replay of the ruled-iff-trivial dichotomy for a surface form of the
/// projective plane, as explicit index arithmetic over the three input
/// hypotheses: the surface is trivial; a ruling provides a rational map to a
/// genus-zero curve form; that curve form is trivial.
Bs2Verdict index_chain_bs_surface(bool surface_trivial, bool curve_exists, bool curve_trivial);

}  // namespace flagdescent::brauer
