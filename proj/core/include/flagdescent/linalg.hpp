#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flagdescent/fields.hpp"

namespace flagdescent::linalg {

using fields::FieldAutomorphism;
using fields::FieldElement;
using fields::FiniteField;

/// Coordinate column vector.  Matrices act on the left: w = M v.
using Vec = std::vector<FieldElement>;

/// Dense matrix over a FiniteField.  Immutable in spirit: operations return
/// new values; set() exists for construction code only.
class Matrix {
 public:
  Matrix() = default;
  Matrix(FiniteField field, std::uint32_t rows, std::uint32_t cols);

  static Matrix identity(const FiniteField& field, std::uint32_t n);
  static Matrix from_rows(const FiniteField& field, const std::vector<Vec>& rows);
  static Matrix diagonal(const FiniteField& field, const Vec& entries);

  const FiniteField& field() const { return field_; }
  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }

  const FieldElement& at(std::uint32_t i, std::uint32_t j) const;
  void set(std::uint32_t i, std::uint32_t j, const FieldElement& v);
  Vec row(std::uint32_t i) const;

  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix scaled(const FieldElement& s) const;
  Vec apply(const Vec& v) const;
  Matrix transpose() const;
  Matrix pow(std::uint64_t e) const;
  Matrix inverse() const;  // throws PreconditionError if singular
  bool is_invertible() const;
  bool is_zero() const;

  /// Applies a field automorphism to every entry.
  Matrix map_entries(const FieldAutomorphism& sigma) const;

  /// If this == s * other for a nonzero scalar s, returns s.
  std::optional<FieldElement> proportionality(const Matrix& other) const;

  /// Stacks the rows of two matrices with equal column counts.
  static Matrix stack(const Matrix& top, const Matrix& bottom);
  /// Rows [r0, r1) as a new matrix.
  Matrix row_slice(std::uint32_t r0, std::uint32_t r1) const;

  bool operator==(const Matrix& rhs) const;
  bool operator!=(const Matrix& rhs) const { return !(*this == rhs); }

  /// Text format: rows separated by ';', entries separated by ' ', each entry
  /// a comma-separated coefficient list.  "1 0;0 1" over F_2, "1,1 0,0" over F_4.
  std::string to_string() const;
  static Matrix parse(const FiniteField& field, const std::string& text);

 private:
  FiniteField field_;
  std::uint32_t rows_ = 0, cols_ = 0;
  std::vector<FieldElement> entries_;
};

struct RrefResult {
  Matrix matrix;                      // full RREF, zero rows kept
  std::uint32_t rank = 0;
  std::vector<std::uint32_t> pivots;  // pivot column per nonzero row
};

/// Unique reduced row echelon form.
RrefResult rref(const Matrix& m);

/// Basis of the right null space {x : M x = 0}, rows in RREF.
Matrix kernel(const Matrix& m);

/// One solution of A x = b, if the system is consistent.
std::optional<Vec> solve(const Matrix& a, const Vec& b);

/// A linear subspace of F^n in canonical form: the basis matrix is the RREF
/// of any spanning set, with zero rows dropped.  Two Subspaces are equal iff
/// their representations are identical, so set-level statements are testable
/// verbatim.
class Subspace {
 public:
  /// Canonicalizes the row span of `spanning_rows` (need not be independent).
  Subspace(std::uint32_t ambient, const Matrix& spanning_rows);

  static Subspace zero(const FiniteField& field, std::uint32_t n);
  static Subspace full(const FiniteField& field, std::uint32_t n);
  static Subspace span(const FiniteField& field, std::uint32_t n, const std::vector<Vec>& vectors);

  const FiniteField& field() const { return basis_.field(); }
  std::uint32_t ambient() const { return ambient_; }
  std::uint32_t dim() const { return basis_.rows(); }
  /// RREF basis, one row per basis vector, no zero rows.
  const Matrix& basis() const { return basis_; }
  const std::vector<std::uint32_t>& pivots() const { return pivots_; }

  bool contains(const Vec& v) const;
  bool contains(const Subspace& other) const;
  bool operator==(const Subspace& rhs) const;
  bool operator!=(const Subspace& rhs) const { return !(*this == rhs); }
  std::strong_ordering operator<=>(const Subspace& rhs) const;

  /// Compact representation key (for hashing and dedup).
  std::string storage_key() const;
  std::string to_string() const { return basis_.to_string(); }
  static Subspace parse(const FiniteField& field, std::uint32_t n, const std::string& text);

 private:
  std::uint32_t ambient_ = 0;
  Matrix basis_;
  std::vector<std::uint32_t> pivots_;
};

Subspace sum(const Subspace& u, const Subspace& w);
Subspace intersect(const Subspace& u, const Subspace& w);

/// Annihilator U^perp = {x : <r, x> = 0 for every basis row r of U} under the
/// standard pairing; identifies the dual of F^n with F^n itself.
Subspace annihilator(const Subspace& u);

/// Image of a subspace under v -> M v.
Subspace apply(const Matrix& m, const Subspace& u);

/// An ordered direct sum decomposition V = V1 + V2 with a chosen basis whose
/// first n1 rows span V1 and last n2 rows span V2.
class Decomposition {
 public:
  /// Basis = stacked RREF bases of v1 and v2.
  Decomposition(const Subspace& v1, const Subspace& v2);
  /// Arbitrary invertible basis matrix (rows are basis vectors).
  static Decomposition from_basis(const Matrix& basis_rows, std::uint32_t n1);

  const Subspace& v1() const { return v1_; }
  const Subspace& v2() const { return v2_; }
  const Matrix& basis() const { return basis_; }
  std::uint32_t n() const { return basis_.rows(); }
  std::uint32_t n1() const { return v1_.dim(); }
  std::uint32_t n2() const { return v2_.dim(); }

  /// Coordinates x of v in the basis rows: v = sum x_i b_i.
  Vec coordinates(const Vec& v) const;
  Vec from_coordinates(const Vec& x) const;
  /// Projection onto V1 along V2 (result in ambient coordinates).
  Vec project1(const Vec& v) const;
  /// Projection onto V2 along V1.
  Vec project2(const Vec& v) const;

 private:
  Subspace v1_, v2_;
  Matrix basis_;
  Matrix coord_matrix_;  // (basis^T)^{-1}, so coordinates(v) = coord_matrix * v
};

/// Image of Z under the projection V -> V1 along V2, embedded back into the
/// ambient space (the result is a subspace of V1 in the same F^n).
Subspace project_along(const Subspace& z, const Decomposition& d);

/// A sigma-semilinear bijection v -> c * sigma(v); additive, and
/// map(alpha v) = sigma(alpha) map(v).
class SemilinearMap {
 public:
  SemilinearMap(FieldAutomorphism sigma, Matrix c);  // c must be invertible

  const FieldAutomorphism& automorphism() const { return sigma_; }
  const Matrix& matrix() const { return c_; }
  bool is_linear() const { return sigma_.is_identity(); }

  Vec apply(const Vec& v) const;
  Subspace apply(const Subspace& u) const;

  /// this after inner: (c_s sigma_s(c_t), sigma_s sigma_t).
  SemilinearMap compose(const SemilinearMap& inner) const;
  SemilinearMap inverse() const;

 private:
  FieldAutomorphism sigma_;
  Matrix c_;
};

Subspace semilinear_apply(const SemilinearMap& s, const Subspace& u);
SemilinearMap semilinear_compose(const SemilinearMap& s, const SemilinearMap& t);

/// Coordinates for the quotient W2 / T1.  The chart reads off the entries of
/// the T1-reduced vector at the transversal standard coordinates, which are
/// the non-pivot columns of T1's RREF written in W2's pivot coordinates.  The
/// chart map is surjective with kernel exactly T1; lift() is the canonical
/// section with zeros at the pivot coordinates.
class QuotientChart {
 public:
  QuotientChart(Subspace ambient_sub, Subspace sub);

  const Subspace& space() const { return w2_; }
  const Subspace& kernel_space() const { return t1_; }
  std::uint32_t quotient_dim() const { return std::uint32_t(transversal_std_.size()); }
  /// Ambient standard-coordinate indices carrying the quotient coordinates.
  const std::vector<std::uint32_t>& transversal() const { return transversal_std_; }

  Vec to_quotient(const Vec& v) const;  // v must lie in W2
  Vec lift(const Vec& quotient_coords) const;

 private:
  Subspace w2_, t1_;
  Matrix t1_in_w2_;                          // T1 basis in W2 coordinates, RREF
  std::vector<std::uint32_t> t1_pivots_;     // pivots of t1_in_w2_ (internal indices)
  std::vector<std::uint32_t> transversal_;   // internal (W2-coordinate) indices
  std::vector<std::uint32_t> transversal_std_;
};

}  // namespace flagdescent::linalg
