#include "flagdescent/linalg.hpp"

#include <algorithm>
#include <sstream>

namespace flagdescent::linalg {

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(FiniteField field, std::uint32_t rows, std::uint32_t cols)
    : field_(std::move(field)), rows_(rows), cols_(cols),
      entries_(std::size_t(rows) * cols, field_.zero()) {}

Matrix Matrix::identity(const FiniteField& field, std::uint32_t n) {
  Matrix m(field, n, n);
  for (std::uint32_t i = 0; i < n; ++i) m.set(i, i, field.one());
  return m;
}

Matrix Matrix::from_rows(const FiniteField& field, const std::vector<Vec>& rows) {
  std::uint32_t r = std::uint32_t(rows.size());
  std::uint32_t c = r ? std::uint32_t(rows[0].size()) : 0;
  Matrix m(field, r, c);
  for (std::uint32_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw PreconditionError("ragged rows");
    for (std::uint32_t j = 0; j < c; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

Matrix Matrix::diagonal(const FiniteField& field, const Vec& entries) {
  Matrix m(field, std::uint32_t(entries.size()), std::uint32_t(entries.size()));
  for (std::uint32_t i = 0; i < entries.size(); ++i) m.set(i, i, entries[i]);
  return m;
}

const FieldElement& Matrix::at(std::uint32_t i, std::uint32_t j) const {
  return entries_[std::size_t(i) * cols_ + j];
}

void Matrix::set(std::uint32_t i, std::uint32_t j, const FieldElement& v) {
  if (!(v.field() == field_)) throw PreconditionError("entry from a different field");
  entries_[std::size_t(i) * cols_ + j] = v;
}

Vec Matrix::row(std::uint32_t i) const {
  return Vec(entries_.begin() + std::size_t(i) * cols_, entries_.begin() + std::size_t(i + 1) * cols_);
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw PreconditionError("matrix shape mismatch in product");
  Matrix out(field_, rows_, rhs.cols_);
  for (std::uint32_t i = 0; i < rows_; ++i) {
    for (std::uint32_t k = 0; k < cols_; ++k) {
      const FieldElement& a = at(i, k);
      if (a.is_zero()) continue;
      for (std::uint32_t j = 0; j < rhs.cols_; ++j) {
        out.set(i, j, out.at(i, j) + a * rhs.at(k, j));
      }
    }
  }
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw PreconditionError("matrix shape mismatch");
  Matrix out(field_, rows_, cols_);
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i] + rhs.entries_[i];
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw PreconditionError("matrix shape mismatch");
  Matrix out(field_, rows_, cols_);
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i] - rhs.entries_[i];
  return out;
}

Matrix Matrix::scaled(const FieldElement& s) const {
  Matrix out(field_, rows_, cols_);
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i] * s;
  return out;
}

Vec Matrix::apply(const Vec& v) const {
  if (v.size() != cols_) throw PreconditionError("vector length mismatch");
  Vec out(rows_, field_.zero());
  for (std::uint32_t i = 0; i < rows_; ++i) {
    FieldElement acc = field_.zero();
    for (std::uint32_t j = 0; j < cols_; ++j) acc = acc + at(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

Matrix Matrix::transpose() const {
  Matrix out(field_, cols_, rows_);
  for (std::uint32_t i = 0; i < rows_; ++i)
    for (std::uint32_t j = 0; j < cols_; ++j) out.set(j, i, at(i, j));
  return out;
}

Matrix Matrix::pow(std::uint64_t e) const {
  if (rows_ != cols_) throw PreconditionError("pow of a non-square matrix");
  Matrix result = identity(field_, rows_);
  Matrix base = *this;
  while (e) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

bool Matrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const FieldElement& x) { return x.is_zero(); });
}

Matrix Matrix::map_entries(const FieldAutomorphism& sigma) const {
  Matrix out(field_, rows_, cols_);
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = sigma(entries_[i]);
  return out;
}

std::optional<FieldElement> Matrix::proportionality(const Matrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) return std::nullopt;
  std::optional<FieldElement> scale;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const bool za = entries_[i].is_zero(), zb = other.entries_[i].is_zero();
    if (za != zb) return std::nullopt;
    if (za) continue;
    FieldElement s = entries_[i] * other.entries_[i].inverse();
    if (!scale) {
      scale = s;
    } else if (!(*scale == s)) {
      return std::nullopt;
    }
  }
  if (!scale) return field_.one();  // both zero matrices
  return scale;
}

Matrix Matrix::stack(const Matrix& top, const Matrix& bottom) {
  if (top.cols_ != bottom.cols_) throw PreconditionError("stack: column mismatch");
  Matrix out(top.field_, top.rows_ + bottom.rows_, top.cols_);
  for (std::uint32_t i = 0; i < top.rows_; ++i)
    for (std::uint32_t j = 0; j < top.cols_; ++j) out.set(i, j, top.at(i, j));
  for (std::uint32_t i = 0; i < bottom.rows_; ++i)
    for (std::uint32_t j = 0; j < top.cols_; ++j) out.set(top.rows_ + i, j, bottom.at(i, j));
  return out;
}

Matrix Matrix::row_slice(std::uint32_t r0, std::uint32_t r1) const {
  Matrix out(field_, r1 - r0, cols_);
  for (std::uint32_t i = r0; i < r1; ++i)
    for (std::uint32_t j = 0; j < cols_; ++j) out.set(i - r0, j, at(i, j));
  return out;
}

bool Matrix::operator==(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (!(entries_[i] == rhs.entries_[i])) return false;
  return true;
}

std::string Matrix::to_string() const {
  std::ostringstream os;
  for (std::uint32_t i = 0; i < rows_; ++i) {
    if (i) os << ';';
    for (std::uint32_t j = 0; j < cols_; ++j) {
      if (j) os << ' ';
      os << at(i, j).to_string();
    }
  }
  return os.str();
}

Matrix Matrix::parse(const FiniteField& field, const std::string& text) {
  std::vector<Vec> rows;
  std::istringstream rs(text);
  std::string rowtext;
  while (std::getline(rs, rowtext, ';')) {
    Vec r;
    std::istringstream es(rowtext);
    std::string ent;
    while (es >> ent) r.push_back(FieldElement::parse(field, ent));
    rows.push_back(std::move(r));
  }
  return from_rows(field, rows);
}

// ---------------------------------------------------------------------------
// Elimination

RrefResult rref(const Matrix& m) {
  Matrix a = m;
  const std::uint32_t rows = a.rows(), cols = a.cols();
  std::vector<std::uint32_t> pivots;
  std::uint32_t r = 0;
  for (std::uint32_t c = 0; c < cols && r < rows; ++c) {
    std::uint32_t pr = rows;
    for (std::uint32_t i = r; i < rows; ++i) {
      if (!a.at(i, c).is_zero()) {
        pr = i;
        break;
      }
    }
    if (pr == rows) continue;
    if (pr != r) {
      for (std::uint32_t j = 0; j < cols; ++j) {
        FieldElement tmp = a.at(r, j);
        a.set(r, j, a.at(pr, j));
        a.set(pr, j, tmp);
      }
    }
    FieldElement inv = a.at(r, c).inverse();
    for (std::uint32_t j = c; j < cols; ++j) a.set(r, j, a.at(r, j) * inv);
    for (std::uint32_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      FieldElement f = a.at(i, c);
      if (f.is_zero()) continue;
      for (std::uint32_t j = c; j < cols; ++j) a.set(i, j, a.at(i, j) - f * a.at(r, j));
    }
    pivots.push_back(c);
    ++r;
  }
  return RrefResult{std::move(a), r, std::move(pivots)};
}

Matrix kernel(const Matrix& m) {
  RrefResult rr = rref(m);
  const std::uint32_t cols = m.cols();
  std::vector<std::uint32_t> free_cols;
  for (std::uint32_t c = 0, pi = 0; c < cols; ++c) {
    if (pi < rr.pivots.size() && rr.pivots[pi] == c) {
      ++pi;
    } else {
      free_cols.push_back(c);
    }
  }
  Matrix out(m.field(), std::uint32_t(free_cols.size()), cols);
  for (std::uint32_t bi = 0; bi < free_cols.size(); ++bi) {
    std::uint32_t fc = free_cols[bi];
    out.set(bi, fc, m.field().one());
    for (std::uint32_t i = 0; i < rr.pivots.size(); ++i) {
      out.set(bi, rr.pivots[i], -rr.matrix.at(i, fc));
    }
  }
  return rref(out).matrix.row_slice(0, out.rows());  // canonical order of basis rows
}

std::optional<Vec> solve(const Matrix& a, const Vec& b) {
  if (b.size() != a.rows()) throw PreconditionError("solve: size mismatch");
  Matrix aug(a.field(), a.rows(), a.cols() + 1);
  for (std::uint32_t i = 0; i < a.rows(); ++i) {
    for (std::uint32_t j = 0; j < a.cols(); ++j) aug.set(i, j, a.at(i, j));
    aug.set(i, a.cols(), b[i]);
  }
  RrefResult rr = rref(aug);
  Vec x(a.cols(), a.field().zero());
  for (std::uint32_t i = 0; i < rr.pivots.size(); ++i) {
    if (rr.pivots[i] == a.cols()) return std::nullopt;  // 0 = 1 row: inconsistent
    x[rr.pivots[i]] = rr.matrix.at(i, a.cols());
  }
  return x;
}

Matrix Matrix::inverse() const {
  if (rows_ != cols_) throw PreconditionError("inverse of a non-square matrix");
  Matrix aug(field_, rows_, 2 * cols_);
  for (std::uint32_t i = 0; i < rows_; ++i) {
    for (std::uint32_t j = 0; j < cols_; ++j) aug.set(i, j, at(i, j));
    aug.set(i, cols_ + i, field_.one());
  }
  RrefResult rr = rref(aug);
  if (rr.rank != rows_) throw PreconditionError("matrix is singular");
  for (std::uint32_t i = 0; i < rr.pivots.size(); ++i) {
    if (rr.pivots[i] != i) throw PreconditionError("matrix is singular");
  }
  return rr.matrix.transpose().row_slice(cols_, 2 * cols_).transpose();
}

bool Matrix::is_invertible() const {
  if (rows_ != cols_) return false;
  return rref(*this).rank == rows_;
}

// ---------------------------------------------------------------------------
// Subspace

Subspace::Subspace(std::uint32_t ambient, const Matrix& spanning_rows) : ambient_(ambient) {
  if (spanning_rows.cols() != ambient && spanning_rows.rows() != 0)
    throw PreconditionError("spanning rows have wrong ambient dimension");
  RrefResult rr = rref(spanning_rows);
  basis_ = rr.matrix.row_slice(0, rr.rank);
  if (spanning_rows.rows() == 0) basis_ = Matrix(spanning_rows.field(), 0, ambient);
  pivots_ = std::move(rr.pivots);
}

Subspace Subspace::zero(const FiniteField& field, std::uint32_t n) {
  return Subspace(n, Matrix(field, 0, n));
}

Subspace Subspace::full(const FiniteField& field, std::uint32_t n) {
  return Subspace(n, Matrix::identity(field, n));
}

Subspace Subspace::span(const FiniteField& field, std::uint32_t n, const std::vector<Vec>& vectors) {
  if (vectors.empty()) return zero(field, n);
  return Subspace(n, Matrix::from_rows(field, vectors));
}

bool Subspace::contains(const Vec& v) const {
  // v is in the row span iff reducing v by the RREF basis leaves zero.
  Vec r = v;
  for (std::uint32_t i = 0; i < basis_.rows(); ++i) {
    const FieldElement c = r[pivots_[i]];  // copy: the reduction overwrites this slot
    if (c.is_zero()) continue;
    for (std::uint32_t j = 0; j < ambient_; ++j) r[j] = r[j] - c * basis_.at(i, j);
  }
  return std::all_of(r.begin(), r.end(), [](const FieldElement& x) { return x.is_zero(); });
}

bool Subspace::contains(const Subspace& other) const {
  for (std::uint32_t i = 0; i < other.dim(); ++i) {
    if (!contains(other.basis_.row(i))) return false;
  }
  return true;
}

bool Subspace::operator==(const Subspace& rhs) const {
  return ambient_ == rhs.ambient_ && basis_ == rhs.basis_;
}

std::strong_ordering Subspace::operator<=>(const Subspace& rhs) const {
  if (auto c = ambient_ <=> rhs.ambient_; c != 0) return c;
  if (auto c = dim() <=> rhs.dim(); c != 0) return c;
  for (std::uint32_t i = 0; i < dim(); ++i) {
    for (std::uint32_t j = 0; j < ambient_; ++j) {
      if (auto c = basis_.at(i, j).index() <=> rhs.basis_.at(i, j).index(); c != 0) return c;
    }
  }
  return std::strong_ordering::equal;
}

std::string Subspace::storage_key() const {
  std::string key;
  key.reserve(std::size_t(dim()) * ambient_ * 4 + 8);
  key += std::to_string(ambient_);
  key += '#';
  for (std::uint32_t i = 0; i < dim(); ++i) {
    for (std::uint32_t j = 0; j < ambient_; ++j) {
      key += std::to_string(basis_.at(i, j).index());
      key += ',';
    }
  }
  return key;
}

Subspace Subspace::parse(const FiniteField& field, std::uint32_t n, const std::string& text) {
  if (text.empty()) return zero(field, n);
  return Subspace(n, Matrix::parse(field, text));
}

Subspace sum(const Subspace& u, const Subspace& w) {
  if (u.ambient() != w.ambient()) throw PreconditionError("sum: ambient mismatch");
  return Subspace(u.ambient(), Matrix::stack(u.basis(), w.basis()));
}

Subspace intersect(const Subspace& u, const Subspace& w) {
  if (u.ambient() != w.ambient()) throw PreconditionError("intersect: ambient mismatch");
  if (u.dim() == 0 || w.dim() == 0) return Subspace::zero(u.field(), u.ambient());
  // Left kernel of stack(U, W): coefficients (x, y) with x U + y W = 0 give
  // intersection vectors x U.
  Matrix stacked = Matrix::stack(u.basis(), w.basis());
  Matrix left = kernel(stacked.transpose());
  std::vector<Vec> vecs;
  for (std::uint32_t i = 0; i < left.rows(); ++i) {
    Vec coeff = left.row(i);
    Vec v(u.ambient(), u.field().zero());
    for (std::uint32_t r = 0; r < u.dim(); ++r) {
      if (coeff[r].is_zero()) continue;
      for (std::uint32_t j = 0; j < u.ambient(); ++j) {
        v[j] = v[j] + coeff[r] * u.basis().at(r, j);
      }
    }
    vecs.push_back(std::move(v));
  }
  return Subspace::span(u.field(), u.ambient(), vecs);
}

Subspace annihilator(const Subspace& u) {
  if (u.dim() == 0) return Subspace::full(u.field(), u.ambient());
  return Subspace(u.ambient(), kernel(u.basis()));
}

Subspace apply(const Matrix& m, const Subspace& u) {
  // rows r -> (m r^T)^T, i.e. basis * m^T
  return Subspace(u.ambient(), u.basis() * m.transpose());
}

// ---------------------------------------------------------------------------
// Decomposition

Decomposition::Decomposition(const Subspace& v1, const Subspace& v2) : v1_(v1), v2_(v2) {
  if (v1.ambient() != v2.ambient()) throw PreconditionError("decomposition: ambient mismatch");
  if (v1.dim() == 0 || v2.dim() == 0) throw PreconditionError("decomposition parts must be nonzero");
  if (v1.dim() + v2.dim() != v1.ambient())
    throw PreconditionError("decomposition dims must sum to the ambient dimension");
  if (intersect(v1, v2).dim() != 0) throw PreconditionError("decomposition parts must intersect trivially");
  basis_ = Matrix::stack(v1.basis(), v2.basis());
  coord_matrix_ = basis_.transpose().inverse();
}

Decomposition Decomposition::from_basis(const Matrix& basis_rows, std::uint32_t n1) {
  if (basis_rows.rows() != basis_rows.cols()) throw PreconditionError("basis must be square");
  std::uint32_t n = basis_rows.rows();
  if (n1 == 0 || n1 >= n) throw PreconditionError("decomposition parts must be nonzero");
  Subspace v1(n, basis_rows.row_slice(0, n1));
  Subspace v2(n, basis_rows.row_slice(n1, n));
  if (v1.dim() != n1 || v2.dim() != n - n1) throw PreconditionError("basis rows are dependent");
  Decomposition d(v1, v2);
  d.basis_ = basis_rows;
  d.coord_matrix_ = basis_rows.transpose().inverse();
  return d;
}

Vec Decomposition::coordinates(const Vec& v) const { return coord_matrix_.apply(v); }

Vec Decomposition::from_coordinates(const Vec& x) const { return basis_.transpose().apply(x); }

Vec Decomposition::project1(const Vec& v) const {
  Vec x = coordinates(v);
  const FiniteField& f = basis_.field();
  for (std::uint32_t i = n1(); i < n(); ++i) x[i] = f.zero();
  return from_coordinates(x);
}

Vec Decomposition::project2(const Vec& v) const {
  Vec x = coordinates(v);
  const FiniteField& f = basis_.field();
  for (std::uint32_t i = 0; i < n1(); ++i) x[i] = f.zero();
  return from_coordinates(x);
}

Subspace project_along(const Subspace& z, const Decomposition& d) {
  if (z.ambient() != d.n()) throw PreconditionError("project_along: ambient mismatch");
  std::vector<Vec> images;
  for (std::uint32_t i = 0; i < z.dim(); ++i) images.push_back(d.project1(z.basis().row(i)));
  return Subspace::span(z.field(), z.ambient(), images);
}

// ---------------------------------------------------------------------------
// SemilinearMap

SemilinearMap::SemilinearMap(FieldAutomorphism sigma, Matrix c)
    : sigma_(std::move(sigma)), c_(std::move(c)) {
  if (!(c_.field() == sigma_.top())) throw PreconditionError("matrix not over the automorphism's field");
  if (c_.rows() != c_.cols() || !c_.is_invertible())
    throw PreconditionError("semilinear map requires an invertible matrix");
}

Vec SemilinearMap::apply(const Vec& v) const {
  Vec s(v.size(), c_.field().zero());
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = sigma_(v[i]);
  return c_.apply(s);
}

Subspace SemilinearMap::apply(const Subspace& u) const {
  std::vector<Vec> images;
  for (std::uint32_t i = 0; i < u.dim(); ++i) images.push_back(apply(u.basis().row(i)));
  return Subspace::span(u.field(), u.ambient(), images);
}

SemilinearMap SemilinearMap::compose(const SemilinearMap& inner) const {
  return SemilinearMap(sigma_.compose(inner.sigma_), c_ * inner.c_.map_entries(sigma_));
}

SemilinearMap SemilinearMap::inverse() const {
  FieldAutomorphism si = sigma_.inverse();
  return SemilinearMap(si, c_.inverse().map_entries(si));
}

Subspace semilinear_apply(const SemilinearMap& s, const Subspace& u) { return s.apply(u); }

SemilinearMap semilinear_compose(const SemilinearMap& s, const SemilinearMap& t) {
  return s.compose(t);
}

// ---------------------------------------------------------------------------
// QuotientChart

QuotientChart::QuotientChart(Subspace ambient_sub, Subspace sub)
    : w2_(std::move(ambient_sub)), t1_(std::move(sub)) {
  if (!w2_.contains(t1_)) throw PreconditionError("quotient chart: sub not contained in space");
  const std::uint32_t m = w2_.dim();
  // T1 basis rows in W2 coordinates: entries of each row at W2's pivot columns.
  Matrix tw(w2_.field(), t1_.dim(), m);
  for (std::uint32_t i = 0; i < t1_.dim(); ++i) {
    for (std::uint32_t j = 0; j < m; ++j) tw.set(i, j, t1_.basis().at(i, w2_.pivots()[j]));
  }
  RrefResult rr = rref(tw);
  t1_in_w2_ = rr.matrix.row_slice(0, rr.rank);
  t1_pivots_ = rr.pivots;
  for (std::uint32_t c = 0, pi = 0; c < m; ++c) {
    if (pi < t1_pivots_.size() && t1_pivots_[pi] == c) {
      ++pi;
    } else {
      transversal_.push_back(c);
      transversal_std_.push_back(w2_.pivots()[c]);
    }
  }
}

Vec QuotientChart::to_quotient(const Vec& v) const {
  if (!w2_.contains(v)) throw PreconditionError("vector not in the chart's space");
  const std::uint32_t m = w2_.dim();
  // W2 coordinates = entries at W2's pivot columns (RREF basis).
  Vec x(m, w2_.field().zero());
  for (std::uint32_t j = 0; j < m; ++j) x[j] = v[w2_.pivots()[j]];
  // Reduce modulo T1.
  for (std::uint32_t i = 0; i < t1_in_w2_.rows(); ++i) {
    const FieldElement c = x[t1_pivots_[i]];
    if (c.is_zero()) continue;
    for (std::uint32_t j = 0; j < m; ++j) x[j] = x[j] - c * t1_in_w2_.at(i, j);
  }
  Vec q;
  q.reserve(transversal_.size());
  for (auto c : transversal_) q.push_back(x[c]);
  return q;
}

Vec QuotientChart::lift(const Vec& quotient_coords) const {
  if (quotient_coords.size() != transversal_.size())
    throw PreconditionError("quotient coordinate length mismatch");
  const std::uint32_t m = w2_.dim();
  Vec x(m, w2_.field().zero());
  for (std::size_t i = 0; i < transversal_.size(); ++i) x[transversal_[i]] = quotient_coords[i];
  Vec v(w2_.ambient(), w2_.field().zero());
  for (std::uint32_t r = 0; r < m; ++r) {
    if (x[r].is_zero()) continue;
    for (std::uint32_t j = 0; j < w2_.ambient(); ++j) {
      v[j] = v[j] + x[r] * w2_.basis().at(r, j);
    }
  }
  return v;
}

}  // namespace flagdescent::linalg
