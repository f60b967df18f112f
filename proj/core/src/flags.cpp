#include "flagdescent/flags.hpp"

#include <algorithm>
#include <sstream>

namespace flagdescent::flags {

using linalg::QuotientChart;

// ---------------------------------------------------------------------------
// FlagSignature / Flag / SplitSignature

FlagSignature::FlagSignature(std::uint32_t ambient, std::vector<std::uint32_t> dims)
    : ambient_(ambient), dims_(std::move(dims)) {
  if (dims_.empty()) throw PreconditionError("signature must be nonempty");
  if (dims_.front() == 0) throw PreconditionError("signature dims must be positive");
  if (dims_.back() >= ambient_)
    throw PreconditionError("signature dims must be smaller than the ambient dimension");
  for (std::size_t i = 1; i < dims_.size(); ++i) {
    if (dims_[i] <= dims_[i - 1]) throw PreconditionError("signature dims must strictly increase");
  }
}

std::string FlagSignature::to_string() const {
  std::ostringstream os;
  os << "Fl(";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) os << '<';
    os << dims_[i];
  }
  os << "; n=" << ambient_ << ")";
  return os.str();
}

Flag::Flag(FlagSignature sig, std::vector<Subspace> chain)
    : sig_(std::move(sig)), chain_(std::move(chain)) {
  if (chain_.size() != sig_.dims().size()) throw PreconditionError("flag chain length mismatch");
  for (std::size_t i = 0; i < chain_.size(); ++i) {
    if (chain_[i].ambient() != sig_.ambient()) throw PreconditionError("flag ambient mismatch");
    if (chain_[i].dim() != sig_.dims()[i]) throw PreconditionError("flag member has wrong dimension");
    if (i > 0 && !chain_[i].contains(chain_[i - 1]))
      throw PreconditionError("flag members must be strictly increasing");
  }
}

bool Flag::operator==(const Flag& rhs) const {
  return sig_ == rhs.sig_ && chain_ == rhs.chain_;
}

std::string Flag::storage_key() const {
  std::string key;
  for (const auto& s : chain_) {
    key += s.storage_key();
    key += '|';
  }
  return key;
}

std::string Flag::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < chain_.size(); ++i) {
    if (i) out += ';';
    std::string block = chain_[i].to_string();
    std::replace(block.begin(), block.end(), ';', '/');
    out += block;
  }
  return out;
}

Flag Flag::parse(const FlagSignature& sig, const FiniteField& field, const std::string& text) {
  std::vector<Subspace> chain;
  std::istringstream in(text);
  std::string block;
  while (std::getline(in, block, ';')) {
    std::replace(block.begin(), block.end(), '/', ';');
    chain.push_back(Subspace::parse(field, sig.ambient(), block));
  }
  return Flag(sig, std::move(chain));
}

SplitSignature::SplitSignature(FlagSignature full, std::uint32_t n1)
    : full_(std::move(full)), n1_(n1) {
  if (n1 == 0 || n1 >= full_.ambient())
    throw PreconditionError("split index must leave both parts nonzero");
  for (auto d : full_.dims()) {
    if (d <= n1) {
      lower_.push_back(d);
    } else {
      upper_.push_back(d);
    }
  }
}

// ---------------------------------------------------------------------------
// Counting

std::uint64_t gaussian_binomial(std::uint32_t n, std::uint32_t d, std::uint64_t q) {
  if (d > n) throw PreconditionError("gaussian_binomial: d out of range");
  if (q < 2) throw PreconditionError("gaussian_binomial: q must be at least 2");
  // q-Pascal recurrence keeps everything integral: [n,d] = [n-1,d-1] + q^d [n-1,d].
  std::vector<std::uint64_t> row(d + 1, 0);
  row[0] = 1;
  auto mul_check = [](std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) throw std::overflow_error("gaussian_binomial overflow");
    return a * b;
  };
  for (std::uint32_t nn = 1; nn <= n; ++nn) {
    for (std::uint32_t dd = std::min(nn, d); dd >= 1; --dd) {
      std::uint64_t qd = 1;
      for (std::uint32_t i = 0; i < dd; ++i) qd = mul_check(qd, q);
      std::uint64_t t = mul_check(qd, row[dd]);
      if (row[dd - 1] > UINT64_MAX - t) throw std::overflow_error("gaussian_binomial overflow");
      row[dd] = row[dd - 1] + t;
    }
  }
  return row[d];
}

std::uint64_t chain_count(std::uint32_t ambient, const std::vector<std::uint32_t>& dims,
                          std::uint64_t q) {
  std::uint64_t total = 1;
  std::uint32_t prev = 0;
  for (auto d : dims) {
    std::uint64_t step = gaussian_binomial(ambient - prev, d - prev, q);
    if (step != 0 && total > UINT64_MAX / step) throw std::overflow_error("flag count overflow");
    total *= step;
    prev = d;
  }
  return total;
}

std::uint64_t flag_count(const FlagSignature& sig, std::uint64_t q) {
  return chain_count(sig.ambient(), sig.dims(), q);
}

// ---------------------------------------------------------------------------
// SubspaceStream

SubspaceStream::SubspaceStream(FiniteField field, std::uint32_t n, std::uint32_t d,
                               const Budget& budget)
    : field_(std::move(field)), n_(n), d_(d) {
  if (d > n) throw PreconditionError("subspace dimension exceeds ambient dimension");
  total_ = gaussian_binomial(n, d, field_.cardinality());
  budget.check_items(total_, "subspace enumeration");

  // Pivot sets in lexicographic order.
  std::vector<std::uint32_t> piv(d);
  for (std::uint32_t i = 0; i < d; ++i) piv[i] = i;
  const std::uint64_t q = field_.cardinality();
  std::uint64_t offset = 0;
  auto emit = [&](const std::vector<std::uint32_t>& pivots) {
    Pattern pat;
    pat.pivots = pivots;
    for (std::uint32_t i = 0; i < d; ++i) {
      for (std::uint32_t c = pivots[i] + 1; c < n; ++c) {
        if (!std::binary_search(pivots.begin(), pivots.end(), c)) pat.free_cells.emplace_back(i, c);
      }
    }
    pat.count = 1;
    for (std::size_t i = 0; i < pat.free_cells.size(); ++i) pat.count *= q;
    pat.offset = offset;
    offset += pat.count;
    patterns_.push_back(std::move(pat));
  };
  if (d == 0) {
    emit({});
  } else {
    while (true) {
      emit(piv);
      // next combination
      std::int32_t i = std::int32_t(d) - 1;
      while (i >= 0 && piv[std::size_t(i)] == n - d + std::uint32_t(i)) --i;
      if (i < 0) break;
      ++piv[std::size_t(i)];
      for (std::uint32_t j = std::uint32_t(i) + 1; j < d; ++j) piv[j] = piv[j - 1] + 1;
    }
  }
  if (offset != total_) throw Error("subspace stream count mismatch");  // cannot happen
}

Subspace SubspaceStream::at(std::uint64_t index) const {
  if (index >= total_) throw PreconditionError("subspace stream index out of range");
  // locate the pattern
  std::size_t lo = 0, hi = patterns_.size();
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (patterns_[mid].offset <= index) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Pattern& pat = patterns_[lo];
  std::uint64_t residual = index - pat.offset;
  Matrix m(field_, d_, n_);
  for (std::uint32_t i = 0; i < d_; ++i) m.set(i, pat.pivots[i], field_.one());
  const std::uint64_t q = field_.cardinality();
  for (std::size_t c = pat.free_cells.size(); c-- > 0;) {
    auto [ri, cj] = pat.free_cells[c];
    m.set(ri, cj, field_.element(std::uint32_t(residual % q)));
    residual /= q;
  }
  return Subspace(n_, m);
}

std::vector<Subspace> enumerate_subspaces(const FiniteField& field, std::uint32_t n,
                                          std::uint32_t d, const Budget& budget) {
  SubspaceStream stream(field, n, d, budget);
  std::vector<Subspace> out;
  out.reserve(stream.size());
  for (std::uint64_t i = 0; i < stream.size(); ++i) out.push_back(stream.at(i));
  return out;
}

// ---------------------------------------------------------------------------
// Flag / chain enumeration

namespace {

/// Subspaces of `space` (ambient-embedded) of inner dimension d, enumerated
/// canonically via coordinates in the RREF basis of `space`.
std::vector<Subspace> subspaces_inside(const Subspace& space, std::uint32_t d,
                                       const Budget& budget) {
  const FiniteField& f = space.field();
  const std::uint32_t m = space.dim();
  SubspaceStream inner(f, m, d, budget);
  std::vector<Subspace> out;
  out.reserve(inner.size());
  for (std::uint64_t i = 0; i < inner.size(); ++i) {
    Subspace s = inner.at(i);
    // rows (in coords) * basis = ambient rows
    out.push_back(Subspace(space.ambient(), s.basis() * space.basis()));
  }
  return out;
}

/// Subspaces of the ambient space of dimension `dim` containing Z, via the
/// quotient chart of full/Z.
std::vector<Subspace> superspaces(const Subspace& z, std::uint32_t dim, const Budget& budget) {
  const FiniteField& f = z.field();
  const std::uint32_t n = z.ambient();
  QuotientChart chart(Subspace::full(f, n), z);
  SubspaceStream inner(f, chart.quotient_dim(), dim - z.dim(), budget);
  std::vector<Subspace> out;
  out.reserve(inner.size());
  for (std::uint64_t i = 0; i < inner.size(); ++i) {
    Subspace s = inner.at(i);
    std::vector<Vec> rows;
    for (std::uint32_t r = 0; r < s.dim(); ++r) rows.push_back(chart.lift(s.basis().row(r)));
    for (std::uint32_t r = 0; r < z.dim(); ++r) rows.push_back(z.basis().row(r));
    out.push_back(Subspace::span(f, n, rows));
  }
  return out;
}

void extend_chains(const FiniteField& field, std::uint32_t ambient,
                   const std::vector<std::uint32_t>& dims, std::size_t level,
                   std::vector<Subspace>& prefix, std::vector<std::vector<Subspace>>& out,
                   const Budget& budget) {
  if (level == dims.size()) {
    out.push_back(prefix);
    return;
  }
  std::vector<Subspace> step =
      (level == 0) ? enumerate_subspaces(field, ambient, dims[0], budget)
                   : superspaces(prefix.back(), dims[level], budget);
  for (auto& s : step) {
    prefix.push_back(std::move(s));
    extend_chains(field, ambient, dims, level + 1, prefix, out, budget);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Flag> enumerate_flags(const FlagSignature& sig, const FiniteField& field,
                                  const Budget& budget) {
  budget.check_items(flag_count(sig, field.cardinality()), "flag enumeration");
  std::vector<std::vector<Subspace>> chains;
  std::vector<Subspace> prefix;
  extend_chains(field, sig.ambient(), sig.dims(), 0, prefix, chains, budget);
  std::vector<Flag> out;
  out.reserve(chains.size());
  for (auto& c : chains) out.emplace_back(sig, std::move(c));
  return out;
}

namespace {

void extend_chains_in(const Subspace& space, const std::vector<std::uint32_t>& dims,
                      std::size_t level, std::vector<Subspace>& prefix,
                      std::vector<std::vector<Subspace>>& out, const Budget& budget) {
  if (level == dims.size()) {
    out.push_back(prefix);
    return;
  }
  std::vector<Subspace> step;
  if (level == 0) {
    step = subspaces_inside(space, dims[0], budget);
  } else {
    // superspaces of prefix.back() inside `space`, via the chart of space/Z
    const Subspace& z = prefix.back();
    QuotientChart chart(space, z);
    SubspaceStream inner(space.field(), chart.quotient_dim(), dims[level] - z.dim(), budget);
    step.reserve(inner.size());
    for (std::uint64_t i = 0; i < inner.size(); ++i) {
      Subspace s = inner.at(i);
      std::vector<Vec> rows;
      for (std::uint32_t r = 0; r < s.dim(); ++r) rows.push_back(chart.lift(s.basis().row(r)));
      for (std::uint32_t r = 0; r < z.dim(); ++r) rows.push_back(z.basis().row(r));
      step.push_back(Subspace::span(space.field(), space.ambient(), rows));
    }
  }
  for (auto& s : step) {
    prefix.push_back(std::move(s));
    extend_chains_in(space, dims, level + 1, prefix, out, budget);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<std::vector<Subspace>> enumerate_chains_in(const Subspace& space,
                                                       const std::vector<std::uint32_t>& dims,
                                                       const Budget& budget) {
  if (dims.empty()) return {{}};
  budget.check_items(chain_count(space.dim(), dims, space.field().cardinality()),
                     "chain enumeration");
  std::vector<std::vector<Subspace>> out;
  std::vector<Subspace> prefix;
  extend_chains_in(space, dims, 0, prefix, out, budget);
  return out;
}

// ---------------------------------------------------------------------------
// Schubert membership

SchubertRecord schubert_membership(const Flag& flag, const Decomposition& d,
                                   const SplitSignature& split) {
  if (!(flag.signature() == split.full())) throw PreconditionError("flag signature mismatch");
  if (d.n() != split.full().ambient() || d.n1() != split.n1())
    throw PreconditionError("decomposition does not match the split");
  SchubertRecord rec;
  const std::uint32_t p = split.p();
  const std::uint32_t q = split.q();
  if (p > 0) {
    const Subspace& zp = flag.part(p - 1);
    rec.dim_zp_cap_v2 = intersect(zp, d.v2()).dim();
    rec.in_a1 = rec.dim_zp_cap_v2 > 0;
  }
  if (q > 0) {
    const Subspace& w1 = flag.part(p);
    rec.dim_w1_cap_v2 = intersect(w1, d.v2()).dim();
    rec.in_a2 = rec.dim_w1_cap_v2 > split.upper()[0] - split.n1();
  }
  rec.in_a = rec.in_a1 || rec.in_a2;
  return rec;
}

}  // namespace flagdescent::flags
