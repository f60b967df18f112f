#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flagdescent/linalg.hpp"

namespace flagdescent::flags {

using fields::FiniteField;
using linalg::Decomposition;
using linalg::Matrix;
using linalg::Subspace;
using linalg::Vec;

/// The dimension type of a flag: ambient dimension n and a strictly
/// increasing list (d_1, ..., d_r) with 0 < d_1 and d_r < n.
class FlagSignature {
 public:
  FlagSignature(std::uint32_t ambient, std::vector<std::uint32_t> dims);

  std::uint32_t ambient() const { return ambient_; }
  const std::vector<std::uint32_t>& dims() const { return dims_; }
  std::uint32_t length() const { return std::uint32_t(dims_.size()); }

  bool operator==(const FlagSignature& rhs) const {
    return ambient_ == rhs.ambient_ && dims_ == rhs.dims_;
  }

  std::string to_string() const;

 private:
  std::uint32_t ambient_;
  std::vector<std::uint32_t> dims_;
};

/// A point of Fl(d, V): a strictly increasing chain of subspaces with the
/// signature's dimensions.  Containment is verified at construction.
class Flag {
 public:
  Flag(FlagSignature sig, std::vector<Subspace> chain);

  const FlagSignature& signature() const { return sig_; }
  const std::vector<Subspace>& chain() const { return chain_; }
  const Subspace& part(std::uint32_t i) const { return chain_[i]; }
  std::uint32_t length() const { return std::uint32_t(chain_.size()); }
  const FiniteField& field() const { return chain_.front().field(); }

  bool operator==(const Flag& rhs) const;
  bool operator!=(const Flag& rhs) const { return !(*this == rhs); }
  std::string storage_key() const;

  /// Fixture format: subspace blocks joined by ';', rows inside a block
  /// joined by '/', entries by ' ', coefficients by ','.
  std::string to_string() const;
  static Flag parse(const FlagSignature& sig, const FiniteField& field, const std::string& text);

 private:
  FlagSignature sig_;
  std::vector<Subspace> chain_;
};

/// A full signature split at n1 into a lower part inside V1 and an upper
/// part crossing V2: dims <= n1 go left, dims > n1 go right, so
/// d_p <= n1 < e_1 holds by construction.  Either part may be empty
/// (the two degenerate cases).
class SplitSignature {
 public:
  SplitSignature(FlagSignature full, std::uint32_t n1);

  const FlagSignature& full() const { return full_; }
  std::uint32_t n1() const { return n1_; }
  const std::vector<std::uint32_t>& lower() const { return lower_; }
  const std::vector<std::uint32_t>& upper() const { return upper_; }
  std::uint32_t p() const { return std::uint32_t(lower_.size()); }
  std::uint32_t q() const { return std::uint32_t(upper_.size()); }

 private:
  FlagSignature full_;
  std::uint32_t n1_;
  std::vector<std::uint32_t> lower_, upper_;
};

/// Number of d-dimensional subspaces of F_q^n:
/// prod_{i=0}^{d-1} (q^{n-i}-1)/(q^{d-i}-1).  Exact, overflow-checked.
std::uint64_t gaussian_binomial(std::uint32_t n, std::uint32_t d, std::uint64_t q);

/// Number of flags of the given signature over F_q (product of stepwise
/// Gaussian binomials).
std::uint64_t flag_count(const FlagSignature& sig, std::uint64_t q);
std::uint64_t chain_count(std::uint32_t ambient, const std::vector<std::uint32_t>& dims,
                          std::uint64_t q);

/// Restartable, indexable stream of all d-dimensional subspaces of F_q^n in
/// the canonical enumeration order: RREF pivot-column sets in lexicographic
/// order, then the free entries of the RREF pattern as a base-q odometer
/// (row-major cells, canonical element order, last cell fastest).  Each
/// subspace appears exactly once; size() equals the Gaussian binomial.
class SubspaceStream {
 public:
  SubspaceStream(FiniteField field, std::uint32_t n, std::uint32_t d, const Budget& budget = {});

  std::uint64_t size() const { return total_; }
  Subspace at(std::uint64_t index) const;

 private:
  struct Pattern {
    std::vector<std::uint32_t> pivots;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> free_cells;
    std::uint64_t count = 0;
    std::uint64_t offset = 0;
  };
  FiniteField field_;
  std::uint32_t n_, d_;
  std::vector<Pattern> patterns_;
  std::uint64_t total_ = 0;
};

/// All d-dimensional subspaces in canonical order, materialized.
std::vector<Subspace> enumerate_subspaces(const FiniteField& field, std::uint32_t n,
                                          std::uint32_t d, const Budget& budget = {});

/// All flags of the signature in canonical order (nested canonical subspace
/// enumeration, earlier chain members vary slowest).
std::vector<Flag> enumerate_flags(const FlagSignature& sig, const FiniteField& field,
                                  const Budget& budget = {});

/// Chains of the given dimensions inside an ambient-embedded subspace.  The
/// chain subspaces live in the full ambient space.  dims may be empty, in
/// which case the single empty chain is returned.
std::vector<std::vector<Subspace>> enumerate_chains_in(const Subspace& space,
                                                       const std::vector<std::uint32_t>& dims,
                                                       const Budget& budget = {});

/// Membership record for the complement loci of the open charts: A1 is
/// dim(Z_p cap V2) > 0 on the lower part, A2 is dim(W_1 cap V2) > e_1 - n_1
/// on the upper part, A is their union.  Absent parts contribute vacuously
/// false conditions.
struct SchubertRecord {
  std::uint32_t dim_zp_cap_v2 = 0;
  std::uint32_t dim_w1_cap_v2 = 0;
  bool in_a1 = false;
  bool in_a2 = false;
  bool in_a = false;
};

SchubertRecord schubert_membership(const Flag& flag, const Decomposition& d,
                                   const SplitSignature& split);

}  // namespace flagdescent::flags
