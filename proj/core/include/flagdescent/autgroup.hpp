#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "flagdescent/flags.hpp"

namespace flagdescent::autgroup {

using fields::FieldAutomorphism;
using fields::FieldElement;
using fields::FiniteField;
using fields::GaloisGroup;
using flags::Flag;
using flags::FlagSignature;
using linalg::Matrix;
using linalg::SemilinearMap;
using linalg::Subspace;

/// Whether the flag variety of this signature has automorphism group exactly
/// the projective linear group.  False exactly when n >= 3 and
/// d_i + d_{r+1-i} = n for every i (the self-paired case, where the dual
/// involution is an extra automorphism).
bool is_admissible(const FlagSignature& sig);

/// The dual flag: reversed chain of annihilators, with signature
/// (n - d_r < ... < n - d_1) in the dual space identified with F^n.
/// Applying it twice returns the original flag.
Flag dual_flag(const Flag& flag);

/// tau = j o dual for a self-dual signature, where j is induced by the
/// invertible matrix j0 : V* -> V.  With j0 = identity (dual basis to basis),
/// tau is an involution on every flag.
Flag tau(const Flag& flag, const Matrix& j0);
Flag tau(const Flag& flag);  // j0 = identity

/// An element of PGL(V): an invertible matrix up to scalars.  The stored
/// lift is canonical: the first nonzero entry in row-major order is 1.
class ProjectiveMap {
 public:
  explicit ProjectiveMap(const Matrix& lift);

  const Matrix& lift() const { return lift_; }
  std::uint32_t n() const { return lift_.rows(); }

  Subspace apply(const Subspace& u) const;
  Flag apply(const Flag& flag) const;

  /// Order in PGL: least r >= 1 with lift^r scalar.
  std::uint32_t order(std::uint32_t max_order = 1u << 20) const;

  bool operator==(const ProjectiveMap& rhs) const { return lift_ == rhs.lift_; }

 private:
  Matrix lift_;
};

/// All of PGL_n(F_q) as canonical representatives, enumerated by scanning
/// matrices whose first nonzero entry is 1 and keeping the invertible ones.
std::vector<ProjectiveMap> enumerate_pgl(std::uint32_t n, const FiniteField& field,
                                         const Budget& budget = {});

/// The canonical flag list of one signature, with an index for permutation
/// work.  Immutable after construction.
class FlagContext {
 public:
  FlagContext(FlagSignature sig, FiniteField field, const Budget& budget = {});

  const FlagSignature& signature() const { return sig_; }
  const FiniteField& field() const { return field_; }
  const std::vector<Flag>& all() const { return flags_; }
  std::uint32_t size() const { return std::uint32_t(flags_.size()); }
  std::uint32_t index_of(const Flag& flag) const;

  /// The permutation of the canonical flag list induced by a flag self-map.
  std::vector<std::uint32_t> permutation(const std::function<Flag(const Flag&)>& map) const;

 private:
  FlagSignature sig_;
  FiniteField field_;
  std::vector<Flag> flags_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Searches PGL for an element inducing the given permutation of the
/// context's flags.  Returns the witness, or nullopt if no projective-linear
/// map induces it.
std::optional<ProjectiveMap> is_pgl_induced(const std::vector<std::uint32_t>& perm,
                                            const FlagContext& ctx, const Budget& budget = {});

/// A twisted Galois action on flags of F^n over the top field of a tower:
/// T(sigma^e) acts as the semilinear map c_e composed with the
/// coordinatewise-sigma^e action in the chosen basis b.  Lifts c_e are
/// invertible matrices in standard coordinates; c_0 must be scalar (T(id)
/// is the identity on flags).  The homomorphism property is NOT assumed:
/// call validate_cocycle.
class TwistedAction {
 public:
  TwistedAction(GaloisGroup group, Matrix basis, std::vector<Matrix> lifts);
  /// Standard basis.
  TwistedAction(GaloisGroup group, std::vector<Matrix> lifts);
  /// Trivial cocycle in the standard basis (every lift the identity).
  static TwistedAction trivial(const GaloisGroup& group, std::uint32_t n);

  const GaloisGroup& group() const { return group_; }
  std::uint32_t n() const { return basis_.rows(); }
  const Matrix& basis() const { return basis_; }
  const Matrix& lift(std::uint32_t e) const { return lifts_[e]; }

  /// The full semilinear map of sigma^e in standard coordinates:
  /// c_e . P . sigma^e(P^{-1}) . sigma^e(v), with P the basis-to-standard
  /// change of coordinates.
  const SemilinearMap& map_of(std::uint32_t e) const { return maps_[e]; }

  Flag apply(std::uint32_t e, const Flag& flag) const;
  Subspace apply(std::uint32_t e, const Subspace& u) const;

 private:
  GaloisGroup group_;
  Matrix basis_;
  std::vector<Matrix> lifts_;
  std::vector<SemilinearMap> maps_;
};

struct CocycleReport {
  bool valid = true;
  /// First (e1, e2) with T(sigma^e1 sigma^e2) != T(sigma^e1) T(sigma^e2) on
  /// the probe flags, when invalid.
  std::optional<std::pair<std::uint32_t, std::uint32_t>> violating_pair;
  /// A probe flag witnessing the violation, serialized.
  std::string witness;
};

/// Checks the homomorphism property T(st) = T(s)T(t) on all flags of the
/// probe signature (equivalently, the lifts form a 1-cocycle up to scalars).
CocycleReport validate_cocycle(const TwistedAction& action, const FlagSignature& probe,
                               const Budget& budget = {});

/// All flags fixed by every T(sigma).  Requires a valid cocycle on the same
/// signature.
std::vector<Flag> fixed_flags(const TwistedAction& action, const FlagSignature& sig,
                              const Budget& budget = {});

/// Fixed flags of an arbitrary flag self-map family indexed by the group
/// exponent; used for involution-composed scans that leave PGL.
std::vector<Flag> fixed_flags_of(const FlagContext& ctx,
                                 const std::vector<std::function<Flag(const Flag&)>>& maps);

}  // namespace flagdescent::autgroup
