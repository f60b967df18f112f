#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flagdescent/autgroup.hpp"

namespace flagdescent::bundles {

using autgroup::ProjectiveMap;
using autgroup::TwistedAction;
using fields::FieldElement;
using fields::FiniteField;
using flags::Flag;
using flags::FlagSignature;
using flags::SplitSignature;
using linalg::Decomposition;
using linalg::Matrix;
using linalg::SemilinearMap;
using linalg::Subspace;
using linalg::Vec;

/// A direct sum decomposition V = V1 + V2 together with a split signature.
/// All chart machinery below is relative to one context.  The degenerate
/// splits (empty lower or empty upper part) reuse the same machinery: the
/// absent coordinate blocks are 0-column matrices and absent conditions are
/// vacuous, so the two one-sided bundles are special cases of the pair.
class BundleContext {
 public:
  BundleContext(Decomposition d, SplitSignature split);

  const Decomposition& decomposition() const { return d_; }
  const SplitSignature& split() const { return split_; }
  const FiniteField& field() const { return d_.basis().field(); }
  std::uint32_t n() const { return d_.n(); }
  std::uint32_t n1() const { return d_.n1(); }
  std::uint32_t n2() const { return d_.n2(); }
  std::uint32_t p() const { return split_.p(); }
  std::uint32_t q() const { return split_.q(); }
  /// d_p (0 when the lower part is empty).
  std::uint32_t dp() const { return p() ? split_.lower().back() : 0; }
  /// dim T_1 = e_1 - n_1 (0 when the upper part is empty).
  std::uint32_t t1_dim() const { return q() ? split_.upper().front() - n1() : 0; }
  /// dim of V2/T1 in the charts; 0 when the upper part is empty.
  std::uint32_t quotient_dim() const { return q() ? n2() - t1_dim() : 0; }
  /// Fiber dimension of psi: dim E = dp*n2 + n1*qdim - dp*qdim.
  std::uint32_t fiber_dim() const {
    return dp() * n2() + n1() * quotient_dim() - dp() * quotient_dim();
  }

  /// Signatures of the three flag families (full, lower-only, upper-only);
  /// lower/upper require the respective part to be nonempty.
  FlagSignature full_signature() const { return split_.full(); }
  FlagSignature lower_signature() const;
  FlagSignature upper_signature() const;
  /// Dims of the phi2 target chains inside V2 (e_j - n_1).
  std::vector<std::uint32_t> upper_quotient_dims() const;

 private:
  Decomposition d_;
  SplitSignature split_;
};

/// A point of the product base: a chain in V1 with the lower dims and a
/// chain in V2 with dims e_j - n1.  Either chain may be empty.
struct BasePoint {
  std::vector<Subspace> s_chain;
  std::vector<Subspace> t_chain;

  bool operator==(const BasePoint& rhs) const {
    return s_chain == rhs.s_chain && t_chain == rhs.t_chain;
  }
  std::string storage_key() const;
};

/// Fiber coordinates of phi1 over the base flag S: a matrix in
/// Hom(S_p, V2).  Rows are indexed by the RREF basis of S_p, columns by the
/// V2 rows of the decomposition basis.
struct FiberChartF {
  Flag base;
  Matrix f;  // dp x n2
};

/// Fiber coordinates of phi2 over the base flag T: a matrix in
/// Hom(V1, V2/T1).  Rows are indexed by the V1 rows of the decomposition
/// basis, columns by the quotient chart of V2/T1.
struct FiberChartG {
  Flag base;
  Matrix g;  // n1 x quotient_dim
};

/// A point of the psi bundle: base pair plus (f, g) with F(f, g) = 0.
struct PsiFiberPoint {
  BasePoint base;
  Matrix f;  // dp x n2
  Matrix g;  // n1 x quotient_dim
};

// --- loci -------------------------------------------------------------------

/// Z_p cap V2 = 0 on a flag of the lower signature.
bool in_U1(const Flag& flag, const BundleContext& ctx);
/// W_1 + V2 = V on a flag of the upper signature.
bool in_U2(const Flag& flag, const BundleContext& ctx);
/// Both conditions, on a flag of the full signature (absent parts vacuous).
bool in_U(const Flag& flag, const BundleContext& ctx);

// --- the rational maps ------------------------------------------------------

/// pr(Z_1) < ... < pr(Z_p), projection along V2.  Requires in_U1.
Flag phi1(const Flag& flag, const BundleContext& ctx);
/// W_1 cap V2 < ... < W_q cap V2.  Requires in_U2.
Flag phi2(const Flag& flag, const BundleContext& ctx);
/// Both halves of a full flag.  Requires in_U.
BasePoint psi(const Flag& flag, const BundleContext& ctx);

// --- charts -----------------------------------------------------------------

/// Z_i = {v + f(v) : v in S_i}; f = 0 gives the zero section Z_i = S_i.
Flag param_phi1(const Flag& s_flag, const Matrix& f, const BundleContext& ctx);
FiberChartF coord_phi1(const Flag& flag, const BundleContext& ctx);

/// W_1 = preimage of the graph of g in V/T_1, W_j = W_1 + T_j; g = 0 gives
/// W_j = V1 + T_j.
Flag param_phi2(const Flag& t_flag, const Matrix& g, const BundleContext& ctx);
FiberChartG coord_phi2(const Flag& flag, const BundleContext& ctx);

/// F(f, g) = u o f - g o i in Hom(S_p, V2/T1) (a dp x quotient_dim matrix).
Matrix fiber_constraint(const BasePoint& base, const Matrix& f, const Matrix& g,
                        const BundleContext& ctx);

/// The full-flag point over (S, T) with coordinates (f, g); requires
/// F(f, g) = 0.
Flag param_psi(const BasePoint& base, const Matrix& f, const Matrix& g,
               const BundleContext& ctx);
PsiFiberPoint coord_psi(const Flag& flag, const BundleContext& ctx);

/// The linear map (f, g) -> F(f, g) as a matrix on stacked coordinates;
/// used for rank checks (surjectivity onto Hom(S_p, V2/T1)).
Matrix fiber_constraint_matrix(const BasePoint& base, const BundleContext& ctx);

// --- enumeration helpers ----------------------------------------------------

std::vector<BasePoint> enumerate_base_points(const BundleContext& ctx, const Budget& budget = {});
std::vector<Matrix> all_matrices(const FiniteField& field, std::uint32_t rows, std::uint32_t cols,
                                 const Budget& budget = {});
/// All (f, g) with F(f, g) = 0 over one base point.
std::vector<std::pair<Matrix, Matrix>> enumerate_fiber(const BasePoint& base,
                                                       const BundleContext& ctx,
                                                       const Budget& budget = {});

// --- equivariance and descent -----------------------------------------------

struct Violation {
  std::uint32_t exponent = 0;
  std::string what;
  std::string flag;
};

struct EquivarianceReport {
  bool passed = true;
  std::uint64_t checks = 0;
  std::vector<Violation> violations;  // capped at 16
};

/// Target action on base chains: the part-wise projection of the twisted
/// action (equals the diagonal-block action when the lifts are
/// block-diagonal).  part = 1 or 2.
Subspace q_image(const SemilinearMap& map, const Decomposition& d, int part, const Subspace& u);

/// Raw identity scan without the block-diagonality precondition; used as the
/// negative control.  Verifies, for every group element and every flag:
/// U/U1/U2 invariance and the intertwining of phi1, phi2, psi with the
/// part-wise target action.
EquivarianceReport equivariance_scan(const TwistedAction& action, const BundleContext& ctx,
                                     const Budget& budget = {});

/// Checks the preconditions (action basis matches the decomposition basis,
/// every lift block-diagonal) and then runs the scan.
EquivarianceReport equivariance_check(const TwistedAction& action, const BundleContext& ctx,
                                      const Budget& budget = {});

/// Transport of fiber coordinates along the twisted action.
struct TransportedFiber {
  BasePoint base;
  Matrix f;
  Matrix g;
};
TransportedFiber transport_fiber(const TwistedAction& action, std::uint32_t e,
                                 const BasePoint& base, const Matrix& f, const Matrix& g,
                                 const BundleContext& ctx);

/// For every fiber point: transporting coordinates then parametrizing equals
/// acting on the parametrized flag; the transport is additive and
/// sigma-twisted homogeneous; zero sections map to zero sections.
EquivarianceReport fiber_action_check(const TwistedAction& action, const BundleContext& ctx,
                                      const Budget& budget = {});

struct DescentReport {
  bool passed = false;
  std::uint64_t fixed_flags_in_u = 0;
  std::uint64_t fixed_base_points = 0;
  std::uint32_t fiber_rank = 0;
  std::uint64_t predicted = 0;  // fixed_base_points * q_base^fiber_rank
  bool per_fiber_ok = false;    // every fixed base point carries exactly q_base^rank fixed flags
};

/// |T-fixed flags in U| = sum over Q-fixed base points of q_base^rank,
/// verified by exhaustion on both sides.
DescentReport descent_count_check(const TwistedAction& action, const BundleContext& ctx,
                                  const Budget& budget = {});

// --- the splitting procedure -------------------------------------------------

struct SplitResult {
  Decomposition decomposition;
  Matrix h;                                   // the chosen lift of g
  std::vector<FieldElement> eigenvalues_h;    // distinct eigenvalues, canonical order
  std::vector<FieldElement> eigenvalues_pow;  // distinct eigenvalues of h^{n!}
  Matrix eigenbasis;                          // rows: V1 eigenvectors then V2 eigenvectors
  std::vector<Matrix> lifts;                  // per exponent, relative to the eigenbasis
  std::vector<FieldElement> nu;               // h c_e = nu_e c_e h
  std::vector<bool> block_diagonal;           // per exponent
  std::uint32_t order_g = 0;
  bool paper_order_condition = false;  // order(g) > n!; otherwise the relaxed
                                       // non-scalar h^{n!} condition held
};

/// Eigenspace splitting from a finite-order projective map commuting with
/// the twisted action.  V1 is the eigenspace of the canonically least
/// eigenvalue of h^{n!} unless another index is selected.
SplitResult split_from_automorphism(const ProjectiveMap& g, const TwistedAction& action,
                                    std::uint32_t eigenvalue_index = 0);

}  // namespace flagdescent::bundles
