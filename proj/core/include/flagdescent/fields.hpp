#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flagdescent/errors.hpp"

namespace flagdescent::fields {

class FieldElement;
class FieldAutomorphism;
class GaloisGroup;

namespace detail {
struct FieldImpl;
struct TowerImpl;
}  // namespace detail

/// An explicit finite field F_{p^k}.
///
/// Elements are residues of F_p[x] modulo a monic irreducible polynomial of
/// degree k.  The modulus is chosen canonically (least monic irreducible in
/// the coefficient-index order below) unless given explicitly; irreducibility
/// is always checked by trial division against all monic polynomials of
/// degree <= k/2.
///
/// The canonical index of the element with coefficients (c0, ..., c_{k-1})
/// (ascending degree) is sum ci * p^i.  The canonical element order is index
/// order; prime-field elements come out as 0 < 1 < ... < p-1.  "Least",
/// "first" and "lexicographically least" mean this order everywhere in the
/// library.
///
/// A FiniteField is an immutable shared handle: copying is cheap, all state
/// is read-only after construction, values can be shared across threads.
class FiniteField {
 public:
  /// Detached null handle; only valid as a target of assignment.
  FiniteField() = default;
  /// Canonical field with the least monic irreducible modulus of degree k.
  FiniteField(std::uint32_t p, std::uint32_t k, const Budget& budget = {});
  /// Field with an explicit modulus; `modulus` lists the k+1 coefficients of
  /// a monic polynomial in ascending degree (last entry must be 1).
  FiniteField(std::uint32_t p, std::uint32_t k, std::vector<std::uint16_t> modulus,
              const Budget& budget = {});

  std::uint32_t characteristic() const;
  std::uint32_t degree() const;
  std::uint32_t cardinality() const;
  /// Modulus coefficients, ascending degree, k+1 entries.
  const std::vector<std::uint16_t>& modulus() const;

  FieldElement zero() const;
  FieldElement one() const;
  /// Element with the given canonical index (0 <= index < cardinality).
  FieldElement element(std::uint32_t index) const;
  /// Element from a coefficient vector (length k, entries reduced mod p).
  FieldElement from_coefficients(const std::vector<std::uint16_t>& coeffs) const;

  /// Structural equality: same characteristic, degree and modulus.
  bool operator==(const FiniteField& other) const;
  bool operator!=(const FiniteField& other) const { return !(*this == other); }

  /// Descriptor "p^k/c0,c1,...,ck", e.g. "2^2/1,1,1" for F_4 mod x^2+x+1.
  std::string to_string() const;
  static FiniteField parse(const std::string& descriptor, const Budget& budget = {});

  const detail::FieldImpl* impl() const { return impl_.get(); }

 private:
  friend class FieldElement;
  std::shared_ptr<const detail::FieldImpl> impl_;
};

/// A value in a FiniteField.  Immutable; arithmetic returns new values.
class FieldElement {
 public:
  FieldElement() = default;  // detached null element; only valid as a target of assignment

  const FiniteField& field() const { return field_; }
  std::uint32_t index() const { return index_; }
  bool is_zero() const { return index_ == 0; }
  bool is_one() const { return index_ == 1; }

  /// Coefficients of the polynomial representative, ascending degree, length k.
  std::vector<std::uint16_t> coefficients() const;

  FieldElement operator+(const FieldElement& rhs) const;
  FieldElement operator-(const FieldElement& rhs) const;
  FieldElement operator*(const FieldElement& rhs) const;
  FieldElement operator/(const FieldElement& rhs) const { return *this * rhs.inverse(); }
  FieldElement operator-() const;
  FieldElement inverse() const;
  FieldElement pow(std::uint64_t e) const;

  /// Multiplicative order; element must be nonzero.
  std::uint32_t multiplicative_order() const;

  bool operator==(const FieldElement& rhs) const;
  bool operator!=(const FieldElement& rhs) const { return !(*this == rhs); }
  /// Canonical order (index order).  Both operands must belong to equal fields.
  std::strong_ordering operator<=>(const FieldElement& rhs) const;

  /// Comma-separated coefficient list, ascending degree, e.g. "1,1" in F_4.
  std::string to_string() const;
  static FieldElement parse(const FiniteField& field, const std::string& text);

 private:
  friend class FiniteField;
  friend class FieldAutomorphism;
  FieldElement(FiniteField field, std::uint32_t index)
      : field_(std::move(field)), index_(index) {}

  FiniteField field_;
  std::uint32_t index_ = 0;
};

/// The automorphism x -> x^(q^e) of the top field of a tower F_{q^k} / F_q,
/// where q is the cardinality of the base.  e = 0 is the identity;
/// composition adds exponents mod k.  Fixes the embedded base pointwise.
class FieldAutomorphism {
 public:
  const FiniteField& top() const;
  const FiniteField& base() const;
  std::uint32_t exponent() const { return exponent_; }
  bool is_identity() const { return exponent_ == 0; }

  FieldElement operator()(const FieldElement& x) const;
  FieldAutomorphism compose(const FieldAutomorphism& then) const;
  FieldAutomorphism inverse() const;

  bool operator==(const FieldAutomorphism& other) const;

 private:
  friend class GaloisGroup;
  FieldAutomorphism(std::shared_ptr<const detail::TowerImpl> tower, std::uint32_t e)
      : tower_(std::move(tower)), exponent_(e) {}

  std::shared_ptr<const detail::TowerImpl> tower_;
  std::uint32_t exponent_ = 0;
};

/// The cyclic Galois group of a tower F_{q^k} / F_q, generated by x -> x^q.
class GaloisGroup {
 public:
  const FiniteField& base() const;
  const FiniteField& top() const;
  /// Relative degree k = group order.
  std::uint32_t order() const;

  FieldAutomorphism identity() const { return element(0); }
  FieldAutomorphism generator() const { return element(1); }
  FieldAutomorphism element(std::uint32_t e) const;

  /// The fixed embedding of the base into the top field.
  FieldElement embed(const FieldElement& base_element) const;
  /// Whether a top-field element lies in the embedded base.
  bool is_in_base(const FieldElement& top_element) const;
  /// Preimage under the embedding, if the element lies in the embedded base.
  std::optional<FieldElement> to_base(const FieldElement& top_element) const;

  /// Norm to the base: prod over all sigma of sigma(x); always lands in the
  /// embedded base and is returned as a base-field element.
  FieldElement norm(const FieldElement& top_element) const;

 private:
  friend GaloisGroup make_galois_group(std::shared_ptr<const detail::TowerImpl>);
  explicit GaloisGroup(std::shared_ptr<const detail::TowerImpl> tower)
      : tower_(std::move(tower)) {}
  std::shared_ptr<const detail::TowerImpl> tower_;
};

/// A constructed Galois extension: base, top and the group Gal(top|base).
struct Tower {
  FiniteField base;
  FiniteField top;
  GaloisGroup group;
};

/// Builds the tower F_{p^(b*r)} / F_{p^b} with canonical moduli, the fixed
/// embedding of the base, and the cyclic Galois group of order r generated
/// by x -> x^(p^b).  Checks that the base is exactly the fixed field of the
/// generator.
Tower make_tower(std::uint32_t p, std::uint32_t base_degree, std::uint32_t relative_degree,
                 const Budget& budget = {});

/// An element of multiplicative order exactly m, the least in canonical
/// order.  Requires m | q - 1; otherwise the field lacks m-th roots of unity
/// and the caller must enlarge the field.
FieldElement primitive_root_of_unity(const FiniteField& field, std::uint32_t m);

/// Applies sigma to x.  Equivalent to sigma(x); provided as a free function
/// to mirror the operation vocabulary.
inline FieldElement apply_automorphism(const FieldAutomorphism& sigma, const FieldElement& x) {
  return sigma(x);
}

}  // namespace flagdescent::fields
