#include "flagdescent/fields.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "numeric_util.hpp"

namespace flagdescent::detail {

std::uint64_t checked_pow_u64(std::uint64_t a, std::uint32_t e) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < e; ++i) {
    if (a != 0 && r > UINT64_MAX / a) throw std::overflow_error("pow overflow");
    r *= a;
  }
  return r;
}

}  // namespace flagdescent::detail

namespace flagdescent::fields {

using flagdescent::detail::gcd_u64;
using flagdescent::detail::is_prime_u64;
using flagdescent::detail::prime_factors_u64;

namespace detail {

using Poly = std::vector<std::uint16_t>;  // ascending degree

struct FieldImpl {
  std::uint32_t p = 0;
  std::uint32_t k = 0;
  std::uint32_t q = 0;
  Poly modulus;                        // k+1 coefficients, monic
  std::vector<std::uint16_t> digits;   // q * k decoded coefficient vectors
  std::vector<std::uint32_t> exp;      // 2*(q-1) entries, exp[i] = index of g^i
  std::vector<std::uint32_t> log;      // q entries, log[0] unused
  std::uint32_t generator = 0;

  std::uint32_t encode(const std::uint16_t* c) const {
    std::uint32_t x = 0;
    for (std::uint32_t i = k; i-- > 0;) x = x * p + c[i];
    return x;
  }
  const std::uint16_t* digit(std::uint32_t a) const { return digits.data() + std::size_t(a) * k; }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    if (p == 2) return a ^ b;
    const std::uint16_t* da = digit(a);
    const std::uint16_t* db = digit(b);
    std::uint32_t x = 0;
    for (std::uint32_t i = k; i-- > 0;) x = x * p + (da[i] + db[i]) % p;
    return x;
  }
  std::uint32_t neg(std::uint32_t a) const {
    if (p == 2) return a;
    const std::uint16_t* da = digit(a);
    std::uint32_t x = 0;
    for (std::uint32_t i = k; i-- > 0;) x = x * p + (p - da[i]) % p;
    return x;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add(a, neg(b)); }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp[log[a] + log[b]];
  }
  std::uint32_t inv(std::uint32_t a) const {
    if (a == 0) throw Error("division by zero in F_" + std::to_string(q));
    return exp[(q - 1 - log[a]) % (q - 1)];
  }
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const {
    if (a == 0) return e == 0 ? 1u : 0u;
    std::uint64_t le = (std::uint64_t(log[a]) * (e % (q - 1))) % (q - 1);
    return exp[le];
  }
  std::uint32_t order(std::uint32_t a) const {
    if (a == 0) throw Error("order of zero");
    return std::uint32_t((q - 1) / gcd_u64(q - 1, log[a]));
  }

  // Raw polynomial arithmetic; used only while the tables are being built.
  std::uint32_t mul_raw(std::uint32_t a, std::uint32_t b) const {
    std::vector<std::uint32_t> prod(2 * k, 0);
    const std::uint16_t* da = digit(a);
    const std::uint16_t* db = digit(b);
    for (std::uint32_t i = 0; i < k; ++i) {
      if (!da[i]) continue;
      for (std::uint32_t j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + std::uint32_t(da[i]) * db[j]) % p;
    }
    for (std::uint32_t d = 2 * k - 1; d + 1 > k; --d) {
      std::uint32_t lead = prod[d];
      if (!lead) continue;
      prod[d] = 0;
      for (std::uint32_t i = 0; i < k; ++i) {
        prod[d - k + i] = (prod[d - k + i] + std::uint32_t(p - modulus[i] % p) % p * lead) % p;
      }
    }
    std::uint32_t x = 0;
    for (std::uint32_t i = k; i-- > 0;) x = x * p + prod[i];
    return x;
  }
  std::uint32_t pow_raw(std::uint32_t a, std::uint64_t e) const {
    std::uint32_t r = 1, base = a;
    while (e) {
      if (e & 1) r = mul_raw(r, base);
      base = mul_raw(base, base);
      e >>= 1;
    }
    return r;
  }
};

namespace {

// Remainder of a / b over F_p; both ascending-degree with b monic-ish (lead nonzero).
Poly poly_rem(Poly a, const Poly& b, std::uint32_t p) {
  auto deg = [](const Poly& f) {
    int d = int(f.size()) - 1;
    while (d >= 0 && f[std::size_t(d)] == 0) --d;
    return d;
  };
  int db = deg(b);
  // inverse of the leading coefficient mod p
  std::uint32_t lead = b[std::size_t(db)];
  std::uint32_t inv_lead = 1;
  for (std::uint32_t t = 1; t < p; ++t) {
    if ((lead * t) % p == 1) {
      inv_lead = t;
      break;
    }
  }
  int da = deg(a);
  while (da >= db) {
    std::uint32_t c = (a[std::size_t(da)] * inv_lead) % p;
    if (c != 0) {
      int shift = da - db;
      for (int i = 0; i <= db; ++i) {
        std::uint32_t v = a[std::size_t(shift + i)];
        std::uint32_t s = (c * b[std::size_t(i)]) % p;
        a[std::size_t(shift + i)] = std::uint16_t((v + p - s) % p);
      }
    }
    da = deg(a);
  }
  return a;
}

bool divides_poly(const Poly& divisor, const Poly& f, std::uint32_t p) {
  Poly r = poly_rem(f, divisor, p);
  return std::all_of(r.begin(), r.end(), [](std::uint16_t c) { return c == 0; });
}

// Monic polynomial of degree d with non-leading coefficients given by `index`
// in base-p digits.
Poly monic_from_index(std::uint64_t index, std::uint32_t d, std::uint32_t p) {
  Poly f(d + 1, 0);
  for (std::uint32_t i = 0; i < d; ++i) {
    f[i] = std::uint16_t(index % p);
    index /= p;
  }
  f[d] = 1;
  return f;
}

bool is_irreducible(const Poly& f, std::uint32_t p) {
  std::uint32_t d = std::uint32_t(f.size()) - 1;
  if (d == 0) return false;
  if (f[0] == 0 && d > 1) return false;  // divisible by x
  for (std::uint32_t dd = 1; dd <= d / 2; ++dd) {
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < dd; ++i) count *= p;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      if (divides_poly(monic_from_index(idx, dd, p), f, p)) return false;
    }
  }
  return true;
}

std::shared_ptr<const FieldImpl> build_impl(std::uint32_t p, std::uint32_t k, Poly modulus,
                                            const Budget& budget) {
  if (!is_prime_u64(p)) throw PreconditionError("characteristic " + std::to_string(p) + " is not prime");
  if (k == 0) throw PreconditionError("extension degree must be positive");
  std::uint64_t q64 = flagdescent::detail::checked_pow_u64(p, k);
  budget.check_field(q64);
  auto impl = std::make_shared<FieldImpl>();
  impl->p = p;
  impl->k = k;
  impl->q = std::uint32_t(q64);

  if (modulus.empty()) {
    bool found = false;
    for (std::uint64_t idx = 0; idx < q64; ++idx) {
      Poly f = monic_from_index(idx, k, p);
      if (is_irreducible(f, p)) {
        modulus = std::move(f);
        found = true;
        break;
      }
    }
    if (!found) throw Error("no irreducible modulus found");  // cannot happen
  } else {
    if (modulus.size() != k + 1) throw PreconditionError("modulus must have degree k");
    for (auto& c : modulus) c = std::uint16_t(c % p);
    if (modulus[k] != 1) throw PreconditionError("modulus must be monic");
    if (!is_irreducible(modulus, p)) throw PreconditionError("modulus is reducible over F_p");
  }
  impl->modulus = std::move(modulus);

  const std::uint32_t q = impl->q;
  impl->digits.resize(std::size_t(q) * k);
  for (std::uint32_t a = 0; a < q; ++a) {
    std::uint32_t t = a;
    for (std::uint32_t i = 0; i < k; ++i) {
      impl->digits[std::size_t(a) * k + i] = std::uint16_t(t % p);
      t /= p;
    }
  }

  // Find the least multiplicative generator, then fill exp/log.
  auto factors = prime_factors_u64(q - 1);
  std::uint32_t gen = 0;
  for (std::uint32_t cand = 1; cand < q; ++cand) {
    bool ok = true;
    for (auto ell : factors) {
      if (impl->pow_raw(cand, (q - 1) / ell) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) {
      gen = cand;
      break;
    }
  }
  impl->generator = gen;
  impl->exp.assign(2 * std::size_t(q - 1), 0);
  impl->log.assign(q, 0);
  std::uint32_t acc = 1;
  for (std::uint32_t i = 0; i < q - 1; ++i) {
    impl->exp[i] = acc;
    impl->exp[i + (q - 1)] = acc;
    impl->log[acc] = i;
    acc = impl->mul_raw(acc, gen);
  }
  if (acc != 1) throw Error("generator order check failed");  // cannot happen
  return impl;
}

}  // namespace

struct TowerImpl {
  FiniteField base;
  FiniteField top;
  std::uint32_t rel_degree = 1;
  std::vector<std::uint32_t> embed_table;   // base index -> top index
  std::vector<std::int64_t> to_base_table;  // top index -> base index or -1
  // frob[e][x] = x^(q_base^e), e in [0, rel_degree)
  std::vector<std::vector<std::uint32_t>> frob;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// FiniteField

FiniteField::FiniteField(std::uint32_t p, std::uint32_t k, const Budget& budget)
    : impl_(detail::build_impl(p, k, {}, budget)) {}

FiniteField::FiniteField(std::uint32_t p, std::uint32_t k, std::vector<std::uint16_t> modulus,
                         const Budget& budget)
    : impl_(detail::build_impl(p, k, std::move(modulus), budget)) {}

std::uint32_t FiniteField::characteristic() const { return impl_->p; }
std::uint32_t FiniteField::degree() const { return impl_->k; }
std::uint32_t FiniteField::cardinality() const { return impl_->q; }
const std::vector<std::uint16_t>& FiniteField::modulus() const { return impl_->modulus; }

FieldElement FiniteField::zero() const { return FieldElement(*this, 0); }
FieldElement FiniteField::one() const { return FieldElement(*this, 1); }

FieldElement FiniteField::element(std::uint32_t index) const {
  if (index >= impl_->q) throw PreconditionError("element index out of range");
  return FieldElement(*this, index);
}

FieldElement FiniteField::from_coefficients(const std::vector<std::uint16_t>& coeffs) const {
  if (coeffs.size() != impl_->k) throw PreconditionError("coefficient vector has wrong length");
  std::uint32_t x = 0;
  for (std::uint32_t i = impl_->k; i-- > 0;) x = x * impl_->p + coeffs[i] % impl_->p;
  return FieldElement(*this, x);
}

bool FiniteField::operator==(const FiniteField& other) const {
  if (impl_ == other.impl_) return true;
  if (!impl_ || !other.impl_) return false;
  return impl_->p == other.impl_->p && impl_->k == other.impl_->k &&
         impl_->modulus == other.impl_->modulus;
}

std::string FiniteField::to_string() const {
  std::ostringstream os;
  os << impl_->p << '^' << impl_->k << '/';
  for (std::size_t i = 0; i < impl_->modulus.size(); ++i) {
    if (i) os << ',';
    os << impl_->modulus[i];
  }
  return os.str();
}

FiniteField FiniteField::parse(const std::string& descriptor, const Budget& budget) {
  auto caret = descriptor.find('^');
  auto slash = descriptor.find('/');
  if (caret == std::string::npos) throw PreconditionError("bad field descriptor: " + descriptor);
  std::uint32_t p = std::uint32_t(std::stoul(descriptor.substr(0, caret)));
  std::uint32_t k;
  if (slash == std::string::npos) {
    k = std::uint32_t(std::stoul(descriptor.substr(caret + 1)));
    return FiniteField(p, k, budget);
  }
  k = std::uint32_t(std::stoul(descriptor.substr(caret + 1, slash - caret - 1)));
  std::vector<std::uint16_t> mod;
  std::istringstream in(descriptor.substr(slash + 1));
  std::string tok;
  while (std::getline(in, tok, ',')) mod.push_back(std::uint16_t(std::stoul(tok)));
  return FiniteField(p, k, std::move(mod), budget);
}

// ---------------------------------------------------------------------------
// FieldElement

namespace {
const detail::FieldImpl* common_impl(const FieldElement& a, const FieldElement& b) {
  const auto* ia = a.field().impl();
  const auto* ib = b.field().impl();
  if (ia == ib) return ia;
  if (!ia || !ib || !(a.field() == b.field()))
    throw PreconditionError("field mismatch between elements");
  return ia;
}
}  // namespace

std::vector<std::uint16_t> FieldElement::coefficients() const {
  const auto* im = field_.impl();
  const std::uint16_t* d = im->digit(index_);
  return std::vector<std::uint16_t>(d, d + im->k);
}

FieldElement FieldElement::operator+(const FieldElement& rhs) const {
  return FieldElement(field_, common_impl(*this, rhs)->add(index_, rhs.index_));
}
FieldElement FieldElement::operator-(const FieldElement& rhs) const {
  return FieldElement(field_, common_impl(*this, rhs)->sub(index_, rhs.index_));
}
FieldElement FieldElement::operator*(const FieldElement& rhs) const {
  return FieldElement(field_, common_impl(*this, rhs)->mul(index_, rhs.index_));
}
FieldElement FieldElement::operator-() const { return FieldElement(field_, field_.impl()->neg(index_)); }
FieldElement FieldElement::inverse() const { return FieldElement(field_, field_.impl()->inv(index_)); }
FieldElement FieldElement::pow(std::uint64_t e) const {
  return FieldElement(field_, field_.impl()->pow(index_, e));
}
std::uint32_t FieldElement::multiplicative_order() const { return field_.impl()->order(index_); }

bool FieldElement::operator==(const FieldElement& rhs) const {
  if (index_ != rhs.index_) return false;
  return field_.impl() == rhs.field_.impl() || field_ == rhs.field_;
}

std::strong_ordering FieldElement::operator<=>(const FieldElement& rhs) const {
  common_impl(*this, rhs);
  return index_ <=> rhs.index_;
}

std::string FieldElement::to_string() const {
  auto c = coefficients();
  std::ostringstream os;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) os << ',';
    os << c[i];
  }
  return os.str();
}

FieldElement FieldElement::parse(const FiniteField& field, const std::string& text) {
  std::vector<std::uint16_t> coeffs;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) coeffs.push_back(std::uint16_t(std::stoul(tok)));
  return field.from_coefficients(coeffs);
}

// ---------------------------------------------------------------------------
// FieldAutomorphism

const FiniteField& FieldAutomorphism::top() const { return tower_->top; }
const FiniteField& FieldAutomorphism::base() const { return tower_->base; }

FieldElement FieldAutomorphism::operator()(const FieldElement& x) const {
  if (!(x.field() == tower_->top)) throw PreconditionError("element not in the automorphism's field");
  return tower_->top.element(tower_->frob[exponent_][x.index()]);
}

FieldAutomorphism FieldAutomorphism::compose(const FieldAutomorphism& then) const {
  if (tower_ != then.tower_) throw PreconditionError("automorphisms of different towers");
  return FieldAutomorphism(tower_, (exponent_ + then.exponent_) % tower_->rel_degree);
}

FieldAutomorphism FieldAutomorphism::inverse() const {
  return FieldAutomorphism(tower_, (tower_->rel_degree - exponent_) % tower_->rel_degree);
}

bool FieldAutomorphism::operator==(const FieldAutomorphism& other) const {
  return tower_ == other.tower_ && exponent_ == other.exponent_;
}

// ---------------------------------------------------------------------------
// GaloisGroup

const FiniteField& GaloisGroup::base() const { return tower_->base; }
const FiniteField& GaloisGroup::top() const { return tower_->top; }
std::uint32_t GaloisGroup::order() const { return tower_->rel_degree; }

FieldAutomorphism GaloisGroup::element(std::uint32_t e) const {
  return FieldAutomorphism(tower_, e % tower_->rel_degree);
}

FieldElement GaloisGroup::embed(const FieldElement& base_element) const {
  if (!(base_element.field() == tower_->base)) throw PreconditionError("element not in the base field");
  return tower_->top.element(tower_->embed_table[base_element.index()]);
}

bool GaloisGroup::is_in_base(const FieldElement& top_element) const {
  if (!(top_element.field() == tower_->top)) throw PreconditionError("element not in the top field");
  return tower_->to_base_table[top_element.index()] >= 0;
}

std::optional<FieldElement> GaloisGroup::to_base(const FieldElement& top_element) const {
  if (!(top_element.field() == tower_->top)) throw PreconditionError("element not in the top field");
  auto b = tower_->to_base_table[top_element.index()];
  if (b < 0) return std::nullopt;
  return tower_->base.element(std::uint32_t(b));
}

FieldElement GaloisGroup::norm(const FieldElement& top_element) const {
  FieldElement acc = tower_->top.one();
  for (std::uint32_t e = 0; e < tower_->rel_degree; ++e) acc = acc * element(e)(top_element);
  auto b = to_base(acc);
  if (!b) throw Error("norm left the base field");  // cannot happen
  return *b;
}

GaloisGroup make_galois_group(std::shared_ptr<const detail::TowerImpl> tower) {
  return GaloisGroup(std::move(tower));
}

// ---------------------------------------------------------------------------
// make_tower

Tower make_tower(std::uint32_t p, std::uint32_t base_degree, std::uint32_t relative_degree,
                 const Budget& budget) {
  if (base_degree == 0 || relative_degree == 0) throw PreconditionError("degree must be positive");
  FiniteField base(p, base_degree, budget);
  FiniteField top = (relative_degree == 1) ? base : FiniteField(p, base_degree * relative_degree, budget);

  auto tw = std::make_shared<detail::TowerImpl>(detail::TowerImpl{base, top, relative_degree, {}, {}, {}});
  const std::uint32_t q_base = base.cardinality();
  const std::uint32_t q_top = top.cardinality();
  const auto* ti = top.impl();

  // Embedding: the image of the base generator alpha is the least root of the
  // base modulus in the top field.
  tw->embed_table.assign(q_base, 0);
  if (relative_degree == 1) {
    for (std::uint32_t a = 0; a < q_base; ++a) tw->embed_table[a] = a;
  } else if (base_degree == 1) {
    for (std::uint32_t a = 0; a < q_base; ++a) tw->embed_table[a] = a;  // prime subfield: constants
  } else {
    const auto& mod = base.modulus();
    std::uint32_t root = q_top;
    for (std::uint32_t x = 0; x < q_top; ++x) {
      // Horner evaluation of the base modulus at x inside the top field.
      std::uint32_t acc = 0;
      for (std::uint32_t i = base_degree + 1; i-- > 0;) {
        acc = ti->add(ti->mul(acc, x), mod[i] % p);
      }
      if (acc == 0) {
        root = x;
        break;
      }
    }
    if (root == q_top) throw Error("base modulus has no root in the top field");  // cannot happen
    for (std::uint32_t a = 0; a < q_base; ++a) {
      const std::uint16_t* c = base.impl()->digit(a);
      std::uint32_t acc = 0;  // Horner in the top field
      for (std::uint32_t i = base_degree; i-- > 0;) acc = ti->add(ti->mul(acc, root), c[i]);
      tw->embed_table[a] = acc;
    }
  }

  tw->to_base_table.assign(q_top, -1);
  for (std::uint32_t a = 0; a < q_base; ++a) tw->to_base_table[tw->embed_table[a]] = a;

  // sigma^e tables: sigma = x -> x^(q_base).
  tw->frob.assign(relative_degree, std::vector<std::uint32_t>(q_top));
  for (std::uint32_t x = 0; x < q_top; ++x) tw->frob[0][x] = x;
  if (relative_degree > 1) {
    std::vector<std::uint32_t> step(q_top);
    for (std::uint32_t x = 0; x < q_top; ++x) step[x] = ti->pow(x, q_base);
    for (std::uint32_t e = 1; e < relative_degree; ++e) {
      for (std::uint32_t x = 0; x < q_top; ++x) tw->frob[e][x] = step[tw->frob[e - 1][x]];
    }
    // The base must be exactly the fixed field of the generator.
    for (std::uint32_t x = 0; x < q_top; ++x) {
      bool fixed = (step[x] == x);
      bool in_base = (tw->to_base_table[x] >= 0);
      if (fixed != in_base) throw Error("fixed field of the generator differs from the embedded base");
    }
  }

  GaloisGroup group = make_galois_group(tw);
  return Tower{std::move(base), std::move(top), std::move(group)};
}

// ---------------------------------------------------------------------------
// primitive_root_of_unity

FieldElement primitive_root_of_unity(const FiniteField& field, std::uint32_t m) {
  if (m == 0) throw PreconditionError("root order must be positive");
  const std::uint32_t q = field.cardinality();
  if ((q - 1) % m != 0) {
    throw Error("field F_" + std::to_string(q) + " lacks primitive " + std::to_string(m) +
                "-th roots of unity (m does not divide q-1); enlarge the field");
  }
  for (std::uint32_t idx = 1; idx < q; ++idx) {
    if (field.impl()->order(idx) == m) return field.element(idx);
  }
  throw Error("no element of the requested order");  // cannot happen for m | q-1
}

}  // namespace flagdescent::fields
