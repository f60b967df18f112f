#include <doctest.h>

#include <set>

#include "flagdescent/fields.hpp"

using namespace flagdescent;
using namespace flagdescent::fields;

TEST_CASE("canonical moduli are the least monic irreducibles") {
  // Frozen from independent trial-division enumeration of monic polynomials
  // in coefficient-index order.
  CHECK(FiniteField(2, 2).modulus() == std::vector<std::uint16_t>{1, 1, 1});   // x^2+x+1
  CHECK(FiniteField(2, 3).modulus() == std::vector<std::uint16_t>{1, 1, 0, 1});  // x^3+x+1
  CHECK(FiniteField(3, 2).modulus() == std::vector<std::uint16_t>{1, 0, 1});   // x^2+1
  CHECK(FiniteField(2, 4).modulus() == std::vector<std::uint16_t>{1, 1, 0, 0, 1});  // x^4+x+1
  CHECK(FiniteField(5, 2).modulus() == std::vector<std::uint16_t>{2, 0, 1});   // x^2+2
  CHECK(FiniteField(11, 2).modulus() == std::vector<std::uint16_t>{1, 0, 1});  // x^2+1
}

TEST_CASE("field construction rejects bad input") {
  CHECK_THROWS_AS(FiniteField(4, 1), PreconditionError);  // not prime
  CHECK_THROWS_AS(FiniteField(2, 0), PreconditionError);  // degree zero
  CHECK_THROWS_AS(FiniteField(2, 2, {1, 0, 1}), PreconditionError);  // x^2+1 = (x+1)^2 over F_2
  CHECK_THROWS_AS(FiniteField(2, 2, {1, 1, 0}), PreconditionError);  // not monic
  Budget tight;
  tight.max_field_cardinality = 4096;
  CHECK_THROWS_AS(FiniteField(2, 13, tight), BudgetError);  // 8192 > 4096
}

TEST_CASE("prime field arithmetic") {
  FiniteField f5(5, 1);
  auto e = [&](std::uint32_t i) { return f5.element(i); };
  CHECK(e(2) + e(4) == e(1));
  CHECK(e(2) * e(3) == e(1));
  CHECK(e(3).inverse() == e(2));
  CHECK((-e(2)) == e(3));
  CHECK(e(2).pow(4) == e(1));
}

TEST_CASE("F_4 arithmetic against the modulus x^2+x+1") {
  FiniteField f4(2, 2);
  FieldElement w = f4.element(2);  // the class of x
  // x^2 = x + 1 mod x^2+x+1
  CHECK(w * w == f4.from_coefficients({1, 1}));
  CHECK(w * w * w == f4.one());
  CHECK(w.multiplicative_order() == 3);
  CHECK(w + w == f4.zero());
}

TEST_CASE("element canonical order and serialization") {
  FiniteField f4(2, 2);
  CHECK(f4.element(0) < f4.element(1));
  CHECK(f4.element(1) < f4.element(2));
  CHECK(f4.element(2) < f4.element(3));
  CHECK(f4.element(3).to_string() == "1,1");
  CHECK(FieldElement::parse(f4, "1,1") == f4.element(3));
  CHECK(f4.to_string() == "2^2/1,1,1");
  FiniteField back = FiniteField::parse("2^2/1,1,1");
  CHECK(back == f4);
}

TEST_CASE("make_tower examples") {
  SUBCASE("F_2 inside F_4, group of order 2") {
    Tower t = make_tower(2, 1, 2);
    CHECK(t.base.cardinality() == 2);
    CHECK(t.top.cardinality() == 4);
    CHECK(t.group.order() == 2);
    // the generator squares
    FieldAutomorphism frob = t.group.generator();
    FieldElement w = t.top.element(2);
    CHECK(frob(w) == w * w);
  }
  SUBCASE("trivial extension") {
    Tower t = make_tower(3, 1, 1);
    CHECK(t.base == t.top);
    CHECK(t.group.order() == 1);
    CHECK(t.group.generator().is_identity());
  }
  SUBCASE("F_2 inside F_8: fixed field of x->x^2 is {0,1}") {
    Tower t = make_tower(2, 1, 3);
    CHECK(t.group.order() == 3);
    FieldAutomorphism frob = t.group.generator();
    // oracle: exhaust all 8 elements
    std::set<std::uint32_t> fixed;
    for (std::uint32_t i = 0; i < 8; ++i) {
      FieldElement x = t.top.element(i);
      if (frob(x) == x) fixed.insert(i);
    }
    CHECK(fixed == std::set<std::uint32_t>{0, 1});
    CHECK(t.group.is_in_base(t.top.element(1)));
    CHECK_FALSE(t.group.is_in_base(t.top.element(2)));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(make_tower(6, 1, 2), PreconditionError);
    CHECK_THROWS_AS(make_tower(2, 0, 2), PreconditionError);
    Budget tight;
    tight.max_field_cardinality = 4096;
    CHECK_THROWS_AS(make_tower(2, 1, 13, tight), BudgetError);
  }
}

TEST_CASE("fixed field equals embedded base for towers up to 4096 elements") {
  // (p, base_degree, relative_degree)
  const std::array<std::array<std::uint32_t, 3>, 5> towers = {
      {{2, 1, 2}, {2, 2, 2}, {2, 2, 3}, {3, 1, 2}, {3, 2, 2}}};
  for (auto [p, b, r] : towers) {
    CAPTURE(p);
    CAPTURE(b);
    CAPTURE(r);
    Tower t = make_tower(p, b, r);
    FieldAutomorphism gen = t.group.generator();
    std::uint64_t in_base = 0;
    for (std::uint32_t i = 0; i < t.top.cardinality(); ++i) {
      FieldElement x = t.top.element(i);
      bool fixed = gen(x) == x;
      CHECK(fixed == t.group.is_in_base(x));
      if (fixed) ++in_base;
    }
    CHECK(in_base == t.base.cardinality());
    // embedding is a ring homomorphism on all pairs
    for (std::uint32_t i = 0; i < t.base.cardinality(); ++i) {
      for (std::uint32_t j = 0; j < t.base.cardinality(); ++j) {
        FieldElement a = t.base.element(i), bb = t.base.element(j);
        CHECK(t.group.embed(a + bb) == t.group.embed(a) + t.group.embed(bb));
        CHECK(t.group.embed(a * bb) == t.group.embed(a) * t.group.embed(bb));
      }
    }
  }
}

TEST_CASE("automorphisms are ring homomorphisms (exhaustive on small fields)") {
  for (auto [p, b, r] : std::array<std::array<std::uint32_t, 3>, 3>{{{2, 1, 2}, {2, 1, 3}, {3, 1, 2}}}) {
    Tower t = make_tower(p, b, r);
    for (std::uint32_t e = 0; e < t.group.order(); ++e) {
      FieldAutomorphism s = t.group.element(e);
      for (std::uint32_t i = 0; i < t.top.cardinality(); ++i) {
        for (std::uint32_t j = 0; j < t.top.cardinality(); ++j) {
          FieldElement x = t.top.element(i), y = t.top.element(j);
          CHECK(s(x + y) == s(x) + s(y));
          CHECK(s(x * y) == s(x) * s(y));
        }
      }
    }
  }
}

TEST_CASE("automorphism composition adds exponents") {
  Tower t = make_tower(2, 1, 3);
  auto s1 = t.group.element(1), s2 = t.group.element(2);
  CHECK(s1.compose(s2).is_identity());
  CHECK(s1.compose(s1) == s2);
  CHECK(s1.inverse() == s2);
  FieldElement x = t.top.element(5);
  CHECK(s1(s1(x)) == s2(x));
}

TEST_CASE("apply_automorphism examples over F_4/F_2") {
  Tower t = make_tower(2, 1, 2);
  FieldAutomorphism frob = t.group.generator();
  CHECK(apply_automorphism(frob, t.top.zero()) == t.top.zero());
  CHECK(apply_automorphism(frob, t.top.one()) == t.top.one());
  FieldElement w = t.top.element(2);
  // w^2 = w + 1 via the modulus x^2+x+1
  CHECK(apply_automorphism(frob, w) == t.top.from_coefficients({1, 1}));
}

TEST_CASE("primitive roots of unity") {
  CHECK(primitive_root_of_unity(FiniteField(3, 1), 2) == FiniteField(3, 1).element(2));  // -1
  CHECK(primitive_root_of_unity(FiniteField(2, 1), 1) == FiniteField(2, 1).one());
  FiniteField f4(2, 2);
  // both non-identity units have order 3; the least is the class of x
  CHECK(primitive_root_of_unity(f4, 3) == f4.element(2));
  CHECK_THROWS_WITH_AS(primitive_root_of_unity(FiniteField(2, 3), 3),
                       doctest::Contains("lacks primitive"), Error);
}

TEST_CASE("root order properties") {
  for (auto [p, k] : std::array<std::array<std::uint32_t, 2>, 3>{{{5, 1}, {2, 2}, {3, 2}}}) {
    FiniteField f(p, k);
    std::uint32_t q = f.cardinality();
    for (std::uint32_t m = 1; m < q; ++m) {
      if ((q - 1) % m != 0) continue;
      FieldElement z = primitive_root_of_unity(f, m);
      CHECK(z.pow(m) == f.one());
      for (std::uint32_t d = 1; d < m; ++d) {
        if (m % d == 0) CHECK(z.pow(d) != f.one());
      }
    }
  }
}

TEST_CASE("galois norm is multiplicative and lands in the base") {
  Tower t = make_tower(2, 1, 2);
  // N(x) = x * x^2 = x^3 on F_4: every nonzero element has norm 1
  for (std::uint32_t i = 1; i < 4; ++i) {
    CHECK(t.group.norm(t.top.element(i)) == t.base.one());
  }
  CHECK(t.group.norm(t.top.zero()) == t.base.zero());
}
