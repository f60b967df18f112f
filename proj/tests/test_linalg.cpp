#include <doctest.h>

#include <algorithm>
#include <random>

#include "flagdescent/linalg.hpp"

using namespace flagdescent;
using namespace flagdescent::fields;
using namespace flagdescent::linalg;

namespace {

Matrix mat(const FiniteField& f, const std::string& text) { return Matrix::parse(f, text); }

Vec vec(const FiniteField& f, std::initializer_list<std::uint32_t> idx) {
  Vec v;
  for (auto i : idx) v.push_back(f.element(i));
  return v;
}

Subspace sp(const FiniteField& f, std::uint32_t n, const std::string& text) {
  return Subspace::parse(f, n, text);
}

// Random subspace via random spanning rows; seeded for reproducibility.
Subspace random_subspace(std::mt19937& rng, const FiniteField& f, std::uint32_t n) {
  std::uniform_int_distribution<std::uint32_t> rows_dist(0, n);
  std::uniform_int_distribution<std::uint32_t> el(0, f.cardinality() - 1);
  std::uint32_t r = rows_dist(rng);
  Matrix m(f, r, n);
  for (std::uint32_t i = 0; i < r; ++i)
    for (std::uint32_t j = 0; j < n; ++j) m.set(i, j, f.element(el(rng)));
  return Subspace(n, m);
}

}  // namespace

TEST_CASE("rref examples") {
  FiniteField f2(2, 1);
  SUBCASE("identity is fixed") {
    auto rr = rref(Matrix::identity(f2, 3));
    CHECK(rr.matrix == Matrix::identity(f2, 3));
    CHECK(rr.rank == 3);
    CHECK(rr.pivots == std::vector<std::uint32_t>{0, 1, 2});
  }
  SUBCASE("zero matrix") {
    auto rr = rref(Matrix(f2, 2, 4));
    CHECK(rr.rank == 0);
    CHECK(rr.matrix.is_zero());
  }
  SUBCASE("dependent rows over F_2") {
    auto rr = rref(mat(f2, "1 1;1 1"));
    CHECK(rr.rank == 1);
    CHECK(rr.matrix.row(0) == vec(f2, {1, 1}));
    CHECK(rr.matrix.row(1) == vec(f2, {0, 0}));
  }
}

TEST_CASE("rref is idempotent on random input") {
  std::mt19937 rng(7);
  for (auto q : {2u, 3u}) {
    FiniteField f(q, 1);
    std::uniform_int_distribution<std::uint32_t> el(0, q - 1);
    for (int trial = 0; trial < 50; ++trial) {
      Matrix m(f, 3, 4);
      for (std::uint32_t i = 0; i < 3; ++i)
        for (std::uint32_t j = 0; j < 4; ++j) m.set(i, j, f.element(el(rng)));
      auto rr = rref(m);
      CHECK(rref(rr.matrix).matrix == rr.matrix);
    }
  }
}

TEST_CASE("matrix inverse and solve") {
  FiniteField f3(3, 1);
  Matrix a = mat(f3, "1 2 0;0 1 1;2 0 1");
  REQUIRE(a.is_invertible());
  CHECK(a * a.inverse() == Matrix::identity(f3, 3));
  CHECK(a.inverse() * a == Matrix::identity(f3, 3));
  Vec b = vec(f3, {1, 2, 0});
  auto x = solve(a, b);
  REQUIRE(x.has_value());
  CHECK(a.apply(*x) == b);
  CHECK_THROWS_AS(mat(f3, "1 1;1 1").inverse(), PreconditionError);
  // inconsistent system
  CHECK_FALSE(solve(mat(f3, "1 1;1 1"), vec(f3, {0, 1})).has_value());
}

TEST_CASE("kernel spans the right null space") {
  FiniteField f2(2, 1);
  Matrix m = mat(f2, "1 1 0;0 0 1");
  Matrix k = kernel(m);
  CHECK(k.rows() == 1);
  CHECK(m.apply(k.row(0)) == vec(f2, {0, 0}));
  CHECK(k.row(0) == vec(f2, {1, 1, 0}));
}

TEST_CASE("subspace canonical form is representation-independent") {
  std::mt19937 rng(11);
  for (auto q : {2u, 3u}) {
    FiniteField f(q, 1);
    std::uniform_int_distribution<std::uint32_t> el(0, q - 1);
    for (int trial = 0; trial < 40; ++trial) {
      Subspace s = random_subspace(rng, f, 4);
      Matrix b = s.basis();
      if (b.rows() == 0) continue;
      // random row operations preserve the span
      std::uniform_int_distribution<std::uint32_t> rd(0, b.rows() - 1);
      for (int op = 0; op < 6; ++op) {
        std::uint32_t i = rd(rng), j = rd(rng);
        FieldElement c = f.element(el(rng));
        if (i == j) continue;
        for (std::uint32_t col = 0; col < 4; ++col)
          b.set(i, col, b.at(i, col) + c * b.at(j, col));
      }
      CHECK(Subspace(4, b) == s);
    }
  }
}

TEST_CASE("sum and intersect") {
  FiniteField f2(2, 1);
  SUBCASE("coordinate lines in F_2^3") {
    Subspace e1 = sp(f2, 3, "1 0 0"), e2 = sp(f2, 3, "0 1 0");
    CHECK(sum(e1, e2).dim() == 2);
    CHECK(intersect(e1, e2).dim() == 0);
  }
  SUBCASE("idempotence") {
    Subspace u = sp(f2, 3, "1 1 0;0 0 1");
    CHECK(sum(u, u) == u);
    CHECK(intersect(u, u) == u);
  }
  SUBCASE("complementary pair") {
    Subspace u = sp(f2, 3, "1 1 0;0 0 1");  // span(e1+e2, e3)
    Subspace w = sp(f2, 3, "0 1 1");        // span(e2+e3)
    CHECK(intersect(u, w).dim() == 0);
    CHECK(sum(u, w) == Subspace::full(f2, 3));
  }
  SUBCASE("ambient mismatch") {
    CHECK_THROWS_AS(sum(sp(f2, 3, "1 0 0"), sp(f2, 2, "1 0")), PreconditionError);
  }
}

TEST_CASE("modular law on random triples") {
  std::mt19937 rng(13);
  for (auto q : {2u, 3u}) {
    FiniteField f(q, 1);
    for (int trial = 0; trial < 60; ++trial) {
      Subspace u = random_subspace(rng, f, 4);
      Subspace w = random_subspace(rng, f, 4);
      CHECK(sum(u, w).dim() + intersect(u, w).dim() == u.dim() + w.dim());
    }
  }
}

TEST_CASE("annihilator") {
  FiniteField f2(2, 1);
  CHECK(annihilator(Subspace::full(f2, 3)) == Subspace::zero(f2, 3));
  CHECK(annihilator(Subspace::zero(f2, 3)) == Subspace::full(f2, 3));
  // span(e1+e2) in F_2^2 is self-annihilating under the standard pairing
  Subspace d = sp(f2, 2, "1 1");
  CHECK(annihilator(d) == d);
}

TEST_CASE("annihilator is an inclusion-reversing involution on all subspaces of F_2^3") {
  FiniteField f2(2, 1);
  // all 16 subspaces by brute force over spanning sets
  std::vector<Subspace> all;
  auto push_unique = [&](const Subspace& s) {
    for (const auto& t : all)
      if (t == s) return;
    all.push_back(s);
  };
  push_unique(Subspace::zero(f2, 3));
  std::vector<Vec> vecs;
  for (std::uint32_t a = 0; a < 2; ++a)
    for (std::uint32_t b = 0; b < 2; ++b)
      for (std::uint32_t c = 0; c < 2; ++c)
        if (a + b + c > 0) vecs.push_back(vec(f2, {a, b, c}));
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    push_unique(Subspace::span(f2, 3, {vecs[i]}));
    for (std::size_t j = 0; j < vecs.size(); ++j) {
      push_unique(Subspace::span(f2, 3, {vecs[i], vecs[j]}));
      for (std::size_t k = 0; k < vecs.size(); ++k)
        push_unique(Subspace::span(f2, 3, {vecs[i], vecs[j], vecs[k]}));
    }
  }
  REQUIRE(all.size() == 16);
  for (const auto& u : all) {
    CHECK(annihilator(u).dim() == 3 - u.dim());
    CHECK(annihilator(annihilator(u)) == u);
    for (const auto& w : all) {
      if (u.contains(w)) CHECK(annihilator(w).contains(annihilator(u)));
    }
  }
}

TEST_CASE("decomposition and project_along") {
  FiniteField f2(2, 1);
  Subspace v1 = sp(f2, 3, "1 0 0;0 1 0");
  Subspace v2 = sp(f2, 3, "0 0 1");
  Decomposition d(v1, v2);
  CHECK(d.n1() == 2);
  CHECK(d.n2() == 1);
  SUBCASE("projection fixes V1 and kills V2") {
    CHECK(project_along(v1, d) == v1);
    CHECK(project_along(v2, d) == Subspace::zero(f2, 3));
  }
  SUBCASE("graph line projects onto the first coordinate") {
    CHECK(project_along(sp(f2, 3, "1 0 1"), d) == sp(f2, 3, "1 0 0"));
  }
  SUBCASE("invalid decompositions are rejected") {
    CHECK_THROWS_AS(Decomposition(v1, sp(f2, 3, "1 0 0")), PreconditionError);
    CHECK_THROWS_AS(Decomposition(v1, v1), PreconditionError);
  }
  SUBCASE("projection dimension drops exactly when Z meets V2") {
    Subspace z = sp(f2, 3, "1 0 1;0 0 1");  // contains e3
    CHECK(intersect(z, v2).dim() == 1);
    CHECK(project_along(z, d).dim() == 1);
  }
}

TEST_CASE("decomposition with a non-rref basis") {
  FiniteField f3(3, 1);
  Matrix b = mat(f3, "1 1 0;0 1 0;0 1 1");
  Decomposition d = Decomposition::from_basis(b, 2);
  Vec v = vec(f3, {1, 2, 1});
  Vec x = d.coordinates(v);
  CHECK(d.from_coordinates(x) == v);
  Vec p1 = d.project1(v), p2 = d.project2(v);
  for (std::uint32_t i = 0; i < 3; ++i) CHECK(p1[i] + p2[i] == v[i]);
  CHECK(d.v1().contains(p1));
  CHECK(d.v2().contains(p2));
}

TEST_CASE("semilinear maps") {
  Tower t = make_tower(2, 1, 2);
  const FiniteField& f4 = t.top;
  FieldAutomorphism frob = t.group.generator();
  FieldAutomorphism ident = t.group.identity();

  SUBCASE("identity map fixes subspaces") {
    SemilinearMap s(ident, Matrix::identity(f4, 2));
    Subspace u = sp(f4, 2, "1,0 0,1");
    CHECK(s.apply(u) == u);
  }
  SUBCASE("frobenius with identity matrix fixes prime-field subspaces") {
    SemilinearMap s(frob, Matrix::identity(f4, 2));
    Subspace u = sp(f4, 2, "1,0 1,0");
    CHECK(s.apply(u) == u);
  }
  SUBCASE("frobenius moves span((1, w)) to span((1, w^2))") {
    SemilinearMap s(frob, Matrix::identity(f4, 2));
    Subspace u = Subspace::span(f4, 2, {{f4.one(), f4.element(2)}});
    Subspace expect = Subspace::span(f4, 2, {{f4.one(), f4.element(3)}});  // w^2 = w+1
    CHECK(s.apply(u) == expect);
  }
  SUBCASE("twisted homogeneity") {
    SemilinearMap s(frob, Matrix::identity(f4, 3));
    Vec v = {f4.element(2), f4.one(), f4.element(3)};
    FieldElement a = f4.element(2);
    Vec av = {a * v[0], a * v[1], a * v[2]};
    Vec lhs = s.apply(av);
    Vec rhs = s.apply(v);
    for (std::uint32_t i = 0; i < 3; ++i) CHECK(lhs[i] == frob(a) * rhs[i]);
  }
  SUBCASE("composition matches pointwise composition") {
    Matrix c1 = mat(f4, "0,1 1,0;1,0 0,0");
    Matrix c2 = mat(f4, "1,0 1,1;0,0 1,0");
    SemilinearMap s(frob, c1), tmap(frob, c2);
    SemilinearMap st = s.compose(tmap);
    CHECK(st.automorphism().is_identity());
    for (std::uint32_t i = 0; i < 4; ++i) {
      for (std::uint32_t j = 0; j < 4; ++j) {
        Vec v = {f4.element(i), f4.element(j)};
        CHECK(st.apply(v) == s.apply(tmap.apply(v)));
      }
    }
  }
  SUBCASE("inverse undoes the map") {
    Matrix c = mat(f4, "0,1 1,0;1,0 0,0");
    SemilinearMap s(frob, c);
    SemilinearMap si = s.inverse();
    for (std::uint32_t i = 0; i < 4; ++i) {
      for (std::uint32_t j = 0; j < 4; ++j) {
        Vec v = {f4.element(i), f4.element(j)};
        CHECK(si.apply(s.apply(v)) == v);
      }
    }
  }
  SUBCASE("singular matrix rejected") {
    CHECK_THROWS_AS(SemilinearMap(frob, mat(f4, "1,0 1,0;1,0 1,0")), PreconditionError);
  }
}

TEST_CASE("semilinear bijections preserve the subspace lattice") {
  Tower t = make_tower(2, 1, 2);
  const FiniteField& f4 = t.top;
  SemilinearMap s(t.group.generator(), mat(f4, "0,1 1,0 0,0;1,0 0,0 1,0;0,0 1,0 0,0"));
  std::mt19937 rng(17);
  std::uniform_int_distribution<std::uint32_t> el(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    auto rnd = [&]() { return random_subspace(rng, f4, 3); };
    Subspace u = rnd(), w = rnd();
    CHECK(s.apply(sum(u, w)) == sum(s.apply(u), s.apply(w)));
    CHECK(s.apply(intersect(u, w)) == intersect(s.apply(u), s.apply(w)));
  }
}

TEST_CASE("quotient charts") {
  FiniteField f2(2, 1);
  Subspace w2 = sp(f2, 3, "0 1 0;0 0 1");  // V2 = <e2,e3>
  Subspace t1 = sp(f2, 3, "0 1 0");        // T1 = <e2>
  QuotientChart chart(w2, t1);
  CHECK(chart.quotient_dim() == 1);
  CHECK(chart.transversal() == std::vector<std::uint32_t>{2});

  SUBCASE("kernel is exactly T1") {
    for (std::uint32_t a = 0; a < 2; ++a) {
      for (std::uint32_t b = 0; b < 2; ++b) {
        Vec v = vec(f2, {0, a, b});
        Vec q = chart.to_quotient(v);
        bool zero = std::all_of(q.begin(), q.end(), [](const FieldElement& x) { return x.is_zero(); });
        CHECK(zero == t1.contains(v));
      }
    }
  }
  SUBCASE("chart then lift round trip") {
    for (std::uint32_t b = 0; b < 2; ++b) {
      Vec q = {f2.element(b)};
      CHECK(chart.to_quotient(chart.lift(q)) == q);
    }
  }
  SUBCASE("vector outside the space is rejected") {
    CHECK_THROWS_AS(chart.to_quotient(vec(f2, {1, 0, 0})), PreconditionError);
  }
  SUBCASE("sub not contained is rejected") {
    CHECK_THROWS_AS(QuotientChart(w2, sp(f2, 3, "1 0 0")), PreconditionError);
  }
}

TEST_CASE("quotient chart on a non-coordinate pair") {
  FiniteField f3(3, 1);
  Subspace w2 = sp(f3, 4, "1 0 1 0;0 1 0 0;0 0 0 1");
  Subspace t1 = sp(f3, 4, "1 1 1 0");
  QuotientChart chart(w2, t1);
  CHECK(chart.quotient_dim() == 2);
  // surjectivity: every quotient coordinate vector has a lift in W2
  for (std::uint32_t a = 0; a < 3; ++a) {
    for (std::uint32_t b = 0; b < 3; ++b) {
      Vec q = vec(f3, {a, b});
      Vec v = chart.lift(q);
      CHECK(w2.contains(v));
      CHECK(chart.to_quotient(v) == q);
    }
  }
  // kernel over all 27 vectors of W2
  std::uint32_t kernel_count = 0;
  for (std::uint32_t a = 0; a < 3; ++a)
    for (std::uint32_t b = 0; b < 3; ++b)
      for (std::uint32_t c = 0; c < 3; ++c) {
        Vec coeff = vec(f3, {a, b, c});
        Vec v(4, f3.zero());
        for (std::uint32_t r = 0; r < 3; ++r)
          for (std::uint32_t j = 0; j < 4; ++j)
            v[j] = v[j] + coeff[r] * w2.basis().at(r, j);
        Vec q = chart.to_quotient(v);
        bool zero = std::all_of(q.begin(), q.end(), [](const FieldElement& x) { return x.is_zero(); });
        CHECK(zero == t1.contains(v));
        if (zero) ++kernel_count;
      }
  CHECK(kernel_count == 3);
}

TEST_CASE("matrix text format round trip") {
  FiniteField f4(2, 2);
  Matrix m = mat(f4, "1,0 0,1;1,1 0,0");
  CHECK(Matrix::parse(f4, m.to_string()) == m);
  FiniteField f3(3, 1);
  Matrix m3 = mat(f3, "1 2 0;0 1 1");
  CHECK(m3.to_string() == "1 2 0;0 1 1");
  Subspace s = Subspace(3, m3);
  CHECK(Subspace::parse(f3, 3, s.to_string()) == s);
}

TEST_CASE("proportionality detection") {
  FiniteField f5(5, 1);
  Matrix a = mat(f5, "1 2;3 0");
  Matrix b = a.scaled(f5.element(3));
  auto s = b.proportionality(a);
  REQUIRE(s.has_value());
  CHECK(*s == f5.element(3));
  CHECK_FALSE(mat(f5, "1 2;3 1").proportionality(a).has_value());
}
