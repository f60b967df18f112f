#include "flagdescent/checks.hpp"

#include <atomic>
#include <chrono>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "flagdescent/brauer.hpp"
#include "flagdescent/bundles.hpp"
#include "numeric_util.hpp"

namespace flagdescent::checks {

using json = nlohmann::ordered_json;

using namespace flagdescent::fields;
using namespace flagdescent::linalg;
using namespace flagdescent::flags;
using namespace flagdescent::autgroup;
using namespace flagdescent::bundles;

const char* status_name(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::error: return "error";
    case Status::skipped_budget: return "skipped-budget";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// shared fixtures

namespace {

struct FailCollector {
  CheckResult result;
  void expect(bool ok, const std::string& what) {
    if (!ok && result.status == Status::pass) {
      result.status = Status::fail;
      result.witness = what;
    }
  }
  void count(const std::string& key, std::int64_t v) { result.counts[key] = v; }
};

Decomposition coord_decomposition(const FiniteField& f, std::uint32_t n, std::uint32_t n1) {
  Matrix v1(f, n1, n), v2(f, n - n1, n);
  for (std::uint32_t i = 0; i < n1; ++i) v1.set(i, i, f.one());
  for (std::uint32_t i = 0; i < n - n1; ++i) v2.set(i, n1 + i, f.one());
  return Decomposition(Subspace(n, v1), Subspace(n, v2));
}

BundleContext coord_context(const FiniteField& f, std::uint32_t n, std::uint32_t n1,
                            std::vector<std::uint32_t> dims) {
  return BundleContext(coord_decomposition(f, n, n1),
                       SplitSignature(FlagSignature(n, std::move(dims)), n1));
}

TwistedAction omega_cocycle(const Tower& t, std::uint32_t n) {
  Matrix c = Matrix::identity(t.top, n);
  c.set(0, 0, t.top.element(2));
  return TwistedAction(t.group, {Matrix::identity(t.top, n), c});
}

// ---------------------------------------------------------------------------
// check bodies

CheckResult check_admissibility(const Budget&) {
  FailCollector c;
  std::int64_t checked = 0;
  for (std::uint32_t n = 2; n <= 8; ++n) {
    for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
      std::vector<std::uint32_t> dims;
      for (std::uint32_t d = 1; d < n; ++d)
        if (mask & (1u << (d - 1))) dims.push_back(d);
      bool paired = n >= 3;
      for (std::size_t i = 0; i < dims.size() && paired; ++i)
        paired = dims[i] + dims[dims.size() - 1 - i] == n;
      FlagSignature sig(n, dims);
      ++checked;
      c.expect(is_admissible(sig) == !paired, "classifier disagrees at " + sig.to_string());
    }
  }
  c.expect(!is_admissible(FlagSignature(3, {1, 2})), "(1,2|n=3) must be non-admissible");
  c.expect(!is_admissible(FlagSignature(4, {2})), "(2|n=4) must be non-admissible");
  c.expect(is_admissible(FlagSignature(3, {1})), "(1|n=3) must be admissible");
  c.count("signatures", checked);
  return c.result;
}

CheckResult check_tau_involution(const Budget& budget) {
  FailCollector c;
  FiniteField f2(2, 1);
  FlagContext ctx(FlagSignature(3, {1, 2}), f2, budget);
  c.expect(ctx.size() == 21, "Fl(1<2, F_2^3) must have 21 flags");
  std::int64_t fixed = 0;
  for (const auto& fl : ctx.all()) {
    c.expect(tau(tau(fl)) == fl, "tau^2 != id at " + fl.to_string());
    if (tau(fl) == fl) ++fixed;
  }
  c.count("flags", ctx.size());
  c.count("tau_fixed", fixed);
  return c.result;
}

CheckResult check_tau_not_pgl(const Budget& budget) {
  FailCollector c;
  FiniteField f2(2, 1);
  FlagContext ctx(FlagSignature(3, {1, 2}), f2, budget);
  auto pgl = enumerate_pgl(3, f2, budget);
  c.expect(pgl.size() == 168, "|PGL_3(F_2)| must be 168");
  auto perm = ctx.permutation([](const Flag& fl) { return tau(fl); });
  c.expect(!is_pgl_induced(perm, ctx, budget).has_value(),
           "tau's permutation must not be induced by any projective-linear map");
  c.count("pgl_candidates", std::int64_t(pgl.size()));
  return c.result;
}

CheckResult check_tau_normalizes(const Budget& budget) {
  FailCollector c;
  FiniteField f2(2, 1);
  FlagContext ctx(FlagSignature(3, {1, 2}), f2, budget);
  auto tau_perm = ctx.permutation([](const Flag& fl) { return tau(fl); });
  std::vector<std::uint32_t> tau_inv(tau_perm.size());
  for (std::uint32_t i = 0; i < tau_perm.size(); ++i) tau_inv[tau_perm[i]] = i;
  std::set<std::vector<std::uint32_t>> pgl_perms;
  for (const auto& g : enumerate_pgl(3, f2, budget)) {
    pgl_perms.insert(ctx.permutation([&](const Flag& fl) { return g.apply(fl); }));
  }
  c.expect(pgl_perms.size() == 168, "the action of PGL_3(F_2) on flags must be faithful");
  std::int64_t conjugates = 0;
  for (const auto& p : pgl_perms) {
    std::vector<std::uint32_t> conj(p.size());
    for (std::uint32_t i = 0; i < p.size(); ++i) conj[i] = tau_perm[p[tau_inv[i]]];
    ++conjugates;
    if (pgl_perms.count(conj) != 1) {
      c.expect(false, "a tau-conjugate fell outside the projective-linear permutations");
      break;
    }
  }
  c.count("conjugates", conjugates);
  return c.result;
}

CheckResult check_counting(const Budget& budget) {
  FailCollector c;
  for (std::uint32_t q : {2u, 3u}) {
    FiniteField f(q, 1);
    for (std::uint32_t n = 1; n <= 5; ++n) {
      for (std::uint32_t d = 0; d <= n; ++d) {
        SubspaceStream stream(f, n, d, budget);
        std::set<std::string> keys;
        for (std::uint64_t i = 0; i < stream.size(); ++i)
          keys.insert(stream.at(i).storage_key());
        c.expect(keys.size() == gaussian_binomial(n, d, q),
                 "subspace count mismatch at n=" + std::to_string(n) + " d=" + std::to_string(d) +
                     " q=" + std::to_string(q));
      }
    }
  }
  // nested exhaustion oracle for the two flag counts
  for (std::uint32_t q : {2u, 3u}) {
    FiniteField f(q, 1);
    auto lines = enumerate_subspaces(f, 3, 1, budget);
    auto planes = enumerate_subspaces(f, 3, 2, budget);
    std::int64_t nested = 0;
    for (const auto& l : lines)
      for (const auto& p : planes)
        if (p.contains(l)) ++nested;
    std::uint64_t stream_count = enumerate_flags(FlagSignature(3, {1, 2}), f, budget).size();
    std::uint64_t expected = (q == 2) ? 21 : 52;
    c.expect(std::uint64_t(nested) == expected, "nested exhaustion count is off");
    c.expect(stream_count == expected, "flag stream count is off");
    c.expect(flag_count(FlagSignature(3, {1, 2}), q) == expected, "flag count formula is off");
    c.count(q == 2 ? "flags_f2" : "flags_f3", nested);
  }
  return c.result;
}

struct VbInstance {
  std::uint32_t q, n, n1;
  std::vector<std::uint32_t> dims;
};

const std::vector<VbInstance>& vb_instances() {
  static const std::vector<VbInstance> instances = {
      {2, 3, 2, {1}}, {2, 3, 1, {2}}, {2, 4, 2, {1, 3}},
      {3, 3, 2, {1}}, {3, 3, 1, {2}}, {3, 4, 2, {1, 3}},
  };
  return instances;
}

CheckResult check_vb_charts(const Budget& budget) {
  FailCollector c;
  std::int64_t round_trips = 0;
  for (const auto& inst : vb_instances()) {
    FiniteField f(inst.q, 1);
    BundleContext ctx = coord_context(f, inst.n, inst.n1, inst.dims);
    const std::string tag = " at q=" + std::to_string(inst.q) + " n=" + std::to_string(inst.n) +
                            " n1=" + std::to_string(inst.n1);
    std::uint64_t in_u = 0;
    for (const auto& fl : enumerate_flags(ctx.full_signature(), f, budget)) {
      if (!in_U(fl, ctx)) continue;
      ++in_u;
      PsiFiberPoint pt = coord_psi(fl, ctx);
      c.expect(param_psi(pt.base, pt.f, pt.g, ctx) == fl, "param after coord is not the identity" + tag);
      ++round_trips;
    }
    std::uint64_t base_count = 0, fiber_points = 0;
    for (const auto& base : enumerate_base_points(ctx, budget)) {
      ++base_count;
      // zero section
      Matrix f0(f, ctx.dp(), ctx.n2());
      Matrix g0(f, ctx.n1(), ctx.quotient_dim());
      Flag zs = param_psi(base, f0, g0, ctx);
      for (std::uint32_t i = 0; i < ctx.p(); ++i)
        c.expect(zs.part(i) == base.s_chain[i], "zero section misses the base" + tag);
      for (std::uint32_t j = 0; j < ctx.q(); ++j)
        c.expect(zs.part(ctx.p() + j) == linalg::sum(ctx.decomposition().v1(), base.t_chain[j]),
                 "zero section upper part is off" + tag);
      for (const auto& [fm, gm] : enumerate_fiber(base, ctx, budget)) {
        Flag fl = param_psi(base, fm, gm, ctx);
        PsiFiberPoint pt = coord_psi(fl, ctx);
        c.expect(pt.base == base && pt.f == fm && pt.g == gm,
                 "coord after param is not the identity" + tag);
        ++fiber_points;
        ++round_trips;
      }
    }
    std::uint64_t rank_size = flagdescent::detail::checked_pow_u64(inst.q, ctx.fiber_dim());
    c.expect(in_u == base_count * rank_size, "|U| != |base| * q^rank" + tag);
    c.expect(fiber_points == in_u, "charts do not cover U exactly once" + tag);
  }
  c.count("round_trips", round_trips);
  return c.result;
}

CheckResult check_kernel_equivalence(const Budget& budget) {
  FailCollector c;
  FiniteField f2(2, 1);
  BundleContext ctx = coord_context(f2, 4, 2, {1, 3});
  std::int64_t pairs = 0;
  for (const auto& base : enumerate_base_points(ctx, budget)) {
    Matrix big = fiber_constraint_matrix(base, ctx);
    auto rr = rref(big);
    c.expect(rr.rank == ctx.dp() * ctx.quotient_dim(), "constraint map must be surjective");
    c.expect(big.cols() - rr.rank == ctx.fiber_dim(), "kernel dimension must be 3");
    std::uint64_t kernel_count = 0;
    for (const auto& fm : all_matrices(f2, ctx.dp(), ctx.n2(), budget)) {
      for (const auto& gm : all_matrices(f2, ctx.n1(), ctx.quotient_dim(), budget)) {
        ++pairs;
        bool kernel_zero = fiber_constraint(base, fm, gm, ctx).is_zero();
        Flag zs = param_phi1(Flag(ctx.lower_signature(), base.s_chain), fm, ctx);
        Flag ws = param_phi2(Flag(FlagSignature(ctx.n(), ctx.upper_quotient_dims()), base.t_chain),
                             gm, ctx);
        bool contained = ws.part(0).contains(zs.part(0));
        c.expect(kernel_zero == contained,
                 "containment and the constraint disagree at " + base.storage_key());
        if (kernel_zero) ++kernel_count;
      }
    }
    c.expect(kernel_count == 8, "the psi fiber must have q^3 = 8 points");
  }
  c.expect(pairs == 9 * 16, "exactly 9 base points x 16 coordinate pairs");
  c.count("pairs", pairs);
  return c.result;
}

CheckResult check_equivariance(const Budget& budget) {
  FailCollector c;
  Tower t = make_tower(2, 1, 2);
  const FiniteField& f4 = t.top;
  FlagSignature sig(3, {1, 2});
  std::int64_t scans = 0;

  auto run_instance = [&](const TwistedAction& act, const BundleContext& ctx,
                          const std::string& tag) {
    c.expect(validate_cocycle(act, sig, budget).valid, "cocycle must validate " + tag);
    auto eq = equivariance_check(act, ctx, budget);
    c.expect(eq.passed, "equivariance scan failed " + tag);
    auto fa = fiber_action_check(act, ctx, budget);
    c.expect(fa.passed, "fiber action scan failed " + tag);
    scans += std::int64_t(eq.checks + fa.checks);
  };

  run_instance(TwistedAction::trivial(t.group, 3), coord_context(f4, 3, 1, {1, 2}),
               "(trivial, n1=1)");
  run_instance(omega_cocycle(t, 3), coord_context(f4, 3, 1, {1, 2}), "(twisted, n1=1)");
  run_instance(omega_cocycle(t, 3), coord_context(f4, 3, 2, {1, 2}), "(twisted, n1=2)");

  // negative control: an off-block lift passes cocycle validation but is
  // rejected by the checked entry point, and the raw scan finds violations
  {
    BundleContext ctx = coord_context(f4, 3, 1, {1, 2});
    Matrix bad = Matrix::identity(f4, 3);
    bad.set(0, 2, f4.one());
    TwistedAction act(t.group, {Matrix::identity(f4, 3), bad});
    c.expect(validate_cocycle(act, sig, budget).valid, "control lift must still be a cocycle");
    bool rejected = false;
    try {
      equivariance_check(act, ctx, budget);
    } catch (const PreconditionError&) {
      rejected = true;
    }
    c.expect(rejected, "off-block lift must be rejected");
    auto scan = equivariance_scan(act, ctx, budget);
    c.expect(!scan.passed && !scan.violations.empty(),
             "the raw scan must catch the off-block lift");
  }
  c.count("identity_checks", scans);
  return c.result;
}

CheckResult check_splitting(const Budget&) {
  FailCollector c;
  Tower t = make_tower(2, 3, 1);
  const FiniteField& f8 = t.top;
  FieldElement lambda = f8.element(2);
  c.expect(lambda.multiplicative_order() == 7, "the chosen element must have order 7");
  TwistedAction act = TwistedAction::trivial(t.group, 3);
  ProjectiveMap g(Matrix::diagonal(f8, {f8.one(), f8.one(), lambda}));
  SplitResult res = split_from_automorphism(g, act);
  c.expect(res.order_g == 7 && res.paper_order_condition, "order 7 exceeds 3! = 6");
  c.expect(res.decomposition.n1() == 2, "V1 must be the plane fixed by h^6");
  c.expect(res.decomposition.v2() ==
               Subspace::span(f8, 3, {{f8.zero(), f8.zero(), f8.one()}}),
           "V2 must be the lambda-eigenline");
  bool blocks = true;
  for (bool b : res.block_diagonal) blocks = blocks && b;
  c.expect(blocks, "every lift must be block-diagonal in the eigenbasis");
  for (const auto& nu : res.nu) {
    c.expect(nu.multiplicative_order() <= 3, "nu must have order at most n");
  }
  // the scalar-power input errors as specified
  Tower t4 = make_tower(2, 2, 1);
  const FiniteField& f4 = t4.top;
  TwistedAction act4 = TwistedAction::trivial(t4.group, 3);
  ProjectiveMap small(Matrix::diagonal(f4, {f4.one(), f4.one(), f4.element(2)}));
  bool scalar_error = false;
  try {
    split_from_automorphism(small, act4);
  } catch (const PreconditionError& e) {
    scalar_error = std::string(e.what()).find("scalar") != std::string::npos;
  }
  c.expect(scalar_error, "h^{n!} scalar must be a distinct error");
  c.count("nu_values", std::int64_t(res.nu.size()));
  return c.result;
}

CheckResult check_descent(const Budget& budget) {
  FailCollector c;
  Tower t = make_tower(2, 1, 2);
  const FiniteField& f4 = t.top;

  auto run_instance = [&](const TwistedAction& act, const BundleContext& ctx,
                          const std::string& tag) -> DescentReport {
    DescentReport rep = descent_count_check(act, ctx, budget);
    c.expect(rep.passed, "descent count mismatch " + tag);
    c.expect(rep.fixed_flags_in_u == rep.predicted, "both sides must agree exactly " + tag);
    return rep;
  };

  auto r1 = run_instance(TwistedAction::trivial(t.group, 3), coord_context(f4, 3, 1, {1, 2}),
                         "(trivial, n1=1)");
  c.count("trivial_fixed_in_u", std::int64_t(r1.fixed_flags_in_u));
  auto r2 = run_instance(omega_cocycle(t, 3), coord_context(f4, 3, 1, {1, 2}), "(twisted, n1=1)");
  c.count("twisted_fixed_in_u", std::int64_t(r2.fixed_flags_in_u));
  run_instance(omega_cocycle(t, 3), coord_context(f4, 3, 2, {1, 2}), "(twisted, n1=2)");

  // trivial-cocycle fixed-flag counts equal base-field flag counts
  {
    auto fixed = fixed_flags(TwistedAction::trivial(t.group, 3), FlagSignature(3, {1, 2}), budget);
    c.expect(fixed.size() == 21, "F_4/F_2 rational flags must number 21");
  }
  {
    Tower t9 = make_tower(3, 1, 2);
    auto fixed = fixed_flags(TwistedAction::trivial(t9.group, 3), FlagSignature(3, {1, 2}), budget);
    c.expect(fixed.size() == 52, "F_9/F_3 rational flags must number 52");
    c.count("f9_rational_flags", std::int64_t(fixed.size()));
  }
  return c.result;
}

CheckResult check_cyclic_algebras(const Budget& budget) {
  FailCollector c;
  // (F_5, 2, 1, 1)
  {
    FiniteField f5(5, 1);
    auto alg = brauer::make_cyclic(f5, 2, f5.one(), f5.one());
    c.expect(alg.table.verify_associativity(), "F_5 algebra associativity");
    c.expect(alg.table.center_dimension() == 1, "F_5 algebra center");
    auto u = alg.x1() - alg.scalar(f5.one());
    auto v = alg.x1() + alg.scalar(f5.one());
    c.expect((u * v).is_zero() && !u.is_zero() && !v.is_zero(), "(x1-1)(x1+1) must vanish");
    auto zd = brauer::zero_divisor_search(alg.table, budget);
    c.expect(zd.status == brauer::SearchStatus::found, "zero divisor search over F_5");
  }
  // (F_4, 3, w, w)
  {
    FiniteField f4(2, 2);
    auto alg = brauer::make_cyclic(f4, 3, f4.element(2), f4.element(2));
    c.expect(alg.table.verify_associativity(), "F_4 algebra associativity (729 triples)");
    c.expect(alg.table.center_dimension() == 1, "F_4 algebra center");
    auto zd = brauer::zero_divisor_search(alg.table, budget);
    c.expect(zd.status == brauer::SearchStatus::found, "zero divisor search over F_4");
  }
  // Hamilton quaternions
  {
    auto h = brauer::make_cyclic_rational(2, brauer::Rational(-1), brauer::Rational(-1));
    c.expect(h.table.verify_associativity(), "quaternion associativity");
    c.expect(h.table.center_dimension() == 1, "quaternion center");
    auto i = h.x1(), j = h.x2();
    c.expect(i * i == h.scalar(brauer::Rational(-1)), "i^2 = -1");
    c.expect(j * j == h.scalar(brauer::Rational(-1)), "j^2 = -1");
    c.expect(i * j == h.scalar(brauer::Rational(-1)) * (j * i), "ij = -ji");
  }
  // quaternion verdicts
  c.expect(!brauer::quaternion_splits_Q(-1, -1).splits, "(-1,-1) must not split");
  c.expect(brauer::quaternion_splits_Q(1, 7).splits, "(1,b) must split");
  c.expect(brauer::quaternion_splits_Q(5, -5).splits, "(a,-a) must split");
  std::int64_t formula_pairs = 0;
  for (long long a = -50; a <= 50; ++a) {
    if (a == 0) continue;
    for (long long b = -50; b <= 50; ++b) {
      if (b == 0) continue;
      ++formula_pairs;
      if (!brauer::quaternion_splits_Q(a, b).product_formula_ok) {
        c.expect(false, "product formula failed at (" + std::to_string(a) + "," +
                            std::to_string(b) + ")");
        return c.result;
      }
    }
  }
  c.count("product_formula_pairs", formula_pairs);
  return c.result;
}

CheckResult check_bs2_chain(const Budget&) {
  FailCollector c;
  std::int64_t combos = 0;
  for (bool st : {false, true}) {
    for (bool ce : {false, true}) {
      for (bool ct : {false, true}) {
        ++combos;
        auto v = brauer::index_chain_bs_surface(st, ce, ct);
        c.expect(v.contradiction == (!st && ce), "contradictions fire exactly for (nontrivial, curve)");
        c.expect(v.ruled == st, "only the trivial surface is ruled");
      }
    }
  }
  auto v = brauer::index_chain_bs_surface(false, true, false);
  c.expect(v.branch == "index-contradiction", "the 2-does-not-divide-3 branch must fire");
  bool saw_facts = false;
  for (const auto& fact : v.facts) {
    if (!fact.consistent() && fact.value == 3 && fact.divisors == std::vector<std::uint64_t>{2})
      saw_facts = true;
  }
  c.expect(saw_facts, "the verdict must carry ind = 3 with the failed divisor 2");
  c.count("combos", combos);
  return c.result;
}

CheckResult check_towers(const Budget& budget) {
  FailCollector c;
  for (auto [p, b, r] :
       std::vector<std::array<std::uint32_t, 3>>{{2, 1, 2}, {2, 1, 3}, {3, 1, 2}, {2, 2, 2}}) {
    Tower t = make_tower(p, b, r, budget);
    FieldAutomorphism gen = t.group.generator();
    std::uint64_t fixed = 0;
    for (std::uint32_t i = 0; i < t.top.cardinality(); ++i) {
      FieldElement x = t.top.element(i);
      bool is_fixed = gen(x) == x;
      c.expect(is_fixed == t.group.is_in_base(x), "fixed field differs from the embedded base");
      if (is_fixed) ++fixed;
    }
    c.expect(fixed == t.base.cardinality(), "fixed-point count must equal the base cardinality");
  }
  c.count("towers", 4);
  return c.result;
}

// ---------------------------------------------------------------------------
// registry

std::vector<CheckDef> build_registry() {
  std::vector<CheckDef> defs;
  defs.push_back(CheckDef{
      "autgroup.admissibility",
      "Admissibility classifier",
      "the classifier agrees with the pairing condition d_i + d_{r+1-i} = n (n >= 3) on every "
      "signature with n <= 8, and matches the three spot values",
      {{"n", "2..8"}},
      {"paper", "smoke"},
      check_admissibility});
  defs.push_back(CheckDef{
      "autgroup.tau-involution",
      "The dual involution squares to the identity",
      "tau composed with itself fixes all 21 flags of the full flag variety of F_2^3; the "
      "fixed-flag count is reported",
      {{"signature", "1,2"}, {"field", "2^1"}},
      {"paper"},
      check_tau_involution});
  defs.push_back(CheckDef{
      "autgroup.tau-not-pgl",
      "The dual involution is not projective-linear",
      "no element among the 168 of PGL_3(F_2) induces tau's permutation of the 21 flags",
      {{"signature", "1,2"}, {"field", "2^1"}, {"pgl_order", "168"}},
      {"paper", "smoke"},
      check_tau_not_pgl});
  defs.push_back(CheckDef{
      "autgroup.tau-normalizes-pgl",
      "The dual involution normalizes the projective-linear group",
      "conjugating each of the 168 flag permutations by tau lands back in the set of "
      "projective-linear permutations",
      {{"signature", "1,2"}, {"field", "2^1"}},
      {"paper"},
      check_tau_normalizes});
  defs.push_back(CheckDef{
      "flags.counting",
      "Enumeration counts match the Gaussian binomials",
      "the canonical subspace stream yields each subspace exactly once with the Gaussian binomial "
      "count for all n <= 5, q in {2,3}; the (1<2)-flag counts over F_2^3 and F_3^3 are 21 and 52 "
      "by nested exhaustion",
      {{"n", "1..5"}, {"q", "2,3"}},
      {"paper"},
      check_counting});
  defs.push_back(CheckDef{
      "bundles.vector-bundle-charts",
      "Fiber charts are mutually inverse with the exact cardinalities",
      "for six decomposition instances the chart maps are mutually inverse on every point of U, "
      "|U| = |base| * q^rank exactly, and zero sections land on the base",
      {{"instances", "(q=2,3) x {(3,2,(1)), (3,1,(2)), (4,2,(1,3))}"}},
      {"paper"},
      check_vb_charts});
  defs.push_back(CheckDef{
      "bundles.kernel-equivalence",
      "The incidence constraint is the chart kernel",
      "on every base point and all 16 coordinate pairs, Z_1 <= W_1 holds exactly when "
      "u o f - g o i = 0; the constraint map is surjective and its kernel has dimension 3",
      {{"q", "2"}, {"n", "4"}, {"n1", "2"}, {"dims", "1,3"}},
      {"paper", "smoke"},
      check_kernel_equivalence});
  defs.push_back(CheckDef{
      "bundles.equivariance",
      "Twisted actions respect the charts",
      "for the trivial and a twisted block-diagonal cocycle over F_4/F_2, the loci are invariant, "
      "the chart maps intertwine the actions, the fiber transport is additive and twisted-"
      "homogeneous, and an off-block lift is rejected while the raw scan pinpoints its violations",
      {{"tower", "2,1,2"}, {"signature", "1,2"}, {"n1", "1,2"}},
      {"paper"},
      check_equivariance});
  defs.push_back(CheckDef{
      "bundles.splitting",
      "Eigenspace splitting from a commuting finite-order map",
      "over F_8 the diagonal map of order 7 > 3! splits V into the h^6-eigenplane and eigenline "
      "with block-diagonal lifts and nu of order at most 3; a scalar h^{n!} input raises the "
      "dedicated error",
      {{"field", "2^3"}, {"order", "7"}},
      {"paper", "smoke"},
      check_splitting});
  defs.push_back(CheckDef{
      "bundles.descent-count",
      "Fixed flags in U match the fixed-base fiber count",
      "for every instance of the equivariance check, the number of action-fixed flags of U equals "
      "the number of fixed base points times q_base^rank; trivial-cocycle fixed counts equal the "
      "base-field flag counts 21 and 52",
      {{"towers", "2,1,2 and 3,1,2"}, {"signature", "1,2"}},
      {"paper"},
      check_descent});
  defs.push_back(CheckDef{
      "brauer.cyclic-algebras",
      "Cyclic algebras by structure constants",
      "the three pinned algebras are associative with one-dimensional center; the finite-field "
      "ones contain zero divisors; the rational quaternions satisfy the defining relations; the "
      "(-1,-1) algebra is non-split by local symbols and the product formula holds for all "
      "|a|,|b| <= 50",
      {{"algebras", "(5^1,2,1,1), (2^2,3,w,w), (Q,2,-1,-1)"}},
      {"paper"},
      check_cyclic_algebras});
  defs.push_back(CheckDef{
      "brauer.bs2-chain",
      "The index chain for surface forms",
      "all eight hypothesis combinations produce deterministic verdicts; ruledness holds exactly "
      "for the trivial surface; the nontrivial-curve branch derives the contradiction 2 does not "
      "divide 3 with the exact index facts",
      {{"combinations", "8"}},
      {"paper", "smoke"},
      check_bs2_chain});
  defs.push_back(CheckDef{
      "fields.towers",
      "Fixed fields of tower generators",
      "for four towers the fixed points of the generator are exactly the embedded base field",
      {{"towers", "(2,1,2), (2,1,3), (3,1,2), (2,2,2)"}},
      {"smoke"},
      check_towers});
  return defs;
}

}  // namespace

const std::vector<CheckDef>& registry() {
  static const std::vector<CheckDef> defs = build_registry();
  return defs;
}

const CheckDef& find_check(const std::string& id) {
  for (const auto& def : registry()) {
    if (def.id == id) return def;
  }
  std::string valid;
  for (const auto& def : registry()) {
    if (!valid.empty()) valid += ", ";
    valid += def.id;
  }
  throw PreconditionError("unknown check id '" + id + "'; valid ids: " + valid);
}

// ---------------------------------------------------------------------------
// plans

Plan Plan::suite(const std::string& name) {
  Plan plan;
  bool any = false;
  for (const auto& def : registry()) {
    for (const auto& s : def.suites) {
      if (s == name) {
        plan.check_ids.push_back(def.id);
        any = true;
      }
    }
  }
  if (!any) throw PreconditionError("unknown suite '" + name + "'; valid suites: paper, smoke");
  return plan;
}

Plan Plan::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed plan JSON: ") + e.what());
  }
  Plan plan;
  if (!j.is_object()) throw PreconditionError("plan must be a JSON object");
  if (j.contains("budget")) {
    if (!j["budget"].is_number_unsigned()) throw PreconditionError("plan budget must be a positive integer");
    plan.budget.max_items = j["budget"].get<std::uint64_t>();
  }
  if (j.contains("width")) {
    if (!j["width"].is_number_unsigned() || j["width"].get<std::uint64_t>() == 0)
      throw PreconditionError("plan width must be a positive integer");
    plan.width = j["width"].get<std::uint32_t>();
  }
  if (!j.contains("checks") || !j["checks"].is_array())
    throw PreconditionError("plan requires a 'checks' array");
  for (const auto& item : j["checks"]) {
    if (!item.is_string()) throw PreconditionError("plan check entries must be id strings");
    find_check(item.get<std::string>());  // validates
    plan.check_ids.push_back(item.get<std::string>());
  }
  return plan;
}

std::string Plan::to_json_text() const {
  json j;
  j["schema"] = 1;
  j["budget"] = budget.max_items;
  j["width"] = width;
  j["checks"] = check_ids;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// reports

bool Report::all_passed() const {
  for (const auto& e : entries) {
    if (e.status != Status::pass) return false;
  }
  return true;
}

bool Report::any_failed() const {
  for (const auto& e : entries) {
    if (e.status == Status::fail || e.status == Status::error) return true;
  }
  return false;
}

bool Report::any_skipped() const {
  for (const auto& e : entries) {
    if (e.status == Status::skipped_budget) return true;
  }
  return false;
}

int Report::exit_code() const {
  if (any_failed()) return 1;
  if (any_skipped()) return 3;
  return 0;
}

std::string Report::to_json_text(bool mask_timing) const {
  json j;
  j["schema_version"] = schema_version;
  j["tool_version"] = tool_version;
  j["plan"] = json::parse(plan.to_json_text());
  json entries_json = json::array();
  for (const auto& e : entries) {
    json ej;
    ej["id"] = e.id;
    ej["status"] = status_name(e.status);
    json counts = json::object();
    for (const auto& [k, v] : e.counts) counts[k] = v;
    ej["counts"] = counts;
    ej["witness"] = e.witness;
    ej["wall_ms"] = mask_timing ? 0.0 : e.wall_ms;
    entries_json.push_back(ej);
  }
  j["entries"] = entries_json;
  return j.dump(2);
}

std::string Report::summary() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << status_name(e.status) << "  " << e.id;
    if (!e.witness.empty()) os << "  [" << e.witness << "]";
    os << "\n";
  }
  std::size_t passed = 0;
  for (const auto& e : entries) {
    if (e.status == Status::pass) ++passed;
  }
  os << passed << "/" << entries.size() << " checks passed\n";
  return os.str();
}

Report run(const Plan& plan) {
  Report report;
  report.plan = plan;
  report.entries.resize(plan.check_ids.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= plan.check_ids.size()) return;
      const CheckDef& def = find_check(plan.check_ids[i]);
      ReportEntry entry;
      entry.id = def.id;
      auto start = std::chrono::steady_clock::now();
      try {
        CheckResult result = def.run(plan.budget);
        entry.status = result.status;
        entry.counts = std::move(result.counts);
        entry.witness = std::move(result.witness);
      } catch (const BudgetError& e) {
        entry.status = Status::skipped_budget;
        entry.witness = e.what();
      } catch (const std::exception& e) {
        entry.status = Status::error;
        entry.witness = e.what();
      }
      entry.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      report.entries[i] = std::move(entry);
    }
  };

  std::uint32_t width = std::max(1u, plan.width);
  if (width == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::uint32_t w = 0; w < width; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return report;
}

std::string explain(const std::string& id) {
  const CheckDef& def = find_check(id);
  std::ostringstream os;
  os << def.id << ": " << def.title << "\n";
  os << "  verifies: " << def.what << "\n";
  if (!def.instance.empty()) {
    os << "  instance:";
    for (const auto& [k, v] : def.instance) os << " " << k << "=" << v;
    os << "\n";
  }
  os << "  suites:";
  for (const auto& s : def.suites) os << " " << s;
  os << "\n";
  return os.str();
}

}  // namespace flagdescent::checks
