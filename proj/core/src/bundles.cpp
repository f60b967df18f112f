#include "flagdescent/bundles.hpp"

#include <algorithm>

#include "numeric_util.hpp"

namespace flagdescent::bundles {

using fields::FieldAutomorphism;
using flags::enumerate_chains_in;
using flags::enumerate_flags;
using linalg::intersect;
using linalg::kernel;
using linalg::project_along;
using linalg::QuotientChart;
using linalg::rref;
using linalg::solve;
using linalg::sum;

// ---------------------------------------------------------------------------
// BundleContext

BundleContext::BundleContext(Decomposition d, SplitSignature split)
    : d_(std::move(d)), split_(std::move(split)) {
  if (d_.n() != split_.full().ambient())
    throw PreconditionError("decomposition and signature ambient dimensions differ");
  if (d_.n1() != split_.n1()) throw PreconditionError("decomposition does not match the split index");
}

FlagSignature BundleContext::lower_signature() const {
  if (p() == 0) throw PreconditionError("the lower part is empty");
  return FlagSignature(n(), split_.lower());
}

FlagSignature BundleContext::upper_signature() const {
  if (q() == 0) throw PreconditionError("the upper part is empty");
  return FlagSignature(n(), split_.upper());
}

std::vector<std::uint32_t> BundleContext::upper_quotient_dims() const {
  std::vector<std::uint32_t> dims;
  for (auto e : split_.upper()) dims.push_back(e - n1());
  return dims;
}

std::string BasePoint::storage_key() const {
  std::string key = "S:";
  for (const auto& s : s_chain) key += s.storage_key();
  key += "T:";
  for (const auto& t : t_chain) key += t.storage_key();
  return key;
}

// ---------------------------------------------------------------------------
// small helpers

namespace {

// Coordinates of v (a member of S) in the RREF basis of S: the entries of v
// at S's pivot columns.
Vec coords_in(const Subspace& s, const Vec& v) {
  Vec x;
  x.reserve(s.dim());
  for (auto c : s.pivots()) x.push_back(v[c]);
  return x;
}

Vec v1_coords(const BundleContext& ctx, const Vec& v) {
  Vec x = ctx.decomposition().coordinates(v);
  return Vec(x.begin(), x.begin() + ctx.n1());
}

Vec v2_coords(const BundleContext& ctx, const Vec& v) {
  Vec x = ctx.decomposition().coordinates(v);
  return Vec(x.begin() + ctx.n1(), x.end());
}

// row vector times matrix
Vec row_times(const Vec& x, const Matrix& m) {
  Vec out(m.cols(), m.field().zero());
  for (std::uint32_t i = 0; i < m.rows(); ++i) {
    if (x[i].is_zero()) continue;
    for (std::uint32_t j = 0; j < m.cols(); ++j) out[j] = out[j] + x[i] * m.at(i, j);
  }
  return out;
}

// Ambient image rows of f: row j is the V2 vector with V2-basis coordinates
// f.row(j).
Matrix f_ambient(const BundleContext& ctx, const Matrix& f) {
  const Matrix v2b = ctx.decomposition().basis().row_slice(ctx.n1(), ctx.n());
  return f * v2b;
}

QuotientChart chart_of(const BundleContext& ctx, const Subspace& t1) {
  return QuotientChart(ctx.decomposition().v2(), t1);
}

Vec add_vec(const Vec& a, const Vec& b) {
  Vec out(a.size(), a.empty() ? FieldElement() : a[0]);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

void check_dims(const Flag& flag, const std::vector<std::uint32_t>& dims, const char* what) {
  if (flag.signature().dims() != dims)
    throw PreconditionError(std::string("signature mismatch in ") + what);
}

std::vector<Subspace> chain_slice(const Flag& flag, std::uint32_t from, std::uint32_t to) {
  return std::vector<Subspace>(flag.chain().begin() + from, flag.chain().begin() + to);
}

std::vector<Subspace> phi1_chain(const std::vector<Subspace>& zs, const BundleContext& ctx) {
  std::vector<Subspace> out;
  out.reserve(zs.size());
  for (const auto& z : zs) out.push_back(project_along(z, ctx.decomposition()));
  return out;
}

std::vector<Subspace> phi2_chain(const std::vector<Subspace>& ws, const BundleContext& ctx) {
  std::vector<Subspace> out;
  out.reserve(ws.size());
  for (const auto& w : ws) out.push_back(intersect(w, ctx.decomposition().v2()));
  return out;
}

bool u1_condition(const Subspace& zp, const BundleContext& ctx) {
  return intersect(zp, ctx.decomposition().v2()).dim() == 0;
}

bool u2_condition(const Subspace& w1, const BundleContext& ctx) {
  return sum(w1, ctx.decomposition().v2()).dim() == ctx.n();
}

// Z_i = {v + f(v) : v in S_i} for every member of the chain; f is dp x n2 in
// V2-basis coordinates, evaluated through the coordinates of S_p.
std::vector<Subspace> graph_chain(const std::vector<Subspace>& s_chain, const Matrix& f,
                                  const BundleContext& ctx) {
  const Subspace& sp = s_chain.back();
  const Matrix famb = f_ambient(ctx, f);
  std::vector<Subspace> out;
  for (const auto& si : s_chain) {
    std::vector<Vec> rows;
    for (std::uint32_t r = 0; r < si.dim(); ++r) {
      Vec s = si.basis().row(r);
      Vec x = coords_in(sp, s);
      rows.push_back(add_vec(s, row_times(x, famb)));
    }
    out.push_back(Subspace::span(ctx.field(), ctx.n(), rows));
  }
  return out;
}

// W_1 = span{b_i + lift(g_i)} + T_1, W_j = W_1 + T_j.
std::vector<Subspace> preimage_chain(const std::vector<Subspace>& t_chain, const Matrix& g,
                                     const BundleContext& ctx) {
  const QuotientChart chart = chart_of(ctx, t_chain.front());
  std::vector<Vec> w1_rows;
  for (std::uint32_t i = 0; i < ctx.n1(); ++i) {
    Vec bi = ctx.decomposition().basis().row(i);
    w1_rows.push_back(add_vec(bi, chart.lift(g.row(i))));
  }
  for (std::uint32_t r = 0; r < t_chain.front().dim(); ++r)
    w1_rows.push_back(t_chain.front().basis().row(r));
  std::vector<Subspace> out;
  Subspace w1 = Subspace::span(ctx.field(), ctx.n(), w1_rows);
  out.push_back(w1);
  for (std::size_t j = 1; j < t_chain.size(); ++j) out.push_back(sum(w1, t_chain[j]));
  return out;
}

// f-coordinates of a chain in U1: row j of the result is the V2-coordinate
// vector of the unique z in Z_p over the j-th basis vector of S_p.
Matrix chart_f(const std::vector<Subspace>& zs, const std::vector<Subspace>& ss,
               const BundleContext& ctx) {
  const Subspace& zp = zs.back();
  const Subspace& sp = ss.back();
  const std::uint32_t dp = ctx.dp();
  // columns: pr1 of the basis rows of Z_p
  Matrix a(ctx.field(), ctx.n(), dp);
  for (std::uint32_t i = 0; i < dp; ++i) {
    Vec pi = ctx.decomposition().project1(zp.basis().row(i));
    for (std::uint32_t r = 0; r < ctx.n(); ++r) a.set(r, i, pi[r]);
  }
  Matrix f(ctx.field(), dp, ctx.n2());
  for (std::uint32_t j = 0; j < dp; ++j) {
    auto y = solve(a, sp.basis().row(j));
    if (!y) throw Error("projection is not surjective on the chart domain");  // cannot happen in U1
    Vec z(ctx.n(), ctx.field().zero());
    for (std::uint32_t i = 0; i < dp; ++i) {
      for (std::uint32_t c = 0; c < ctx.n(); ++c) z[c] = z[c] + (*y)[i] * zp.basis().at(i, c);
    }
    Vec fc = v2_coords(ctx, z);
    for (std::uint32_t c = 0; c < ctx.n2(); ++c) f.set(j, c, fc[c]);
  }
  return f;
}

// g-coordinates of a chain in U2.
Matrix chart_g(const std::vector<Subspace>& ws, const std::vector<Subspace>& ts,
               const BundleContext& ctx) {
  const Subspace& w1 = ws.front();
  const QuotientChart chart = chart_of(ctx, ts.front());
  const std::uint32_t e1 = w1.dim();
  Matrix a(ctx.field(), ctx.n(), e1);
  for (std::uint32_t i = 0; i < e1; ++i) {
    Vec pi = ctx.decomposition().project1(w1.basis().row(i));
    for (std::uint32_t r = 0; r < ctx.n(); ++r) a.set(r, i, pi[r]);
  }
  Matrix g(ctx.field(), ctx.n1(), ctx.quotient_dim());
  for (std::uint32_t i = 0; i < ctx.n1(); ++i) {
    Vec bi = ctx.decomposition().basis().row(i);
    auto y = solve(a, bi);
    if (!y) throw Error("W_1 does not surject onto V_1");  // cannot happen in U2
    Vec w(ctx.n(), ctx.field().zero());
    for (std::uint32_t r = 0; r < e1; ++r) {
      for (std::uint32_t c = 0; c < ctx.n(); ++c) w[c] = w[c] + (*y)[r] * w1.basis().at(r, c);
    }
    Vec gq = chart.to_quotient(ctx.decomposition().project2(w));
    for (std::uint32_t c = 0; c < ctx.quotient_dim(); ++c) g.set(i, c, gq[c]);
  }
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// loci

bool in_U1(const Flag& flag, const BundleContext& ctx) {
  check_dims(flag, ctx.split().lower(), "in_U1");
  return u1_condition(flag.part(ctx.p() - 1), ctx);
}

bool in_U2(const Flag& flag, const BundleContext& ctx) {
  check_dims(flag, ctx.split().upper(), "in_U2");
  return u2_condition(flag.part(0), ctx);
}

bool in_U(const Flag& flag, const BundleContext& ctx) {
  check_dims(flag, ctx.split().full().dims(), "in_U");
  bool ok = true;
  if (ctx.p() > 0) ok = ok && u1_condition(flag.part(ctx.p() - 1), ctx);
  if (ctx.q() > 0) ok = ok && u2_condition(flag.part(ctx.p()), ctx);
  return ok;
}

// ---------------------------------------------------------------------------
// rational maps

Flag phi1(const Flag& flag, const BundleContext& ctx) {
  if (!in_U1(flag, ctx))
    throw PreconditionError("flag outside the domain of definition (U1)");
  return Flag(ctx.lower_signature(), phi1_chain(flag.chain(), ctx));
}

Flag phi2(const Flag& flag, const BundleContext& ctx) {
  if (!in_U2(flag, ctx))
    throw PreconditionError("flag outside the domain of definition (U2)");
  return Flag(FlagSignature(ctx.n(), ctx.upper_quotient_dims()), phi2_chain(flag.chain(), ctx));
}

BasePoint psi(const Flag& flag, const BundleContext& ctx) {
  if (!in_U(flag, ctx))
    throw PreconditionError("flag outside the domain of definition (U)");
  BasePoint base;
  base.s_chain = phi1_chain(chain_slice(flag, 0, ctx.p()), ctx);
  base.t_chain = phi2_chain(chain_slice(flag, ctx.p(), ctx.p() + ctx.q()), ctx);
  return base;
}

// ---------------------------------------------------------------------------
// charts

Flag param_phi1(const Flag& s_flag, const Matrix& f, const BundleContext& ctx) {
  check_dims(s_flag, ctx.split().lower(), "param_phi1");
  for (const auto& s : s_flag.chain()) {
    if (!ctx.decomposition().v1().contains(s)) throw PreconditionError("base flag must lie in V1");
  }
  if (f.rows() != ctx.dp() || f.cols() != ctx.n2())
    throw PreconditionError("f has the wrong shape");
  return Flag(ctx.lower_signature(), graph_chain(s_flag.chain(), f, ctx));
}

FiberChartF coord_phi1(const Flag& flag, const BundleContext& ctx) {
  if (!in_U1(flag, ctx))
    throw PreconditionError("flag outside the domain of definition (U1)");
  std::vector<Subspace> ss = phi1_chain(flag.chain(), ctx);
  Matrix f = chart_f(flag.chain(), ss, ctx);
  return FiberChartF{Flag(ctx.lower_signature(), std::move(ss)), std::move(f)};
}

Flag param_phi2(const Flag& t_flag, const Matrix& g, const BundleContext& ctx) {
  check_dims(t_flag, ctx.upper_quotient_dims(), "param_phi2");
  for (const auto& t : t_flag.chain()) {
    if (!ctx.decomposition().v2().contains(t)) throw PreconditionError("base flag must lie in V2");
  }
  if (g.rows() != ctx.n1() || g.cols() != ctx.quotient_dim())
    throw PreconditionError("g has the wrong shape");
  return Flag(ctx.upper_signature(), preimage_chain(t_flag.chain(), g, ctx));
}

FiberChartG coord_phi2(const Flag& flag, const BundleContext& ctx) {
  if (!in_U2(flag, ctx))
    throw PreconditionError("flag outside the domain of definition (U2)");
  std::vector<Subspace> ts = phi2_chain(flag.chain(), ctx);
  Matrix g = chart_g(flag.chain(), ts, ctx);
  return FiberChartG{Flag(FlagSignature(ctx.n(), ctx.upper_quotient_dims()), std::move(ts)),
                     std::move(g)};
}

Matrix fiber_constraint(const BasePoint& base, const Matrix& f, const Matrix& g,
                        const BundleContext& ctx) {
  const std::uint32_t dp = ctx.dp();
  const std::uint32_t qd = ctx.quotient_dim();
  Matrix out(ctx.field(), dp, qd);
  if (dp == 0 || qd == 0) return out;
  const QuotientChart chart = chart_of(ctx, base.t_chain.front());
  const Subspace& sp = base.s_chain.back();
  const Matrix famb = f_ambient(ctx, f);
  for (std::uint32_t j = 0; j < dp; ++j) {
    Vec uf = chart.to_quotient(famb.row(j));
    Vec gi = row_times(v1_coords(ctx, sp.basis().row(j)), g);
    for (std::uint32_t c = 0; c < qd; ++c) out.set(j, c, uf[c] - gi[c]);
  }
  return out;
}

Flag param_psi(const BasePoint& base, const Matrix& f, const Matrix& g, const BundleContext& ctx) {
  if (!fiber_constraint(base, f, g, ctx).is_zero())
    throw PreconditionError("off-kernel fiber coordinates: F(f, g) != 0");
  std::vector<Subspace> chain;
  if (ctx.p() > 0) {
    auto zs = graph_chain(base.s_chain, f, ctx);
    chain.insert(chain.end(), zs.begin(), zs.end());
  }
  if (ctx.q() > 0) {
    auto ws = preimage_chain(base.t_chain, g, ctx);
    chain.insert(chain.end(), ws.begin(), ws.end());
  }
  return Flag(ctx.full_signature(), std::move(chain));
}

PsiFiberPoint coord_psi(const Flag& flag, const BundleContext& ctx) {
  if (!in_U(flag, ctx))
    throw PreconditionError("flag outside the domain of definition (U)");
  PsiFiberPoint point{psi(flag, ctx), Matrix(ctx.field(), ctx.dp(), ctx.n2()),
                      Matrix(ctx.field(), ctx.n1(), ctx.quotient_dim())};
  if (ctx.p() > 0) {
    point.f = chart_f(chain_slice(flag, 0, ctx.p()), point.base.s_chain, ctx);
  }
  if (ctx.q() > 0) {
    point.g = chart_g(chain_slice(flag, ctx.p(), ctx.p() + ctx.q()), point.base.t_chain, ctx);
  }
  return point;
}

Matrix fiber_constraint_matrix(const BasePoint& base, const BundleContext& ctx) {
  const std::uint32_t fcols = ctx.dp() * ctx.n2();
  const std::uint32_t gcols = ctx.n1() * ctx.quotient_dim();
  const std::uint32_t rows = ctx.dp() * ctx.quotient_dim();
  Matrix big(ctx.field(), rows, fcols + gcols);
  const FieldElement one = ctx.field().one();
  for (std::uint32_t c = 0; c < fcols + gcols; ++c) {
    Matrix f(ctx.field(), ctx.dp(), ctx.n2());
    Matrix g(ctx.field(), ctx.n1(), ctx.quotient_dim());
    if (c < fcols) {
      f.set(c / ctx.n2(), c % ctx.n2(), one);
    } else {
      std::uint32_t cc = c - fcols;
      g.set(cc / ctx.quotient_dim(), cc % ctx.quotient_dim(), one);
    }
    Matrix val = fiber_constraint(base, f, g, ctx);
    for (std::uint32_t i = 0; i < val.rows(); ++i)
      for (std::uint32_t j = 0; j < val.cols(); ++j)
        big.set(i * val.cols() + j, c, val.at(i, j));
  }
  return big;
}

// ---------------------------------------------------------------------------
// enumeration helpers

std::vector<BasePoint> enumerate_base_points(const BundleContext& ctx, const Budget& budget) {
  auto s_chains = enumerate_chains_in(ctx.decomposition().v1(), ctx.split().lower(), budget);
  auto t_chains = enumerate_chains_in(ctx.decomposition().v2(), ctx.upper_quotient_dims(), budget);
  budget.check_items(std::uint64_t(s_chains.size()) * t_chains.size(), "base point enumeration");
  std::vector<BasePoint> out;
  out.reserve(s_chains.size() * t_chains.size());
  for (const auto& s : s_chains)
    for (const auto& t : t_chains) out.push_back(BasePoint{s, t});
  return out;
}

std::vector<Matrix> all_matrices(const FiniteField& field, std::uint32_t rows, std::uint32_t cols,
                                 const Budget& budget) {
  const std::uint64_t q = field.cardinality();
  std::uint64_t total = flagdescent::detail::checked_pow_u64(q, rows * cols);
  budget.check_items(total, "matrix space enumeration");
  std::vector<Matrix> out;
  out.reserve(total);
  for (std::uint64_t code = 0; code < total; ++code) {
    Matrix m(field, rows, cols);
    std::uint64_t t = code;
    for (std::uint32_t i = 0; i < rows; ++i) {
      for (std::uint32_t j = 0; j < cols; ++j) {
        m.set(i, j, field.element(std::uint32_t(t % q)));
        t /= q;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::pair<Matrix, Matrix>> enumerate_fiber(const BasePoint& base,
                                                       const BundleContext& ctx,
                                                       const Budget& budget) {
  auto fs = all_matrices(ctx.field(), ctx.dp(), ctx.n2(), budget);
  auto gs = all_matrices(ctx.field(), ctx.n1(), ctx.quotient_dim(), budget);
  budget.check_items(std::uint64_t(fs.size()) * gs.size(), "fiber enumeration");
  std::vector<std::pair<Matrix, Matrix>> out;
  for (const auto& f : fs) {
    for (const auto& g : gs) {
      if (fiber_constraint(base, f, g, ctx).is_zero()) out.emplace_back(f, g);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// equivariance

Subspace q_image(const SemilinearMap& map, const Decomposition& d, int part, const Subspace& u) {
  std::vector<Vec> rows;
  for (std::uint32_t r = 0; r < u.dim(); ++r) {
    Vec v = map.apply(u.basis().row(r));
    rows.push_back(part == 1 ? d.project1(v) : d.project2(v));
  }
  return Subspace::span(u.field(), u.ambient(), rows);
}

namespace {

void record(EquivarianceReport& rep, std::uint32_t e, const std::string& what,
            const std::string& flag) {
  rep.passed = false;
  if (rep.violations.size() < 16) rep.violations.push_back(Violation{e, what, flag});
}

std::vector<Subspace> q_chain(const SemilinearMap& map, const Decomposition& d, int part,
                              const std::vector<Subspace>& chain) {
  std::vector<Subspace> out;
  out.reserve(chain.size());
  for (const auto& u : chain) out.push_back(q_image(map, d, part, u));
  return out;
}

}  // namespace

EquivarianceReport equivariance_scan(const TwistedAction& action, const BundleContext& ctx,
                                     const Budget& budget) {
  EquivarianceReport rep;
  const std::uint32_t k = action.group().order();
  const Decomposition& d = ctx.decomposition();

  if (ctx.p() > 0) {
    auto lower = enumerate_flags(ctx.lower_signature(), ctx.field(), budget);
    for (std::uint32_t e = 0; e < k; ++e) {
      const SemilinearMap& m = action.map_of(e);
      for (const auto& fl : lower) {
        Flag image = action.apply(e, fl);
        bool before = in_U1(fl, ctx), after = in_U1(image, ctx);
        ++rep.checks;
        if (before != after) record(rep, e, "U1 invariance", fl.to_string());
        if (before && after) {
          ++rep.checks;
          auto lhs = phi1_chain(image.chain(), ctx);
          auto rhs = q_chain(m, d, 1, phi1_chain(fl.chain(), ctx));
          if (lhs != rhs) record(rep, e, "phi1 equivariance", fl.to_string());
        }
      }
    }
  }
  if (ctx.q() > 0) {
    auto upper = enumerate_flags(ctx.upper_signature(), ctx.field(), budget);
    for (std::uint32_t e = 0; e < k; ++e) {
      const SemilinearMap& m = action.map_of(e);
      for (const auto& fl : upper) {
        Flag image = action.apply(e, fl);
        bool before = in_U2(fl, ctx), after = in_U2(image, ctx);
        ++rep.checks;
        if (before != after) record(rep, e, "U2 invariance", fl.to_string());
        if (before && after) {
          ++rep.checks;
          auto lhs = phi2_chain(image.chain(), ctx);
          auto rhs = q_chain(m, d, 2, phi2_chain(fl.chain(), ctx));
          if (lhs != rhs) record(rep, e, "phi2 equivariance", fl.to_string());
        }
      }
    }
  }
  auto full = enumerate_flags(ctx.full_signature(), ctx.field(), budget);
  for (std::uint32_t e = 0; e < k; ++e) {
    const SemilinearMap& m = action.map_of(e);
    for (const auto& fl : full) {
      Flag image = action.apply(e, fl);
      bool before = in_U(fl, ctx), after = in_U(image, ctx);
      ++rep.checks;
      if (before != after) record(rep, e, "U invariance", fl.to_string());
      if (before && after) {
        ++rep.checks;
        BasePoint lhs = psi(image, ctx);
        BasePoint rhs_base = psi(fl, ctx);
        BasePoint rhs{q_chain(m, d, 1, rhs_base.s_chain), q_chain(m, d, 2, rhs_base.t_chain)};
        if (!(lhs == rhs)) record(rep, e, "psi equivariance", fl.to_string());
      }
    }
  }
  return rep;
}

namespace {

void require_block_diagonal(const TwistedAction& action, const BundleContext& ctx) {
  if (!(action.basis() == ctx.decomposition().basis()))
    throw PreconditionError("action basis must match the decomposition basis");
  for (std::uint32_t e = 0; e < action.group().order(); ++e) {
    const Matrix& c = action.lift(e);
    if (!(linalg::apply(c, ctx.decomposition().v1()) == ctx.decomposition().v1()) ||
        !(linalg::apply(c, ctx.decomposition().v2()) == ctx.decomposition().v2())) {
      throw PreconditionError("lift " + std::to_string(e) +
                              " is not block-diagonal for the decomposition");
    }
  }
}

}  // namespace

EquivarianceReport equivariance_check(const TwistedAction& action, const BundleContext& ctx,
                                      const Budget& budget) {
  require_block_diagonal(action, ctx);
  return equivariance_scan(action, ctx, budget);
}

// ---------------------------------------------------------------------------
// fiber action

TransportedFiber transport_fiber(const TwistedAction& action, std::uint32_t e,
                                 const BasePoint& base, const Matrix& f, const Matrix& g,
                                 const BundleContext& ctx) {
  const SemilinearMap& m = action.map_of(e);
  const SemilinearMap minv = m.inverse();
  TransportedFiber out{BasePoint{}, Matrix(ctx.field(), ctx.dp(), ctx.n2()),
                       Matrix(ctx.field(), ctx.n1(), ctx.quotient_dim())};
  for (const auto& s : base.s_chain) out.base.s_chain.push_back(m.apply(s));
  for (const auto& t : base.t_chain) out.base.t_chain.push_back(m.apply(t));

  if (ctx.p() > 0) {
    const Subspace& sp = base.s_chain.back();
    const Subspace& sp_image = out.base.s_chain.back();
    const Matrix famb = f_ambient(ctx, f);
    for (std::uint32_t j = 0; j < ctx.dp(); ++j) {
      Vec v = minv.apply(sp_image.basis().row(j));
      Vec fv = row_times(coords_in(sp, v), famb);
      Vec w = m.apply(fv);
      Vec fc = v2_coords(ctx, w);
      for (std::uint32_t c = 0; c < ctx.n2(); ++c) out.f.set(j, c, fc[c]);
    }
  }
  if (ctx.q() > 0) {
    const QuotientChart chart = chart_of(ctx, base.t_chain.front());
    const QuotientChart chart_image = chart_of(ctx, out.base.t_chain.front());
    for (std::uint32_t i = 0; i < ctx.n1(); ++i) {
      Vec v = minv.apply(ctx.decomposition().basis().row(i));
      Vec gq = row_times(v1_coords(ctx, v), g);
      Vec w = m.apply(chart.lift(gq));
      Vec gc = chart_image.to_quotient(w);
      for (std::uint32_t c = 0; c < ctx.quotient_dim(); ++c) out.g.set(i, c, gc[c]);
    }
  }
  return out;
}

EquivarianceReport fiber_action_check(const TwistedAction& action, const BundleContext& ctx,
                                      const Budget& budget) {
  require_block_diagonal(action, ctx);
  EquivarianceReport rep;
  const std::uint32_t k = action.group().order();
  auto bases = enumerate_base_points(ctx, budget);
  for (std::uint32_t e = 0; e < k; ++e) {
    const FieldAutomorphism sigma = action.group().element(e);
    for (const auto& base : bases) {
      auto fiber = enumerate_fiber(base, ctx, budget);
      budget.check_items(std::uint64_t(fiber.size()) * fiber.size(), "fiber pair checks");
      std::vector<TransportedFiber> transported;
      transported.reserve(fiber.size());
      for (const auto& [f, g] : fiber) {
        transported.push_back(transport_fiber(action, e, base, f, g, ctx));
      }
      // transported coordinates stay in the kernel and parametrize the image
      for (std::size_t i = 0; i < fiber.size(); ++i) {
        const auto& t = transported[i];
        ++rep.checks;
        if (!fiber_constraint(t.base, t.f, t.g, ctx).is_zero()) {
          record(rep, e, "transport leaves the kernel", base.storage_key());
          continue;
        }
        Flag expected = param_psi(t.base, t.f, t.g, ctx);
        Flag actual = action.apply(e, param_psi(base, fiber[i].first, fiber[i].second, ctx));
        ++rep.checks;
        if (!(expected == actual)) record(rep, e, "fiber transport formula", base.storage_key());
      }
      // additivity on all pairs
      for (std::size_t i = 0; i < fiber.size(); ++i) {
        for (std::size_t j = 0; j < fiber.size(); ++j) {
          TransportedFiber tsum = transport_fiber(action, e, base, fiber[i].first + fiber[j].first,
                                                  fiber[i].second + fiber[j].second, ctx);
          ++rep.checks;
          if (!(tsum.f == transported[i].f + transported[j].f) ||
              !(tsum.g == transported[i].g + transported[j].g)) {
            record(rep, e, "fiber transport additivity", base.storage_key());
          }
        }
      }
      // sigma-twisted homogeneity on all scalars
      for (std::uint32_t a = 1; a < ctx.field().cardinality(); ++a) {
        FieldElement alpha = ctx.field().element(a);
        for (std::size_t i = 0; i < fiber.size(); ++i) {
          TransportedFiber tscaled = transport_fiber(action, e, base, fiber[i].first.scaled(alpha),
                                                     fiber[i].second.scaled(alpha), ctx);
          ++rep.checks;
          if (!(tscaled.f == transported[i].f.scaled(sigma(alpha))) ||
              !(tscaled.g == transported[i].g.scaled(sigma(alpha)))) {
            record(rep, e, "fiber transport twisted homogeneity", base.storage_key());
          }
        }
      }
      // zero section naturality
      TransportedFiber tzero = transport_fiber(action, e, base,
                                               Matrix(ctx.field(), ctx.dp(), ctx.n2()),
                                               Matrix(ctx.field(), ctx.n1(), ctx.quotient_dim()),
                                               ctx);
      ++rep.checks;
      if (!tzero.f.is_zero() || !tzero.g.is_zero()) {
        record(rep, e, "zero section naturality", base.storage_key());
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// descent counting

DescentReport descent_count_check(const TwistedAction& action, const BundleContext& ctx,
                                  const Budget& budget) {
  EquivarianceReport eq = equivariance_check(action, ctx, budget);
  if (!eq.passed) throw PreconditionError("equivariance check failed; descent counting requires it");

  DescentReport rep;
  rep.fiber_rank = ctx.fiber_dim();
  const std::uint32_t k = action.group().order();
  const std::uint64_t q_base = action.group().base().cardinality();
  const std::uint64_t fiber_size = flagdescent::detail::checked_pow_u64(q_base, rep.fiber_rank);

  // left side: T-fixed flags in U, tallied per base point
  std::unordered_map<std::string, std::uint64_t> per_base;
  for (const auto& fl : enumerate_flags(ctx.full_signature(), ctx.field(), budget)) {
    if (!in_U(fl, ctx)) continue;
    bool fixed = true;
    for (std::uint32_t e = 1; e < k && fixed; ++e) fixed = action.apply(e, fl) == fl;
    if (!fixed) continue;
    ++rep.fixed_flags_in_u;
    ++per_base[psi(fl, ctx).storage_key()];
  }

  // right side: Q-fixed base points
  const Decomposition& d = ctx.decomposition();
  std::vector<std::string> fixed_bases;
  for (const auto& base : enumerate_base_points(ctx, budget)) {
    bool fixed = true;
    for (std::uint32_t e = 1; e < k && fixed; ++e) {
      const SemilinearMap& m = action.map_of(e);
      fixed = q_chain(m, d, 1, base.s_chain) == base.s_chain &&
              q_chain(m, d, 2, base.t_chain) == base.t_chain;
    }
    if (fixed) {
      ++rep.fixed_base_points;
      fixed_bases.push_back(base.storage_key());
    }
  }
  rep.predicted = rep.fixed_base_points * fiber_size;

  rep.per_fiber_ok = per_base.size() == fixed_bases.size();
  for (const auto& key : fixed_bases) {
    auto it = per_base.find(key);
    if (it == per_base.end() || it->second != fiber_size) rep.per_fiber_ok = false;
  }
  rep.passed = (rep.fixed_flags_in_u == rep.predicted) && rep.per_fiber_ok;
  return rep;
}

// ---------------------------------------------------------------------------
// splitting

SplitResult split_from_automorphism(const ProjectiveMap& g, const TwistedAction& action,
                                    std::uint32_t eigenvalue_index) {
  const FiniteField& field = action.group().top();
  const std::uint32_t n = action.n();
  if (g.n() != n || !(g.lift().field() == field))
    throw PreconditionError("projective map does not act on the action's space");
  const std::uint32_t k = action.group().order();

  // commutation with every T(sigma), as projective semilinear maps
  for (std::uint32_t e = 0; e < k; ++e) {
    const Matrix& me = action.map_of(e).matrix();
    const FieldAutomorphism sigma = action.group().element(e);
    Matrix lhs = g.lift() * me;
    Matrix rhs = me * g.lift().map_entries(sigma);
    if (!lhs.proportionality(rhs).has_value())
      throw PreconditionError("the map does not commute with the twisted action");
  }

  const std::uint32_t order_g = g.order();

  // order-preserving lift: h = mu * lift with mu^order = gamma^{-1}
  Matrix power = g.lift().pow(order_g);
  auto gamma = power.proportionality(Matrix::identity(field, n));
  if (!gamma) throw Error("projective order computation is inconsistent");
  Matrix h = g.lift();
  bool found_lift = false;
  for (std::uint32_t mu_idx = 1; mu_idx < field.cardinality(); ++mu_idx) {
    FieldElement mu = field.element(mu_idx);
    if (mu.pow(order_g) * *gamma == field.one()) {
      h = g.lift().scaled(mu);
      found_lift = true;
      break;
    }
  }
  if (!found_lift)
    throw PreconditionError("no lift of matching order exists in the field; enlarge the field");

  // eigenvalues and eigenspaces of h over the top field
  std::vector<FieldElement> eigenvalues;
  std::vector<Subspace> eigenspaces;
  std::uint32_t total_dim = 0;
  for (std::uint32_t idx = 0; idx < field.cardinality(); ++idx) {
    FieldElement lambda = field.element(idx);
    Matrix shifted = h - Matrix::identity(field, n).scaled(lambda);
    Matrix ker = kernel(shifted);
    if (ker.rows() == 0) continue;
    eigenvalues.push_back(lambda);
    eigenspaces.push_back(Subspace(n, ker));
    total_dim += ker.rows();
  }
  if (total_dim != n)
    throw PreconditionError("eigenvalues of the lift are not all in the field; enlarge the field");
  for (const auto& lambda : eigenvalues) {
    if (!action.group().is_in_base(lambda))
      throw PreconditionError(
          "eigenvalues of the lift are not in the base field; enlarge the base field");
  }

  // h^{n!}
  std::uint64_t n_fact = 1;
  for (std::uint32_t i = 2; i <= n; ++i) n_fact *= i;
  Matrix hn = h.pow(n_fact);
  if (hn.proportionality(Matrix::identity(field, n)).has_value())
    throw PreconditionError("h^{n!} is scalar: the order is too small for this splitting method");

  // eigenvalues of h^{n!}, canonical order
  std::vector<FieldElement> pow_values;
  for (const auto& lambda : eigenvalues) {
    FieldElement v = lambda.pow(n_fact);
    if (std::find(pow_values.begin(), pow_values.end(), v) == pow_values.end())
      pow_values.push_back(v);
  }
  std::sort(pow_values.begin(), pow_values.end());
  if (eigenvalue_index >= pow_values.size())
    throw PreconditionError("eigenvalue index out of range");
  const FieldElement chosen = pow_values[eigenvalue_index];

  // eigenbasis rows: V1 group (lambda^{n!} = chosen) first, V2 group second
  std::vector<Vec> v1_rows, v2_rows;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    bool first = eigenvalues[i].pow(n_fact) == chosen;
    for (std::uint32_t r = 0; r < eigenspaces[i].dim(); ++r) {
      (first ? v1_rows : v2_rows).push_back(eigenspaces[i].basis().row(r));
    }
  }
  std::vector<Vec> all_rows = v1_rows;
  all_rows.insert(all_rows.end(), v2_rows.begin(), v2_rows.end());
  Matrix basis = Matrix::from_rows(field, all_rows);
  Decomposition decomposition = Decomposition::from_basis(basis, std::uint32_t(v1_rows.size()));

  // lifts relative to the eigenbasis: c_e = M_e . sigma(P) . P^{-1}
  const Matrix p_mat = basis.transpose();
  const Matrix p_inv = p_mat.inverse();
  std::vector<Matrix> lifts;
  std::vector<FieldElement> nus;
  std::vector<bool> blocks;
  for (std::uint32_t e = 0; e < k; ++e) {
    const FieldAutomorphism sigma = action.group().element(e);
    Matrix ce = action.map_of(e).matrix() * p_mat.map_entries(sigma) * p_inv;
    auto nu = (h * ce).proportionality(ce * h);
    if (!nu) throw Error("the lift does not satisfy the commutation relation h c = nu c h");
    bool block = linalg::apply(ce, decomposition.v1()) == decomposition.v1() &&
                 linalg::apply(ce, decomposition.v2()) == decomposition.v2();
    lifts.push_back(std::move(ce));
    nus.push_back(*nu);
    blocks.push_back(block);
  }

  return SplitResult{std::move(decomposition), std::move(h), std::move(eigenvalues),
                     std::move(pow_values), std::move(basis), std::move(lifts), std::move(nus),
                     std::move(blocks), order_g, order_g > n_fact};
}

}  // namespace flagdescent::bundles
