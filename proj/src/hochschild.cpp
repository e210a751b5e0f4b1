#include "dainf/hochschild.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace dainf {

std::string to_string(HHFlavor f) {
  switch (f) {
    case HHFlavor::classical: return "classical";
    case HHFlavor::dga_bicomplex: return "dga";
    case HHFlavor::derived: return "derived";
    case HHFlavor::bidga: return "bidga";
    case HHFlavor::graded_algebra: return "algebra";
  }
  return "?";
}

std::optional<HHFlavor> parse_flavor(const std::string& s) {
  for (HHFlavor f : {HHFlavor::classical, HHFlavor::dga_bicomplex, HHFlavor::derived, HHFlavor::bidga,
                     HHFlavor::graded_algebra})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

std::string describe(const CochainSum& f) {
  if (f.is_zero()) return "0\n";
  std::string s;
  for (const auto& [_, g] : f.terms()) s += g.describe();
  return s;
}

Vec Bimodule::act_left(int a, const Vec& x, const Ring& R) const {
  Vec out;
  for (const auto& [y, c] : x)
    if (auto it = left.find({a, y}); it != left.end()) add_scaled(out, it->second, c, R);
  return out;
}

Vec Bimodule::act_right(const Vec& x, int a, const Ring& R) const {
  Vec out;
  for (const auto& [y, c] : x)
    if (auto it = right.find({y, a}); it != right.end()) add_scaled(out, it->second, c, R);
  return out;
}

namespace {

void require_bidga_without_m01(const StructureFamily& A) {
  if (!A.is_bidga() || A.get(0, 1)) throw std::invalid_argument("coefficients need a bidga with m_01 = 0");
}

Vec apply_arity_one(const MultiCochain& f, const Vec& x, const Ring& R) {
  Vec out;
  for (const auto& [y, c] : x) add_scaled(out, f.at({y}), c, R);
  return out;
}

Vec basis_vec(int y) { return Vec{{y, Scalar(1)}}; }

}  // namespace

Bimodule regular_bimodule(const StructureFamily& A) {
  require_bidga_without_m01(A);
  Bimodule M(A.module());
  MultiCochain mu = A.op(0, 2);
  for (const auto& [x, v] : mu.entries()) {
    M.left[{x[0], x[1]}] = v;
    M.right[{x[0], x[1]}] = v;
  }
  M.bar_m11 = A.op(1, 1);
  return M;
}

Bimodule bimodule_along(const StructureFamily& A, const StructureFamily& Ap, const MultiCochain& f01) {
  require_bidga_without_m01(A);
  require_bidga_without_m01(Ap);
  const Ring& R = A.ring();
  Bimodule M(Ap.module());
  MultiCochain mu = Ap.op(0, 2);
  int na = int(A.module()->size()), nm = int(Ap.module()->size());
  for (int a = 0; a < na; ++a)
    for (int y = 0; y < nm; ++y) {
      Vec l, r;
      for (const auto& [z, c] : f01.at({a})) {
        add_scaled(l, mu.at({z, y}), c, R);
        add_scaled(r, mu.at({y, z}), c, R);
      }
      if (!l.empty()) M.left[{a, y}] = l;
      if (!r.empty()) M.right[{y, a}] = r;
    }
  M.bar_m11 = Ap.op(1, 1);
  return M;
}

std::optional<std::string> check_bimodule(const StructureFamily& A, const Bimodule& M) {
  require_bidga_without_m01(A);
  const Ring& R = A.ring();
  const BigradedModule& Am = *A.module();
  const BigradedModule& Mm = *M.module;
  MultiCochain mu = A.op(0, 2), d = A.op(1, 1);
  int na = int(Am.size()), nm = int(Mm.size());
  auto name = [&](int a, int x, int b) {
    return "(" + Am.name(a) + ", " + Mm.name(x) + ", " + Am.name(b) + ")";
  };
  for (const auto& [ax, v] : M.left)
    for (const auto& [y, _] : v)
      if (Am.degree(ax.first) + Mm.degree(ax.second) != Mm.degree(y))
        return "left action " + Am.name(ax.first) + " . " + Mm.name(ax.second) + " has the wrong bidegree";
  for (const auto& [xa, v] : M.right)
    for (const auto& [y, _] : v)
      if (Mm.degree(xa.first) + Am.degree(xa.second) != Mm.degree(y))
        return "right action " + Mm.name(xa.first) + " . " + Am.name(xa.second) + " has the wrong bidegree";
  if (auto eta = Am.unit())
    for (int x = 0; x < nm; ++x) {
      if (M.act_left(*eta, basis_vec(x), R) != basis_vec(x)) return "unit does not act as the identity on the left on " + Mm.name(x);
      if (M.act_right(basis_vec(x), *eta, R) != basis_vec(x)) return "unit does not act as the identity on the right on " + Mm.name(x);
    }
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b)
      for (int x = 0; x < nm; ++x) {
        Vec ab = mu.at({a, b});
        Vec lhs, rhs;
        for (const auto& [z, c] : ab) add_scaled(lhs, M.act_left(z, basis_vec(x), R), c, R);
        rhs = M.act_left(a, M.act_left(b, basis_vec(x), R), R);
        if (lhs != rhs) return "left action not associative on " + name(a, x, b);
        lhs.clear();
        for (const auto& [z, c] : ab) add_scaled(lhs, M.act_right(basis_vec(x), z, R), c, R);
        rhs = M.act_right(M.act_right(basis_vec(x), a, R), b, R);
        if (lhs != rhs) return "right action not associative on " + name(a, x, b);
        if (M.act_right(M.act_left(a, basis_vec(x), R), b, R) != M.act_left(a, M.act_right(basis_vec(x), b, R), R))
          return "left and right actions do not commute on " + name(a, x, b);
      }
  for (int a = 0; a < na; ++a)
    for (int x = 0; x < nm; ++x) {
      // bar_m11(a.x) = m11(a).x + (-1)^{h(a)} a.bar_m11(x)
      Vec lhs = apply_arity_one(M.bar_m11, M.act_left(a, basis_vec(x), R), R);
      Vec rhs;
      for (const auto& [z, c] : d.at({a})) add_scaled(rhs, M.act_left(z, basis_vec(x), R), c, R);
      add_scaled(rhs, M.act_left(a, M.bar_m11.at({x}), R), Scalar(Am.degree(a).h % 2 ? -1 : 1), R);
      if (lhs != rhs) return "Leibniz rule fails for " + Am.name(a) + " . " + Mm.name(x);
      // bar_m11(x.a) = bar_m11(x).a + (-1)^{h(x)} x.m11(a)
      lhs = apply_arity_one(M.bar_m11, M.act_right(basis_vec(x), a, R), R);
      rhs = M.act_right(M.bar_m11.at({x}), a, R);
      Vec xa;
      for (const auto& [z, c] : d.at({a})) add_scaled(xa, M.act_right(basis_vec(x), z, R), c, R);
      add_scaled(rhs, xa, Scalar(Mm.degree(x).h % 2 ? -1 : 1), R);
      if (lhs != rhs) return "Leibniz rule fails for " + Mm.name(x) + " . " + Am.name(a);
    }
  if (!compose(M.bar_m11, M.bar_m11).is_zero()) return "bar m_11 does not square to zero";
  return std::nullopt;
}

CochainSum bimodule_differential(const StructureFamily& A, const Bimodule& M, const MultiCochain& f) {
  const Ring& R = A.ring();
  const BigradedModule& Am = *A.module();
  const Shape& s = f.shape();
  int n = s.n, k = s.k, i = s.i;
  // Terms with one more input: both actions and f o m_02.
  MultiCochain wide(A.module(), M.module, Shape{n + 1, k, i});
  Scalar s_right(sign_of(long(k) + n + i - 1)), s_left(sign_of(long(k) + i));
  for (const auto& [x, v] : f.entries())
    for (int a = 0; a < int(Am.size()); ++a) {
      Tuple xr = x;
      xr.push_back(a);
      Vec r = M.act_right(v, a, R);
      if (!r.empty()) wide.add(xr, r, s_right);
      Tuple xl{a};
      xl.insert(xl.end(), x.begin(), x.end());
      Vec l = M.act_left(a, v, R);
      long koszul = koszul_parity(s.map_bidegree(), Am.degree(a));
      if (!l.empty()) wide.add(xl, l, R.normalize(s_left * sign_of(koszul)));
    }
  if (auto* mu = A.get(0, 2); mu && n > 0) wide = wide + compose(f, *mu).scaled(Scalar(sign_of(long(k) + n + i)));

  // Terms raising the horizontal shift: bar_m11 o f and f o m_11.
  MultiCochain tall(A.module(), M.module, Shape{n, k + 1, i});
  for (const auto& [x, v] : f.entries()) {
    Vec w = apply_arity_one(M.bar_m11, v, R);
    if (!w.empty()) tall.add(x, w);
  }
  if (auto* d = A.get(1, 1); d && n > 0) tall = tall + compose(f, *d).scaled(Scalar(sign_of(long(k) + 1)));

  CochainSum out(A.module(), M.module);
  out.add(wide);
  out.add(tall);
  return out;
}

namespace {

CochainSum bracket_with(const CochainSum& m, const CochainSum& f) {
  if (m.is_zero() || f.is_zero()) return CochainSum(f.source(), f.target());
  return bracket(m, f);
}

CochainSum derived_unchecked(const StructureFamily& m, const CochainSum& f) {
  CochainSum e = m.even_part(), o = m.odd_part();
  return bracket_with(e, hash(f)) + bracket_with(o, f);
}

}  // namespace

CochainSum derived_differential(const StructureFamily& m, const CochainSum& f) {
  auto r = is_orthogonal(m);
  if (!r.orthogonal()) throw std::invalid_argument("derived differential needs an orthogonal structure: " + r.witness);
  return derived_unchecked(m, f);
}

CochainSum vertical_differential(const StructureFamily& m, const CochainSum& f) {
  CochainSum d(m.module());
  if (auto* g = m.get(0, 1)) d.add(*g);
  return bracket_with(d, f);
}

CochainSum horizontal_differential(const StructureFamily& m, const CochainSum& f) {
  CochainSum d(m.module());
  if (auto* g = m.get(0, 2)) d.add(*g);
  return bracket_with(d, f);
}

MultiCochain explicit_algebra_differential(const MultiCochain& mu, const MultiCochain& f) {
  int n = f.arity(), k = f.vshift();
  MultiCochain out(f.source(), f.target(), Shape{n + 1, f.hshift(), k});
  out = out + insert_at(mu, f, 1);
  for (int i = 0; i < n; ++i) out = out + insert_at(f, mu, i).scaled(Scalar(sign_of(i + 1)));
  out = out + insert_at(mu, f, 0).scaled(Scalar(sign_of(n + 1)));
  return out.scaled(Scalar(sign_of(k)));
}

HochschildComplex::HochschildComplex(StructureFamily m, HHFlavor flavor, HochschildOptions opts)
    : m_(std::move(m)), flavor_(flavor), opts_(opts) {
  switch (flavor_) {
    case HHFlavor::classical:
    case HHFlavor::dga_bicomplex:
      if (m_.max_i() > 0) throw std::invalid_argument("classical Hochschild complex needs horizontal degree 0");
      if (flavor_ == HHFlavor::dga_bicomplex)
        for (const auto& [ij, _] : m_.ops())
          if (ij != Index2{0, 1} && ij != Index2{0, 2}) throw std::invalid_argument("dga flavor needs m = m_01 + m_02");
      break;
    case HHFlavor::derived: {
      auto r = is_orthogonal(m_);
      if (!r.orthogonal()) throw std::invalid_argument("structure is not orthogonal: " + r.witness);
      break;
    }
    case HHFlavor::bidga:
      require_bidga_without_m01(m_);
      break;
    case HHFlavor::graded_algebra:
      break;
  }
}

HochschildComplex::HochschildComplex(StructureFamily m, Bimodule M, HochschildOptions opts)
    : m_(std::move(m)), flavor_(HHFlavor::bidga), opts_(opts), coeffs_(std::move(M)) {
  if (auto bad = check_bimodule(m_, *coeffs_)) throw std::invalid_argument("not a bimodule: " + *bad);
}

const ModulePtr& HochschildComplex::target() const { return coeffs_ ? coeffs_->module : m_.module(); }

HHDegree HochschildComplex::next(HHDegree d) const { return {d.a + 1, d.b}; }
HHDegree HochschildComplex::previous(HHDegree d) const { return {d.a - 1, d.b}; }

std::vector<Shape> HochschildComplex::shapes(HHDegree d, bool* complete) const {
  std::vector<Shape> out;
  if (complete) *complete = true;
  const BigradedModule& A = *m_.module();
  const int H = target()->max_horizontal();
  auto arity_range = [&](int t, bool any_k) {
    auto bound = arity_bound(A, *target(), t, opts_.normalized, any_k);
    int top;
    if (bound && (!opts_.max_arity || *bound <= *opts_.max_arity)) {
      top = *bound;
    } else if (opts_.max_arity) {
      top = *opts_.max_arity;
      if (complete) *complete = false;
    } else {
      throw WindowInsufficient("degrees do not bound the arity in total degree " + std::to_string(t) +
                               "; give a maximal arity");
    }
    return std::max(top, 0);
  };
  switch (flavor_) {
    case HHFlavor::classical:
    case HHFlavor::dga_bicomplex: {
      int top = arity_range(d.a, false);
      for (int n = 0; n <= top; ++n) out.push_back(Shape{n, 0, d.a - n});
      break;
    }
    case HHFlavor::derived: {
      // Negative horizontal shifts are allowed: maps may raise the
      // horizontal degree by up to the top degree of the target.
      int top = arity_range(d.a, true);
      for (int n = 0; n <= top; ++n)
        for (int k = -H; k <= n * A.max_horizontal(); ++k) out.push_back(Shape{n, k, d.a - n - k});
      break;
    }
    case HHFlavor::bidga:
      for (int n = 0; n <= d.a + H; ++n) out.push_back(Shape{n, d.a - n, d.b});
      break;
    case HHFlavor::graded_algebra:
      if (d.a >= 0) out.push_back(Shape{d.a, 0, d.b});
      break;
  }
  return out;
}

HochschildComplex::Basis HochschildComplex::basis(HHDegree d) const {
  bool complete = true;
  auto sh = shapes(d, &complete);
  Basis B = basis_for(sh);
  B.complete = complete;
  return B;
}

HochschildComplex::Basis HochschildComplex::basis_for(const std::vector<Shape>& shapes) const {
  Basis B;
  B.shapes = shapes;
  const BigradedModule& A = *m_.module();
  const BigradedModule& T = *target();
  for (const Shape& s : B.shapes) {
    std::set<Bidegree> wanted;
    for (const Bidegree& t : T.support())
      if (t.h + s.k >= 0) wanted.insert(Bidegree{t.h + s.k, t.v - s.i});
    for (const auto& [deg, tuples] : tensor_tuples_of_degrees(A, s.n, opts_.normalized, wanted)) {
      Bidegree td{deg.h - s.k, deg.v + s.i};
      if (td.h < 0) continue;
      const auto& ys = T.slot(td);
      if (ys.empty()) continue;
      for (const auto& x : tuples)
        for (int y : ys) {
          B.index.emplace(std::make_tuple(s, x, y), B.elements.size());
          B.elements.emplace_back(s, x, y);
        }
    }
  }
  return B;
}

DenseVec HochschildComplex::coordinates(const Basis& B, const CochainSum& f) const {
  DenseVec out(B.elements.size(), Scalar(0));
  for (const auto& [s, g] : f.terms()) {
    if (std::find(B.shapes.begin(), B.shapes.end(), s) == B.shapes.end()) {
      if (B.complete) throw std::logic_error("cochain of shape " + to_string(s) + " outside its cell");
      continue;  // beyond the arity cap
    }
    for (const auto& [x, v] : g.entries())
      for (const auto& [y, c] : v) {
        auto it = B.index.find(std::make_tuple(s, x, y));
        if (it == B.index.end())
          throw std::logic_error("cochain value on (" + tuple_names(*m_.module(), x) +
                                 ") is outside the complex; is the structure strictly unital?");
        out[it->second] = c;
      }
  }
  return out;
}

CochainSum HochschildComplex::cochain(const Basis& B, const DenseVec& x) const {
  std::map<Shape, MultiCochain> parts;
  for (size_t a = 0; a < x.size(); ++a) {
    if (x[a] == 0) continue;
    const auto& [s, t, y] = B.elements[a];
    auto it = parts.find(s);
    if (it == parts.end()) it = parts.emplace(s, MultiCochain(m_.module(), target(), s)).first;
    it->second.add(t, Vec{{y, x[a]}});
  }
  CochainSum out(m_.module(), target());
  for (const auto& [_, g] : parts) out.add(g);
  return out;
}

CochainSum HochschildComplex::apply(const CochainSum& f) const {
  switch (flavor_) {
    case HHFlavor::classical: return bracket_with(m_.total(), f);
    case HHFlavor::dga_bicomplex: return vertical_differential(m_, f) + horizontal_differential(m_, f);
    case HHFlavor::derived: return derived_unchecked(m_, f);
    case HHFlavor::bidga: {
      if (!coeffs_) return derived_unchecked(m_, f);
      CochainSum out(m_.module(), target());
      for (const auto& [_, g] : f.terms()) out = out + bimodule_differential(m_, *coeffs_, g);
      return out;
    }
    case HHFlavor::graded_algebra: {
      CochainSum mu(m_.module());
      if (auto* g = m_.get(0, 2)) mu.add(*g);
      return bracket_with(mu, f);
    }
  }
  return f;
}

Matrix HochschildComplex::differential(HHDegree d) const { return matrix(basis(d), basis(next(d))); }

Matrix HochschildComplex::matrix(const Basis& src, const Basis& dst) const {
  return matrix(src, dst, [this](const CochainSum& f) { return apply(f); });
}

Matrix HochschildComplex::matrix(const Basis& src, const Basis& dst,
                                 const std::function<CochainSum(const CochainSum&)>& op) const {
  Matrix M(m_.ring(), dst.elements.size(), src.elements.size());
  for (size_t c = 0; c < src.elements.size(); ++c) {
    const auto& [s, x, y] = src.elements[c];
    MultiCochain e(m_.module(), target(), s);
    e.set(x, Vec{{y, Scalar(1)}});
    CochainSum f(m_.module(), target());
    f.add(e);
    DenseVec col = coordinates(dst, op(f));
    for (size_t r = 0; r < col.size(); ++r)
      if (col[r] != 0) M.set(r, c, col[r]);
  }
  return M;
}

HHGroup HochschildComplex::cohomology(HHDegree d) const {
  HHGroup g;
  g.degree = d;
  Basis here = basis(d);
  Basis before = basis(previous(d)), after = basis(next(d));
  g.total = here.complete && before.complete && after.complete;
  g.cochains = here.elements.size();
  g.homology = homology_at(differential(previous(d)), differential(d));
  for (const auto& x : g.homology.generators) g.representatives.push_back(cochain(here, x));
  return g;
}

namespace {

Matrix select_columns(const Matrix& M, const std::vector<size_t>& cols) {
  Matrix out(M.ring(), M.rows(), cols.size());
  std::map<size_t, size_t> where;
  for (size_t j = 0; j < cols.size(); ++j) where[cols[j]] = j;
  for (size_t r = 0; r < M.rows(); ++r)
    for (const auto& [c, v] : M.row(r))
      if (auto it = where.find(c); it != where.end()) out.set(r, it->second, v);
  return out;
}

Matrix select_rows(const Matrix& M, const std::vector<size_t>& rows) {
  Matrix out(M.ring(), rows.size(), M.cols());
  for (size_t j = 0; j < rows.size(); ++j)
    for (const auto& [c, v] : M.row(rows[j])) out.set(j, c, v);
  return out;
}

}  // namespace

HochschildComplex::FiltrationVanishing HochschildComplex::filtration_vanishes(HHDegree d, int k) const {
  FiltrationVanishing out;
  Basis here = basis(d);
  out.total = here.complete && basis(previous(d)).complete && basis(next(d)).complete;
  std::vector<size_t> high;
  for (size_t a = 0; a < here.elements.size(); ++a)
    if (std::get<0>(here.elements[a]).n >= k) high.push_back(a);
  Matrix K = kernel_matrix(select_columns(differential(d), high));
  LinearSolver boundaries(differential(previous(d)));
  for (size_t c = 0; c < K.cols(); ++c) {
    DenseVec z(here.elements.size(), Scalar(0));
    for (size_t r = 0; r < K.rows(); ++r) z[high[r]] = K.get(r, c);
    if (!boundaries.solve(z)) {
      out.vanishes = false;
      out.witness = cochain(here, z);
      return out;
    }
  }
  return out;
}

FilteredClass filtered_class(HHDegree d, const CochainSum& cocycle) {
  // A zero cocycle lies in every filtration level.
  int level = std::numeric_limits<int>::max();
  for (const auto& [s, f] : cocycle.terms())
    if (!f.is_zero()) level = std::min(level, s.n);
  return FilteredClass{d, cocycle, level};
}

FiltrationDecision filtration_membership(const HochschildComplex& C, const FilteredClass& cls, int k) {
  FiltrationDecision out;
  if (!C.apply(cls.representative).is_zero()) throw std::invalid_argument("filtration_membership: not a cocycle");
  if (cls.representative.is_zero() || cls.level >= k) {
    out.member = true;
    out.representative = cls;
    out.reason = "already supported in arities >= " + std::to_string(k);
    return out;
  }
  auto here = C.basis(cls.degree);
  DenseVec z = C.coordinates(here, cls.representative);
  Matrix D = C.differential(C.previous(cls.degree));
  std::vector<size_t> low;
  for (size_t a = 0; a < here.elements.size(); ++a)
    if (std::get<0>(here.elements[a]).n < k) low.push_back(a);
  DenseVec rhs;
  const Ring& R = C.structure().ring();
  for (size_t a : low) rhs.push_back(R.neg(z[a]));
  auto b = solve_linear(select_rows(D, low), rhs);
  if (!b) {
    out.reason = "no coboundary cancels the components of arity < " + std::to_string(k);
    return out;
  }
  DenseVec Db = D.apply(*b);
  DenseVec w(z.size());
  for (size_t a = 0; a < z.size(); ++a) w[a] = R.add(z[a], Db[a]);
  out.member = true;
  out.representative = filtered_class(cls.degree, C.cochain(here, w));
  out.reason = "cohomologous to a cocycle supported in arities >= " + std::to_string(k);
  return out;
}

}  // namespace dainf
