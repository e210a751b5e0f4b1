#include "dainf/structure.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

namespace dainf {

void StructureFamily::set(int i, int j, const MultiCochain& m) {
  if (!(m.shape() == structure_shape(i, j)))
    throw std::invalid_argument("m_" + std::to_string(i) + std::to_string(j) + " must have shape " +
                                to_string(structure_shape(i, j)) + ", got " + to_string(m.shape()));
  if (!same_module(m.source(), A_) || !same_module(m.target(), A_))
    throw std::invalid_argument("structure map on the wrong module");
  if (m.is_zero())
    ops_.erase({i, j});
  else
    ops_.insert_or_assign(Index2{i, j}, m);
}

const MultiCochain* StructureFamily::get(int i, int j) const {
  auto it = ops_.find({i, j});
  return it == ops_.end() ? nullptr : &it->second;
}

MultiCochain StructureFamily::op(int i, int j) const {
  if (auto* m = get(i, j)) return *m;
  return MultiCochain(A_, structure_shape(i, j));
}

bool StructureFamily::is_bidga() const {
  for (const auto& [ij, _] : ops_)
    if (ij != Index2{0, 1} && ij != Index2{1, 1} && ij != Index2{0, 2}) return false;
  return true;
}

int StructureFamily::max_i() const {
  int r = 0;
  for (const auto& [ij, _] : ops_) r = std::max(r, ij.first);
  return r;
}

int StructureFamily::max_j() const {
  int r = 0;
  for (const auto& [ij, _] : ops_) r = std::max(r, ij.second);
  return r;
}

CochainSum StructureFamily::total() const {
  CochainSum s(A_);
  for (const auto& [_, m] : ops_) s.add(m);
  return s;
}

CochainSum StructureFamily::even_part() const {
  CochainSum s(A_);
  for (const auto& [ij, m] : ops_)
    if (ij.first % 2 == 0) s.add(m);
  return s;
}

CochainSum StructureFamily::odd_part() const {
  CochainSum s(A_);
  for (const auto& [ij, m] : ops_)
    if (ij.first % 2 == 1) s.add(m);
  return s;
}

void MorphismFamily::set(int s, int t, const MultiCochain& f) {
  if (!(f.shape() == morphism_shape(s, t)))
    throw std::invalid_argument("f_" + std::to_string(s) + std::to_string(t) + " must have shape " +
                                to_string(morphism_shape(s, t)) + ", got " + to_string(f.shape()));
  if (!same_module(f.source(), src_) || !same_module(f.target(), tgt_))
    throw std::invalid_argument("morphism component between the wrong modules");
  if (f.is_zero())
    maps_.erase({s, t});
  else
    maps_.insert_or_assign(Index2{s, t}, f);
}

const MultiCochain* MorphismFamily::get(int s, int t) const {
  auto it = maps_.find({s, t});
  return it == maps_.end() ? nullptr : &it->second;
}

MorphismFamily MorphismFamily::identity(const ModulePtr& A) {
  MorphismFamily f(A, A);
  MultiCochain id(A, morphism_shape(0, 1));
  for (int x = 0; x < int(A->size()); ++x) id.set({x}, {{x, Scalar(1)}});
  f.set(0, 1, id);
  return f;
}

bool EquationReport::all_hold() const { return first_failure() == nullptr; }

const CellReport* EquationReport::first_failure() const {
  for (const auto& c : cells)
    if (c.status == CellStatus::fails) return &c;
  return nullptr;
}

bool DaInfinityReport::routes_agree() const {
  return cells_match_composite && composite_zero == all_hold() && bracket_zero == all_hold();
}

namespace {

std::string describe_value(const BigradedModule& T, const Ring& R, const Vec& v) {
  std::string s;
  for (const auto& [y, c] : v) s += (s.empty() ? "" : " + ") + R.format(c) + " " + T.name(y);
  return s.empty() ? "0" : s;
}

bool in_vertical_window(const Window& w, const Bidegree& d) {
  return (!w.vmin || d.v >= *w.vmin) && (!w.vmax || d.v <= *w.vmax);
}

// Does the vertical window contain every tuple of arity n?
bool vertical_window_covers(const Window& w, const BigradedModule& A, int n) {
  if (A.size() == 0) return true;
  return (!w.vmin || long(n) * A.min_vertical() >= *w.vmin) && (!w.vmax || long(n) * A.max_vertical() <= *w.vmax);
}

// The first nonzero entry of e on a tuple inside the vertical window.
std::optional<std::string> first_violation(const MultiCochain& e, const Window& w) {
  for (const auto& [x, v] : e.entries()) {
    if (!in_vertical_window(w, tuple_degree(*e.source(), x))) continue;
    return "on (" + tuple_names(*e.source(), x) + "): " + describe_value(*e.target(), e.ring(), v);
  }
  return std::nullopt;
}

MultiCochain restrict_to_window(const MultiCochain& e, const Window& w) {
  MultiCochain r(e.source(), e.target(), e.shape());
  for (const auto& [x, v] : e.entries())
    if (in_vertical_window(w, tuple_degree(*e.source(), x))) r.set(x, v);
  return r;
}

// True when the stored data determines every m_{ij}: either nothing is
// truncated, or degrees force m_{ij} = 0 beyond the known arity.
bool family_complete(const StructureFamily& m) {
  if (!m.known_arity) return true;
  auto b = arity_bound(*m.module(), 2, true);
  return b && *b <= *m.known_arity;
}

}  // namespace

MultiCochain structure_equation(const StructureFamily& m, int u, int v) {
  MultiCochain e(m.module(), Shape{v, u, 3 - u - v});
  for (const auto& [ij, f] : m.ops()) {
    auto [i, j] = ij;
    for (const auto& [pq, g] : m.ops()) {
      auto [p, q] = pq;
      if (i + p != u || j + q - 1 != v) continue;
      for (int r = 0; r < j; ++r) {
        int t = j - 1 - r;
        long s = long(r) * q + t + long(p) * j;
        e = e + insert_at(f, g, r).scaled(Scalar(sign_of(s)));
      }
    }
  }
  return e;
}

DaInfinityReport check_da_infinity(const StructureFamily& m, const Window& w) {
  DaInfinityReport rep;
  const BigradedModule& A = *m.module();
  bool complete = family_complete(m);
  std::optional<int> arity_cap = w.max_arity;
  if (m.known_arity && !complete) arity_cap = arity_cap ? std::min(*arity_cap, *m.known_arity) : *m.known_arity;

  std::set<Index2> cells;
  for (const auto& [ij, _] : m.ops())
    for (const auto& [pq, __] : m.ops()) cells.insert({ij.first + pq.first, ij.second + pq.second - 1});
  bool total = complete;
  for (auto [u, v] : cells) {
    CellReport c{u, v, CellStatus::holds, {}};
    if ((w.max_u && u > *w.max_u) || (arity_cap && v > *arity_cap)) {
      c.status = CellStatus::unchecked;
      total = false;
      rep.cells.push_back(c);
      continue;
    }
    if (!vertical_window_covers(w, A, v)) total = false;
    MultiCochain e = structure_equation(m, u, v);
    if (auto bad = first_violation(e, w)) {
      c.status = CellStatus::fails;
      c.witness = *bad;
    }
    rep.cells.push_back(c);
  }
  if (!complete)
    rep.notes.push_back("structure data known only up to arity " + std::to_string(*m.known_arity));
  rep.total = total;

  // Cross-checks through the composition product and the bracket.
  CochainSum M = m.total();
  CochainSum C = compose(M, hash(M));
  CochainSum B = bracket(M, hash(M));
  auto examined = [&](const Shape& s) {
    int u = s.k, v = s.n;
    if (!cells.count({u, v})) return false;
    return !((w.max_u && u > *w.max_u) || (arity_cap && v > *arity_cap));
  };
  rep.composite_zero = true;
  rep.bracket_zero = true;
  rep.cells_match_composite = true;
  for (const auto& [s, f] : C.terms())
    if (examined(s) && !restrict_to_window(f, w).is_zero()) rep.composite_zero = false;
  for (const auto& [s, f] : B.terms())
    if (examined(s) && !restrict_to_window(f, w).is_zero()) rep.bracket_zero = false;
  for (const auto& c : rep.cells) {
    if (c.status == CellStatus::unchecked) continue;
    Shape s{c.v, c.u, 3 - c.u - c.v};
    if (!(restrict_to_window(structure_equation(m, c.u, c.v), w) == restrict_to_window(C.component(s), w)))
      rep.cells_match_composite = false;
  }
  return rep;
}

UnitReport check_strict_unit(const StructureFamily& m) {
  UnitReport r;
  const BigradedModule& A = *m.module();
  auto eta = A.unit();
  if (!eta) {
    r.ok = false;
    r.failures.push_back("no unit designated");
    return r;
  }
  if (auto* d = m.get(0, 1); d && !d->at({*eta}).empty()) {
    r.ok = false;
    r.failures.push_back("m_01(unit) = " + describe_value(A, m.ring(), d->at({*eta})));
  }
  MultiCochain mu = m.op(0, 2);
  for (int x = 0; x < int(A.size()); ++x) {
    Vec want{{x, Scalar(1)}};
    if (mu.at({*eta, x}) != want) {
      r.ok = false;
      r.failures.push_back("m_02(unit, " + A.name(x) + ") = " + describe_value(A, m.ring(), mu.at({*eta, x})));
    }
    if (mu.at({x, *eta}) != want) {
      r.ok = false;
      r.failures.push_back("m_02(" + A.name(x) + ", unit) = " + describe_value(A, m.ring(), mu.at({x, *eta})));
    }
  }
  for (const auto& [ij, f] : m.ops()) {
    if (ij.first + ij.second < 3) continue;
    for (const auto& [x, v] : f.entries())
      if (tuple_has_unit(A, x)) {
        r.ok = false;
        r.failures.push_back("m_" + std::to_string(ij.first) + std::to_string(ij.second) + "(" +
                             tuple_names(A, x) + ") = " + describe_value(A, m.ring(), v) +
                             " on a tuple containing the unit");
        break;
      }
  }
  return r;
}

UnitReport check_morphism_unit(const MorphismFamily& f) {
  UnitReport r;
  auto eta = f.source()->unit();
  auto etabar = f.target()->unit();
  if (!eta || !etabar) return r;
  const MultiCochain* f01 = f.get(0, 1);
  Vec want{{*etabar, Scalar(1)}};
  if (!f01 || f01->at({*eta}) != want) {
    r.ok = false;
    r.failures.push_back("f_01(unit) is not the unit");
  }
  for (const auto& [st, g] : f.maps()) {
    if (st.first + st.second < 2) continue;
    for (const auto& [x, v] : g.entries())
      if (tuple_has_unit(*f.source(), x)) {
        r.ok = false;
        r.failures.push_back("f_" + std::to_string(st.first) + std::to_string(st.second) +
                             " is nonzero on (" + tuple_names(*f.source(), x) + ")");
        break;
      }
  }
  return r;
}

long morphism_epsilon(int u, int j, const std::vector<int>& p, const std::vector<int>& q, EpsilonReading reading) {
  // p and q are indexed 1..j in the formula; stored 0-based here.
  auto P = [&](int s) { return long(p.at(size_t(s - 1))); };
  auto Q = [&](int s) { return long(q.at(size_t(s - 1))); };
  long e = u;
  for (int w = 1; w <= j - 1; ++w) {
    long sum_p = 0, sum_q = 0;
    for (int s = j - w + 1; s <= j; ++s) {
      sum_p += P(s);
      sum_q += Q(s);
    }
    e += long(j) * P(w) + long(w) * (Q(j - w) - P(w));
    if (reading == EpsilonReading::grouped)
      e += Q(j - w) * (sum_p + sum_q);
    else
      e += Q(j - w) * sum_p + sum_q;
  }
  return e;
}

std::pair<MultiCochain, MultiCochain> morphism_equation(const MorphismFamily& f, const StructureFamily& m,
                                                        const StructureFamily& mbar, int u, int v,
                                                        EpsilonReading reading) {
  Shape shape{v, u, 2 - u - v};
  MultiCochain lhs(f.source(), f.target(), shape), rhs(f.source(), f.target(), shape);
  for (const auto& [ij, fij] : f.maps()) {
    auto [i, j] = ij;
    for (const auto& [pq, mpq] : m.ops()) {
      auto [p, q] = pq;
      if (i + p != u || j + q - 1 != v) continue;
      for (int r = 0; r < j; ++r) {
        int t = j - 1 - r;
        lhs = lhs + insert_at(fij, mpq, r).scaled(Scalar(sign_of(long(r) * q + t + long(p) * j)));
      }
    }
  }
  std::vector<std::pair<Index2, const MultiCochain*>> comps;
  for (const auto& [st, g] : f.maps()) comps.push_back({st, &g});
  for (const auto& [ij, mij] : mbar.ops()) {
    auto [i, j] = ij;
    if (i > u || j > v) continue;
    std::vector<int> ps, qs;
    std::vector<const MultiCochain*> inners;
    std::function<void(int, int)> choose = [&](int rem_p, int rem_q) {
      if (int(inners.size()) == j) {
        if (rem_p != 0 || rem_q != 0) return;
        long eps = morphism_epsilon(u, j, ps, qs, reading);
        rhs = rhs + compose_tensor(mij, inners).scaled(Scalar(sign_of(eps)));
        return;
      }
      int slots_left = j - int(inners.size());
      for (const auto& [st, g] : comps) {
        auto [s, t] = st;
        if (s > rem_p || t > rem_q - (slots_left - 1)) continue;
        ps.push_back(s);
        qs.push_back(t);
        inners.push_back(g);
        choose(rem_p - s, rem_q - t);
        ps.pop_back();
        qs.pop_back();
        inners.pop_back();
      }
    };
    choose(u - i, v);
  }
  return {lhs, rhs};
}

EquationReport check_morphism(const MorphismFamily& f, const StructureFamily& m, const StructureFamily& mbar,
                              const Window& w, EpsilonReading reading) {
  EquationReport rep;
  // Cells with possibly nonzero terms: u up to the sum of the largest
  // horizontal indices, v up to the largest arity reachable.
  int fi = 0, fj = 0;
  for (const auto& [st, _] : f.maps()) {
    fi = std::max(fi, st.first);
    fj = std::max(fj, st.second);
  }
  int mbar_j = std::max(1, mbar.max_j());
  int max_u = std::max(fi + m.max_i(), mbar.max_i() + mbar_j * fi);
  int max_v = std::max(fj + m.max_j() - 1, mbar_j * fj);
  bool complete = family_complete(m) && family_complete(mbar) && !f.known_arity;
  std::optional<int> arity_cap = w.max_arity;
  auto cap_with = [&](std::optional<int> k) {
    if (k) arity_cap = arity_cap ? std::min(*arity_cap, *k) : *k;
  };
  if (!family_complete(m)) cap_with(m.known_arity);
  if (!family_complete(mbar)) cap_with(mbar.known_arity);
  cap_with(f.known_arity);
  bool total = complete;
  for (int u = 0; u <= max_u; ++u)
    for (int v = 1; v <= max_v; ++v) {
      CellReport c{u, v, CellStatus::holds, {}};
      if ((w.max_u && u > *w.max_u) || (arity_cap && v > *arity_cap)) {
        c.status = CellStatus::unchecked;
        total = false;
        rep.cells.push_back(c);
        continue;
      }
      if (!vertical_window_covers(w, *f.source(), v)) total = false;
      auto [lhs, rhs] = morphism_equation(f, m, mbar, u, v, reading);
      if (lhs.is_zero() && rhs.is_zero()) continue;
      if (auto bad = first_violation(lhs - rhs, w)) {
        c.status = CellStatus::fails;
        c.witness = "left minus right " + *bad;
      }
      rep.cells.push_back(c);
    }
  rep.total = total;
  return rep;
}

OrthogonalityReport is_orthogonal(const StructureFamily& m) {
  OrthogonalityReport r;
  CochainSum e = m.even_part(), o = m.odd_part();
  CochainSum ee = compose(e, e), oo = compose(o, o);
  auto limit = [&](const CochainSum& s) {
    for (const auto& [shape, f] : s.terms()) {
      if (m.known_arity && !family_complete(m) && shape.n > *m.known_arity) continue;
      return std::optional<Shape>(shape);
    }
    return std::optional<Shape>();
  };
  auto we = limit(ee), wo = limit(oo);
  r.even_square_zero = !we;
  r.odd_square_zero = !wo;
  if (we) r.witness = "m_even o m_even nonzero in arity " + std::to_string(we->n) + ", horizontal " + std::to_string(we->k);
  else if (wo) r.witness = "m_odd o m_odd nonzero in arity " + std::to_string(wo->n) + ", horizontal " + std::to_string(wo->k);
  return r;
}

namespace {

Matrix hstack(const Matrix& a, const Matrix& b) {
  Matrix r(a.ring(), a.rows(), a.cols() + b.cols());
  for (size_t i = 0; i < a.rows(); ++i) {
    for (const auto& [j, v] : a.row(i)) r.set(i, j, v);
    for (const auto& [j, v] : b.row(i)) r.set(i, a.cols() + j, v);
  }
  return r;
}

Matrix top_rows(const Matrix& m, size_t n) {
  Matrix r(m.ring(), n, m.cols());
  for (size_t i = 0; i < n; ++i)
    for (const auto& [j, v] : m.row(i)) r.set(i, j, v);
  return r;
}

}  // namespace

Matrix arity_one_block(const MultiCochain& f, const Bidegree& d) {
  const BigradedModule& S = *f.source();
  const BigradedModule& T = *f.target();
  Bidegree td{d.h - f.hshift(), d.v + f.vshift()};
  const auto& cols = S.slot(d);
  const auto& rows = T.slot(td);
  Matrix M(S.ring(), rows.size(), cols.size());
  for (size_t c = 0; c < cols.size(); ++c)
    for (const auto& [y, val] : f.at({cols[c]})) {
      auto it = std::find(rows.begin(), rows.end(), y);
      M.set(size_t(it - rows.begin()), c, val);
    }
  return M;
}

E2Page e2_pages(const StructureFamily& m) {
  const BigradedModule& A = *m.module();
  const Ring& R = m.ring();
  MultiCochain d = m.op(0, 1), h = m.op(1, 1);
  if (!compose(d, d).is_zero()) throw std::invalid_argument("e2_pages: m_01 does not square to zero");
  E2Page out;
  auto d_from = [&](Bidegree b) { return arity_one_block(d, b); };
  for (const Bidegree& b : A.support()) {
    Matrix din = d_from(Bidegree{b.h, b.v - 1});
    Matrix dout = d_from(b);
    // A slot that is absent still needs the right number of rows/cols.
    if (din.rows() != A.slot(b).size()) din = Matrix(R, A.slot(b).size(), 0);
    out.vertical.emplace(b, homology_at(din, dout));

    Matrix K = kernel_matrix(dout);
    Matrix N = K;
    if (b.h >= 1) {
      Matrix hK = arity_one_block(h, b) * K;
      Matrix Dprev = d_from(Bidegree{b.h - 1, b.v - 1});
      if (Dprev.rows() != hK.rows()) Dprev = Matrix(R, hK.rows(), 0);
      Matrix neg(R, Dprev.rows(), Dprev.cols());
      for (size_t i = 0; i < Dprev.rows(); ++i)
        for (const auto& [j, v] : Dprev.row(i)) neg.set(i, j, -v);
      Matrix kern = kernel_matrix(hstack(hK, neg));
      N = K * top_rows(kern, K.cols());
    }
    // Denominator: vertical boundaries plus m_11 of cycles one step right.
    Bidegree right{b.h + 1, b.v};
    Matrix Kr = kernel_matrix(d_from(right));
    Matrix hr = arity_one_block(h, right);
    if (hr.rows() != A.slot(b).size()) hr = Matrix(R, A.slot(b).size(), Kr.rows());
    Matrix den = hstack(din, hr * Kr);
    out.page.emplace(b, subquotient(N, den));
  }
  return out;
}

E2Decision is_e2_equivalence(const MultiCochain& f01, const StructureFamily& m, const StructureFamily& mbar) {
  if (!(f01.shape() == morphism_shape(0, 1))) throw std::invalid_argument("f_01 must have shape (1,0,0)");
  E2Page P = e2_pages(m), Q = e2_pages(mbar);
  const Ring& R = m.ring();
  E2Decision dec;
  std::set<Bidegree> degrees;
  for (const auto& [b, _] : P.page) degrees.insert(b);
  for (const auto& [b, _] : Q.page) degrees.insert(b);
  for (const Bidegree& b : degrees) {
    static const HomologyPresentation zero;
    const HomologyPresentation& p = P.page.count(b) ? P.page.at(b) : zero;
    const HomologyPresentation& q = Q.page.count(b) ? Q.page.at(b) : zero;
    Matrix F(R, q.size(), p.size());
    const auto& src_slot = m.module()->slot(b);
    const auto& tgt_slot = mbar.module()->slot(b);
    for (size_t c = 0; c < p.size(); ++c) {
      Vec x;
      for (size_t a = 0; a < src_slot.size(); ++a)
        if (p.generators[c][a] != 0) x[src_slot[a]] = p.generators[c][a];
      Vec y;
      for (const auto& [xi, coef] : x) add_scaled(y, f01.at({xi}), coef, R);
      DenseVec yd(tgt_slot.size());
      for (const auto& [yi, coef] : y) {
        auto it = std::find(tgt_slot.begin(), tgt_slot.end(), yi);
        yd[size_t(it - tgt_slot.begin())] = coef;
      }
      DenseVec coords = q.size() ? q.class_coordinates(yd) : DenseVec{};
      for (size_t r = 0; r < coords.size(); ++r) F.set(r, c, coords[r]);
    }
    dec.induced.emplace(b, F);
    bool same = p.free_rank == q.free_rank && p.torsion == q.torsion;
    // Surjectivity onto the target presentation, relations included.
    Matrix rel(R, q.size(), q.torsion.size());
    for (size_t i = 0; i < q.torsion.size(); ++i) rel.set(i, i, q.torsion[i]);
    SmithForm sf = diagonalize(hstack(F, rel));
    bool onto = sf.rank == q.size();
    for (const auto& s : sf.diagonal) onto = onto && R.is_unit(s);
    if (!(same && onto) && dec.equivalence) {
      dec.equivalence = false;
      dec.witness = "bidegree (" + std::to_string(b.h) + "," + std::to_string(b.v) + "): " +
                    (same ? "induced map is not onto" : "E_2 terms are not isomorphic");
    }
  }
  return dec;
}

}  // namespace dainf
