#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "dainf/deformation.hpp"

namespace dainf {

namespace {

struct Unknown {
  bool structure;  // m_ij on B, otherwise f_ij : B -> target
  Index2 ij;
  Tuple x;
  int y;
  std::string name;
};

Shape unknown_shape(bool structure, Index2 ij) {
  return structure ? structure_shape(ij.first, ij.second) : morphism_shape(ij.first, ij.second);
}

// One coefficient per (normalized tuple, admissible output) of the shape.
void add_unknowns(std::vector<Unknown>& out, bool structure, Index2 ij, const ModulePtr& src, const ModulePtr& tgt) {
  Shape s = unknown_shape(structure, ij);
  MultiCochain probe(src, tgt, s);
  for (const Tuple& x : tensor_tuples(*src, s.n, true)) {
    auto d = probe.target_degree(x);
    if (!d) continue;
    for (int y : tgt->slot(*d)) {
      std::string name = std::string(structure ? "m_" : "f_") + std::to_string(ij.first) + std::to_string(ij.second) +
                         "(" + tuple_names(*src, x) + ")[" + tgt->name(y) + "]";
      out.push_back({structure, ij, x, y, std::move(name)});
    }
  }
}

struct Equation {
  bool structure;
  int u, v;
};

struct Problem {
  const StructureFamily& B;
  const StructureFamily& target;
  const MultiCochain& f01;
  EpsilonReading reading;
  std::vector<Unknown> unknowns;

  std::pair<StructureFamily, MorphismFamily> build(const DenseVec& vals) const {
    StructureFamily m = B;
    MorphismFamily f(B.module(), target.module());
    f.set(0, 1, f01);
    std::map<std::pair<bool, Index2>, MultiCochain> parts;
    for (size_t a = 0; a < unknowns.size(); ++a) {
      if (vals[a] == 0) continue;
      const Unknown& u = unknowns[a];
      auto it = parts
                    .try_emplace({u.structure, u.ij}, B.module(), u.structure ? B.module() : target.module(),
                                 unknown_shape(u.structure, u.ij))
                    .first;
      it->second.add(u.x, Vec{{u.y, vals[a]}});
    }
    for (const auto& [key, g] : parts) {
      if (g.is_zero()) continue;
      if (key.first)
        m.set(key.second.first, key.second.second, g);
      else
        f.set(key.second.first, key.second.second, g);
    }
    return {m, f};
  }

  using RowKey = std::tuple<size_t, Tuple, int>;  // equation, input tuple, output
  std::map<RowKey, Scalar> residual(const std::vector<Equation>& eqs, const DenseVec& vals) const {
    auto [m, f] = build(vals);
    std::map<RowKey, Scalar> out;
    for (size_t e = 0; e < eqs.size(); ++e) {
      const Equation& q = eqs[e];
      MultiCochain r = q.structure ? structure_equation(m, q.u, q.v) : [&] {
        auto [lhs, rhs] = morphism_equation(f, m, target, q.u, q.v, reading);
        return lhs - rhs;
      }();
      for (const auto& [x, val] : r.entries())
        for (const auto& [y, c] : val)
          if (c != 0) out[{e, x, y}] = c;
    }
    return out;
  }
};

DenseVec plus(const Ring& R, DenseVec v, const DenseVec& d, const Scalar& c = Scalar(1)) {
  for (size_t a = 0; a < d.size(); ++a)
    if (d[a] != 0) v[a] = R.add(v[a], R.mul(c, d[a]));
  return v;
}

bool solvable(const Matrix& M, const DenseVec& rhs, const std::vector<size_t>& rows) {
  Matrix S(M.ring(), rows.size(), M.cols());
  DenseVec b(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [c, v] : M.row(rows[r])) S.set(r, c, v);
    b[r] = rhs[rows[r]];
  }
  return LinearSolver(S).solve(b).has_value();
}

mpz_class modulus_of(const Ring& R, const Scalar& x) {
  if (R.kind() == RingKind::integers) return abs(x.get_num());
  if (R.kind() == RingKind::p_local) {
    mpz_class q = 1;
    for (long v = Ring::valuation(x, R.prime()); v > 0; --v) q *= R.prime();
    return q;
  }
  return 0;
}

// What each constraint says about the unknowns it shares with the others,
// modulo q = gcd of the coefficients of the unknowns private to some row.
std::vector<std::string> congruences(const Ring& R, const std::vector<ExtensionConstraint>& rows) {
  if (R.is_field()) return {};
  std::map<std::string, int> uses;
  for (const auto& r : rows)
    for (const auto& [n, _] : r.coefficients) ++uses[n];
  mpz_class q = 0;
  for (const auto& r : rows) {
    mpz_class g = 0;
    for (const auto& [n, c] : r.coefficients)
      if (uses[n] == 1) g = gcd(g, modulus_of(R, c));
    if (g != 0) q = gcd(q, g);
  }
  std::vector<std::string> out;
  for (const auto& r : rows) {
    std::vector<std::pair<std::string, mpz_class>> shared;
    for (const auto& [n, c] : r.coefficients)
      if (uses[n] > 1) shared.push_back({n, c.get_num()});
    mpz_class k = r.constant.get_num();
    std::string where = r.equation + " (" + std::to_string(r.u) + "," + std::to_string(r.v) + "): ";
    if (R.kind() != RingKind::integers || q == 0 || q == 1) {
      out.push_back(where + r.text());
      continue;
    }
    if (shared.size() == 1) {
      mpz_class a = shared[0].second % q, inv;
      if (a < 0) a += q;
      if (mpz_invert(inv.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t())) {
        mpz_class val = (-k * inv) % q;
        if (val < 0) val += q;
        out.push_back(where + shared[0].first + " = " + val.get_str() + " mod " + q.get_str());
        continue;
      }
    }
    std::string s;
    for (const auto& [n, c] : shared) {
      mpz_class cr = c % q;
      if (cr < 0) cr += q;
      if (cr != 0) s += (s.empty() ? "" : " + ") + cr.get_str() + "*" + n;
    }
    mpz_class kr = k % q;
    if (kr < 0) kr += q;
    if (s.empty())
      out.push_back(where + kr.get_str() + " = 0 mod " + q.get_str());
    else
      out.push_back(where + s + " + " + kr.get_str() + " = 0 mod " + q.get_str());
  }
  return out;
}

}  // namespace

std::string ExtensionConstraint::text() const {
  std::string s;
  for (const auto& [n, c] : coefficients) s += (s.empty() ? "" : " + ") + c.get_str() + "*" + n;
  if (s.empty()) s = "0";
  if (constant != 0) s += " + " + constant.get_str();
  return s + " = 0";
}

ExtensionResult extend_structure(const StructureFamily& B, const StructureFamily& target, const MultiCochain& f01,
                                 const ExtensionOptions& opts) {
  for (const auto& [ij, _] : B.ops())
    if (ij.first + ij.second >= 3 && !opts.fixed.count(ij))
      throw std::invalid_argument("B has a higher operation m_" + std::to_string(ij.first) + std::to_string(ij.second) +
                                  " that is not marked fixed");
  if (B.get(0, 1) && !B.get(0, 1)->is_zero()) throw std::invalid_argument("extension needs m_01 = 0 on the source");
  if (f01.shape() != morphism_shape(0, 1) || !same_module(f01.source(), B.module()) ||
      !same_module(f01.target(), target.module()))
    throw std::invalid_argument("f_01 must be a map of shape " + to_string(morphism_shape(0, 1)) + " from B to the target");

  const ModulePtr& C = B.module();
  const ModulePtr& A = target.module();
  const Ring& R = B.ring();

  ExtensionResult res{false, B, MorphismFamily(C, A), 0, false, false, std::nullopt, {}, {}, {}};
  std::optional<int> forced;
  {
    auto a = arity_bound(*C, *C, 2, true, true), b = arity_bound(*C, *A, 1, true, true);
    auto c = arity_bound(*C, *C, 3, true, true), d = arity_bound(*C, *A, 2, true, true);
    if (a && b && c && d) forced = std::max({*a, *b, *c, *d, 1});
  }
  if (opts.max_arity) {
    res.max_arity = *opts.max_arity;
    res.total = forced && *forced <= *opts.max_arity;
  } else if (forced) {
    res.max_arity = *forced;
    res.total = true;
  } else {
    throw WindowInsufficient("arities of the extension are not bounded by degrees; give a maximal arity");
  }
  const int N = res.max_arity;
  const int maxh = C->max_horizontal();
  const int last = N * (maxh + 1) + 1;

  Problem P{B, target, f01, opts.reading, {}};
  DenseVec values;
  std::vector<DenseVec> free_dirs;

  for (int t = 1; t <= last; ++t) {
    size_t first_new = P.unknowns.size();
    for (int j = 1; j <= std::min(t, N); ++j) {
      int i = t - j;
      if (i > j * maxh) continue;
      if (t >= 3 && !opts.fixed.count({i, j})) add_unknowns(P.unknowns, true, {i, j}, C, C);
      if (t >= 2) add_unknowns(P.unknowns, false, {i, j}, C, A);
    }
    values.resize(P.unknowns.size(), Scalar(0));
    for (auto& d : free_dirs) d.resize(P.unknowns.size(), Scalar(0));

    std::vector<Equation> eqs;
    for (int v = 1; v <= N; ++v) {
      if (t + 1 - v >= 0 && t + 1 - v <= v * maxh) eqs.push_back({true, t + 1 - v, v});
      if (t - v >= 0 && t - v <= v * maxh) eqs.push_back({false, t - v, v});
    }
    if (eqs.empty()) continue;

    // Directions: the new unknowns, then the surviving free directions.
    std::vector<DenseVec> dirs;
    std::vector<std::string> names;
    for (size_t a = first_new; a < P.unknowns.size(); ++a) {
      DenseVec e(P.unknowns.size(), Scalar(0));
      e[a] = 1;
      dirs.push_back(e);
      names.push_back(P.unknowns[a].name);
    }

    auto R0 = P.residual(eqs, values);
    std::vector<std::map<Problem::RowKey, Scalar>> Ri;
    for (const auto& d : dirs) Ri.push_back(P.residual(eqs, plus(R, values, d)));

    // Keep an earlier direction only if the stage is affine in it jointly
    // with the ones already kept (second differences vanish).
    std::vector<std::map<Problem::RowKey, Scalar>> Rf;
    std::vector<DenseVec> kept;
    for (const auto& d : free_dirs) {
      auto Rd = P.residual(eqs, plus(R, values, d));
      auto second = [&](const DenseVec& e, const std::map<Problem::RowKey, Scalar>& Re) {
        auto Rde = P.residual(eqs, plus(R, plus(R, values, d), e));
        std::set<Problem::RowKey> keys;
        for (const std::map<Problem::RowKey, Scalar>* m : std::initializer_list<const std::map<Problem::RowKey, Scalar>*>{&R0, &Rd, &Re, &Rde})
          for (const auto& [k, _] : *m) keys.insert(k);
        auto get = [](const std::map<Problem::RowKey, Scalar>& m, const Problem::RowKey& k) {
          auto it = m.find(k);
          return it == m.end() ? Scalar(0) : it->second;
        };
        for (const auto& k : keys)
          if (R.normalize(get(Rde, k) - get(Rd, k) - get(Re, k) + get(R0, k)) != 0) return false;
        return true;
      };
      bool affine = second(d, Rd);
      for (size_t a = 0; affine && a < kept.size(); ++a) affine = second(kept[a], Rf[a]);
      if (affine) {
        kept.push_back(d);
        Rf.push_back(std::move(Rd));
      } else {
        res.conditional = true;
        res.notes.push_back("stage " + std::to_string(t) + ": a free direction enters quadratically and was frozen");
      }
    }
    for (size_t a = 0; a < kept.size(); ++a) {
      dirs.push_back(kept[a]);
      names.push_back("free_" + std::to_string(t) + "_" + std::to_string(a));
      Ri.push_back(std::move(Rf[a]));
    }

    std::map<Problem::RowKey, size_t> row_of;
    for (const auto& [k, _] : R0) row_of.try_emplace(k, 0);
    for (const auto& m : Ri)
      for (const auto& [k, _] : m) row_of.try_emplace(k, 0);
    std::vector<Problem::RowKey> keys;
    for (auto& [k, r] : row_of) {
      r = keys.size();
      keys.push_back(k);
    }
    Matrix M(R, keys.size(), dirs.size());
    DenseVec rhs(keys.size(), Scalar(0));
    for (const auto& [k, c] : R0) rhs[row_of[k]] = R.neg(c);
    for (size_t col = 0; col < Ri.size(); ++col) {
      for (const auto& [k, c] : Ri[col]) M.add_to(row_of[k], col, c);
      for (const auto& [k, c] : R0) M.add_to(row_of[k], col, R.neg(c));
    }

    LinearSolver solver(M);
    if (auto x = solver.solve(rhs)) {
      for (size_t col = 0; col < dirs.size(); ++col)
        if ((*x)[col] != 0) values = plus(R, values, dirs[col], (*x)[col]);
      free_dirs.clear();
      for (const auto& k : solver.kernel_basis()) {
        DenseVec d(P.unknowns.size(), Scalar(0));
        for (size_t col = 0; col < dirs.size(); ++col)
          if (k[col] != 0) d = plus(R, d, dirs[col], k[col]);
        if (std::any_of(d.begin(), d.end(), [](const Scalar& s) { return s != 0; })) free_dirs.push_back(d);
      }
      continue;
    }

    // Shrink to a minimal inconsistent set of rows.
    std::vector<size_t> rows;
    for (size_t r = 0; r < keys.size(); ++r)
      if (!M.row(r).empty() || rhs[r] != 0) rows.push_back(r);
    for (size_t a = 0; a < rows.size();) {
      std::vector<size_t> without = rows;
      without.erase(without.begin() + long(a));
      if (!solvable(M, rhs, without))
        rows = std::move(without);
      else
        ++a;
    }
    res.failed_stage = t;
    for (size_t r : rows) {
      const auto& [e, x, y] = keys[r];
      const Equation& q = eqs[e];
      ExtensionConstraint c;
      c.equation = q.structure ? "structure" : "morphism";
      c.u = q.u;
      c.v = q.v;
      c.entry = "(" + tuple_names(*C, x) + ") -> " + (q.structure ? C : A)->name(y);
      for (const auto& [col, v] : M.row(r)) c.coefficients.push_back({names[col], v});
      c.constant = R.neg(rhs[r]);
      res.conflict.push_back(std::move(c));
    }
    res.congruences = congruences(R, res.conflict);
    std::tie(res.structure, res.morphism) = P.build(values);
    return res;
  }

  std::tie(res.structure, res.morphism) = P.build(values);
  Window w;
  w.max_arity = N;
  auto sr = check_da_infinity(res.structure, w);
  auto mr = check_morphism(res.morphism, res.structure, target, w, opts.reading);
  if (!sr.all_hold() || !mr.all_hold())
    throw std::logic_error("extension solved every stage but fails the direct check");
  res.feasible = true;
  if (!free_dirs.empty())
    res.notes.push_back(std::to_string(free_dirs.size()) + " free directions remain in the last stage's solution");
  return res;
}

}  // namespace dainf
