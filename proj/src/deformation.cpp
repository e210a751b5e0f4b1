#include "dainf/deformation.hpp"

#include <algorithm>
#include <functional>
#include <utility>
#include <stdexcept>

namespace dainf {

std::string to_string(Theorem t) {
  switch (t) {
    case Theorem::derived: return "derived";
    case Theorem::classical: return "classical";
    case Theorem::massey_fixed: return "massey-fixed";
  }
  return "?";
}

std::optional<Theorem> parse_theorem(const std::string& s) {
  for (Theorem t : {Theorem::derived, Theorem::classical, Theorem::massey_fixed})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::string to_string(PerturbCase c) {
  switch (c) {
    case PerturbCase::A: return "A";
    case PerturbCase::B: return "B";
    case PerturbCase::classical: return "classical";
    case PerturbCase::general: return "general";
  }
  return "?";
}

std::optional<PerturbCase> parse_perturb_case(const std::string& s) {
  for (PerturbCase c : {PerturbCase::A, PerturbCase::B, PerturbCase::classical, PerturbCase::general})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::string to_string(Obstruction::Kind k) {
  switch (k) {
    case Obstruction::Kind::not_cocycle: return "not-a-cocycle";
    case Obstruction::Kind::nonzero_class: return "nonzero-class";
    case Obstruction::Kind::integral_only: return "integral-obstruction";
    case Obstruction::Kind::unresolved: return "unresolved";
  }
  return "?";
}

namespace {

std::vector<Index2> base_slots(Theorem t) {
  switch (t) {
    case Theorem::derived: return {{1, 1}, {0, 2}};
    case Theorem::classical: return {{0, 1}, {0, 2}};
    case Theorem::massey_fixed: return {{0, 2}, {0, 3}};
  }
  return {};
}

bool is_base_slot(Theorem t, Index2 ij) {
  auto s = base_slots(t);
  return std::find(s.begin(), s.end(), ij) != s.end();
}

CochainSum as_sum(const MultiCochain& f) {
  CochainSum s(f.source(), f.target());
  s.add(f);
  return s;
}

// Components of arity at most N.
CochainSum up_to_arity(const CochainSum& f, int N) {
  CochainSum out(f.source(), f.target());
  for (const auto& [s, g] : f.terms())
    if (s.n <= N) out.add(g);
  return out;
}

CochainSum hochschild_d(const TwistingCochain& a, const CochainSum& f) {
  if (a.setting == Theorem::derived) return derived_differential(a.base, f);
  return bracket(a.base.total(), f);
}

}  // namespace

TwistingCochain TwistingCochain::split(const StructureFamily& m, Theorem setting) {
  StructureFamily base(m.module());
  TwistingCochain a(setting, base);
  for (const auto& [ij, f] : m.ops()) {
    if (f.is_zero()) continue;
    if (setting != Theorem::derived && ij.first != 0)
      throw std::invalid_argument("a " + to_string(setting) + " structure lives in horizontal degree 0");
    if (setting == Theorem::derived && ij == Index2{0, 1})
      throw std::invalid_argument("the derived setting needs m_01 = 0");
    if (setting == Theorem::massey_fixed && ij == Index2{0, 1})
      throw std::invalid_argument("a minimal model has m_1 = 0");
    if (is_base_slot(setting, ij))
      a.base.set(ij.first, ij.second, f);
    else if (ij.first + ij.second < 3 || (setting == Theorem::massey_fixed && ij.second < 4))
      throw std::invalid_argument("operation m_" + std::to_string(ij.first) + std::to_string(ij.second) +
                                  " is neither base nor twisting");
    else
      a.terms.emplace(ij, f);
  }
  a.known_arity = m.known_arity;
  return a;
}

StructureFamily TwistingCochain::structure() const {
  StructureFamily m = base;
  for (const auto& [ij, f] : terms)
    if (!f.is_zero()) m.set(ij.first, ij.second, f);
  m.known_arity = known_arity;
  return m;
}

CochainSum TwistingCochain::sum() const {
  CochainSum s(base.module());
  for (const auto& [_, f] : terms) s.add(f);
  return s;
}

MultiCochain TwistingCochain::term(int i, int j) const {
  auto it = terms.find({i, j});
  return it != terms.end() ? it->second : MultiCochain(base.module(), structure_shape(i, j));
}

bool TwistingCochain::is_zero() const {
  return std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.second.is_zero(); });
}

bool same_structure(const StructureFamily& a, const StructureFamily& b) {
  auto nonzero = [](const StructureFamily& m) {
    std::map<Index2, const MultiCochain*> out;
    for (const auto& [ij, f] : m.ops())
      if (!f.is_zero()) out[ij] = &f;
    return out;
  };
  auto x = nonzero(a), y = nonzero(b);
  if (x.size() != y.size()) return false;
  for (const auto& [ij, f] : x) {
    auto it = y.find(ij);
    if (it == y.end() || !(*f == *it->second)) return false;
  }
  return true;
}

ArityWindow structure_arity_window(const StructureFamily& m, const DeformationOptions& opts) {
  const BigradedModule& A = *m.module();
  auto bound = arity_bound(A, A, 2, opts.normalized, A.max_horizontal() > 0);
  if (m.known_arity && (!bound || *bound > *m.known_arity)) bound.reset();
  ArityWindow w;
  if (bound && (!opts.max_arity || *bound <= *opts.max_arity)) {
    w.max_arity = *bound;
  } else if (opts.max_arity || m.known_arity) {
    w.max_arity = opts.max_arity ? *opts.max_arity : *m.known_arity;
    if (m.known_arity) w.max_arity = std::min(w.max_arity, *m.known_arity);
    w.forced = false;
  } else {
    throw WindowInsufficient("degrees do not bound the arity of structure maps; give a maximal arity");
  }
  w.max_arity = std::max(w.max_arity, 2);
  return w;
}

MaurerCartanReport check_maurer_cartan(const TwistingCochain& a, const DeformationOptions& opts) {
  MaurerCartanReport r;
  StructureFamily m = a.structure();
  ArityWindow w = structure_arity_window(m, opts);
  CochainSum A = a.sum();
  CochainSum residual(m.module());
  if (a.setting == Theorem::derived) {
    CochainSum odd(m.module()), d(m.module());
    for (const auto& [s, f] : A.terms())
      if (s.k % 2) odd.add(f);
    if (auto* g = a.base.get(1, 1)) d.add(*g);
    residual = hochschild_d(a, A).scaled(Scalar(2)) + bracket(A, hash(A)) - bracket(d, odd).scaled(Scalar(4));
  } else {
    residual = hochschild_d(a, A) + compose(A, A);
  }
  // Composites of two operations of arity <= N reach arity 2N - 1; with the
  // arity window forced by degrees every such cell is evaluated.
  int eq_arity = w.forced ? 2 * w.max_arity - 1 : w.max_arity;
  residual = up_to_arity(residual, eq_arity);
  r.formula_holds = residual.is_zero();
  if (!r.formula_holds) r.witness = "Maurer-Cartan residual " + describe(residual);

  Window win;
  win.max_arity = eq_arity;
  r.structure = check_da_infinity(m, win);
  r.structure_holds = r.structure.all_hold();
  if (!r.structure_holds && r.witness.empty()) {
    const CellReport* c = r.structure.first_failure();
    r.witness = "structure equation (" + std::to_string(c->u) + "," + std::to_string(c->v) + ") " + c->witness;
  }
  r.total = w.forced && r.structure.total;
  return r;
}

StructureFamily transport_structure(const StructureFamily& m, const MorphismFamily& f, int max_arity,
                                    EpsilonReading reading) {
  const ModulePtr& A = m.module();
  const MultiCochain* id = f.get(0, 1);
  if (!id || !(*id == MorphismFamily::identity(A).maps().begin()->second))
    throw std::invalid_argument("transport needs f_01 = id");
  StructureFamily mbar(A);
  const int H = A->max_horizontal();
  for (int total = 1; total <= max_arity * (1 + H); ++total)
    for (int v = 1; v <= std::min(total, max_arity); ++v) {
      int u = total - v;
      if (u > v * H) continue;
      // The (u,v) equation contains mbar_{uv}(f_01, ..., f_01) once, with
      // sign (-1)^eps; every other term involves lower data.
      auto [lhs, rhs] = morphism_equation(f, m, mbar, u, v, reading);
      long eps = morphism_epsilon(u, v, std::vector<int>(size_t(v), 0), std::vector<int>(size_t(v), 1), reading);
      MultiCochain val = (lhs - rhs).scaled(Scalar(sign_of(eps)));
      if (!val.is_zero()) mbar.set(u, v, val);
    }
  return mbar;
}

MorphismFamily PerturbationStep::morphism_family() const {
  MorphismFamily f = MorphismFamily::identity(b.source());
  f.set(b.shape().k, b.shape().n, b);
  return f;
}

namespace {

// Order in which slots are processed: by total degree then horizontal
// index in the derived setting, by arity otherwise.
using Level = std::pair<int, int>;
Level level_of(Theorem t, int u, int v) { return t == Theorem::derived ? Level{u + v, u} : Level{v, 0}; }
Level level_of(Theorem t, const Shape& s) { return level_of(t, s.k, s.n); }

}  // namespace

PerturbationStep perturb(const TwistingCochain& a, const MultiCochain& b, PerturbCase c,
                         const DeformationOptions& opts) {
  if (b.shape().total() != 1) throw std::invalid_argument("perturbation cochain must have total degree 1");
  if (b.shape().n < 1) throw std::invalid_argument("perturbation cochain must have positive arity");
  if (b.shape().k == 0 && b.shape().n == 1) throw std::invalid_argument("perturbation cannot change f_01");
  StructureFamily m = a.structure();
  ArityWindow w = structure_arity_window(m, opts);

  // The components that the step subtracts from a.
  std::vector<MultiCochain> expected;
  switch (c) {
    case PerturbCase::A:
    case PerturbCase::B: {
      if (a.setting != Theorem::derived) throw std::invalid_argument("cases A and B need the derived setting");
      MultiCochain d = a.base.op(1, 1), mu = a.base.op(0, 2);
      const MultiCochain& killer = c == PerturbCase::A ? d : mu;
      if (!bracket(killer, b).is_zero())
        throw SideConditionViolated(c == PerturbCase::A ? "case A needs [d, b] = 0" : "case B needs [mu, b] = 0");
      int k = b.shape().k + (c == PerturbCase::A ? 0 : 1);
      int n = b.shape().n + (c == PerturbCase::A ? 1 : 0);
      if (k + n < 3) throw std::invalid_argument("perturbation needs k + n >= 3");
      expected.push_back(bracket(c == PerturbCase::A ? mu : d, b));
      break;
    }
    case PerturbCase::classical: {
      if (a.setting == Theorem::derived) throw std::invalid_argument("classical perturbation needs a classical setting");
      CochainSum Dp = bracket(a.base.total(), as_sum(b));
      if (Dp.terms().size() > 1)
        throw SideConditionViolated("classical perturbation needs D(p) concentrated in one arity, got " + describe(Dp));
      if (!Dp.is_zero()) expected.push_back(Dp.terms().begin()->second);
      break;
    }
    case PerturbCase::general: {
      CochainSum Dp = bracket(a.base.total(), as_sum(b));
      for (Index2 ij : base_slots(a.setting))
        if (!Dp.component(structure_shape(ij.first, ij.second)).is_zero())
          throw SideConditionViolated("perturbation would change the base operation m_" + std::to_string(ij.first) +
                                      std::to_string(ij.second));
      std::optional<int> lowest;
      for (const auto& [s, _] : Dp.terms()) {
        int l = level_of(a.setting, s).first;
        lowest = lowest ? std::min(*lowest, l) : l;
      }
      for (const auto& [s, g] : Dp.terms())
        if (level_of(a.setting, s).first == *lowest) expected.push_back(g);
      break;
    }
  }

  PerturbationStep step{c, b, a, a};
  MorphismFamily f = step.morphism_family();
  StructureFamily mbar = transport_structure(m, f, w.max_arity, opts.reading);
  mbar.known_arity = m.known_arity;
  step.after = TwistingCochain::split(mbar, a.setting);
  step.after.known_arity = a.known_arity;

  step.twisting = check_maurer_cartan(step.after, opts).holds();
  Window win;
  win.max_arity = w.max_arity;
  step.morphism = check_morphism(f, m, mbar, win, opts.reading).all_hold();

  std::optional<Level> level;
  for (const auto& e : expected) {
    Level l = level_of(a.setting, e.shape());
    level = level ? std::min(*level, l) : l;
  }
  step.low_degrees_unchanged = same_structure(step.after.base, a.base);
  auto unchanged = [&](Index2 ij) { return step.after.term(ij.first, ij.second) == a.term(ij.first, ij.second); };
  for (const std::map<Index2, MultiCochain>* terms : {&std::as_const(step.after.terms), &a.terms})
    for (const auto& [ij, _] : *terms)
      if ((!level || level_of(a.setting, ij.first, ij.second) < *level) && !unchanged(ij))
        step.low_degrees_unchanged = false;
  step.leading_term = true;
  for (const auto& e : expected) {
    int k = e.shape().k, n = e.shape().n;
    if (n <= w.max_arity && !(step.after.term(k, n) == a.term(k, n) - e)) step.leading_term = false;
  }
  step.total = w.forced;
  return step;
}

namespace {

using CochainOp = std::function<CochainSum(const CochainSum&)>;

// Solves op(p) = c over the shapes `ps`, falling back to the fraction
// field to tell ring-level obstructions from nonzero classes.
struct Solve {
  std::optional<CochainSum> p;
  bool rational = false;
};

Solve solve_over_shapes(const HochschildComplex& H, const std::vector<Shape>& ps, const MultiCochain& c,
                        const CochainOp& op) {
  const ModulePtr& A = c.source();
  auto src = H.basis_for(ps);
  std::vector<Shape> dst_shapes{c.shape()};
  for (const auto& [s, x, y] : src.elements) {
    MultiCochain e(A, s);
    e.set(x, Vec{{y, Scalar(1)}});
    CochainSum img = op(as_sum(e));
    for (const auto& [t, _] : img.terms())
      if (std::find(dst_shapes.begin(), dst_shapes.end(), t) == dst_shapes.end()) dst_shapes.push_back(t);
  }
  auto dst = H.basis_for(dst_shapes);
  Matrix M = H.matrix(src, dst, op);
  DenseVec rhs = H.coordinates(dst, as_sum(c));
  Solve out;
  if (auto x = LinearSolver(M).solve(rhs)) {
    out.p = H.cochain(src, *x);
    return out;
  }
  if (!M.ring().is_field()) {
    Matrix Q(M.ring().fraction_field(), M.rows(), M.cols());
    for (size_t r = 0; r < M.rows(); ++r)
      for (const auto& [col, v] : M.row(r)) Q.set(r, col, v);
    out.rational = LinearSolver(Q).solve(rhs).has_value();
  }
  return out;
}

void require_verified(const PerturbationStep& s) {
  if (s.verified()) return;
  std::string what;
  if (!s.twisting) what += " twisting";
  if (!s.morphism) what += " morphism";
  if (!s.low_degrees_unchanged) what += " low-degrees";
  if (!s.leading_term) what += " leading-term";
  throw std::logic_error("perturbation step failed its checks:" + what);
}

std::string slot_name(int k, int n) { return "a_" + std::to_string(k) + "," + std::to_string(n); }

}  // namespace

TrivializationCertificate trivialize(const StructureFamily& m, Theorem theorem, const DeformationOptions& opts) {
  TwistingCochain current = TwistingCochain::split(m, theorem);
  if (theorem == Theorem::massey_fixed && !current.base.get(0, 3))
    throw std::invalid_argument("fixed-m_3 trivialization needs m_3 in the structure");
  ArityWindow w = structure_arity_window(m, opts);
  TrivializationCertificate cert{theorem, m, m, {}, std::nullopt, w.forced, {}};

  auto mc = check_maurer_cartan(current, opts);
  if (!mc.holds()) throw std::invalid_argument("input is not a structure: " + mc.witness);

  HochschildOptions hopts{opts.normalized, w.max_arity};
  HochschildComplex H(current.base, theorem == Theorem::derived ? HHFlavor::derived : HHFlavor::classical, hopts);
  const CochainSum base = current.base.total();

  const int N = w.max_arity;
  const int maxh = m.module()->max_horizontal();
  std::vector<Index2> slots;
  if (theorem == Theorem::derived) {
    for (int t = 3; t <= N * (1 + maxh); ++t)
      for (int k = 0; k < t; ++k) {
        int n = t - k;
        if (n >= 1 && n <= N && k <= n * maxh) slots.push_back({k, n});
      }
  } else {
    for (int n = theorem == Theorem::classical ? 3 : 4; n <= N; ++n) slots.push_back({0, n});
  }

  for (auto [k, n] : slots) {
    MultiCochain c = current.term(k, n);
    if (c.is_zero()) continue;
    const Level lc = level_of(theorem, k, n);
    CochainSum Dc = up_to_arity(hochschild_d(current, as_sum(c)), N);
    // The Maurer-Cartan equation forces the lowest component of D(a_kn)
    // ([mu, a^#], D^v(a) or D_2(a)) to vanish once earlier slots are zero.
    auto is_forced = [&](const Shape& s) {
      if (theorem == Theorem::derived) return s.k == k;
      return s.n == n + (theorem == Theorem::massey_fixed ? 1 : 0);
    };
    bool cocycle = Dc.is_zero();
    for (const auto& [s, g] : Dc.terms())
      if (is_forced(s) && !g.is_zero()) {
        cert.failure = Obstruction{Obstruction::Kind::not_cocycle, {k, n}, as_sum(c),
                                   "the lowest component of D(" + slot_name(k, n) + ") is " + g.describe()};
        break;
      }
    if (cert.failure) break;

    std::vector<Shape> ps;
    if (theorem == Theorem::derived) {
      if (n - 1 >= 1) ps.push_back(morphism_shape(k, n - 1));
      if (k >= 1) ps.push_back(morphism_shape(k - 1, n));
    } else if (theorem == Theorem::classical) {
      ps = {morphism_shape(0, n), morphism_shape(0, n - 1)};
    } else {
      ps = {morphism_shape(0, n - 1), morphism_shape(0, n - 2)};
    }

    std::optional<CochainSum> p;
    bool strict = false;
    if (cocycle) {
      Solve sol = solve_over_shapes(H, ps, c, [&](const CochainSum& f) { return H.apply(f); });
      if (!sol.p) {
        auto kind = sol.rational ? Obstruction::Kind::integral_only : Obstruction::Kind::nonzero_class;
        cert.failure = Obstruction{kind, {k, n}, as_sum(c),
                                   sol.rational ? "a coboundary over the fraction field but not over " + m.ring().descriptor()
                                                : "D(b) = " + slot_name(k, n) + " has no solution"};
        break;
      }
      p = sol.p;
      strict = true;
    } else {
      cert.notes.push_back("D(" + slot_name(k, n) + ") = " + describe(Dc) +
                           " is nonzero; solved with lower slots fixed and higher slots free");
      auto relaxed = [&](const CochainSum& f) {
        CochainSum out(f.source(), f.target());
        CochainSum full = bracket(base, f);
        for (const auto& [s, g] : full.terms())
          if (level_of(theorem, s) <= lc) out.add(g);
        return out;
      };
      Solve sol = solve_over_shapes(H, ps, c, relaxed);
      if (!sol.p) {
        cert.failure = Obstruction{Obstruction::Kind::unresolved, {k, n}, as_sum(c),
                                   slot_name(k, n) + " is not a cocycle and cannot be removed by one step"};
        break;
      }
      p = sol.p;
    }

    for (const Shape& s : ps) {
      MultiCochain b = p->component(s);
      if (b.is_zero()) continue;
      PerturbCase kase = PerturbCase::classical;
      if (theorem == Theorem::derived) {
        bool high = s.k == k;
        // D(b_1) contains [mu, b_1^#]; case A subtracts [mu, b], so in the
        // strict solve it is fed b_1^#.
        if (strict && high) b = hash(b);
        if (high && bracket(base.component(structure_shape(1, 1)), b).is_zero())
          kase = PerturbCase::A;
        else if (!high && bracket(base.component(structure_shape(0, 2)), b).is_zero())
          kase = PerturbCase::B;
        else
          kase = PerturbCase::general;
      } else if (bracket(base, as_sum(b)).terms().size() > 1) {
        kase = PerturbCase::general;
      }
      PerturbationStep step = perturb(current, b, kase, opts);
      require_verified(step);
      current = step.after;
      cert.steps.push_back(std::move(step));
    }
    if (!current.term(k, n).is_zero())
      throw std::logic_error("trivialization left " + slot_name(k, n) + " nonzero");
  }
  cert.output = current.structure();
  return cert;
}

ReplayReport replay(const TrivializationCertificate& cert, const DeformationOptions& opts) {
  ReplayReport r;
  TwistingCochain current = TwistingCochain::split(cert.input, cert.theorem);
  for (size_t i = 0; i < cert.steps.size(); ++i) {
    const PerturbationStep& s = cert.steps[i];
    auto fail = [&](const std::string& why) {
      r.ok = false;
      r.failure = "step " + std::to_string(i + 1) + ": " + why;
      return r;
    };
    if (!same_structure(s.before.structure(), current.structure())) return fail("recorded input differs");
    PerturbationStep redo = perturb(current, s.b, s.kase, opts);
    if (!redo.verified()) return fail("checks do not pass");
    if (!same_structure(redo.after.structure(), s.after.structure())) return fail("recorded output differs");
    Window win;
    win.max_arity = structure_arity_window(redo.after.structure(), opts).max_arity;
    if (!check_da_infinity(redo.after.structure(), win).all_hold()) return fail("intermediate is not a structure");
    current = redo.after;
    ++r.verified_steps;
  }
  if (!same_structure(current.structure(), cert.output)) {
    r.ok = false;
    r.failure = "final structure differs";
  } else if (cert.trivial() && !current.is_zero()) {
    r.ok = false;
    r.failure = "certificate claims a trivial output but twisting terms remain";
  }
  return r;
}

}  // namespace dainf
