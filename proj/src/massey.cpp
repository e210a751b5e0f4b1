#include "dainf/massey.hpp"

#include <algorithm>

namespace dainf {

namespace {

std::string vec_text(const BigradedModule& A, const Vec& v) {
  std::string s;
  for (const auto& [i, c] : v) {
    if (c == 0) continue;
    std::string coef = c == 1 ? "" : c == -1 ? "-" : c.get_str();
    if (!s.empty() && c > 0) s += "+";
    s += coef + A.name(i);
  }
  return s.empty() ? "0" : s;
}

Vec from_dense(const std::vector<int>& slot, const DenseVec& x) {
  Vec v;
  for (size_t k = 0; k < slot.size(); ++k)
    if (x[k] != 0) v[slot[k]] = x[k];
  return v;
}

DenseVec to_dense(const std::vector<int>& slot, const Vec& v) {
  DenseVec x(slot.size(), Scalar(0));
  for (const auto& [i, c] : v) {
    auto it = std::find(slot.begin(), slot.end(), i);
    if (it == slot.end()) {
      if (c != 0) throw std::invalid_argument("element is not homogeneous of the expected degree");
      continue;
    }
    x[size_t(it - slot.begin())] = c;
  }
  return x;
}

Vec multiply_in(const StructureFamily& A, const Vec& a, const Vec& b) {
  MultiCochain mu = A.op(0, 2);
  const Ring& R = A.ring();
  Vec out;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b) add_scaled(out, mu.at({i, j}), R.mul(x, y), R);
  return out;
}

Vec differential(const StructureFamily& A, const Vec& a) {
  MultiCochain d = A.op(0, 1);
  const Ring& R = A.ring();
  Vec out;
  for (const auto& [i, x] : a) add_scaled(out, d.at({i}), x, R);
  return out;
}

// The block of d from degree v to degree v + 1, with the right shape even
// when either slot is empty.
Matrix d_block(const StructureFamily& A, int v) {
  const auto& src = A.module()->slot({0, v});
  const auto& dst = A.module()->slot({0, v + 1});
  Matrix M = arity_one_block(A.op(0, 1), {0, v});
  if (M.rows() != dst.size() || M.cols() != src.size()) return Matrix(A.ring(), dst.size(), src.size());
  return M;
}

Scalar inverse_mod(const Ring& R, const Scalar& s, const Scalar& order) {
  if (order == 0 || R.is_field()) return R.inverse(s);
  if (R.kind() == RingKind::p_local) return R.inverse(s);
  mpz_class inv, n = s.get_num(), q = order.get_num();
  mpz_invert(inv.get_mpz_t(), n.get_mpz_t(), q.get_mpz_t());
  return Scalar(inv);
}

bool scalable(const Ring& R, const Scalar& s, const Scalar& order) {
  if (s == 0) return false;
  if (order == 0 || R.is_field() || R.kind() == RingKind::p_local) return R.is_unit(s);
  mpz_class g = gcd(mpz_class(s.get_num()), mpz_class(order.get_num()));
  return g == 1;
}

}  // namespace

HomologyAlgebra homology_algebra(const StructureFamily& A) {
  const BigradedModule& M = *A.module();
  const Ring& R = A.ring();
  for (const auto& [ij, _] : A.ops())
    if (ij != Index2{0, 1} && ij != Index2{0, 2}) throw std::invalid_argument("homology_algebra needs a dga");
  if (M.max_horizontal() != 0) throw std::invalid_argument("homology_algebra needs a module in horizontal degree 0");

  std::vector<BasisElement> basis;
  std::vector<Vec> reps;
  std::vector<Scalar> orders, scale;
  std::map<int, HomologyPresentation> pres;
  std::optional<std::string> unit_name;
  for (int v = M.min_vertical(); v <= M.max_vertical(); ++v) {
    const auto& slot = M.slot({0, v});
    if (slot.empty()) continue;
    HomologyPresentation P = homology_at(d_block(A, v - 1), d_block(A, v));
    // If the unit generates a cyclic summand, use 1 itself as representative.
    std::optional<size_t> unit_gen;
    Scalar unit_coef;
    if (v == 0 && M.unit() && !P.is_zero()) {
      DenseVec c = P.class_coordinates(to_dense(slot, Vec{{*M.unit(), Scalar(1)}}));
      std::vector<size_t> nz;
      for (size_t k = 0; k < c.size(); ++k)
        if (c[k] != 0) nz.push_back(k);
      if (nz.size() == 1) {
        Scalar order = nz[0] < P.torsion.size() ? P.torsion[nz[0]] : Scalar(0);
        if (scalable(R, c[nz[0]], order)) {
          unit_gen = nz[0];
          unit_coef = c[nz[0]];
        }
      }
    }
    for (size_t k = 0; k < P.size(); ++k) {
      Scalar order = k < P.torsion.size() ? P.torsion[k] : Scalar(0);
      Vec rep = from_dense(slot, P.generators[k]);
      Scalar s(1);
      if (unit_gen && *unit_gen == k) {
        s = unit_coef;
        rep = Vec{{*M.unit(), Scalar(1)}};
      } else if (!rep.empty()) {
        Scalar lead = rep.begin()->second;
        Scalar u = R.is_field() ? R.inverse(lead) : R.normalizing_unit(lead);
        if (scalable(R, u, order) && R.is_unit(u)) {
          s = u;
          for (auto& [_, c] : rep) c = R.mul(c, u);
        }
      }
      std::string name = "[" + vec_text(M, rep) + "]";
      if (unit_gen && *unit_gen == k) unit_name = name;
      basis.push_back({name, {0, v}});
      reps.push_back(rep);
      orders.push_back(order);
      scale.push_back(s);
    }
    pres.emplace(v, std::move(P));
  }
  auto H = BigradedModule::make(R, basis, unit_name);
  HomologyAlgebra out{A, H, reps, orders, pres, scale, MultiCochain(H, structure_shape(0, 2))};
  for (size_t g = 0; g < reps.size(); ++g)
    for (size_t h = 0; h < reps.size(); ++h) {
      int v = H->degree(int(g)).v + H->degree(int(h)).v;
      Vec p = multiply_in(A, reps[g], reps[h]);
      if (p.empty() || M.slot({0, v}).empty()) continue;
      Vec c = out.classify(v, p);
      if (!c.empty()) out.product.set({int(g), int(h)}, c);
    }
  return out;
}

Vec HomologyAlgebra::classify(int v, const Vec& x) const {
  const BigradedModule& M = *dga.module();
  const Ring& R = M.ring();
  if (!differential(dga, x).empty()) throw std::invalid_argument("not a cocycle: " + vec_text(M, x));
  auto it = presentations.find(v);
  Vec out;
  if (it == presentations.end()) return out;
  DenseVec c = it->second.class_coordinates(to_dense(M.slot({0, v}), x));
  const auto& gens = module->slot({0, v});
  for (size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0) continue;
    int g = gens[k];
    Scalar val = R.mul(c[k], inverse_mod(R, scale[size_t(g)], orders[size_t(g)]));
    if (orders[size_t(g)] != 0) val = R.residue(val, orders[size_t(g)]);
    if (val != 0) out[g] = val;
  }
  return out;
}

Vec HomologyAlgebra::representative(const Vec& cls) const {
  Vec out;
  for (const auto& [g, c] : cls) add_scaled(out, representatives.at(size_t(g)), c, module->ring());
  return out;
}

Vec HomologyAlgebra::multiply(const Vec& a, const Vec& b) const {
  Vec p = multiply_in(dga, representative(a), representative(b));
  if (p.empty()) return {};
  int v = dga.module()->degree(p.begin()->first).v;
  return classify(v, p);
}

bool HomologyAlgebra::congruent(const Vec& a, const Vec& b, const std::vector<Vec>& gens) const {
  const Ring& R = module->ring();
  Vec diff = a;
  add_scaled(diff, b, Scalar(-1), R);
  std::vector<int> rows;
  auto note = [&](const Vec& v) {
    for (const auto& [g, _] : v)
      if (std::find(rows.begin(), rows.end(), g) == rows.end()) rows.push_back(g);
  };
  note(diff);
  for (const auto& g : gens) note(g);
  std::vector<Vec> cols = gens;
  for (int g : rows)
    if (orders[size_t(g)] != 0) cols.push_back(Vec{{g, orders[size_t(g)]}});
  Matrix Mx(R, rows.size(), cols.size());
  for (size_t c = 0; c < cols.size(); ++c)
    for (const auto& [g, val] : cols[c])
      Mx.set(size_t(std::find(rows.begin(), rows.end(), g) - rows.begin()), c, val);
  DenseVec rhs(rows.size(), Scalar(0));
  for (const auto& [g, val] : diff) rhs[size_t(std::find(rows.begin(), rows.end(), g) - rows.begin())] = val;
  return LinearSolver(Mx).solve(rhs).has_value();
}

HClass HomologyAlgebra::named(const std::string& name) const {
  int g = module->index(name);
  return {module->degree(g).v, Vec{{g, Scalar(1)}}};
}

HClass HomologyAlgebra::scaled(const HClass& c, const Scalar& s) const {
  HClass out{c.degree, {}};
  add_scaled(out.cls, c.cls, s, module->ring());
  for (auto it = out.cls.begin(); it != out.cls.end();) {
    const Scalar& o = orders[size_t(it->first)];
    if (o != 0) it->second = module->ring().residue(it->second, o);
    it = it->second == 0 ? out.cls.erase(it) : std::next(it);
  }
  return out;
}

std::string HomologyAlgebra::describe(const Vec& cls) const { return vec_text(*module, cls); }

bool MasseyProduct::contains(const HomologyAlgebra& H, const Vec& cls) const {
  return H.congruent(cls, element, indeterminacy);
}

bool MasseyProduct::same_coset(const HomologyAlgebra& H, const MasseyProduct& other) const {
  if (degree != other.degree) return false;
  if (!H.congruent(element, other.element, indeterminacy)) return false;
  for (const auto& g : other.indeterminacy)
    if (!H.congruent(g, {}, indeterminacy)) return false;
  for (const auto& g : indeterminacy)
    if (!H.congruent(g, {}, other.indeterminacy)) return false;
  return true;
}

MasseyProduct massey_triple(const HomologyAlgebra& H, const HClass& a1, const HClass& a2, const HClass& a3,
                            std::mt19937* rng) {
  const StructureFamily& A = H.dga;
  const BigradedModule& M = *A.module();
  const Ring& R = A.ring();
  auto sign = [](long e) { return Scalar(e % 2 == 0 ? 1 : -1); };
  auto random_scalar = [&]() {
    std::uniform_int_distribution<int> c(-3, 3);
    return R.from_int(c(*rng));
  };
  // A random element of degree v, pushed through d when `boundary`, or a
  // random cocycle of degree v otherwise.
  auto random_boundary = [&](int v) {
    Vec x;
    for (int i : M.slot({0, v - 1})) x[i] = random_scalar();
    return differential(A, x);
  };
  auto random_cocycle = [&](int v) {
    Vec z;
    Matrix D = d_block(A, v);
    for (const auto& k : LinearSolver(D).kernel_basis()) add_scaled(z, from_dense(M.slot({0, v}), k), random_scalar(), R);
    return z;
  };

  std::vector<Vec> r{H.representative(a1.cls), H.representative(a2.cls), H.representative(a3.cls)};
  int deg[3] = {a1.degree, a2.degree, a3.degree};
  if (rng)
    for (int i = 0; i < 3; ++i) add_scaled(r[size_t(i)], random_boundary(deg[i]), Scalar(1), R);

  auto primitive = [&](int i) {
    int v = deg[i] + deg[i + 1];
    Vec target;
    add_scaled(target, multiply_in(A, r[size_t(i)], r[size_t(i) + 1]), sign(1 + deg[i]), R);
    Vec u;
    if (!target.empty()) {
      const auto& dst = M.slot({0, v});
      Matrix D = d_block(A, v - 1);
      auto x = LinearSolver(D).solve(to_dense(dst, target));
      if (!x)
        throw MasseyUndefined("the product of classes " + std::to_string(i + 1) + " and " + std::to_string(i + 2) +
                              " is nonzero in homology");
      u = from_dense(M.slot({0, v - 1}), *x);
    }
    if (rng) add_scaled(u, random_cocycle(v - 1), Scalar(1), R);
    return u;
  };
  Vec u1 = primitive(0), u2 = primitive(1);
  int u1_deg = deg[0] + deg[1] - 1;

  MasseyProduct out;
  out.degree = deg[0] + deg[1] + deg[2] - 1;
  add_scaled(out.cocycle, multiply_in(A, r[0], u2), sign(1 + deg[0]), R);
  add_scaled(out.cocycle, multiply_in(A, u1, r[2]), sign(1 + u1_deg), R);
  out.element = H.classify(out.degree, out.cocycle);

  for (int g : H.module->slot({0, deg[1] + deg[2] - 1})) {
    Vec p = H.multiply(a1.cls, Vec{{g, Scalar(1)}});
    if (!p.empty()) out.indeterminacy.push_back(p);
  }
  for (int g : H.module->slot({0, deg[0] + deg[1] - 1})) {
    Vec p = H.multiply(Vec{{g, Scalar(1)}}, a3.cls);
    if (!p.empty()) out.indeterminacy.push_back(p);
  }
  return out;
}

MinimalModel transfer_minimal_model(const StructureFamily& A, std::optional<int> max_arity) {
  if (!A.ring().is_field()) throw std::invalid_argument("minimal model transfer needs field coefficients");
  HomologyAlgebra H = homology_algebra(A);
  StructureFamily B(H.module);
  if (!H.product.is_zero()) B.set(0, 2, H.product);
  MultiCochain f1(H.module, A.module(), morphism_shape(0, 1));
  for (size_t g = 0; g < H.representatives.size(); ++g)
    if (!H.representatives[g].empty()) f1.set({int(g)}, H.representatives[g]);
  ExtensionOptions opts;
  opts.max_arity = max_arity;
  ExtensionResult r = extend_structure(B, A, f1, opts);
  if (!r.feasible) throw std::logic_error("minimal model transfer found no solution at stage " +
                                          std::to_string(r.failed_stage.value_or(-1)));
  return MinimalModel{std::move(H), r.structure, r.morphism, r.max_arity, r.total};
}

bool induces_identity(const MinimalModel& M) {
  const MultiCochain* f1 = M.morphism.get(0, 1);
  for (int g = 0; g < int(M.homology.module->size()); ++g) {
    Vec img = f1 ? f1->at({g}) : Vec{};
    if (M.homology.classify(M.homology.module->degree(g).v, img) != Vec{{g, Scalar(1)}}) return false;
  }
  return true;
}

M3Membership m3_membership(const MinimalModel& M, const HClass& a1, const HClass& a2, const HClass& a3) {
  const HomologyAlgebra& H = M.homology;
  const Ring& R = H.module->ring();
  M3Membership out;
  out.product = massey_triple(H, a1, a2, a3);
  MultiCochain m3 = M.structure.op(0, 3);
  Scalar s((a1.degree + a2.degree + 1) % 2 == 0 ? 1 : -1);
  for (const auto& [g, x] : a1.cls)
    for (const auto& [h, y] : a2.cls)
      for (const auto& [k, z] : a3.cls) add_scaled(out.signed_m3, m3.at({g, h, k}), R.mul(s, R.mul(x, R.mul(y, z))), R);
  out.member = out.product.contains(H, out.signed_m3);
  Vec neg;
  add_scaled(neg, out.signed_m3, Scalar(-1), R);
  out.member_negated = out.product.contains(H, neg);
  return out;
}

}  // namespace dainf
