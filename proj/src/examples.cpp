#include "dainf/examples.hpp"

#include <stdexcept>

namespace dainf {

void set_by_names(MultiCochain& f, const std::vector<std::string>& in, const Output& out) {
  Tuple x;
  for (const auto& s : in) x.push_back(f.source()->index(s));
  Vec v;
  for (const auto& [name, c] : out) add_scaled(v, Vec{{f.target()->index(name), Scalar(1)}}, c, f.ring());
  f.set(x, v);
}

namespace {

std::string power_name(const std::string& var, int k) {
  if (k == 0) return "";
  return k == 1 ? var : var + std::to_string(k);
}

std::string monomial(const std::vector<std::pair<std::string, int>>& factors) {
  std::string s;
  for (const auto& [var, k] : factors) s += power_name(var, k);
  return s.empty() ? "1" : s;
}

}  // namespace

StructureFamily truncated_polynomial_dga(long p, int top) {
  Ring R = Ring::integers();
  std::vector<BasisElement> basis;
  for (int k = 0; k < top; ++k) basis.push_back({monomial({{"e", k}}), {0, -k}});
  auto A = BigradedModule::make(R, basis, "1");
  MultiCochain d(A, structure_shape(0, 1)), mu(A, structure_shape(0, 2));
  for (int k = 1; k < top; k += 2) set_by_names(d, {monomial({{"e", k}})}, {{monomial({{"e", k - 1}}), Scalar(p)}});
  for (int a = 0; a < top; ++a)
    for (int b = 0; a + b < top; ++b)
      set_by_names(mu, {monomial({{"e", a}}), monomial({{"e", b}})}, {{monomial({{"e", a + b}}), Scalar(1)}});
  StructureFamily m(A);
  m.set(0, 1, d);
  m.set(0, 2, mu);
  return m;
}

StructureFamily exterior_resolution_bidga(long p, int top, int v) {
  std::vector<BasisElement> basis;
  for (int j = 0; j < top; ++j)
    for (int eps = 0; eps < 2; ++eps) basis.push_back({monomial({{"a", eps}, {"b", j}}), {eps, -v * j}});
  auto C = BigradedModule::make(Ring::integers(), basis, "1");
  MultiCochain h(C, structure_shape(1, 1)), mu(C, structure_shape(0, 2));
  auto name = [](int eps, int j) { return monomial({{"a", eps}, {"b", j}}); };
  for (int j = 0; j < top; ++j) {
    set_by_names(h, {name(1, j)}, {{name(0, j), Scalar(p)}});
    for (int e1 = 0; e1 < 2; ++e1)
      for (int l = 0; j + l < top; ++l)
        for (int e2 = 0; e1 + e2 < 2; ++e2) set_by_names(mu, {name(e1, j), name(e2, l)}, {{name(e1 + e2, j + l), Scalar(1)}});
  }
  StructureFamily m(C);
  m.set(1, 1, h);
  m.set(0, 2, mu);
  return m;
}

MultiCochain resolution_map(const StructureFamily& C, const StructureFamily& A) {
  MultiCochain f(C.module(), A.module(), morphism_shape(0, 1));
  set_by_names(f, {"1"}, {{"1", Scalar(1)}});
  set_by_names(f, {"b"}, {{"e2", Scalar(1)}});
  return f;
}

StructureFamily massey_dga(const Ring& R) {
  // Normal form x^i y^j; y x^c = (-1)^c x^c y.
  std::vector<BasisElement> basis;
  std::vector<std::pair<int, int>> mono;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 3; ++i) {
      basis.push_back({monomial({{"x", i}, {"y", j}}), {0, 2 * i + 3 * j}});
      mono.push_back({i, j});
    }
  auto A = BigradedModule::make(R, basis, "1");
  MultiCochain d(A, structure_shape(0, 1)), mu(A, structure_shape(0, 2));
  for (size_t s = 0; s < mono.size(); ++s) {
    auto [i, j] = mono[s];
    if (j == 1 && i + 2 < 3) d.set({int(s)}, {{A->index(monomial({{"x", i + 2}})), Scalar(1)}});
    for (size_t t = 0; t < mono.size(); ++t) {
      auto [c, e] = mono[t];
      if (i + c >= 3 || j + e >= 2) continue;
      Scalar sign((j * c) % 2 ? -1 : 1);
      mu.set({int(s), int(t)}, {{A->index(monomial({{"x", i + c}, {"y", j + e}})), sign}});
    }
  }
  StructureFamily m(A);
  m.set(0, 1, d);
  m.set(0, 2, mu);
  return m;
}

StructureFamily truncated_exterior_dga(long p, int m) {
  if (m < 2) throw std::invalid_argument("truncated_exterior_dga needs m >= 2");
  Ring R = Ring::p_local(p);
  int de = -(2 * int(p) - 3), dx = -(2 * int(p) - 2);
  std::vector<BasisElement> basis;
  std::vector<std::pair<int, int>> mono;
  for (int eps = 0; eps < 2; ++eps)
    for (int i = 0; i < (eps ? m - 1 : m); ++i) {
      basis.push_back({monomial({{"x", i}, {"e", eps}}), {0, i * dx + eps * de}});
      mono.push_back({i, eps});
    }
  auto A = BigradedModule::make(R, basis, "1");
  MultiCochain d(A, structure_shape(0, 1)), mu(A, structure_shape(0, 2));
  auto name = [](int i, int eps) { return monomial({{"x", i}, {"e", eps}}); };
  for (size_t s = 0; s < mono.size(); ++s) {
    auto [i, eps] = mono[s];
    if (eps == 0 && i >= 1 && i - 1 < m - 1) set_by_names(d, {name(i, 0)}, {{name(i - 1, 1), Scalar(long(i) * p)}});
    for (size_t t = 0; t < mono.size(); ++t) {
      auto [c, f] = mono[t];
      int k = i + c, ee = eps + f;
      if (ee >= 2 || k >= (ee ? m - 1 : m)) continue;
      set_by_names(mu, {name(i, eps), name(c, f)}, {{name(k, ee), Scalar(1)}});
    }
  }
  StructureFamily fam(A);
  fam.set(0, 1, d);
  fam.set(0, 2, mu);
  return fam;
}

StructureFamily ground_ring_bidga(const Ring& R) {
  auto A = BigradedModule::make(R, {{"1", {0, 0}}}, "1");
  MultiCochain mu(A, structure_shape(0, 2));
  mu.set({0, 0}, {{0, Scalar(1)}});
  StructureFamily m(A);
  m.set(0, 2, mu);
  return m;
}

StructureFamily exterior_bidga(const Ring& R) {
  auto A = BigradedModule::make(R, {{"1", {0, 0}}, {"b", {0, -2}}}, "1");
  MultiCochain mu(A, structure_shape(0, 2));
  set_by_names(mu, {"1", "1"}, {{"1", Scalar(1)}});
  set_by_names(mu, {"1", "b"}, {{"b", Scalar(1)}});
  set_by_names(mu, {"b", "1"}, {{"b", Scalar(1)}});
  StructureFamily m(A);
  m.set(0, 2, mu);
  return m;
}

StructureFamily with_acyclic_pair(const StructureFamily& B, const std::string& a, const std::string& c) {
  if (B.get(1, 1)) throw std::invalid_argument("with_acyclic_pair needs m_11 = 0");
  const BigradedModule& M = *B.module();
  std::vector<BasisElement> basis = M.basis();
  basis.push_back({a, {1, -2}});
  basis.push_back({c, {0, -2}});
  std::optional<std::string> unit;
  if (M.unit()) unit = M.name(*M.unit());
  auto A = BigradedModule::make(M.ring(), basis, unit);
  StructureFamily out(A);
  for (const auto& [ij, f] : B.ops()) {
    MultiCochain g(A, f.shape());
    for (const auto& [x, v] : f.entries()) g.set(x, v);
    out.set(ij.first, ij.second, g);
  }
  MultiCochain h = out.op(1, 1);
  set_by_names(h, {a}, {{c, Scalar(1)}});
  out.set(1, 1, h);
  if (unit) {
    MultiCochain mu = out.op(0, 2);
    for (const auto& x : {a, c}) {
      set_by_names(mu, {*unit, x}, {{x, Scalar(1)}});
      set_by_names(mu, {x, *unit}, {{x, Scalar(1)}});
    }
    out.set(0, 2, mu);
  }
  return out;
}

MultiCochain inclusion_map(const StructureFamily& B, const StructureFamily& target) {
  MultiCochain f(B.module(), target.module(), morphism_shape(0, 1));
  for (int x = 0; x < int(B.module()->size()); ++x)
    f.set({x}, {{target.module()->index(B.module()->name(x)), Scalar(1)}});
  return f;
}

}  // namespace dainf
