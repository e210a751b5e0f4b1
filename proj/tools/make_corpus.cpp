// Writes the corpus files from the example builders.  Usage: make_corpus DIR

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>

#include "dainf/deformation.hpp"
#include "dainf/examples.hpp"
#include "dainf/workbench.hpp"

using namespace dainf;

namespace {

MorphismFamily single(const MultiCochain& f) {
  MorphismFamily m(f.source(), f.target());
  m.set(f.hshift(), f.arity(), f);
  return m;
}

// A cochain b of shape f_{0,2} with [d, b] = 0 whose classical perturbation
// of the truncated exterior dga is nonzero: seeded combinations of a kernel
// basis of [d, -] on that shape.
MultiCochain round_trip_cochain(const StructureFamily& A) {
  const ModulePtr& M = A.module();
  const MultiCochain d = A.op(0, 1);
  HochschildComplex H(A, HHFlavor::classical, {true, 8});
  auto src = H.basis_for({morphism_shape(0, 2)});
  auto unit_cochain = [&](size_t c) {
    const auto& [t, x, y] = src.elements[c];
    MultiCochain e(M, t);
    e.set(x, Vec{{y, Scalar(1)}});
    return e;
  };
  std::vector<Shape> dst_shapes;
  for (size_t c = 0; c < src.elements.size(); ++c) {
    Shape s = bracket(d, unit_cochain(c)).shape();
    if (std::find(dst_shapes.begin(), dst_shapes.end(), s) == dst_shapes.end()) dst_shapes.push_back(s);
  }
  auto dst = H.basis_for(dst_shapes);
  Matrix D(A.ring(), dst.elements.size(), src.elements.size());
  for (size_t c = 0; c < src.elements.size(); ++c) {
    CochainSum img(M);
    img.add(bracket(d, unit_cochain(c)));
    DenseVec col = H.coordinates(dst, img);
    for (size_t r = 0; r < col.size(); ++r)
      if (col[r] != 0) D.set(r, c, col[r]);
  }
  auto kernel = LinearSolver(D).kernel_basis();
  auto a = TwistingCochain::split(A, Theorem::classical);
  std::mt19937 rng(5);
  for (int attempt = 0; attempt < 50; ++attempt) {
    MultiCochain b(M, morphism_shape(0, 2));
    for (const auto& k : kernel) {
      Scalar coef(long(rng() % 5) - 2);
      for (size_t c = 0; c < k.size(); ++c)
        if (k[c] != 0) b = b + unit_cochain(c).scaled(A.ring().mul(coef, k[c]));
    }
    if (b.is_zero()) continue;
    auto step = perturb(a, b, PerturbCase::classical);
    if (step.verified() && !step.after.is_zero()) return b;
  }
  throw std::runtime_error("no perturbation found");
}

void write(const std::string& dir, const std::string& name, const Presentation& p) {
  std::ofstream out(dir + "/" + name, std::ios::binary);
  out << emit_presentation(p);
  std::cout << "wrote " << name << "\n";
}

Presentation one(const std::string& name, const StructureFamily& m) {
  Presentation p;
  p.ring = m.ring();
  p.algebras.push_back({name, m});
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_corpus DIR\n";
    return 3;
  }
  std::string dir = argv[1];

  write(dir, "truncated_polynomial.dainf", one("A", truncated_polynomial_dga(5)));

  {
    StructureFamily C = exterior_resolution_bidga(5), A = truncated_polynomial_dga(5);
    Presentation p = one("C", C);
    p.algebras.push_back({"A", A});
    p.maps.push_back({"f", "C", "A", single(resolution_map(C, A))});
    p.meta.push_back({"claim", "morphism", "(2,2)", "forces", "m22(a", "a)", "=", "+-1", "mod", "p"});
    p.meta.push_back({"claim", "structure", "(2,3)", "forces", "m22(a", "a)", "=", "0", "mod", "p"});
    write(dir, "resolution_obstruction.dainf", p);
  }

  write(dir, "massey.dainf", one("A", massey_dga(Ring::prime_field(5))));
  for (int m : {2, 3, 4}) write(dir, "truncated_exterior_p3_m" + std::to_string(m) + ".dainf", one("A", truncated_exterior_dga(3, m)));

  {
    StructureFamily A = truncated_exterior_dga(3, 5);
    Presentation p = one("A", A);
    p.maps.push_back({"b", "A", "A", single(round_trip_cochain(A))});
    write(dir, "round_trip.dainf", p);
  }

  {
    StructureFamily L = exterior_bidga(Ring::integers());
    StructureFamily B = with_acyclic_pair(L, "s", "t");
    Presentation p = one("L", L);
    p.algebras.push_back({"B", B});
    p.maps.push_back({"i", "L", "B", single(inclusion_map(L, B))});
    write(dir, "e2_pair.dainf", p);
  }

  {
    auto M = BigradedModule::make(Ring::rationals(), {{"y", {0, 0}}, {"x", {1, -1}}});
    write(dir, "empty_operations.dainf", one("M", StructureFamily(M)));
  }
  return 0;
}
