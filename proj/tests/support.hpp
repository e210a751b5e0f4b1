#pragma once

// Hand-rolled random generators shared by the property and acceptance tests.

#include <random>

#include "dainf/cochain.hpp"

namespace testsupport {

using namespace dainf;

inline ModulePtr random_module(std::mt19937& rng, const Ring& R, int size, int max_h = 2, int vrange = 3,
                               bool with_unit = true) {
  std::vector<BasisElement> basis;
  if (with_unit) basis.push_back({"1", {0, 0}});
  std::uniform_int_distribution<int> H(0, max_h), V(-vrange, vrange);
  for (int a = 0; a < size; ++a) basis.push_back({"b" + std::to_string(a), {H(rng), V(rng)}});
  return BigradedModule::make(R, basis, with_unit ? std::optional<std::string>("1") : std::nullopt);
}

inline Scalar random_scalar(std::mt19937& rng, const Ring& R) {
  std::uniform_int_distribution<int> c(-4, 4);
  if (R.kind() == RingKind::rationals && rng() % 4 == 0) return Scalar(c(rng), 1 + int(rng() % 3));
  return R.normalize(Scalar(c(rng)));
}

// A cochain of the given shape with random entries on every admissible
// (tuple, target) pair, each present with probability `density`.
inline MultiCochain random_cochain_of_shape(std::mt19937& rng, const ModulePtr& A, Shape s,
                                            double density = 0.5, bool normalized = false) {
  MultiCochain f(A, s);
  std::uniform_real_distribution<double> U(0, 1);
  for (const auto& x : tensor_tuples(*A, s.n, normalized)) {
    auto d = f.target_degree(x);
    if (!d) continue;
    Vec val;
    for (int y : A->slot(*d))
      if (U(rng) < density) val[y] = random_scalar(rng, A->ring());
    f.set(x, val);
  }
  return f;
}

// Picks a shape realised by at least one (tuple, target) pair, then fills it.
inline MultiCochain random_cochain(std::mt19937& rng, const ModulePtr& A, int max_arity,
                                   double density = 0.5) {
  std::uniform_int_distribution<int> N(1, max_arity);
  for (int attempt = 0; attempt < 100; ++attempt) {
    int n = N(rng);
    auto tuples = tensor_tuples(*A, n);
    const Tuple& x = tuples[rng() % tuples.size()];
    int y = int(rng() % A->size());
    Bidegree dx = tuple_degree(*A, x), dy = A->degree(y);
    if (dy.h > dx.h) continue;
    Shape s{n, dx.h - dy.h, dy.v - dx.v};
    MultiCochain f = random_cochain_of_shape(rng, A, s, density);
    if (!f.is_zero()) return f;
  }
  return MultiCochain(A, Shape{1, 0, 0});
}

}  // namespace testsupport
