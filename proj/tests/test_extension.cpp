#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dainf/deformation.hpp"
#include "dainf/examples.hpp"

#include <set>

using namespace dainf;

TEST_CASE("extending a bidga to itself along the identity") {
  for (const StructureFamily& C : {exterior_resolution_bidga(5), exterior_bidga(Ring::integers())}) {
    MultiCochain id = *MorphismFamily::identity(C.module()).get(0, 1);
    auto r = extend_structure(C, C, id);
    REQUIRE(r.feasible);
    CHECK(r.total);
    CHECK_FALSE(r.conditional);
    CHECK(r.structure.ops().size() == C.ops().size());
    CHECK(r.morphism.maps().size() == 1);
  }
}

TEST_CASE("the resolution of Z[e]/(e^2) extends") {
  for (long p : {3, 5}) {
    StructureFamily C = exterior_resolution_bidga(p, 1);
    StructureFamily A = truncated_polynomial_dga(p, 2);
    MultiCochain f(C.module(), A.module(), morphism_shape(0, 1));
    set_by_names(f, {"1"}, {{"1", Scalar(1)}});
    auto r = extend_structure(C, A, f);
    REQUIRE(r.feasible);
    CHECK(r.total);
    // f_11(a) = e up to the sign convention, since m_11(a) = p = d(e).
    const MultiCochain* f11 = r.morphism.get(1, 1);
    REQUIRE(f11);
    Scalar c = f11->at({C.module()->index("a")}).at(A.module()->index("e"));
    CHECK(abs(c) == 1);
    CHECK(r.structure.ops().size() == C.ops().size());
  }
}

namespace {

StructureFamily with_m22(const StructureFamily& C, long c) {
  StructureFamily t = C;
  MultiCochain g(C.module(), structure_shape(2, 2));
  set_by_names(g, {"a", "a"}, {{"b", Scalar(c)}});
  t.set(2, 2, g);
  return t;
}

}  // namespace

// C resolves H(Z[e]/(e^4), d e = p) = Lambda_{Z/p}([e^2]).  The only
// possible higher operation on C is m_22(a a) = c b.  The morphism
// equation at (2,2) on (a a) reads f_01(m_22(a a)) = f_11(a) f_11(a) + d f_22(a a)
// up to sign, so c = -1 mod p.  The structure equation at (2,3) on
// (a a a) is c (ab - ba) = 0 and holds for every c, so an extension exists.
TEST_CASE("the resolution of Z[e]/(e^4) extends with m_22(a a) = -b mod p") {
  for (long p : {3, 5, 7}) {
    INFO(p);
    StructureFamily C = exterior_resolution_bidga(p);
    StructureFamily A = truncated_polynomial_dga(p);
    MultiCochain f01 = resolution_map(C, A);
    auto r = extend_structure(C, A, f01);
    CHECK(r.total);
    REQUIRE(r.feasible);
    CHECK_FALSE(r.conditional);
    const MultiCochain* m22 = r.structure.get(2, 2);
    REQUIRE(m22);
    Scalar c = m22->at({C.module()->index("a"), C.module()->index("a")}).at(C.module()->index("b"));
    CHECK(mpz_class(c.get_num() + 1) % p == 0);
    CHECK(r.structure.ops().size() == C.ops().size() + 1);

    Window w;
    w.max_arity = 6;
    CHECK(check_da_infinity(r.structure, w).all_hold());
    CHECK(check_morphism(r.morphism, r.structure, A, w).all_hold());
    CHECK(is_e2_equivalence(f01, C, A).equivalence);
    for (long k : {-1L, 1L, 2L}) CHECK(structure_equation(with_m22(C, k), 2, 3).is_zero());

    // Pinning m_22(a a) = k b leaves a solution exactly when k = -1 mod p,
    // and the obstruction is the morphism equation at (2,2) alone.
    ExtensionOptions pinned;
    pinned.fixed = {{2, 2}};
    for (long k = 0; k < p; ++k) {
      auto rk = extend_structure(with_m22(C, k), A, f01, pinned);
      CHECK(rk.feasible == (k == p - 1));
      if (rk.feasible) continue;
      REQUIRE(rk.conflict.size() == 1);
      CHECK(rk.conflict[0].equation == "morphism");
      CHECK(rk.conflict[0].u == 2);
      CHECK(rk.conflict[0].v == 2);
      CHECK(rk.conflict[0].entry == "(a a) -> e2");
      REQUIRE(rk.congruences.size() == 1);
      CHECK(rk.congruences[0] == "morphism (2,2): " + std::to_string((k + 1) % p) + " = 0 mod " + std::to_string(p));
    }
  }
}

TEST_CASE("a map that does not preserve the unit has no extension") {
  StructureFamily C = exterior_resolution_bidga(5);
  StructureFamily A = truncated_polynomial_dga(5);
  MultiCochain f(C.module(), A.module(), morphism_shape(0, 1));
  set_by_names(f, {"1"}, {{"1", Scalar(2)}});
  auto r = extend_structure(C, A, f);
  REQUIRE_FALSE(r.feasible);
  REQUIRE(r.failed_stage);
  CHECK(*r.failed_stage == 2);
  REQUIRE(r.conflict.size() == 1);
  CHECK(r.conflict[0].equation == "morphism");
  CHECK(r.conflict[0].coefficients.empty());
}

TEST_CASE("extension needs a window when degrees do not bound arities") {
  auto A = BigradedModule::make(Ring::rationals(), {{"1", {0, 0}}, {"x", {0, 1}}}, "1");
  MultiCochain mu(A, structure_shape(0, 2));
  set_by_names(mu, {"1", "1"}, {{"1", 1}});
  set_by_names(mu, {"1", "x"}, {{"x", 1}});
  set_by_names(mu, {"x", "1"}, {{"x", 1}});
  StructureFamily m(A);
  m.set(0, 2, mu);
  MultiCochain id = *MorphismFamily::identity(A).get(0, 1);
  CHECK_THROWS_AS(extend_structure(m, m, id), WindowInsufficient);
  auto r = extend_structure(m, m, id, {4});
  CHECK(r.feasible);
  CHECK_FALSE(r.total);
}
