#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace dainf;

namespace {

ModulePtr remark_bidga_module() {
  return BigradedModule::make(Ring::integers(),
                              {{"1", {0, 0}}, {"a", {1, 0}}, {"b", {0, -2}}, {"ab", {1, -2}}}, "1");
}

GradedMap random_map(std::mt19937& rng, const ModulePtr& A) {
  std::uniform_int_distribution<int> S(0, 1), T(-2, 2);
  GradedMap g(A, A, {S(rng), T(rng)});
  for (int x = 0; x < int(A->size()); ++x) {
    Bidegree d = A->degree(x);
    Bidegree want{d.h - g.bidegree().h, d.v + g.bidegree().v};
    if (want.h < 0) continue;
    Vec img;
    for (int y : A->slot(want)) img[y] = testsupport::random_scalar(rng, A->ring());
    g.set_image(x, img);
  }
  return g;
}

}  // namespace

TEST_CASE("tensor powers") {
  Ring Z = Ring::integers();
  auto A = BigradedModule::make(Z, {{"1", {0, 0}}, {"e", {0, -1}}}, "1");
  SUBCASE("n = 1 is A itself") {
    auto T = tensor_power(*A, 1);
    REQUIRE(T->size() == 2);
    CHECK(T->name(1) == "e");
    CHECK(T->degree(1) == Bidegree{0, -1});
  }
  SUBCASE("n = 2 has four tuples, (e,e) in (0,-2)") {
    auto T = tensor_power(*A, 2);
    CHECK(T->size() == 4);
    CHECK(T->degree(T->index("e|e")) == Bidegree{0, -2});
    CHECK(T->name(0) == "1|1");
    CHECK(T->name(1) == "1|e");
  }
  SUBCASE("n = 0 rejected") { CHECK_THROWS(tensor_power(*A, 0)); }
  SUBCASE("slot (1,-2) of C (x) C away from the unit") {
    auto C = remark_bidga_module();
    // Oracle: direct double loop.
    int expect = 0;
    for (int x = 0; x < int(C->size()); ++x)
      for (int y = 0; y < int(C->size()); ++y)
        if (x != 0 && y != 0 && C->degree(x) + C->degree(y) == Bidegree{1, -2}) ++expect;
    auto grouped = tensor_tuples_by_degree(*C, 2, true);
    CHECK(expect == 2);
    REQUIRE(grouped[Bidegree{1, -2}].size() == 2);
    CHECK(tuple_names(*C, grouped[Bidegree{1, -2}][0]) == "a b");
    CHECK(tuple_names(*C, grouped[Bidegree{1, -2}][1]) == "b a");
  }
  SUBCASE("tensor_power(m+n) pairs the bases of m and n") {
    auto C = remark_bidga_module();
    auto t3 = tensor_tuples(*C, 3);
    auto t1 = tensor_tuples(*C, 1), t2 = tensor_tuples(*C, 2);
    std::vector<Tuple> paired;
    for (const auto& a : t1)
      for (const auto& b : t2) {
        Tuple c = a;
        c.insert(c.end(), b.begin(), b.end());
        paired.push_back(c);
      }
    CHECK(paired == t3);
  }
}

TEST_CASE("module validation") {
  Ring Z = Ring::integers();
  CHECK_THROWS(BigradedModule::make(Z, {{"x", {-1, 0}}}));
  CHECK_THROWS(BigradedModule::make(Z, {{"x", {0, 0}}, {"x", {0, 1}}}));
  CHECK_THROWS(BigradedModule::make(Z, {{"u", {0, 1}}}, "u"));
}

TEST_CASE("shift") {
  auto A = BigradedModule::make(Ring::integers(), {{"1", {0, 0}}, {"e", {0, -1}}}, "1");
  auto SA = shift_module(*A);
  CHECK(SA->degree(SA->index("e")) == Bidegree{0, -2});
  auto back = unshift_module(*unshift_module(*shift_module(*SA)));
  for (int i = 0; i < int(A->size()); ++i) CHECK(back->degree(i) == A->degree(i));
  GradedMap S = GradedMap::suspension(A, SA);
  CHECK(S.bidegree() == Bidegree{0, -1});
  GradedMap Sinv = GradedMap::desuspension(SA, A);
  CHECK(Sinv.compose(S) == GradedMap::identity(A));
}

TEST_CASE("Koszul-signed tensor evaluation") {
  Ring Q = Ring::rationals();
  auto A = BigradedModule::make(Q, {{"x", {1, 0}}, {"y", {0, 0}}, {"z", {0, 1}}});
  SUBCASE("bidegree (0,0) maps carry no sign") {
    GradedMap id = GradedMap::identity(A);
    auto r = evaluate_tensor_map({&id, &id, &id}, Tuple{0, 2, 0});
    CHECK(r == TensorVec{{Tuple{0, 2, 0}, Scalar(1)}});
  }
  SUBCASE("a (1,0) map passing a (1,0) element") {
    GradedMap id = GradedMap::identity(A);
    GradedMap g(A, A, {1, 0});
    g.set_image(0, Vec{{1, Scalar(1)}});  // x -> y
    auto r = evaluate_tensor_map({&id, &g}, Tuple{0, 0});
    CHECK(r == TensorVec{{Tuple{0, 1}, Scalar(-1)}});
  }
  SUBCASE("triple products agree with pairwise evaluation") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      auto M = testsupport::random_module(rng, Q, 3, 1, 2, false);
      GradedMap f1 = random_map(rng, M), f2 = random_map(rng, M), f3 = random_map(rng, M);
      Tuple x{int(rng() % M->size()), int(rng() % M->size()), int(rng() % M->size())};
      auto direct = evaluate_tensor_map({&f1, &f2, &f3}, x);
      // ((f1 (x) f2) (x) f3)(X (x) x3) = (-1)^{|f3||X|} (f1 (x) f2)(X) (x) f3(x3)
      Bidegree X = M->degree(x[0]) + M->degree(x[1]);
      int s = sign_of(koszul_parity(f3.bidegree(), X));
      auto inner = evaluate_tensor_map({&f1, &f2}, Tuple{x[0], x[1]});
      TensorVec two_step;
      for (const auto& [t, c] : inner)
        for (const auto& [y, d] : f3.image(x[2])) {
          Tuple t2 = t;
          t2.push_back(y);
          two_step[t2] += c * d * s;
        }
      for (auto it = two_step.begin(); it != two_step.end();)
        it = it->second == 0 ? two_step.erase(it) : std::next(it);
      CHECK(direct == two_step);
      for (const auto& [t, c] : direct) CHECK(c != 0);
    }
  }
}

TEST_CASE("graded map composition adds bidegrees") {
  std::mt19937 rng(5);
  Ring F = Ring::prime_field(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto M = testsupport::random_module(rng, F, 4, 2, 2, false);
    GradedMap f = random_map(rng, M), g = random_map(rng, M);
    GradedMap fg = f.compose(g);
    CHECK(fg.bidegree() == f.bidegree() + g.bidegree());
    GradedMap zero(M, M, g.bidegree());
    CHECK(f.compose(zero).is_zero());
  }
}

TEST_CASE("arity bounds from degree support") {
  Ring Z = Ring::integers();
  // Non-unit basis in vertical degrees -3 and -4: sum(v-1) <= -4 n.
  auto A = BigradedModule::make(Z, {{"1", {0, 0}}, {"e", {0, -3}}, {"x", {0, -4}}, {"xe", {0, -7}}}, "1");
  auto b = arity_bound(*A, 2);
  REQUIRE(b);
  CHECK(*b == (2 + 7) / 4);
  // Positive degrees: sum(v - 1 - h) >= n.
  auto P = BigradedModule::make(Z, {{"1", {0, 0}}, {"x", {0, 2}}, {"y", {0, 3}}, {"xy", {0, 5}}}, "1");
  auto bp = arity_bound(*P, 2);
  REQUIRE(bp);
  CHECK(*bp == 3);
  // Mixed signs give no bound.
  auto M = BigradedModule::make(Z, {{"1", {0, 0}}, {"a", {0, 2}}, {"b", {0, -1}}}, "1");
  CHECK_FALSE(arity_bound(*M, 2).has_value());
}
