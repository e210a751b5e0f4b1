// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance [--corpus DIR] [--only N,...] [--expect-fail N,...]
//
// Every check is exact.  A criterion with a runtime cap fails when it runs
// over.  Criteria listed in --expect-fail are known conflicts between the
// worked examples and what the implementation computes; they are still run
// and printed, and the exit status is nonzero if one of them unexpectedly
// passes or if any other criterion fails.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "dainf/deformation.hpp"
#include "dainf/examples.hpp"
#include "dainf/hochschild.hpp"
#include "dainf/massey.hpp"
#include "dainf/workbench.hpp"
#include "properties.hpp"

using namespace dainf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::optional<double> cap_seconds;
  std::function<Outcome()> run;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Presentation> load_corpus(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".dainf") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Presentation> out;
  for (const auto& f : files) out.push_back(parse_presentation(slurp(f)));
  return out;
}

std::string invariants(const HomologyPresentation& H) {
  std::string s = std::to_string(H.free_rank);
  for (const auto& t : H.torsion) s += " " + t.get_str();
  return s;
}

CochainSum as_sum(const MultiCochain& f) {
  CochainSum s(f.source(), f.target());
  s.add(f);
  return s;
}

// ------------------------------------------------------------------ criteria

Outcome sign_calculus() {
  int pairs = 0, triples = 0;
  for (Ring R : {Ring::prime_field(5), Ring::rationals()}) {
    auto t = testsupport::run_sign_properties(R, 2024, 150, 60, 4);
    if (!t.ok()) return {false, R.descriptor() + ": " + t.first_failure};
    pairs += t.pairs;
    triples += t.triples;
  }
  return {pairs + triples >= 400, std::to_string(pairs) + " pairs, " + std::to_string(triples) + " triples"};
}

Outcome sign_lemma() {
  int cases = 0, mismatches = 0;
  for (int n = 1; n <= 4; ++n)
    for (int m = 1; m <= 4; ++m)
      for (int v = 0; v < n; ++v)
        for (int i = -3; i <= 3; ++i)
          for (int j = -3; j <= 3; ++j)
            for (int k = 0; k <= 3; ++k)
              for (int l = 0; l <= 3; ++l) {
                ++cases;
                // (n-1)(m-1) + v(m-1) + j(n-1), written out here rather than
                // taken from the library.
                long closed = long(n - 1) * (m - 1) + long(v) * (m - 1) + long(j) * (n - 1);
                int expected = int(((closed % 2) + 2) % 2);
                if (brute_force_sign(n, m, v, i, j, k, l) != expected) ++mismatches;
                if (int(((composition_sign_exponent(Shape{n, k, i}, Shape{m, l, j}, v) % 2) + 2) % 2) != expected)
                  ++mismatches;
              }
  return {mismatches == 0, std::to_string(cases) + " cases, " + std::to_string(mismatches) + " mismatches"};
}

Outcome three_conditions(const std::vector<Presentation>& corpus) {
  std::vector<StructureFamily> structures;
  for (const auto& p : corpus)
    for (const auto& a : p.algebras) structures.push_back(a.structure);
  Window w;
  w.max_arity = 4;
  int checked = 0;
  for (const auto& m : structures) {
    auto r = check_da_infinity(m, w);
    if (!r.routes_agree()) return {false, "corpus structure disagrees"};
    ++checked;
  }
  std::mt19937 rng(31);
  int perturbed = 0;
  for (int trial = 0; trial < 50; ++trial) {
    StructureFamily m = structures[size_t(trial) % structures.size()];
    int i = int(rng() % 3), j = 1 + int(rng() % 3);
    MultiCochain extra = testsupport::random_cochain_of_shape(rng, m.module(), structure_shape(i, j), 0.5);
    m.set(i, j, m.op(i, j) + extra);
    auto r = check_da_infinity(m, w);
    if (!r.routes_agree()) return {false, "perturbed family " + std::to_string(trial) + " disagrees"};
    ++perturbed;
  }
  return {true, std::to_string(checked) + " corpus structures, " + std::to_string(perturbed) + " perturbed families"};
}

// Random cochains reach arity 3, or arity 2 on the nine-generator deformed
// structures where D of an arity-3 cochain is expensive.  Structures that
// occur in several files are checked once.
Outcome d_squared(const std::vector<Presentation>& corpus) {
  std::mt19937 rng(47);
  std::set<std::string> seen;
  int structures = 0, cochains = 0;
  for (const auto& p : corpus)
    for (const auto& a : p.algebras) {
      if (!is_orthogonal(a.structure).orthogonal()) continue;
      Presentation alone;
      alone.ring = p.ring;
      alone.algebras.push_back({"X", a.structure});
      if (!seen.insert(emit_presentation(alone)).second) continue;
      ++structures;
      int arity = a.structure.module()->size() > 7 ? 2 : 3;
      for (int trial = 0; trial < 100; ++trial) {
        MultiCochain f = testsupport::random_cochain(rng, a.structure.module(), arity, 0.4);
        CochainSum Df = derived_differential(a.structure, as_sum(f));
        if (!derived_differential(a.structure, Df).is_zero()) return {false, a.name + ": " + f.describe()};
        ++cochains;
      }
    }
  return {structures > 0, std::to_string(structures) + " distinct orthogonal structures, " +
                              std::to_string(cochains) + " cochains"};
}

Outcome truncated_exterior_hh() {
  StructureFamily A = truncated_exterior_dga(3, 2);
  HochschildComplex C(A, HHFlavor::graded_algebra);
  std::string detail;
  bool vanishing = true;
  for (int n = 3; n <= 6; ++n)
    if (!C.cohomology({n, 2 - n}).homology.is_zero()) vanishing = false;
  detail += std::string("HH^{n,2-n} = 0 for n = 3..6: ") + (vanishing ? "yes" : "no");
  const auto& M = *A.module();
  int e = M.degree(M.index("e")).v, x = M.degree(M.index("x")).v, m = 2;
  bool generators = true;
  for (auto [n, i] : std::vector<std::pair<int, int>>{{1, -e}, {1, -x}, {2, -m * x}}) {
    auto g = C.cohomology({n, i});
    detail += "; (" + std::to_string(n) + "," + std::to_string(i) + ") " + invariants(g.homology);
    if (g.homology.is_zero()) generators = false;
  }
  return {vanishing && generators, detail};
}

Outcome resolution_obstruction(const std::vector<Presentation>& corpus) {
  const Presentation* p = nullptr;
  for (const auto& c : corpus)
    if (c.find_map("f") && c.find_algebra("C")) p = &c;
  if (!p) return {false, "resolution example missing from the corpus"};
  const NamedMap& f = p->map("f");
  const MultiCochain* f01 = f.family.get(0, 1);
  auto r = extend_structure(p->algebra("C").structure, p->algebra("A").structure, *f01);
  std::string detail = r.feasible ? "extension found" : "infeasible";
  for (const auto& c : r.congruences) detail += "; " + c;
  if (r.feasible) {
    const StructureFamily& C = r.structure;
    const auto& M = *C.module();
    if (const MultiCochain* m22 = C.get(2, 2)) {
      Scalar c = m22->at({M.index("a"), M.index("a")}).at(M.index("b"));
      detail += ", m22(a a) = " + c.get_str() + "*b";
    }
  }
  for (const auto& m : p->meta)
    if (!m.empty() && m[0] == "claim") {
      std::string s;
      for (size_t i = 1; i < m.size(); ++i) s += (i > 1 ? " " : "") + m[i];
      detail += "; claimed: " + s;
    }
  return {!r.feasible && !r.congruences.empty(), detail};
}

Outcome massey_products() {
  HomologyAlgebra H = homology_algebra(massey_dga(Ring::prime_field(5)));
  HClass x = H.named("[x]");
  auto m = massey_triple(H, x, x, x);
  bool first = m.element == H.scaled(H.named("[xy]"), 2).cls && m.indeterminacy.empty();

  HomologyAlgebra Z = homology_algebra(truncated_exterior_dga(3, 3));
  HClass e = Z.named("[e]"), p = Z.scaled(Z.named("[1]"), 3);
  auto mz = massey_triple(Z, e, p, e);
  bool second = mz.contains(Z, Z.named("[xe]").cls);

  std::mt19937 rng(20);
  int same = 0;
  for (int trial = 0; trial < 20; ++trial) {
    if (massey_triple(H, x, x, x, &rng).same_coset(H, m) && massey_triple(Z, e, p, e, &rng).same_coset(Z, mz))
      ++same;
  }
  std::string detail = "<[x],[x],[x]> = " + H.describe(m.element) + (m.indeterminacy.empty() ? ", no" : ", some") +
                       " indeterminacy; <[e],3,[e]> = " + Z.describe(mz.element) + "; " + std::to_string(same) +
                       "/20 choices agree";
  return {first && second && same == 20, detail};
}

Outcome transfer_m3() {
  StructureFamily A = massey_dga(Ring::prime_field(5));
  MinimalModel M = transfer_minimal_model(A, 6);
  Window w;
  w.max_arity = 6;
  bool relations = check_da_infinity(M.structure, w).all_hold() &&
                   check_morphism(M.morphism, M.structure, M.homology.dga, w).all_hold();
  bool qiso = induces_identity(M);
  const HomologyAlgebra& H = M.homology;
  HClass x = H.named("[x]");
  auto mem = m3_membership(M, x, x, x);
  // The computed value carries the lemma's sign: -2[xy], the negative of the
  // product's single element.
  bool value = mem.signed_m3 == H.scaled(H.named("[xy]"), -2).cls && mem.member_negated;
  std::string detail = std::string("relations to arity 6: ") + (relations ? "hold" : "fail") +
                       "; f1 quasi-isomorphism: " + (qiso ? "yes" : "no") + "; signed m3(x,x,x) = " +
                       H.describe(mem.signed_m3) + " (-2[xy] mod 5), the negative of the product's element";
  return {relations && qiso && value, detail};
}

Outcome round_trip(const std::vector<Presentation>& corpus) {
  const Presentation* p = nullptr;
  for (const auto& c : corpus)
    if (c.find_map("b") && c.find_algebra("A") && c.algebras.size() == 1) p = &c;
  if (!p) return {false, "round-trip example missing from the corpus"};
  const StructureFamily& A = p->algebra("A").structure;
  const MultiCochain* b = p->map("b").family.get(0, 2);
  auto a = TwistingCochain::split(A, Theorem::classical);
  auto step = perturb(a, *b, PerturbCase::classical);
  if (!step.verified()) return {false, "perturbation not verified"};
  if (step.after.is_zero()) return {false, "perturbation is trivial"};
  auto cert = trivialize(step.after.structure(), Theorem::classical);
  if (!cert.trivial()) return {false, "trivialization failed"};
  auto rep = replay(cert);
  bool base = same_structure(cert.output, A);
  std::string detail = std::to_string(cert.steps.size()) + " steps, output is d + mu: " + (base ? "yes" : "no") +
                       ", replay: " + (rep.ok ? "ok" : rep.failure);
  return {base && rep.ok && rep.verified_steps == cert.steps.size(), detail};
}

Outcome e2_invariance(const std::vector<Presentation>& corpus) {
  const Presentation* p = nullptr;
  for (const auto& c : corpus)
    if (c.find_map("i")) p = &c;
  if (!p) return {false, "E2 pair missing from the corpus"};
  const NamedMap& i = p->map("i");
  const StructureFamily &A = p->algebra(i.source).structure, &B = p->algebra(i.target).structure;
  const MultiCochain& f = *i.family.get(0, 1);
  if (A.op(0, 1).is_zero() == false || B.op(0, 1).is_zero() == false) return {false, "m01 is not zero"};
  if (!is_e2_equivalence(f, A, B).equivalence) return {false, "not an E2-equivalence"};
  HochschildComplex HA(A, HHFlavor::bidga), HB(B, HHFlavor::bidga);
  int cells = 0;
  for (int s = 0; s <= 3; ++s)
    for (int r = -8; r <= 2; ++r) {
      auto a = invariants(HA.cohomology({s, r}).homology), bb = invariants(HB.cohomology({s, r}).homology);
      if (a != bb) return {false, "cell (" + std::to_string(s) + "," + std::to_string(r) + "): " + a + " vs " + bb};
      ++cells;
    }
  return {true, std::to_string(cells) + " cells agree for s in 0..3, r in -8..2"};
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string corpus_dir = std::string(DAINF_SOURCE_DIR) + "/corpus", only, expect_fail;
  app.add_option("--corpus", corpus_dir, "corpus directory");
  app.add_option("--only", only, "comma-separated criteria to run");
  app.add_option("--expect-fail", expect_fail, "comma-separated criteria known to fail");
  CLI11_PARSE(app, argc, argv);
  std::set<int> selected = parse_list(only), expected = parse_list(expect_fail);

  std::vector<Presentation> corpus;
  try {
    corpus = load_corpus(corpus_dir);
  } catch (const std::exception& e) {
    std::cerr << "cannot load corpus: " << e.what() << "\n";
    return 3;
  }

  std::vector<Criterion> criteria{
      {1, "sign calculus on random cochains over F5 and Q", 120, sign_calculus},
      {2, "closed-form insertion sign, exhaustive", 60, sign_lemma},
      {3, "three formulations of the structure equations agree", {}, [&] { return three_conditions(corpus); }},
      {4, "D o D = 0 over orthogonal corpus structures", {}, [&] { return d_squared(corpus); }},
      {5, "graded algebra HH of the truncated exterior example (p=3, m=2)", 300, truncated_exterior_hh},
      {6, "obstruction for the resolution of Z[e]/(e^4), p=5", 120, [&] { return resolution_obstruction(corpus); }},
      {7, "Massey triple products", {}, massey_products},
      {8, "transferred minimal model and m3", {}, transfer_m3},
      {9, "perturb, trivialize and replay round trip", 180, [&] { return round_trip(corpus); }},
      {10, "E2-invariance of bigraded HH", {}, [&] { return e2_invariance(corpus); }},
  };

  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.cap_seconds && secs > *c.cap_seconds) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(int(*c.cap_seconds)) + " s cap";
    }
    bool known = expected.count(c.id) > 0;
    std::string tag = o.pass ? (known ? "PASS (expected FAIL)" : "PASS") : (known ? "FAIL (expected)" : "FAIL");
    if (o.pass == known) ++unexpected;
    std::ostringstream t;
    t.setf(std::ios::fixed);
    t.precision(1);
    t << secs;
    std::cout << tag << "  #" << c.id << " " << c.name << " [" << t.str() << " s]: " << o.detail << std::endl;
  }
  return unexpected == 0 ? 0 : 1;
}
