#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dainf/examples.hpp"
#include "dainf/workbench.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dainf;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path root() { return DAINF_SOURCE_DIR; }

// Report paths in the manifest are relative to the repository root.
struct InRoot {
  std::filesystem::path old = std::filesystem::current_path();
  InRoot() { std::filesystem::current_path(root()); }
  ~InRoot() { std::filesystem::current_path(old); }
};

struct Run {
  int status;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int s = run_command(args, out, err);
  return {s, out.str(), err.str()};
}

std::vector<std::string> words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> w;
  for (std::string s; in >> s;) w.push_back(s);
  return w;
}

MorphismFamily single(const MultiCochain& f) {
  MorphismFamily m(f.source(), f.target());
  m.set(f.hshift(), f.arity(), f);
  return m;
}

Presentation one(const std::string& name, const StructureFamily& m) {
  Presentation p;
  p.ring = m.ring();
  p.algebras.push_back({name, m});
  return p;
}

std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(root() / "corpus"))
    if (e.path().extension() == ".dainf") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

const char* kHeader = "dainf-presentation 1\n";

int error_line(const std::string& text, int* column = nullptr) {
  try {
    parse_presentation(text);
  } catch (const ParseError& e) {
    if (column) *column = e.column();
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("every corpus file re-emits byte for byte") {
  auto files = corpus_files();
  CHECK(files.size() >= 10);
  for (const auto& f : files) {
    INFO(f.filename().string());
    std::string text = slurp(f);
    Presentation p = parse_presentation(text);
    CHECK(emit_presentation(p) == text);
    CHECK(same_presentation(parse_presentation(emit_presentation(p)), p));
  }
}

TEST_CASE("corpus files match the example builders") {
  auto check = [](const std::string& file, const Presentation& p) {
    INFO(file);
    CHECK(slurp(root() / "corpus" / file) == emit_presentation(p));
  };
  check("truncated_polynomial.dainf", one("A", truncated_polynomial_dga(5)));
  check("massey.dainf", one("A", massey_dga(Ring::prime_field(5))));
  for (int m : {2, 3, 4})
    check("truncated_exterior_p3_m" + std::to_string(m) + ".dainf", one("A", truncated_exterior_dga(3, m)));

  StructureFamily C = exterior_resolution_bidga(5), A = truncated_polynomial_dga(5);
  Presentation res = one("C", C);
  res.algebras.push_back({"A", A});
  res.maps.push_back({"f", "C", "A", single(resolution_map(C, A))});
  res.meta.push_back(words("claim morphism (2,2) forces m22(a a) = +-1 mod p"));
  res.meta.push_back(words("claim structure (2,3) forces m22(a a) = 0 mod p"));
  check("resolution_obstruction.dainf", res);

  StructureFamily L = exterior_bidga(Ring::integers());
  StructureFamily B = with_acyclic_pair(L, "s", "t");
  Presentation e2 = one("L", L);
  e2.algebras.push_back({"B", B});
  e2.maps.push_back({"i", "L", "B", single(inclusion_map(L, B))});
  check("e2_pair.dainf", e2);
}

TEST_CASE("parsed structures agree with the builders") {
  Presentation p = parse_presentation(slurp(root() / "corpus/massey.dainf"));
  CHECK(p.ring == Ring::prime_field(5));
  StructureFamily built = massey_dga(Ring::prime_field(5));
  const StructureFamily& read = p.algebra("A").structure;
  CHECK(read.ops().size() == built.ops().size());
  for (const auto& [key, op] : built.ops()) CHECK(read.op(key.first, key.second) == op);
  CHECK_THROWS_AS(p.algebra("Z"), std::invalid_argument);
  CHECK(p.find_map("b") == nullptr);

  Presentation r = parse_presentation(slurp(root() / "corpus/round_trip.dainf"));
  const NamedMap& b = r.map("b");
  CHECK(b.source == "A");
  CHECK(b.target == "A");
  CHECK_FALSE(b.family.maps().empty());
}

TEST_CASE("an empty operation list is a valid module with zero structure") {
  std::string text = std::string(kHeader) + "ring q\n\nalgebra M\n  basis y 0 0\n  basis x 1 -1\nend\n";
  Presentation p = parse_presentation(text);
  const StructureFamily& M = p.algebra("M").structure;
  CHECK(M.ops().empty());
  CHECK(M.module()->size() == 2);
  CHECK(check_da_infinity(M, Window{}).all_hold());
  CHECK(emit_presentation(p) == text);

  InRoot here;
  Run v = run({"validate", "corpus/empty_operations.dainf"});
  CHECK(v.status == 0);
}

TEST_CASE("parse errors carry line and column") {
  int col = 0;
  CHECK(error_line(std::string(kHeader) + "ring q\nalgebra A\n  basis x 0 zero\nend\n", &col) == 4);
  CHECK(col == 13);
  // Output bidegree disagreeing with a term.
  CHECK(error_line(std::string(kHeader) +
                       "ring zp:5\nalgebra A\n  basis x 0 0\n  basis y 1 0\n  m 0 2 : x x -> 0 0 : 1*y\nend\n",
                   &col) == 6);
  CHECK(col == 24);
  CHECK(error_line(std::string(kHeader) + "ring q\nalgebra A\n  basis x 0 0\n  basis x 1 0\nend\n") == 5);
  CHECK(error_line(std::string(kHeader) + "ring q\nalgebra A\n  basis x 0 0\n") == 3);
  CHECK(error_line("") == 1);
  CHECK(error_line(std::string(kHeader) + "algebra A\nend\n") != 0);
  CHECK(error_line(std::string(kHeader) + "ring q\nwidget\n") == 3);
  CHECK(error_line(std::string(kHeader) + "ring q\nalgebra A\n  basis x 0 0\n  m 0 2 : x w -> 0 0 : 1*x\nend\n") == 5);
  CHECK(error_line(std::string(kHeader) + "ring q\nmap f A A\nend\n") != 0);

  InRoot here;
  std::filesystem::path bad = std::filesystem::temp_directory_path() / "dainf_bad.dainf";
  std::ofstream(bad) << kHeader << "ring q\nalgebra A\n  basis x 0 zero\nend\n";
  Run r = run({"validate", bad.string()});
  CHECK(r.status == 3);
  CHECK(r.err.find(":4:13: ") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("coefficients are normalized in the ring") {
  std::string text = std::string(kHeader) + "ring zp:5\nalgebra A\n  basis x 0 0\n  m 0 2 : x x -> 0 0 : 5*x\nend\n";
  CHECK(parse_presentation(text).algebra("A").structure.ops().empty());
  std::string neg = std::string(kHeader) + "ring zp:5\nalgebra A\n  basis x 0 0\n  m 0 2 : x x -> 0 0 : -1*x\nend\n";
  CHECK(emit_presentation(parse_presentation(neg)).find(": 4*x") != std::string::npos);
}

TEST_CASE("the ring flag overrides the declared ring") {
  std::string text = slurp(root() / "corpus/truncated_polynomial.dainf");
  Presentation zz = parse_presentation(text);
  Presentation f5 = parse_presentation(text, Ring::prime_field(5));
  CHECK(zz.ring == Ring::integers());
  CHECK(f5.ring == Ring::prime_field(5));
  CHECK_FALSE(zz.algebra("A").structure.op(0, 1).is_zero());
  // d e = 5 vanishes mod 5.
  CHECK(f5.algebra("A").structure.op(0, 1).is_zero());

  InRoot here;
  Run r = run({"validate", "corpus/truncated_polynomial.dainf", "--ring", "zp:5"});
  CHECK(r.status == 0);
  CHECK(r.out.find("flags --ring zp:5") != std::string::npos);
  CHECK(run({"validate", "corpus/truncated_polynomial.dainf", "--ring", "zp:4"}).status == 3);
}

TEST_CASE("reports round trip and are deterministic") {
  InRoot here;
  std::vector<std::string> args{"massey", "corpus/massey.dainf", "--classes", "x", "x", "x", "--seed", "7"};
  Run a = run(args), b = run(args);
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  RunReport r = parse_report(a.out);
  CHECK(r.command == "massey");
  CHECK(r.verdict == Verdict::verified);
  CHECK(r.total);
  REQUIRE(r.find("element") != nullptr);
  CHECK(*r.find("element") == "2[xy]");
  CHECK(emit_report(r) == a.out);

  // The digest covers the flags and the file bytes, not the path.
  Run c = run({"massey", (root() / "corpus/massey.dainf").string(), "--classes", "x", "x", "x", "--seed", "7"});
  CHECK(c.out == a.out);
  Run d = run({"massey", "corpus/massey.dainf", "--classes", "x", "x", "x", "--seed", "8"});
  CHECK(parse_report(d.out).inputs != r.inputs);

  // Timing appears only on request and is the only difference.
  Run t = run({"massey", "corpus/massey.dainf", "--classes", "x", "x", "x", "--seed", "7", "--timing"});
  RunReport rt = parse_report(t.out);
  REQUIRE(rt.seconds.has_value());
  CHECK(*rt.seconds >= 0);
  CHECK(rt.results == r.results);
  CHECK_FALSE(r.seconds.has_value());
}

TEST_CASE("exit statuses") {
  InRoot here;
  CHECK(run({"validate", "corpus/massey.dainf"}).status == 0);
  CHECK(run({"extend", "corpus/resolution_obstruction.dainf", "--fixed", "2,2"}).status == 1);
  CHECK(run({"massey", "corpus/massey.dainf", "--classes", "x", "xy", "x"}).status == 1);
  CHECK(run({"validate", "corpus/truncated_polynomial.dainf", "--window", "*:-3:3:2"}).status == 2);
  CHECK(run({}).status == 3);
  CHECK(run({"frobnicate"}).status == 3);
  CHECK(run({"validate"}).status == 3);
  CHECK(run({"validate", "corpus/no_such_file.dainf"}).status == 3);
  CHECK(run({"validate", "corpus/massey.dainf", "--algebra", "Z"}).status == 3);
  CHECK(run({"hochschild", "corpus/massey.dainf", "--flavor", "sideways"}).status == 3);
}

TEST_CASE("window-limited reports say so") {
  InRoot here;
  Run r = run({"mc-check", "corpus/round_trip.dainf", "--window", "0:*:*:2"});
  CHECK(r.status == 2);
  RunReport rep = parse_report(r.out);
  CHECK_FALSE(rep.total);
  CHECK(rep.window == "0:*:*:2");
}

TEST_CASE("golden reports") {
  InRoot here;
  std::ifstream manifest("corpus/golden/MANIFEST");
  REQUIRE(manifest.good());
  int count = 0;
  for (std::string line; std::getline(manifest, line);) {
    auto w = words(line);
    if (w.empty() || w[0][0] == '#') continue;
    std::string report = w[0];
    std::vector<std::string> args(w.begin() + 1, w.end());
    INFO(report);
    std::string expected = slurp(root() / "corpus/golden" / report);
    Run r = run(args);
    CHECK(r.out == expected);
    CHECK(r.status == int(parse_report(expected).verdict));
    ++count;
  }
  CHECK(count >= 20);
}
