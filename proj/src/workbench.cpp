#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "dainf/deformation.hpp"
#include "dainf/hochschild.hpp"
#include "dainf/massey.hpp"
#include "dainf/workbench.hpp"

namespace dainf {

namespace {

// Raised for bad flags or names that only show up once the file is read.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string file;
  std::string ring, window, theorem = "classical";
  std::optional<int> arity_max;
  bool full = false, normalized = false, timing = false;
  std::optional<unsigned> seed;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--ring", c.ring, "coefficients: q, zz, zp:P or zloc:P (overrides the file)");
  sub->add_option("--window", c.window, "U:VMIN:VMAX[:ARITY], '*' leaves a bound open (overrides the file)");
  sub->add_option("--arity-max", c.arity_max, "largest arity examined when degrees do not bound it");
  auto* n = sub->add_flag("--normalized", c.normalized, "normalized cochains (default)");
  auto* f = sub->add_flag("--full", c.full, "full cochains");
  n->excludes(f);
  sub->add_option("--seed", c.seed, "seed for randomized choices");
  sub->add_flag("--timing", c.timing, "append the wall-clock time to the report");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

std::string window_text(const Window& w) {
  auto f = [](const std::optional<int>& x) { return x ? std::to_string(*x) : std::string("*"); };
  return f(w.max_u) + ":" + f(w.vmin) + ":" + f(w.vmax) + ":" + f(w.max_arity);
}

Window parse_window_flag(const std::string& s) {
  // Reuse the file grammar.
  Presentation p = parse_presentation("dainf-presentation 1\nring q\nwindow " + s + "\n");
  return *p.window;
}

std::string invariants(const HomologyPresentation& H) {
  if (H.is_zero()) return "0";
  std::string s = "free " + std::to_string(H.free_rank);
  if (!H.torsion.empty()) {
    s += " torsion";
    for (const auto& t : H.torsion) s += " " + t.get_str();
  }
  return s;
}

std::string yes(bool b) { return b ? "yes" : "no"; }

// Everything a command needs: the parsed input, the resolved window and
// options, and the report under construction.
struct Run {
  const Common& c;
  Presentation p;
  Window window;
  DeformationOptions opts;
  RunReport report;
  std::vector<std::string> claims;

  Run(const Common& common, const std::string& command, const std::vector<std::string>& args) : c(common) {
    std::string text = read_file(c.file);
    std::optional<Ring> R;
    if (!c.ring.empty()) {
      try {
        R = Ring::parse(c.ring);
      } catch (const std::exception& e) {
        throw UsageError(std::string("--ring: ") + e.what());
      }
    }
    p = parse_presentation(text, R);
    if (p.window) window = *p.window;
    if (!c.window.empty()) {
      try {
        Window w = parse_window_flag(c.window);
        if (!w.max_arity) w.max_arity = window.max_arity;
        window = w;
      } catch (const ParseError& e) {
        throw UsageError("--window: " + e.bare_message());
      }
    }
    if (c.arity_max) window.max_arity = c.arity_max;
    opts.normalized = !c.full;
    opts.max_arity = window.max_arity;
    report.command = command;
    std::uint64_t h = fnv1a64(text);
    for (const auto& a : args) {
      h = fnv1a64(a, fnv1a64(std::string(1, '\0'), h));
      report.flags.push_back(a);
    }
    report.inputs = "fnv1a64:" + hex64(h);
    report.window = window_text(window);
    for (const auto& m : p.meta)
      if (!m.empty() && m[0] == "claim") {
        std::string s;
        for (size_t i = 1; i < m.size(); ++i) s += (i > 1 ? " " : "") + m[i];
        claims.push_back(s);
      }
  }

  const NamedAlgebra& algebra(const std::string& name) const {
    if (name.empty()) {
      if (p.algebras.empty()) throw UsageError("the file declares no algebra");
      return p.algebras.front();
    }
    if (const auto* a = p.find_algebra(name)) return *a;
    throw UsageError("no algebra named " + name);
  }

  const NamedMap& map(const std::string& name) const {
    if (name.empty()) {
      if (p.maps.empty()) throw UsageError("the file declares no map");
      return p.maps.front();
    }
    if (const auto* m = p.find_map(name)) return *m;
    throw UsageError("no map named " + name);
  }

  Theorem theorem() const {
    auto t = parse_theorem(c.theorem);
    if (!t) throw UsageError("--theorem must be derived, classical or massey-fixed");
    return *t;
  }

  void lines(const std::string& prefix, const std::string& text) {
    for (const auto& l : split_lines(text)) report.lines.push_back(prefix + l);
  }

  // A refutation outranks truncation: a failing equation inside the window
  // is a failure whatever lies outside it.
  void verdict(Verdict v) {
    if (v == Verdict::refuted || report.verdict == Verdict::verified) report.verdict = v;
  }

  void truncated() {
    report.total = false;
    if (report.verdict == Verdict::verified) report.verdict = Verdict::window_insufficient;
  }
};

// ---------------------------------------------------------------- validate

void cmd_validate(Run& r, const std::string& only, const std::vector<std::string>& morphisms) {
  if (!only.empty()) r.p.algebra(only);  // unknown names are usage errors
  for (const auto& a : r.p.algebras) {
    if (!only.empty() && a.name != only) continue;
    const StructureFamily& m = a.structure;
    DaInfinityReport rep = check_da_infinity(m, r.window);
    r.report.result(a.name + ".structure-equations", rep.all_hold() ? "hold" : "fail");
    r.report.result(a.name + ".cells", std::to_string(rep.cells.size()));
    r.report.result(a.name + ".routes-agree", yes(rep.routes_agree()));
    if (const CellReport* f = rep.first_failure()) {
      r.report.result(a.name + ".witness", "(" + std::to_string(f->u) + "," + std::to_string(f->v) + ") " + f->witness);
      r.verdict(Verdict::refuted);
    }
    if (!rep.routes_agree()) r.verdict(Verdict::refuted);
    if (m.module()->unit()) {
      UnitReport u = check_strict_unit(m);
      r.report.result(a.name + ".strict-unit", yes(u.ok));
      if (!u.ok) {
        r.report.result(a.name + ".unit-witness", u.failures.front());
        r.verdict(Verdict::refuted);
      }
    }
    r.report.result(a.name + ".orthogonal", yes(is_orthogonal(m).orthogonal()));
    for (const auto& n : rep.notes) r.report.lines.push_back(a.name + ": " + n);
    if (!rep.total) r.truncated();
  }
  for (const auto& name : morphisms) {
    const NamedMap& f = r.map(name);
    const StructureFamily& s = r.algebra(f.source).structure;
    const StructureFamily& t = r.algebra(f.target).structure;
    EquationReport rep = check_morphism(f.family, s, t, r.window);
    r.report.result(f.name + ".morphism-equations", rep.all_hold() ? "hold" : "fail");
    if (const CellReport* w = rep.first_failure()) {
      r.report.result(f.name + ".witness", "(" + std::to_string(w->u) + "," + std::to_string(w->v) + ") " + w->witness);
      r.verdict(Verdict::refuted);
    }
    UnitReport u = check_morphism_unit(f.family);
    r.report.result(f.name + ".unit", yes(u.ok));
    if (!u.ok) r.verdict(Verdict::refuted);
    if (!rep.total) r.truncated();
  }
}

// ---------------------------------------------------------------- bracket

CochainSum named_sum(const Run& r, const std::string& name) {
  if (const auto* a = r.p.find_algebra(name)) return a->structure.total();
  if (const auto* f = r.p.find_map(name)) {
    if (f->source != f->target) throw UsageError("map " + name + " is not an endomorphism cochain");
    CochainSum s(f->family.source());
    for (const auto& [_, c] : f->family.maps()) s.add(c);
    return s;
  }
  throw UsageError("no algebra or map named " + name);
}

void cmd_bracket(Run& r, const std::string& left, const std::string& right, bool sharp) {
  CochainSum f = named_sum(r, left), g = named_sum(r, right);
  if (!same_module(f.source(), g.source())) throw UsageError(left + " and " + right + " live on different modules");
  if (sharp) g = hash(g);
  CochainSum b = bracket(f, g);
  r.report.result("bracket", "[" + left + ", " + right + (sharp ? "#" : "") + "]");
  r.report.result("zero", yes(b.is_zero()));
  r.report.result("components", std::to_string(b.terms().size()));
  r.lines("", describe(b));
}

// ---------------------------------------------------------------- hochschild

std::pair<int, int> parse_range(const std::string& s) {
  auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      int a = std::stoi(s);
      return {a, a};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw UsageError("expected a range A..B, got " + s);
  }
}

bool bigraded(HHFlavor f) { return f == HHFlavor::bidga || f == HHFlavor::graded_algebra; }

// Invariants of each cell, keyed for comparison.
std::map<HHDegree, std::string> hh_table(Run& r, const HochschildComplex& C, std::pair<int, int> degrees) {
  std::map<HHDegree, std::string> out;
  std::vector<HHDegree> cells;
  for (int a = degrees.first; a <= degrees.second; ++a) {
    if (!bigraded(C.flavor())) {
      cells.push_back({a, 0});
      continue;
    }
    if (!r.window.vmin || !r.window.vmax)
      throw UsageError("bigraded cohomology needs --window with VMIN and VMAX for the second index");
    for (int b = *r.window.vmin; b <= *r.window.vmax; ++b) cells.push_back({a, b});
  }
  for (const HHDegree& d : cells) {
    HHGroup g = C.cohomology(d);
    std::string inv = invariants(g.homology);
    out[d] = inv;
    std::string cell = bigraded(C.flavor()) ? std::to_string(d.a) + "," + std::to_string(d.b) : std::to_string(d.a);
    if (!g.homology.is_zero() || !g.total)
      r.report.lines.push_back("HH^{" + cell + "} = " + inv + " (cochains " + std::to_string(g.cochains) +
                               (g.total ? "" : ", truncated") + ")");
    if (!g.total) r.truncated();
  }
  return out;
}

void cmd_hochschild(Run& r, const std::string& name, const std::string& flavor_name, const std::string& degrees,
                    const std::string& along) {
  auto flavor = parse_flavor(flavor_name);
  if (!flavor) throw UsageError("--flavor must be classical, dga, derived, bidga or algebra");
  const NamedAlgebra& a = r.algebra(name);
  HochschildOptions ho{!r.c.full, r.window.max_arity};
  std::optional<HochschildComplex> C;
  if (!along.empty()) {
    if (*flavor != HHFlavor::bidga) throw UsageError("--along needs --flavor bidga");
    const NamedMap& f = r.map(along);
    if (f.source != a.name) throw UsageError("map " + along + " does not start at " + a.name);
    const MultiCochain* f01 = f.family.get(0, 1);
    if (!f01) throw UsageError("map " + along + " has no f 0 1 component");
    C.emplace(a.structure, bimodule_along(a.structure, r.algebra(f.target).structure, *f01), ho);
  } else {
    C.emplace(a.structure, *flavor, ho);
  }
  auto range = parse_range(degrees);
  r.report.result("algebra", a.name);
  r.report.result("flavor", to_string(*flavor) + (along.empty() ? "" : " along " + along));
  r.report.result("degrees", std::to_string(range.first) + ".." + std::to_string(range.second));
  auto table = hh_table(r, *C, range);
  if (bigraded(*flavor)) {
    // The cells (n, 2-n), where the obstructions to uniqueness live.
    for (int n = range.first; n <= range.second; ++n) {
      auto it = table.find({n, 2 - n});
      if (it != table.end()) r.report.result("HH^{" + std::to_string(n) + "," + std::to_string(2 - n) + "}", it->second);
    }
  }
  size_t nonzero = 0;
  for (const auto& [_, v] : table) nonzero += v != "0";
  r.report.result("cells", std::to_string(table.size()));
  r.report.result("nonzero-cells", std::to_string(nonzero));
}

// ---------------------------------------------------------------- mc-check

void cmd_mc(Run& r, const std::string& name) {
  const NamedAlgebra& a = r.algebra(name);
  TwistingCochain t = TwistingCochain::split(a.structure, r.theorem());
  MaurerCartanReport mc = check_maurer_cartan(t, r.opts);
  r.report.result("algebra", a.name);
  r.report.result("theorem", to_string(r.theorem()));
  r.report.result("twisting-terms", std::to_string(t.terms.size()));
  r.report.result("maurer-cartan", yes(mc.formula_holds));
  r.report.result("structure-equations", yes(mc.structure_holds));
  r.report.result("routes-agree", yes(mc.routes_agree()));
  if (!mc.witness.empty()) r.report.result("witness", mc.witness);
  if (!mc.holds() || !mc.routes_agree()) r.verdict(Verdict::refuted);
  if (!mc.total) r.truncated();
}

// ---------------------------------------------------------------- perturb / trivialize / replay

const MultiCochain& single_component(const NamedMap& f) {
  if (f.family.maps().size() != 1) throw UsageError("map " + f.name + " must have exactly one component");
  return f.family.maps().begin()->second;
}

void cmd_perturb(Run& r, const std::string& name, const std::string& bname, const std::string& case_name,
                 const std::string& out_name) {
  const NamedAlgebra& a = r.algebra(name);
  const NamedMap& b = r.map(bname);
  if (b.source != a.name || b.target != a.name) throw UsageError("map " + bname + " must go from " + a.name + " to itself");
  auto kase = parse_perturb_case(case_name);
  if (!kase) throw UsageError("--case must be A, B, classical or general");
  TwistingCochain t = TwistingCochain::split(a.structure, r.theorem());
  r.report.result("algebra", a.name);
  r.report.result("theorem", to_string(r.theorem()));
  r.report.result("case", to_string(*kase));
  r.report.result("b", to_string(single_component(b).shape()));
  std::optional<PerturbationStep> step;
  try {
    step = perturb(t, single_component(b), *kase, r.opts);
  } catch (const SideConditionViolated& e) {
    r.report.result("side-condition", e.what());
    r.verdict(Verdict::refuted);
    return;
  }
  const PerturbationStep& s = *step;
  r.report.result("twisting", yes(s.twisting));
  r.report.result("morphism", yes(s.morphism));
  r.report.result("low-degrees-unchanged", yes(s.low_degrees_unchanged));
  r.report.result("leading-term", yes(s.leading_term));
  if (!s.verified()) r.verdict(Verdict::refuted);
  if (!s.total) r.truncated();
  StructureFamily after = s.after.structure();
  r.lines("", describe(after.total()));
  if (!r.c.out.empty()) {
    Presentation o;
    o.ring = r.p.ring;
    o.window = r.p.window;
    o.algebras.push_back(a);
    o.algebras.push_back({out_name, after});
    MorphismFamily f = s.morphism_family();
    o.maps.push_back({"morphism", a.name, out_name, f});
    write_file(r.c.out, emit_presentation(o));
    r.report.result("written", out_name);
  }
}

Presentation certificate_file(const TrivializationCertificate& cert, const Presentation& from) {
  Presentation o;
  o.ring = from.ring;
  o.window = from.window;
  o.meta.push_back({"certificate", to_string(cert.theorem)});
  o.meta.push_back({"total", yes(cert.total)});
  o.algebras.push_back({"input", cert.input});
  std::string before = "input";
  for (size_t i = 0; i < cert.steps.size(); ++i) {
    const PerturbationStep& s = cert.steps[i];
    std::string n = std::to_string(i + 1), after = "step" + n, b = "b" + n;
    o.algebras.push_back({after, s.after.structure()});
    MorphismFamily f(cert.input.module(), cert.input.module());
    f.set(s.b.hshift(), s.b.arity(), s.b);
    o.maps.push_back({b, before, before, f});
    o.meta.push_back({"step", n, to_string(s.kase), b, before, after});
    before = after;
  }
  o.algebras.push_back({"output", cert.output});
  if (cert.failure)
    o.meta.push_back({"failure", to_string(cert.failure->kind), std::to_string(cert.failure->slot.first),
                      std::to_string(cert.failure->slot.second)});
  return o;
}

void cmd_trivialize(Run& r, const std::string& name) {
  const NamedAlgebra& a = r.algebra(name);
  TrivializationCertificate cert = trivialize(a.structure, r.theorem(), r.opts);
  r.report.result("algebra", a.name);
  r.report.result("theorem", to_string(r.theorem()));
  r.report.result("steps", std::to_string(cert.steps.size()));
  for (size_t i = 0; i < cert.steps.size(); ++i) {
    const auto& s = cert.steps[i];
    r.report.lines.push_back("step " + std::to_string(i + 1) + ": case " + to_string(s.kase) + ", b of shape " +
                             to_string(s.b.shape()) + (s.verified() ? ", verified" : ", NOT verified"));
  }
  for (const auto& n : cert.notes) r.report.lines.push_back("note: " + n);
  r.report.result("trivial", yes(cert.trivial()));
  if (cert.failure) {
    const Obstruction& o = *cert.failure;
    r.report.result("obstruction", to_string(o.kind) + " at (" + std::to_string(o.slot.first) + "," +
                                       std::to_string(o.slot.second) + ")");
    if (!o.detail.empty()) r.report.result("detail", o.detail);
    r.lines("obstruction: ", describe(o.representative));
    r.verdict(Verdict::refuted);
  } else {
    r.lines("", describe(cert.output.total()));
  }
  if (!cert.total) r.truncated();
  if (!r.c.out.empty()) write_file(r.c.out, emit_presentation(certificate_file(cert, r.p)));
}

void cmd_replay(Run& r) {
  const Presentation& p = r.p;
  std::optional<Theorem> th;
  bool failed = false;
  std::vector<std::vector<std::string>> steps;
  for (const auto& m : p.meta) {
    if (m[0] == "certificate" && m.size() == 2) th = parse_theorem(m[1]);
    if (m[0] == "step") {
      if (m.size() != 6) throw UsageError("malformed step line in the certificate");
      steps.push_back(m);
    }
    if (m[0] == "failure") failed = true;
  }
  if (!th) throw UsageError("not a certificate: no 'meta certificate THEOREM' line");
  TrivializationCertificate cert{*th, r.algebra("input").structure, r.algebra("output").structure, {}, {}, true, {}};
  if (failed)
    cert.failure = Obstruction{Obstruction::Kind::nonzero_class, {0, 0}, CochainSum(cert.input.module()), ""};
  for (const auto& m : steps) {
    auto kase = parse_perturb_case(m[2]);
    if (!kase) throw UsageError("unknown case " + m[2]);
    PerturbationStep s{*kase, single_component(r.map(m[3])), TwistingCochain::split(r.algebra(m[4]).structure, *th),
                       TwistingCochain::split(r.algebra(m[5]).structure, *th)};
    cert.steps.push_back(s);
  }
  ReplayReport rep = replay(cert, r.opts);
  r.report.result("theorem", to_string(*th));
  r.report.result("steps", std::to_string(cert.steps.size()));
  r.report.result("verified-steps", std::to_string(rep.verified_steps));
  r.report.result("replay", rep.ok ? "ok" : "failed");
  if (!rep.ok) {
    r.report.result("failure", rep.failure);
    r.verdict(Verdict::refuted);
  }
  for (const auto& m : p.meta)
    if (m[0] == "total" && m.size() == 2 && m[1] == "no") r.truncated();
}

// ---------------------------------------------------------------- extend / e2-check

void cmd_extend(Run& r, const std::string& map_name, const std::vector<std::string>& fixed) {
  const NamedMap& f = r.map(map_name);
  const MultiCochain* f01 = f.family.get(0, 1);
  if (!f01) throw UsageError("map " + f.name + " has no f 0 1 component");
  const StructureFamily& B = r.algebra(f.source).structure;
  const StructureFamily& A = r.algebra(f.target).structure;
  ExtensionOptions eo;
  eo.max_arity = r.window.max_arity;
  for (const auto& s : fixed) {
    auto comma = s.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument(s);
      eo.fixed.insert({std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))});
    } catch (const std::exception&) {
      throw UsageError("--fixed takes I,J");
    }
  }
  ExtensionResult res = extend_structure(B, A, *f01, eo);
  r.report.result("source", f.source);
  r.report.result("target", f.target);
  r.report.result("max-arity", std::to_string(res.max_arity));
  r.report.result("feasible", yes(res.feasible));
  r.report.result("conditional", yes(res.conditional));
  if (res.failed_stage) r.report.result("failed-stage", std::to_string(*res.failed_stage));
  for (const auto& c : res.conflict) r.report.lines.push_back("conflict: " + c.text());
  for (const auto& c : res.congruences) r.report.result("congruence", c);
  for (const auto& c : r.claims) r.report.result("claim", c);
  for (const auto& n : res.notes) r.report.lines.push_back("note: " + n);
  if (res.feasible) {
    for (const auto& [ij, m] : res.structure.ops())
      if (!B.get(ij.first, ij.second)) r.lines("m " + std::to_string(ij.first) + " " + std::to_string(ij.second) + ": ", m.describe());
    for (const auto& [st, g] : res.morphism.maps())
      r.lines("f " + std::to_string(st.first) + " " + std::to_string(st.second) + ": ", g.describe());
    if (res.conditional) r.truncated();
    if (!r.c.out.empty()) {
      Presentation o;
      o.ring = r.p.ring;
      o.window = r.p.window;
      o.algebras.push_back({f.source + "_extended", res.structure});
      o.algebras.push_back(r.algebra(f.target));
      o.maps.push_back({f.name + "_extended", f.source + "_extended", f.target, res.morphism});
      write_file(r.c.out, emit_presentation(o));
    }
  } else {
    r.verdict(Verdict::refuted);
  }
  if (!res.total) r.truncated();
}

void cmd_e2(Run& r, const std::string& map_name, const std::string& degrees) {
  const NamedMap& f = r.map(map_name);
  const MultiCochain* f01 = f.family.get(0, 1);
  if (!f01) throw UsageError("map " + f.name + " has no f 0 1 component");
  const StructureFamily& B = r.algebra(f.source).structure;
  const StructureFamily& A = r.algebra(f.target).structure;
  E2Decision d = is_e2_equivalence(*f01, B, A);
  r.report.result("map", f.name);
  r.report.result("e2-equivalence", yes(d.equivalence));
  if (!d.equivalence) {
    r.report.result("witness", d.witness);
    r.verdict(Verdict::refuted);
    return;
  }
  if (degrees.empty()) return;
  // Bigraded Hochschild tables of both ends and of the source with
  // coefficients in the target.
  HochschildOptions ho{!r.c.full, r.window.max_arity};
  auto range = parse_range(degrees);
  HochschildComplex HB(B, HHFlavor::bidga, ho), HA(A, HHFlavor::bidga, ho), HBA(B, bimodule_along(B, A, *f01), ho);
  r.report.lines.push_back(f.source + ":");
  auto tb = hh_table(r, HB, range);
  r.report.lines.push_back(f.target + ":");
  auto ta = hh_table(r, HA, range);
  r.report.lines.push_back(f.source + " with coefficients in " + f.target + ":");
  auto tba = hh_table(r, HBA, range);
  bool agree = tb == ta && tb == tba;
  r.report.result("hh-cells", std::to_string(tb.size()));
  r.report.result("hh-tables-agree", yes(agree));
  if (!agree) {
    for (const auto& [d2, v] : tb)
      if (ta[d2] != v || tba[d2] != v) {
        r.report.result("hh-witness", "(" + std::to_string(d2.a) + "," + std::to_string(d2.b) + "): " + v + " vs " +
                                          ta[d2] + " vs " + tba[d2]);
        break;
      }
    r.verdict(Verdict::refuted);
  }
}

// ---------------------------------------------------------------- massey / transfer

// "2*[x]+1*[y]" or "0@D" for the zero class of degree D.
HClass parse_class(const HomologyAlgebra& H, const std::string& s) {
  auto at = s.find('@');
  if (at != std::string::npos) {
    if (s.substr(0, at) != "0") throw UsageError("only the zero class may be given as 0@DEGREE");
    try {
      return {std::stoi(s.substr(at + 1)), {}};
    } catch (const std::exception&) {
      throw UsageError("bad degree in " + s);
    }
  }
  HClass out;
  bool first = true;
  size_t i = 0;
  const Ring& R = H.module->ring();
  while (i < s.size()) {
    size_t j = s.find('+', i);
    std::string term = s.substr(i, j == std::string::npos ? std::string::npos : j - i);
    i = j == std::string::npos ? s.size() : j + 1;
    auto star = term.find('*');
    Scalar c(1);
    std::string name = term;
    if (star != std::string::npos) {
      try {
        c = Scalar(term.substr(0, star));
        c.canonicalize();
      } catch (const std::exception&) {
        throw UsageError("bad coefficient in " + term);
      }
      name = term.substr(star + 1);
    }
    // Shells and option parsers tend to eat brackets, so "x" means "[x]".
    auto g = H.module->find(name);
    if (!g) g = H.module->find("[" + name + "]");
    if (!g) throw UsageError("no homology class named " + name);
    int deg = H.module->degree(*g).v;
    if (!first && deg != out.degree) throw UsageError("class " + s + " is not homogeneous");
    out.degree = deg;
    first = false;
    add_scaled(out.cls, Vec{{*g, R.normalize(c)}}, Scalar(1), R);
  }
  if (first) throw UsageError("empty class");
  return out;
}

void describe_homology(Run& r, const HomologyAlgebra& H) {
  for (int g = 0; g < int(H.module->size()); ++g) {
    std::string order = H.orders[size_t(g)] == 0 ? "free" : "order " + H.orders[size_t(g)].get_str();
    r.report.lines.push_back("H^" + std::to_string(H.module->degree(g).v) + ": " + H.module->name(g) + " (" + order + ")");
  }
}

void cmd_massey(Run& r, const std::string& name, const std::vector<std::string>& classes, const std::string& expect,
                int trials) {
  if (classes.size() != 3) throw UsageError("--classes takes three classes");
  const NamedAlgebra& a = r.algebra(name);
  HomologyAlgebra H = homology_algebra(a.structure);
  describe_homology(r, H);
  HClass c1 = parse_class(H, classes[0]), c2 = parse_class(H, classes[1]), c3 = parse_class(H, classes[2]);
  r.report.result("triple", "<" + classes[0] + ", " + classes[1] + ", " + classes[2] + ">");
  MasseyProduct m;
  try {
    m = massey_triple(H, c1, c2, c3);
  } catch (const MasseyUndefined& e) {
    r.report.result("defined", "no");
    r.report.result("witness", e.what());
    r.verdict(Verdict::refuted);
    return;
  }
  r.report.result("defined", "yes");
  r.report.result("degree", std::to_string(m.degree));
  r.report.result("element", H.describe(m.element));
  std::string ind;
  for (const auto& g : m.indeterminacy) ind += (ind.empty() ? "" : ", ") + H.describe(g);
  r.report.result("indeterminacy", ind.empty() ? "0" : "span of " + ind);
  if (!expect.empty()) {
    HClass e = parse_class(H, expect);
    bool in = e.degree == m.degree && m.contains(H, e.cls);
    r.report.result("contains " + expect, yes(in));
    if (!in) r.verdict(Verdict::refuted);
  }
  if (r.c.seed) {
    std::mt19937 rng(*r.c.seed);
    int same = 0;
    for (int t = 0; t < trials; ++t) same += massey_triple(H, c1, c2, c3, &rng).same_coset(H, m);
    r.report.result("randomized-choices", std::to_string(same) + "/" + std::to_string(trials) + " give the same coset");
    if (same != trials) r.verdict(Verdict::refuted);
  }
}

void cmd_transfer(Run& r, const std::string& name, int check_arity) {
  const NamedAlgebra& a = r.algebra(name);
  MinimalModel M = transfer_minimal_model(a.structure, r.window.max_arity);
  const HomologyAlgebra& H = M.homology;
  describe_homology(r, H);
  r.report.result("model-arity", std::to_string(M.max_arity));
  for (const auto& [ij, m] : M.structure.ops()) r.lines("m " + std::to_string(ij.second) + ": ", m.describe());
  Window w = r.window;
  w.max_arity = std::max(check_arity, M.max_arity);
  StructureFamily S = M.structure;
  S.known_arity.reset();  // check the relations with everything past the model arity set to zero
  if (M.total) {
    DaInfinityReport rep = check_da_infinity(S, w);
    r.report.result("relations-up-to-arity", std::to_string(*w.max_arity));
    r.report.result("relations", rep.all_hold() ? "hold" : "fail");
    if (!rep.all_hold()) r.verdict(Verdict::refuted);
  }
  EquationReport mor = check_morphism(M.morphism, M.structure, a.structure, r.window);
  r.report.result("morphism", mor.all_hold() ? "hold" : "fail");
  r.report.result("quasi-isomorphism", yes(induces_identity(M)));
  if (!mor.all_hold() || !induces_identity(M)) r.verdict(Verdict::refuted);

  // The m_3 membership on every defined triple of basis classes.
  int defined = 0, literal = 0, negated = 0;
  std::vector<std::string> misses;
  int n = int(H.module->size());
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h)
      for (int k = 0; k < n; ++k) {
        HClass x{H.module->degree(g).v, {{g, 1}}}, y{H.module->degree(h).v, {{h, 1}}}, z{H.module->degree(k).v, {{k, 1}}};
        M3Membership mem;
        try {
          mem = m3_membership(M, x, y, z);
        } catch (const MasseyUndefined&) {
          continue;
        }
        ++defined;
        literal += mem.member;
        negated += mem.member_negated;
        if (!mem.member && !mem.member_negated) misses.push_back(H.module->name(g) + H.module->name(h) + H.module->name(k));
      }
  r.report.result("defined-triples", std::to_string(defined));
  r.report.result("m3-in-massey", std::to_string(literal) + "/" + std::to_string(defined));
  r.report.result("negated-m3-in-massey", std::to_string(negated) + "/" + std::to_string(defined));
  bool global = literal == defined || negated == defined;
  r.report.result("m3-sign", literal == defined ? "as quoted" : negated == defined ? "opposite" : "inconsistent");
  if (!global) {
    if (!misses.empty()) r.report.result("m3-witness", misses.front());
    r.verdict(Verdict::refuted);
  }
  if (!M.total) r.truncated();
  if (!r.c.out.empty()) {
    Presentation o;
    o.ring = r.p.ring;
    o.window = r.p.window;
    o.algebras.push_back(a);
    o.algebras.push_back({"minimal", M.structure});
    o.maps.push_back({"f", "minimal", a.name, M.morphism});
    write_file(r.c.out, emit_presentation(o));
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dainf: derived A-infinity workbench"};
  app.require_subcommand(1);
  Common c;
  std::string algebra, map_name, left, right, flavor = "classical", degrees, along, kase = "classical",
                                                name_out = "perturbed", expect, hh;
  std::vector<std::string> morphisms, fixed, classes;
  bool sharp = false;
  int trials = 20, check_arity = 6;

  auto file = [&](CLI::App* s, const std::string& what) { s->add_option("file", c.file, what)->required(); };

  auto* validate = app.add_subcommand("validate", "check the structure, unit and morphism equations");
  file(validate, "presentation file");
  validate->add_option("--algebra", algebra, "only this algebra");
  validate->add_option("--morphism", morphisms, "also check this map as a morphism");

  auto* brk = app.add_subcommand("bracket", "the bracket of two structures or cochains");
  file(brk, "presentation file");
  brk->add_option("--left", left, "algebra or endomorphism map")->required();
  brk->add_option("--right", right, "algebra or endomorphism map")->required();
  brk->add_flag("--sharp", sharp, "bracket with right^#");

  auto* hoch = app.add_subcommand("hochschild", "Hochschild cohomology table");
  file(hoch, "presentation file");
  hoch->add_option("--algebra", algebra, "algebra (default: the first)");
  hoch->add_option("--flavor", flavor, "classical, dga, derived, bidga or algebra");
  hoch->add_option("--degrees", degrees, "range A..B of the first index")->required();
  hoch->add_option("--along", along, "bidga coefficients pulled back along this map");

  auto* mc = app.add_subcommand("mc-check", "Maurer-Cartan check of the twisting part");
  file(mc, "presentation file");
  mc->add_option("--algebra", algebra, "algebra (default: the first)");
  mc->add_option("--theorem", c.theorem, "derived, classical or massey-fixed");

  auto* pert = app.add_subcommand("perturb", "perturb along id + b");
  file(pert, "presentation file");
  pert->add_option("--algebra", algebra, "algebra (default: the first)");
  pert->add_option("--map", map_name, "the cochain b, a map from the algebra to itself")->required();
  pert->add_option("--case", kase, "A, B, classical or general");
  pert->add_option("--theorem", c.theorem, "derived, classical or massey-fixed");
  pert->add_option("--out", c.out, "write the perturbed algebra and the morphism here");
  pert->add_option("--name", name_out, "name of the perturbed algebra in --out");

  auto* triv = app.add_subcommand("trivialize", "reduce a structure to its base, with a certificate");
  file(triv, "presentation file");
  triv->add_option("--algebra", algebra, "algebra (default: the first)");
  triv->add_option("--theorem", c.theorem, "derived, classical or massey-fixed");
  triv->add_option("--out", c.out, "write the certificate here");

  auto* ext = app.add_subcommand("extend", "search for higher operations and a morphism extending f_01");
  file(ext, "presentation file");
  ext->add_option("--map", map_name, "the map carrying f 0 1 (default: the first)");
  ext->add_option("--fixed", fixed, "I,J: keep m_IJ as given instead of solving for it");
  ext->add_option("--out", c.out, "write the extension here");

  auto* massey = app.add_subcommand("massey", "a Massey triple product");
  file(massey, "presentation file");
  massey->add_option("--algebra", algebra, "algebra (default: the first)");
  massey->add_option("--classes", classes, "three classes such as 2*[x] (or 2*x) or 0@4")->required()->expected(3);
  massey->add_option("--expect", expect, "report whether this class lies in the product");
  massey->add_option("--trials", trials, "randomized choices to compare with --seed");

  auto* transfer = app.add_subcommand("transfer", "minimal model on homology and the m_3 check");
  file(transfer, "presentation file");
  transfer->add_option("--algebra", algebra, "algebra (default: the first)");
  transfer->add_option("--check-arity", check_arity, "check the relations of the model up to this arity");
  transfer->add_option("--out", c.out, "write the model here");

  auto* e2 = app.add_subcommand("e2-check", "decide whether f_01 is an E_2-equivalence");
  file(e2, "presentation file");
  e2->add_option("--map", map_name, "the map (default: the first)");
  e2->add_option("--hh-degrees", hh, "also compare bigraded Hochschild tables over this range of s");

  auto* rep = app.add_subcommand("replay", "re-run and re-verify a trivialization certificate");
  file(rep, "certificate written by trivialize --out");

  for (auto* s : {validate, brk, hoch, mc, pert, triv, ext, massey, transfer, e2, rep}) add_common(s, c);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return int(Verdict::usage);
  }

  CLI::App* sub = app.get_subcommands().front();
  std::string command = sub->get_name();
  // Flags as given, minus the input path and --out, so reports do not
  // depend on where files live.
  std::vector<std::string> flags;
  bool skipped = false;
  for (size_t i = 1; i < args.size(); ++i) {
    if (!skipped && args[i] == c.file) {
      skipped = true;
      continue;
    }
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    flags.push_back(args[i]);
  }
  auto start = std::chrono::steady_clock::now();
  try {
    Run r(c, command, flags);
    try {
      if (command == "validate") cmd_validate(r, algebra, morphisms);
      else if (command == "bracket") cmd_bracket(r, left, right, sharp);
      else if (command == "hochschild") cmd_hochschild(r, algebra, flavor, degrees, along);
      else if (command == "mc-check") cmd_mc(r, algebra);
      else if (command == "perturb") cmd_perturb(r, algebra, map_name, kase, name_out);
      else if (command == "trivialize") cmd_trivialize(r, algebra);
      else if (command == "extend") cmd_extend(r, map_name, fixed);
      else if (command == "massey") cmd_massey(r, algebra, classes, expect, trials);
      else if (command == "transfer") cmd_transfer(r, algebra, check_arity);
      else if (command == "e2-check") cmd_e2(r, map_name, hh);
      else if (command == "replay") cmd_replay(r);
    } catch (const WindowInsufficient& e) {
      r.report.result("window-insufficient", e.what());
      r.truncated();
      r.report.verdict = Verdict::window_insufficient;
    }
    if (c.timing)
      r.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << emit_report(r.report);
    return int(r.report.verdict);
  } catch (const ParseError& e) {
    err << c.file << ":" << e.line() << ":" << e.column() << ": " << e.bare_message() << "\n";
    return int(Verdict::usage);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << sub->help();
    return int(Verdict::usage);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return int(Verdict::usage);
  }
}

}  // namespace dainf
