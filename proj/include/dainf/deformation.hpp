#pragma once

// Twisting cochains over a fixed base structure, the Maurer-Cartan check,
// perturbation along id + b, the trivialization loops, and the extension
// solver for higher operations and morphism components.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dainf/hochschild.hpp"
#include "dainf/structure.hpp"

namespace dainf {

// Which uniqueness setting a structure is read in.  The base is
// m_11 + m_02 (bidga with m_01 = 0), m_01 + m_02 (dga), or m_02 + m_03
// (minimal model with fixed m_3).
enum class Theorem { derived, classical, massey_fixed };
std::string to_string(Theorem t);
std::optional<Theorem> parse_theorem(const std::string& s);

struct DeformationOptions {
  bool normalized = true;
  std::optional<int> max_arity;  // needed when degrees do not bound arities
  EpsilonReading reading = EpsilonReading::grouped;
};

// a = m - base, supported off the base slots.
struct TwistingCochain {
  Theorem setting = Theorem::classical;
  StructureFamily base;
  std::map<Index2, MultiCochain> terms;
  std::optional<int> known_arity;

  TwistingCochain(Theorem s, StructureFamily b) : setting(s), base(std::move(b)) {}
  static TwistingCochain split(const StructureFamily& m, Theorem setting);
  StructureFamily structure() const;
  CochainSum sum() const;
  MultiCochain term(int i, int j) const;  // zero if absent
  bool is_zero() const;
};

bool same_structure(const StructureFamily& a, const StructureFamily& b);

struct MaurerCartanReport {
  bool formula_holds = false;    // the Maurer-Cartan formula of the setting
  bool structure_holds = false;  // base + a passes check_da_infinity
  bool total = false;
  std::string witness;
  DaInfinityReport structure;
  bool routes_agree() const { return formula_holds == structure_holds; }
  bool holds() const { return formula_holds && structure_holds; }
};
// Derived: 2D(a) = -[a, a^#] + 4[d, a_odd].  Classical and fixed-m_3:
// -D(a) = a o a.  D is the Hochschild differential of the base.
MaurerCartanReport check_maurer_cartan(const TwistingCochain& a, const DeformationOptions& opts = {});

// The largest arity examined for a structure on A, and whether it is forced
// by degrees.  Throws WindowInsufficient when neither degrees nor options
// bound it.
struct ArityWindow {
  int max_arity = 0;
  bool forced = true;
};
ArityWindow structure_arity_window(const StructureFamily& m, const DeformationOptions& opts);

// The structure mbar making f : (A, m) -> (A, mbar) a morphism, solved
// degree by degree from the morphism equation.  f_01 must be the identity.
StructureFamily transport_structure(const StructureFamily& m, const MorphismFamily& f, int max_arity,
                                    EpsilonReading reading = EpsilonReading::grouped);

// Case A: b = f_{k,n-1} with [d, b] = 0 changes a_{kn} by -[mu, b].
// Case B: b = f_{k-1,n} with [mu, b] = 0 changes a_{kn} by -[d, b].
// Classical: D(p) has a single nonzero arity component, which is
// subtracted from a.
// General: no side condition; the lowest components of [base, b] are
// subtracted and everything below them is unchanged.
enum class PerturbCase { A, B, classical, general };
std::string to_string(PerturbCase c);
std::optional<PerturbCase> parse_perturb_case(const std::string& s);

struct PerturbationStep {
  PerturbCase kase = PerturbCase::classical;
  MultiCochain b;
  TwistingCochain before, after;
  // Post-conditions, all checked by perturb.
  bool twisting = false;            // after passes the Maurer-Cartan check
  bool morphism = false;            // id + b passes check_morphism
  bool low_degrees_unchanged = false;
  bool leading_term = false;        // the changed slot equals a - (bracket with b)
  bool total = false;
  MorphismFamily morphism_family() const;
  bool verified() const { return twisting && morphism && low_degrees_unchanged && leading_term; }
};

class SideConditionViolated : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

PerturbationStep perturb(const TwistingCochain& a, const MultiCochain& b, PerturbCase c,
                         const DeformationOptions& opts = {});

struct Obstruction {
  // unresolved: a_{kn} is not a D-cocycle and no perturbation of the two
  // admissible shapes removes it while keeping lower slots fixed.
  enum class Kind { not_cocycle, nonzero_class, integral_only, unresolved };
  Kind kind = Kind::nonzero_class;
  Index2 slot;               // (k, n) of the offending a_{kn}
  CochainSum representative;  // a_{kn}
  std::string detail;
};
std::string to_string(Obstruction::Kind k);

struct TrivializationCertificate {
  Theorem theorem = Theorem::classical;
  StructureFamily input, output;
  std::vector<PerturbationStep> steps;
  std::optional<Obstruction> failure;
  bool total = true;
  std::vector<std::string> notes;
  bool trivial() const { return !failure; }
};

TrivializationCertificate trivialize(const StructureFamily& m, Theorem theorem, const DeformationOptions& opts = {});

struct ReplayReport {
  bool ok = true;
  size_t verified_steps = 0;
  std::string failure;
};
// Re-runs every step from the input and compares against the recorded
// intermediate and final structures.
ReplayReport replay(const TrivializationCertificate& cert, const DeformationOptions& opts = {});

// Searching for higher operations m_ij on B (i + j >= 3) and components
// f_ij : B -> target extending a given f_01.  Stage t fixes every m_ij and
// f_ij with i + j = t from the morphism equations (u, v) with u + v = t and
// the structure equations with u + v = t + 1, which are affine in them.
// Free directions left by earlier stages stay variable while they enter
// affinely; a direction that enters quadratically is frozen at its current
// value and the result is marked conditional.
struct ExtensionOptions {
  std::optional<int> max_arity;  // needed when degrees do not bound arities
  // Slots (i, j) with i + j >= 3 whose operation is taken from B as given
  // (zero if B has none) instead of being solved for.
  std::set<Index2> fixed;
  EpsilonReading reading = EpsilonReading::grouped;
};

// One scalar equation  sum coefficient * unknown + constant = 0.
struct ExtensionConstraint {
  std::string equation;  // "structure" or "morphism"
  int u = 0, v = 0;
  std::string entry;  // "(a a) -> b"
  std::vector<std::pair<std::string, Scalar>> coefficients;
  Scalar constant;
  std::string text() const;
};

struct ExtensionResult {
  bool feasible = false;
  StructureFamily structure;
  MorphismFamily morphism;
  int max_arity = 0;
  bool total = false;        // the arity window is forced by degrees
  bool conditional = false;  // some free direction was frozen
  std::optional<int> failed_stage;
  // A minimal inconsistent set of constraints, and what each says about
  // the unknowns it shares with the others, reduced modulo the gcd of the
  // coefficients of its private unknowns.
  std::vector<ExtensionConstraint> conflict;
  std::vector<std::string> congruences;
  std::vector<std::string> notes;
};

// B must have m_01 = 0 and no higher operations outside opts.fixed.  Throws WindowInsufficient when neither degrees
// nor options bound the arities.
ExtensionResult extend_structure(const StructureFamily& B, const StructureFamily& target, const MultiCochain& f01,
                                 const ExtensionOptions& opts = {});

}  // namespace dainf
