#pragma once

// Homology algebras of dgas, Massey triple products, and minimal models
// obtained by transferring the dga structure to homology.

#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dainf/deformation.hpp"
#include "dainf/structure.hpp"

namespace dainf {

// A homogeneous homology class; the degree is kept so that zero classes
// still have one.
struct HClass {
  int degree = 0;
  Vec cls;
};

// H(A) for a dga A concentrated in horizontal degree 0.  One basis element
// per homology generator, named after its representative.  Torsion
// generators carry their order; the product table is computed on
// representatives.
struct HomologyAlgebra {
  StructureFamily dga;
  ModulePtr module;
  std::vector<Vec> representatives;  // cocycle of A for each basis element
  std::vector<Scalar> orders;        // 0 for free generators
  std::map<int, HomologyPresentation> presentations;  // by degree
  std::vector<Scalar> scale;         // representative = scale * presentation generator
  MultiCochain product;              // m_2 on classes

  // Class coordinates of a cocycle of A, homogeneous of degree v.  Throws
  // std::invalid_argument when x is not a cocycle.
  Vec classify(int v, const Vec& x) const;
  Vec representative(const Vec& cls) const;
  Vec multiply(const Vec& a, const Vec& b) const;
  // Whether a - b lies in the span of `gens` plus the torsion relations.
  bool congruent(const Vec& a, const Vec& b, const std::vector<Vec>& gens) const;
  // The basis class with the given name, e.g. "[x]".
  HClass named(const std::string& name) const;
  HClass scaled(const HClass& c, const Scalar& s) const;
  std::string describe(const Vec& cls) const;
};

HomologyAlgebra homology_algebra(const StructureFamily& A);

class MasseyUndefined : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MasseyProduct {
  int degree = 0;
  Vec element;                    // one element of the defining set
  Vec cocycle;                    // a cocycle of A representing it
  std::vector<Vec> indeterminacy;  // alpha_1 H + H alpha_3 in `degree`
  bool contains(const HomologyAlgebra& H, const Vec& cls) const;
  bool same_coset(const HomologyAlgebra& H, const MasseyProduct& other) const;
};

// <alpha_1, alpha_2, alpha_3> from cocycles a_i and u_i with
// d(u_i) = (-1)^{1+|a_i|} a_i a_{i+1}, as
// (-1)^{1+|a_1|} a_1 u_2 + (-1)^{1+|u_1|} u_1 a_3.  With `rng`, the
// representatives are moved by random boundaries and the u_i by random
// cocycles.  Throws MasseyUndefined when a product is nonzero in homology.
MasseyProduct massey_triple(const HomologyAlgebra& H, const HClass& a1, const HClass& a2, const HClass& a3,
                            std::mt19937* rng = nullptr);

struct MinimalModel {
  HomologyAlgebra homology;
  StructureFamily structure;  // on homology.module, m_1 = 0
  MorphismFamily morphism;    // H -> A, f_1 = representatives
  int max_arity = 0;
  bool total = false;
};

// Kadeishvili's construction, arity by arity: m_n and f_n solve the
// morphism equation given the lower terms.  Needs field coefficients.
MinimalModel transfer_minimal_model(const StructureFamily& A, std::optional<int> max_arity = {});

// Whether f_1 induces the identity H -> H(A) in the chosen basis.
bool induces_identity(const MinimalModel& M);

// Membership is reported for the quoted sign and for its negative: the
// morphism equation used by the transfer and the convention behind the
// quoted sign can differ by a global sign on m_3.
struct M3Membership {
  Vec signed_m3;  // (-1)^{|a_1|+|a_2|+1} m_3(a_1, a_2, a_3)
  MasseyProduct product;
  bool member = false;
  bool member_negated = false;  // -signed_m3 lies in the product
};
M3Membership m3_membership(const MinimalModel& M, const HClass& a1, const HClass& a2, const HClass& a3);

}  // namespace dainf
