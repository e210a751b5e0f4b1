#pragma once

// Hochschild complexes and their cohomology: the classical A-infinity
// complex, the dga bicomplex, orthogonal derived structures, bidgas with
// bimodule coefficients and graded algebras; plus the arity filtration.

#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "dainf/structure.hpp"

namespace dainf {

enum class HHFlavor {
  classical,       // D = [m, -] for a structure in horizontal degree 0; cells by total degree
  dga_bicomplex,   // the total complex of d^v = [m_01,-], d^h = [m_02,-]; cells by total degree
  derived,         // D(f) = [m_even, f^#] + [m_odd, f]; cells by total degree
  bidga,           // bidga with m_01 = 0; cells (s, r) with s = n + k, r = vertical shift
  graded_algebra,  // D = [m_02, -] only; cells (n, i)
};

std::string to_string(HHFlavor f);
std::optional<HHFlavor> parse_flavor(const std::string& s);

class WindowInsufficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bimodule over a bidga with m_01 = 0.  Actions are stored on basis
// pairs; bar_m11 is the horizontal differential of M.
struct Bimodule {
  ModulePtr module;
  std::map<std::pair<int, int>, Vec> left;   // (a, x) -> a . x
  std::map<std::pair<int, int>, Vec> right;  // (x, a) -> x . a
  MultiCochain bar_m11;

  explicit Bimodule(ModulePtr M) : module(M), bar_m11(M, Shape{1, 1, 0}) {}

  Vec act_left(int a, const Vec& x, const Ring& R) const;
  Vec act_right(const Vec& x, int a, const Ring& R) const;
};

// A over itself.
Bimodule regular_bimodule(const StructureFamily& A);
// A' as an A-bimodule through the bidga map f_01 : A -> A'.
Bimodule bimodule_along(const StructureFamily& A, const StructureFamily& Aprime, const MultiCochain& f01);
// Associativity of both actions, their compatibility, and the Leibniz
// rule for bar_m11 against both actions.  Returns the first violation.
std::optional<std::string> check_bimodule(const StructureFamily& A, const Bimodule& M);

// The five-term differential on C(A, M).
CochainSum bimodule_differential(const StructureFamily& A, const Bimodule& M, const MultiCochain& f);

// D(f) = [m_even, f^#] + [m_odd, f].  Throws if m is not orthogonal.
CochainSum derived_differential(const StructureFamily& m, const CochainSum& f);
// The two pieces of the dga bicomplex.
CochainSum vertical_differential(const StructureFamily& m, const CochainSum& f);
CochainSum horizontal_differential(const StructureFamily& m, const CochainSum& f);
// The classical expansion of [m_02, f] for an associative multiplication.
MultiCochain explicit_algebra_differential(const MultiCochain& mu, const MultiCochain& f);

struct HochschildOptions {
  bool normalized = true;
  std::optional<int> max_arity;  // cap on arities when degrees do not bound them
};

// Degree of a cell: total degree for the one-graded flavors, (s, r) or
// (n, i) for the bigraded ones.
struct HHDegree {
  int a = 0, b = 0;
  auto operator<=>(const HHDegree&) const = default;
};

struct HHGroup {
  HHDegree degree;
  HomologyPresentation homology;
  std::vector<CochainSum> representatives;  // one per generator of `homology`
  bool total = true;   // every arity contributing to the cell was included
  size_t cochains = 0;  // rank of the cochain module in this cell
};

class HochschildComplex {
 public:
  HochschildComplex(StructureFamily m, HHFlavor flavor, HochschildOptions opts = {});
  // Bidga flavor with coefficients in M.
  HochschildComplex(StructureFamily m, Bimodule M, HochschildOptions opts = {});

  HHFlavor flavor() const { return flavor_; }
  const StructureFamily& structure() const { return m_; }
  const ModulePtr& target() const;

  HHDegree next(HHDegree d) const;
  HHDegree previous(HHDegree d) const;
  // Shapes spanning the cell, and whether the arity range is complete.
  std::vector<Shape> shapes(HHDegree d, bool* complete = nullptr) const;
  // Coordinates of the cochains in a cell.
  struct Basis {
    std::vector<Shape> shapes;
    std::vector<std::tuple<Shape, Tuple, int>> elements;
    std::map<std::tuple<Shape, Tuple, int>, size_t> index;
    bool complete = true;
  };
  Basis basis(HHDegree d) const;
  Basis basis_for(const std::vector<Shape>& shapes) const;
  DenseVec coordinates(const Basis& B, const CochainSum& f) const;
  CochainSum cochain(const Basis& B, const DenseVec& x) const;

  CochainSum apply(const CochainSum& f) const;
  Matrix differential(HHDegree d) const;  // from cell d to next(d)
  // The differential between arbitrary spans of shapes; components of the
  // image outside `dst` must vanish.
  Matrix matrix(const Basis& src, const Basis& dst) const;
  Matrix matrix(const Basis& src, const Basis& dst, const std::function<CochainSum(const CochainSum&)>& op) const;
  HHGroup cohomology(HHDegree d) const;

  // Whether every cocycle of the cell supported in arities >= k is a
  // coboundary, i.e. F^k vanishes in this degree.  The witness is a
  // cocycle that is not.
  struct FiltrationVanishing {
    bool vanishes = true;
    bool total = true;
    std::optional<CochainSum> witness;
  };
  FiltrationVanishing filtration_vanishes(HHDegree d, int k) const;

 private:
  StructureFamily m_;
  HHFlavor flavor_;
  HochschildOptions opts_;
  std::optional<Bimodule> coeffs_;
};

// A cocycle with the smallest arity in its support.
struct FilteredClass {
  HHDegree degree;
  CochainSum representative;
  int level = 0;
};
FilteredClass filtered_class(HHDegree d, const CochainSum& cocycle);

// Decides whether a cocycle is cohomologous to one supported in arities
// >= k, returning such a representative when it is.
struct FiltrationDecision {
  bool member = false;
  std::optional<FilteredClass> representative;
  std::string reason;
};
FiltrationDecision filtration_membership(const HochschildComplex& C, const FilteredClass& cls, int k);

std::string describe(const CochainSum& f);

}  // namespace dainf
