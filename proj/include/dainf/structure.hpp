#pragma once

// Derived A-infinity structures and morphisms: the defining equations,
// strict unitality, orthogonality and E_2-pages.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dainf/cochain.hpp"
#include "dainf/matrix.hpp"

namespace dainf {

using Index2 = std::pair<int, int>;  // (horizontal index, arity)

// m_{ij} of bidegree (i, 2-(i+j)), i.e. a cochain of shape (j, i, 2-i-j).
inline Shape structure_shape(int i, int j) { return Shape{j, i, 2 - i - j}; }
// f_{st} of bidegree (s, 1-(s+t)), i.e. a cochain of shape (t, s, 1-s-t).
inline Shape morphism_shape(int s, int t) { return Shape{t, s, 1 - s - t}; }

// Limits on which equations are examined.  Unset fields mean "as far as
// the data reaches".  vmin/vmax restrict the vertical degree of the input
// tuples on which equations are evaluated.
struct Window {
  std::optional<int> max_u;
  std::optional<int> vmin, vmax;
  std::optional<int> max_arity;
};

class StructureFamily {
 public:
  explicit StructureFamily(ModulePtr A) : A_(std::move(A)) {}

  const ModulePtr& module() const { return A_; }
  const Ring& ring() const { return A_->ring(); }

  // Stores m_{ij}; the cochain must have shape (j, i, 2-i-j).
  void set(int i, int j, const MultiCochain& m);
  const MultiCochain* get(int i, int j) const;
  MultiCochain op(int i, int j) const;  // zero if absent
  const std::map<Index2, MultiCochain>& ops() const { return ops_; }

  // Data is only known up to this arity (e.g. a transferred model); unset
  // means every m_{ij} not stored is zero.
  std::optional<int> known_arity;

  bool is_bidga() const;  // support in {(0,1),(1,1),(0,2)}
  int max_i() const;
  int max_j() const;
  // Sum of all m_{ij} as a cochain sum.
  CochainSum total() const;
  CochainSum even_part() const;
  CochainSum odd_part() const;

 private:
  ModulePtr A_;
  std::map<Index2, MultiCochain> ops_;
};

class MorphismFamily {
 public:
  MorphismFamily(ModulePtr source, ModulePtr target) : src_(std::move(source)), tgt_(std::move(target)) {}

  const ModulePtr& source() const { return src_; }
  const ModulePtr& target() const { return tgt_; }
  void set(int s, int t, const MultiCochain& f);
  const MultiCochain* get(int s, int t) const;
  const std::map<Index2, MultiCochain>& maps() const { return maps_; }
  std::optional<int> known_arity;

  static MorphismFamily identity(const ModulePtr& A);

 private:
  ModulePtr src_, tgt_;
  std::map<Index2, MultiCochain> maps_;
};

enum class CellStatus { holds, fails, unchecked };

struct CellReport {
  int u = 0, v = 0;
  CellStatus status = CellStatus::holds;
  std::string witness;  // first offending tuple and value when failing
};

struct EquationReport {
  std::vector<CellReport> cells;
  bool total = false;  // every equation outside `cells` is provably trivial
  bool all_hold() const;
  const CellReport* first_failure() const;
  std::vector<std::string> notes;
};

struct DaInfinityReport : EquationReport {
  bool composite_zero = false;  // m o m^# = 0 (in the examined window)
  bool bracket_zero = false;    // [m, m^#] = 0
  bool cells_match_composite = false;  // each cell equals its m o m^# component
  bool routes_agree() const;
};

// The (u,v) left-hand side of the structure equation as a cochain of shape
// (v, u, 3-u-v).
MultiCochain structure_equation(const StructureFamily& m, int u, int v);
DaInfinityReport check_da_infinity(const StructureFamily& m, const Window& w = {});

struct UnitReport {
  bool ok = true;
  std::vector<std::string> failures;
};
UnitReport check_strict_unit(const StructureFamily& m);
UnitReport check_morphism_unit(const MorphismFamily& f);

// The two readings of the sign exponent epsilon in the morphism equation.
// `grouped` takes q_{j-w} * sum_{s}(p_s + q_s); `split` takes
// q_{j-w} * sum_s p_s + sum_s q_s.
enum class EpsilonReading { grouped, split };
long morphism_epsilon(int u, int j, const std::vector<int>& p, const std::vector<int>& q,
                      EpsilonReading reading);

// Left and right sides of the (u,v) morphism equation, each of shape
// (v, u, 2-u-v).
std::pair<MultiCochain, MultiCochain> morphism_equation(const MorphismFamily& f, const StructureFamily& m,
                                                        const StructureFamily& mbar, int u, int v,
                                                        EpsilonReading reading = EpsilonReading::grouped);
EquationReport check_morphism(const MorphismFamily& f, const StructureFamily& m, const StructureFamily& mbar,
                              const Window& w = {}, EpsilonReading reading = EpsilonReading::grouped);

struct OrthogonalityReport {
  bool even_square_zero = false;
  bool odd_square_zero = false;
  bool orthogonal() const { return even_square_zero && odd_square_zero; }
  std::string witness;
};
OrthogonalityReport is_orthogonal(const StructureFamily& m);

// Matrix of an arity-one cochain from the slot d of its source to the slot
// of its target it lands in.
Matrix arity_one_block(const MultiCochain& f, const Bidegree& d);

struct E2Page {
  std::map<Bidegree, HomologyPresentation> vertical;
  std::map<Bidegree, HomologyPresentation> page;  // horizontal homology of the vertical homology
};
E2Page e2_pages(const StructureFamily& m);

struct E2Decision {
  bool equivalence = true;
  std::map<Bidegree, Matrix> induced;  // class-coordinate matrices per bidegree
  std::string witness;                 // first bidegree where the induced map fails
};
E2Decision is_e2_equivalence(const MultiCochain& f01, const StructureFamily& m, const StructureFamily& mbar);

}  // namespace dainf
