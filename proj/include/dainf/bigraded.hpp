#pragma once

// Finitely supported (N,Z)-bigraded free modules with named bases, graded
// maps, tensor powers, the shift S and Koszul-signed tensor evaluation.
//
// A bidegree is (horizontal, vertical).  A map of bidegree (s,t) sends
// A^v_h to B^{v+t}_{h-s}; passing an element of bidegree (h,v) costs the
// sign (-1)^{hs+vt}.

#include <map>
#include <set>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dainf/coefficients.hpp"

namespace dainf {

struct Bidegree {
  int h = 0;
  int v = 0;
  Bidegree operator+(const Bidegree& o) const { return {h + o.h, v + o.v}; }
  auto operator<=>(const Bidegree&) const = default;
};

// Parity of the Koszul exponent hs + vt for a map of bidegree (s,t) passing
// an element of bidegree (h,v).
inline int koszul_parity(const Bidegree& map, const Bidegree& elem) {
  long e = long(elem.h) * map.h + long(elem.v) * map.v;
  return int(((e % 2) + 2) % 2);
}
inline int sign_of(long exponent) { return (exponent % 2 == 0) ? 1 : -1; }

using Tuple = std::vector<int>;
// Sparse vector over a module basis: basis index -> coefficient.
using Vec = std::map<int, Scalar>;
// Sparse element of a tensor power: tuple -> coefficient.
using TensorVec = std::map<Tuple, Scalar>;

struct BasisElement {
  std::string name;
  Bidegree degree;
};

class BigradedModule;
using ModulePtr = std::shared_ptr<const BigradedModule>;

class BigradedModule {
 public:
  // Throws std::invalid_argument on duplicate names, negative horizontal
  // degrees, or a unit outside bidegree (0,0).
  BigradedModule(Ring ring, std::vector<BasisElement> basis, std::optional<std::string> unit = {});
  static ModulePtr make(Ring ring, std::vector<BasisElement> basis,
                        std::optional<std::string> unit = {});

  const Ring& ring() const { return ring_; }
  size_t size() const { return basis_.size(); }
  const BasisElement& at(int idx) const { return basis_.at(size_t(idx)); }
  const std::vector<BasisElement>& basis() const { return basis_; }
  Bidegree degree(int idx) const { return basis_.at(size_t(idx)).degree; }
  const std::string& name(int idx) const { return basis_.at(size_t(idx)).name; }
  std::optional<int> find(const std::string& name) const;
  int index(const std::string& name) const;  // throws if unknown
  std::optional<int> unit() const { return unit_; }

  // Basis indices in a bidegree, ascending.
  const std::vector<int>& slot(const Bidegree& d) const;
  std::vector<Bidegree> support() const;

  int max_horizontal() const { return max_h_; }
  int min_vertical() const { return min_v_; }
  int max_vertical() const { return max_v_; }

  // Same basis names and order, same ring and unit.
  bool same_shape(const BigradedModule& other) const;

 private:
  Ring ring_;
  std::vector<BasisElement> basis_;
  std::optional<int> unit_;
  std::map<std::string, int> by_name_;
  std::map<Bidegree, std::vector<int>> slots_;
  int max_h_ = 0, min_v_ = 0, max_v_ = 0;
};

Bidegree tuple_degree(const BigradedModule& A, const Tuple& t);
bool tuple_has_unit(const BigradedModule& A, const Tuple& t);
std::string tuple_names(const BigradedModule& A, const Tuple& t);

// All n-tuples of basis indices in lexicographic order; with
// `normalized` the unit is excluded from every factor.
std::vector<Tuple> tensor_tuples(const BigradedModule& A, int n, bool normalized = false);
// The same tuples grouped by total bidegree.
std::map<Bidegree, std::vector<Tuple>> tensor_tuples_by_degree(const BigradedModule& A, int n,
                                                               bool normalized = false);

// A^{(x)n} as a module; basis names are factor names joined by '|'.
ModulePtr tensor_power(const BigradedModule& A, int n);

// S(A): same names, vertical degrees lowered by one, so S(A)^v_u = A^{v+1}_u.
ModulePtr shift_module(const BigradedModule& A);
// S^{-1}(A): vertical degrees raised by one.
ModulePtr unshift_module(const BigradedModule& A);

// Homogeneous map of bidegree (s,t), stored by source basis element.
class GradedMap {
 public:
  GradedMap(ModulePtr source, ModulePtr target, Bidegree bidegree);
  static GradedMap identity(ModulePtr A);
  // The suspension S: A -> S(A) of bidegree (0,-1), sending x to x.
  static GradedMap suspension(ModulePtr A, ModulePtr SA);
  // Its inverse S(A) -> A of bidegree (0,1).
  static GradedMap desuspension(ModulePtr SA, ModulePtr A);

  const ModulePtr& source() const { return source_; }
  const ModulePtr& target() const { return target_; }
  Bidegree bidegree() const { return bidegree_; }

  // Throws std::invalid_argument if some target term has the wrong bidegree.
  // Images landing in negative horizontal degree must be zero.
  void set_image(int src, const Vec& image);
  const Vec& image(int src) const;
  Vec apply(const Vec& x) const;

  // (this o g), bidegrees add.
  GradedMap compose(const GradedMap& g) const;
  bool is_zero() const;
  friend bool operator==(const GradedMap& a, const GradedMap& b);

 private:
  ModulePtr source_, target_;
  Bidegree bidegree_;
  std::map<int, Vec> images_;
};

// (f_1 (x) ... (x) f_n)(x_1 (x) ... (x) x_n) with Koszul signs: f_b passes
// x_a for every a < b.
TensorVec evaluate_tensor_map(const std::vector<const GradedMap*>& fs, const Tuple& x);

void add_scaled(Vec& into, const Vec& v, const Scalar& c, const Ring& R);
void add_scaled(TensorVec& into, const TensorVec& v, const Scalar& c, const Ring& R);

// Largest arity n for which an n-ary cochain with vertical shift alpha - n - k
// can be nonzero on normalized (or full) tuples, for k >= 0 or, with
// `any_k`, every k the target allows.  nullopt when no bound follows from
// the degree support.
std::optional<int> arity_bound(const BigradedModule& source, const BigradedModule& target, int alpha,
                               bool normalized = true, bool any_k = false);

// n-tuples grouped by total bidegree, keeping only the degrees in `wanted`.
// Prefixes that cannot reach a wanted degree are pruned.
std::map<Bidegree, std::vector<Tuple>> tensor_tuples_of_degrees(const BigradedModule& A, int n, bool normalized,
                                                                const std::set<Bidegree>& wanted);
inline std::optional<int> arity_bound(const BigradedModule& A, int alpha, bool normalized = true) {
  return arity_bound(A, A, alpha, normalized);
}

}  // namespace dainf
