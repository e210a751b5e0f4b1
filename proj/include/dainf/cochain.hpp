#pragma once

// Multilinear cochains C^{n,i}_k(A,B) and the sign calculus on them.
//
// A cochain of shape (n,k,i) sends an n-tuple of total bidegree (u,v) to an
// element of bidegree (u-k, v+i).  As a map it has Koszul bidegree (k,i); its
// total degree is n+i+k.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dainf/bigraded.hpp"

namespace dainf {

struct Shape {
  int n = 1;  // arity
  int k = 0;  // horizontal shift
  int i = 0;  // vertical shift
  int total() const { return n + i + k; }
  Bidegree map_bidegree() const { return {k, i}; }
  auto operator<=>(const Shape&) const = default;
};
std::string to_string(const Shape& s);

class MultiCochain {
 public:
  MultiCochain(ModulePtr source, ModulePtr target, Shape shape);
  MultiCochain(ModulePtr A, Shape shape) : MultiCochain(A, A, shape) {}

  const ModulePtr& source() const { return source_; }
  const ModulePtr& target() const { return target_; }
  const Ring& ring() const { return source_->ring(); }
  const Shape& shape() const { return shape_; }
  int arity() const { return shape_.n; }
  int hshift() const { return shape_.k; }
  int vshift() const { return shape_.i; }

  // Value on a basis tuple.  Throws std::invalid_argument on degree errors.
  void set(const Tuple& x, const Vec& value);
  void add(const Tuple& x, const Vec& value, const Scalar& coef = Scalar(1));
  const Vec& at(const Tuple& x) const;
  const std::map<Tuple, Vec>& entries() const { return entries_; }

  // The bidegree a value on x must have, or nullopt if it would be negative
  // horizontally (the value is then forced to vanish).
  std::optional<Bidegree> target_degree(const Tuple& x) const;

  bool is_zero() const { return entries_.empty(); }
  // Vanishes on every tuple containing the unit of the source.
  bool is_normalized() const;

  MultiCochain operator+(const MultiCochain& o) const;
  MultiCochain operator-(const MultiCochain& o) const;
  MultiCochain operator-() const;
  MultiCochain scaled(const Scalar& c) const;
  friend bool operator==(const MultiCochain& a, const MultiCochain& b);

  std::string describe() const;

 private:
  void check_compatible(const MultiCochain& o) const;
  ModulePtr source_, target_;
  Shape shape_;
  std::map<Tuple, Vec> entries_;
};

bool same_module(const ModulePtr& a, const ModulePtr& b);

// f^# = (-1)^k f.
MultiCochain hash(const MultiCochain& f);

// <f,g> = (n+i-1)(m+j-1) + kl mod 2.
int koszul_pairing(const Shape& f, const Shape& g);
inline int koszul_pairing(const MultiCochain& f, const MultiCochain& g) {
  return koszul_pairing(f.shape(), g.shape());
}

// f(1^v (x) g (x) 1^{n-v-1}) with only the element-level Koszul sign of g
// passing the first v inputs.  Needs g.source == g.target == f.source.
MultiCochain insert_at(const MultiCochain& f, const MultiCochain& g, int v);

// Exponent (m-1)(n-1) + v(m-1) + j(n-1) of the composition product.
long composition_sign_exponent(const Shape& f, const Shape& g, int v);

// The composition product f o g.
MultiCochain compose(const MultiCochain& f, const MultiCochain& g);
// [f,g] = f o g - (-1)^{<f,g>} g o f.
MultiCochain bracket(const MultiCochain& f, const MultiCochain& g);

// sigma(f) = (-1)^{n+i+k-1} S o f o (S^{-1})^{(x)n} on the shifted module SA.
MultiCochain sigma(const MultiCochain& f, const ModulePtr& SA);
// sigma^{-1}(F) = (-1)^{j+l+C(m,2)} S^{-1} o F o S^{(x)m} on A.
MultiCochain sigma_inv(const MultiCochain& F, const ModulePtr& A);
// Sum over v of plain insertions F(1^v (x) G (x) 1).
MultiCochain odot(const MultiCochain& F, const MultiCochain& G);
// f o g computed as sigma^{-1}(sigma f odot sigma g).
MultiCochain compose_via_shift(const MultiCochain& f, const MultiCochain& g);

// outer(inner_1 (x) ... (x) inner_r), inners A -> B in consecutive blocks,
// with element-level Koszul signs.  Shape: arity sum n_r, shifts add.
MultiCochain compose_tensor(const MultiCochain& outer, const std::vector<const MultiCochain*>& inners);

// Sign exponent of sigma^{-1}(sigma(f)(1^v (x) sigma(g) (x) 1)) relative to
// f(1^v (x) g (x) 1), computed by composing suspensions step by step on
// symbolic elements.  Throws std::logic_error if the ratio depends on the
// element degrees.
int brute_force_sign(int n, int m, int v, int i, int j, int k, int l);

// A finite sum of cochains of different shapes between fixed modules.
class CochainSum {
 public:
  CochainSum(ModulePtr source, ModulePtr target) : source_(source), target_(target) {}
  explicit CochainSum(ModulePtr A) : CochainSum(A, A) {}

  const ModulePtr& source() const { return source_; }
  const ModulePtr& target() const { return target_; }
  void add(const MultiCochain& f);
  const std::map<Shape, MultiCochain>& terms() const { return terms_; }
  const MultiCochain* find(const Shape& s) const;
  MultiCochain component(const Shape& s) const;  // zero if absent
  bool is_zero() const { return terms_.empty(); }
  CochainSum operator+(const CochainSum& o) const;
  CochainSum operator-(const CochainSum& o) const;
  CochainSum scaled(const Scalar& c) const;
  friend bool operator==(const CochainSum& a, const CochainSum& b) { return a.terms_ == b.terms_; }

 private:
  ModulePtr source_, target_;
  std::map<Shape, MultiCochain> terms_;
};

CochainSum hash(const CochainSum& f);
CochainSum compose(const CochainSum& f, const CochainSum& g);
CochainSum bracket(const CochainSum& f, const CochainSum& g);

}  // namespace dainf
