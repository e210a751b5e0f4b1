#include "dainf/bigraded.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace dainf {

BigradedModule::BigradedModule(Ring ring, std::vector<BasisElement> basis,
                               std::optional<std::string> unit)
    : ring_(ring), basis_(std::move(basis)) {
  bool first = true;
  for (size_t i = 0; i < basis_.size(); ++i) {
    const auto& b = basis_[i];
    if (b.name.empty()) throw std::invalid_argument("empty basis name");
    if (b.degree.h < 0)
      throw std::invalid_argument("basis element '" + b.name + "' has negative horizontal degree");
    if (!by_name_.emplace(b.name, int(i)).second)
      throw std::invalid_argument("duplicate basis name '" + b.name + "'");
    slots_[b.degree].push_back(int(i));
    if (first) {
      max_h_ = b.degree.h;
      min_v_ = max_v_ = b.degree.v;
      first = false;
    } else {
      max_h_ = std::max(max_h_, b.degree.h);
      min_v_ = std::min(min_v_, b.degree.v);
      max_v_ = std::max(max_v_, b.degree.v);
    }
  }
  if (unit) {
    int u = index(*unit);
    if (basis_[size_t(u)].degree != Bidegree{0, 0})
      throw std::invalid_argument("unit '" + *unit + "' must sit in bidegree (0,0)");
    unit_ = u;
  }
}

ModulePtr BigradedModule::make(Ring ring, std::vector<BasisElement> basis,
                               std::optional<std::string> unit) {
  return std::make_shared<const BigradedModule>(ring, std::move(basis), std::move(unit));
}

std::optional<int> BigradedModule::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

int BigradedModule::index(const std::string& name) const {
  auto i = find(name);
  if (!i) throw std::invalid_argument("unknown basis element '" + name + "'");
  return *i;
}

const std::vector<int>& BigradedModule::slot(const Bidegree& d) const {
  static const std::vector<int> empty;
  auto it = slots_.find(d);
  return it == slots_.end() ? empty : it->second;
}

std::vector<Bidegree> BigradedModule::support() const {
  std::vector<Bidegree> out;
  for (const auto& [d, _] : slots_) out.push_back(d);
  return out;
}

bool BigradedModule::same_shape(const BigradedModule& o) const {
  if (!(ring_ == o.ring_) || basis_.size() != o.basis_.size() || unit_ != o.unit_) return false;
  for (size_t i = 0; i < basis_.size(); ++i)
    if (basis_[i].name != o.basis_[i].name || basis_[i].degree != o.basis_[i].degree) return false;
  return true;
}

Bidegree tuple_degree(const BigradedModule& A, const Tuple& t) {
  Bidegree d{0, 0};
  for (int x : t) d = d + A.degree(x);
  return d;
}

bool tuple_has_unit(const BigradedModule& A, const Tuple& t) {
  auto u = A.unit();
  return u && std::find(t.begin(), t.end(), *u) != t.end();
}

std::string tuple_names(const BigradedModule& A, const Tuple& t) {
  std::string s;
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) s += ' ';
    s += A.name(t[i]);
  }
  return s;
}

std::vector<Tuple> tensor_tuples(const BigradedModule& A, int n, bool normalized) {
  if (n < 0) throw std::invalid_argument("tensor power needs n >= 0");
  if (n == 0) return {Tuple{}};
  std::vector<int> factors;
  for (int i = 0; i < int(A.size()); ++i)
    if (!(normalized && A.unit() == i)) factors.push_back(i);
  std::vector<Tuple> out;
  if (factors.empty()) return out;
  Tuple cur(size_t(n), 0);
  std::vector<size_t> pos(size_t(n), 0);
  for (;;) {
    for (int a = 0; a < n; ++a) cur[size_t(a)] = factors[pos[size_t(a)]];
    out.push_back(cur);
    int a = n - 1;
    while (a >= 0 && ++pos[size_t(a)] == factors.size()) pos[size_t(a--)] = 0;
    if (a < 0) break;
  }
  return out;
}

std::map<Bidegree, std::vector<Tuple>> tensor_tuples_by_degree(const BigradedModule& A, int n,
                                                               bool normalized) {
  std::map<Bidegree, std::vector<Tuple>> out;
  for (auto& t : tensor_tuples(A, n, normalized)) out[tuple_degree(A, t)].push_back(std::move(t));
  return out;
}

ModulePtr tensor_power(const BigradedModule& A, int n) {
  std::vector<BasisElement> basis;
  for (const auto& t : tensor_tuples(A, n)) {
    std::string name;
    for (size_t i = 0; i < t.size(); ++i) {
      if (i) name += '|';
      name += A.name(t[i]);
    }
    basis.push_back({name, tuple_degree(A, t)});
  }
  return BigradedModule::make(A.ring(), std::move(basis));
}

namespace {
ModulePtr shifted(const BigradedModule& A, int dv) {
  std::vector<BasisElement> basis = A.basis();
  for (auto& b : basis) b.degree.v += dv;
  // The unit no longer sits in (0,0) after a shift; it is not carried over.
  return BigradedModule::make(A.ring(), std::move(basis));
}
}  // namespace

ModulePtr shift_module(const BigradedModule& A) { return shifted(A, -1); }
ModulePtr unshift_module(const BigradedModule& A) { return shifted(A, +1); }

GradedMap::GradedMap(ModulePtr source, ModulePtr target, Bidegree bidegree)
    : source_(std::move(source)), target_(std::move(target)), bidegree_(bidegree) {
  if (!(source_->ring() == target_->ring()))
    throw std::invalid_argument("graded map between modules over different rings");
}

GradedMap GradedMap::identity(ModulePtr A) {
  GradedMap g(A, A, {0, 0});
  for (int i = 0; i < int(A->size()); ++i) g.set_image(i, Vec{{i, Scalar(1)}});
  return g;
}

GradedMap GradedMap::suspension(ModulePtr A, ModulePtr SA) {
  GradedMap g(A, SA, {0, -1});
  for (int i = 0; i < int(A->size()); ++i) g.set_image(i, Vec{{i, Scalar(1)}});
  return g;
}

GradedMap GradedMap::desuspension(ModulePtr SA, ModulePtr A) {
  GradedMap g(SA, A, {0, 1});
  for (int i = 0; i < int(SA->size()); ++i) g.set_image(i, Vec{{i, Scalar(1)}});
  return g;
}

void GradedMap::set_image(int src, const Vec& image) {
  Bidegree d = source_->degree(src);
  Bidegree want{d.h - bidegree_.h, d.v + bidegree_.v};
  Vec clean;
  for (const auto& [y, c] : image) {
    Scalar n = target_->ring().normalize(c);
    if (n == 0) continue;
    if (target_->degree(y) != want)
      throw std::invalid_argument("image of '" + source_->name(src) + "' contains '" +
                                  target_->name(y) + "' of the wrong bidegree");
    clean[y] = n;
  }
  if (clean.empty())
    images_.erase(src);
  else
    images_[src] = std::move(clean);
}

const Vec& GradedMap::image(int src) const {
  static const Vec empty;
  auto it = images_.find(src);
  return it == images_.end() ? empty : it->second;
}

Vec GradedMap::apply(const Vec& x) const {
  Vec out;
  for (const auto& [i, c] : x) add_scaled(out, image(i), c, target_->ring());
  return out;
}

GradedMap GradedMap::compose(const GradedMap& g) const {
  if (g.target_.get() != source_.get() && !g.target_->same_shape(*source_))
    throw std::invalid_argument("compose: module mismatch");
  GradedMap out(g.source_, target_, bidegree_ + g.bidegree_);
  for (const auto& [i, v] : g.images_) out.set_image(i, apply(v));
  return out;
}

bool GradedMap::is_zero() const { return images_.empty(); }

bool operator==(const GradedMap& a, const GradedMap& b) {
  return a.bidegree_ == b.bidegree_ && a.images_ == b.images_;
}

TensorVec evaluate_tensor_map(const std::vector<const GradedMap*>& fs, const Tuple& x) {
  if (fs.size() != x.size()) throw std::invalid_argument("evaluate_tensor_map: arity mismatch");
  TensorVec acc;
  if (fs.empty()) return acc;
  const Ring& R = fs[0]->target()->ring();
  long exponent = 0;
  for (size_t b = 0; b < fs.size(); ++b)
    for (size_t a = 0; a < b; ++a)
      exponent += koszul_parity(fs[b]->bidegree(), fs[a]->source()->degree(x[a]));
  acc[Tuple{}] = Scalar(sign_of(exponent));
  for (size_t a = 0; a < fs.size(); ++a) {
    const Vec& img = fs[a]->image(x[a]);
    TensorVec next;
    for (const auto& [t, c] : acc)
      for (const auto& [y, d] : img) {
        Tuple t2 = t;
        t2.push_back(y);
        next[t2] = R.normalize(c * d);
      }
    acc = std::move(next);
    if (acc.empty()) break;
  }
  return acc;
}

void add_scaled(Vec& into, const Vec& v, const Scalar& c, const Ring& R) {
  if (c == 0) return;
  for (const auto& [i, x] : v) {
    Scalar n = R.normalize(into[i] + c * x);
    if (n == 0)
      into.erase(i);
    else
      into[i] = n;
  }
}

void add_scaled(TensorVec& into, const TensorVec& v, const Scalar& c, const Ring& R) {
  if (c == 0) return;
  for (const auto& [t, x] : v) {
    Scalar n = R.normalize(into[t] + c * x);
    if (n == 0)
      into.erase(t);
    else
      into[t] = n;
  }
}

namespace {
long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
}  // namespace

std::optional<int> arity_bound(const BigradedModule& src, const BigradedModule& tgt, int alpha,
                               bool normalized, bool any_k) {
  if (tgt.size() == 0) return 0;
  bool any = false;
  int c1 = 0, c2 = 0, c3 = 0;
  for (int x = 0; x < int(src.size()); ++x) {
    if (normalized && src.unit() == x) continue;
    Bidegree d = src.degree(x);
    int a = d.v - 1, b = d.v - 1 - d.h;
    if (!any) {
      c1 = a;
      c2 = c3 = b;
      any = true;
    } else {
      c1 = std::max(c1, a);
      c2 = std::min(c2, b);
      c3 = std::max(c3, b);
    }
  }
  if (!any) return 0;
  // Output vertical degree is sum(v_a - 1) + alpha - k.  The target forces
  // sum(h_a) - H <= k <= sum(h_a) with H its top horizontal degree; without
  // `any_k` also k >= 0.
  std::optional<int> bound;
  auto take = [&](long n) {
    int nb = int(std::max(0L, n));
    bound = bound ? std::min(*bound, nb) : nb;
  };
  if (!any_k && c1 < 0) take(floor_div(long(alpha) - tgt.min_vertical(), -c1));
  if (c3 < 0) take(floor_div(long(alpha) + tgt.max_horizontal() - tgt.min_vertical(), -c3));
  if (c2 > 0) take(floor_div(long(tgt.max_vertical()) - alpha, c2));
  return bound;
}

std::map<Bidegree, std::vector<Tuple>> tensor_tuples_of_degrees(const BigradedModule& A, int n, bool normalized,
                                                                const std::set<Bidegree>& wanted) {
  std::map<Bidegree, std::vector<Tuple>> out;
  if (n < 0 || wanted.empty()) return out;
  std::vector<int> factors;
  for (int i = 0; i < int(A.size()); ++i)
    if (!(normalized && A.unit() == i)) factors.push_back(i);
  std::set<Bidegree> degrees;
  for (int x : factors) degrees.insert(A.degree(x));
  // reach[r]: degree sums of r factors.
  std::vector<std::set<Bidegree>> reach(size_t(n) + 1);
  reach[0].insert(Bidegree{0, 0});
  for (int r = 1; r <= n; ++r)
    for (const auto& s : reach[size_t(r - 1)])
      for (const auto& d : degrees) reach[size_t(r)].insert(s + d);
  auto viable = [&](const Bidegree& prefix, int remaining) {
    for (const auto& w : wanted)
      if (reach[size_t(remaining)].count(Bidegree{w.h - prefix.h, w.v - prefix.v})) return true;
    return false;
  };
  Tuple cur;
  std::function<void(Bidegree)> walk = [&](Bidegree prefix) {
    int remaining = n - int(cur.size());
    if (remaining == 0) {
      out[prefix].push_back(cur);
      return;
    }
    for (int x : factors) {
      Bidegree next = prefix + A.degree(x);
      if (!viable(next, remaining - 1)) continue;
      cur.push_back(x);
      walk(next);
      cur.pop_back();
    }
  };
  if (viable(Bidegree{0, 0}, n)) walk(Bidegree{0, 0});
  return out;
}

}  // namespace dainf
