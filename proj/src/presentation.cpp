#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "dainf/workbench.hpp"

namespace dainf {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      bare_(message) {}

const NamedAlgebra* Presentation::find_algebra(const std::string& name) const {
  for (const auto& a : algebras)
    if (a.name == name) return &a;
  return nullptr;
}

const NamedMap* Presentation::find_map(const std::string& name) const {
  for (const auto& m : maps)
    if (m.name == name) return &m;
  return nullptr;
}

const NamedAlgebra& Presentation::algebra(const std::string& name) const {
  if (const auto* a = find_algebra(name)) return *a;
  throw std::invalid_argument("no algebra named " + name);
}

const NamedMap& Presentation::map(const std::string& name) const {
  if (const auto* m = find_map(name)) return *m;
  throw std::invalid_argument("no map named " + name);
}

namespace {

struct Token {
  std::string text;
  int column = 1;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({line.substr(i, j - i), int(i) + 1});
    i = j;
  }
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty() || s == "->" || s == ":" || s[0] == '#') return false;
  return s.find('*') == std::string::npos;
}

std::optional<long> parse_long(const std::string& s) {
  if (s.empty()) return std::nullopt;
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return std::nullopt;
  for (size_t k = i; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return std::nullopt;
  try {
    return std::stol(s);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<Scalar> parse_rational(const std::string& s) {
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  if (num.empty()) return std::nullopt;
  size_t i = (num[0] == '-' || num[0] == '+') ? 1 : 0;
  if (i == num.size()) return std::nullopt;
  for (size_t k = i; k < num.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(num[k]))) return std::nullopt;
  if (num[0] == '+') num = num.substr(1);
  mpz_class n(num), d(1);
  if (slash != std::string::npos) {
    std::string den = s.substr(slash + 1);
    if (den.empty()) return std::nullopt;
    for (char c : den)
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    d = mpz_class(den);
    if (d == 0) return std::nullopt;
  }
  Scalar q(n, d);
  q.canonicalize();
  return q;
}

std::string window_field(const std::optional<int>& x) { return x ? std::to_string(*x) : "*"; }

class Parser {
 public:
  Parser(const std::string& text, std::optional<Ring> ring) : ring_override_(std::move(ring)) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines_.push_back(line);
    }
  }

  Presentation run() {
    Presentation p;
    bool header = false, have_ring = false;
    for (line_no_ = 1; line_no_ <= int(lines_.size()); ++line_no_) {
      auto toks = tokenize(lines_[size_t(line_no_ - 1)]);
      if (toks.empty()) continue;
      const std::string& kw = toks[0].text;
      if (!header) {
        if (kw != "dainf-presentation" || toks.size() != 2 || toks[1].text != "1")
          fail(toks[0], "expected the header 'dainf-presentation 1'");
        header = true;
        continue;
      }
      if (kw == "ring") {
        if (have_ring) fail(toks[0], "ring declared twice");
        if (!p.algebras.empty()) fail(toks[0], "ring must precede the algebras");
        arity(toks, 2);
        try {
          p.ring = Ring::parse(toks[1].text);
        } catch (const std::exception& e) {
          fail(toks[1], e.what());
        }
        if (ring_override_) p.ring = *ring_override_;
        have_ring = true;
      } else if (kw == "window") {
        if (p.window) fail(toks[0], "window declared twice");
        arity(toks, 2);
        p.window = parse_window(toks[1]);
      } else if (kw == "meta") {
        if (toks.size() < 2) fail(toks[0], "meta needs a keyword");
        std::vector<std::string> m;
        for (size_t i = 1; i < toks.size(); ++i) m.push_back(toks[i].text);
        p.meta.push_back(std::move(m));
      } else if (kw == "algebra") {
        if (!have_ring) fail(toks[0], "ring must be declared before the first algebra");
        arity(toks, 2);
        name_token(toks[1]);
        if (p.find_algebra(toks[1].text) || p.find_map(toks[1].text)) fail(toks[1], "name already used");
        p.algebras.push_back(algebra_block(toks[1].text, p.ring));
      } else if (kw == "map") {
        arity(toks, 4);
        name_token(toks[1]);
        if (p.find_algebra(toks[1].text) || p.find_map(toks[1].text)) fail(toks[1], "name already used");
        const NamedAlgebra* s = p.find_algebra(toks[2].text);
        if (!s) fail(toks[2], "unknown algebra " + toks[2].text);
        const NamedAlgebra* t = p.find_algebra(toks[3].text);
        if (!t) fail(toks[3], "unknown algebra " + toks[3].text);
        p.maps.push_back(map_block(toks[1].text, *s, *t));
      } else {
        fail(toks[0], "unknown keyword " + kw);
      }
    }
    if (!header) throw ParseError(1, 1, "empty input");
    if (!have_ring) throw ParseError(int(lines_.size()), 1, "no ring declared");
    return p;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(line_no_, t.column, msg); }

  void arity(const std::vector<Token>& toks, size_t n) const {
    if (toks.size() != n)
      fail(toks.size() > n ? toks[n] : toks.back(),
           toks[0].text + " takes " + std::to_string(n - 1) + " argument" + (n == 2 ? "" : "s"));
  }

  void name_token(const Token& t) const {
    if (!valid_name(t.text)) fail(t, "invalid name " + t.text);
  }

  long integer(const Token& t) const {
    auto v = parse_long(t.text);
    if (!v) fail(t, "expected an integer, got " + t.text);
    return *v;
  }

  Window parse_window(const Token& t) const {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : t.text) {
      if (c == ':') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    if (parts.size() != 3 && parts.size() != 4) fail(t, "window is U:VMIN:VMAX or U:VMIN:VMAX:ARITY");
    auto field = [&](const std::string& s) -> std::optional<int> {
      if (s == "*") return std::nullopt;
      auto v = parse_long(s);
      if (!v) fail(t, "bad window field " + s);
      return int(*v);
    };
    Window w;
    w.max_u = field(parts[0]);
    w.vmin = field(parts[1]);
    w.vmax = field(parts[2]);
    if (parts.size() == 4) w.max_arity = field(parts[3]);
    return w;
  }

  // Reads the lines of a block up to `end`, returning them tokenized with
  // their line numbers.
  std::vector<std::pair<int, std::vector<Token>>> block_lines(const Token& opener) {
    std::vector<std::pair<int, std::vector<Token>>> out;
    int start = line_no_;
    for (++line_no_; line_no_ <= int(lines_.size()); ++line_no_) {
      auto toks = tokenize(lines_[size_t(line_no_ - 1)]);
      if (toks.empty()) continue;
      if (toks[0].text == "end") {
        arity(toks, 1);
        return out;
      }
      out.emplace_back(line_no_, std::move(toks));
    }
    line_no_ = start;
    fail(opener, "block is not closed by 'end'");
  }

  // `KW A B : x_1 ... x_n -> H V : c*y ...`, returning (A, B), the inputs,
  // the declared output bidegree and the terms.
  struct Entry {
    long a = 0, b = 0;
    Tuple in;
    Bidegree out;
    Vec value;
  };

  Entry entry(const std::vector<Token>& toks, const BigradedModule& src, const BigradedModule& tgt,
              const Ring& R) const {
    if (toks.size() < 4 || toks[3].text != ":") fail(toks.size() > 3 ? toks[3] : toks.back(), "expected ':' after the indices");
    Entry e;
    e.a = integer(toks[1]);
    e.b = integer(toks[2]);
    size_t i = 4;
    for (; i < toks.size() && toks[i].text != "->"; ++i) {
      auto idx = src.find(toks[i].text);
      if (!idx) fail(toks[i], "unknown basis element " + toks[i].text);
      e.in.push_back(*idx);
    }
    if (i == toks.size()) fail(toks.back(), "expected '->'");
    if (i + 3 >= toks.size() || toks[i + 3].text != ":")
      fail(toks[std::min(i + 3, toks.size() - 1)], "expected 'H V :' after '->'");
    e.out = {int(integer(toks[i + 1])), int(integer(toks[i + 2]))};
    if (i + 4 == toks.size()) fail(toks.back(), "expected at least one term c*name");
    for (size_t k = i + 4; k < toks.size(); ++k) {
      const Token& t = toks[k];
      auto star = t.text.find('*');
      if (star == std::string::npos) fail(t, "expected a term c*name, got " + t.text);
      auto c = parse_rational(t.text.substr(0, star));
      if (!c) fail(t, "bad coefficient in " + t.text);
      std::string name = t.text.substr(star + 1);
      auto y = tgt.find(name);
      if (!y) fail(t, "unknown basis element " + name);
      if (tgt.degree(*y) != e.out)
        fail(t, name + " has bidegree (" + std::to_string(tgt.degree(*y).h) + "," +
                    std::to_string(tgt.degree(*y).v) + "), not the declared output bidegree");
      if (e.value.count(*y)) fail(t, name + " appears twice");
      Scalar v;
      try {
        v = R.normalize(*c);
      } catch (const std::exception& ex) {
        fail(t, ex.what());
      }
      if (v != 0) e.value[*y] = v;
      else e.value[*y];  // marks the name as seen
    }
    for (auto it = e.value.begin(); it != e.value.end();) it = it->second == 0 ? e.value.erase(it) : std::next(it);
    return e;
  }

  // Checks the declared bidegree against the shape and stores the value.
  void store(std::map<Index2, MultiCochain>& pending, std::set<std::pair<Index2, Tuple>>& seen,
             const Entry& e, Shape shape, const ModulePtr& src, const ModulePtr& tgt, const std::vector<Token>& toks) const {
    Index2 key{int(e.a), int(e.b)};
    if (!seen.insert({key, e.in}).second) fail(toks[4 < toks.size() ? 4 : 0], "entry given twice");
    auto it = pending.find(key);
    if (it == pending.end()) it = pending.emplace(key, MultiCochain(src, tgt, shape)).first;
    auto d = it->second.target_degree(e.in);
    Bidegree din = tuple_degree(*src, e.in);
    if (!d)
      fail(toks[0], "outputs on " + tuple_names(*src, e.in) + " would have negative horizontal degree");
    if (*d != e.out)
      fail(toks[0], "declared output bidegree (" + std::to_string(e.out.h) + "," + std::to_string(e.out.v) +
                        ") but inputs of bidegree (" + std::to_string(din.h) + "," + std::to_string(din.v) +
                        ") require (" + std::to_string(d->h) + "," + std::to_string(d->v) + ")");
    it->second.set(e.in, e.value);
  }

  std::optional<int> known_arity(const std::vector<Token>& toks, std::optional<int> current) const {
    arity(toks, 2);
    if (current) fail(toks[0], "known-arity given twice");
    long n = integer(toks[1]);
    if (n < 1) fail(toks[1], "known-arity must be positive");
    return int(n);
  }

  NamedAlgebra algebra_block(const std::string& name, const Ring& R) {
    Token opener{"algebra", 1};
    int opener_line = line_no_;
    auto body = block_lines(opener);
    int end_line = line_no_;
    std::vector<BasisElement> basis;
    std::optional<std::string> unit;
    std::optional<int> known;
    ModulePtr A;
    std::map<Index2, MultiCochain> ops;
    std::set<std::pair<Index2, Tuple>> seen;
    std::optional<StructureFamily> fam;
    auto build = [&](const Token& at) {
      if (A) return;
      try {
        A = BigradedModule::make(R, basis, unit);
      } catch (const std::exception& e) {
        fail(at, e.what());
      }
    };
    for (auto& [ln, toks] : body) {
      line_no_ = ln;
      const std::string& kw = toks[0].text;
      if (kw == "basis") {
        if (A) fail(toks[0], "basis lines must precede the operations");
        arity(toks, 4);
        name_token(toks[1]);
        for (const auto& b : basis)
          if (b.name == toks[1].text) fail(toks[1], "basis element " + b.name + " declared twice");
        basis.push_back({toks[1].text, {int(integer(toks[2])), int(integer(toks[3]))}});
      } else if (kw == "unit") {
        if (A) fail(toks[0], "unit must precede the operations");
        arity(toks, 2);
        if (unit) fail(toks[0], "unit declared twice");
        unit = toks[1].text;
      } else if (kw == "known-arity") {
        known = known_arity(toks, known);
      } else if (kw == "m") {
        build(toks[0]);
        Entry e = entry(toks, *A, *A, R);
        if (e.a < 0 || e.b < 1) fail(toks[1], "m needs i >= 0 and j >= 1");
        if (long(e.in.size()) != e.b) fail(toks[0], "m " + std::to_string(e.a) + " " + std::to_string(e.b) +
                                                         " takes " + std::to_string(e.b) + " inputs");
        try {
          store(ops, seen, e, structure_shape(int(e.a), int(e.b)), A, A, toks);
        } catch (const std::invalid_argument& ex) {
          fail(toks[0], ex.what());
        }
      } else {
        fail(toks[0], "unknown keyword " + kw + " in an algebra block");
      }
    }
    line_no_ = opener_line;
    build(opener);
    line_no_ = end_line;
    StructureFamily m(A);
    for (auto& [ij, c] : ops)
      if (!c.is_zero()) m.set(ij.first, ij.second, c);
    m.known_arity = known;
    return {name, m};
  }

  NamedMap map_block(const std::string& name, const NamedAlgebra& s, const NamedAlgebra& t) {
    Token opener{"map", 1};
    auto body = block_lines(opener);
    int end_line = line_no_;
    const ModulePtr& S = s.structure.module();
    const ModulePtr& T = t.structure.module();
    std::map<Index2, MultiCochain> comps;
    std::set<std::pair<Index2, Tuple>> seen;
    std::optional<int> known;
    for (auto& [ln, toks] : body) {
      line_no_ = ln;
      const std::string& kw = toks[0].text;
      if (kw == "known-arity") {
        known = known_arity(toks, known);
      } else if (kw == "f") {
        Entry e = entry(toks, *S, *T, S->ring());
        if (e.a < 0 || e.b < 1) fail(toks[1], "f needs s >= 0 and t >= 1");
        if (long(e.in.size()) != e.b) fail(toks[0], "f " + std::to_string(e.a) + " " + std::to_string(e.b) +
                                                         " takes " + std::to_string(e.b) + " inputs");
        try {
          store(comps, seen, e, morphism_shape(int(e.a), int(e.b)), S, T, toks);
        } catch (const std::invalid_argument& ex) {
          fail(toks[0], ex.what());
        }
      } else {
        fail(toks[0], "unknown keyword " + kw + " in a map block");
      }
    }
    line_no_ = end_line;
    MorphismFamily f(S, T);
    for (auto& [st, c] : comps)
      if (!c.is_zero()) f.set(st.first, st.second, c);
    f.known_arity = known;
    return {name, s.name, t.name, f};
  }

  std::vector<std::string> lines_;
  std::optional<Ring> ring_override_;
  int line_no_ = 0;
};

std::string terms_text(const BigradedModule& T, const Vec& v) {
  std::string s;
  for (const auto& [y, c] : v) s += " " + c.get_str() + "*" + T.name(y);
  return s;
}

void emit_entries(std::ostringstream& out, const std::string& kw, const Index2& ij, const MultiCochain& c) {
  const BigradedModule& S = *c.source();
  const BigradedModule& T = *c.target();
  for (const auto& [x, v] : c.entries()) {
    if (v.empty()) continue;
    auto d = c.target_degree(x);
    out << "  " << kw << " " << ij.first << " " << ij.second << " :";
    for (int a : x) out << " " << S.name(a);
    out << " -> " << d->h << " " << d->v << " :" << terms_text(T, v) << "\n";
  }
}

bool same_module_data(const BigradedModule& a, const BigradedModule& b) {
  if (a.size() != b.size() || a.unit() != b.unit() || a.ring().descriptor() != b.ring().descriptor()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a.name(int(i)) != b.name(int(i)) || a.degree(int(i)) != b.degree(int(i))) return false;
  return true;
}

bool same_entries(const std::map<Index2, MultiCochain>& a, const std::map<Index2, MultiCochain>& b) {
  if (a.size() != b.size()) return false;
  for (auto i = a.begin(), j = b.begin(); i != a.end(); ++i, ++j) {
    if (i->first != j->first || i->second.shape() != j->second.shape()) return false;
    auto strip = [](const MultiCochain& c) {
      std::map<Tuple, Vec> out;
      for (const auto& [x, v] : c.entries())
        if (!v.empty()) out[x] = v;
      return out;
    };
    if (strip(i->second) != strip(j->second)) return false;
  }
  return true;
}

}  // namespace

Presentation parse_presentation(const std::string& text, std::optional<Ring> ring) {
  return Parser(text, std::move(ring)).run();
}

std::string emit_presentation(const Presentation& p) {
  std::ostringstream out;
  out << "dainf-presentation 1\n";
  out << "ring " << p.ring.descriptor() << "\n";
  if (p.window) {
    out << "window " << window_field(p.window->max_u) << ":" << window_field(p.window->vmin) << ":"
        << window_field(p.window->vmax);
    if (p.window->max_arity) out << ":" << *p.window->max_arity;
    out << "\n";
  }
  for (const auto& m : p.meta) {
    out << "meta";
    for (const auto& w : m) out << " " << w;
    out << "\n";
  }
  for (const auto& a : p.algebras) {
    const BigradedModule& A = *a.structure.module();
    out << "\nalgebra " << a.name << "\n";
    for (const auto& b : A.basis()) out << "  basis " << b.name << " " << b.degree.h << " " << b.degree.v << "\n";
    if (A.unit()) out << "  unit " << A.name(*A.unit()) << "\n";
    if (a.structure.known_arity) out << "  known-arity " << *a.structure.known_arity << "\n";
    for (const auto& [ij, c] : a.structure.ops()) emit_entries(out, "m", ij, c);
    out << "end\n";
  }
  for (const auto& f : p.maps) {
    out << "\nmap " << f.name << " " << f.source << " " << f.target << "\n";
    if (f.family.known_arity) out << "  known-arity " << *f.family.known_arity << "\n";
    for (const auto& [st, c] : f.family.maps()) emit_entries(out, "f", st, c);
    out << "end\n";
  }
  return out.str();
}

bool same_presentation(const Presentation& a, const Presentation& b) {
  if (a.ring.descriptor() != b.ring.descriptor() || a.meta != b.meta) return false;
  if (a.window.has_value() != b.window.has_value()) return false;
  if (a.window && (a.window->max_u != b.window->max_u || a.window->vmin != b.window->vmin ||
                   a.window->vmax != b.window->vmax || a.window->max_arity != b.window->max_arity))
    return false;
  if (a.algebras.size() != b.algebras.size() || a.maps.size() != b.maps.size()) return false;
  for (size_t i = 0; i < a.algebras.size(); ++i) {
    const auto &x = a.algebras[i], &y = b.algebras[i];
    if (x.name != y.name || !same_module_data(*x.structure.module(), *y.structure.module()) ||
        x.structure.known_arity != y.structure.known_arity || !same_entries(x.structure.ops(), y.structure.ops()))
      return false;
  }
  for (size_t i = 0; i < a.maps.size(); ++i) {
    const auto &x = a.maps[i], &y = b.maps[i];
    if (x.name != y.name || x.source != y.source || x.target != y.target ||
        x.family.known_arity != y.family.known_arity || !same_entries(x.family.maps(), y.family.maps()))
      return false;
  }
  return true;
}

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::verified: return "verified";
    case Verdict::refuted: return "refuted";
    case Verdict::window_insufficient: return "window-insufficient";
    case Verdict::usage: return "usage";
  }
  return "?";
}

const std::string* RunReport::find(const std::string& key) const {
  for (const auto& [k, v] : results)
    if (k == key) return &v;
  return nullptr;
}

std::string emit_report(const RunReport& r) {
  std::ostringstream out;
  out << "report " << r.command << "\n";
  out << "inputs " << r.inputs << "\n";
  out << "flags";
  for (const auto& f : r.flags) out << " " << f;
  out << "\n";
  out << "window " << r.window << "\n";
  out << "total " << (r.total ? "yes" : "no") << "\n";
  out << "verdict " << to_string(r.verdict) << "\n";
  for (const auto& [k, v] : r.results) out << "result " << k << " = " << v << "\n";
  for (const auto& l : r.lines) out << "line " << l << "\n";
  if (r.seconds) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *r.seconds);
    out << "seconds " << buf << "\n";
  }
  out << "end\n";
  return out.str();
}

RunReport parse_report(const std::string& text) {
  RunReport r;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  bool ended = false;
  auto rest = [](const std::string& l, size_t k) { return l.size() > k ? l.substr(k + 1) : std::string(); };
  while (std::getline(in, line)) {
    ++n;
    if (ended) throw ParseError(n, 1, "text after 'end'");
    auto sp = line.find(' ');
    std::string kw = line.substr(0, sp);
    std::string arg = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (n == 1 && kw != "report") throw ParseError(1, 1, "expected 'report'");
    if (kw == "report") r.command = arg;
    else if (kw == "inputs") r.inputs = arg;
    else if (kw == "flags") {
      std::istringstream f(arg);
      std::string w;
      while (f >> w) r.flags.push_back(w);
    } else if (kw == "window") r.window = arg;
    else if (kw == "total") r.total = arg == "yes";
    else if (kw == "verdict") {
      bool ok = false;
      for (Verdict v : {Verdict::verified, Verdict::refuted, Verdict::window_insufficient, Verdict::usage})
        if (to_string(v) == arg) r.verdict = v, ok = true;
      if (!ok) throw ParseError(n, int(sp) + 2, "unknown verdict " + arg);
    } else if (kw == "result") {
      auto eq = arg.find(" = ");
      if (eq == std::string::npos) throw ParseError(n, int(sp) + 2, "expected 'key = value'");
      r.results.emplace_back(arg.substr(0, eq), arg.substr(eq + 3));
    } else if (kw == "line") r.lines.push_back(rest(line, 4));
    else if (kw == "seconds") r.seconds = std::stod(arg);
    else if (kw == "end") ended = true;
    else throw ParseError(n, 1, "unknown report line " + kw);
  }
  if (!ended) throw ParseError(n, 1, "report is not closed by 'end'");
  return r;
}

}  // namespace dainf
