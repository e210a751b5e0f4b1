#include "dainf/coefficients.hpp"

#include <cstdlib>

namespace dainf {

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Ring Ring::prime_field(long p) {
  if (!is_prime(p)) throw RingError("prime field needs a prime, got " + std::to_string(p));
  if (p == 2) throw RingError("characteristic 2 is not supported");
  return Ring(RingKind::prime_field, p);
}

Ring Ring::p_local(long p) {
  if (!is_prime(p)) throw RingError("p-local integers need a prime, got " + std::to_string(p));
  if (p == 2) throw RingError("2-local integers are not supported (2 must be invertible)");
  return Ring(RingKind::p_local, p);
}

Ring Ring::parse(const std::string& d) {
  if (d == "q") return rationals();
  if (d == "zz") return integers();
  auto colon = d.find(':');
  if (colon != std::string::npos) {
    std::string head = d.substr(0, colon);
    long p = 0;
    try {
      size_t used = 0;
      p = std::stol(d.substr(colon + 1), &used);
      if (used != d.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw RingError("bad prime in ring descriptor '" + d + "'");
    }
    if (head == "zp") return prime_field(p);
    if (head == "zloc") return p_local(p);
  }
  throw RingError("unknown ring descriptor '" + d + "' (expected q, zz, zp:P or zloc:P)");
}

std::string Ring::descriptor() const {
  switch (kind_) {
    case RingKind::rationals: return "q";
    case RingKind::integers: return "zz";
    case RingKind::prime_field: return "zp:" + std::to_string(prime_);
    case RingKind::p_local: return "zloc:" + std::to_string(prime_);
  }
  return "?";
}

Ring Ring::fraction_field() const {
  if (kind_ == RingKind::integers || kind_ == RingKind::p_local) return rationals();
  return *this;
}

static bool den_prime_to(const Scalar& x, long p) {
  Scalar y = x;
  y.canonicalize();
  mpz_class r = y.get_den() % p;
  return r != 0;
}

bool Ring::contains(const Scalar& x) const {
  switch (kind_) {
    case RingKind::rationals: return true;
    case RingKind::integers: {
      Scalar y = x;
      y.canonicalize();
      return y.get_den() == 1;
    }
    case RingKind::prime_field:
    case RingKind::p_local: return den_prime_to(x, prime_);
  }
  return false;
}

Scalar Ring::normalize(const Scalar& x) const {
  Scalar y = x;
  y.canonicalize();
  if (kind_ == RingKind::rationals) return y;
  if (!contains(y)) throw RingError("value " + y.get_str() + " is not an element of " + descriptor());
  if (kind_ != RingKind::prime_field) return y;
  mpz_class p = prime_;
  mpz_class den = y.get_den() % p;
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t());
  mpz_class r = (y.get_num() * inv) % p;
  if (r < 0) r += p;
  return Scalar(r);
}

long Ring::valuation(const Scalar& x, long p) {
  if (x == 0) throw RingError("valuation of zero");
  long v = 0;
  mpz_class n = x.get_num();
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  mpz_class d = x.get_den();
  while (d % p == 0) {
    d /= p;
    --v;
  }
  return v;
}

bool Ring::is_unit(const Scalar& x) const {
  if (x == 0) return false;
  switch (kind_) {
    case RingKind::rationals:
    case RingKind::prime_field: return true;
    case RingKind::integers: return x == 1 || x == -1;
    case RingKind::p_local: return valuation(x, prime_) == 0;
  }
  return false;
}

Scalar Ring::inverse(const Scalar& u) const {
  if (!is_unit(u)) throw RingError(format(u) + " is not a unit in " + descriptor());
  return normalize(Scalar(1) / u);
}

std::optional<Scalar> Ring::divide(const Scalar& a, const Scalar& b) const {
  if (b == 0) {
    if (a == 0) return Scalar(0);
    return std::nullopt;
  }
  if (a == 0) return Scalar(0);
  switch (kind_) {
    case RingKind::rationals: return Scalar(a / b);
    case RingKind::prime_field: return mul(a, inverse(b));
    case RingKind::integers: {
      Scalar q = a / b;
      if (q.get_den() != 1) return std::nullopt;
      return q;
    }
    case RingKind::p_local: {
      if (valuation(a, prime_) < valuation(b, prime_)) return std::nullopt;
      return Scalar(a / b);
    }
  }
  return std::nullopt;
}

std::pair<Scalar, Scalar> Ring::div_rem(const Scalar& a, const Scalar& b) const {
  if (b == 0) throw RingError("division by zero");
  if (kind_ == RingKind::integers) {
    // Round to nearest so that |r| <= |b|/2.  Floor division leaves r with
    // the sign of b, so stepping q up by one shrinks |r| when it is large.
    mpz_class an = a.get_num(), bn = b.get_num();
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), an.get_mpz_t(), bn.get_mpz_t());
    mpz_class r = an - q * bn;
    if (2 * abs(r) > abs(bn)) {
      q += 1;
      r = an - q * bn;
    }
    return {Scalar(q), Scalar(r)};
  }
  if (auto q = divide(a, b)) return {*q, Scalar(0)};
  return {Scalar(0), a};
}

mpz_class Ring::pivot_measure(const Scalar& x) const {
  switch (kind_) {
    case RingKind::integers: return abs(x.get_num());
    case RingKind::p_local: return mpz_class(valuation(x, prime_));
    default: return mpz_class(0);
  }
}

Scalar Ring::normalizing_unit(const Scalar& x) const {
  if (x == 0) return Scalar(1);
  switch (kind_) {
    case RingKind::rationals:
    case RingKind::prime_field: return inverse(x);
    case RingKind::integers: return Scalar(x < 0 ? -1 : 1);
    case RingKind::p_local: {
      long v = valuation(x, prime_);
      mpz_class pv;
      mpz_ui_pow_ui(pv.get_mpz_t(), static_cast<unsigned long>(prime_), static_cast<unsigned long>(v));
      return Scalar(Scalar(pv) / x);
    }
  }
  return Scalar(1);
}

Scalar Ring::residue(const Scalar& x, const Scalar& d) const {
  if (is_field()) return Scalar(0);
  Scalar dn = mul(d, normalizing_unit(d));  // |d| or p^v
  mpz_class m = dn.get_num();
  mpz_class num = x.get_num(), den = x.get_den();
  mpz_class inv;
  if (den != 1) {
    if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) == 0)
      throw RingError("residue: denominator not invertible modulo " + m.get_str());
  } else {
    inv = 1;
  }
  mpz_class r = (num * inv) % m;
  if (r < 0) r += m;
  return Scalar(r);
}

std::string Ring::format(const Scalar& x) const { return x.get_str(); }

Scalar parse_scalar(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty coefficient");
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool ok = (c >= '0' && c <= '9') || c == '/' || (i == 0 && (c == '-' || c == '+'));
    if (!ok) throw std::invalid_argument("bad coefficient '" + text + "'");
  }
  std::string t = text[0] == '+' ? text.substr(1) : text;
  Scalar s;
  if (s.set_str(t, 10) != 0) throw std::invalid_argument("bad coefficient '" + text + "'");
  if (s.get_den() == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  s.canonicalize();
  return s;
}

}  // namespace dainf
