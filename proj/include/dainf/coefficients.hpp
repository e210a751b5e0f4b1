#pragma once

// Exact coefficient rings: Q, Z, F_p and the p-local integers Z_(p).
//
// Every ring element is stored as a GMP rational.  F_p elements are kept as
// integers in [0, p); Z_(p) elements are reduced fractions whose denominator
// is prime to p.  Characteristic 2 and 2-torsion are excluded throughout, so
// p = 2 is rejected.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace dainf {

using Scalar = mpq_class;

class RingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RingKind { rationals, integers, prime_field, p_local };

class Ring {
 public:
  static Ring rationals() { return Ring(RingKind::rationals, 0); }
  static Ring integers() { return Ring(RingKind::integers, 0); }
  static Ring prime_field(long p);
  static Ring p_local(long p);

  // Accepts the CLI spellings q, zz, zp:P and zloc:P.
  static Ring parse(const std::string& descriptor);
  std::string descriptor() const;

  RingKind kind() const { return kind_; }
  long prime() const { return prime_; }
  bool is_field() const {
    return kind_ == RingKind::rationals || kind_ == RingKind::prime_field;
  }

  // The field of fractions for the integral rings; the ring itself otherwise.
  Ring fraction_field() const;

  bool contains(const Scalar& x) const;
  // Canonical representative.  Throws RingError if x is not a ring element.
  Scalar normalize(const Scalar& x) const;
  Scalar from_int(long v) const { return normalize(Scalar(v)); }

  Scalar add(const Scalar& a, const Scalar& b) const { return normalize(a + b); }
  Scalar sub(const Scalar& a, const Scalar& b) const { return normalize(a - b); }
  Scalar mul(const Scalar& a, const Scalar& b) const { return normalize(a * b); }
  Scalar neg(const Scalar& a) const { return normalize(-a); }

  bool is_unit(const Scalar& x) const;
  Scalar inverse(const Scalar& unit) const;
  // a / b when b divides a in the ring.
  std::optional<Scalar> divide(const Scalar& a, const Scalar& b) const;
  // Euclidean step: a = q b + r with r = 0 whenever b | a, and |r| < |b| over Z.
  std::pair<Scalar, Scalar> div_rem(const Scalar& a, const Scalar& b) const;

  // Pivot ordering key: |x| over Z, v_p(x) over Z_(p), 0 over fields.
  mpz_class pivot_measure(const Scalar& x) const;
  // p-adic valuation of a nonzero rational.
  static long valuation(const Scalar& x, long p);

  // A unit u with u * x in normal form (|x|, p^v, or 1).
  Scalar normalizing_unit(const Scalar& x) const;
  // Canonical representative of x in R/(d) for d nonzero non-unit.
  Scalar residue(const Scalar& x, const Scalar& d) const;

  std::string format(const Scalar& x) const;

  friend bool operator==(const Ring& a, const Ring& b) {
    return a.kind_ == b.kind_ && a.prime_ == b.prime_;
  }

 private:
  Ring(RingKind k, long p) : kind_(k), prime_(p) {}
  RingKind kind_;
  long prime_;
};

bool is_prime(long n);

// Parses "3", "-2", "5/7".
Scalar parse_scalar(const std::string& text);

}  // namespace dainf
