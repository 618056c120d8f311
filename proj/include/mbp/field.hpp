// Exact base fields: arbitrary-precision rationals and prime fields GF(p).
//
// Every field type K used by the library provides: zero(), one(),
// from_int(long), exact +,-,*,/, is_zero(), a total order prec_less()
// used to make canonical forms unique, and string round-trips.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace mbp {

using bigint = boost::multiprecision::cpp_int;
using bigrat = boost::multiprecision::cpp_rational;

struct Rat {
  bigrat v;

  Rat() : v(0) {}
  explicit Rat(const bigrat& x) : v(x) {}
  Rat(long n) : v(n) {}
  Rat(long n, long d) : v(bigint(n), bigint(d)) {}

  static Rat zero() { return Rat(); }
  static Rat one() { return Rat(1); }
  static Rat from_int(long n) { return Rat(n); }
  static const char* name() { return "rational"; }

  bool is_zero() const { return v == 0; }

  Rat operator+(const Rat& o) const { return Rat(bigrat(v + o.v)); }
  Rat operator-(const Rat& o) const { return Rat(bigrat(v - o.v)); }
  Rat operator*(const Rat& o) const { return Rat(bigrat(v * o.v)); }
  Rat operator-() const { return Rat(bigrat(-v)); }
  Rat operator/(const Rat& o) const {
    if (o.is_zero()) throw std::domain_error("Rat: division by zero");
    return Rat(bigrat(v / o.v));
  }
  Rat inv() const { return Rat::one() / *this; }

  Rat& operator+=(const Rat& o) { v += o.v; return *this; }
  Rat& operator-=(const Rat& o) { v -= o.v; return *this; }
  Rat& operator*=(const Rat& o) { v *= o.v; return *this; }

  bool operator==(const Rat& o) const { return v == o.v; }
  bool operator!=(const Rat& o) const { return v != o.v; }

  // the order "prec" on the base field: natural order on Q
  bool prec_less(const Rat& o) const { return v < o.v; }

  std::string str() const {
    bigint n = boost::multiprecision::numerator(v);
    bigint d = boost::multiprecision::denominator(v);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
  }

  static Rat parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(bigrat(bigint(s)));
    bigint n(s.substr(0, slash));
    bigint d(s.substr(slash + 1));
    if (d == 0) throw std::domain_error("Rat: zero denominator in \"" + s + "\"");
    return Rat(bigrat(n, d));
  }
};

// GF(p) with compile-time modulus. Elements are the representatives 0..p-1
// and prec_less is the representative order, which fixes unique Weyr forms.
template <unsigned P>
struct Fp {
  static_assert(P >= 2, "modulus must be a prime >= 2");
  std::uint64_t v = 0;

  Fp() = default;
  Fp(long n) {
    long r = n % static_cast<long>(P);
    if (r < 0) r += P;
    v = static_cast<std::uint64_t>(r);
  }

  static Fp zero() { return Fp(); }
  static Fp one() { return Fp(1); }
  static Fp from_int(long n) { return Fp(n); }
  static std::string name() { return "gf:" + std::to_string(P); }

  bool is_zero() const { return v == 0; }

  Fp operator+(Fp o) const { Fp r; r.v = (v + o.v) % P; return r; }
  Fp operator-(Fp o) const { Fp r; r.v = (v + P - o.v) % P; return r; }
  Fp operator*(Fp o) const { Fp r; r.v = (v * o.v) % P; return r; }
  Fp operator-() const { Fp r; r.v = (P - v) % P; return r; }
  Fp inv() const {
    if (v == 0) throw std::domain_error("Fp: division by zero");
    // extended Euclid
    long a = static_cast<long>(v), m = static_cast<long>(P);
    long x0 = 0, x1 = 1;
    while (a > 1) {
      long q = a / m;
      a -= q * m; std::swap(a, m);
      x1 -= q * x0; std::swap(x0, x1);
    }
    return Fp(x1);
  }
  Fp operator/(Fp o) const { return *this * o.inv(); }

  Fp& operator+=(Fp o) { v = (v + o.v) % P; return *this; }
  Fp& operator-=(Fp o) { v = (v + P - o.v) % P; return *this; }
  Fp& operator*=(Fp o) { v = (v * o.v) % P; return *this; }

  bool operator==(Fp o) const { return v == o.v; }
  bool operator!=(Fp o) const { return v != o.v; }

  bool prec_less(Fp o) const { return v < o.v; }

  std::string str() const { return std::to_string(v); }

  static Fp parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      Fp n = parse(s.substr(0, slash));
      Fp d = parse(s.substr(slash + 1));
      return n / d;
    }
    return Fp(std::stol(s));
  }
};

template <class K>
bool prec_less(const K& a, const K& b) { return a.prec_less(b); }

} // namespace mbp
