#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "frostman/errors.hpp"

namespace frostman {

// Small exact rational. den == 0 encodes +infinity (num forced to 1), which
// shows up as the Lebesgue exponent p = inf in the exponent tables and in
// Young-inequality triples. Arithmetic between two infinities is rejected.
struct Rat {
  long long num = 0;
  long long den = 1;

  constexpr Rat() = default;
  Rat(long long n) : num(n), den(1) {}
  Rat(long long n, long long d) : num(n), den(d) {
    if (d == 0) throw ConfigError("Rat: zero denominator");
    normalize();
  }
  static Rat inf() {
    Rat r;
    r.num = 1;
    r.den = 0;
    return r;
  }
  bool is_inf() const { return den == 0; }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  // 1/x, with 1/inf = 0 and 1/0 = inf.
  Rat recip() const {
    if (is_inf()) return Rat(0);
    if (num == 0) return inf();
    Rat r;
    r.num = den;
    r.den = num;
    r.normalize();
    return r;
  }

  double value() const {
    if (is_inf()) return 1.0 / 0.0;
    return double(num) / double(den);
  }

  std::string str() const {
    if (is_inf()) return "inf";
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    if (a.is_inf() || b.is_inf()) throw ConfigError("Rat: arithmetic with infinity");
    return Rat(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    if (a.is_inf() || b.is_inf()) throw ConfigError("Rat: arithmetic with infinity");
    return Rat(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    if (a.is_inf() || b.is_inf()) throw ConfigError("Rat: arithmetic with infinity");
    return Rat(a.num * b.num, a.den * b.den);
  }
  friend Rat operator/(const Rat& a, const Rat& b) { return a * b.recip(); }
  friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    if (a.is_inf()) return false;
    if (b.is_inf()) return true;
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator<=(const Rat& a, const Rat& b) { return a < b || a == b; }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator>=(const Rat& a, const Rat& b) { return b <= a; }
};

// Parses "inf", "3", or "7/2". Decimals are rejected, not truncated: "0.5"
// must be written "1/2".
inline Rat parse_rat(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return Rat::inf();
  auto whole = [](const std::string& t) {
    size_t pos = 0;
    long long v = std::stoll(t, &pos);
    if (pos != t.size()) throw ConfigError("trailing characters");
    return v;
  };
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(whole(s));
    return Rat(whole(s.substr(0, slash)), whole(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw ConfigError("cannot parse rational: '" + s + "'");
  }
}

}  // namespace frostman
