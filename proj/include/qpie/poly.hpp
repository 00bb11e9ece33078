#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qpie/rational.hpp"

namespace qpie {

/// The four kernel variables. The ordering s > th > et > ze is fixed and is
/// what makes term maps canonical.
enum class Var : int { s = 0, th = 1, et = 2, ze = 3 };

inline constexpr std::array<const char*, 4> kVarNames = {"s", "th", "et",
                                                         "ze"};

inline int idx(Var v) { return static_cast<int>(v); }

/// Exponent tuple for (s, th, et, ze).
using Expo = std::array<int, 4>;

/// Integration limit: an endpoint constant or a single other variable.
/// General polynomial limits are rejected by construction.
using Limit = std::variant<Rat, Var>;

struct Interval {
  Rat a, b;
  Interval(Rat a_, Rat b_) : a(std::move(a_)), b(std::move(b_)) {
    if (!(a < b)) throw std::invalid_argument("interval requires a < b");
  }
  bool operator==(const Interval& o) const { return a == o.a && b == o.b; }
};

// Coefficient-ring hooks. Poly<C> uses these so the same template serves
// exact rationals and affine decision-variable expressions.
inline bool coeff_is_zero(const Rat& c) { return c == 0; }
inline Rat coeff_scale(const Rat& c, const Rat& k) { return c * k; }

/// Canonical multivariate polynomial in {s, th, et, ze} over coefficient
/// ring C. No explicit zero coefficients are stored; identical mathematical
/// polynomials have identical term maps. Immutable in spirit: all operations
/// return new values.
template <class C>
class Poly {
 public:
  using Terms = std::map<Expo, C>;

  Poly() = default;
  explicit Poly(C constant) {
    if (!coeff_is_zero(constant)) terms_[{0, 0, 0, 0}] = std::move(constant);
  }
  static Poly var(Var v) { return monomial(unit_expo(v), C(1)); }
  static Poly monomial(Expo e, C c) {
    Poly p;
    if (!coeff_is_zero(c)) p.terms_[e] = std::move(c);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool operator==(const Poly& o) const { return terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  Poly operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }
  Poly operator-() const {
    Poly r;
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }
  Poly operator-(const Poly& o) const { return *this + (-o); }

  Poly operator*(const Poly& o) const {
    Poly r;
    for (const auto& [e1, c1] : terms_)
      for (const auto& [e2, c2] : o.terms_) {
        Expo e;
        for (int k = 0; k < 4; ++k) e[k] = e1[k] + e2[k];
        r.add_term(e, c1 * c2);
      }
    return r;
  }

  Poly scaled(const Rat& k) const {
    Poly r;
    if (k == 0) return r;
    for (const auto& [e, c] : terms_) r.terms_[e] = coeff_scale(c, k);
    return r;
  }

  int degree_in(Var v) const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[idx(v)]);
    return d;
  }
  int total_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_)
      d = std::max(d, e[0] + e[1] + e[2] + e[3]);
    return d;
  }
  bool depends_on(Var v) const { return degree_in(v) > 0; }

  Poly derivative(Var v) const {
    Poly r;
    const int i = idx(v);
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Expo d = e;
      d[i] -= 1;
      r.add_term(d, coeff_scale(c, Rat(e[i])));
    }
    return r;
  }

  Poly antiderivative(Var v) const {
    Poly r;
    const int i = idx(v);
    for (const auto& [e, c] : terms_) {
      Expo d = e;
      d[i] += 1;
      r.add_term(d, coeff_scale(c, Rat(1, static_cast<unsigned long>(d[i]))));
    }
    return r;
  }

  /// Replaces v by the limit expression (a constant or another variable).
  Poly at_limit(Var v, const Limit& lim) const {
    Poly r;
    const int i = idx(v);
    for (const auto& [e, c] : terms_) {
      Expo d = e;
      d[i] = 0;
      if (std::holds_alternative<Var>(lim)) {
        d[idx(std::get<Var>(lim))] += e[i];
        r.add_term(d, c);
      } else {
        const Rat& val = std::get<Rat>(lim);
        Rat pw = 1;
        for (int k = 0; k < e[i]; ++k) pw *= val;
        r.add_term(d, coeff_scale(c, pw));
      }
    }
    return r;
  }

  /// Definite integral over v from `lo` to `hi`; the result never contains v.
  Poly integrate(Var v, const Limit& lo, const Limit& hi) const {
    const Poly anti = antiderivative(v);
    return anti.at_limit(v, hi) - anti.at_limit(v, lo);
  }

  /// General substitution v := repl, exact and canonical.
  Poly substitute(Var v, const Poly& repl) const {
    Poly r;
    const int i = idx(v);
    for (const auto& [e, c] : terms_) {
      Expo rest = e;
      rest[i] = 0;
      Poly term = Poly::monomial(rest, c);
      for (int k = 0; k < e[i]; ++k) term = term * repl;
      r = r + term;
    }
    return r;
  }

  /// Simultaneous variable permutation/renaming, e.g. (s,th,et) -> (th,s,et).
  /// `perm[i]` is the variable that old variable i becomes.
  Poly permuted(const std::array<Var, 4>& perm) const {
    Poly r;
    for (const auto& [e, c] : terms_) {
      Expo d = {0, 0, 0, 0};
      for (int k = 0; k < 4; ++k) d[idx(perm[k])] += e[k];
      r.add_term(d, c);
    }
    return r;
  }

  /// Exact evaluation. Every variable occurring in the polynomial must be
  /// assigned.
  C eval(const std::array<std::optional<Rat>, 4>& point) const {
    C acc(0);
    for (const auto& [e, c] : terms_) {
      Rat m = 1;
      for (int k = 0; k < 4; ++k) {
        if (e[k] == 0) continue;
        if (!point[k])
          throw std::invalid_argument(std::string("eval: missing value for ") +
                                      kVarNames[k]);
        for (int p = 0; p < e[k]; ++p) m *= *point[k];
      }
      acc = acc + coeff_scale(c, m);
    }
    return acc;
  }

  void add_term(const Expo& e, const C& c) {
    if (coeff_is_zero(c)) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second = it->second + c;
      if (coeff_is_zero(it->second)) terms_.erase(it);
    }
  }

 private:
  static Expo unit_expo(Var v) {
    Expo e = {0, 0, 0, 0};
    e[idx(v)] = 1;
    return e;
  }

  Terms terms_;
};

using RPoly = Poly<Rat>;

inline RPoly operator*(const Rat& k, const RPoly& p) { return p.scaled(k); }

inline RPoly pvar(Var v) { return RPoly::var(v); }
inline RPoly pconst(Rat c) { return RPoly(std::move(c)); }

/// Textual round-trip form: sum of `coef * s^i th^j et^k ze^l` terms with
/// rationals as `num/den`. Used in JSON reports and test fixtures.
inline std::string to_string(const RPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << c.get_str();
    for (int k = 0; k < 4; ++k) {
      if (e[k] == 0) continue;
      os << " " << kVarNames[k];
      if (e[k] > 1) os << "^" << e[k];
    }
  }
  return os.str();
}

inline RPoly rpoly_from_string(const std::string& text) {
  RPoly p;
  // terms are '+'-separated; sign lives in the coefficient
  std::vector<std::string> parts;
  const std::string& norm = text;
  std::string cur;
  for (char ch : norm) {
    if (ch == '+') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  for (auto& part : parts) {
    std::istringstream is(part);
    std::string tok;
    if (!(is >> tok)) continue;
    Rat coef;
    Expo e = {0, 0, 0, 0};
    bool has_coef = (tok.find_first_of("0123456789") != std::string::npos &&
                     tok.find_first_not_of("-0123456789/") ==
                         std::string::npos);
    if (has_coef) {
      coef = rat_from_string(tok);
    } else {
      coef = 1;
      is.clear();
      is.seekg(0);
    }
    while (is >> tok) {
      if (tok == "*") continue;
      std::string name = tok;
      int pw = 1;
      auto caret = tok.find('^');
      if (caret != std::string::npos) {
        name = tok.substr(0, caret);
        pw = std::stoi(tok.substr(caret + 1));
      }
      bool found = false;
      for (int k = 0; k < 4; ++k) {
        if (name == kVarNames[k]) {
          e[k] += pw;
          found = true;
          break;
        }
      }
      if (!found)
        throw std::invalid_argument("bad variable in polynomial text: " + name);
    }
    p.add_term(e, coef);
  }
  return p;
}

}  // namespace qpie
