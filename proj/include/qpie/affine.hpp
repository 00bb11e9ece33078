#pragma once

#include <map>
#include <stdexcept>

#include "qpie/pi_operator.hpp"
#include "qpie/tensor_pi.hpp"

namespace qpie {

/// Affine expression c + sum_k lin[k] * x_k in scalar decision variables.
/// Used as the coefficient ring of Poly so operator algebra can carry matrix
/// decision variables through compositions. Products require one factor to
/// be constant: the stability program is linear in the Gram entries, so a
/// variable-times-variable product is always a bug.
struct Affine {
  Rat c;
  std::map<int, Rat> lin;

  Affine() : c(0) {}
  Affine(const Rat& k) : c(k) {}
  Affine(int k) : c(k) {}

  static Affine variable(int k) {
    Affine a;
    a.lin[k] = 1;
    return a;
  }

  bool is_constant() const { return lin.empty(); }

  bool operator==(const Affine& o) const { return c == o.c && lin == o.lin; }

  Affine operator+(const Affine& o) const {
    Affine r = *this;
    r.c += o.c;
    for (const auto& [k, v] : o.lin) {
      Rat& slot = r.lin[k];
      slot += v;
      if (slot == 0) r.lin.erase(k);
    }
    return r;
  }
  Affine operator-() const {
    Affine r;
    r.c = -c;
    for (const auto& [k, v] : lin) r.lin[k] = -v;
    return r;
  }
  Affine operator-(const Affine& o) const { return *this + (-o); }

  Affine operator*(const Affine& o) const {
    if (!is_constant() && !o.is_constant())
      throw std::invalid_argument(
          "product of two non-constant affine expressions");
    const Affine& varside = is_constant() ? o : *this;
    const Rat& k = is_constant() ? c : o.c;
    Affine r;
    r.c = varside.c * k;
    if (k != 0)
      for (const auto& [i, v] : varside.lin) r.lin[i] = v * k;
    return r;
  }
};

inline bool coeff_is_zero(const Affine& a) {
  return a.c == 0 && a.lin.empty();
}
inline Affine coeff_scale(const Affine& a, const Rat& k) {
  Affine r;
  if (k == 0) return r;
  r.c = a.c * k;
  for (const auto& [i, v] : a.lin) r.lin[i] = v * k;
  return r;
}

using APoly = Poly<Affine>;
using APIOp = PIOp<Affine>;
using ATensorPIOp = TensorPIOp<Affine>;
using ASimplexFunctional = SimplexFunctional<Affine>;

inline APoly promote(const RPoly& p) {
  APoly r;
  for (const auto& [e, c] : p.terms()) r.add_term(e, Affine(c));
  return r;
}

inline APIOp promote(const RPIOp& op) {
  APIOp r(op.rows, op.cols, op.dom);
  for (size_t k = 0; k < op.R0.size(); ++k) {
    r.R0[k] = promote(op.R0[k]);
    r.R1[k] = promote(op.R1[k]);
    r.R2[k] = promote(op.R2[k]);
  }
  return r;
}

inline ATensorPIOp promote(const RTensorPIOp& op) {
  ATensorPIOp r(op.dom);
  r.B1 = promote(op.B1);
  r.B2 = promote(op.B2);
  r.B3 = promote(op.B3);
  return r;
}

}  // namespace qpie
