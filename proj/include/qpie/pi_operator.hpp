#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qpie/poly.hpp"
#include "qpie/sturm.hpp"

namespace qpie {

/// A 3-PI operator on L2[a,b] with matrix-valued polynomial kernels:
///   (R u)(s) = R0(s) u(s) + int_a^s R1(s,th) u(th) dth
///                         + int_s^b R2(s,th) u(th) dth.
/// It is a 2-PI operator iff R0 is identically zero (a predicate, not a
/// separate type). Matrix-valued kernels exist so the positivity factor can
/// be a column-vector operator; all PDE-facing operators are 1x1.
template <class C>
struct PIOp {
  int rows = 1, cols = 1;
  Interval dom;
  std::vector<Poly<C>> R0, R1, R2;  // row-major, rows*cols each

  PIOp(int r, int c, Interval dom_)
      : rows(r),
        cols(c),
        dom(std::move(dom_)),
        R0(r * c),
        R1(r * c),
        R2(r * c) {
    if (r <= 0 || c <= 0) throw std::invalid_argument("bad operator dims");
  }

  Poly<C>& r0(int r, int c) { return R0[r * cols + c]; }
  Poly<C>& r1(int r, int c) { return R1[r * cols + c]; }
  Poly<C>& r2(int r, int c) { return R2[r * cols + c]; }
  const Poly<C>& r0(int r, int c) const { return R0[r * cols + c]; }
  const Poly<C>& r1(int r, int c) const { return R1[r * cols + c]; }
  const Poly<C>& r2(int r, int c) const { return R2[r * cols + c]; }

  bool is_pi2() const {
    for (const auto& p : R0)
      if (!p.is_zero()) return false;
    return true;
  }
  bool is_zero() const {
    auto all0 = [](const std::vector<Poly<C>>& v) {
      for (const auto& p : v)
        if (!p.is_zero()) return false;
      return true;
    };
    return all0(R0) && all0(R1) && all0(R2);
  }

  static PIOp identity(const Interval& dom, int n = 1) {
    PIOp op(n, n, dom);
    for (int i = 0; i < n; ++i) op.r0(i, i) = Poly<C>(C(1));
    return op;
  }
  static PIOp zero(const Interval& dom, int r = 1, int c = 1) {
    return PIOp(r, c, dom);
  }
  /// M_c: (M_c v)(s) = c(s) v(s).
  static PIOp multiplier(const Poly<C>& c, const Interval& dom) {
    if (c.depends_on(Var::th) || c.depends_on(Var::et) ||
        c.depends_on(Var::ze))
      throw std::invalid_argument("multiplier kernel must depend on s only");
    PIOp op(1, 1, dom);
    op.r0(0, 0) = c;
    return op;
  }
  static PIOp multiplier_matrix(int r, int c, std::vector<Poly<C>> entries,
                                const Interval& dom) {
    PIOp op(r, c, dom);
    if (static_cast<int>(entries.size()) != r * c)
      throw std::invalid_argument("multiplier matrix size mismatch");
    op.R0 = std::move(entries);
    return op;
  }
};

using RPIOp = PIOp<Rat>;

namespace detail {
/// v(s) -> v(th); the test function must be a function of s only.
template <class C>
Poly<C> shift_to_theta(const Poly<C>& v) {
  if (v.depends_on(Var::th) || v.depends_on(Var::et) || v.depends_on(Var::ze))
    throw std::invalid_argument("L2 test function must depend on s only");
  return v.permuted({Var::th, Var::s, Var::et, Var::ze});
}
}  // namespace detail

/// Exact action on a vector of polynomial test functions in s.
template <class C>
std::vector<Poly<C>> apply(const PIOp<C>& op, const std::vector<Poly<C>>& v) {
  if (static_cast<int>(v.size()) != op.cols)
    throw std::invalid_argument("apply: dimension mismatch");
  std::vector<Poly<C>> vt(v.size());
  for (size_t c = 0; c < v.size(); ++c) vt[c] = detail::shift_to_theta(v[c]);
  std::vector<Poly<C>> out(op.rows);
  for (int r = 0; r < op.rows; ++r) {
    Poly<C> acc;
    for (int c = 0; c < op.cols; ++c) {
      acc = acc + op.r0(r, c) * v[c];
      acc = acc + (op.r1(r, c) * vt[c]).integrate(Var::th, op.dom.a, Var::s);
      acc = acc + (op.r2(r, c) * vt[c]).integrate(Var::th, Var::s, op.dom.b);
    }
    out[r] = std::move(acc);
  }
  return out;
}

template <class C>
Poly<C> apply(const PIOp<C>& op, const Poly<C>& v) {
  if (op.rows != 1 || op.cols != 1)
    throw std::invalid_argument("scalar apply needs a 1x1 operator");
  return qpie::apply(op, std::vector<Poly<C>>{v})[0];
}

template <class C>
PIOp<C> add_scaled(const PIOp<C>& A, const PIOp<C>& B, const Rat& lambda) {
  if (A.rows != B.rows || A.cols != B.cols || !(A.dom == B.dom))
    throw std::invalid_argument("add: dimension or domain mismatch");
  PIOp<C> r = A;
  for (size_t k = 0; k < r.R0.size(); ++k) {
    r.R0[k] = r.R0[k] + B.R0[k].scaled(lambda);
    r.R1[k] = r.R1[k] + B.R1[k].scaled(lambda);
    r.R2[k] = r.R2[k] + B.R2[k].scaled(lambda);
  }
  return r;
}

template <class C>
PIOp<C> operator+(const PIOp<C>& A, const PIOp<C>& B) {
  return add_scaled(A, B, Rat(1));
}

template <class C>
PIOp<C> scaled(const PIOp<C>& A, const Rat& lambda) {
  PIOp<C> r = A;
  for (size_t k = 0; k < r.R0.size(); ++k) {
    r.R0[k] = r.R0[k].scaled(lambda);
    r.R1[k] = r.R1[k].scaled(lambda);
    r.R2[k] = r.R2[k].scaled(lambda);
  }
  return r;
}

namespace detail {
template <class C>
Poly<C> swap_s_theta(const Poly<C>& p) {
  return p.permuted({Var::th, Var::s, Var::et, Var::ze});
}
}  // namespace detail

/// L2 adjoint: kernels transpose with arguments swapped, integral slots
/// exchanged.
template <class C>
PIOp<C> adjoint(const PIOp<C>& A) {
  PIOp<C> r(A.cols, A.rows, A.dom);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) {
      r.r0(j, i) = A.r0(i, j);
      r.r1(j, i) = detail::swap_s_theta(A.r2(i, j));
      r.r2(j, i) = detail::swap_s_theta(A.r1(i, j));
    }
  return r;
}

/// Composition A o B. The parameter maps are derived by region splitting;
/// every build is cross-checked against the apply-oracle in the test suite,
/// which is authoritative if the two ever disagree.
template <class C>
PIOp<C> compose(const PIOp<C>& A, const PIOp<C>& B) {
  if (A.cols != B.rows || !(A.dom == B.dom))
    throw std::invalid_argument("compose: dimension or domain mismatch");
  const Interval& dom = A.dom;
  PIOp<C> Cc(A.rows, B.cols, dom);
  // kernel(s,th) with integration variable ze
  auto to_zeta_first = [](const Poly<C>& p) {  // A*(s,th) -> A*(s,ze)
    return p.permuted({Var::s, Var::ze, Var::et, Var::th});
  };
  auto to_zeta_second = [](const Poly<C>& p) {  // B*(s,th) -> B*(ze,th)
    return p.permuted({Var::ze, Var::th, Var::et, Var::s});
  };
  auto theta_arg = [](const Poly<C>& p) {  // c(s) -> c(th)
    return p.permuted({Var::th, Var::s, Var::et, Var::ze});
  };
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < B.cols; ++j) {
      Poly<C> c0, c1, c2;
      for (int k = 0; k < A.cols; ++k) {
        const Poly<C>& a0 = A.r0(i, k);
        const Poly<C> a1 = to_zeta_first(A.r1(i, k));
        const Poly<C> a2 = to_zeta_first(A.r2(i, k));
        const Poly<C>& b0 = B.r0(k, j);
        const Poly<C> b1 = to_zeta_second(B.r1(k, j));
        const Poly<C> b2 = to_zeta_second(B.r2(k, j));

        c0 = c0 + a0 * b0;

        c1 = c1 + a0 * B.r1(k, j) + A.r1(i, k) * theta_arg(b0);
        c1 = c1 + (a1 * b1).integrate(Var::ze, Var::th, Var::s);
        c1 = c1 + (a1 * b2).integrate(Var::ze, dom.a, Var::th);
        c1 = c1 + (a2 * b1).integrate(Var::ze, Var::s, dom.b);

        c2 = c2 + a0 * B.r2(k, j) + A.r2(i, k) * theta_arg(b0);
        c2 = c2 + (a2 * b2).integrate(Var::ze, Var::s, Var::th);
        c2 = c2 + (a2 * b1).integrate(Var::ze, Var::th, dom.b);
        c2 = c2 + (a1 * b2).integrate(Var::ze, dom.a, Var::s);
      }
      Cc.r1(i, j) = std::move(c1);
      Cc.r2(i, j) = std::move(c2);
      Cc.r0(i, j) = std::move(c0);
    }
  return Cc;
}

/// Exact L2[a,b] inner product of polynomial test functions in s.
template <class C>
C l2_inner(const Poly<C>& u, const Poly<C>& v, const Interval& dom) {
  Poly<C> prod = u * v;
  Poly<C> val = prod.integrate(Var::s, dom.a, dom.b);
  return val.eval({std::nullopt, std::nullopt, std::nullopt, std::nullopt});
}

template <class C>
C l2_inner(const std::vector<Poly<C>>& u, const std::vector<Poly<C>>& v,
           const Interval& dom) {
  if (u.size() != v.size())
    throw std::invalid_argument("inner product dimension mismatch");
  C acc(0);
  for (size_t k = 0; k < u.size(); ++k)
    acc = acc + l2_inner(u[k], v[k], dom);
  return acc;
}

namespace detail {

inline std::vector<Rat> dense_in_s(const RPoly& p) {
  std::vector<Rat> c(p.degree_in(Var::s) + 1, Rat(0));
  for (const auto& [e, coef] : p.terms()) {
    if (e[1] || e[2] || e[3])
      throw std::invalid_argument("expected univariate kernel in s");
    c[e[0]] = coef;
  }
  return c;
}

/// Rigorous sup of |p| on [a,b]: critical points of p' are isolated with a
/// Sturm chain to rational intervals; the interval width times a coefficient
/// bound on |p'| covers the evaluation slack.
inline double sup_abs_univariate(const RPoly& p, const Interval& dom) {
  if (p.is_zero()) return 0.0;
  auto coeffs = dense_in_s(p);
  Rat abs_a = abs(dom.a), abs_b = abs(dom.b);
  Rat big = 1;
  if (abs_a > big) big = abs_a;
  if (abs_b > big) big = abs_b;
  auto dp = sturm::derivative(coeffs);
  Rat dbound = 0;  // bound on |p'| over the interval
  {
    Rat pw = 1;
    for (const auto& c : dp) {
      Rat ac = abs(c);
      dbound += ac * pw;
      pw *= big;
    }
  }
  Rat va = abs(sturm::eval(coeffs, dom.a));
  Rat vb = abs(sturm::eval(coeffs, dom.b));
  Rat best = va > vb ? va : vb;
  Rat width = (dom.b - dom.a) / Rat(1000000000L);  // ~1e-9 isolation width
  for (const auto& [l, r] : sturm::isolate_roots(dp, dom.a, dom.b, width)) {
    Rat cand = abs(sturm::eval(coeffs, l));
    cand += (r - l) * dbound;
    if (cand > best) best = cand;
  }
  return to_double(best);
}

inline double hs_norm_lower(const RPoly& k, const Interval& dom) {
  // ||K||_HS over the region a <= th <= s <= b
  RPoly sq = k * k;
  RPoly inner = sq.integrate(Var::th, dom.a, Var::s);
  RPoly val = inner.integrate(Var::s, dom.a, dom.b);
  return std::sqrt(to_double(
      val.eval({std::nullopt, std::nullopt, std::nullopt, std::nullopt})));
}

inline double hs_norm_upper(const RPoly& k, const Interval& dom) {
  RPoly sq = k * k;
  RPoly inner = sq.integrate(Var::th, Var::s, dom.b);
  RPoly val = inner.integrate(Var::s, dom.a, dom.b);
  return std::sqrt(to_double(
      val.eval({std::nullopt, std::nullopt, std::nullopt, std::nullopt})));
}

}  // namespace detail

/// Upper bound on the L2-induced operator norm of a 1x1 operator:
/// sup_s |R0(s)| + ||R1||_HS + ||R2||_HS. Always >= the true norm; a loose
/// value only weakens a reported decay rate, never soundness.
inline double norm_bound(const RPIOp& op) {
  if (op.rows != 1 || op.cols != 1)
    throw std::invalid_argument("norm_bound needs a 1x1 operator");
  return detail::sup_abs_univariate(op.r0(0, 0), op.dom) +
         detail::hs_norm_lower(op.r1(0, 0), op.dom) +
         detail::hs_norm_upper(op.r2(0, 0), op.dom);
}

}  // namespace qpie
