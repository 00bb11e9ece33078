#pragma once

#include <stdexcept>
#include <utility>

#include "qpie/pi_operator.hpp"

namespace qpie {

/// Quadratic integral operator taking w in L2 of the square to L2 of the
/// interval:
///   (B w)(s) = int_a^s int_a^th B1(s,th,et) w(th,et) det dth
///            + int_s^b int_a^s  B2(s,th,et) w(th,et) det dth
///            + int_s^b int_s^th B3(s,th,et) w(th,et) det dth.
/// The three regions are the ordered sets {et<=th<=s}, {et<=s<=th} and
/// {s<=et<=th}; every kernel is stored in this one normal form, so operator
/// equality is plain polynomial equality.
template <class C>
struct TensorPIOp {
  Interval dom;
  Poly<C> B1, B2, B3;

  explicit TensorPIOp(Interval d) : dom(std::move(d)) {}
  TensorPIOp(Interval d, Poly<C> b1, Poly<C> b2, Poly<C> b3)
      : dom(std::move(d)),
        B1(std::move(b1)),
        B2(std::move(b2)),
        B3(std::move(b3)) {
    for (const Poly<C>* p : {&B1, &B2, &B3})
      if (p->depends_on(Var::ze))
        throw std::invalid_argument("tensor kernel uses (s, th, et) only");
  }

  bool is_zero() const {
    return B1.is_zero() && B2.is_zero() && B3.is_zero();
  }
  static TensorPIOp zero(const Interval& d) { return TensorPIOp(d); }
};

using RTensorPIOp = TensorPIOp<Rat>;

/// Linear functional on L2 of the cube, supported on the ordered simplex:
///   w -> int_a^b int_a^s int_a^th K(s,th,et) w(s,th,et) det dth ds.
/// The ordered simplex is a fundamental domain for argument reordering, so
/// the representing kernel is unique and "functional == 0" is exactly
/// "K == 0".
template <class C>
struct SimplexFunctional {
  Interval dom;
  Poly<C> K;

  explicit SimplexFunctional(Interval d) : dom(std::move(d)) {}
  SimplexFunctional(Interval d, Poly<C> k)
      : dom(std::move(d)), K(std::move(k)) {
    if (K.depends_on(Var::ze))
      throw std::invalid_argument("simplex kernel uses (s, th, et) only");
  }

  bool is_zero() const { return K.is_zero(); }
};

using RSimplexFunctional = SimplexFunctional<Rat>;

/// Rank-one symmetric tensor (v (x) v)(th, et) = v(th) v(et) for a test
/// function v of s.
template <class C>
Poly<C> tensor_state(const Poly<C>& v) {
  if (v.depends_on(Var::th) || v.depends_on(Var::et) || v.depends_on(Var::ze))
    throw std::invalid_argument("test function must depend on s only");
  Poly<C> vth = v.permuted({Var::th, Var::s, Var::et, Var::ze});
  Poly<C> vet = v.permuted({Var::et, Var::th, Var::s, Var::ze});
  return vth * vet;
}

/// Symmetrized tensor product of two integral-only operators: the unique
/// TensorPIOp with (T (x) R)[v (x) v] = (T v)(R v) pointwise.
template <class C>
TensorPIOp<C> tensor_product(const PIOp<C>& T, const PIOp<C>& R) {
  if (T.rows != 1 || T.cols != 1 || R.rows != 1 || R.cols != 1)
    throw std::invalid_argument("tensor_product needs 1x1 operands");
  if (!(T.dom == R.dom))
    throw std::invalid_argument("tensor_product: domain mismatch");
  if (!T.is_pi2() || !R.is_pi2())
    throw std::invalid_argument(
        "tensor_product needs operands with no multiplier part");
  // second kernel argument moved to et
  auto to_eta = [](const Poly<C>& p) {
    return p.permuted({Var::s, Var::et, Var::th, Var::ze});
  };
  const Poly<C>& T1 = T.r1(0, 0);
  const Poly<C>& T2 = T.r2(0, 0);
  const Poly<C>& R1 = R.r1(0, 0);
  const Poly<C>& R2 = R.r2(0, 0);
  TensorPIOp<C> Q(T.dom);
  Q.B1 = T1 * to_eta(R1) + to_eta(T1) * R1;
  Q.B2 = T2 * to_eta(R1) + to_eta(T1) * R2;
  Q.B3 = T2 * to_eta(R2) + to_eta(T2) * R2;
  return Q;
}

/// Exact action on a symmetric tensor w(th, et).
template <class C>
Poly<C> apply_tensor(const TensorPIOp<C>& B, const Poly<C>& w) {
  if (w.depends_on(Var::s) || w.depends_on(Var::ze))
    throw std::invalid_argument("tensor state uses (th, et) only");
  const Rat& a = B.dom.a;
  const Rat& b = B.dom.b;
  Poly<C> out;
  out = out + (B.B1 * w).integrate(Var::et, a, Var::th)
                  .integrate(Var::th, a, Var::s);
  out = out + (B.B2 * w).integrate(Var::et, a, Var::s)
                  .integrate(Var::th, Var::s, b);
  out = out + (B.B3 * w).integrate(Var::et, Var::s, Var::th)
                  .integrate(Var::th, Var::s, b);
  return out;
}

/// Composition of a multiplier-plus-integral operator into the quadratic
/// class: G = Q o B as an operator identity on L2 of the square. Derived by
/// region splitting of the intermediate variable; the apply-oracle tests are
/// authoritative if a parameter map is ever in doubt.
template <class C>
TensorPIOp<C> compose_3pi_tensor(const PIOp<C>& Q, const TensorPIOp<C>& B) {
  if (Q.rows != 1 || Q.cols != 1)
    throw std::invalid_argument("compose_3pi_tensor needs a 1x1 operator");
  if (!(Q.dom == B.dom))
    throw std::invalid_argument("compose_3pi_tensor: domain mismatch");
  const Rat& a = Q.dom.a;
  const Rat& b = Q.dom.b;
  // Q kernels with the integration variable in ze: Qi(s, ze)
  auto q_at_zeta = [](const Poly<C>& p) {
    return p.permuted({Var::s, Var::ze, Var::et, Var::th});
  };
  // B kernels with the first argument in ze: Bj(ze, th, et)
  auto b_at_zeta = [](const Poly<C>& p) {
    return p.permuted({Var::ze, Var::th, Var::et, Var::s});
  };
  const Poly<C> Q1 = q_at_zeta(Q.r1(0, 0));
  const Poly<C> Q2 = q_at_zeta(Q.r2(0, 0));
  const std::array<Poly<C>, 3> Bz = {b_at_zeta(B.B1), b_at_zeta(B.B2),
                                     b_at_zeta(B.B3)};
  // r(i,j) = Qi(s,ze) * Bj(ze,th,et), to be integrated over ze
  auto r = [&](int i, int j) { return (i == 1 ? Q1 : Q2) * Bz[j - 1]; };
  const Poly<C>& q0 = Q.r0(0, 0);

  TensorPIOp<C> G(Q.dom);
  G.B1 = q0 * B.B1 +
         r(1, 3).integrate(Var::ze, a, Var::et) +
         r(1, 2).integrate(Var::ze, Var::et, Var::th) +
         r(1, 1).integrate(Var::ze, Var::th, Var::s) +
         r(2, 1).integrate(Var::ze, Var::s, b);
  G.B2 = q0 * B.B2 +
         r(1, 3).integrate(Var::ze, a, Var::et) +
         r(1, 2).integrate(Var::ze, Var::et, Var::s) +
         r(2, 2).integrate(Var::ze, Var::s, Var::th) +
         r(2, 1).integrate(Var::ze, Var::th, b);
  G.B3 = q0 * B.B3 +
         r(1, 3).integrate(Var::ze, a, Var::s) +
         r(2, 3).integrate(Var::ze, Var::s, Var::et) +
         r(2, 2).integrate(Var::ze, Var::et, Var::th) +
         r(2, 1).integrate(Var::ze, Var::th, b);
  return G;
}

template <class C>
TensorPIOp<C> add_scaled(const TensorPIOp<C>& A, const TensorPIOp<C>& B,
                         const Rat& lambda) {
  if (!(A.dom == B.dom))
    throw std::invalid_argument("tensor add: domain mismatch");
  TensorPIOp<C> r(A.dom);
  r.B1 = A.B1 + B.B1.scaled(lambda);
  r.B2 = A.B2 + B.B2.scaled(lambda);
  r.B3 = A.B3 + B.B3.scaled(lambda);
  return r;
}

template <class C>
TensorPIOp<C> operator+(const TensorPIOp<C>& A, const TensorPIOp<C>& B) {
  return add_scaled(A, B, Rat(1));
}

template <class C>
TensorPIOp<C> scaled(const TensorPIOp<C>& A, const Rat& lambda) {
  TensorPIOp<C> r(A.dom);
  r.B1 = A.B1.scaled(lambda);
  r.B2 = A.B2.scaled(lambda);
  r.B3 = A.B3.scaled(lambda);
  return r;
}

/// The linear functional w -> <v, G[v (x) v]> (v the diagonal of w's first
/// slot), collapsed onto the ordered simplex. Because the simplex kernel is
/// unique, this functional vanishes identically iff the kernel is the zero
/// polynomial.
template <class C>
SimplexFunctional<C> klin(const TensorPIOp<C>& G) {
  SimplexFunctional<C> K(G.dom);
  // arguments reordered so every region lands on {et <= th <= s}
  Poly<C> g2 = G.B2.permuted({Var::th, Var::s, Var::et, Var::ze});
  Poly<C> g3 = G.B3.permuted({Var::et, Var::s, Var::th, Var::ze});
  K.K = G.B1 + g2 + g3;
  return K;
}

template <class C>
SimplexFunctional<C> add_scaled(const SimplexFunctional<C>& A,
                                const SimplexFunctional<C>& B,
                                const Rat& lambda) {
  if (!(A.dom == B.dom))
    throw std::invalid_argument("functional add: domain mismatch");
  SimplexFunctional<C> r(A.dom);
  r.K = A.K + B.K.scaled(lambda);
  return r;
}

/// Exact evaluation on the rank-one tensor v (x) v (x) v.
template <class C>
C klin_apply(const SimplexFunctional<C>& K, const Poly<C>& v) {
  if (v.depends_on(Var::th) || v.depends_on(Var::et) || v.depends_on(Var::ze))
    throw std::invalid_argument("test function must depend on s only");
  Poly<C> vth = v.permuted({Var::th, Var::s, Var::et, Var::ze});
  Poly<C> vet = v.permuted({Var::et, Var::th, Var::s, Var::ze});
  Poly<C> integrand = K.K * v * vth * vet;
  Poly<C> val = integrand.integrate(Var::et, K.dom.a, Var::th)
                    .integrate(Var::th, K.dom.a, Var::s)
                    .integrate(Var::s, K.dom.a, K.dom.b);
  return val.eval({std::nullopt, std::nullopt, std::nullopt, std::nullopt});
}

/// Thrown when the cubic term vanishes at v and no scaling of v can expose
/// a positivity violation.
struct NoScalingWitness : std::domain_error {
  NoScalingWitness()
      : std::domain_error("cubic term vanishes at this v; no witness") {}
};

/// Given a quadratic form <v, Qop v> plus the cubic term 2<v, G[v (x) v]>,
/// returns a scaled copy vh of v with
///   <vh, Qop vh> + 2 <vh, G[vh (x) vh]> > 0,
/// proving the combined functional cannot be nonpositive when the cubic term
/// is alive at v. The scale factor is closed-form; no search.
inline RPoly scaling_witness(const RPIOp& Qop, const RTensorPIOp& G,
                             const RPoly& v) {
  Rat c = klin_apply(klin(G), v);
  if (c == 0) throw NoScalingWitness();
  RPoly vv = v;
  if (c < 0) {  // cubic term is odd in v
    vv = -v;
    c = -c;
  }
  Rat q = l2_inner(vv, apply(Qop, vv), Qop.dom);
  // total at scale lam is lam^2 (q + 2 lam c); c > 0 here
  Rat lam = q >= 0 ? Rat(1) : -q / c;
  return vv.scaled(lam);
}

}  // namespace qpie
