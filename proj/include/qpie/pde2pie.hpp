#pragma once

#include <tuple>
#include <vector>

#include "qpie/pi_operator.hpp"
#include "qpie/rational_linalg.hpp"
#include "qpie/tensor_pi.hpp"

namespace qpie {

/// A scalar quadratic PDE
///   u_t = sum_{i=0}^{N} alpha_i(s) d_s^i u
///       + sum_{0 <= j <= i <= N-1} beta_ij(s) (d_s^i u)(d_s^j u)
/// on domain [a,b], with N homogeneous linear boundary conditions
///   bc * [u(a); u'(a); ...; u^(N-1)(a); u(b); ...; u^(N-1)(b)] = 0.
struct PDESpec {
  int N = 0;
  Interval dom{Rat(0), Rat(1)};
  std::vector<RPoly> alpha;                       // N+1 entries, in s
  std::vector<std::tuple<int, int, RPoly>> beta;  // (i, j, coeff in s)
  RatMat bc;                                      // N x 2N

  void validate() const {
    if (N < 1) throw std::invalid_argument("order must be >= 1");
    if (static_cast<int>(alpha.size()) != N + 1)
      throw std::invalid_argument("alpha must list N+1 coefficients");
    for (const auto& [i, j, p] : beta)
      if (!(0 <= j && j <= i && i <= N - 1))
        throw std::invalid_argument("beta indices need 0 <= j <= i <= N-1");
    if (static_cast<int>(bc.size()) != N)
      throw std::invalid_argument("bc must have N rows");
    for (const auto& row : bc)
      if (static_cast<int>(row.size()) != 2 * N)
        throw std::invalid_argument("bc rows must have 2N columns");
    for (const auto& p : alpha)
      if (p.depends_on(Var::th) || p.depends_on(Var::et) ||
          p.depends_on(Var::ze))
        throw std::invalid_argument("alpha coefficients depend on s only");
    for (const auto& [i, j, p] : beta)
      if (p.depends_on(Var::th) || p.depends_on(Var::et) ||
          p.depends_on(Var::ze))
        throw std::invalid_argument("beta coefficients depend on s only");
  }
};

/// The equivalent integral-equation form d_t (T v) = A v + B[v (x) v] in the
/// fundamental state v = d_s^N u. Rj[j] maps v to d_s^j u; T = Rj[0].
struct PIESpec {
  Interval dom;
  RPIOp T;
  std::vector<RPIOp> Rj;
  RPIOp A;
  RTensorPIOp B;

  explicit PIESpec(const Interval& d)
      : dom(d), T(1, 1, d), A(1, 1, d), B(d) {}
};

/// Intermediate data of the boundary reduction: with c the vector of
/// derivatives u^(k)(a), Taylor expansion gives
///   D^{N-1}u(b) = M c + int_a^b Lambda(th) v(th) dth,
/// and the boundary conditions collapse to BT c = -Bb int Lambda v.
struct BoundaryReduction {
  RatMat M;                    // N x N, entries (b-a)^{k-j}/(k-j)!
  std::vector<RPoly> Lambda;   // N entries in th: (b-th)^{N-1-j}/(N-1-j)!
  RatMat Bb;                   // right half of bc
  RatMat BT;                   // Ba + Bb * M
};

namespace detail {

inline Rat factorial(int n) {
  Rat f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline RPoly poly_pow(const RPoly& p, int n) {
  RPoly r = pconst(1);
  for (int k = 0; k < n; ++k) r = r * p;
  return r;
}

inline BoundaryReduction boundary_reduction(const PDESpec& spec) {
  const int N = spec.N;
  const Rat& a = spec.dom.a;
  const Rat& b = spec.dom.b;
  BoundaryReduction red;
  red.M = RatMat(N, std::vector<Rat>(N, Rat(0)));
  for (int j = 0; j < N; ++j)
    for (int k = j; k < N; ++k) {
      Rat pw = 1;
      for (int t = 0; t < k - j; ++t) pw *= (b - a);
      red.M[j][k] = pw / factorial(k - j);
    }
  red.Lambda.resize(N);
  RPoly bth = pconst(b) - pvar(Var::th);
  for (int j = 0; j < N; ++j)
    red.Lambda[j] =
        poly_pow(bth, N - 1 - j).scaled(1 / factorial(N - 1 - j));
  RatMat Ba(N, std::vector<Rat>(N)), Bb(N, std::vector<Rat>(N));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Ba[i][j] = spec.bc[i][j];
      Bb[i][j] = spec.bc[i][N + j];
    }
  red.Bb = Bb;
  red.BT = rat_matmul(Bb, red.M);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) red.BT[i][j] += Ba[i][j];
  return red;
}

}  // namespace detail

/// The boundary conditions admit a unique reconstruction of u from
/// v = d_s^N u iff the reduced boundary matrix is invertible.
inline bool check_wellposed(const PDESpec& spec) {
  spec.validate();
  return rat_inverse(detail::boundary_reduction(spec).BT).has_value();
}

/// Builds the derivative-reconstruction maps: Rj[j] v = d_s^j u where u is
/// the unique function with d_s^N u = v satisfying the boundary conditions.
inline std::vector<RPIOp> construct_maps(const PDESpec& spec) {
  spec.validate();
  const int N = spec.N;
  const Rat& a = spec.dom.a;
  BoundaryReduction red = detail::boundary_reduction(spec);
  auto inv = rat_inverse(red.BT);
  if (!inv)
    throw std::domain_error(
        "boundary conditions do not determine the state: reduced boundary "
        "matrix is singular");
  // w(th) = BT^{-1} Bb Lambda(th), the sensitivity of the derivative vector
  // at a to the load produced by v
  RatMat S = rat_matmul(*inv, red.Bb);
  std::vector<RPoly> w(N);
  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l)
      w[k] = w[k] + red.Lambda[l].scaled(S[k][l]);

  RPoly sa = pvar(Var::s) - pconst(a);
  RPoly smth = pvar(Var::s) - pvar(Var::th);
  std::vector<RPIOp> maps;
  maps.reserve(N);
  for (int j = 0; j < N; ++j) {
    // e_j(s)^T c with c = -S int Lambda v
    RPoly corr;  // the kernel -e_j(s)^T w(th), common to both regions
    for (int k = j; k < N; ++k) {
      RPoly ejk =
          detail::poly_pow(sa, k - j).scaled(1 / detail::factorial(k - j));
      corr = corr - ejk * w[k];
    }
    RPoly taylor =
        detail::poly_pow(smth, N - 1 - j)
            .scaled(1 / detail::factorial(N - 1 - j));
    RPIOp Rj(1, 1, spec.dom);
    Rj.r1(0, 0) = taylor + corr;
    Rj.r2(0, 0) = corr;
    maps.push_back(std::move(Rj));
  }
  return maps;
}

/// Full conversion: the PDE and its boundary conditions become
/// d_t (T v) = A v + B[v (x) v] with A = sum_i M_{alpha_i} Rj[i]
/// (Rj[N] = identity) and B = sum_ij M_{beta_ij} (Rj[i] (x) Rj[j]).
inline PIESpec assemble_pie(const PDESpec& spec) {
  PIESpec pie(spec.dom);
  pie.Rj = construct_maps(spec);
  pie.T = pie.Rj[0];

  RPIOp A = RPIOp::zero(spec.dom);
  for (int i = 0; i <= spec.N; ++i) {
    if (spec.alpha[i].is_zero()) continue;
    RPIOp Ri = i == spec.N ? RPIOp::identity(spec.dom) : pie.Rj[i];
    A = A + compose(RPIOp::multiplier(spec.alpha[i], spec.dom), Ri);
  }
  pie.A = A;

  RTensorPIOp B = RTensorPIOp::zero(spec.dom);
  for (const auto& [i, j, coeff] : spec.beta) {
    if (coeff.is_zero()) continue;
    RTensorPIOp term = compose_3pi_tensor(
        RPIOp::multiplier(coeff, spec.dom), tensor_product(pie.Rj[i],
                                                           pie.Rj[j]));
    B = B + term;
  }
  pie.B = B;
  return pie;
}

}  // namespace qpie
