#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qpie/pde2pie.hpp"

namespace qpie {
namespace benchmarks {

/// u_t = u_ss + r u - u u_s on [0,1], u(0) = u(1) = 0.
inline PDESpec burgers(const Rat& r) {
  PDESpec spec;
  spec.N = 2;
  spec.dom = Interval(Rat(0), Rat(1));
  spec.alpha = {pconst(r), RPoly(), pconst(1)};
  spec.beta = {{1, 0, pconst(-1)}};
  spec.bc = {{Rat(1), Rat(0), Rat(0), Rat(0)},
             {Rat(0), Rat(0), Rat(1), Rat(0)}};
  return spec;
}

/// u_t = -u_sss + u (r u + 6 u_s) on [0,1], u(0) = u(1) = u_s(1) = 0.
inline PDESpec kdv(const Rat& r) {
  PDESpec spec;
  spec.N = 3;
  spec.dom = Interval(Rat(0), Rat(1));
  spec.alpha = {RPoly(), RPoly(), RPoly(), pconst(-1)};
  spec.beta = {{0, 0, pconst(r)}, {1, 0, pconst(6)}};
  spec.bc = {{Rat(1), Rat(0), Rat(0), Rat(0), Rat(0), Rat(0)},
             {Rat(0), Rat(0), Rat(0), Rat(1), Rat(0), Rat(0)},
             {Rat(0), Rat(0), Rat(0), Rat(0), Rat(1), Rat(0)}};
  return spec;
}

/// u_t = -u_ssss - u_ss - u (r u + u_s) on [0,1], clamped:
/// u(0) = u(1) = u_s(0) = u_s(1) = 0.
inline PDESpec kse(const Rat& r) {
  PDESpec spec;
  spec.N = 4;
  spec.dom = Interval(Rat(0), Rat(1));
  spec.alpha = {RPoly(), RPoly(), pconst(-1), RPoly(), pconst(-1)};
  spec.beta = {{0, 0, pconst(-r)}, {1, 0, pconst(-1)}};
  spec.bc = RatMat(4, std::vector<Rat>(8, Rat(0)));
  spec.bc[0][0] = 1;  // u(0)
  spec.bc[1][4] = 1;  // u(1)
  spec.bc[2][1] = 1;  // u_s(0)
  spec.bc[3][5] = 1;  // u_s(1)
  return spec;
}

inline PDESpec build(const std::string& name, const Rat& r) {
  if (name == "burgers") return burgers(r);
  if (name == "kdv") return kdv(r);
  if (name == "kse") return kse(r);
  throw std::invalid_argument("unknown benchmark: " + name);
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n = {"burgers", "kdv", "kse"};
  return n;
}

namespace detail {
inline double bisect(double lo, double hi, double (*f)(double)) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-8; ++it) {
    double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0) == (flo < 0)) {
      lo = mid;
      flo = f(mid);
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}
}  // namespace detail

/// Largest r with r^2 e^{r/2} <= 12 pi^2: the closed-form conservative
/// stability bound for the modified third-order benchmark.
inline double analytic_kdv_bound() {
  return detail::bisect(0.0, 10.0, +[](double r) {
    return r * r * std::exp(r / 2) - 12 * M_PI * M_PI;
  });
}

/// Largest r with e^{3r} (18 r^2 + 1) <= pi^2: the closed-form conservative
/// bound for the fourth-order benchmark.
inline double analytic_kse_bound() {
  return detail::bisect(0.0, 2.0, +[](double r) {
    return std::exp(3 * r) * (18 * r * r + 1) - M_PI * M_PI;
  });
}

/// Compares the constructed derivative maps of all three benchmark systems
/// against their independently tabulated closed-form kernels. Returns one
/// message per mismatching kernel; empty means everything agrees exactly.
inline std::vector<std::string> fixture_check() {
  std::vector<std::string> bad;
  RPoly s = pvar(Var::s), th = pvar(Var::th), one = pconst(1);
  auto expect = [&bad](const std::string& what, const RPoly& got,
                       const RPoly& want) {
    if (got != want)
      bad.push_back(what + ": got " + to_string(got) + ", want " +
                    to_string(want));
  };

  {
    auto maps = construct_maps(burgers(Rat(0)));
    expect("burgers T lower", maps[0].r1(0, 0), (s - one) * th);
    expect("burgers T upper", maps[0].r2(0, 0), s * (th - one));
    expect("burgers R lower", maps[1].r1(0, 0), th);
    expect("burgers R upper", maps[1].r2(0, 0), th - one);
  }
  {
    auto maps = construct_maps(kdv(Rat(0)));
    RPoly full_t = rat(1, 2) * (s - one) * (s - one) * th * th;
    expect("kdv T lower", maps[0].r1(0, 0), full_t);
    expect("kdv T upper", maps[0].r2(0, 0),
           full_t - rat(1, 2) * (s - th) * (s - th));
    RPoly full_r = (s - one) * th * th;
    expect("kdv R lower", maps[1].r1(0, 0), full_r);
    expect("kdv R upper", maps[1].r2(0, 0), full_r - (s - th));
  }
  {
    auto maps = construct_maps(kse(Rat(0)));
    RPoly two_s_th = rat(2) * s * th;
    expect("kse T lower", maps[0].r1(0, 0),
           rat(-1, 6) * (s - one) * (s - one) * th * th *
               (two_s_th - rat(3) * s + th));
    expect("kse T upper", maps[0].r2(0, 0),
           rat(-1, 6) * (th - one) * (th - one) * s * s *
               (two_s_th - rat(3) * th + s));
    expect("kse R1 lower", maps[1].r1(0, 0),
           rat(-1, 2) * (s - one) * th * th *
               (two_s_th - rat(3) * s + one));
    expect("kse R1 upper", maps[1].r2(0, 0),
           rat(-1, 2) * s * (th - one) * (th - one) *
               (two_s_th + s - rat(2) * th));
    expect("kse R2 lower", maps[2].r1(0, 0),
           -th * th * (two_s_th - rat(3) * s - th + rat(2) * one));
    expect("kse R2 upper", maps[2].r2(0, 0),
           -(th - one) * (th - one) * (two_s_th + s - th));
  }
  return bad;
}

}  // namespace benchmarks
}  // namespace qpie
