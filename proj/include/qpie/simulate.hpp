#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpie/gauss_legendre.hpp"
#include "qpie/pde2pie.hpp"

namespace qpie {

/// Small dense double matrix, row-major.
struct DMat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  DMat() = default;
  DMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const {
    return a[static_cast<size_t>(i) * cols + j];
  }

  static DMat identity(int n) {
    DMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline std::vector<double> matvec(const DMat& m, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != m.cols)
    throw std::invalid_argument("matvec: size mismatch");
  std::vector<double> out(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double acc = 0;
    const double* row = &m.a[static_cast<size_t>(i) * m.cols];
    for (int j = 0; j < m.cols; ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
  return out;
}

inline DMat matmul(const DMat& A, const DMat& B) {
  if (A.cols != B.rows) throw std::invalid_argument("matmul: size mismatch");
  DMat C(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      double aik = A(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
    }
  return C;
}

/// LU factorization with partial pivoting; throws on (numerical)
/// singularity so callers get a diagnostic instead of NaNs.
struct LUFactor {
  int n = 0;
  std::vector<double> lu;
  std::vector<int> piv;

  explicit LUFactor(const DMat& m) : n(m.rows), lu(m.a), piv(m.rows) {
    if (m.rows != m.cols) throw std::invalid_argument("LU needs square matrix");
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::abs(lu[static_cast<size_t>(k) * n + k]);
      for (int i = k + 1; i < n; ++i) {
        double v = std::abs(lu[static_cast<size_t>(i) * n + k]);
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best < 1e-300)
        throw std::runtime_error(
            "singular matrix in LU factorization (pivot ~ 0 at column " +
            std::to_string(k) + ")");
      if (p != k) {
        for (int j = 0; j < n; ++j)
          std::swap(lu[static_cast<size_t>(k) * n + j],
                    lu[static_cast<size_t>(p) * n + j]);
        std::swap(piv[k], piv[p]);
      }
      double pivval = lu[static_cast<size_t>(k) * n + k];
      for (int i = k + 1; i < n; ++i) {
        double f = lu[static_cast<size_t>(i) * n + k] / pivval;
        lu[static_cast<size_t>(i) * n + k] = f;
        for (int j = k + 1; j < n; ++j)
          lu[static_cast<size_t>(i) * n + j] -=
              f * lu[static_cast<size_t>(k) * n + j];
      }
    }
  }

  std::vector<double> solve(const std::vector<double>& b) const {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[piv[i]];
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j) x[i] -= lu[static_cast<size_t>(i) * n + j] * x[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j)
        x[i] -= lu[static_cast<size_t>(i) * n + j] * x[j];
      x[i] /= lu[static_cast<size_t>(i) * n + i];
    }
    return x;
  }
};

namespace detail {

inline double ipow(double x, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= x;
  return r;
}

/// Evaluate a kernel polynomial in (s, th, et) at double arguments.
inline double eval3(const RPoly& p, double s, double th, double et) {
  double acc = 0.0;
  for (const auto& [e, c] : p.terms()) {
    if (e[3] != 0)
      throw std::invalid_argument("kernel unexpectedly depends on ze");
    acc += to_double(c) * ipow(s, e[0]) * ipow(th, e[1]) * ipow(et, e[2]);
  }
  return acc;
}

/// Barycentric weights of an interpolation node set.
inline std::vector<double> barycentric_weights(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> w(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) w[j] /= (x[j] - x[k]);
  return w;
}

/// All Lagrange cardinal polynomials evaluated at t (barycentric form).
inline std::vector<double> lagrange_all(const std::vector<double>& x,
                                        const std::vector<double>& bw,
                                        double t) {
  const int n = static_cast<int>(x.size());
  std::vector<double> L(n, 0.0);
  for (int j = 0; j < n; ++j)
    if (t == x[j]) {
      L[j] = 1.0;
      return L;
    }
  double denom = 0.0;
  for (int j = 0; j < n; ++j) {
    L[j] = bw[j] / (t - x[j]);
    denom += L[j];
  }
  for (int j = 0; j < n; ++j) L[j] /= denom;
  return L;
}

/// Spectral differentiation matrix on the node set.
inline DMat diff_matrix(const std::vector<double>& x,
                        const std::vector<double>& bw) {
  const int n = static_cast<int>(x.size());
  DMat D(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      D(i, j) = (bw[j] / bw[i]) / (x[i] - x[j]);
      diag -= D(i, j);
    }
    D(i, i) = diag;
  }
  return D;
}

}  // namespace detail

/// Collocation discretization of a PIESpec on n Gauss–Legendre nodes. The
/// matrices act on nodal values of degree-(n-1) interpolants; split
/// integrals are evaluated with quadrature rules sized so the polynomial
/// integrands are integrated exactly.
struct Discretization {
  Interval dom{Rat(0), Rat(1)};
  int n = 0;
  std::vector<double> nodes, weights;
  std::vector<double> bary;  // barycentric weights of the node set
  DMat Th, Ah;
  DMat Bh;                   // n x n^2, acts on Kronecker square of v
  std::vector<DMat> Rjh;     // nodal matrices of the derivative maps
  DMat D;                    // spectral differentiation matrix

  double quad_norm(const std::vector<double>& u) const {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += weights[i] * u[i] * u[i];
    return std::sqrt(std::max(acc, 0.0));
  }
};

/// Nodal matrix of a 1x1 PI operator: row i is the exact action on the
/// Lagrange basis evaluated at node i.
inline DMat discretize_op(const RPIOp& op, const Discretization& disc) {
  if (op.rows != 1 || op.cols != 1)
    throw std::invalid_argument("discretize_op needs a scalar operator");
  const int n = disc.n;
  const double a = to_double(op.dom.a);
  const double b = to_double(op.dom.b);
  const RPoly& R0 = op.r0(0, 0);
  const RPoly& R1 = op.r1(0, 0);
  const RPoly& R2 = op.r2(0, 0);
  int dth = std::max(R1.degree_in(Var::th), R2.degree_in(Var::th));
  int m = (dth + n) / 2 + 1;
  QuadRule ref = gauss_legendre(m);

  DMat M(n, n);
  for (int i = 0; i < n; ++i) {
    double si = disc.nodes[i];
    M(i, i) += detail::eval3(R0, si, 0, 0);
    auto add_segment = [&](const RPoly& ker, double lo, double hi) {
      if (ker.is_zero() || hi <= lo) return;
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (int q = 0; q < m; ++q) {
        double th = mid + half * ref.x[q];
        double c = half * ref.w[q] * detail::eval3(ker, si, th, 0);
        if (c == 0) continue;
        std::vector<double> L = detail::lagrange_all(disc.nodes, disc.bary, th);
        for (int j = 0; j < n; ++j) M(i, j) += c * L[j];
      }
    };
    add_segment(R1, a, si);
    add_segment(R2, si, b);
  }
  return M;
}

/// Nodal matrix (n x n^2) of the quadratic integral operator: column j*n+k
/// holds the action on the Lagrange product l_j(th) l_k(et).
inline DMat discretize_tensor(const RTensorPIOp& B, const Discretization& disc) {
  const int n = disc.n;
  const double a = to_double(B.dom.a);
  const double b = to_double(B.dom.b);
  int dth = 0, det = 0;
  for (const RPoly* k : {&B.B1, &B.B2, &B.B3}) {
    dth = std::max(dth, k->degree_in(Var::th));
    det = std::max(det, k->degree_in(Var::et));
  }
  // outer integrand degree in th after exact inner integration
  int m_th = (dth + det + 2 * n) / 2 + 1;
  int m_et = (det + n) / 2 + 1;
  QuadRule ref_th = gauss_legendre(m_th);
  QuadRule ref_et = gauss_legendre(m_et);

  DMat M(n, n * n);
  std::vector<double> acc(static_cast<size_t>(n) * n);
  // region selector: inner limits as functions of the outer point
  enum class Lo { A, S };
  enum class Hi { S, Th };
  auto add_region = [&](int i, const RPoly& ker, double th_lo, double th_hi,
                        Lo lo_kind, Hi hi_kind) {
    if (ker.is_zero() || th_hi <= th_lo) return;
    double si = disc.nodes[i];
    double* row = &M.a[static_cast<size_t>(i) * n * n];
    double mid_o = 0.5 * (th_lo + th_hi), half_o = 0.5 * (th_hi - th_lo);
    for (int qo = 0; qo < m_th; ++qo) {
      double th = mid_o + half_o * ref_th.x[qo];
      double wo = half_o * ref_th.w[qo];
      double et_lo = (lo_kind == Lo::A) ? a : si;
      double et_hi = (hi_kind == Hi::S) ? si : th;
      if (et_hi <= et_lo) continue;
      std::vector<double> Lth =
          detail::lagrange_all(disc.nodes, disc.bary, th);
      double mid_i = 0.5 * (et_lo + et_hi), half_i = 0.5 * (et_hi - et_lo);
      for (int qi = 0; qi < m_et; ++qi) {
        double et = mid_i + half_i * ref_et.x[qi];
        double c = wo * half_i * ref_et.w[qi] * detail::eval3(ker, si, th, et);
        if (c == 0) continue;
        std::vector<double> Let =
            detail::lagrange_all(disc.nodes, disc.bary, et);
        for (int j = 0; j < n; ++j) {
          double cj = c * Lth[j];
          if (cj == 0) continue;
          double* cell = row + static_cast<size_t>(j) * n;
          for (int k = 0; k < n; ++k) cell[k] += cj * Let[k];
        }
      }
    }
  };
  for (int i = 0; i < n; ++i) {
    double si = disc.nodes[i];
    add_region(i, B.B1, a, si, Lo::A, Hi::Th);   // et <= th <= s
    add_region(i, B.B2, si, b, Lo::A, Hi::S);    // et <= s <= th
    add_region(i, B.B3, si, b, Lo::S, Hi::Th);   // s <= et <= th
  }
  return M;
}

inline Discretization discretize(const PIESpec& pie, int n) {
  if (n < 4) throw std::invalid_argument("discretize needs n >= 4");
  Discretization disc;
  disc.dom = pie.dom;
  disc.n = n;
  QuadRule q = gauss_legendre(n, to_double(pie.dom.a), to_double(pie.dom.b));
  disc.nodes = q.x;
  disc.weights = q.w;
  disc.bary = detail::barycentric_weights(disc.nodes);
  disc.D = detail::diff_matrix(disc.nodes, disc.bary);
  disc.Th = discretize_op(pie.T, disc);
  disc.Ah = discretize_op(pie.A, disc);
  disc.Bh = discretize_tensor(pie.B, disc);
  for (const RPIOp& R : pie.Rj) disc.Rjh.push_back(discretize_op(R, disc));
  try {
    LUFactor lu(disc.Th);
  } catch (const std::runtime_error&) {
    throw std::runtime_error(
        "discretized state map is singular at n = " + std::to_string(n) +
        "; the problem may be ill-posed or n too small");
  }
  return disc;
}

/// Quadratic term Bh (v (x) v).
inline std::vector<double> quadratic_term(const Discretization& disc,
                                          const std::vector<double>& v) {
  const int n = disc.n;
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* row = &disc.Bh.a[static_cast<size_t>(i) * n * n];
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (v[j] == 0) continue;
      const double* cell = row + static_cast<size_t>(j) * n;
      double inner = 0.0;
      for (int k = 0; k < n; ++k) inner += cell[k] * v[k];
      acc += v[j] * inner;
    }
    out[i] = acc;
  }
  return out;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> v;  // fundamental state at nodes
  std::vector<std::vector<double>> u;  // reconstructed solution Th v
  std::vector<double> unorm;           // quadrature L2 norm of u
  bool blew_up = false;
  std::string diagnostic;
};

/// Semi-implicit time stepping of Th v' = Ah v + Bh (v (x) v):
/// Crank–Nicolson on the stiff linear part, 2nd-order Adams–Bashforth on the
/// quadratic term. The startup step uses a semi-implicit predictor followed
/// by a trapezoidal corrector on the quadratic term so the whole scheme
/// stays 2nd order. Halts with a diagnostic if the state norm exceeds 1e8.
inline Trajectory integrate(const Discretization& disc,
                            const std::vector<double>& v0, double t_end,
                            double dt) {
  if (dt <= 0) throw std::invalid_argument("integrate needs dt > 0");
  if (static_cast<int>(v0.size()) != disc.n)
    throw std::invalid_argument("initial state has wrong dimension");
  const int n = disc.n;
  const int steps = std::max(1, static_cast<int>(std::llround(t_end / dt)));

  DMat lhs_full(n, n), lhs_half(n, n), rhs_half(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      lhs_full(i, j) = disc.Th(i, j) - dt * disc.Ah(i, j);
      lhs_half(i, j) = disc.Th(i, j) - 0.5 * dt * disc.Ah(i, j);
      rhs_half(i, j) = disc.Th(i, j) + 0.5 * dt * disc.Ah(i, j);
    }
  LUFactor lu_full(lhs_full), lu_half(lhs_half);

  Trajectory traj;
  auto record = [&](double t, const std::vector<double>& v) {
    traj.times.push_back(t);
    traj.v.push_back(v);
    traj.u.push_back(matvec(disc.Th, v));
    traj.unorm.push_back(disc.quad_norm(traj.u.back()));
  };
  record(0.0, v0);

  std::vector<double> v = v0;
  std::vector<double> nq_prev = quadratic_term(disc, v);
  for (int k = 0; k < steps; ++k) {
    std::vector<double> nq = quadratic_term(disc, v);
    std::vector<double> rhs(n);
    std::vector<double> vnew;
    if (k == 0) {
      std::vector<double> mv = matvec(disc.Th, v);
      for (int i = 0; i < n; ++i) rhs[i] = mv[i] + dt * nq[i];
      std::vector<double> pred = lu_full.solve(rhs);
      std::vector<double> nq_pred = quadratic_term(disc, pred);
      mv = matvec(rhs_half, v);
      for (int i = 0; i < n; ++i)
        rhs[i] = mv[i] + 0.5 * dt * (nq[i] + nq_pred[i]);
      vnew = lu_half.solve(rhs);
    } else {
      std::vector<double> mv = matvec(rhs_half, v);
      for (int i = 0; i < n; ++i)
        rhs[i] = mv[i] + dt * (1.5 * nq[i] - 0.5 * nq_prev[i]);
      vnew = lu_half.solve(rhs);
    }
    nq_prev = nq;
    v = vnew;
    double vn = 0;
    for (double x : v) vn += x * x;
    vn = std::sqrt(vn);
    record(dt * (k + 1), v);
    if (!(vn <= 1e8)) {
      traj.blew_up = true;
      std::ostringstream msg;
      msg << "state norm " << vn << " exceeded 1e8 at t = " << dt * (k + 1)
          << "; trajectory halted";
      traj.diagnostic = msg.str();
      break;
    }
  }
  return traj;
}

struct LyapunovTrace {
  std::vector<double> V;
  double max_upward_violation = 0.0;  // max relative increase between steps
};

/// Quadrature evaluation of V(t_k) = <u, P u> along a trajectory.
inline LyapunovTrace lyapunov_trace(const Trajectory& traj, const RPIOp& P,
                                    const Discretization& disc) {
  DMat Ph = discretize_op(P, disc);
  LyapunovTrace out;
  out.V.reserve(traj.times.size());
  for (const std::vector<double>& u : traj.u) {
    std::vector<double> Pu = matvec(Ph, u);
    double acc = 0.0;
    for (int i = 0; i < disc.n; ++i) acc += disc.weights[i] * u[i] * Pu[i];
    out.V.push_back(acc);
  }
  for (size_t k = 0; k + 1 < out.V.size(); ++k) {
    double base = std::max(out.V[k], 1e-300);
    out.max_upward_violation =
        std::max(out.max_upward_violation, (out.V[k + 1] - out.V[k]) / base);
  }
  return out;
}

/// Residual of the original PDE along the reconstructed solution:
/// spatial derivatives by spectral differentiation, time derivative by
/// 2nd-order finite differences (one-sided at the endpoints). Returns one
/// quadrature norm per snapshot.
inline std::vector<double> pde_residual(const Trajectory& traj,
                                        const PDESpec& spec,
                                        const Discretization& disc) {
  const int n = disc.n;
  const size_t K = traj.times.size();
  std::vector<double> out(K, 0.0);
  if (K < 3) return out;

  // nodal values of alpha_i and beta_ij coefficients
  std::vector<std::vector<double>> alpha_v(spec.alpha.size(),
                                           std::vector<double>(n));
  for (size_t i = 0; i < spec.alpha.size(); ++i)
    for (int p = 0; p < n; ++p)
      alpha_v[i][p] = detail::eval3(spec.alpha[i], disc.nodes[p], 0, 0);
  std::vector<std::vector<double>> beta_v;
  for (const auto& [bi, bj, bp] : spec.beta) {
    std::vector<double> row(n);
    for (int p = 0; p < n; ++p) row[p] = detail::eval3(bp, disc.nodes[p], 0, 0);
    beta_v.push_back(std::move(row));
  }

  for (size_t k = 0; k < K; ++k) {
    // time derivative of u at snapshot k
    std::vector<double> ut(n);
    if (k == 0) {
      double dt1 = traj.times[1] - traj.times[0];
      double dt2 = traj.times[2] - traj.times[0];
      for (int p = 0; p < n; ++p)
        ut[p] = (-(dt1 + dt2) / (dt1 * dt2) * traj.u[0][p] +
                 dt2 / (dt1 * (dt2 - dt1)) * traj.u[1][p] -
                 dt1 / (dt2 * (dt2 - dt1)) * traj.u[2][p]);
    } else if (k + 1 == K) {
      double dt1 = traj.times[k] - traj.times[k - 1];
      double dt2 = traj.times[k] - traj.times[k - 2];
      for (int p = 0; p < n; ++p)
        ut[p] = ((dt1 + dt2) / (dt1 * dt2) * traj.u[k][p] -
                 dt2 / (dt1 * (dt2 - dt1)) * traj.u[k - 1][p] +
                 dt1 / (dt2 * (dt2 - dt1)) * traj.u[k - 2][p]);
    } else {
      double h = traj.times[k + 1] - traj.times[k - 1];
      for (int p = 0; p < n; ++p)
        ut[p] = (traj.u[k + 1][p] - traj.u[k - 1][p]) / h;
    }

    // spatial derivatives by repeated spectral differentiation
    std::vector<std::vector<double>> du(spec.N + 1);
    du[0] = traj.u[k];
    for (int i = 1; i <= spec.N; ++i) du[i] = matvec(disc.D, du[i - 1]);

    std::vector<double> res(n, 0.0);
    for (int i = 0; i <= spec.N; ++i)
      for (int p = 0; p < n; ++p) res[p] += alpha_v[i][p] * du[i][p];
    for (size_t t = 0; t < spec.beta.size(); ++t) {
      const auto& [bi, bj, bp] = spec.beta[t];
      for (int p = 0; p < n; ++p)
        res[p] += beta_v[t][p] * du[bi][p] * du[bj][p];
    }
    for (int p = 0; p < n; ++p) res[p] -= ut[p];
    out[k] = disc.quad_norm(res);
  }
  return out;
}

/// Exact endpoint trace of a scalar PI operator against the Lagrange basis:
/// row vector t with (R v)(x) = t . v_nodes for nodal interpolants v.
inline std::vector<double> boundary_trace(const RPIOp& op,
                                          const Discretization& disc,
                                          double x) {
  const int n = disc.n;
  const double a = to_double(op.dom.a);
  const double b = to_double(op.dom.b);
  const RPoly& R0 = op.r0(0, 0);
  const RPoly& R1 = op.r1(0, 0);
  const RPoly& R2 = op.r2(0, 0);
  int dth = std::max(R1.degree_in(Var::th), R2.degree_in(Var::th));
  int m = (dth + n) / 2 + 1;
  QuadRule ref = gauss_legendre(m);
  std::vector<double> row(n, 0.0);
  double r0x = detail::eval3(R0, x, 0, 0);
  if (r0x != 0) {
    std::vector<double> L = detail::lagrange_all(disc.nodes, disc.bary, x);
    for (int j = 0; j < n; ++j) row[j] += r0x * L[j];
  }
  auto add_segment = [&](const RPoly& ker, double lo, double hi) {
    if (ker.is_zero() || hi <= lo) return;
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int q = 0; q < m; ++q) {
      double th = mid + half * ref.x[q];
      double c = half * ref.w[q] * detail::eval3(ker, x, th, 0);
      if (c == 0) continue;
      std::vector<double> L = detail::lagrange_all(disc.nodes, disc.bary, th);
      for (int j = 0; j < n; ++j) row[j] += c * L[j];
    }
  };
  add_segment(R1, a, x);
  add_segment(R2, x, b);
  return row;
}

/// Boundary-condition residual of a snapshot of the fundamental state: max
/// row of bc * [u(a) ... u^(N-1)(a); u(b) ... u^(N-1)(b)], with the
/// endpoint derivative values computed exactly from the derivative maps.
inline double bc_residual(const std::vector<double>& v, const PIESpec& pie,
                          const PDESpec& spec, const Discretization& disc) {
  const int N = spec.N;
  const double a = to_double(spec.dom.a);
  const double b = to_double(spec.dom.b);
  std::vector<double> trace(2 * N, 0.0);
  for (int k = 0; k < N; ++k) {
    std::vector<double> ta = boundary_trace(pie.Rj[k], disc, a);
    std::vector<double> tb = boundary_trace(pie.Rj[k], disc, b);
    for (int p = 0; p < disc.n; ++p) {
      trace[k] += ta[p] * v[p];
      trace[N + k] += tb[p] * v[p];
    }
  }
  double worst = 0.0;
  for (int r = 0; r < N; ++r) {
    double acc = 0.0;
    for (int c = 0; c < 2 * N; ++c)
      acc += to_double(spec.bc[r][c]) * trace[c];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

/// Random smooth initial state: nodal values of a random polynomial of the
/// given degree, normalized to unit quadrature norm of the reconstructed
/// solution.
inline std::vector<double> random_smooth_state(const Discretization& disc,
                                               int degree, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> coeff(degree + 1);
  for (double& c : coeff) c = dist(rng);
  std::vector<double> v(disc.n);
  double a = to_double(disc.dom.a), b = to_double(disc.dom.b);
  for (int i = 0; i < disc.n; ++i) {
    double t = 2.0 * (disc.nodes[i] - a) / (b - a) - 1.0;  // map to [-1,1]
    double acc = 0.0;
    for (int d = degree; d >= 0; --d) acc = acc * t + coeff[d];
    v[i] = acc;
  }
  double norm = disc.quad_norm(matvec(disc.Th, v));
  if (norm > 0)
    for (double& x : v) x /= norm;
  return v;
}

/// Plot-ready CSV: t, V(t), ||u(t)||, residual. Missing series are padded
/// with zeros.
inline void write_trajectory_csv(const std::string& path,
                                 const Trajectory& traj,
                                 const std::vector<double>& V,
                                 const std::vector<double>& residual) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,V,unorm,residual\n";
  for (size_t k = 0; k < traj.times.size(); ++k) {
    double vk = k < V.size() ? V[k] : 0.0;
    double rk = k < residual.size() ? residual[k] : 0.0;
    out << traj.times[k] << "," << vk << "," << traj.unorm[k] << "," << rk
        << "\n";
  }
}

}  // namespace qpie
