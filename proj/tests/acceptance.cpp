// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Heavier solver-driven criteria reuse per-benchmark
// settings calibrated offline; the convergence thresholds in criterion 9
// were frozen by a pre-build study with the same integrator.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "qpie/benchmarks.hpp"
#include "qpie/lpi_sdp.hpp"
#include "qpie/pde2pie.hpp"
#include "qpie/simulate.hpp"

using namespace qpie;

namespace {

constexpr double kPi = 3.14159265358979323846;

bool g_all_pass = true;
std::vector<int> g_selected;  // empty = run everything

bool selected(int num) {
  if (g_selected.empty()) return true;
  for (int s : g_selected)
    if (s == num) return true;
  return false;
}

void report(int num, const std::string& label, bool ok, double seconds) {
  std::printf("criterion %d [%s]: %s  (%.1f s)\n", num, label.c_str(),
              ok ? "PASS" : "FAIL", seconds);
  std::fflush(stdout);
  if (!ok) g_all_pass = false;
}

template <class F>
void criterion(int num, const std::string& label, F&& body) {
  if (!selected(num)) return;
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body();
  } catch (const std::exception& e) {
    std::printf("criterion %d: exception: %s\n", num, e.what());
  }
  auto t1 = std::chrono::steady_clock::now();
  report(num, label, ok, std::chrono::duration<double>(t1 - t0).count());
}

RPoly random_poly(std::mt19937& rng, int max_deg, bool with_th, bool with_et) {
  std::uniform_int_distribution<int> coef(-9, 9), den(1, 4);
  RPoly p;
  for (int a = 0; a <= max_deg; ++a)
    for (int b = 0; b <= (with_th ? max_deg - a : 0); ++b)
      for (int c = 0; c <= (with_et ? max_deg - a - b : 0); ++c) {
        int num = coef(rng);
        if (num == 0) continue;
        p = p + RPoly::monomial({a, b, c, 0}, rat(num, den(rng)));
      }
  return p;
}

RPIOp random_op(std::mt19937& rng, const Interval& dom, int max_deg) {
  RPIOp op(1, 1, dom);
  op.r0(0, 0) = random_poly(rng, max_deg, false, false);
  op.r1(0, 0) = random_poly(rng, max_deg, true, false);
  op.r2(0, 0) = random_poly(rng, max_deg, true, false);
  return op;
}

struct CertifiedRun {
  std::string name;
  Rat r, eps, delta;
  int d1, d2;
  std::optional<Certificate> cert;
};

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) g_selected.push_back(std::atoi(argv[i]));
  const Interval dom(Rat(0), Rat(1));

  criterion(1, "exact-algebra oracles", [&] {
    std::mt19937 rng(20240817);
    for (int it = 0; it < 20; ++it) {
      RPIOp A = random_op(rng, dom, 3);
      RPIOp B = random_op(rng, dom, 3);
      RPoly v = random_poly(rng, 4, false, false);
      RPoly w = random_poly(rng, 4, false, false);
      // composition closure: (A o B) v = A (B v), exactly
      if (apply(compose(A, B), v) != apply(A, apply(B, v))) return false;
      // adjoint identity: <A v, w> = <v, A* w>, exactly
      if (l2_inner(apply(A, v), w, dom) !=
          l2_inner(v, apply(adjoint(A), w), dom))
        return false;
      // cubic representation: the collapsed simplex functional evaluates
      // the cubic form exactly
      RTensorPIOp G(dom, random_poly(rng, 3, true, true),
                    random_poly(rng, 3, true, true),
                    random_poly(rng, 3, true, true));
      Rat via_form = l2_inner(v, apply_tensor(G, tensor_state(v)), dom);
      Rat via_klin = klin_apply(klin(G), v);
      if (via_form != via_klin) return false;
    }
    return true;
  });

  criterion(2, "benchmark kernel fixtures", [&] {
    std::vector<std::string> bad = benchmarks::fixture_check();
    for (const std::string& msg : bad)
      std::printf("  fixture mismatch: %s\n", msg.c_str());
    return bad.empty();
  });

  criterion(3, "second-order structural identities", [&] {
    PIESpec pie = assemble_pie(benchmarks::burgers(Rat(5)));
    const RPIOp& T = pie.T;
    const RPIOp& R = pie.Rj[1];
    RPIOp Tadj = adjoint(T);
    if (!(Tadj.R0 == T.R0 && Tadj.R1 == T.R1 && Tadj.R2 == T.R2))
      return false;
    RPIOp RR = scaled(compose(adjoint(R), R), Rat(-1));
    if (!(RR.R0 == T.R0 && RR.R1 == T.R1 && RR.R2 == T.R2)) return false;
    RSimplexFunctional K =
        klin(compose_3pi_tensor(adjoint(T), tensor_product(T, R)));
    return K.K.is_zero();
  });

  Rat burgers_star(0), kdv_star(0), kse_pos_star(0), kse_neg_star(0);

  criterion(4, "second-order reaction threshold", [&] {
    SweepResult sw =
        sweep([](const Rat& r) { return benchmarks::burgers(r); },
              Rat(93, 10), Rat(10), 2, 2, Rat(1, 10000), Rat(1, 1000000),
              Rat(1, 25));
    burgers_star = sw.last_feasible;
    double star = to_double(sw.last_feasible);
    std::printf("  certified up to r = %.4f, infeasible from %.4f\n", star,
                to_double(sw.first_infeasible));
    return star >= 9.3 && star <= 9.87;
  });

  criterion(5, "third-order gain threshold", [&] {
    SweepResult sw = sweep([](const Rat& r) { return benchmarks::kdv(r); },
                           Rat(43, 10), Rat(99, 20), 4, 2, Rat(1, 1000000),
                           Rat(1, 1000000), Rat(1, 8));
    kdv_star = sw.last_feasible;
    double star = to_double(sw.last_feasible);
    std::printf("  certified up to r = %.4f, infeasible from %.4f\n", star,
                to_double(sw.first_infeasible));
    return std::abs(star - 4.6098) / 4.6098 <= 0.07;
  });

  criterion(6, "fourth-order stability interval", [&] {
    SolveOptions opts;
    SweepResult pos =
        sweep([](const Rat& r) { return benchmarks::kse(r); }, Rat(13, 20),
              Rat(4, 5), 4, 1, Rat(1, 100000), Rat(1, 10000000),
              Rat(3, 40), opts);
    kse_pos_star = pos.last_feasible;
    SweepResult neg =
        sweep([](const Rat& x) { return benchmarks::kse(-x); }, Rat(13, 20),
              Rat(3, 4), 4, 1, Rat(1, 100000), Rat(1, 10000000), Rat(1, 10),
              opts);
    kse_neg_star = -neg.last_feasible;
    double hi = to_double(pos.last_feasible);
    double lo = to_double(kse_neg_star);
    std::printf("  certified interval [%.4f, %.4f]\n", lo, hi);
    return std::abs(hi - 0.7202) / 0.7202 <= 0.10 &&
           std::abs(lo - (-0.6500)) / 0.6500 <= 0.10;
  });

  criterion(7, "closed-form conservative bounds", [&] {
    double kdv_bound = benchmarks::analytic_kdv_bound();
    double kse_bound = benchmarks::analytic_kse_bound();
    std::printf("  analytic bounds %.6f and %.6f\n", kdv_bound, kse_bound);
    if (std::abs(kdv_bound - 4.001777) > 1e-4) return false;
    if (std::abs(kse_bound - 0.36082) > 1e-4) return false;
    // both strictly below the certified thresholds from criteria 5 and 6
    if (kdv_star == 0 || kse_pos_star == 0) return false;
    return Rat(kdv_bound) < kdv_star && Rat(kse_bound) < kse_pos_star;
  });

  criterion(8, "certificate soundness and decay envelopes", [&] {
    std::vector<CertifiedRun> runs = {
        {"burgers", Rat(5), Rat(1, 10000), Rat(1, 1000000), 2, 2, {}},
        {"kdv", Rat(4), Rat(1, 1000000), Rat(1, 1000000), 4, 2, {}},
        {"kse", Rat(3, 10), Rat(1, 100000), Rat(1, 10000000), 3, 1, {}},
    };
    for (CertifiedRun& run : runs) {
      PDESpec spec = benchmarks::build(run.name, run.r);
      PIESpec pie = assemble_pie(spec);
      SolveResult res = solve(
          assemble_stability(pie, run.eps, run.delta, run.d1, run.d2));
      if (res.status != SolveStatus::Certificate) {
        std::printf("  %s: no certificate\n", run.name.c_str());
        return false;
      }
      CertificateCheck chk = check_certificate(*res.cert, pie, 1e-6);
      if (!chk.pass) {
        std::printf("  %s: certificate failed exact verification\n",
                    run.name.c_str());
        return false;
      }
      run.cert = res.cert;

      Discretization disc = discretize(pie, 20);
      double worst = 0;
      for (int ic = 0; ic < 10; ++ic) {
        std::vector<double> v0 =
            random_smooth_state(disc, 4, 1000 + 17 * ic);
        Trajectory traj = integrate(disc, v0, 0.5, 1e-3);
        if (traj.blew_up) {
          std::printf("  %s: trajectory blew up\n", run.name.c_str());
          return false;
        }
        LyapunovTrace lt = lyapunov_trace(traj, res.cert->P, disc);
        for (size_t k = 0; k < lt.V.size(); ++k) {
          double env =
              lt.V[0] * std::exp(-res.cert->decay_rate * traj.times[k]);
          if (env > 0) worst = std::max(worst, (lt.V[k] - env) / env);
        }
      }
      std::printf("  %s: max relative envelope violation %.3e\n",
                  run.name.c_str(), worst);
      if (worst > 1e-6) return false;
    }
    return true;
  });

  criterion(9, "empirical equivalence under refinement", [&] {
    PDESpec spec = benchmarks::burgers(Rat(0));
    PIESpec pie = assemble_pie(spec);
    auto worst_residual = [&](int n, double dt) {
      Discretization disc = discretize(pie, n);
      std::vector<double> v0(disc.n);
      for (int i = 0; i < disc.n; ++i)
        v0[i] = -0.5 * kPi * kPi * std::sin(kPi * disc.nodes[i]);
      Trajectory traj = integrate(disc, v0, 0.2, dt);
      std::vector<double> res = pde_residual(traj, spec, disc);
      double w = 0;
      for (double x : res) w = std::max(w, x);
      return w;
    };
    // spectral decrease in n at a dt fine enough to expose it
    double r8 = worst_residual(8, 1e-5);
    double r12 = worst_residual(12, 1e-5);
    double r16 = worst_residual(16, 1e-5);
    std::printf("  residual vs n: %.3e  %.3e  %.3e\n", r8, r12, r16);
    if (!(r12 < r8 / 50 && r16 < r12 / 100 && r16 < 1e-6)) return false;
    // 2nd-order decrease in dt at spatially converged n
    double d1 = worst_residual(20, 8e-4);
    double d2 = worst_residual(20, 4e-4);
    double d3 = worst_residual(20, 2e-4);
    double rate1 = std::log2(d1 / d2);
    double rate2 = std::log2(d2 / d3);
    std::printf("  residual vs dt: %.3e  %.3e  %.3e (rates %.2f, %.2f)\n",
                d1, d2, d3, rate1, rate2);
    return rate1 >= 1.8 && rate2 >= 1.8;
  });

  std::printf(g_all_pass ? "all criteria passed\n"
                         : "ACCEPTANCE FAILED\n");
  return g_all_pass ? 0 : 1;
}
