// Command-line front end: analyze a PDE for certified exponential
// stability, sweep a gain bracket for the stability threshold, simulate the
// integral-equation dynamics, export the feasibility program in SDPA
// format, or run a quick self-test.
//
// Exit codes: 0 certified/completed, 1 infeasible, 2 unknown or solver
// failure, 3 input error.

#include <chrono>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpie/benchmarks.hpp"
#include "qpie/lpi_sdp.hpp"
#include "qpie/sdpa_io.hpp"
#include "qpie/serialize.hpp"
#include "qpie/simulate.hpp"

using namespace qpie;

namespace {

// Accepts "num/den", integers, and decimal/scientific literals, all parsed
// exactly into a rational.
Rat parse_rat(const std::string& text) {
  if (text.find_first_of("eE.") == std::string::npos)
    return rat_from_string(text);  // integer or num/den literal
  std::string t = text;
  bool neg = false;
  size_t pos = 0;
  if (pos < t.size() && (t[pos] == '+' || t[pos] == '-'))
    neg = (t[pos++] == '-');
  std::string digits;
  int exp10 = 0;
  bool seen_dot = false;
  for (; pos < t.size(); ++pos) {
    char c = t[pos];
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("bad number: " + text);
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      exp10 += std::stoi(t.substr(pos + 1));
      break;
    } else if (c >= '0' && c <= '9') {
      digits += c;
      if (seen_dot) exp10 -= 1;
    } else {
      throw std::invalid_argument("bad number: " + text);
    }
  }
  if (digits.empty()) throw std::invalid_argument("bad number: " + text);
  Rat r = rat_from_string(digits);
  for (int k = 0; k < exp10; ++k) r *= 10;
  for (int k = 0; k < -exp10; ++k) r /= 10;
  if (neg) r = -r;
  return r;
}

struct CommonOpts {
  std::string benchmark;
  std::string input;
  std::string r = "0";
  std::string eps = "1/10000";
  std::string delta = "1/1000000";
  int d1 = 2, d2 = 2;
  std::string output;
  double solver_tol = 1e-7;
  bool verbose = false;
};

void add_model_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--benchmark", o.benchmark,
                  "built-in problem: burgers, kdv or kse");
  cmd->add_option("--input", o.input, "PDE description JSON file");
  cmd->add_option("--r", o.r, "gain parameter for --benchmark");
  cmd->add_option("--eps", o.eps, "coercivity margin (rational or decimal)");
  cmd->add_option("--delta", o.delta, "dissipation margin");
  cmd->add_option("--d1", o.d1, "multiplier degree of the Gram factor");
  cmd->add_option("--d2", o.d2, "kernel degree of the Gram factor");
  cmd->add_option("--output", o.output, "report JSON path");
  cmd->add_option("--solver-tol", o.solver_tol, "interior-point tolerance");
  cmd->add_flag("--verbose", o.verbose, "solver progress output");
}

PDESpec load_pde(const CommonOpts& o) {
  if (!o.benchmark.empty())
    return benchmarks::build(o.benchmark, parse_rat(o.r));
  if (!o.input.empty()) {
    // any failure reading or interpreting the file is an input error
    try {
      return pde_from_json(load_json(o.input));
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string(e.what()) + " (while reading " +
                                  o.input + ")");
    }
  }
  throw std::invalid_argument("need --benchmark or --input");
}

Json config_echo(const CommonOpts& o) {
  Json j;
  if (!o.benchmark.empty()) {
    j["benchmark"] = o.benchmark;
    j["r"] = o.r;
  }
  if (!o.input.empty()) j["input"] = o.input;
  j["eps"] = o.eps;
  j["delta"] = o.delta;
  j["degrees"] = Json::array({o.d1, o.d2});
  j["solver_tol"] = o.solver_tol;
  return j;
}

Json base_report(const std::string& command, const CommonOpts& o) {
  Json rep;
  rep["version"] = 1;
  rep["tool"] = "qpie";
  rep["command"] = command;
  rep["config"] = config_echo(o);
  return rep;
}

void emit(const Json& rep, const CommonOpts& o) {
  if (!o.output.empty()) save_json(rep, o.output);
}

int run_analyze(const CommonOpts& o) {
  auto t0 = std::chrono::steady_clock::now();
  PDESpec spec = load_pde(o);
  PIESpec pie = assemble_pie(spec);
  SDPProblem prob = assemble_stability(pie, parse_rat(o.eps),
                                       parse_rat(o.delta), o.d1, o.d2);
  SolveOptions opts;
  opts.tol = o.solver_tol;
  opts.verbose = o.verbose;
  SolveResult res = solve(prob, opts);

  Json rep = base_report("analyze", o);
  rep["solver"] = stats_to_json(res.stats);
  int code = 2;
  if (res.status == SolveStatus::Certificate) {
    CertificateCheck chk = check_certificate(*res.cert, pie, 1e-6);
    if (chk.pass) {
      rep["verdict"] = "stable-certified";
      rep["certificate"] = certificate_to_json(*res.cert, &chk, &res.stats);
      code = 0;
    } else {
      rep["verdict"] = "unknown";
      rep["note"] = "solver candidate failed exact verification";
    }
  } else if (res.status == SolveStatus::Infeasible) {
    rep["verdict"] = "infeasible-at-degree";
    code = 1;
  } else {
    rep["verdict"] = "unknown";
  }
  auto t1 = std::chrono::steady_clock::now();
  rep["timings"]["total_s"] =
      std::chrono::duration<double>(t1 - t0).count();
  emit(rep, o);
  std::cout << "verdict: " << rep["verdict"].get<std::string>() << "\n";
  if (code == 0)
    std::cout << "decay rate " << res.cert->decay_rate << ", transient bound "
              << res.cert->transient << "\n";
  return code;
}

int run_sweep(const CommonOpts& o, const std::string& lo,
              const std::string& hi, const std::string& tol_r) {
  if (o.benchmark.empty())
    throw std::invalid_argument("sweep needs --benchmark");
  auto t0 = std::chrono::steady_clock::now();
  std::string name = o.benchmark;
  SolveOptions opts;
  opts.tol = o.solver_tol;
  opts.verbose = o.verbose;
  SweepResult sw = sweep(
      [&](const Rat& r) { return benchmarks::build(name, r); },
      parse_rat(lo), parse_rat(hi), o.d1, o.d2, parse_rat(o.eps),
      parse_rat(o.delta), parse_rat(tol_r), opts);

  Json rep = base_report("sweep", o);
  rep["config"]["bracket"] = Json::array({lo, hi});
  rep["config"]["tol_r"] = tol_r;
  rep["verdict"] = "stable-certified";
  rep["thresholds"]["last_feasible"] = to_double(sw.last_feasible);
  rep["thresholds"]["first_infeasible"] = to_double(sw.first_infeasible);
  Json hist = Json::array();
  for (const auto& [r, feas] : sw.history)
    hist.push_back(Json::array({to_double(r), feas}));
  rep["thresholds"]["history"] = hist;
  auto t1 = std::chrono::steady_clock::now();
  rep["timings"]["total_s"] =
      std::chrono::duration<double>(t1 - t0).count();
  emit(rep, o);
  std::cout << "threshold in [" << to_double(sw.last_feasible) << ", "
            << to_double(sw.first_infeasible) << "]\n";
  return 0;
}

int run_simulate(const CommonOpts& o, int n, double dt, double t_end,
                 const std::string& csv, const std::string& cert_path,
                 int ic_seed) {
  auto t0 = std::chrono::steady_clock::now();
  PDESpec spec = load_pde(o);
  PIESpec pie = assemble_pie(spec);
  Discretization disc = discretize(pie, n);
  std::vector<double> v0 = random_smooth_state(disc, 4, ic_seed);
  Trajectory traj = integrate(disc, v0, t_end, dt);
  std::vector<double> res = pde_residual(traj, spec, disc);

  Json rep = base_report("simulate", o);
  rep["config"]["n"] = n;
  rep["config"]["dt"] = dt;
  rep["config"]["t_end"] = t_end;
  if (traj.blew_up) {
    rep["verdict"] = "unknown";
    rep["note"] = traj.diagnostic;
  } else {
    rep["verdict"] = "completed";
  }
  double worst_res = 0;
  for (double x : res) worst_res = std::max(worst_res, x);
  rep["residuals"]["max_pde_residual"] = worst_res;
  double worst_bc = 0;
  for (const std::vector<double>& v : traj.v)
    worst_bc = std::max(worst_bc, bc_residual(v, pie, spec, disc));
  rep["residuals"]["max_bc_residual"] = worst_bc;

  std::vector<double> V;
  if (!cert_path.empty()) {
    Certificate cert = certificate_from_json(load_json(cert_path));
    LyapunovTrace lt = lyapunov_trace(traj, cert.P, disc);
    V = lt.V;
    rep["lyapunov"]["max_upward_violation"] = lt.max_upward_violation;
    double worst_env = 0;
    for (size_t k = 0; k < lt.V.size(); ++k) {
      double env = lt.V[0] * std::exp(-cert.decay_rate * traj.times[k]);
      if (env > 0)
        worst_env = std::max(worst_env, (lt.V[k] - env) / env);
    }
    rep["lyapunov"]["max_envelope_violation"] = worst_env;
  }
  if (!csv.empty()) write_trajectory_csv(csv, traj, V, res);
  auto t1 = std::chrono::steady_clock::now();
  rep["timings"]["total_s"] =
      std::chrono::duration<double>(t1 - t0).count();
  emit(rep, o);
  std::cout << (traj.blew_up ? "trajectory blew up: " + traj.diagnostic
                             : "simulation completed")
            << "\nmax PDE residual " << worst_res << "\n";
  return traj.blew_up ? 2 : 0;
}

int run_export(const CommonOpts& o, const std::string& sdpa_path) {
  PDESpec spec = load_pde(o);
  PIESpec pie = assemble_pie(spec);
  SDPProblem prob = assemble_stability(pie, parse_rat(o.eps),
                                       parse_rat(o.delta), o.d1, o.d2);
  export_sdpa(prob, sdpa_path);
  std::cout << "wrote " << sdpa_path << " (" << prob.n_vars
            << " variables)\n";
  Json rep = base_report("export", o);
  rep["verdict"] = "completed";
  rep["sdpa_path"] = sdpa_path;
  emit(rep, o);
  return 0;
}

int run_selftest(const CommonOpts& o) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "pass" : "FAIL") << "  " << name << "\n";
    if (!ok) ++failures;
  };

  // adjoint is an involution on a random operator
  RPIOp op(1, 1, Interval(Rat(0), Rat(1)));
  op.r0(0, 0) = pvar(Var::s) * pvar(Var::s) - pconst(Rat(1, 3));
  op.r1(0, 0) = pvar(Var::s) * pvar(Var::th) + pconst(2);
  op.r2(0, 0) = pvar(Var::th) - pvar(Var::s);
  RPIOp opaa = adjoint(adjoint(op));
  check("adjoint involution",
        opaa.R0 == op.R0 && opaa.R1 == op.R1 && opaa.R2 == op.R2);

  // adjoint identity <Av, w> = <v, A*w> on polynomial test functions
  RPoly v = pvar(Var::s) * pvar(Var::s) - pconst(1);
  RPoly w = pvar(Var::s) + pconst(Rat(1, 2));
  Rat lhs = l2_inner(apply(op, v), w, op.dom);
  Rat rhs = l2_inner(v, apply(adjoint(op), w), op.dom);
  check("adjoint identity", lhs == rhs);

  // benchmark structural identity: the state map is self-adjoint for the
  // second-order problem with Dirichlet ends
  PIESpec pie = assemble_pie(benchmarks::burgers(Rat(5)));
  RPIOp Tadj = adjoint(pie.T);
  check("state map self-adjoint",
        Tadj.R0 == pie.T.R0 && Tadj.R1 == pie.T.R1 && Tadj.R2 == pie.T.R2);

  // discretization agrees with the exact action
  Discretization disc = discretize(pie, 12);
  RPoly p = pvar(Var::s) * pvar(Var::s) * pvar(Var::s) - pvar(Var::s);
  std::vector<double> nod(disc.n), want(disc.n);
  for (int i = 0; i < disc.n; ++i)
    nod[i] = qpie::detail::eval3(p, disc.nodes[i], 0, 0);
  RPoly Tp = apply(pie.T, p);
  for (int i = 0; i < disc.n; ++i)
    want[i] = qpie::detail::eval3(Tp, disc.nodes[i], 0, 0);
  std::vector<double> got = matvec(disc.Th, nod);
  double err = 0;
  for (int i = 0; i < disc.n; ++i)
    err = std::max(err, std::abs(got[i] - want[i]));
  check("collocation consistency", err < 1e-12);

  // tiny end-to-end certificate
  SDPProblem prob = assemble_stability(pie, parse_rat(o.eps),
                                       parse_rat(o.delta), 2, 2);
  SolveOptions opts;
  opts.tol = o.solver_tol;
  SolveResult sres = solve(prob, opts);
  bool cert_ok = sres.status == SolveStatus::Certificate &&
                 check_certificate(*sres.cert, pie, 1e-6).pass;
  check("end-to-end certificate", cert_ok);

  std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified stability analysis of quadratic PDEs via their "
               "integral-equation representation"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string lo = "0", hi = "10", tol_r = "1/1000";
  int sim_n = 24, ic_seed = 1;
  double sim_dt = 1e-3, sim_tend = 1.0;
  std::string csv, cert_path, sdpa_path = "problem.dat-s";

  CLI::App* analyze = app.add_subcommand("analyze", "certify one gain value");
  add_model_flags(analyze, o);

  CLI::App* sweepc =
      app.add_subcommand("sweep", "bisect the stability threshold");
  add_model_flags(sweepc, o);
  sweepc->add_option("--lo", lo, "bracket low end (must be certifiable)");
  sweepc->add_option("--hi", hi, "bracket high end (must be infeasible)");
  sweepc->add_option("--tol-r", tol_r, "bisection width target");

  CLI::App* sim = app.add_subcommand("simulate", "integrate the dynamics");
  add_model_flags(sim, o);
  sim->add_option("--n", sim_n, "collocation points");
  sim->add_option("--dt", sim_dt, "time step");
  sim->add_option("--t-end", sim_tend, "final time");
  sim->add_option("--csv", csv, "trajectory CSV path");
  sim->add_option("--certificate", cert_path,
                  "certificate JSON to trace the Lyapunov functional");
  sim->add_option("--seed", ic_seed, "random initial state seed");

  CLI::App* exportc =
      app.add_subcommand("export", "write the feasibility program in "
                                   "SDPA sparse format");
  add_model_flags(exportc, o);
  exportc->add_option("--sdpa", sdpa_path, "output .dat-s path");

  CLI::App* self = app.add_subcommand("selftest", "quick consistency checks");
  add_model_flags(self, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (app.got_subcommand(analyze)) return run_analyze(o);
    if (app.got_subcommand(sweepc)) return run_sweep(o, lo, hi, tol_r);
    if (app.got_subcommand(sim))
      return run_simulate(o, sim_n, sim_dt, sim_tend, csv, cert_path,
                          ic_seed);
    if (app.got_subcommand(exportc)) return run_export(o, sdpa_path);
    if (app.got_subcommand(self)) return run_selftest(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 3;
}
