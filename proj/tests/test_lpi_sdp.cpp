#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "qpie/benchmarks.hpp"
#include "qpie/lpi_sdp.hpp"
#include "qpie/sdpa_io.hpp"

using namespace qpie;

namespace {
const Interval DOM(Rat(0), Rat(1));

RatMat random_psd(int m, std::mt19937& rng) {
  std::uniform_int_distribution<long> num(-2, 2);
  RatMat M(m, std::vector<Rat>(m, Rat(0)));
  for (auto& row : M)
    for (auto& v : row) v = Rat(num(rng));
  RatMat Q(m, std::vector<Rat>(m, Rat(0)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Rat acc(0);
      for (int k = 0; k < m; ++k) acc += M[k][i] * M[k][j];
      Q[i][j] = acc;
    }
  return Q;
}

RPoly random_state(std::mt19937& rng) {
  std::uniform_int_distribution<long> num(-3, 3);
  std::uniform_int_distribution<int> expo(0, 4);
  RPoly v;
  for (int t = 0; t < 4; ++t) v.add_term({expo(rng), 0, 0, 0}, Rat(num(rng)));
  return v;
}
}  // namespace

TEST_CASE("monomial factor has the documented row counts and contents") {
  ZFactor z00 = build_zfactor(DOM, 0, 0);
  CHECK(z00.m1 == 1);
  CHECK(z00.m2 == 1);
  CHECK(z00.m == 3);
  CHECK((z00.Z.r0(0, 0) - pconst(Rat(1))).is_zero());
  CHECK((z00.Z.r1(1, 0) - pconst(Rat(1))).is_zero());
  CHECK((z00.Z.r2(2, 0) - pconst(Rat(1))).is_zero());

  ZFactor z21 = build_zfactor(DOM, 2, 1);
  CHECK(z21.m1 == 3);
  CHECK(z21.m2 == 3);
  CHECK(z21.m == 9);
  // multiplier rows are 1, s, s^2
  CHECK((z21.Z.r0(2, 0) - pvar(Var::s) * pvar(Var::s)).is_zero());
  // kernel rows are 1, s, th (total degree order, s-exponent descending)
  CHECK((z21.Z.r1(4, 0) - pvar(Var::s)).is_zero());
  CHECK((z21.Z.r1(5, 0) - pvar(Var::th)).is_zero());
  CHECK((z21.Z.r2(8, 0) - pvar(Var::th)).is_zero());

  ZFactor znm = build_zfactor(DOM, 4, 2, false);
  CHECK(znm.m1 == 0);
  CHECK(znm.m == 12);

  // stacked action on a concrete state
  RPoly v = pvar(Var::s);
  auto out = qpie::apply(z00.Z, std::vector<RPoly>{v});
  REQUIRE(out.size() == 3);
  CHECK((out[0] - v).is_zero());
  // int_0^s th dth = s^2/2, int_s^1 th dth = (1 - s^2)/2
  CHECK((out[1] - pvar(Var::s) * pvar(Var::s).scaled(Rat(1, 2))).is_zero());
  CHECK((out[2] - (pconst(Rat(1, 2)) -
                   pvar(Var::s) * pvar(Var::s).scaled(Rat(1, 2))))
            .is_zero());
}

TEST_CASE("parameterized operator is self-adjoint and spans a PSD cone") {
  ZFactor zf = build_zfactor(DOM, 1, 1);
  APIOp P = positive_op(zf, 0);
  APIOp Pst = adjoint(P);
  CHECK((P.r0(0, 0) - Pst.r0(0, 0)).is_zero());
  CHECK((P.r1(0, 0) - Pst.r1(0, 0)).is_zero());
  CHECK((P.r2(0, 0) - Pst.r2(0, 0)).is_zero());

  std::mt19937 rng(911);
  for (int it = 0; it < 25; ++it) {
    RatMat Q = random_psd(zf.m, rng);
    RPIOp G = gram_operator(zf, Q);
    RPIOp Gst = adjoint(G);
    CHECK((G.r1(0, 0) - Gst.r1(0, 0)).is_zero());
    RPoly v = random_state(rng);
    CHECK(l2_inner(v, apply(G, v), DOM) >= 0);
  }
}

TEST_CASE("coefficient matching produces exact linear rows") {
  RPIOp I = RPIOp::identity(DOM);
  // identical sides: every row is the trivial 0 = 0
  auto rows = coeff_match(promote(I), promote(I));
  for (const auto& r : rows) {
    CHECK(r.a.empty());
    CHECK(r.rhs == 0);
  }
  // constant mismatch with no variables: an inconsistent row
  rows = coeff_match(promote(I), promote(RPIOp::zero(DOM)));
  bool found_bad = false;
  for (const auto& r : rows)
    if (r.a.empty() && r.rhs != 0) found_bad = true;
  CHECK(found_bad);

  // and the solver pre-check turns it into Infeasible without iterating
  SDPProblem p;
  p.n_vars = 1;
  p.block_sizes = {1, 1};
  p.is_diag = {true};
  p.rows = rows;
  CHECK(solve(p).status == SolveStatus::Infeasible);

  // matching against a variable side yields rows tying that variable
  ZFactor zf = build_zfactor(DOM, 0, 0);
  rows = coeff_match(positive_op(zf, 0), promote(RPIOp::zero(DOM)));
  bool found_var = false;
  for (const auto& r : rows)
    if (!r.a.empty()) found_var = true;
  CHECK(found_var);
}

TEST_CASE("reaction-limited convection equation certifies below threshold") {
  SolveOptions opts;
  for (long r : {0L, 1L, 5L}) {
    PIESpec pie = assemble_pie(benchmarks::burgers(Rat(r)));
    SDPProblem prob =
        assemble_stability(pie, Rat(1, 10000), Rat(1, 1000000), 2, 2);
    SolveResult res = solve(prob, opts);
    REQUIRE(res.status == SolveStatus::Certificate);
    REQUIRE(res.cert.has_value());
    CertificateCheck chk = check_certificate(*res.cert, pie, 1e-6);
    INFO("r = " << r << ", rayleigh " << chk.min_rayleigh_pos << " / "
                << chk.min_rayleigh_neg << ", cubic " << chk.max_klin_coeff);
    CHECK(chk.pass);
    CHECK(res.cert->mu > 0);
    CHECK(res.cert->decay_rate > 0);
  }
}

TEST_CASE("reaction-limited convection equation is refused above threshold") {
  PIESpec pie = assemble_pie(benchmarks::burgers(Rat(12)));
  SDPProblem prob =
      assemble_stability(pie, Rat(1, 10000), Rat(1, 1000000), 2, 2);
  SolveResult res = solve(prob);
  CHECK(res.status == SolveStatus::Infeasible);
}

TEST_CASE("a corrupted certificate is rejected by the exact re-check") {
  PIESpec pie = assemble_pie(benchmarks::burgers(Rat(1)));
  SolveResult res = solve(
      assemble_stability(pie, Rat(1, 10000), Rat(1, 1000000), 2, 2));
  REQUIRE(res.status == SolveStatus::Certificate);
  Certificate bad = *res.cert;
  // destroy positivity of P
  bad.P = add_scaled(bad.P, RPIOp::identity(DOM), Rat(-10));
  CHECK_FALSE(check_certificate(bad, pie, 1e-6).pass);
  // destroy the cubic cancellation instead
  Certificate bad2 = *res.cert;
  bad2.P.r1(0, 0) = bad2.P.r1(0, 0) + pconst(Rat(1, 2));
  CHECK(check_certificate(bad2, pie, 1e-6).max_klin_coeff > 1e-6);
}

TEST_CASE("third-order dispersion equation certifies at a stable gain") {
  PIESpec pie = assemble_pie(benchmarks::kdv(Rat(1)));
  SDPProblem prob =
      assemble_stability(pie, Rat(1, 1000000), Rat(1, 1000000), 4, 2);
  SolveResult res = solve(prob);
  REQUIRE(res.status == SolveStatus::Certificate);
  CertificateCheck chk = check_certificate(*res.cert, pie, 1e-6);
  INFO("rayleigh " << chk.min_rayleigh_pos << " / " << chk.min_rayleigh_neg
                   << ", cubic " << chk.max_klin_coeff);
  CHECK(chk.pass);
}

TEST_CASE("threshold bisection brackets and converges") {
  SweepResult sw = sweep([](const Rat& r) { return benchmarks::burgers(r); },
                         Rat(5), Rat(12), 2, 2, Rat(1, 10000),
                         Rat(1, 1000000), Rat(1, 2));
  CHECK(sw.last_feasible >= 5);
  CHECK(sw.first_infeasible <= 12);
  Rat width = sw.first_infeasible - sw.last_feasible;
  CHECK(width <= Rat(1, 2));
  // the certified threshold for this family sits near 9.87
  CHECK(to_double(sw.last_feasible) > 8.0);
  CHECK(to_double(sw.first_infeasible) < 11.0);

  CHECK_THROWS_AS(
      sweep([](const Rat& r) { return benchmarks::burgers(r); }, Rat(20),
            Rat(30), 2, 2, Rat(1, 10000), Rat(1, 1000000), Rat(1, 2)),
      std::runtime_error);
}

TEST_CASE("interchange-format export is deterministic and complete") {
  PIESpec pie = assemble_pie(benchmarks::burgers(Rat(1)));
  SDPProblem prob =
      assemble_stability(pie, Rat(1, 10000), Rat(1, 1000000), 2, 2);

  std::ostringstream a, b;
  export_sdpa(prob, a);
  export_sdpa(prob, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().size() > 0);

  std::istringstream in(a.str());
  SdpaProblem parsed = read_sdpa(in);
  CHECK(parsed.m == prob.n_vars);
  REQUIRE(parsed.block_sizes.size() == 3);
  CHECK(parsed.block_sizes[0] == prob.block_sizes[0]);
  CHECK(parsed.block_sizes[1] == prob.block_sizes[1]);
  int n_eq = 0;
  for (const LinRow& r : prob.rows)
    if (!r.a.empty()) ++n_eq;
  CHECK(parsed.block_sizes[2] == -2 * n_eq);

  // the exported file carries the whole problem: solving the re-imported
  // text reproduces the direct feasibility verdict on both sides
  CHECK(solve_sdpa(parsed).status == SolveStatus::Certificate);

  PIESpec hot = assemble_pie(benchmarks::burgers(Rat(12)));
  SDPProblem prob2 =
      assemble_stability(hot, Rat(1, 10000), Rat(1, 1000000), 2, 2);
  std::ostringstream c;
  export_sdpa(prob2, c);
  std::istringstream in2(c.str());
  CHECK(solve_sdpa(read_sdpa(in2)).status == SolveStatus::Infeasible);
}
