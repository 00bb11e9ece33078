#include <catch2/catch_amalgamated.hpp>

#include "qpie/benchmarks.hpp"
#include "qpie/serialize.hpp"

using namespace qpie;

TEST_CASE("operator JSON round-trips exactly") {
  PIESpec pie = assemble_pie(benchmarks::kdv(Rat(3)));
  for (const RPIOp* op : {&pie.T, &pie.A, &pie.Rj[1]}) {
    RPIOp back = op_from_json(op_to_json(*op));
    CHECK(back.R0 == op->R0);
    CHECK(back.R1 == op->R1);
    CHECK(back.R2 == op->R2);
    CHECK(back.dom == op->dom);
  }
}

TEST_CASE("tensor operator and functional JSON round-trip exactly") {
  PIESpec pie = assemble_pie(benchmarks::burgers(Rat(5)));
  RTensorPIOp back = tensor_from_json(tensor_to_json(pie.B));
  CHECK(back.B1 == pie.B.B1);
  CHECK(back.B2 == pie.B.B2);
  CHECK(back.B3 == pie.B.B3);

  RSimplexFunctional K(pie.dom,
                       pvar(Var::s) * pvar(Var::th) - pvar(Var::et));
  RSimplexFunctional kb = functional_from_json(functional_to_json(K));
  CHECK(kb.K == K.K);
}

TEST_CASE("PDE description JSON round-trips and validates") {
  for (const std::string& name : benchmarks::names()) {
    PDESpec spec = benchmarks::build(name, Rat(7, 2));
    PDESpec back = pde_from_json(pde_to_json(spec));
    CHECK(back.N == spec.N);
    CHECK(back.dom == spec.dom);
    REQUIRE(back.alpha.size() == spec.alpha.size());
    for (size_t i = 0; i < spec.alpha.size(); ++i)
      CHECK(back.alpha[i] == spec.alpha[i]);
    REQUIRE(back.beta.size() == spec.beta.size());
    for (size_t i = 0; i < spec.beta.size(); ++i) {
      CHECK(std::get<0>(back.beta[i]) == std::get<0>(spec.beta[i]));
      CHECK(std::get<1>(back.beta[i]) == std::get<1>(spec.beta[i]));
      CHECK(std::get<2>(back.beta[i]) == std::get<2>(spec.beta[i]));
    }
    CHECK(back.bc == spec.bc);
  }
}

TEST_CASE("hand-written PDE JSON is accepted") {
  Json j = Json::parse(R"({
    "order": 2,
    "domain": ["0", "1"],
    "alpha": ["5", "0", "1"],
    "beta": [[1, 0, "-1"]],
    "bc": [["1", "0", "0", "0"], ["0", "0", "1", "0"]]
  })");
  PDESpec spec = pde_from_json(j);
  PDESpec want = benchmarks::burgers(Rat(5));
  CHECK(spec.alpha[0] == want.alpha[0]);
  CHECK(spec.bc == want.bc);
}

TEST_CASE("malformed PDE JSON is rejected") {
  Json j = pde_to_json(benchmarks::burgers(Rat(1)));
  j["alpha"] = Json::array({"1"});  // wrong length for order 2
  CHECK_THROWS(pde_from_json(j));
  Json k = pde_to_json(benchmarks::burgers(Rat(1)));
  k["beta"] = Json::array({Json::array({0, 1, "1"})});  // needs j <= i
  CHECK_THROWS(pde_from_json(k));
}

TEST_CASE("certificate JSON carries the verification data") {
  PIESpec pie = assemble_pie(benchmarks::burgers(Rat(1)));
  SDPProblem prob =
      assemble_stability(pie, Rat(1, 10000), Rat(1, 1000000), 2, 2);
  SolveResult res = solve(prob);
  REQUIRE(res.status == SolveStatus::Certificate);
  CertificateCheck chk = check_certificate(*res.cert, pie, 1e-6);
  REQUIRE(chk.pass);

  Json j = certificate_to_json(*res.cert, &chk, &res.stats);
  CHECK(j.at("residuals").at("pass").get<bool>());
  CHECK(j.at("mu").get<double>() == Catch::Approx(res.cert->mu));
  CHECK(j.contains("solver"));

  Certificate back = certificate_from_json(j);
  CHECK(back.P.R0 == res.cert->P.R0);
  CHECK(back.P.R1 == res.cert->P.R1);
  CHECK(back.P.R2 == res.cert->P.R2);
  CHECK(back.eps == res.cert->eps);
  // the reloaded certificate must still verify
  CertificateCheck chk2 = check_certificate(back, pie, 1e-6);
  CHECK(chk2.pass);
}
