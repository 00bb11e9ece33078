#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "qpie/poly.hpp"

using namespace qpie;

namespace {

RPoly random_poly(std::mt19937& rng, int max_deg = 3, int nterms = 4) {
  std::uniform_int_distribution<int> expo(0, max_deg);
  std::uniform_int_distribution<long> num(-6, 6);
  std::uniform_int_distribution<long> den(1, 4);
  RPoly p;
  for (int t = 0; t < nterms; ++t) {
    Expo e = {expo(rng), expo(rng), expo(rng), expo(rng)};
    p.add_term(e, rat(num(rng), den(rng)));
  }
  return p;
}

}  // namespace

TEST_CASE("basic integrals have closed forms") {
  RPoly th = pvar(Var::th);
  RPoly s = pvar(Var::s);

  // int_0^s th dth = s^2/2
  CHECK(th.integrate(Var::th, Rat(0), Var::s) == rat(1, 2) * s * s);

  // int_s^1 (1-th)^2 dth = (1-s)^3/3
  RPoly one = pconst(1);
  RPoly q = (one - th) * (one - th);
  RPoly expect = rat(1, 3) * (one - s) * (one - s) * (one - s);
  CHECK(q.integrate(Var::th, Var::s, Rat(1)) == expect);

  // int_et^th th*ze dze = th*(th^2 - et^2)/2
  RPoly et = pvar(Var::et), ze = pvar(Var::ze);
  RPoly r = (th * ze).integrate(Var::ze, Var::et, Var::th);
  CHECK(r == rat(1, 2) * th * (th * th - et * et));
}

TEST_CASE("exact evaluation") {
  // (1/2)(s-1)^2 th^2 at s=1/2, th=4/5 equals 2/25
  RPoly s = pvar(Var::s), th = pvar(Var::th), one = pconst(1);
  RPoly k = rat(1, 2) * (s - one) * (s - one) * th * th;
  Rat v = k.eval({rat(1, 2), rat(4, 5), std::nullopt, std::nullopt});
  CHECK(v == rat(2, 25));

  CHECK_THROWS_AS(
      k.eval({rat(1, 2), std::nullopt, std::nullopt, std::nullopt}),
      std::invalid_argument);
}

TEST_CASE("ring laws on random polynomials") {
  std::mt19937 rng(20240817);
  for (int it = 0; it < 40; ++it) {
    RPoly a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a - a == RPoly());
    CHECK(a * pconst(1) == a);
    CHECK(a * RPoly() == RPoly());
  }
}

TEST_CASE("differentiation and antidifferentiation") {
  std::mt19937 rng(7);
  for (int it = 0; it < 20; ++it) {
    RPoly a = random_poly(rng);
    for (Var v : {Var::s, Var::th, Var::et, Var::ze}) {
      // d/dv of the antiderivative returns the original
      CHECK(a.antiderivative(v).derivative(v) == a);
      // Leibniz rule
      RPoly b = random_poly(rng);
      CHECK((a * b).derivative(v) ==
            a.derivative(v) * b + a * b.derivative(v));
    }
  }
}

TEST_CASE("fundamental theorem and Fubini") {
  std::mt19937 rng(99);
  for (int it = 0; it < 20; ++it) {
    RPoly a = random_poly(rng, 3, 3);
    // d/ds int_0^s a(th,...) dth = a with th := s (when a has no s)
    RPoly no_s = a.permuted({Var::th, Var::th, Var::et, Var::ze});
    RPoly F = no_s.integrate(Var::th, Rat(0), Var::s);
    CHECK(F.derivative(Var::s) == no_s.at_limit(Var::th, Var::s));

    // Order exchange over the triangle 0 <= th <= s <= 1:
    // int_0^1 int_0^s f dth ds = int_0^1 int_th^1 f ds dth
    RPoly f = random_poly(rng, 3, 3)
                  .permuted({Var::s, Var::th, Var::th, Var::s});  // f(s,th)
    RPoly lhs = f.integrate(Var::th, Rat(0), Var::s).integrate(Var::s, Rat(0),
                                                               Rat(1));
    RPoly rhs = f.integrate(Var::s, Var::th, Rat(1)).integrate(Var::th, Rat(0),
                                                               Rat(1));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("substitution and permutation") {
  std::mt19937 rng(512);
  RPoly s = pvar(Var::s), th = pvar(Var::th);
  // (s+th)^2 with s := th gives 4 th^2
  RPoly p = (s + th) * (s + th);
  CHECK(p.substitute(Var::s, th) == rat(4) * th * th);

  for (int it = 0; it < 20; ++it) {
    RPoly a = random_poly(rng);
    // swapping s and th twice is the identity
    std::array<Var, 4> swap = {Var::th, Var::s, Var::et, Var::ze};
    CHECK(a.permuted(swap).permuted(swap) == a);
    // permutation agrees with substitution for a variable rename into a
    // variable the polynomial does not contain
    RPoly b = random_poly(rng, 2, 3);
    RPoly no_ze = b.permuted({Var::s, Var::th, Var::et, Var::s});
    CHECK(no_ze.permuted({Var::ze, Var::th, Var::et, Var::s}) ==
          no_ze.substitute(Var::s, pvar(Var::ze)));
  }
}

TEST_CASE("degrees and canonical form") {
  RPoly s = pvar(Var::s), th = pvar(Var::th), one = pconst(1);
  RPoly p = s * s * th + th - th + s * s * th;  // = 2 s^2 th
  CHECK(p == rat(2) * s * s * th);
  CHECK(p.degree_in(Var::s) == 2);
  CHECK(p.degree_in(Var::th) == 1);
  CHECK(p.degree_in(Var::ze) == 0);
  CHECK(p.total_degree() == 3);
  CHECK(p.depends_on(Var::s));
  CHECK_FALSE(p.depends_on(Var::et));
  CHECK((one - one).is_zero());
}

TEST_CASE("text round trip") {
  std::mt19937 rng(31337);
  for (int it = 0; it < 30; ++it) {
    RPoly a = random_poly(rng);
    CHECK(rpoly_from_string(to_string(a)) == a);
  }
  CHECK(rpoly_from_string("0").is_zero());
  RPoly s = pvar(Var::s), th = pvar(Var::th);
  CHECK(rpoly_from_string("1/2 s^2 th + -3 ze") ==
        rat(1, 2) * s * s * th - rat(3) * pvar(Var::ze));
  CHECK(rpoly_from_string("s th") == s * th);
  CHECK_THROWS_AS(rpoly_from_string("2 x"), std::invalid_argument);
}

TEST_CASE("interval validity") {
  CHECK_THROWS_AS(Interval(Rat(1), Rat(1)), std::invalid_argument);
  CHECK_THROWS_AS(Interval(Rat(2), Rat(0)), std::invalid_argument);
  Interval dom(Rat(0), Rat(1));
  CHECK(dom.a == 0);
  CHECK(dom.b == 1);
}
