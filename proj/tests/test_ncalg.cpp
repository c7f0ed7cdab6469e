#include <doctest.h>

#include <random>

#include "fdqrank/errors.hpp"
#include "fdqrank/ncalg.hpp"
#include "support.hpp"

using namespace fdq;
using fdqtest::random_poly;

namespace {

const GaussianRational I = GaussianRational::imaginary_unit();

NCPoly t(std::size_t n, std::uint32_t j) { return NCPoly::variable(n, j); }

NCPoly one(std::size_t n) { return NCPoly::constant(n, 1); }

/// Reference free difference quotient: walks positions of each word directly.
TensorPoly positions_oracle(const NCPoly& p, std::uint32_t j) {
  TensorPoly out(p.nvars());
  for (const auto& [w, c] : p.terms()) {
    auto v = w.vars();
    for (std::size_t a = 0; a < v.size(); ++a)
      if (v[a] == j)
        out.add_term(Monomial(std::vector<std::uint32_t>(v.begin(), v.begin() + a)),
                     Monomial(std::vector<std::uint32_t>(v.begin() + a + 1, v.end())), c);
  }
  return out;
}

}  // namespace

TEST_CASE("gaussian rationals stay in lowest terms") {
  auto a = GaussianRational::from_fractions(2, 4, -3, 6);
  CHECK(a == GaussianRational::from_fractions(1, 2, -1, 2));
  CHECK(a.to_string() == "1/2-1/2*i");
  CHECK(GaussianRational(3).to_string() == "3+0*i");
  CHECK((I * I) == GaussianRational(-1));
  CHECK((GaussianRational(1) / (GaussianRational(1) + I)) == GaussianRational::from_fractions(1, 2, -1, 2));
  CHECK(a.conj() == GaussianRational::from_fractions(1, 2, 1, 2));
  CHECK_THROWS(GaussianRational::from_fractions(1, 0));
}

TEST_CASE("word product and canonical form") {
  const std::size_t n = 2;
  NCPoly p = t(n, 0) * t(n, 1);
  REQUIRE(p.terms().size() == 1);
  CHECK(p.terms().begin()->first == Monomial{0, 1});
  CHECK(p.terms().begin()->second == GaussianRational(1));

  NCPoly q = t(n, 0) + GaussianRational(2) * t(n, 1);
  CHECK((q + GaussianRational(-1) * q).is_zero());

  NCPoly lhs = (t(n, 0) + t(n, 1)) * (t(n, 0) - t(n, 1));
  NCPoly rhs(n);
  rhs.add_term({0, 0}, 1);
  rhs.add_term({0, 1}, -1);
  rhs.add_term({1, 0}, 1);
  rhs.add_term({1, 1}, -1);
  CHECK(lhs == rhs);
  CHECK(lhs.to_string() == "(1+0*i)*t1*t1 + (-1+0*i)*t1*t2 + (1+0*i)*t2*t1 + (-1+0*i)*t2*t2");
  CHECK(NCPoly(n).to_string() == "0");
}

TEST_CASE("monomials order by degree then lexicographically") {
  CHECK(Monomial{} < Monomial{1});
  CHECK(Monomial{1} < Monomial{0, 0});
  CHECK(Monomial{0, 1} < Monomial{1, 0});
  CHECK((Monomial{0} * Monomial{1, 2}) == Monomial{0, 1, 2});
  CHECK(Monomial{0, 1, 2}.reversed() == Monomial{2, 1, 0});
}

TEST_CASE("mismatched variable counts are usage errors") {
  CHECK_THROWS_AS(t(2, 0) + t(3, 0), UsageError);
  CHECK_THROWS_AS(t(2, 0) * t(3, 0), UsageError);
  CHECK_THROWS_AS(contract(TensorPoly::unit(2), t(3, 0)), UsageError);
  CHECK_THROWS_AS(differentiate(t(2, 0), 2), UsageError);
  CHECK_THROWS_AS(NCPoly::variable(2, 5), UsageError);
}

TEST_CASE("expansion caps raise resource errors") {
  const std::size_t n = 2;
  NCPoly p = t(n, 0) + t(n, 1);
  ExpansionLimits small{4, 1000};
  NCPoly acc = one(n);
  CHECK_THROWS_AS(
      {
        for (int i = 0; i < 5; ++i) acc = mul(acc, p, small);
      },
      ResourceError);
  ExpansionLimits few_terms{64, 10};
  acc = one(n);
  CHECK_THROWS_AS(
      {
        for (int i = 0; i < 5; ++i) acc = mul(acc, p, few_terms);
      },
      ResourceError);
}

TEST_CASE("involution") {
  const std::size_t n = 2;
  NCPoly p = I * (t(n, 0) * t(n, 1));
  NCPoly expect = (GaussianRational(0) - I) * (t(n, 1) * t(n, 0));
  CHECK(p.involution() == expect);
  CHECK(t(n, 0).involution() == t(n, 0));
  NCPoly a = t(n, 0) - I * t(n, 1);
  NCPoly b = t(n, 0) + I * t(n, 1);
  CHECK((a * b).involution() == a * b);
}

TEST_CASE("free difference quotient examples") {
  const std::size_t n = 2;
  CHECK(differentiate(t(n, 0), 0) == TensorPoly::unit(n));
  CHECK(differentiate(t(n, 0), 1).is_zero());
  NCPoly w = t(n, 0) * t(n, 1) * t(n, 0);
  TensorPoly expect(n);
  expect.add_term({}, {1, 0}, 1);
  expect.add_term({0, 1}, {}, 1);
  CHECK(differentiate(w, 0) == expect);
  CHECK(differentiate(w, 0).to_string() == "(1+0*i)*[1 | t2*t1] + (1+0*i)*[t1*t2 | 1]");
}

TEST_CASE("contraction examples") {
  const std::size_t n = 3;
  CHECK(contract(TensorPoly::unit(n), t(n, 2)) == t(n, 2));
  CHECK(contract(TensorPoly::outer(t(n, 0), t(n, 1)), one(n)) == t(n, 0) * t(n, 1));
  NCPoly cube = t(n, 0) * t(n, 0) * t(n, 0);
  NCPoly expect = t(n, 1) * t(n, 0) * t(n, 0) + t(n, 0) * t(n, 1) * t(n, 0) + t(n, 0) * t(n, 0) * t(n, 1);
  CHECK(contract(differentiate(cube, 0), t(n, 1)) == expect);
}

TEST_CASE("differentiate agrees with the position oracle") {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 50; ++trial) {
    NCPoly p = random_poly(g, 3, 6, 8);
    for (std::uint32_t j = 0; j < 3; ++j) CHECK(differentiate(p, j) == positions_oracle(p, j));
  }
}

TEST_CASE("Leibniz rule holds exactly") {
  std::mt19937_64 g(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 4;
    NCPoly p = random_poly(g, n, 5, 8);
    NCPoly q = random_poly(g, n, 5, 8);
    for (std::uint32_t j = 0; j < n; ++j) {
      TensorPoly lhs = differentiate(p * q, j);
      TensorPoly rhs = multiply(differentiate(p, j), TensorPoly::outer(one(n), q)) +
                       multiply(TensorPoly::outer(p, one(n)), differentiate(q, j));
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("involution is an anti-homomorphism and an involution") {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 40; ++trial) {
    NCPoly p = random_poly(g, 3, 5, 8);
    NCPoly q = random_poly(g, 3, 5, 8);
    CHECK((p * q).involution() == q.involution() * p.involution());
    CHECK(p.involution().involution() == p);
  }
}

TEST_CASE("derivation commutes with involution through flip-conjugate") {
  std::mt19937_64 g(6);
  for (int trial = 0; trial < 40; ++trial) {
    NCPoly p = random_poly(g, 3, 5, 8);
    for (std::uint32_t j = 0; j < 3; ++j) CHECK(differentiate(p.involution(), j) == differentiate(p, j).flip_conjugate());
  }
}

TEST_CASE("contraction is bilinear and right-multiplicative") {
  std::mt19937_64 g(7);
  for (int trial = 0; trial < 30; ++trial) {
    TensorPoly a = fdqtest::random_tensor(g, 3, 3, 5);
    TensorPoly b = fdqtest::random_tensor(g, 3, 3, 5);
    NCPoly x = random_poly(g, 3, 3, 4);
    NCPoly y = random_poly(g, 3, 3, 4);
    NCPoly q = random_poly(g, 3, 3, 4);
    GaussianRational c = fdqtest::random_coeff(g);
    CHECK(contract(a + c * b, x) == contract(a, x) + c * contract(b, x));
    CHECK(contract(a, x + c * y) == contract(a, x) + c * contract(a, y));
    CHECK(contract(multiply(a, TensorPoly::outer(one(3), q)), x) == contract(a, x) * q);
  }
}

TEST_CASE("outputs never store zero coefficients") {
  std::mt19937_64 g(8);
  for (int trial = 0; trial < 30; ++trial) {
    NCPoly p = random_poly(g, 2, 4, 6);
    NCPoly z = p - p;
    CHECK(z.is_zero());
    NCPoly sum = p * p - p * p + p;
    for (const auto& [w, c] : sum.terms()) CHECK_FALSE(c.is_zero());
    TensorPoly cancelled = differentiate(p, 0) + GaussianRational(-1) * differentiate(p, 0);
    CHECK(cancelled.is_zero());
    for (const auto& [k, c] : cancelled.terms()) CHECK_FALSE(c.is_zero());
  }
}
