#include <doctest.h>

#include <string>

#include "fdqrank/errors.hpp"
#include "fdqrank/grouprel.hpp"
#include "fdqrank/repkit.hpp"
#include "support.hpp"

using namespace fdq;

namespace {

const GaussianRational I = GaussianRational::imaginary_unit();
const GaussianRational Half = GaussianRational::from_fractions(1, 2);
const GaussianRational Quarter = GaussianRational::from_fractions(1, 4);

NCPoly t(std::size_t n, std::uint32_t j) { return NCPoly::variable(n, j); }

std::string parse_error_text(std::string_view text) {
  try {
    parse_presentation(text, "p");
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("presentation parsing") {
  Presentation z = parse_presentation("gens a\norder infinite\n");
  CHECK(z.m() == 1);
  CHECK(z.relators.empty());
  CHECK_FALSE(z.order.has_value());
  CHECK(z.beta0() == 0.0);
  CHECK(z.name == "unnamed");

  Presentation z2 = parse_presentation("group Z2 # comment\ngens a b ; rel a b a^-1 b^-1 ; order infinite");
  CHECK(z2.name == "Z2");
  CHECK(z2.m() == 2);
  REQUIRE(z2.relators.size() == 1);
  CHECK(z2.relators[0].length() == 4);
  CHECK(z2.relators[0].letters()[2] == Letter{0, -1});

  Presentation z3 = parse_presentation("gens a\nrel a^3\norder finite 3\n");
  REQUIRE(z3.relators.size() == 1);
  CHECK(z3.relators[0].letters() == std::vector<Letter>{{0, 1}, {0, 1}, {0, 1}});
  CHECK(z3.beta0() == doctest::Approx(1.0 / 3.0));
  CHECK(z3.relators[0].to_string(z3.generators) == "a a a");
}

TEST_CASE("presentation errors carry line and column") {
  CHECK(parse_error_text("gens a\nrel a b\norder infinite") == "p:2:7: unknown generator 'b'");
  CHECK(parse_error_text("gens a\nrel a^0\norder infinite") == "p:2:7: zero exponent");
  CHECK(parse_error_text("gens a\nrel a^x\norder infinite") == "p:2:7: malformed exponent 'x'");
  CHECK(parse_error_text("gens a\n").find("missing order annotation") != std::string::npos);
  CHECK(parse_error_text("rel a\ngens a\norder infinite").find("before 'gens'") != std::string::npos);
  CHECK(parse_error_text("gens a a\norder infinite").find("duplicate generator") != std::string::npos);
  CHECK(parse_error_text("gens a\norder finite 0").find("p:2:") == 0);
  CHECK_THROWS_AS(load_presentation("/nonexistent/file.pres"), LoadError);
}

TEST_CASE("word helpers keep relators as written") {
  Presentation p = parse_presentation("gens a b\nrel a a^-1 b\norder infinite");
  const GroupWord& w = p.relators[0];
  CHECK(w.length() == 3);
  CHECK(w.free_reduced().length() == 1);
  CHECK(w.inverse().to_string(p.generators) == "b^-1 a a^-1");
}

TEST_CASE("generator substitution") {
  Presentation p = parse_presentation("gens a b\norder infinite");
  GeneratorSubstitution s = build_generators(p);
  CHECK(s.n == 4);
  CHECK(s.forward[0] == Half * t(4, 0) - Half * I * t(4, 2));
  CHECK(s.inverse[0] == Half * t(4, 0) + Half * I * t(4, 2));
  CHECK(s.forward[1] == Half * t(4, 1) - Half * I * t(4, 3));
}

TEST_CASE("substituting a unitary reproduces the generator") {
  // Solve check: with X_1 = U + U^*, X_2 = i (U - U^*), the forward image of
  // g evaluates to U and the inverse image to U^*.
  std::mt19937_64 g(3);
  Presentation p = parse_presentation("gens a\norder infinite");
  GeneratorSubstitution s = build_generators(p);
  Eigen::MatrixXcd a = fdqtest::random_matrix(g, 4);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd u = qr.householderQ();
  std::vector<Eigen::MatrixXcd> x{u + u.adjoint(), std::complex<double>(0, 1) * (u - u.adjoint())};
  CHECK((fdqtest::poly_value(s.forward[0], x) - u).norm() < 1e-12);
  CHECK((fdqtest::poly_value(s.inverse[0], x) - u.adjoint()).norm() < 1e-12);
}

TEST_CASE("relation system for Z") {
  RelationSystem rs = build_relation_system(parse_presentation("gens a\norder infinite"));
  CHECK(rs.n == 2);
  CHECK(rs.k == 2);
  NCPoly four = NCPoly::constant(2, 4);
  CHECK(rs.polys[0] == (t(2, 0) - I * t(2, 1)) * (t(2, 0) + I * t(2, 1)) - four);
  CHECK(rs.polys[1] == (t(2, 0) + I * t(2, 1)) * (t(2, 0) - I * t(2, 1)) - four);
  CHECK(rs.kinds == std::vector<RelationKind>{RelationKind::unit_forward, RelationKind::unit_backward});
  CHECK(rs.polys[0].involution() == rs.polys[0]);
  CHECK(rs.polys[1].involution() == rs.polys[1]);
}

TEST_CASE("relation system for Z/2 and Z^2") {
  RelationSystem z2 = build_relation_system(parse_presentation("gens a\nrel a^2\norder finite 2"));
  CHECK(z2.k == 3);
  NCPoly g = t(2, 0) - I * t(2, 1);
  CHECK(z2.polys[2] == Quarter * (g * g) - NCPoly::constant(2, 1));

  RelationSystem zz = build_relation_system(parse_presentation("gens a b\nrel a b a^-1 b^-1\norder infinite"));
  CHECK(zz.k == 5);
  CHECK(zz.n == 4);
  CHECK(zz.polys[4].degree() == 4);
  CHECK(zz.kinds[4] == RelationKind::relator);
}

TEST_CASE("Jacobian entries") {
  Jacobian z = build_jacobian(build_relation_system(parse_presentation("gens a\norder infinite")));
  NCPoly one = NCPoly::constant(2, 1);
  TensorPoly expect = TensorPoly::outer(one, t(2, 0) + I * t(2, 1)) + TensorPoly::outer(t(2, 0) - I * t(2, 1), one);
  CHECK(z.at(0, 0) == expect);

  Jacobian zz = build_jacobian(build_relation_system(parse_presentation("gens a b\nrel a b a^-1 b^-1\norder infinite")));
  CHECK(zz.at(0, 2).is_zero() == false);
  CHECK(zz.at(0, 1).is_zero());
  CHECK(zz.at(0, 3).is_zero());

  Jacobian z2 = build_jacobian(build_relation_system(parse_presentation("gens a\nrel a^2\norder finite 2")));
  NCPoly g = t(2, 0) - I * t(2, 1);
  CHECK(z2.at(2, 0) == Quarter * (TensorPoly::outer(one, g) + TensorPoly::outer(g, one)));
}

TEST_CASE("every variable appears in a unit relation row") {
  RelationSystem rs = build_relation_system(parse_presentation("gens a b c\norder infinite"));
  Jacobian jac = build_jacobian(rs);
  for (std::size_t j = 0; j < rs.n; ++j) {
    bool seen = false;
    for (std::size_t i = 0; i < 2 * rs.m; ++i) seen = seen || !jac.at(i, j).is_zero();
    CHECK(seen);
  }
}

TEST_CASE("annihilation on exact representations") {
  struct Case {
    const char* text;
    Representation rep;
  };
  std::vector<Case> cases{{"gens a\norder infinite", cyclic_shift(7)},
                          {"gens a\nrel a^3\norder finite 3", regular_cyclic(3)},
                          {"gens a\nrel a^5\norder finite 5", regular_cyclic(5)},
                          {"gens a b\nrel a b a^-1 b^-1\norder infinite", torus(3)}};
  for (const auto& c : cases) {
    RelationSystem rs = build_relation_system(parse_presentation(c.text));
    auto x = fdqtest::perm_variables(c.rep.permutations());
    for (const NCPoly& f : rs.polys) CHECK(fdqtest::poly_value(f, x).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("inverse relator evaluates to the inverse") {
  Presentation p = parse_presentation("gens a b\nrel a b a^-1 b^-1\nrel a a b\norder infinite");
  GeneratorSubstitution s = build_generators(p);
  Representation rep = random_permutations(5, 2, 9);
  auto x = fdqtest::perm_variables(rep.permutations());
  for (const GroupWord& w : p.relators) {
    Eigen::MatrixXcd r = fdqtest::poly_value(substitute_word(w, s), x);
    Eigen::MatrixXcd rinv = fdqtest::poly_value(substitute_word(w.inverse(), s), x);
    CHECK((r * rinv - Eigen::MatrixXcd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("relator expansion cap names the relator") {
  Presentation p = parse_presentation("gens a b\nrel a b a b a b a b a b a b\norder infinite");
  ExpansionLimits tight{64, 100};
  try {
    build_relation_system(p, tight);
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("relator 1") != std::string::npos);
  }
}

TEST_CASE("canonical text output") {
  RelationSystem rs = build_relation_system(parse_presentation("gens a\norder infinite"));
  std::string text = relations_text(rs);
  CHECK(text.rfind("n = 2\nk = 2\n# unit a a^-1\nF1 = (-4+0*i) + ", 0) == 0);
  std::string jt = jacobian_text(rs, build_jacobian(rs));
  CHECK(jt.find("d1 F1 = (1+0*i)*[1 | t1] + (0+1*i)*[1 | t2] + (1+0*i)*[t1 | 1] + (0-1*i)*[t2 | 1]") !=
        std::string::npos);
}
