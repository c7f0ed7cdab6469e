#include <doctest.h>

#include <cstdlib>
#include <string>

#include "fdqrank/fdqrank.h"

namespace {

std::string data(const char* name) { return std::string(FDQ_DATA_DIR) + "/" + name; }

struct Owned {
  char* p = nullptr;
  ~Owned() { fdq_string_free(p); }
};

}  // namespace

TEST_CASE("version string") {
  std::string v = fdq_version();
  CHECK_FALSE(v.empty());
  CHECK(v.find('.') != std::string::npos);
}

TEST_CASE("presentation and relation handles") {
  fdq_presentation* p = nullptr;
  REQUIRE(fdq_presentation_load(data("z2.pres").c_str(), &p) == FDQ_OK);
  size_t m = 0, rels = 0;
  CHECK(fdq_presentation_shape(p, &m, &rels) == FDQ_OK);
  CHECK(m == 2);
  CHECK(rels == 1);
  fdq_relations* r = nullptr;
  REQUIRE(fdq_relations_build(p, &r) == FDQ_OK);
  size_t k = 0, n = 0;
  CHECK(fdq_relations_shape(r, &k, &n) == FDQ_OK);
  CHECK(k == 5);
  CHECK(n == 4);
  Owned text, jac;
  CHECK(fdq_relations_text(r, &text.p) == FDQ_OK);
  CHECK(std::string(text.p).rfind("n = 4\nk = 5\n", 0) == 0);
  CHECK(fdq_jacobian_text(r, &jac.p) == FDQ_OK);
  CHECK(std::string(jac.p).find("d4 F5 = ") != std::string::npos);

  fdq_representation* rep = nullptr;
  REQUIRE(fdq_representation_create("torus:3", m, &rep) == FDQ_OK);
  size_t dim = 0;
  CHECK(fdq_representation_dim(rep, &dim) == FDQ_OK);
  CHECK(dim == 9);
  double defects[4] = {-1, -1, -1, -1};
  size_t count = 0;
  CHECK(fdq_relator_defects(rep, p, defects, 4, &count) == FDQ_OK);
  CHECK(count == 1);
  CHECK(defects[0] == 0.0);
  double rank = 0.0;
  CHECK(fdq_rank(r, rep, nullptr, &rank) == FDQ_OK);
  CHECK(rank == doctest::Approx(3.0 - 1.0 / 9.0).epsilon(1e-10));
  CHECK(fdq_rank(r, rep, "bogus", &rank) == FDQ_ERR_USAGE);
  CHECK(std::string(fdq_last_error()).find("bogus") != std::string::npos);

  fdq_representation_free(rep);
  fdq_relations_free(r);
  fdq_presentation_free(p);
}

TEST_CASE("error codes") {
  fdq_presentation* p = nullptr;
  CHECK(fdq_presentation_load("/nonexistent.pres", &p) == FDQ_ERR_USAGE);
  CHECK(p == nullptr);
  CHECK(fdq_presentation_parse("gens a\nrel b\norder infinite", &p) == FDQ_ERR_USAGE);
  CHECK(std::string(fdq_last_error()).find("unknown generator 'b'") != std::string::npos);
  CHECK(fdq_presentation_parse(nullptr, &p) == FDQ_ERR_USAGE);

  fdq_representation* rep = nullptr;
  CHECK(fdq_representation_create("cyclic:65", 1, &rep) == FDQ_OK);
  REQUIRE(fdq_presentation_parse("gens a\norder infinite", &p) == FDQ_OK);
  fdq_relations* r = nullptr;
  REQUIRE(fdq_relations_build(p, &r) == FDQ_OK);
  double rank = 0.0;
  CHECK(fdq_rank(r, rep, nullptr, &rank) == FDQ_ERR_RESOURCE);
  fdq_representation_free(rep);
  CHECK(fdq_representation_create("moebius:3", 1, &rep) == FDQ_ERR_USAGE);
  fdq_relations_free(r);
  fdq_presentation_free(p);
  fdq_presentation_free(nullptr);
  fdq_string_free(nullptr);
}

TEST_CASE("run through JSON") {
  std::string cfg = R"({"mode":"rank","presentation":")" + data("z3k.pres") +
                    R"(","reps":["regular-cyclic:3"]})";
  Owned report;
  REQUIRE(fdq_run(cfg.c_str(), &report.p) == FDQ_OK);
  std::string text = report.p;
  CHECK(text.find("\"schema\": \"fdqrank.report/1\"") != std::string::npos);
  CHECK(text.back() == '\n');

  Owned failed;
  std::string bad = R"({"mode":"rank","presentation":")" + data("z2k.pres") + R"(","reps":["cyclic:3"]})";
  CHECK(fdq_run(bad.c_str(), &failed.p) == FDQ_ERR_USAGE);
  REQUIRE(failed.p != nullptr);
  CHECK(std::string(failed.p).find("exact family mismatch") != std::string::npos);

  Owned none;
  CHECK(fdq_run("{not json", &none.p) == FDQ_ERR_USAGE);
  CHECK(none.p == nullptr);
}
