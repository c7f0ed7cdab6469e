#include "fdqrank/fdqrank.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "fdqrank/grouprel.hpp"
#include "fdqrank/repkit.hpp"
#include "fdqrank/run.hpp"
#include "fdqrank/spectral.hpp"

struct fdq_presentation {
  fdq::Presentation value;
};

struct fdq_relations {
  fdq::RelationSystem system;
  fdq::Jacobian jacobian;
};

struct fdq_representation {
  fdq::Representation value;
};

namespace {

thread_local std::string last_error;

fdq_status fail(fdq_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <typename F>
fdq_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return FDQ_OK;
  } catch (const fdq::Error& e) {
    return fail(static_cast<fdq_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(FDQ_ERR_USAGE, std::string("invalid JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(FDQ_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return fail(FDQ_ERR_NUMERICAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bool null_arg(const void* p, const char* what, fdq_status& st) {
  if (p) return false;
  st = fail(FDQ_ERR_USAGE, std::string(what) + " must not be NULL");
  return true;
}

}  // namespace

extern "C" {

const char* fdq_version(void) { return FDQ_VERSION_STRING; }

const char* fdq_last_error(void) { return last_error.c_str(); }

void fdq_string_free(char* s) { std::free(s); }

fdq_status fdq_presentation_load(const char* path, fdq_presentation** out) {
  fdq_status st;
  if (null_arg(path, "path", st) || null_arg(out, "out", st)) return st;
  return guarded([&] { *out = new fdq_presentation{fdq::load_presentation(path)}; });
}

fdq_status fdq_presentation_parse(const char* text, fdq_presentation** out) {
  fdq_status st;
  if (null_arg(text, "text", st) || null_arg(out, "out", st)) return st;
  return guarded([&] { *out = new fdq_presentation{fdq::parse_presentation(text)}; });
}

void fdq_presentation_free(fdq_presentation* p) { delete p; }

fdq_status fdq_presentation_shape(const fdq_presentation* p, size_t* m, size_t* relators) {
  fdq_status st;
  if (null_arg(p, "presentation", st)) return st;
  if (m) *m = p->value.m();
  if (relators) *relators = p->value.relators.size();
  return FDQ_OK;
}

fdq_status fdq_relations_build(const fdq_presentation* p, fdq_relations** out) {
  fdq_status st;
  if (null_arg(p, "presentation", st) || null_arg(out, "out", st)) return st;
  return guarded([&] {
    fdq::RelationSystem rs = fdq::build_relation_system(p->value);
    fdq::Jacobian jac = fdq::build_jacobian(rs);
    *out = new fdq_relations{std::move(rs), std::move(jac)};
  });
}

void fdq_relations_free(fdq_relations* r) { delete r; }

fdq_status fdq_relations_shape(const fdq_relations* r, size_t* k, size_t* n) {
  fdq_status st;
  if (null_arg(r, "relations", st)) return st;
  if (k) *k = r->system.k;
  if (n) *n = r->system.n;
  return FDQ_OK;
}

fdq_status fdq_relations_text(const fdq_relations* r, char** out) {
  fdq_status st;
  if (null_arg(r, "relations", st) || null_arg(out, "out", st)) return st;
  return guarded([&] { *out = dup_string(fdq::relations_text(r->system)); });
}

fdq_status fdq_jacobian_text(const fdq_relations* r, char** out) {
  fdq_status st;
  if (null_arg(r, "relations", st) || null_arg(out, "out", st)) return st;
  return guarded([&] { *out = dup_string(fdq::jacobian_text(r->system, r->jacobian)); });
}

fdq_status fdq_representation_create(const char* descriptor, size_t m, fdq_representation** out) {
  fdq_status st;
  if (null_arg(descriptor, "descriptor", st) || null_arg(out, "out", st)) return st;
  return guarded([&] {
    *out = new fdq_representation{fdq::make_representation(fdq::parse_family(descriptor), m)};
  });
}

void fdq_representation_free(fdq_representation* rep) { delete rep; }

fdq_status fdq_representation_dim(const fdq_representation* rep, size_t* dim) {
  fdq_status st;
  if (null_arg(rep, "representation", st) || null_arg(dim, "dim", st)) return st;
  *dim = rep->value.dim();
  return FDQ_OK;
}

fdq_status fdq_relator_defects(const fdq_representation* rep, const fdq_presentation* p, double* out, size_t cap,
                               size_t* count) {
  fdq_status st;
  if (null_arg(rep, "representation", st) || null_arg(p, "presentation", st)) return st;
  if (cap > 0 && null_arg(out, "out", st)) return st;
  return guarded([&] {
    std::vector<double> d = fdq::relator_defects(rep->value, p->value);
    for (std::size_t i = 0; i < d.size() && i < cap; ++i) out[i] = d[i];
    if (count) *count = d.size();
  });
}

fdq_status fdq_rank(const fdq_relations* r, const fdq_representation* rep, const char* threshold, double* rank) {
  fdq_status st;
  if (null_arg(r, "relations", st) || null_arg(rep, "representation", st) || null_arg(rank, "rank", st)) return st;
  return guarded([&] {
    fdq::SpectralConfig cfg;
    if (threshold) cfg.threshold = fdq::ThresholdPolicy::parse(threshold);
    fdq::SingularValues sv = fdq::jacobian_singular_values(r->jacobian, rep->value, cfg);
    *rank = fdq::rank_estimate(sv.values, rep->value.dim(), cfg.threshold, cfg.grid_decades).rank;
  });
}

fdq_status fdq_run(const char* config_json, char** report_json) {
  fdq_status st;
  if (null_arg(config_json, "config_json", st) || null_arg(report_json, "report_json", st)) return st;
  *report_json = nullptr;
  fdq_status job_status = FDQ_OK;
  fdq_status s = guarded([&] {
    fdq::RunConfig cfg = fdq::RunConfig::from_json(nlohmann::json::parse(config_json));
    fdq::RunReport rep = fdq::run(cfg);
    *report_json = dup_string(fdq::dump_report(rep.document));
    if (rep.jobs_ok == 0 && rep.jobs_failed > 0) {
      job_status = static_cast<fdq_status>(rep.first_error);
      last_error = "all jobs failed; first: " + rep.first_message;
    }
  });
  return s != FDQ_OK ? s : job_status;
}

}  // extern "C"
