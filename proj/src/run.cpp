#include "fdqrank/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fdqrank/grouprel.hpp"
#include "fdqrank/repkit.hpp"

namespace fdq {

using nlohmann::json;

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::spectrum: return "spectrum";
    case RunMode::rank: return "rank";
    case RunMode::report: return "report";
    case RunMode::perturb: return "perturb";
  }
  return "report";
}

RunMode parse_run_mode(std::string_view text) {
  if (text == "spectrum") return RunMode::spectrum;
  if (text == "rank") return RunMode::rank;
  if (text == "report") return RunMode::report;
  if (text == "perturb") return RunMode::perturb;
  throw UsageError("unknown run mode '" + std::string(text) + "'");
}

SvdMethod parse_svd_method(std::string_view text) {
  if (text == "auto") return SvdMethod::automatic;
  if (text == "dense") return SvdMethod::dense;
  if (text == "blocks") return SvdMethod::blocks;
  throw UsageError("unknown SVD method '" + std::string(text) + "' (expected auto, dense, blocks)");
}

std::string to_string(SvdMethod method) {
  switch (method) {
    case SvdMethod::automatic: return "auto";
    case SvdMethod::dense: return "dense";
    case SvdMethod::blocks: return "blocks";
  }
  return "auto";
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config key '") + key + "' has the wrong type");
  }
}

Presentation load_config_presentation(const RunConfig& cfg) {
  if (cfg.presentation_text) return parse_presentation(*cfg.presentation_text, "<config>");
  if (cfg.presentation_path.empty()) throw UsageError("no presentation given (--presentation FILE)");
  return load_presentation(cfg.presentation_path);
}

struct Job {
  std::size_t index;
  std::string source;  // descriptor as given
  FamilySpec spec;
};

std::vector<Job> expand_jobs(const RunConfig& cfg) {
  std::vector<Job> jobs;
  for (const std::string& d : cfg.reps) {
    FamilySpec spec = parse_family(d);
    if (spec.family == "randperm" && !spec.seed) spec.seed = cfg.seed;
    if (spec.family == "file" || spec.size) {
      jobs.push_back({jobs.size(), d, spec});
      continue;
    }
    for (std::size_t s : cfg.sizes) {
      FamilySpec sized = spec;
      sized.size = s;
      jobs.push_back({jobs.size(), d, sized});
    }
  }
  return jobs;
}

json threshold_json(const RankEstimate& r, const ThresholdPolicy& p, double smax2) {
  return {{"policy", p.to_string()},
          {"lambda", r.threshold},
          {"relative", smax2 > 0.0 ? r.threshold / smax2 : 0.0},
          {"plateau_begin", r.plateau_begin},
          {"plateau_length", r.plateau_length}};
}

json rank_json(const SpectralReport& sr, const ThresholdPolicy& p) {
  const double smax2 = sr.svals.empty() ? 0.0 : sr.svals.front() * sr.svals.front();
  json curve = json::array();
  for (const auto& pt : sr.rank.curve)
    curve.push_back({{"relative", pt.relative}, {"lambda", pt.lambda}, {"count", pt.count}, {"rank", pt.rank}});
  return {{"estimate", sr.rank.rank},
          {"count", sr.rank.count},
          {"sigma_max_sq", smax2},
          {"threshold", threshold_json(sr.rank, p, smax2)},
          {"curve", curve}};
}

json probe_json(const ProbeResult& pr, std::uint64_t seed) {
  json rows = json::array();
  for (const auto& r : pr.rows) rows.push_back({r.eps, r.defect, r.defect_over_eps});
  return {{"seed", seed},
          {"norm", "normalized Hilbert-Schmidt sqrt(sum_i Tr(A_i^* A_i) / D)"},
          {"columns", {"eps", "defect", "defect_over_eps"}},
          {"rows", rows},
          {"halving_ratios", pr.halving_ratios},
          {"first_order_norms", pr.first_order_norms},
          {"linear_norm", pr.linear_norm}};
}

json spectral_json(const SpectralReport& sr, const RunConfig& cfg) {
  json j = {{"svd_method", sr.method}, {"rank", rank_json(sr, cfg.spectral.threshold)}};
  if (cfg.mode == RunMode::spectrum) j["singular_values"] = sr.svals;
  if (cfg.mode == RunMode::spectrum || cfg.mode == RunMode::report) {
    json bins = json::array();
    for (const auto& b : sr.mu.bins) bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"mass", b.mass}});
    j["mu"] = {{"kernel_mass", sr.mu.kernel_mass},
               {"total_mass", sr.mu.total_mass},
               {"kernel_threshold", sr.rank.threshold},
               {"bins", bins}};
    j["fk_logdet"] = {{"value", sr.logdet.value},
                      {"cut", sr.logdet.cut},
                      {"discarded", sr.logdet.discarded},
                      {"finite", std::isfinite(sr.logdet.value)}};
    json tail = json::array();
    for (const auto& t : sr.tail) tail.push_back({t.lambda, t.phi, t.product});
    j["tail"] = {{"columns", {"lambda", "phi", "phi_abs_log_lambda"}},
                 {"kernel_threshold", sr.rank.threshold},
                 {"rows", tail}};
  }
  return j;
}

json betti_json(const BettiEstimate& b) {
  return {{"rank", b.rank},
          {"beta0", b.beta0},
          {"beta1", b.beta1},
          {"delta_upper", b.delta_upper},
          {"r_bound", b.r_bound},
          {"strongly_one_bounded", b.strongly_one_bounded},
          {"verdict", b.verdict}};
}

std::string format_defect(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", d);
  return buf;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw UsageError("run config must be a JSON object");
  RunConfig c;
  c.mode = parse_run_mode(get_or<std::string>(j, "mode", "report"));
  c.presentation_path = get_or<std::string>(j, "presentation", "");
  if (j.contains("presentation_text") && !j["presentation_text"].is_null())
    c.presentation_text = get_or<std::string>(j, "presentation_text", "");
  c.reps = get_or<std::vector<std::string>>(j, "reps", {});
  c.sizes = get_or<std::vector<std::size_t>>(j, "sizes", {});
  c.eps = get_or<std::vector<double>>(j, "eps", c.eps);
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  c.spectral.threshold = ThresholdPolicy::parse(get_or<std::string>(j, "threshold", "plateau"));
  c.spectral.method = parse_svd_method(get_or<std::string>(j, "method", "auto"));
  c.spectral.flattening =
      get_or<std::string>(j, "flattening", "column") == "row" ? Flattening::row_major : Flattening::column_major;
  c.spectral.max_dim = get_or<std::size_t>(j, "max_dim", c.spectral.max_dim);
  c.spectral.max_side = get_or<std::size_t>(j, "max_side", c.spectral.max_side);
  c.spectral.max_dense_entries = get_or<std::size_t>(j, "max_dense_entries", c.spectral.max_dense_entries);
  c.spectral.histogram_bins = get_or<std::size_t>(j, "histogram_bins", c.spectral.histogram_bins);
  c.spectral.beta_tolerance = get_or<double>(j, "beta_tolerance", c.spectral.beta_tolerance);
  c.exact_defect_tolerance = get_or<double>(j, "exact_defect_tolerance", c.exact_defect_tolerance);
  return c;
}

json RunConfig::to_json() const {
  json j = {{"mode", to_string(mode)},
            {"presentation", presentation_path},
            {"reps", reps},
            {"sizes", sizes},
            {"eps", eps},
            {"seed", seed},
            {"threshold", spectral.threshold.to_string()},
            {"method", to_string(spectral.method)},
            {"flattening", spectral.flattening == Flattening::row_major ? "row" : "column"},
            {"max_dim", spectral.max_dim},
            {"max_side", spectral.max_side},
            {"max_dense_entries", spectral.max_dense_entries},
            {"histogram_bins", spectral.histogram_bins},
            {"beta_tolerance", spectral.beta_tolerance},
            {"exact_defect_tolerance", exact_defect_tolerance}};
  if (presentation_text) j["presentation_text"] = *presentation_text;
  return j;
}

void RunConfig::validate() const {
  if (reps.empty()) throw UsageError("no representation given (--rep SPEC)");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw UsageError("size sweep must be strictly ascending");
  for (std::size_t s : sizes)
    if (s == 0) throw UsageError("size sweep entries must be >= 1");
  for (const std::string& d : reps) {
    FamilySpec spec = parse_family(d);
    if (spec.family != "file" && !spec.size && sizes.empty())
      throw UsageError("empty size sweep for '" + d + "' (give a size in the descriptor or --sizes)");
  }
  for (double e : eps)
    if (!(e >= 0.0 && e <= 1.0)) throw UsageError("eps values must lie in [0, 1]");
  if (spectral.histogram_bins == 0) throw UsageError("histogram needs at least one bin");
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = cfg.to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunReport run(const RunConfig& cfg) {
  cfg.validate();
  const Presentation pres = load_config_presentation(cfg);
  const RelationSystem rs = build_relation_system(pres);
  const Jacobian jac = build_jacobian(rs);

  RunReport out;
  json& doc = out.document;
  doc["schema"] = kReportSchema;
  doc["tool_version"] = FDQ_VERSION_STRING;
  doc["config_hash"] = config_hash(cfg);
  doc["config"] = cfg.to_json();
  doc["seeds"] = {{"probe", cfg.seed}, {"randperm_default", cfg.seed}};
  doc["group"] = {{"name", pres.name},
                  {"generators", pres.generators},
                  {"relators", pres.relators.size()},
                  {"order", pres.order ? json(*pres.order) : json("infinite")},
                  {"beta0", pres.beta0()},
                  {"m", rs.m},
                  {"n", rs.n},
                  {"k", rs.k}};
  doc["tolerances"] = {{"unitarity_max_entry", UnitarityTolerance{}.max_entry_error},
                       {"exact_defect", cfg.exact_defect_tolerance},
                       {"beta1_zero", cfg.spectral.beta_tolerance},
                       {"rank_grid_relative", {1e-1, std::pow(10.0, -cfg.spectral.grid_decades)}},
                       {"threshold_policy", cfg.spectral.threshold.to_string()},
                       {"normalization", "traces divided by D^2"}};

  struct Done {
    std::size_t index;
    std::size_t dim;
    bool exact;
    double rank;
  };
  std::vector<Done> done;
  json jobs = json::array();
  for (const Job& job : expand_jobs(cfg)) {
    json j = {{"index", job.index}, {"rep", job.source}, {"descriptor", job.spec.descriptor()}};
    if (job.spec.size) j["size"] = *job.spec.size;
    try {
      Representation rep = make_representation(job.spec, pres.m());
      std::vector<double> defects = relator_defects(rep, pres);
      bool satisfied = true;
      for (double d : defects) satisfied = satisfied && d <= cfg.exact_defect_tolerance;
      // Built-in exact families must satisfy every relator; a loaded file
      // counts as exact when it happens to.
      const bool exact = rep.exact() || (job.spec.family == "file" && satisfied);
      j["dim"] = rep.dim();
      j["exact"] = exact;
      j["provenance"] = rep.provenance();
      j["relator_defects"] = defects;
      if (rep.exact())
        for (std::size_t r = 0; r < defects.size(); ++r)
          if (defects[r] > cfg.exact_defect_tolerance)
            throw UsageError("exact family mismatch: " + job.spec.descriptor() + " violates relator " +
                             std::to_string(r + 1) + " (" + pres.relators[r].to_string(pres.generators) +
                             "), defect " + format_defect(defects[r]));
      if (cfg.mode != RunMode::perturb) {
        SpectralReport sr = spectral_report(jac, rep, defects, cfg.spectral);
        j.update(spectral_json(sr, cfg));
        done.push_back({job.index, rep.dim(), exact, sr.rank.rank});
      }
      if (cfg.mode == RunMode::perturb || cfg.mode == RunMode::report)
        j["probe"] = probe_json(perturbation_probe(rs, jac, rep, cfg.eps, cfg.seed), cfg.seed);
      j["status"] = "ok";
      ++out.jobs_ok;
    } catch (const Error& e) {
      j["status"] = "failed";
      j["error"] = {{"code", static_cast<int>(e.code())}, {"message", e.what()}};
      if (out.jobs_failed++ == 0) {
        out.first_error = e.code();
        out.first_message = "job " + std::to_string(job.index) + " (" + job.spec.descriptor() + "): " + e.what();
      }
    }
    jobs.push_back(std::move(j));
  }
  doc["jobs"] = std::move(jobs);

  // Aggregate from the largest exact job, else the largest job of any kind.
  const Done* pick = nullptr;
  for (const Done& d : done)
    if (!pick || (d.exact && !pick->exact) || (d.exact == pick->exact && d.dim >= pick->dim)) pick = &d;
  if (pick) {
    BettiEstimate b = betti_estimate(std::clamp(pick->rank, 0.0, static_cast<double>(rs.n)), rs.n, pres.beta0(),
                                     !pres.order, cfg.spectral.beta_tolerance);
    json bj = betti_json(b);
    bj["source_job"] = pick->index;
    bj["flag"] = pick->exact ? "exact" : "sofic-proxy";
    doc["betti"] = bj;
    json line = json::array();
    for (double e : cfg.eps)
      if (e > 0.0) line.push_back({e, b.delta_upper * std::log(std::sqrt(e))});
    doc["bound_line"] = {{"columns", {"eps", "delta_upper_log_sqrt_eps"}},
                         {"note", "reference line (n - rank) log sqrt(eps); not a computed entropy"},
                         {"rows", line}};
  } else {
    doc["betti"] = nullptr;
    doc["bound_line"] = nullptr;
  }
  doc["summary"] = {{"jobs_ok", out.jobs_ok}, {"jobs_failed", out.jobs_failed}};
  return out;
}

std::string dump_report(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace fdq
