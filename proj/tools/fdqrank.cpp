// fdqrank command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdqrank/fdqrank.h"

namespace {

struct Options {
  std::string presentation;
  std::vector<std::string> reps;
  std::vector<std::size_t> sizes;
  std::string threshold = "plateau";
  std::vector<double> eps{1e-2, 1e-3, 1e-4};
  std::uint64_t seed = 0;
  std::string method = "auto";
  std::string out;
};

struct CString {
  char* p = nullptr;
  ~CString() { fdq_string_free(p); }
};

int emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(out, std::ios::binary);
  f << text;
  if (!f) {
    std::cerr << "fdqrank: cannot write '" << out << "'\n";
    return 1;
  }
  return 0;
}

int report_error(fdq_status st) {
  std::cerr << "fdqrank: " << fdq_last_error() << "\n";
  return static_cast<int>(st);
}

int symbolic(const Options& o, bool jacobian) {
  fdq_presentation* p = nullptr;
  if (fdq_status st = fdq_presentation_load(o.presentation.c_str(), &p)) return report_error(st);
  std::unique_ptr<fdq_presentation, decltype(&fdq_presentation_free)> pg(p, fdq_presentation_free);
  fdq_relations* r = nullptr;
  if (fdq_status st = fdq_relations_build(p, &r)) return report_error(st);
  std::unique_ptr<fdq_relations, decltype(&fdq_relations_free)> rg(r, fdq_relations_free);
  CString text;
  fdq_status st = jacobian ? fdq_jacobian_text(r, &text.p) : fdq_relations_text(r, &text.p);
  if (st) return report_error(st);
  return emit(text.p, o.out);
}

int sweep(const Options& o, const std::string& mode) {
  nlohmann::json cfg = {{"mode", mode},     {"presentation", o.presentation}, {"reps", o.reps},
                        {"sizes", o.sizes}, {"threshold", o.threshold},       {"eps", o.eps},
                        {"seed", o.seed},   {"method", o.method}};
  CString report;
  fdq_status st = fdq_run(cfg.dump().c_str(), &report.p);
  if (report.p) {
    if (int rc = emit(report.p, o.out)) return rc;
  }
  if (st) return report_error(st);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free difference quotient rank estimates for group presentations"};
  app.set_version_flag("--version", std::string(fdq_version()));
  app.require_subcommand(1);

  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--presentation", o.presentation, "Presentation file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output file (default: stdout)");
  };
  auto numeric = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--rep", o.reps, "Representation family: cyclic:N, torus:N, regular-cyclic:k, "
                                     "randperm:N:seed, file:PATH (repeatable)")
        ->required();
    sub->add_option("--sizes", o.sizes, "Size sweep for descriptors without a size, e.g. 10,20,50")->delimiter(',');
    sub->add_option("--threshold", o.threshold, "plateau | fixed:<relative>");
    sub->add_option("--eps", o.eps, "Probe eps values, e.g. 1e-2,1e-3")->delimiter(',');
    sub->add_option("--seed", o.seed, "Seed for randperm defaults and the probe");
    sub->add_option("--method", o.method, "SVD route")->check(CLI::IsMember({"auto", "dense", "blocks"}));
  };

  auto* relations = app.add_subcommand("relations", "Print the polynomial relation system F");
  common(relations);
  auto* jacobian = app.add_subcommand("jacobian", "Print the nonzero entries of dF");
  common(jacobian);
  std::vector<CLI::App*> numeric_cmds;
  for (const char* name : {"spectrum", "rank", "report", "perturb"}) {
    const char* help = std::string(name) == "spectrum" ? "Singular values, spectral measure and tail table"
                       : std::string(name) == "rank"   ? "Normalized rank curve and Betti estimate"
                       : std::string(name) == "report" ? "Full report including the perturbation probe"
                                                       : "Perturbation probe defect table";
    auto* sub = app.add_subcommand(name, help);
    numeric(sub);
    numeric_cmds.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (relations->parsed()) return symbolic(o, false);
  if (jacobian->parsed()) return symbolic(o, true);
  for (auto* sub : numeric_cmds)
    if (sub->parsed()) return sweep(o, sub->get_name());
  return 1;
}
