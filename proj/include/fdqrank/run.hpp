#pragma once

// End-to-end runs: presentation -> relation system -> per-job spectral
// analysis over representation sweeps -> one JSON report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdqrank/errors.hpp"
#include "fdqrank/spectral.hpp"

namespace fdq {

enum class RunMode { spectrum, rank, report, perturb };

std::string to_string(RunMode mode);
RunMode parse_run_mode(std::string_view text);
SvdMethod parse_svd_method(std::string_view text);
std::string to_string(SvdMethod method);

inline constexpr const char* kReportSchema = "fdqrank.report/1";

struct RunConfig {
  RunMode mode = RunMode::report;
  std::string presentation_path;
  /// Inline presentation text; takes precedence over the path when set.
  std::optional<std::string> presentation_text;
  std::vector<std::string> reps;
  /// Size sweep for descriptors that carry no size of their own.
  std::vector<std::size_t> sizes;
  std::vector<double> eps{1e-2, 1e-3, 1e-4};
  std::uint64_t seed = 0;
  SpectralConfig spectral;
  double exact_defect_tolerance = 1e-9;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Throws UsageError on an empty or unsorted sweep, bad eps values, or
  /// descriptors that do not parse.
  void validate() const;
};

/// FNV-1a 64 of the canonical config JSON, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

struct RunReport {
  nlohmann::json document;
  std::size_t jobs_ok = 0;
  std::size_t jobs_failed = 0;
  /// Code of the first failed job; used as the exit status when all fail.
  ErrorCode first_error = ErrorCode::ok;
  std::string first_message;
};

RunReport run(const RunConfig& cfg);

/// Serialized form written by the CLI: 2-space indented, trailing newline.
std::string dump_report(const nlohmann::json& doc);

}  // namespace fdq
