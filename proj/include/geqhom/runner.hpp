#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "geqhom/conditions.hpp"
#include "geqhom/config.hpp"

namespace geqhom {

/// Process exit statuses shared by the C API and the CLI.
enum class RunStatus : int {
  ok = 0,
  acceptance_failed = 1,
  invalid_config = 2,
  numerical_failure = 3,
  io_error = 4,
  internal_error = 5,
};

struct RunOutcome {
  RunStatus status = RunStatus::ok;
  std::string summary;  ///< JSON document; also written to <out>/summary.json when possible
  std::string message;  ///< diagnostic for a non-zero status
  std::filesystem::path out_dir;
};

/// Writes artifacts into one directory. JSON artifacts carry "config_hash"
/// and "config" (the parameter echo); CSV artifacts start with a comment line
/// holding both. Doubles are printed with 17 significant digits, so equal
/// values give equal bytes.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, const ExperimentConfig& config);

  void json(const std::string& name, Json body);
  void csv(const std::string& name, const std::vector<std::string>& columns,
           const std::vector<std::vector<double>>& rows);
  /// Mixed text columns (already formatted cells).
  void csv_text(const std::string& name, const std::vector<std::string>& columns,
                const std::vector<std::vector<std::string>>& rows);

  const std::vector<std::string>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  const ExperimentConfig& config_;
  std::vector<std::string> files_;
};

/// %.17g, with "inf" / "-inf" / "nan" for non-finite values.
std::string format_real(double v);
/// A JSON number, or the strings "inf" / "-inf" / "nan".
Json json_real(double v);
Json to_json(const ConditionReport& report);

/// Timing of one job, recorded in the manifest only (never in artifacts).
struct JobTiming {
  std::string name;
  double seconds = 0.0;
  std::string status;
};

/// Runs a validated configuration. Artifacts go to `out` (or config.out when
/// empty). Never throws; failures map onto the status.
RunOutcome run_experiment(const Json& doc, const std::string& out = "");

// Acceptance suite.

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  Json measured;        ///< deterministic measured values and thresholds
  std::string detail;   ///< one-line human summary
  double seconds = 0.0; ///< wall time; kept out of `measured`
};

/// Runs the selected criteria in order, calling `report` after each one.
/// Criterion 13 reruns the other selected criteria (all of 1-12 when none
/// are selected) and compares the two summaries byte for byte.
std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& config, std::uint64_t seed,
                                            const std::function<void(const CriterionResult&)>& report = {});

/// Deterministic summary of acceptance results (no timings).
Json acceptance_summary(const std::vector<CriterionResult>& results);

}  // namespace geqhom
