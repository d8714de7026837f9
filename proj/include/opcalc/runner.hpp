#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace opcalc::runner {

using json = nlohmann::json;

inline const std::set<std::string>& suite_names() {
  static const std::set<std::string> names{"logrep", "hierarchy", "factorization", "hygen", "pde"};
  return names;
}

/// Replaces A_k by A_k + shift I in every order-n residual check.
struct FaultInjection {
  int member = 1;
  double shift = 1.0;
};

struct CampaignConfig {
  std::uint64_t seed = 0;
  /// Per-case tolerance overrides, keyed by case id.
  std::map<std::string, double> tolerances;
  std::filesystem::path output_dir = "opcalc-out";
  std::set<std::string> suites;
  std::vector<std::filesystem::path> generators;
  std::vector<std::filesystem::path> scenarios;
  std::optional<FaultInjection> fault;
  /// FNV-1a digest of the canonical config text.
  std::string digest;
};

/// Parses and validates a campaign file. Relative fixture paths resolve
/// against the config file's directory. `suite_override` (when nonempty)
/// replaces the file's suite list; throws ConfigError with field diagnostics.
CampaignConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& suite_override = {},
                           const std::optional<std::filesystem::path>& out_override = std::nullopt);
CampaignConfig parse_config(const json& j, const std::filesystem::path& base_dir);

struct Residual {
  std::string name;
  double value = 0.0;
};

struct Record {
  std::string suite;
  std::string case_id;
  std::string anchor;
  std::string inputs_digest;
  std::vector<Residual> residuals;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
  double wall_seconds = 0.0;
};

/// Runs the selected suites; records come back sorted by (suite, case id).
std::vector<Record> run_campaign(const CampaignConfig& cfg);

/// report.json, report.csv and the timing.json sidecar under cfg.output_dir.
void write_reports(const CampaignConfig& cfg, const std::vector<Record>& records);

json report_json(const CampaignConfig& cfg, const std::vector<Record>& records);

/// Full run: 0 when every record passes, 1 otherwise.
int run_suite(const CampaignConfig& cfg);

struct CaseInfo {
  std::string id;
  std::string suite;
  std::string anchor;
  std::string inputs;
  std::string contract;
};

const std::vector<CaseInfo>& case_registry();

/// Throws UnknownCase for ids outside the registry.
std::string describe_case(const std::string& id);

std::string fnv1a_hex(const std::string& text);

}  // namespace opcalc::runner
