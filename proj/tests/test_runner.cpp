#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "opcalc/error.hpp"
#include "opcalc/runner.hpp"

using namespace opcalc;
using namespace opcalc::runner;

namespace {

const std::filesystem::path kFixtures = OPCALC_FIXTURES_DIR;

Errc config_code(const json& j) {
  try {
    parse_config(j, kFixtures);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK(config_code(json::parse(R"({"seed": 1, "bogus": 2})")) == Errc::ConfigError);
  CHECK(config_code(json::parse(R"({"seed": "1"})")) == Errc::ConfigError);
  CHECK(config_code(json::parse(R"({"seed": 1.5})")) == Errc::ConfigError);
  CHECK(config_code(json::parse(R"({"seed": 1, "suites": ["nope"]})")) == Errc::ConfigError);
  CHECK(config_code(json::parse(R"({"seed": 1, "generators": ["missing.json"]})")) == Errc::ConfigError);
  CHECK(config_code(json::parse(R"({"seed": 1, "tolerances": {"pde/example1-k1": -1}})")) == Errc::ConfigError);
  CHECK(config_code(json::parse(R"({"seed": 1, "fault_injection": {"shift": 1}})")) == Errc::ConfigError);
  try {
    load_config(kFixtures / "malformed.json");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConfigError);
  }

  const CampaignConfig cfg = parse_config(json::parse(R"({"seed": 3, "suites": ["all"]})"), kFixtures);
  CHECK(cfg.suites == suite_names());
  const CampaignConfig over = load_config(kFixtures / "hierarchy_constant.json", {"pde"}, "elsewhere");
  CHECK(over.suites == std::set<std::string>{"pde"});
  CHECK(over.output_dir == "elsewhere");
  CHECK(over.generators.size() == 1);
}

TEST_CASE("campaigns are deterministic and sorted") {
  CampaignConfig cfg = load_config(kFixtures / "campaign_all.json");
  const auto first = run_campaign(cfg);
  const auto second = run_campaign(cfg);
  CHECK(report_json(cfg, first).dump() == report_json(cfg, second).dump());
  for (std::size_t i = 1; i < first.size(); ++i) {
    CHECK(std::tie(first[i - 1].suite, first[i - 1].case_id) < std::tie(first[i].suite, first[i].case_id));
  }
  for (const auto& r : first) CHECK_MESSAGE(r.passed, r.suite << "/" << r.case_id << ": " << r.note);
  cfg.seed += 1;
  CHECK(report_json(cfg, run_campaign(cfg)).dump() != report_json(cfg, first).dump());
}

TEST_CASE("fault injection fails the anchored record") {
  const auto records = run_campaign(load_config(kFixtures / "fault_cp2.json"));
  bool failed = false;
  for (const auto& r : records) {
    if (!r.passed) {
      failed = true;
      CHECK(r.anchor.find("cp2") != std::string::npos);
    }
  }
  CHECK(failed);
}

TEST_CASE("reports on disk") {
  CampaignConfig cfg = load_config(kFixtures / "hierarchy_constant.json");
  cfg.output_dir = std::filesystem::temp_directory_path() / "opcalc-test-reports";
  std::filesystem::remove_all(cfg.output_dir);
  CHECK(run_suite(cfg) == 0);
  for (const char* name : {"report.json", "report.csv", "timing.json"}) {
    CHECK(std::filesystem::exists(cfg.output_dir / name));
  }
  std::ifstream f(cfg.output_dir / "report.json");
  const json j = json::parse(f);
  CHECK(j.at("meta").at("seed") == cfg.seed);
  CHECK(j.at("records").size() > 0);
  std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("case registry") {
  const auto& reg = case_registry();
  CHECK(reg.size() >= 27);
  for (const auto& c : reg) {
    CHECK(suite_names().contains(c.suite));
    CHECK_FALSE(c.anchor.empty());
  }
  CHECK(describe_case("hierarchy/cp2-constant").find("cp2") != std::string::npos);
  try {
    describe_case("hierarchy/none");
    FAIL("expected UnknownCase");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownCase);
  }
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
