#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "opcalc/kernels.hpp"
#include "opcalc/runner.hpp"

namespace {

void apply_thread_cap() {
  const char* env = std::getenv("OPCALC_THREADS");
  if (env == nullptr || *env == '\0') return;
  try {
    opcalc::kernels::set_thread_cap(std::stoi(env));
  } catch (const std::exception&) {
    std::cerr << "ignoring OPCALC_THREADS='" << env << "'\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-calculus verification campaigns"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> suites;
  std::string out;
  auto* run = app.add_subcommand("run", "Run verification suites from a campaign file");
  run->add_option("--config", config, "Campaign JSON file")->required();
  run->add_option("--suite", suites, "Suites to run (logrep, hierarchy, factorization, hygen, pde, all)");
  run->add_option("--out", out, "Output directory (overrides the config)");

  std::string case_id;
  auto* describe = app.add_subcommand("describe", "Show a registered case");
  describe->add_option("case-id", case_id, "Case id, e.g. logrep/scalar-recovery")->required();

  auto* version = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  apply_thread_cap();
  try {
    if (*version) {
      std::cout << "opcalc " << OPCALC_VERSION << "\n";
      return 0;
    }
    if (*describe) {
      std::cout << opcalc::runner::describe_case(case_id);
      return 0;
    }
    std::optional<std::filesystem::path> out_dir;
    if (!out.empty()) out_dir = out;
    const auto cfg = opcalc::runner::load_config(config, suites, out_dir);
    const auto records = opcalc::runner::run_campaign(cfg);
    opcalc::runner::write_reports(cfg, records);
    int failed = 0;
    for (const auto& r : records) {
      if (!r.passed) {
        ++failed;
        std::cerr << "FAIL " << r.case_id << " [" << r.anchor << "] " << r.note << "\n";
      }
    }
    std::cout << records.size() - failed << "/" << records.size() << " records passed; report in "
              << cfg.output_dir.string() << "\n";
    return failed == 0 ? 0 : 1;
  } catch (const opcalc::Error& e) {
    std::cerr << e.what() << "\n";
    if (e.code() == opcalc::Errc::ConfigError || e.code() == opcalc::Errc::UnknownCase) return 2;
    return 1;
  }
}
