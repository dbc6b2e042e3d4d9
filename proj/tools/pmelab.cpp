#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pmelab/error.hpp"
#include "pmelab/experiment.hpp"
#include "pmelab/field_io.hpp"
#include "pmelab/suites.hpp"

namespace {

int run(const std::string& config_path, const std::optional<std::string>& out,
        const std::optional<std::uint64_t>& seed, bool quiet) {
  auto cfg = pmelab::load_config(config_path);
  if (out) cfg.output_dir = *out;
  if (seed) cfg.seed = *seed;
  const auto summary = pmelab::run_experiment(cfg, quiet ? nullptr : &std::cout);
  int failed = 0;
  for (const auto& c : summary.checks) failed += !c.pass;
  if (!quiet || failed)
    std::cout << (summary.ok() ? "ok" : "FAILED") << ": " << summary.checks.size() - failed << "/"
              << summary.checks.size() << " checks passed, outputs in " << summary.output_dir.string()
              << '\n';
  return summary.ok() ? 0 : 1;
}

int verify(const std::string& suite, const std::optional<std::string>& out,
           const std::optional<std::uint64_t>& seed, bool quiet) {
  const auto r = seed ? pmelab::run_suite(suite, *seed) : pmelab::run_suite(suite);
  if (out) {
    std::filesystem::create_directories(*out);
    pmelab::write_json(pmelab::to_json(r), std::filesystem::path(*out) / ("verify_" + suite + ".json"));
  }
  if (!quiet)
    for (const auto& rep : r.reports)
      std::cout << (rep.pass ? "PASS " : "FAIL ") << rep.check << "  " << rep.params.dump() << '\n';
  std::cout << "verify " << suite << ": " << r.passed << " passed, " << r.failed << " failed\n";
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Porous medium equation lab: solver, oscillation cascades and estimate checks"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--out", out, "Output directory");
  app.add_option("--seed", seed, "Random seed");
  app.add_flag("--quiet", quiet, "Only print the final status line");

  std::string config;
  auto* run_cmd = app.add_subcommand("run", "Solve and analyze the scenario of a JSON config");
  run_cmd->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "Run a property suite");
  verify_cmd->add_option("suite", suite, "lemma9 | appendix | norms | degiorgi | all")
      ->required()
      ->check(CLI::IsMember({"lemma9", "appendix", "norms", "degiorgi", "all"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(config, out, seed, quiet);
    return verify(suite, out, seed, quiet);
  } catch (const pmelab::Error& e) {
    std::cerr << "pmelab: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "pmelab: " << e.what() << '\n';
    return 2;
  }
}
