// Batch front end: loads a model config, runs one of the pipelines and emits
// a human-readable table plus an optional machine-readable JSON report.
//
// Exit codes: 0 all checks pass, 1 check failure, 2 usage/config error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kmu/errors.hpp"
#include "kmu/pipeline.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol_algebraic;
  std::optional<double> tol_fd;
  std::string json_path;
};

int run(const std::string& command, const Options& opt) {
  kmu::ModelConfig cfg = kmu::load_model_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.samples) cfg.samples = *opt.samples;
  if (opt.tol_algebraic) cfg.tol_algebraic = *opt.tol_algebraic;
  if (opt.tol_fd) cfg.tol_fd = *opt.tol_fd;
  if (cfg.samples < 1) throw kmu::ConfigError("samples", "must be >= 1");

  const kmu::RunReport report = kmu::run_command(command, cfg);
  std::cout << report.human_table();
  if (!opt.json_path.empty()) {
    std::ofstream out(opt.json_path);
    if (!out)
      throw kmu::ConfigError("(json)", "cannot open '" + opt.json_path + "'");
    out << report.to_json().dump(2) << "\n";
  }
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical workbench for contact metric (kappa,mu)-structures"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Options opt;
  const char* names[] = {"validate", "fit", "descend", "para", "lift", "sweep"};
  const char* blurbs[] = {
      "check the contact metric axioms and structural identities",
      "fit the nullity constants (kappa, mu) and the Boeckx index",
      "solve the Riemannian descent problem (|I_M| > 1)",
      "enumerate the 2^n almost para-Kahler base structures (|I_M| < 1)",
      "build and verify the canonical K-contact lift",
      "classify a (lambda2, lambda3) grid by regime"};
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->add_option("--config", opt.config_path, "model config (JSON)")
        ->required();
    sub->add_option("--seed", opt.seed, "override the sampling seed");
    sub->add_option("--samples", opt.samples, "override the sample count");
    sub->add_option("--json", opt.json_path, "write a JSON report here");
    sub->add_option("--tol-algebraic", opt.tol_algebraic,
                    "override the algebraic tolerance");
    sub->add_option("--tol-fd", opt.tol_fd,
                    "override the finite-difference tolerance");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), opt);
  } catch (const kmu::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
