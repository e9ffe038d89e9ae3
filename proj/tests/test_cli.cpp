#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kmu/errors.hpp"
#include "kmu/pipeline.hpp"

using namespace kmu;
namespace fs = std::filesystem;

namespace {

ModelConfig milnor_config(double l2, double l3) {
  ModelConfig cfg;
  cfg.kind = "milnor";
  cfg.lambda2 = l2;
  cfg.lambda3 = l3;
  cfg.samples = 60;
  return cfg;
}

fs::path write_temp_config(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "kmu_cli_tests";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << text;
  return path;
}

int run_cli(const std::string& args, const fs::path& stdout_path = {}) {
  std::string cmd = std::string(KMU_CLI_PATH) + " " + args;
  if (!stdout_path.empty()) cmd += " > " + stdout_path.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("fit pipeline on the Heisenberg control") {
  const RunReport rep = run_fit(milnor_config(0.0, 0.0));
  CHECK(rep.pass);
  REQUIRE(rep.regime.has_value());
  CHECK(*rep.regime == Regime::Sasakian);
  REQUIRE(rep.fit.has_value());
  CHECK(rep.fit->kappa == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(rep.fit->mu.has_value());
}

TEST_CASE("regime classification follows the index") {
  CHECK(*run_fit(milnor_config(1.0, 4.0)).regime == Regime::Riemannian);
  CHECK(*run_fit(milnor_config(3.0, -1.0)).regime == Regime::Para);
}

TEST_CASE("descend and para are mutually exclusive successes") {
  const ModelConfig riem = milnor_config(1.0, 4.0);
  const ModelConfig para = milnor_config(3.0, -1.0);
  CHECK(run_descend(riem).pass);
  CHECK_FALSE(run_descend(para).pass);
  CHECK(run_para(para).pass);
  CHECK_FALSE(run_para(riem).pass);

  const RunReport blocked = run_descend(para);
  const CheckEntry* gate = blocked.checks.find("index_in_riemannian_regime");
  REQUIRE(gate != nullptr);
  CHECK_FALSE(gate->pass());
}

TEST_CASE("para pipeline counts 2^n solutions on a synthetic model") {
  ModelConfig cfg;
  cfg.kind = "synthetic";
  cfg.n = 2;
  cfg.kappa = 0.0;
  cfg.mu = 2.0;  // index 0
  const RunReport rep = run_para(cfg);
  CHECK(rep.pass);
  CHECK(rep.artifacts.at("solution_count").get<int>() == 4);
}

TEST_CASE("lift pipeline verifies the canonical Sasakian lift") {
  const RunReport rep = run_lift(milnor_config(1.0, 4.0));
  CHECK(rep.pass);
  CHECK(rep.checks.find("lifted_k_contact_defect")->value < 1e-8);
  CHECK(rep.checks.find("lifted_sasakian_residual")->value < 1e-5);
}

TEST_CASE("sweep classifies the parameter grid") {
  ModelConfig cfg = milnor_config(0.0, 0.0);
  cfg.samples = 40;
  cfg.sweep_lambda2 = {0.0, 2.0, 2};
  cfg.sweep_lambda3 = {-1.0, 4.0, 3};
  const RunReport rep = run_sweep(cfg);
  CHECK(rep.pass);
  CHECK(rep.artifacts.at("grid").size() == 6);
  // regimes follow the sign structure of (lambda2, lambda3)
  for (const auto& cell : rep.artifacts.at("grid")) {
    const double l2 = cell.at("lambda2").get<double>();
    const double l3 = cell.at("lambda3").get<double>();
    const std::string regime = cell.at("regime").get<std::string>();
    if (l2 == l3) {
      CHECK(regime == "sasakian");
    } else if (l2 * l3 > 0.0) {
      CHECK(regime == "riemannian");
    } else if (l2 * l3 < 0.0) {
      CHECK(regime == "para");
    } else {
      CHECK(regime == "boundary");  // one of them exactly zero
    }
  }
}

TEST_CASE("fit on a synthetic model is a config error") {
  ModelConfig cfg;
  cfg.kind = "synthetic";
  CHECK_THROWS_AS(run_fit(cfg), ConfigError);
  CHECK_THROWS_AS(run_command("unknown", cfg), ConfigError);
}

TEST_CASE("reports are deterministic given config and seed") {
  const ModelConfig cfg = milnor_config(1.0, 4.0);
  const RunReport a = run_descend(cfg);
  const RunReport b = run_descend(cfg);
  CHECK(a.to_json().dump(2) == b.to_json().dump(2));
  CHECK(a.human_table() == b.human_table());
}

TEST_CASE("json report carries the schema fields") {
  const RunReport rep = run_fit(milnor_config(1.0, 4.0));
  const nlohmann::ordered_json j = rep.to_json();
  CHECK(j.at("schema_version").get<int>() == 1);
  CHECK(j.at("command").get<std::string>() == "fit");
  CHECK(j.at("regime").get<std::string>() == "riemannian");
  CHECK(j.at("fit").at("kappa").is_number());
  CHECK(j.at("checks").is_array());
  for (const auto& row : j.at("checks")) {
    CHECK(row.contains("name"));
    CHECK(row.contains("value"));
    CHECK(row.contains("tolerance"));
    CHECK(row.contains("pass"));
  }
  CHECK(j.at("pass").is_boolean());
}

TEST_CASE("cli binary end to end") {
  const fs::path good = write_temp_config(
      "heisenberg.json", R"({"model": "milnor", "samples": 40})");
  const fs::path para_model = write_temp_config(
      "para.json",
      R"({"model": "milnor", "lambda2": 3.0, "lambda3": -1.0, "samples": 40})");
  const fs::path bad = write_temp_config(
      "bad.json", R"({"model": "synthetic", "kappa": 2})");
  const fs::path out_dir = good.parent_path();

  SUBCASE("fit exits 0 and writes the JSON report") {
    const fs::path json_out = out_dir / "fit_report.json";
    const int code = run_cli("fit --config " + good.string() + " --json " +
                                 json_out.string(),
                             out_dir / "fit_stdout.txt");
    CHECK(code == 0);
    const auto j = nlohmann::json::parse(slurp(json_out));
    CHECK(j.at("regime").get<std::string>() == "sasakian");
    CHECK(slurp(out_dir / "fit_stdout.txt").find("RESULT: PASS") !=
          std::string::npos);
  }
  SUBCASE("descend on a para-regime model exits 1 and cites the index gate") {
    const fs::path log = out_dir / "descend_stdout.txt";
    const int code =
        run_cli("descend --config " + para_model.string(), log);
    CHECK(code == 1);
    CHECK(slurp(log).find("index_in_riemannian_regime") != std::string::npos);
  }
  SUBCASE("para on the same model exits 0 with 2^1 solutions") {
    const fs::path json_out = out_dir / "para_report.json";
    const int code = run_cli("para --config " + para_model.string() +
                                 " --json " + json_out.string(),
                             out_dir / "para_stdout.txt");
    CHECK(code == 0);
    const auto j = nlohmann::json::parse(slurp(json_out));
    CHECK(j.at("artifacts").at("solution_count").get<int>() == 2);
  }
  SUBCASE("para on a synthetic n = 2 config lists 4 solutions") {
    const fs::path synth = write_temp_config(
        "synthetic_n2.json",
        R"({"model": "synthetic", "n": 2, "kappa": 0.0, "mu": 2.0})");
    const fs::path json_out = out_dir / "para_synth_report.json";
    const int code = run_cli("para --config " + synth.string() + " --json " +
                                 json_out.string(),
                             out_dir / "para_synth_stdout.txt");
    CHECK(code == 0);
    const auto j = nlohmann::json::parse(slurp(json_out));
    CHECK(j.at("artifacts").at("solution_count").get<int>() == 4);
  }
  SUBCASE("config errors exit 2 with the field name") {
    const fs::path log = out_dir / "bad_stdout.txt";
    CHECK(run_cli("validate --config " + bad.string(), log) == 2);
    CHECK(slurp(log).find("kappa") != std::string::npos);
  }
  SUBCASE("unknown commands exit 2") {
    CHECK(run_cli("frobnicate --config " + good.string(),
                  out_dir / "unknown_stdout.txt") == 2);
  }
  SUBCASE("missing config exits 2") {
    CHECK(run_cli("fit --config /nonexistent.json",
                  out_dir / "missing_stdout.txt") == 2);
  }
  SUBCASE("byte-identical output across repeated runs") {
    const fs::path a = out_dir / "run_a.txt";
    const fs::path b = out_dir / "run_b.txt";
    const std::string args = "descend --config " + para_model.string() +
                             " --seed 7 --samples 50";
    CHECK(run_cli(args, a) == 1);
    CHECK(run_cli(args, b) == 1);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
  }
}
