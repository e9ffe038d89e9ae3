#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "kmu/models.hpp"
#include "kmu/nullity.hpp"

namespace kmu {

enum class Regime { Sasakian, Riemannian, Para, Boundary };
const char* regime_name(Regime r);

/// Regime of a fitted (or synthetic) structure: Sasakian when the index is
/// undefined, otherwise by the position of |I_M| relative to 1.
Regime classify_regime(const NullityFit& fit);

/// (kappa, mu, ...) record for structures that cannot be fitted (synthetic
/// pointwise structures carry their construction constants).
NullityFit synthetic_fit(const ContactMetricStructure& s);

struct RunReport {
  std::string command;
  std::string model_descriptor;
  ResidualReport checks;
  std::optional<NullityFit> fit;
  std::optional<Regime> regime;
  nlohmann::ordered_json artifacts = nlohmann::ordered_json::object();
  bool pass = true;

  nlohmann::ordered_json to_json() const;
  std::string human_table() const;
};

RunReport run_validate(const ModelConfig& cfg);
RunReport run_fit(const ModelConfig& cfg);
RunReport run_descend(const ModelConfig& cfg);
RunReport run_para(const ModelConfig& cfg);
RunReport run_lift(const ModelConfig& cfg);
RunReport run_sweep(const ModelConfig& cfg);

RunReport run_command(const std::string& command, const ModelConfig& cfg);

}  // namespace kmu
