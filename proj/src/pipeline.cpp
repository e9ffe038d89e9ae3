#include "kmu/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "kmu/descent.hpp"
#include "kmu/errors.hpp"
#include "kmu/para.hpp"

namespace kmu {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string descriptor(const ModelConfig& cfg) {
  std::string out = cfg.kind;
  if (cfg.kind == "synthetic") {
    out += "(n=" + fmt_short(cfg.n) + ", kappa=" + fmt_short(cfg.kappa) +
           ", mu=" + fmt_short(cfg.mu) + ")";
  } else if (cfg.kind == "heisenberg-chart") {
    out += "()";
  } else {
    out += "(lambda2=" + fmt_short(cfg.lambda2) +
           ", lambda3=" + fmt_short(cfg.lambda3) + ")";
  }
  if (cfg.homothety_a) out += " * D_" + fmt_short(*cfg.homothety_a);
  return out;
}

void append(ResidualReport& into, const ResidualReport& from,
            const std::string& prefix = "") {
  for (const CheckEntry& e : from.entries) {
    CheckEntry copy = e;
    copy.name = prefix + e.name;
    into.entries.push_back(std::move(copy));
  }
}

// Identity rows carry finite-difference noise on charts and are exact
// otherwise.
double identity_tol(const ModelConfig& cfg, const ContactMetricStructure& s) {
  return s.model.mode() == ModelMode::Chart ? cfg.tol_fd
                                            : std::max(cfg.tol_algebraic, 1e-10);
}

nlohmann::ordered_json fit_json(const NullityFit& fit) {
  nlohmann::ordered_json j;
  j["kappa"] = fit.kappa;
  if (fit.mu)
    j["mu"] = *fit.mu;
  else
    j["mu"] = nullptr;
  j["mu_indeterminate"] = !fit.mu.has_value();
  j["lambda"] = fit.lambda;
  if (fit.index)
    j["index"] = *fit.index;
  else
    j["index"] = nullptr;
  j["residual"] = fit.residual;
  return j;
}

NullityFit fit_or_synthetic(const ContactMetricStructure& s,
                            const ModelConfig& cfg) {
  return s.curvature_capable() ? fit_nullity(s, cfg.plan()) : synthetic_fit(s);
}

void add_regime_gate(RunReport& rep, const NullityFit& fit, bool riemannian) {
  const double abs_index = fit.index ? std::abs(*fit.index) : 0.0;
  if (riemannian) {
    rep.checks.add("index_in_riemannian_regime", abs_index - 1.0,
                   kIndexGuardBand, CheckKind::LowerBound);
  } else {
    rep.checks.add("index_in_para_regime", 1.0 - abs_index, 0.0,
                   CheckKind::LowerBound);
  }
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Sasakian: return "sasakian";
    case Regime::Riemannian: return "riemannian";
    case Regime::Para: return "para";
    case Regime::Boundary: return "boundary";
  }
  return "?";
}

Regime classify_regime(const NullityFit& fit) {
  if (!fit.index) return Regime::Sasakian;
  const double abs_index = std::abs(*fit.index);
  // The band around |I| = 1 where neither regime solver accepts the model.
  if (std::abs(abs_index - 1.0) <= kIndexGuardBand) return Regime::Boundary;
  return abs_index > 1.0 ? Regime::Riemannian : Regime::Para;
}

NullityFit synthetic_fit(const ContactMetricStructure& s) {
  if (s.kind != StructureKind::SyntheticPoint)
    throw PreconditionError("synthetic_fit needs a synthetic structure");
  NullityFit fit;
  fit.kappa = s.synthetic_kappa;
  fit.mu = s.synthetic_mu;
  fit.residual = 0.0;
  fit.lambda = std::sqrt(std::max(0.0, 1.0 - fit.kappa));
  if (fit.lambda > kSasakianLambdaTol)
    fit.index = (1.0 - *fit.mu / 2.0) / fit.lambda;
  return fit;
}

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["command"] = command;
  j["model"] = model_descriptor;
  if (regime)
    j["regime"] = regime_name(*regime);
  else
    j["regime"] = nullptr;
  if (fit)
    j["fit"] = fit_json(*fit);
  else
    j["fit"] = nullptr;
  auto rows = nlohmann::ordered_json::array();
  for (const CheckEntry& e : checks.entries) {
    nlohmann::ordered_json row;
    row["name"] = e.name;
    row["value"] = e.value;
    row["tolerance"] = e.tolerance;
    row["kind"] = e.kind == CheckKind::UpperBound ? "upper" : "lower";
    row["applicable"] = e.applicable;
    row["pass"] = e.pass();
    rows.push_back(std::move(row));
  }
  j["checks"] = std::move(rows);
  j["artifacts"] = artifacts;
  j["pass"] = pass;
  return j;
}

std::string RunReport::human_table() const {
  std::ostringstream out;
  out << "command: " << command << "\n";
  out << "model:   " << model_descriptor << "\n";
  if (regime) out << "regime:  " << regime_name(*regime) << "\n";
  if (fit) {
    out << "fit:     kappa=" << fmt(fit->kappa);
    out << " mu=" << (fit->mu ? fmt(*fit->mu) : std::string("indeterminate"));
    out << " lambda=" << fmt(fit->lambda);
    out << " I_M=" << (fit->index ? fmt(*fit->index) : std::string("undefined"));
    out << "\n";
  }
  if (artifacts.contains("grid")) {
    out << "\n";
    char row[200];
    std::snprintf(row, sizeof row, "%-10s %-10s %-22s %-22s %-22s %s\n",
                  "lambda2", "lambda3", "kappa", "mu", "index", "regime");
    out << row;
    for (const auto& cell : artifacts["grid"]) {
      std::snprintf(
          row, sizeof row, "%-10s %-10s %-22s %-22s %-22s %s\n",
          fmt_short(cell["lambda2"].get<double>()).c_str(),
          fmt_short(cell["lambda3"].get<double>()).c_str(),
          fmt(cell["kappa"].get<double>()).c_str(),
          cell["mu"].is_null() ? "indeterminate"
                               : fmt(cell["mu"].get<double>()).c_str(),
          cell["index"].is_null() ? "undefined"
                                  : fmt(cell["index"].get<double>()).c_str(),
          cell["regime"].get<std::string>().c_str());
      out << row;
    }
  }
  out << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-36s %-20s %-12s %-6s %s\n", "check",
                "value", "tolerance", "bound", "verdict");
  out << line;
  for (const CheckEntry& e : checks.entries) {
    std::snprintf(line, sizeof line, "%-36s %-20s %-12.3e %-6s %s\n",
                  e.name.c_str(), fmt(e.value).c_str(), e.tolerance,
                  e.kind == CheckKind::UpperBound ? "<" : ">",
                  !e.applicable ? "n/a" : (e.pass() ? "pass" : "FAIL"));
    out << line;
  }
  out << "\nRESULT: " << (pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

RunReport run_validate(const ModelConfig& cfg) {
  RunReport rep;
  rep.command = "validate";
  rep.model_descriptor = descriptor(cfg);
  const ContactMetricStructure s = build_from_config(cfg);

  append(rep.checks, validate_contact_metric(s, cfg.plan(), cfg.tol_validate));
  append(rep.checks, contact_identity_report(s, h_field(s), std::nullopt,
                                             cfg.plan(), identity_tol(cfg, s)));
  const HValue h = compute_h(s, s.origin());
  rep.artifacts["h_lambda"] = h.lambda;
  rep.artifacts["k_contact_defect"] = k_contact_defect(s, cfg.plan());
  rep.pass = rep.checks.pass();
  return rep;
}

RunReport run_fit(const ModelConfig& cfg) {
  RunReport rep;
  rep.command = "fit";
  rep.model_descriptor = descriptor(cfg);
  const ContactMetricStructure s = build_from_config(cfg);
  if (!s.curvature_capable())
    throw ConfigError("model",
                      "synthetic structures carry no curvature; `fit` needs a "
                      "curvature-capable model");

  const NullityFit fit = fit_nullity(s, cfg.plan());
  rep.fit = fit;
  rep.regime = classify_regime(fit);
  rep.checks.add("nullity_fit_residual", fit.residual, cfg.tol_nullity);
  append(rep.checks, contact_identity_report(s, h_field(s), fit.kappa,
                                             cfg.plan(), identity_tol(cfg, s)));
  if (fit.accepted(cfg.tol_nullity)) {
    rep.checks.add("lie_xi_h_identity",
                   lie_xi_h_report(s, fit, cfg.plan(), cfg.tol_nullity),
                   identity_tol(cfg, s));
  }
  rep.artifacts["fit"] = fit_json(fit);
  rep.pass = rep.checks.pass();
  return rep;
}

RunReport run_descend(const ModelConfig& cfg) {
  RunReport rep;
  rep.command = "descend";
  rep.model_descriptor = descriptor(cfg);
  const ContactMetricStructure s = build_from_config(cfg);
  const NullityFit fit = fit_or_synthetic(s, cfg);
  rep.fit = fit;
  rep.regime = classify_regime(fit);
  if (s.curvature_capable())
    rep.checks.add("nullity_fit_residual", fit.residual, cfg.tol_nullity);

  add_regime_gate(rep, fit, /*riemannian=*/true);
  if (!rep.checks.pass()) {
    rep.pass = false;
    return rep;
  }

  const Vec p = s.origin();
  const double index = *fit.index;
  const Mat h = compute_h(s, p).comps;
  const ErrorTensorSolution sol = build_error_tensor(s, h, fit, cfg.scale, p);

  append(rep.checks,
         error_tensor_report(s, fit, ScalarField(std::log(cfg.scale) / 2.0),
                             cfg.plan(), identity_tol(cfg, s)));

  // Base metric: positive definiteness, scale independence, orthogonality.
  const Mat base_g = canonical_base_metric(s, fit, p);
  const int n = s.n();
  Mat gram(2 * n, 2 * n);
  std::vector<Vec> adapted = sol.basis.pos;
  adapted.insert(adapted.end(), sol.basis.neg.begin(), sol.basis.neg.end());
  for (int a = 0; a < 2 * n; ++a)
    for (int b = 0; b < 2 * n; ++b)
      gram(a, b) = adapted[a].dot(base_g * adapted[b]);
  Eigen::SelfAdjointEigenSolver<Mat> gram_eig(0.5 * (gram + gram.transpose()));
  rep.checks.add("base_metric_positive_definite",
                 gram_eig.eigenvalues().minCoeff(), 1e-12,
                 CheckKind::LowerBound);

  // Chart models carry finite-difference noise through the fitted constants;
  // homogeneous models are exact, where the tight bounds are pinned.
  const bool chart = s.model.mode() == ModelMode::Chart;
  const double tight = chart ? cfg.tol_fd : 1e-9;
  const double tight_alg = chart ? cfg.tol_fd : std::max(cfg.tol_algebraic, 1e-10);

  double scale_drift = 0.0;
  for (double scale : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const Mat via_t = base_metric_via_error_tensor(s, fit, scale, p);
    scale_drift =
        std::max(scale_drift, (via_t - base_g).cwiseAbs().maxCoeff());
  }
  rep.checks.add("base_metric_scale_independent", scale_drift, tight);

  double ortho = 0.0;
  for (const Vec& vp : sol.basis.pos)
    for (const Vec& vn : sol.basis.neg)
      ortho = std::max(ortho, std::abs(vp.dot(base_g * vn)));
  rep.checks.add("eigendistributions_g_orthogonal", ortho,
                 chart ? cfg.tol_fd : 1e-10);

  // Base complex structure: J^2 = -I on horizontals, omega-compatibility,
  // and projectability of (g, J).
  const Mat base_j = base_complex_structure(s, fit, p);
  const Mat proj = Mat::Identity(s.dim(), s.dim()) -
                   s.xi(p) * s.eta(p).transpose();
  rep.checks.add("J_square_identity",
                 (base_j * base_j + proj).cwiseAbs().maxCoeff(), tight_alg);
  rep.checks.add("omega_J_compatibility",
                 (d_eta(s, p) - base_g * base_j).cwiseAbs().maxCoeff(),
                 tight_alg);
  if (s.kind != StructureKind::SyntheticPoint) {
    const double proj_g =
        lie_derivative(s.model, s.xi, TensorField(base_g), Valence::Cov2, p)
            .cwiseAbs()
            .maxCoeff();
    const double proj_j =
        lie_derivative(s.model, s.xi, TensorField(base_j), Valence::Mixed11, p)
            .cwiseAbs()
            .maxCoeff();
    rep.checks.add("base_metric_projectable", proj_g, identity_tol(cfg, s));
    rep.checks.add("base_complex_projectable", proj_j, identity_tol(cfg, s));
  }

  const ConformalFeasibility conf = conformal_feasibility(s, cfg.plan());
  rep.artifacts["conformal"] = {{"forced_scale", conf.forced_scale},
                                {"k_contact_defect", conf.k_contact_defect},
                                {"feasible", conf.feasible}};
  rep.artifacts["index"] = index;
  rep.artifacts["scale"] = cfg.scale;
  rep.artifacts["eigenvalues"] = {sol.lam_pos, sol.lam_neg};
  const double c = std::abs(index) / std::sqrt(index * index - 1.0);
  rep.artifacts["metric_factors"] = {c * (1.0 + 1.0 / index),
                                     c * (1.0 - 1.0 / index)};
  rep.pass = rep.checks.pass();
  return rep;
}

RunReport run_para(const ModelConfig& cfg) {
  RunReport rep;
  rep.command = "para";
  rep.model_descriptor = descriptor(cfg);
  const ContactMetricStructure s = build_from_config(cfg);
  const NullityFit fit = fit_or_synthetic(s, cfg);
  rep.fit = fit;
  rep.regime = classify_regime(fit);
  if (s.curvature_capable())
    rep.checks.add("nullity_fit_residual", fit.residual, cfg.tol_nullity);

  add_regime_gate(rep, fit, /*riemannian=*/false);
  if (!rep.checks.pass()) {
    rep.pass = false;
    return rep;
  }

  const Vec p = s.origin();
  const double index = *fit.index;
  const Mat h = compute_h(s, p).comps;
  const AdaptedBasis basis = eigendistributions(s, h, p);
  const std::vector<ParaSolution> sols =
      enumerate_para_solutions(s, basis, index);
  const Mat omega = omega_in_adapted_basis(s, basis, p);

  const int n = s.n();
  rep.checks.add("solution_count_is_2_pow_n",
                 std::abs(static_cast<double>(sols.size()) -
                          std::pow(2.0, n)),
                 0.5);

  double f_sq = 0.0, compat = 0.0, signature = 0.0, complement = 0.0,
         recovered = 0.0, on_curves = 0.0;
  double nondeg = std::numeric_limits<double>::infinity();
  for (const ParaSolution& sol : sols) {
    const ResidualReport r = para_compatibility_report(sol, omega);
    f_sq = std::max(f_sq, r.find("F_square_identity")->value);
    compat = std::max(compat, r.find("omega_compatibility")->value);
    signature = std::max(signature, r.find("signature_defect")->value);
    nondeg = std::min(nondeg, r.find("gram_nondegenerate")->value);

    const ParaSolution& comp = sols[(~sol.subset) & ((1u << n) - 1u)];
    complement = std::max(complement, (sol.F + comp.F).cwiseAbs().maxCoeff());
    complement = std::max(complement, (sol.g + comp.g).cwiseAbs().maxCoeff());

    const SemiErrorTensor t = semi_error_tensor(
        s, index, para_pairs_for_subset(index, sol.subset, n));
    recovered = std::max(recovered,
                         (t.recovered_g - sol.g).cwiseAbs().maxCoeff());
    for (const auto& pr : t.pairs) {
      on_curves = std::max(on_curves,
                           std::abs((1.0 - pr.x()) * (1.0 - pr.y()) + 1.0));
      on_curves = std::max(on_curves,
                           std::abs((index - 1.0) * pr.x() -
                                    (1.0 + index) * pr.y() + 2.0));
    }
  }
  rep.checks.add("F_square_identity", f_sq, 1e-12);
  rep.checks.add("omega_compatibility", compat, 1e-12);
  rep.checks.add("signature_defect", signature, 0.5);
  rep.checks.add("gram_nondegenerate", nondeg, 1e-10, CheckKind::LowerBound);
  rep.checks.add("complement_symmetry", complement, 1e-14);
  rep.checks.add("error_tensor_recovers_g", recovered, 1e-14);
  rep.checks.add("pairs_on_line_and_hyperbola", on_curves, 1e-12);

  const IntersectionPoints pts = para_intersection_points(index);
  rep.artifacts["index"] = index;
  rep.artifacts["solution_count"] = sols.size();
  rep.artifacts["a0"] = sols.front().a0;
  rep.artifacts["p1"] = {pts.p1.x(), pts.p1.y()};
  rep.artifacts["p2"] = {pts.p2.x(), pts.p2.y()};
  rep.pass = rep.checks.pass();
  return rep;
}

RunReport run_lift(const ModelConfig& cfg) {
  RunReport rep;
  rep.command = "lift";
  rep.model_descriptor = descriptor(cfg);
  const ContactMetricStructure s = build_from_config(cfg);
  const NullityFit fit = fit_or_synthetic(s, cfg);
  rep.fit = fit;
  rep.regime = classify_regime(fit);
  if (s.curvature_capable())
    rep.checks.add("nullity_fit_residual", fit.residual, cfg.tol_nullity);

  add_regime_gate(rep, fit, /*riemannian=*/true);
  if (!rep.checks.pass()) {
    rep.pass = false;
    return rep;
  }

  const Vec p = s.origin();
  const bool chart = s.model.mode() == ModelMode::Chart;
  const Mat base_g = canonical_base_metric(s, fit, p);
  const Mat base_j = base_complex_structure(s, fit, p);
  const ContactMetricStructure lifted = build_lifted_structure(
      s, TensorField(base_g), TensorField(base_j), identity_tol(cfg, s));

  append(rep.checks,
         validate_contact_metric(lifted, cfg.plan(), cfg.tol_validate),
         "lifted_");
  rep.checks.add("lifted_k_contact_defect",
                 k_contact_defect(lifted, cfg.plan()), chart ? 1e-7 : 1e-8);
  if (lifted.curvature_capable()) {
    rep.checks.add("lifted_sasakian_residual",
                   sasakian_nullity_residual(lifted, cfg.plan()), 1e-5);
  }
  rep.artifacts["index"] = *fit.index;
  rep.pass = rep.checks.pass();
  return rep;
}

RunReport run_sweep(const ModelConfig& cfg) {
  RunReport rep;
  rep.command = "sweep";
  rep.model_descriptor = "milnor grid";
  if (cfg.kind == "synthetic")
    throw ConfigError("model", "`sweep` iterates the Milnor family");

  auto axis_values = [](const SweepAxis& ax) {
    std::vector<double> vals;
    for (int i = 0; i < ax.count; ++i)
      vals.push_back(ax.count == 1 ? ax.min
                                   : ax.min + (ax.max - ax.min) * i /
                                                  (ax.count - 1));
    return vals;
  };

  double worst_residual = 0.0;
  auto grid = nlohmann::ordered_json::array();
  for (double l2 : axis_values(cfg.sweep_lambda2)) {
    for (double l3 : axis_values(cfg.sweep_lambda3)) {
      const ContactMetricStructure s = build_milnor_model(l2, l3);
      const NullityFit fit = fit_nullity(s, cfg.plan());
      worst_residual = std::max(worst_residual, fit.residual);
      nlohmann::ordered_json cell;
      cell["lambda2"] = l2;
      cell["lambda3"] = l3;
      cell["kappa"] = fit.kappa;
      if (fit.mu)
        cell["mu"] = *fit.mu;
      else
        cell["mu"] = nullptr;
      if (fit.index)
        cell["index"] = *fit.index;
      else
        cell["index"] = nullptr;
      cell["regime"] = regime_name(classify_regime(fit));
      cell["residual"] = fit.residual;
      grid.push_back(std::move(cell));
    }
  }
  rep.checks.add("sweep_fit_residual_max", worst_residual, cfg.tol_nullity);
  rep.artifacts["grid"] = std::move(grid);
  rep.pass = rep.checks.pass();
  return rep;
}

RunReport run_command(const std::string& command, const ModelConfig& cfg) {
  if (command == "validate") return run_validate(cfg);
  if (command == "fit") return run_fit(cfg);
  if (command == "descend") return run_descend(cfg);
  if (command == "para") return run_para(cfg);
  if (command == "lift") return run_lift(cfg);
  if (command == "sweep") return run_sweep(cfg);
  throw ConfigError("command", "unknown command '" + command + "'");
}

}  // namespace kmu
