#include "kmu/models.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kmu/errors.hpp"
#include "kmu/nullity.hpp"

namespace kmu {

namespace {

// Shared Milnor-frame structure tensors: xi = E1, eta = E1-flat,
// phi E2 = E3, phi E3 = -E2.
struct MilnorTensors {
  Vec eta = Vec::Zero(3);
  Vec xi = Vec::Zero(3);
  Mat phi = Mat::Zero(3, 3);
  MilnorTensors() {
    eta[0] = 1.0;
    xi[0] = 1.0;
    phi(2, 1) = 1.0;
    phi(1, 2) = -1.0;
  }
};

BracketTable milnor_table(double lambda2, double lambda3) {
  BracketTable table(3);
  table.set(1, 2, 2.0 * Vec::Unit(3, 0));
  table.set(2, 0, lambda2 * Vec::Unit(3, 1));
  table.set(0, 1, lambda3 * Vec::Unit(3, 2));
  return table;
}

}  // namespace

ContactMetricStructure build_milnor_model(double lambda2, double lambda3) {
  const MilnorTensors t;
  ContactMetricStructure s;
  s.model = FrameModel::homogeneous(milnor_table(lambda2, lambda3),
                                    Mat::Identity(3, 3));
  s.eta = CovectorField(t.eta);
  s.xi = VectorField(t.xi);
  s.phi = TensorField(t.phi);
  s.kind = StructureKind::Homogeneous;
  return s;
}

ContactMetricStructure heisenberg_chart_model(double fd_step) {
  std::vector<FrameModel::VecFn> frame;
  frame.push_back([](const Vec&) { return Vec(Vec::Unit(3, 2)); });  // d/dz
  frame.push_back([](const Vec&) { return Vec(Vec::Unit(3, 0)); });  // d/dx
  frame.push_back([](const Vec& p) {
    Vec v = Vec::Unit(3, 1);  // d/dy + 2x d/dz
    v[2] = 2.0 * p[0];
    return v;
  });
  const MilnorTensors t;
  ContactMetricStructure s;
  s.model = FrameModel::chart(
      std::move(frame), [](const Vec&) { return Mat(Mat::Identity(3, 3)); },
      fd_step, 5.0);
  s.eta = CovectorField(t.eta);
  s.xi = VectorField(t.xi);
  s.phi = TensorField(t.phi);
  s.kind = StructureKind::Chart;
  return s;
}

FrameModel exponential_chart_model(const BracketTable& table, const Mat& metric,
                                   double fd_step, double domain_radius) {
  const int d = table.dim();
  // Bernoulli coefficients of B(z) = z / (1 - e^-z); truncation error is
  // below 1e-12 for |ad_x| <= 0.5, which the domain radius keeps us under.
  auto transport = [table, d](const Vec& x) {
    const Mat ad = table.adjoint(x);
    const Mat ad2 = ad * ad;
    Mat b = Mat::Identity(d, d) + 0.5 * ad + ad2 / 12.0;
    const Mat ad4 = ad2 * ad2;
    b -= ad4 / 720.0;
    b += ad4 * ad2 / 30240.0;
    b -= ad4 * ad4 / 1209600.0;
    b += ad4 * ad4 * ad2 * (5.0 / 66.0 / 3628800.0);
    return b;
  };
  std::vector<FrameModel::VecFn> frame;
  frame.reserve(d);
  for (int i = 0; i < d; ++i)
    frame.push_back([transport, d, i](const Vec& x) {
      return Vec(transport(x) * Vec::Unit(d, i));
    });
  return FrameModel::chart(std::move(frame),
                           [metric](const Vec&) { return metric; }, fd_step,
                           domain_radius);
}

ContactMetricStructure milnor_exp_chart_model(double lambda2, double lambda3,
                                              double fd_step) {
  const MilnorTensors t;
  ContactMetricStructure s;
  s.model = exponential_chart_model(milnor_table(lambda2, lambda3),
                                    Mat::Identity(3, 3), fd_step);
  s.eta = CovectorField(t.eta);
  s.xi = VectorField(t.xi);
  s.phi = TensorField(t.phi);
  s.kind = StructureKind::Chart;
  return s;
}

ContactMetricStructure synthetic_pointwise_structure(int n, double kappa,
                                                     double mu) {
  if (n < 1) throw PreconditionError("n >= 1 required");
  if (kappa > 1.0)
    throw PreconditionError("kappa <= 1 required");
  const int d = 2 * n + 1;
  const double lambda = std::sqrt(std::max(0.0, 1.0 - kappa));

  Mat phi = Mat::Zero(d, d);
  Mat h = Mat::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    phi(n + i, i) = 1.0;   // phi e_i = e_{n+i}
    phi(i, n + i) = -1.0;  // phi e_{n+i} = -e_i
    h(i, i) = lambda;
    h(n + i, n + i) = -lambda;
  }

  ContactMetricStructure s;
  s.model = FrameModel::homogeneous(BracketTable(d), Mat::Identity(d, d));
  s.eta = CovectorField(Vec(Vec::Unit(d, d - 1)));
  s.xi = VectorField(Vec(Vec::Unit(d, d - 1)));
  s.phi = TensorField(std::move(phi));
  s.kind = StructureKind::SyntheticPoint;
  s.prescribed_h = TensorField(std::move(h));
  s.synthetic_kappa = kappa;
  s.synthetic_mu = mu;
  return s;
}

ContactMetricStructure apply_d_homothety(const ContactMetricStructure& s,
                                         double a) {
  if (a == 0.0) throw PreconditionError("homothety constant must be nonzero");
  if (a < 0.0)
    throw PreconditionError("homothety constant must be positive in Riemannian mode");

  ContactMetricStructure out = s;

  TensorField metric;
  if (s.model.metric_field().is_constant() && s.eta.is_constant()) {
    const Mat m = s.model.metric_field().constant_value();
    const Vec eta = s.eta.constant_value();
    metric = TensorField(Mat(a * m + a * (a - 1.0) * eta * eta.transpose()));
  } else {
    const ContactMetricStructure base = s;
    metric = TensorField([base, a](const Vec& q) {
      const Vec eta = base.eta(q);
      return Mat(a * base.g_tilde(q) +
                 a * (a - 1.0) * eta * eta.transpose());
    });
  }
  out.model = s.model.with_metric(std::move(metric));

  if (s.eta.is_constant()) {
    out.eta = CovectorField(Vec(a * s.eta.constant_value()));
  } else {
    const CovectorField eta0 = s.eta;
    out.eta = CovectorField([eta0, a](const Vec& q) { return Vec(a * eta0(q)); });
  }
  if (s.xi.is_constant()) {
    out.xi = VectorField(Vec(s.xi.constant_value() / a));
  } else {
    const VectorField xi0 = s.xi;
    out.xi = VectorField([xi0, a](const Vec& q) { return Vec(xi0(q) / a); });
  }

  if (s.prescribed_h) {
    const TensorField h0 = *s.prescribed_h;
    if (h0.is_constant()) {
      out.prescribed_h = TensorField(Mat(h0.constant_value() / a));
    } else {
      out.prescribed_h =
          TensorField([h0, a](const Vec& q) { return Mat(h0(q) / a); });
    }
  }
  if (s.kind == StructureKind::SyntheticPoint) {
    const KappaMu km =
        d_homothety_constants(s.synthetic_kappa, s.synthetic_mu, a);
    out.synthetic_kappa = km.kappa;
    out.synthetic_mu = km.mu;
  }
  return out;
}

namespace {

using nlohmann::json;

double get_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw ConfigError(key, "expected a number");
  return j[key].get<double>();
}

}  // namespace

ModelConfig parse_model_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("(file)", std::string("malformed JSON: ") + e.what());
  }

  ModelConfig cfg;
  if (j.contains("model")) {
    if (!j["model"].is_string()) throw ConfigError("model", "expected a string");
    cfg.kind = j["model"].get<std::string>();
  }
  if (cfg.kind != "milnor" && cfg.kind != "milnor-chart" &&
      cfg.kind != "heisenberg-chart" && cfg.kind != "synthetic")
    throw ConfigError("model",
                      "unknown model kind '" + cfg.kind +
                          "' (expected milnor, milnor-chart, heisenberg-chart "
                          "or synthetic)");

  cfg.lambda2 = get_number(j, "lambda2", 0.0);
  cfg.lambda3 = get_number(j, "lambda3", 0.0);
  cfg.n = static_cast<int>(get_number(j, "n", 1));
  cfg.kappa = get_number(j, "kappa", 0.0);
  cfg.mu = get_number(j, "mu", 0.0);
  cfg.samples = static_cast<int>(get_number(j, "samples", 100));
  cfg.seed = static_cast<std::uint64_t>(get_number(j, "seed", 1234));
  cfg.scale = get_number(j, "scale", 1.0);
  if (j.contains("homothety_a")) {
    cfg.homothety_a = get_number(j, "homothety_a", 1.0);
    if (*cfg.homothety_a == 0.0)
      throw ConfigError("homothety_a", "must be nonzero");
    if (*cfg.homothety_a < 0.0)
      throw ConfigError("homothety_a", "must be positive (Riemannian mode)");
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    cfg.tol_algebraic = get_number(t, "algebraic", cfg.tol_algebraic);
    cfg.tol_fd = get_number(t, "finite_difference", cfg.tol_fd);
    cfg.tol_nullity = get_number(t, "nullity", cfg.tol_nullity);
    cfg.tol_validate = get_number(t, "validate", cfg.tol_validate);
  }
  if (j.contains("sweep")) {
    const json& sw = j["sweep"];
    cfg.sweep_lambda2.min = get_number(sw, "lambda2_min", cfg.sweep_lambda2.min);
    cfg.sweep_lambda2.max = get_number(sw, "lambda2_max", cfg.sweep_lambda2.max);
    cfg.sweep_lambda2.count =
        static_cast<int>(get_number(sw, "lambda2_count", cfg.sweep_lambda2.count));
    cfg.sweep_lambda3.min = get_number(sw, "lambda3_min", cfg.sweep_lambda3.min);
    cfg.sweep_lambda3.max = get_number(sw, "lambda3_max", cfg.sweep_lambda3.max);
    cfg.sweep_lambda3.count =
        static_cast<int>(get_number(sw, "lambda3_count", cfg.sweep_lambda3.count));
    if (cfg.sweep_lambda2.count < 1 || cfg.sweep_lambda3.count < 1)
      throw ConfigError("sweep", "grid counts must be >= 1");
  }

  if (cfg.samples < 1) throw ConfigError("samples", "must be >= 1");
  if (cfg.n < 1) throw ConfigError("n", "must be >= 1");
  if (cfg.kappa > 1.0) throw ConfigError("kappa", "kappa <= 1 required");
  if (cfg.scale <= 0.0) throw ConfigError("scale", "must be positive");
  for (auto [name, value] :
       {std::pair<const char*, double>{"algebraic", cfg.tol_algebraic},
        {"finite_difference", cfg.tol_fd},
        {"nullity", cfg.tol_nullity},
        {"validate", cfg.tol_validate}}) {
    if (value <= 0.0)
      throw ConfigError(std::string("tolerances.") + name, "must be positive");
  }
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_config(ss.str());
}

ContactMetricStructure build_from_config(const ModelConfig& cfg) {
  ContactMetricStructure s;
  if (cfg.kind == "milnor") {
    s = build_milnor_model(cfg.lambda2, cfg.lambda3);
  } else if (cfg.kind == "milnor-chart") {
    s = milnor_exp_chart_model(cfg.lambda2, cfg.lambda3);
  } else if (cfg.kind == "heisenberg-chart") {
    s = heisenberg_chart_model();
  } else {
    s = synthetic_pointwise_structure(cfg.n, cfg.kappa, cfg.mu);
  }
  if (cfg.homothety_a) s = apply_d_homothety(s, *cfg.homothety_a);
  return s;
}

}  // namespace kmu
