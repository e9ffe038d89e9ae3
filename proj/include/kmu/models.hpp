#pragma once

#include <optional>
#include <string>

#include "kmu/contact.hpp"

namespace kmu {

/// Left-invariant 3-dimensional family on the Milnor frame
///   [E2,E3] = 2 E1,  [E3,E1] = lambda2 E2,  [E1,E2] = lambda3 E3,
/// with the frame orthonormal, xi = E1, phi E2 = E3, phi E3 = -E2.
/// (lambda2, lambda3) = (0, 0) is the Heisenberg (Sasakian) control.
ContactMetricStructure build_milnor_model(double lambda2, double lambda3);

/// Coordinate realization of the Heisenberg model on R^3:
/// E1 = d/dz, E2 = d/dx, E3 = d/dy + 2x d/dz, frame orthonormal.
/// Exercises the finite-difference path on the same geometry as
/// build_milnor_model(0, 0).
ContactMetricStructure heisenberg_chart_model(
    double fd_step = FrameModel::kDefaultFdStep);

/// Chart realization of any homogeneous model in exponential coordinates:
/// the left-invariant frame at x is B(ad_x) applied to the frame at 0, with
/// B(z) = z / (1 - e^-z) expanded as a Bernoulli series.
FrameModel exponential_chart_model(const BracketTable& table,
                                   const Mat& metric,
                                   double fd_step = FrameModel::kDefaultFdStep,
                                   double domain_radius = 0.35);

/// The Milnor model realized through exponential_chart_model; same geometry
/// as build_milnor_model but evaluated by finite differences.
ContactMetricStructure milnor_exp_chart_model(
    double lambda2, double lambda3,
    double fd_step = FrameModel::kDefaultFdStep);

/// Single tangent-space normal form in dimension 2n+1: orthonormal basis
/// (e_1..e_n, phi e_1..phi e_n, xi), h = diag(lambda,..,-lambda,..,0) with
/// lambda = sqrt(1-kappa). Purely algebraic; carries no curvature.
ContactMetricStructure synthetic_pointwise_structure(int n, double kappa,
                                                     double mu);

/// D_a-homothetic transform: eta -> a eta, g -> a g + a(a-1) eta (x) eta,
/// phi unchanged; hence xi -> xi/a and h -> h/a. Requires a > 0.
ContactMetricStructure apply_d_homothety(const ContactMetricStructure& s,
                                         double a);

struct SweepAxis {
  double min = -2.0;
  double max = 4.0;
  int count = 4;
};

struct ModelConfig {
  std::string kind = "milnor";  // milnor | milnor-chart | heisenberg-chart | synthetic
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  int n = 1;
  double kappa = 0.0;
  double mu = 0.0;
  std::optional<double> homothety_a;
  int samples = 100;
  std::uint64_t seed = 1234;
  double scale = 1.0;  // e^{2f} used by the descent commands
  double tol_algebraic = 1e-10;
  double tol_fd = 1e-6;
  double tol_nullity = 1e-5;
  double tol_validate = 1e-7;
  SweepAxis sweep_lambda2;
  SweepAxis sweep_lambda3;

  SamplePlan plan() const { return {samples, seed}; }
};

ModelConfig load_model_config(const std::string& path);
ModelConfig parse_model_config(const std::string& json_text);

ContactMetricStructure build_from_config(const ModelConfig& cfg);

}  // namespace kmu
