#pragma once

#include <optional>

#include "kmu/contact.hpp"

namespace kmu {

struct KappaMu {
  double kappa = 0.0;
  double mu = 0.0;
};

struct NullityFit {
  double kappa = 1.0;
  std::optional<double> mu;     // absent when h vanishes (mu indeterminate)
  double residual = 0.0;        // max pointwise defect at the optimum
  double lambda = 0.0;          // sqrt(max(0, 1 - kappa))
  std::optional<double> index;  // Boeckx index, defined iff kappa < 1

  bool accepted(double tol = 1e-5) const { return residual < tol; }
  double mu_or(double fallback) const { return mu ? *mu : fallback; }
};

/// Least-squares fit of (kappa, mu) in
///   R(X,Y)xi = kappa (eta(Y)X - eta(X)Y) + mu (eta(Y)hX - eta(X)hY)
/// over deterministic unit-orthonormal tangent pairs. mu is flagged
/// indeterminate when h vanishes (its design column is zero).
NullityFit fit_nullity(const ContactMetricStructure& s, const SamplePlan& plan);

/// Max nullity defect over the same sample stream, at given constants.
double nullity_residual(const ContactMetricStructure& s, double kappa,
                        double mu, const SamplePlan& plan);

/// I_M = (1 - mu/2) / sqrt(1 - kappa); requires kappa < 1.
double boeckx_index(double kappa, double mu);

/// Transformation law of the nullity constants under a D_a-homothety:
/// kappa -> (kappa + a^2 - 1)/a^2, mu -> (mu + 2a - 2)/a. The Boeckx index
/// is invariant.
KappaMu d_homothety_constants(double kappa, double mu, double a);

/// Max residual of L_xi h = (2 - mu) phi h + 2 (1 - kappa) phi at the fitted
/// constants. Requires the fit to be accepted.
double lie_xi_h_report(const ContactMetricStructure& s, const NullityFit& fit,
                       const SamplePlan& plan, double acceptance_tol = 1e-5);

}  // namespace kmu
