#pragma once

#include "kmu/contact.hpp"
#include "kmu/nullity.hpp"

namespace kmu {

/// Indices with |I_M| in (1, 1 + guard] are rejected as numerically
/// degenerate: the base-metric factors blow up like (I^2 - 1)^(-1/2).
constexpr double kIndexGuardBand = 1e-6;

struct EigenvaluePair {
  double lam_pos = 0.0;  // eigenvalue of the error tensor on D_h(+lambda)
  double lam_neg = 0.0;  // eigenvalue on D_h(-lambda)
};

/// Simultaneous solution of the eigenvalue line
///   (I-1) lam_pos - (1+I) lam_neg + 2 = 0
/// and the hyperbola (1-lam_pos)(1-lam_neg) = scale^2 that is admissible
/// (both eigenvalues < 1):
///   lam_pos = 1 - sqrt((I+1)/(I-1)) * scale,
///   lam_neg = 1 - sqrt((I-1)/(I+1)) * scale.
/// Requires |I| > 1 and scale = e^{2f} > 0.
EigenvaluePair riemannian_eigenvalues(double index, double scale);

struct ErrorTensorSolution {
  double index = 0.0;
  double scale = 1.0;  // e^{2f} at the build point
  double lam_pos = 0.0;
  double lam_neg = 0.0;
  Mat T;               // frame components; annihilates xi
  AdaptedBasis basis;  // eigendistribution basis used for the construction
};

/// Error tensor acting as lam_pos on D_h(lambda) and lam_neg on D_h(-lambda).
/// Commutes with h by construction and is g-symmetric.
ErrorTensorSolution build_error_tensor(const ContactMetricStructure& s,
                                       const Mat& h, const NullityFit& fit,
                                       double scale, const Vec& p);

/// Applies a horizontal operator; rejects arguments outside Ker(eta).
Vec apply_horizontal(const ContactMetricStructure& s, const Mat& op,
                     const Vec& x, const Vec& p);

/// T as a tensor field with pointwise scale e^{2 f(p)} (spectral-projector
/// construction, so the field is smooth wherever h is).
TensorField error_tensor_field(const ContactMetricStructure& s, double index,
                               const ScalarField& f);

/// Residuals of the error-tensor identities at sampled points:
///   (i)  L_xi T = 2 phi h T - 2 phi h - 2 (xi f)(I - T) on horizontals,
///   (ii) hT - Th, (iii) eigenvalues < 1, (iv) line and hyperbola equations.
ResidualReport error_tensor_report(const ContactMetricStructure& s,
                                   const NullityFit& fit, const ScalarField& f,
                                   const SamplePlan& plan,
                                   double tolerance = 1e-6);

/// The unique base metric, represented upstairs as a horizontal (0,2) tensor:
///   g(X,Y) = |I|/sqrt(I^2-1) * ( g~(X,Y) + g~(X, h Y / (1 - mu/2)) ).
/// Acts as c(1 + 1/I) on D_h(lambda) and c(1 - 1/I) on D_h(-lambda).
Mat canonical_base_metric(const ContactMetricStructure& s,
                          const NullityFit& fit, const Vec& p);

/// The same metric recovered through the error tensor at a given scale:
/// g(X,Y) = g~(X - TX, Y) / scale. Independent of the scale (uniqueness).
Mat base_metric_via_error_tensor(const ContactMetricStructure& s,
                                 const NullityFit& fit, double scale,
                                 const Vec& p);

/// The base almost complex structure, represented upstairs:
/// J v = sqrt((I+1)/(I-1)) phi v on D_h(lambda) and
/// J w = -sqrt((I-1)/(I+1)) phi w on D_h(-lambda); J^2 = -I on horizontals.
Mat base_complex_structure(const ContactMetricStructure& s,
                           const NullityFit& fit, const Vec& p);

struct ConformalFeasibility {
  double forced_scale = 1.0;  // e^{2f}; J^2 = -I forces e^{4f} = 1
  double k_contact_defect = 0.0;
  bool feasible = false;  // a conformal submersion exists iff K-contact
};

ConformalFeasibility conformal_feasibility(const ContactMetricStructure& s,
                                           const SamplePlan& plan,
                                           double tolerance = 1e-8);

/// Builds the lifted contact metric structure (eta, xi, J, g + eta (x) eta)
/// from projectable horizontal data. For the canonical (g, J) of a
/// |I_M| > 1 structure this is the unique K-contact (Sasakian) lift.
ContactMetricStructure build_lifted_structure(
    const ContactMetricStructure& s, const TensorField& base_metric,
    const TensorField& base_complex, double projectability_tol = 1e-8);

/// Max residual of the Sasakian curvature characterization
/// R(X,Y)xi - (eta(Y)X - eta(X)Y) over unit tangent pairs.
double sasakian_nullity_residual(const ContactMetricStructure& s,
                                 const SamplePlan& plan);

}  // namespace kmu
