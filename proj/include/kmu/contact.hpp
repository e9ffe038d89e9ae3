#pragma once

#include <optional>
#include <vector>

#include "kmu/frame_model.hpp"
#include "kmu/numerics.hpp"
#include "kmu/report.hpp"
#include "kmu/tensor_engine.hpp"

namespace kmu {

enum class StructureKind { Homogeneous, Chart, SyntheticPoint };

/// Contact metric structure (eta, xi, phi, g) on a frame model; the model
/// metric is the associated metric g. SyntheticPoint structures are a single
/// tangent-space realization: purely algebraic, with a prescribed h tensor and
/// no curvature.
struct ContactMetricStructure {
  FrameModel model;
  CovectorField eta;
  VectorField xi;
  TensorField phi;
  StructureKind kind = StructureKind::Homogeneous;
  std::optional<TensorField> prescribed_h;
  double synthetic_kappa = 1.0;  // construction data, SyntheticPoint only
  double synthetic_mu = 0.0;

  int n() const { return (model.dim() - 1) / 2; }
  int dim() const { return model.dim(); }
  bool curvature_capable() const { return kind != StructureKind::SyntheticPoint; }
  Vec origin() const { return model.origin(); }
  Mat g_tilde(const Vec& p) const { return model.metric(p); }
};

/// Widest Sasakian-degeneracy threshold: below this, lambda is treated as 0.
constexpr double kSasakianLambdaTol = 1e-6;

/// Sample points for residual sweeps: the origin for homogeneous and
/// synthetic models, deterministic points in a chart box otherwise.
std::vector<Vec> sample_points(const FrameModel& model, const SamplePlan& plan,
                               double box_radius = 0.3);

/// d(eta) in frame components at p, with the contact-geometry normalization
/// deta(X,Y) = (X eta(Y) - Y eta(X) - eta([X,Y])) / 2, matching the
/// compatibility convention deta(X,Y) = g(X, phi Y). Synthetic structures
/// return the algebraic 2-form g(., phi .).
Mat d_eta(const ContactMetricStructure& s, const Vec& p);

/// Lie derivative of the metric along xi. Synthetic structures return the
/// defining algebraic value 2 g(h ., phi .).
Mat lie_xi_metric(const ContactMetricStructure& s, const Vec& p);

struct HValue {
  Mat comps;      // (1,1) frame components
  double lambda;  // largest eigenvalue (0 for K-contact)
};

/// h = (1/2) L_xi phi at p (prescribed value for synthetic structures).
HValue compute_h(const ContactMetricStructure& s, const Vec& p);

/// h as a tensor field (constant unless the model is a chart).
TensorField h_field(const ContactMetricStructure& s);

/// Checks the contact metric axioms at sampled points: Reeb conditions,
/// phi^2 = -I + eta (x) xi, metric compatibility with d(eta), eta = i_xi g,
/// nondegeneracy of eta ^ (d eta)^n, and positive definiteness of g.
ResidualReport validate_contact_metric(const ContactMetricStructure& s,
                                       const SamplePlan& plan,
                                       double tolerance = 1e-7);

/// Residuals of the structural identities:
///   (i) h phi + phi h = 0, (ii) L_xi g = 2 g(h ., phi .),
///   (iii) g-symmetry of h, (iv) h^2 + (1 - kappa) phi^2 = 0 when kappa given.
ResidualReport contact_identity_report(const ContactMetricStructure& s,
                                       const TensorField& h,
                                       std::optional<double> kappa,
                                       const SamplePlan& plan,
                                       double tolerance = 1e-7);

/// Orthonormal basis {e_1..e_n, phi e_1..phi e_n} of Ker(eta_p). Without a
/// seed, starts from the first frame vector with nonzero projection onto
/// Ker(eta). Deterministic.
struct PhiBasis {
  std::vector<Vec> vectors;
  int n = 0;
};
PhiBasis phi_basis(const ContactMetricStructure& s, const Vec& p,
                   std::optional<Vec> seed = std::nullopt);

/// Orthonormal bases of the h-eigendistributions within Ker(eta);
/// neg[i] = phi(pos[i]).
struct AdaptedBasis {
  std::vector<Vec> pos;  // D_h(+lambda)
  std::vector<Vec> neg;  // D_h(-lambda)
  double lambda = 0.0;
  double eigen_residual = 0.0;
};
AdaptedBasis eigendistributions(const ContactMetricStructure& s, const Mat& h,
                                const Vec& p);

/// Sup over samples of the operator norm of L_xi g restricted to Ker(eta).
/// Vanishes exactly for K-contact structures.
double k_contact_defect(const ContactMetricStructure& s, const SamplePlan& plan);

}  // namespace kmu
