#include "kmu/descent.hpp"

#include <cmath>

#include "kmu/errors.hpp"

namespace kmu {

namespace {

void require_riemannian_regime(double index) {
  if (std::abs(index) <= 1.0 + kIndexGuardBand)
    throw InfeasibleRegimeError(
        "regime requires |I_M| > 1: admissible error-tensor eigenvalues force "
        "a positive line slope");
}

double index_ratio(double index) {
  return std::sqrt((index + 1.0) / (index - 1.0));
}

double require_index(const NullityFit& fit) {
  if (!fit.index)
    throw SasakianDegenerateError(
        "Boeckx index undefined: structure is Sasakian-degenerate");
  return *fit.index;
}

Mat horizontal_projector(const ContactMetricStructure& s, const Vec& p) {
  return Mat::Identity(s.dim(), s.dim()) - s.xi(p) * s.eta(p).transpose();
}

// T = lam_pos P+ + lam_neg P- through the spectral projectors of h, which
// keeps the field smooth in p independently of eigenbasis choices.
Mat error_tensor_at(const ContactMetricStructure& s, double index,
                    double scale, const Vec& p) {
  const EigenvaluePair ev = riemannian_eigenvalues(index, scale);
  const Mat h = compute_h(s, p).comps;
  const AdaptedBasis basis = eigendistributions(s, h, p);
  const Mat g = s.g_tilde(p);
  Mat t = Mat::Zero(s.dim(), s.dim());
  for (const Vec& v : basis.pos) t += ev.lam_pos * v * (g * v).transpose();
  for (const Vec& v : basis.neg) t += ev.lam_neg * v * (g * v).transpose();
  return t;
}

}  // namespace

EigenvaluePair riemannian_eigenvalues(double index, double scale) {
  if (scale <= 0.0) throw PreconditionError("scale e^{2f} must be positive");
  require_riemannian_regime(index);
  const double r = index_ratio(index);
  return {1.0 - r * scale, 1.0 - scale / r};
}

ErrorTensorSolution build_error_tensor(const ContactMetricStructure& s,
                                       const Mat& h, const NullityFit& fit,
                                       double scale, const Vec& p) {
  const double index = require_index(fit);
  const EigenvaluePair ev = riemannian_eigenvalues(index, scale);

  ErrorTensorSolution sol;
  sol.index = index;
  sol.scale = scale;
  sol.lam_pos = ev.lam_pos;
  sol.lam_neg = ev.lam_neg;
  sol.basis = eigendistributions(s, h, p);
  const Mat g = s.g_tilde(p);
  sol.T = Mat::Zero(s.dim(), s.dim());
  for (const Vec& v : sol.basis.pos)
    sol.T += ev.lam_pos * v * (g * v).transpose();
  for (const Vec& v : sol.basis.neg)
    sol.T += ev.lam_neg * v * (g * v).transpose();
  return sol;
}

Vec apply_horizontal(const ContactMetricStructure& s, const Mat& op,
                     const Vec& x, const Vec& p) {
  const double norm = x.cwiseAbs().maxCoeff();
  if (std::abs(s.eta(p).dot(x)) > 1e-8 * std::max(1.0, norm))
    throw PreconditionError("horizontal operator domain is Ker(eta)");
  return op * x;
}

TensorField error_tensor_field(const ContactMetricStructure& s, double index,
                               const ScalarField& f) {
  if (s.model.mode() != ModelMode::Chart && f.is_constant())
    return TensorField(
        error_tensor_at(s, index, std::exp(2.0 * f(s.origin())), s.origin()));
  return TensorField([s, index, f](const Vec& q) {
    return error_tensor_at(s, index, std::exp(2.0 * f(q)), q);
  });
}

ResidualReport error_tensor_report(const ContactMetricStructure& s,
                                   const NullityFit& fit, const ScalarField& f,
                                   const SamplePlan& plan, double tolerance) {
  const double index = require_index(fit);
  if (s.model.mode() == ModelMode::Homogeneous && !f.is_constant())
    throw PreconditionError(
        "varying conformal factors need a chart model (no coordinates to "
        "differentiate on a homogeneous frame)");
  const TensorField t_field = error_tensor_field(s, index, f);
  const TensorField h = h_field(s);

  double lie_resid = 0.0, comm_resid = 0.0, below_one = 0.0, line_resid = 0.0,
         hyp_resid = 0.0;
  for (const Vec& p : sample_points(s.model, plan)) {
    const double scale = std::exp(2.0 * f(p));
    const EigenvaluePair ev = riemannian_eigenvalues(index, scale);
    const Mat tp = t_field(p);
    const Mat hp = h(p);
    const Mat phi = s.phi(p);

    double xif = 0.0;
    if (s.model.mode() == ModelMode::Chart) {
      const double step = s.model.fd_step();
      const Vec xic = s.model.frame_to_coord(s.xi(p), p);
      xif = (f(p + step * xic) - f(p - step * xic)) / (2.0 * step);
    }

    const Mat lie_t = lie_derivative(s.model, s.xi, t_field, Valence::Mixed11, p);
    const Mat rhs = 2.0 * phi * hp * tp - 2.0 * phi * hp -
                    2.0 * xif * (horizontal_projector(s, p) - tp);
    lie_resid = std::max(lie_resid, (lie_t - rhs).cwiseAbs().maxCoeff());

    comm_resid =
        std::max(comm_resid, (hp * tp - tp * hp).cwiseAbs().maxCoeff());
    below_one = std::max(
        below_one, std::max(0.0, std::max(ev.lam_pos, ev.lam_neg) - 1.0));
    line_resid = std::max(
        line_resid, std::abs((index - 1.0) * ev.lam_pos -
                             (1.0 + index) * ev.lam_neg + 2.0));
    hyp_resid = std::max(hyp_resid,
                         std::abs((1.0 - ev.lam_pos) * (1.0 - ev.lam_neg) -
                                  scale * scale));
  }

  ResidualReport report;
  report.add("lie_xi_error_tensor_identity", lie_resid, tolerance);
  report.add("hT_commutator", comm_resid, 1e-12);
  report.add("eigenvalues_below_one", below_one, 1e-12);
  report.add("line_equation", line_resid, 1e-12);
  report.add("hyperbola_equation", hyp_resid, 1e-12);
  return report;
}

Mat canonical_base_metric(const ContactMetricStructure& s,
                          const NullityFit& fit, const Vec& p) {
  const double index = require_index(fit);
  require_riemannian_regime(index);
  const double mu = fit.mu_or(0.0);
  const double factor = 1.0 - mu / 2.0;
  if (std::abs(factor) < 1e-12)
    throw PreconditionError("1 - mu/2 = 0: base metric undefined");

  const double c = std::abs(index) / std::sqrt(index * index - 1.0);
  const Mat g = s.g_tilde(p);
  const Mat h = compute_h(s, p).comps;
  const Mat proj = horizontal_projector(s, p);
  const Mat full = c * (g + g * (h / factor));
  Mat out = proj.transpose() * full * proj;
  return 0.5 * (out + out.transpose());
}

Mat base_metric_via_error_tensor(const ContactMetricStructure& s,
                                 const NullityFit& fit, double scale,
                                 const Vec& p) {
  const Mat h = compute_h(s, p).comps;
  const ErrorTensorSolution sol = build_error_tensor(s, h, fit, scale, p);
  const Mat g = s.g_tilde(p);
  const Mat proj = horizontal_projector(s, p);
  const int d = s.dim();
  const Mat full =
      (Mat::Identity(d, d) - sol.T).transpose() * g / scale;
  Mat out = proj.transpose() * full * proj;
  return 0.5 * (out + out.transpose());
}

Mat base_complex_structure(const ContactMetricStructure& s,
                           const NullityFit& fit, const Vec& p) {
  const double index = require_index(fit);
  require_riemannian_regime(index);
  const double r = index_ratio(index);
  const Mat h = compute_h(s, p).comps;
  const AdaptedBasis basis = eigendistributions(s, h, p);
  const Mat g = s.g_tilde(p);
  Mat j = Mat::Zero(s.dim(), s.dim());
  for (int i = 0; i < static_cast<int>(basis.pos.size()); ++i) {
    j += r * basis.neg[i] * (g * basis.pos[i]).transpose();
    j -= (1.0 / r) * basis.pos[i] * (g * basis.neg[i]).transpose();
  }
  return j;
}

ConformalFeasibility conformal_feasibility(const ContactMetricStructure& s,
                                           const SamplePlan& plan,
                                           double tolerance) {
  // A conformal factor e^{2f} must satisfy J^2 = -I on the pushed phi-basis,
  // which reads J^2 f_1 = -e^{4f} f_1; hence e^{4f} = 1 and f = 0. The only
  // remaining obstruction is the Killing defect of xi.
  ConformalFeasibility out;
  out.forced_scale = 1.0;
  out.k_contact_defect = k_contact_defect(s, plan);
  out.feasible = out.k_contact_defect < tolerance;
  return out;
}

ContactMetricStructure build_lifted_structure(const ContactMetricStructure& s,
                                              const TensorField& base_metric,
                                              const TensorField& base_complex,
                                              double projectability_tol) {
  const SamplePlan plan{8, 2024};
  for (const Vec& p : sample_points(s.model, plan)) {
    const Mat lg =
        s.kind == StructureKind::SyntheticPoint
            ? Mat::Zero(s.dim(), s.dim())
            : lie_derivative(s.model, s.xi, base_metric, Valence::Cov2, p);
    const Mat lj =
        s.kind == StructureKind::SyntheticPoint
            ? Mat::Zero(s.dim(), s.dim())
            : lie_derivative(s.model, s.xi, base_complex, Valence::Mixed11, p);
    if (lg.cwiseAbs().maxCoeff() > projectability_tol ||
        lj.cwiseAbs().maxCoeff() > projectability_tol)
      throw PreconditionError(
          "lift inputs are not projectable (L_xi residual above tolerance)");
    const Vec xi = s.xi(p);
    const Vec eta = s.eta(p);
    const double horiz =
        std::max({(base_metric(p) * xi).cwiseAbs().maxCoeff(),
                  (base_complex(p) * xi).cwiseAbs().maxCoeff(),
                  (eta.transpose() * base_complex(p)).cwiseAbs().maxCoeff()});
    if (horiz > projectability_tol)
      throw PreconditionError("lift inputs must annihilate xi");
  }

  ContactMetricStructure out = s;
  if (base_metric.is_constant() && s.eta.is_constant()) {
    const Vec eta = s.eta.constant_value();
    out.model = s.model.with_metric(TensorField(
        Mat(base_metric.constant_value() + eta * eta.transpose())));
  } else {
    const ContactMetricStructure base = s;
    const TensorField gfield = base_metric;
    out.model = s.model.with_metric(TensorField([base, gfield](const Vec& q) {
      const Vec eta = base.eta(q);
      return Mat(gfield(q) + eta * eta.transpose());
    }));
  }
  out.phi = base_complex;
  out.prescribed_h.reset();
  return out;
}

double sasakian_nullity_residual(const ContactMetricStructure& s,
                                 const SamplePlan& plan) {
  return nullity_residual(s, 1.0, 0.0, plan);
}

}  // namespace kmu
