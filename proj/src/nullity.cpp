#include "kmu/nullity.hpp"

#include <cmath>

#include "kmu/errors.hpp"

namespace kmu {

namespace {

struct NullitySample {
  Vec p;
  Vec x, y;     // unit, g-orthonormal, frame components
  Vec r;        // R(X,Y)xi
  Vec a;        // eta(Y)X - eta(X)Y
  Vec b;        // eta(Y)hX - eta(X)hY
  Mat metric;
};

// Deterministic tangent-pair stream shared by the fitter and the residual
// evaluator, drawn across Ker(eta) + span(xi) so both eta-terms are exercised.
std::vector<NullitySample> nullity_samples(const ContactMetricStructure& s,
                                           const SamplePlan& plan) {
  if (!s.curvature_capable())
    throw NoCurvatureError(
        "synthetic pointwise structures carry no curvature");
  if (plan.count < 2)
    throw PreconditionError("need at least 2 samples for the nullity fit");

  const int d = s.dim();
  const Connection conn = levi_civita(s.model);
  const std::vector<Vec> pts = sample_points(s.model, plan);
  const TensorField h = h_field(s);

  Rng rng(plan.seed);
  std::vector<NullitySample> samples;
  samples.reserve(plan.count);
  for (int k = 0; k < plan.count; ++k) {
    NullitySample smp;
    smp.p = pts[k % pts.size()];
    smp.metric = s.g_tilde(smp.p);
    auto gdot = [&smp](const Vec& u, const Vec& v) {
      return u.dot(smp.metric * v);
    };

    for (;;) {
      Vec x(d), y(d);
      for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
      for (int i = 0; i < d; ++i) y[i] = rng.gaussian();
      const double nx = std::sqrt(gdot(x, x));
      if (nx < 1e-8) continue;
      x /= nx;
      y -= gdot(y, x) * x;
      const double ny = std::sqrt(gdot(y, y));
      if (ny < 1e-8) continue;
      y /= ny;
      smp.x = x;
      smp.y = y;
      break;
    }

    const Vec eta = s.eta(smp.p);
    const Mat hp = h(smp.p);
    smp.r = riemann_curvature(conn, VectorField(smp.x), VectorField(smp.y),
                              s.xi, smp.p);
    smp.a = eta.dot(smp.y) * smp.x - eta.dot(smp.x) * smp.y;
    smp.b = eta.dot(smp.y) * (hp * smp.x) - eta.dot(smp.x) * (hp * smp.y);
    samples.push_back(std::move(smp));
  }
  return samples;
}

double max_defect(const std::vector<NullitySample>& samples, double kappa,
                  double mu) {
  double worst = 0.0;
  for (const auto& smp : samples) {
    const Vec res = smp.r - kappa * smp.a - mu * smp.b;
    worst = std::max(worst, std::sqrt(res.dot(smp.metric * res)));
  }
  return worst;
}

double h_norm(const ContactMetricStructure& s) {
  return compute_h(s, s.origin()).lambda;
}

}  // namespace

NullityFit fit_nullity(const ContactMetricStructure& s,
                       const SamplePlan& plan) {
  const std::vector<NullitySample> samples = nullity_samples(s, plan);

  double aa = 0.0, ab = 0.0, bb = 0.0, ar = 0.0, br = 0.0;
  for (const auto& smp : samples) {
    aa += smp.a.dot(smp.metric * smp.a);
    ab += smp.a.dot(smp.metric * smp.b);
    bb += smp.b.dot(smp.metric * smp.b);
    ar += smp.a.dot(smp.metric * smp.r);
    br += smp.b.dot(smp.metric * smp.r);
  }
  if (aa < 1e-12)
    throw PreconditionError("fewer than 2 independent samples");

  NullityFit fit;
  const bool mu_determinate = h_norm(s) >= kSasakianLambdaTol;
  if (!mu_determinate) {
    fit.kappa = ar / aa;
  } else {
    const double det = aa * bb - ab * ab;
    if (det < 1e-12 * aa * std::max(bb, 1e-300))
      throw PreconditionError("fewer than 2 independent samples");
    fit.kappa = (bb * ar - ab * br) / det;
    fit.mu = (aa * br - ab * ar) / det;
  }
  fit.residual = max_defect(samples, fit.kappa, fit.mu_or(0.0));
  fit.lambda = std::sqrt(std::max(0.0, 1.0 - fit.kappa));
  if (fit.mu && fit.lambda > kSasakianLambdaTol)
    fit.index = (1.0 - *fit.mu / 2.0) / fit.lambda;
  return fit;
}

double nullity_residual(const ContactMetricStructure& s, double kappa,
                        double mu, const SamplePlan& plan) {
  return max_defect(nullity_samples(s, plan), kappa, mu);
}

double boeckx_index(double kappa, double mu) {
  if (kappa >= 1.0)
    throw PreconditionError(
        "Boeckx index undefined for kappa >= 1 (Sasakian boundary)");
  return (1.0 - mu / 2.0) / std::sqrt(1.0 - kappa);
}

KappaMu d_homothety_constants(double kappa, double mu, double a) {
  if (a == 0.0) throw PreconditionError("homothety constant must be nonzero");
  return {(kappa + a * a - 1.0) / (a * a), (mu + 2.0 * a - 2.0) / a};
}

double lie_xi_h_report(const ContactMetricStructure& s, const NullityFit& fit,
                       const SamplePlan& plan, double acceptance_tol) {
  if (!fit.accepted(acceptance_tol))
    throw PreconditionError("structure not accepted as a (kappa,mu)-space");
  const TensorField h = h_field(s);
  const double mu = fit.mu_or(0.0);
  double worst = 0.0;
  for (const Vec& p : sample_points(s.model, plan)) {
    const Mat lh = lie_derivative(s.model, s.xi, h, Valence::Mixed11, p);
    const Mat phi = s.phi(p);
    const Mat rhs = (2.0 - mu) * phi * h(p) + 2.0 * (1.0 - fit.kappa) * phi;
    worst = std::max(worst, (lh - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace kmu
