#include "kmu/contact.hpp"

#include <cmath>
#include <limits>

#include "kmu/errors.hpp"

namespace kmu {

namespace {

Vec unit(int dim, int i) { return Vec::Unit(dim, i); }

// Largest eigenvalue of an operator after metric whitening and
// symmetrization. Lenient counterpart of sym_eigen for internal use where the
// input may carry finite-difference noise.
double top_eigenvalue(const Mat& op, const Mat& metric) {
  Eigen::LLT<Mat> llt(metric);
  if (llt.info() != Eigen::Success)
    throw SingularMetricError("metric not positive definite");
  const Mat lt = Mat(llt.matrixL()).transpose();
  Mat w = lt * op * lt.inverse();
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(w);
  return std::max(0.0, solver.eigenvalues().maxCoeff());
}

}  // namespace

std::vector<Vec> sample_points(const FrameModel& model, const SamplePlan& plan,
                               double box_radius) {
  if (model.mode() == ModelMode::Homogeneous) return {model.origin()};
  Rng rng(plan.seed ^ 0x9e3779b9u);
  const double radius = std::min(box_radius, 0.75 * model.domain_radius());
  std::vector<Vec> pts;
  pts.reserve(plan.count);
  for (int s = 0; s < plan.count; ++s) {
    Vec p(model.dim());
    for (int i = 0; i < model.dim(); ++i) p[i] = rng.uniform(-radius, radius);
    pts.push_back(p);
  }
  return pts;
}

Mat d_eta(const ContactMetricStructure& s, const Vec& p) {
  const int d = s.dim();
  if (s.kind == StructureKind::SyntheticPoint)
    return s.g_tilde(p) * s.phi(p);

  if (s.model.mode() == ModelMode::Homogeneous) {
    if (!s.eta.is_constant())
      throw Error("homogeneous models require frame-constant eta");
    const Vec eta = s.eta(p);
    Mat omega = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const double v = -0.5 * eta.dot(s.model.brackets().bracket_coeffs(i, j));
        omega(i, j) = v;
        omega(j, i) = -v;
      }
    return omega;
  }

  s.model.require_in_domain(p);
  const double h = s.model.fd_step();
  Mat omega = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const Vec ei = s.model.frame_to_coord(unit(d, i), p);
      const Vec ej = s.model.frame_to_coord(unit(d, j), p);
      auto eta_comp = [&s](const Vec& q, int k) { return s.eta(q)[k]; };
      const double di =
          (eta_comp(p + h * ei, j) - eta_comp(p - h * ei, j)) / (2.0 * h);
      const double dj =
          (eta_comp(p + h * ej, i) - eta_comp(p - h * ej, i)) / (2.0 * h);
      const Vec br = lie_bracket(s.model, VectorField(unit(d, i)),
                                 VectorField(unit(d, j)), p);
      const double v = 0.5 * (di - dj - s.eta(p).dot(br));
      omega(i, j) = v;
      omega(j, i) = -v;
    }
  return omega;
}

Mat lie_xi_metric(const ContactMetricStructure& s, const Vec& p) {
  if (s.kind == StructureKind::SyntheticPoint) {
    const Mat h = compute_h(s, p).comps;
    return 2.0 * h.transpose() * s.g_tilde(p) * s.phi(p);
  }
  return lie_derivative(s.model, s.xi, s.model.metric_field(), Valence::Cov2, p);
}

HValue compute_h(const ContactMetricStructure& s, const Vec& p) {
  Mat comps;
  if (s.prescribed_h) {
    comps = (*s.prescribed_h)(p);
  } else {
    comps = 0.5 * lie_derivative(s.model, s.xi, s.phi, Valence::Mixed11, p);
  }
  return {comps, top_eigenvalue(comps, s.g_tilde(p))};
}

TensorField h_field(const ContactMetricStructure& s) {
  if (s.model.mode() == ModelMode::Chart)
    return TensorField([&s](const Vec& q) { return compute_h(s, q).comps; });
  return TensorField(compute_h(s, s.origin()).comps);
}

ResidualReport validate_contact_metric(const ContactMetricStructure& s,
                                       const SamplePlan& plan,
                                       double tolerance) {
  const int d = s.dim();
  double reeb_eta = 0.0, reeb_deta = 0.0, phi_sq = 0.0, compat = 0.0,
         eta_dual = 0.0;
  double min_det = std::numeric_limits<double>::infinity();
  double min_metric_eig = std::numeric_limits<double>::infinity();

  Rng rng(plan.seed ^ 0xc0ffeeULL);
  const std::vector<Vec> pts = sample_points(s.model, plan);
  const int pairs_per_point =
      (plan.count + static_cast<int>(pts.size()) - 1) /
      static_cast<int>(pts.size());

  for (const Vec& p : pts) {
    const Mat g = s.g_tilde(p);
    const Mat phi = s.phi(p);
    const Vec eta = s.eta(p);
    const Vec xi = s.xi(p);
    const Mat omega = d_eta(s, p);

    reeb_eta = std::max(reeb_eta, std::abs(eta.dot(xi) - 1.0));
    reeb_deta =
        std::max(reeb_deta, (xi.transpose() * omega).cwiseAbs().maxCoeff());
    phi_sq = std::max(phi_sq, (phi * phi + Mat::Identity(d, d) -
                               xi * eta.transpose())
                                  .cwiseAbs()
                                  .maxCoeff());
    compat = std::max(compat, (g * phi - omega).cwiseAbs().maxCoeff());
    eta_dual = std::max(eta_dual, (eta - g * xi).cwiseAbs().maxCoeff());

    // The matrix residuals bound every pair evaluation; random unit tangent
    // pairs are still drawn so the axioms are exercised as stated.
    for (int k = 0; k < pairs_per_point; ++k) {
      Vec x(d), y(d);
      for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
      for (int i = 0; i < d; ++i) y[i] = rng.gaussian();
      x /= std::sqrt(std::max(1e-300, x.dot(g * x)));
      y /= std::sqrt(std::max(1e-300, y.dot(g * y)));
      compat = std::max(compat, std::abs(x.dot(g * (phi * y)) -
                                         x.dot(omega * y)));
      phi_sq = std::max(
          phi_sq,
          (phi * (phi * x) + x - eta.dot(x) * xi).cwiseAbs().maxCoeff());
    }

    // eta ^ (d eta)^n != 0 <=> d eta nondegenerate on Ker(eta).
    const Mat eta_col = eta;
    Eigen::HouseholderQR<Mat> qr(eta_col);
    const Mat q = qr.householderQ();
    const Mat kernel = q.rightCols(d - 1);
    const Mat omega_k = kernel.transpose() * omega * kernel;
    Eigen::JacobiSVD<Mat> svd(omega_k);
    min_det = std::min(min_det, svd.singularValues().minCoeff());

    Eigen::SelfAdjointEigenSolver<Mat> ge(0.5 * (g + g.transpose()));
    min_metric_eig = std::min(min_metric_eig, ge.eigenvalues().minCoeff());
  }

  ResidualReport report;
  report.add("reeb_eta_xi", reeb_eta, tolerance);
  report.add("reeb_deta_xi", reeb_deta, tolerance);
  report.add("phi_square", phi_sq, tolerance);
  report.add("metric_phi_compatibility", compat, tolerance);
  report.add("eta_is_xi_flat", eta_dual, tolerance);
  report.add("volume_form_nondegenerate", min_det, 1e-6, CheckKind::LowerBound);
  report.add("metric_positive_definite", min_metric_eig, 1e-9,
             CheckKind::LowerBound);
  return report;
}

ResidualReport contact_identity_report(const ContactMetricStructure& s,
                                       const TensorField& h,
                                       std::optional<double> kappa,
                                       const SamplePlan& plan,
                                       double tolerance) {
  const int d = s.dim();
  double anticommute = 0.0, lie_metric = 0.0, h_symmetric = 0.0,
         h_square = 0.0;

  for (const Vec& p : sample_points(s.model, plan)) {
    const Mat g = s.g_tilde(p);
    const Mat phi = s.phi(p);
    const Mat hp = h(p);

    anticommute = std::max(anticommute,
                           (hp * phi + phi * hp).cwiseAbs().maxCoeff());
    h_symmetric = std::max(
        h_symmetric, (g * hp - hp.transpose() * g).cwiseAbs().maxCoeff());
    if (s.kind != StructureKind::SyntheticPoint) {
      const Mat lg = lie_xi_metric(s, p);
      lie_metric = std::max(
          lie_metric,
          (lg - 2.0 * hp.transpose() * g * phi).cwiseAbs().maxCoeff());
    }
    if (kappa) {
      h_square = std::max(h_square, (hp * hp + (1.0 - *kappa) * phi * phi)
                                        .cwiseAbs()
                                        .maxCoeff());
    }
  }

  ResidualReport report;
  report.add("h_phi_anticommute", anticommute, tolerance);
  report.add("lie_xi_metric_identity", lie_metric, tolerance,
             CheckKind::UpperBound, s.kind != StructureKind::SyntheticPoint);
  report.add("h_metric_symmetric", h_symmetric, tolerance);
  if (kappa) report.add("h_square_identity", h_square, tolerance);
  (void)d;
  return report;
}

PhiBasis phi_basis(const ContactMetricStructure& s, const Vec& p,
                   std::optional<Vec> seed) {
  const int d = s.dim();
  const int n = s.n();
  if (2 * n + 1 != d) throw PreconditionError("dimension must be odd");
  const Mat g = s.g_tilde(p);
  const Mat phi = s.phi(p);
  const Vec eta = s.eta(p);
  const Vec xi = s.xi(p);

  auto gdot = [&g](const Vec& a, const Vec& b) { return a.dot(g * b); };

  std::vector<Vec> span;  // xi plus every accepted e_k, phi e_k
  span.push_back(xi / std::sqrt(gdot(xi, xi)));
  std::vector<Vec> e, phie;

  auto try_accept = [&](Vec v) -> bool {
    for (const Vec& b : span) v -= gdot(v, b) * b;
    const double norm = std::sqrt(std::max(0.0, gdot(v, v)));
    if (norm <= 1e-8) return false;
    v /= norm;
    e.push_back(v);
    phie.push_back(phi * v);
    span.push_back(v);
    span.push_back(phie.back());
    return true;
  };

  if (seed) {
    const double norm = std::sqrt(gdot(*seed, *seed));
    if (norm <= 1e-12) throw PreconditionError("seed vector is zero");
    if (std::abs(eta.dot(*seed)) > 1e-8 * norm)
      throw PreconditionError("seed not in Ker(eta)");
    if (!try_accept(*seed)) throw PreconditionError("seed degenerate");
  }
  for (int k = 0; k < d && static_cast<int>(e.size()) < n; ++k)
    try_accept(unit(d, k));
  if (static_cast<int>(e.size()) != n)
    throw Error("phi-basis construction failed to span Ker(eta)");

  PhiBasis basis;
  basis.n = n;
  basis.vectors = e;
  basis.vectors.insert(basis.vectors.end(), phie.begin(), phie.end());
  return basis;
}

AdaptedBasis eigendistributions(const ContactMetricStructure& s, const Mat& h,
                                const Vec& p) {
  const int n = s.n();
  const Mat g = s.g_tilde(p);
  const SymEigenResult sym = sym_eigen(h, g);
  const double lambda = sym.values[0];
  if (lambda < kSasakianLambdaTol)
    throw SasakianDegenerateError(
        "structure is Sasakian-degenerate: h has no positive eigenvalue");

  const double group_tol = std::max(1e-8, 1e-8 * lambda);
  AdaptedBasis basis;
  basis.lambda = lambda;
  for (int i = 0; i < sym.values.size(); ++i)
    if (std::abs(sym.values[i] - lambda) <= group_tol)
      basis.pos.push_back(sym.vectors.col(i));
  if (static_cast<int>(basis.pos.size()) != n)
    throw Error("unexpected h-eigenvalue multiplicity");

  const Mat phi = s.phi(p);
  double resid = 0.0;
  for (const Vec& v : basis.pos) {
    basis.neg.push_back(phi * v);
    resid = std::max(resid, (h * v - lambda * v).cwiseAbs().maxCoeff());
    resid = std::max(
        resid, (h * basis.neg.back() + lambda * basis.neg.back())
                   .cwiseAbs()
                   .maxCoeff());
  }
  basis.eigen_residual = resid;
  return basis;
}

double k_contact_defect(const ContactMetricStructure& s,
                        const SamplePlan& plan) {
  double defect = 0.0;
  for (const Vec& p : sample_points(s.model, plan)) {
    const Mat lg = lie_xi_metric(s, p);
    const PhiBasis basis = phi_basis(s, p);
    const int m = static_cast<int>(basis.vectors.size());
    Mat k(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        k(a, b) = basis.vectors[a].dot(lg * basis.vectors[b]);
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (k + k.transpose()));
    defect = std::max(defect, eig.eigenvalues().cwiseAbs().maxCoeff());
  }
  return defect;
}

}  // namespace kmu
