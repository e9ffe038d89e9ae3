// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kmu/descent.hpp"
#include "kmu/errors.hpp"
#include "kmu/models.hpp"
#include "kmu/para.hpp"
#include "kmu/pipeline.hpp"
#include "support/milnor_oracle.hpp"

using namespace kmu;
using kmu_test::MilnorOracle;

namespace {

int g_failures = 0;

void report(int number, const std::string& label, bool ok,
            const std::string& detail = "") {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number,
              label.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

ContactMetricStructure synthetic_with_index(int n, double kappa,
                                            double index) {
  const double lambda = std::sqrt(1.0 - kappa);
  return synthetic_pointwise_structure(n, kappa, 2.0 * (1.0 - index * lambda));
}

const SamplePlan kPlan{100, 20240901};

void criterion_1_contact_axioms() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  bool ok = true;

  std::vector<ContactMetricStructure> models;
  for (double l2 : {0.0, 1.0, 3.0})
    for (double l3 : {-1.0, 2.0, 4.0})
      models.push_back(build_milnor_model(l2, l3));  // 9-point grid
  models.push_back(build_milnor_model(0.0, 0.0));    // Heisenberg control
  models.push_back(synthetic_pointwise_structure(1, 0.0, 0.0));
  models.push_back(synthetic_pointwise_structure(2, 0.5, 1.0));
  models.push_back(synthetic_pointwise_structure(3, -1.0, 2.0));

  for (const auto& s : models) {
    const ResidualReport rep = validate_contact_metric(s, kPlan, 1e-9);
    ok = ok && rep.pass();
    worst = std::max(worst, rep.max_residual());
  }
  const double elapsed = seconds_since(t0);
  ok = ok && worst < 1e-9 && elapsed < 10.0;
  char detail[128];
  std::snprintf(detail, sizeof detail, "max residual %.2e, %.2f s", worst,
                elapsed);
  report(1, "contact axioms on the model zoo", ok, detail);
}

void criterion_2_identity_suite() {
  double worst = 0.0;
  bool ok = true;
  for (auto [l2, l3] : {std::pair{1.0, 4.0}, {2.0, 0.5}, {-1.0, -3.0},
                        {3.0, -1.0}, {0.5, -1.5}}) {
    const ContactMetricStructure s = build_milnor_model(l2, l3);
    const NullityFit fit = fit_nullity(s, kPlan);
    ok = ok && fit.accepted(1e-5);
    const ResidualReport rep =
        contact_identity_report(s, h_field(s), fit.kappa, kPlan, 1e-6);
    for (const char* name : {"h_phi_anticommute", "lie_xi_metric_identity",
                             "h_square_identity"})
      worst = std::max(worst, rep.find(name)->value);
    worst = std::max(worst, lie_xi_h_report(s, fit, kPlan));
  }
  ok = ok && worst < 1e-6;
  char detail[64];
  std::snprintf(detail, sizeof detail, "max identity residual %.2e", worst);
  report(2, "structural identity suite on accepted models", ok, detail);
}

void criterion_3_nullity_fit() {
  double worst_fit = 0.0, worst_oracle = 0.0;
  for (auto [l2, l3] : {std::pair{1.0, 4.0}, {2.0, 0.5}, {-1.0, -3.0},
                        {3.0, -1.0}, {0.5, -1.5}, {4.0, 1.0}}) {
    const MilnorOracle oracle{l2, l3};
    const NullityFit fit = fit_nullity(build_milnor_model(l2, l3), kPlan);
    worst_fit = std::max(worst_fit, fit.residual);
    worst_oracle = std::max(worst_oracle, std::abs(fit.kappa - oracle.kappa()));
    worst_oracle =
        std::max(worst_oracle, std::abs(fit.mu_or(1e9) - oracle.mu()));
  }
  const bool ok = worst_fit < 1e-6 && worst_oracle < 1e-8;
  char detail[96];
  std::snprintf(detail, sizeof detail,
                "fit residual %.2e, oracle deviation %.2e", worst_fit,
                worst_oracle);
  report(3, "nullity fit matches the symbolic Milnor oracle", ok, detail);
}

void criterion_4_homothety_invariance() {
  Rng rng(424242);
  double drift = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double kappa = 1.0 - rng.uniform(1e-3, 5.0);
    const double mu = rng.uniform(-5.0, 5.0);
    const double a = rng.uniform(1e-3, 10.0);
    const KappaMu t = d_homothety_constants(kappa, mu, a);
    drift = std::max(drift, std::abs(boeckx_index(t.kappa, t.mu) -
                                     boeckx_index(kappa, mu)));
  }

  double refit_err = 0.0;
  for (auto [l2, l3] : {std::pair{1.0, 4.0}, {2.0, 0.5}}) {
    const ContactMetricStructure s = build_milnor_model(l2, l3);
    const NullityFit fit = fit_nullity(s, kPlan);
    for (double a : {0.5, 2.0, 3.0}) {
      const NullityFit refit = fit_nullity(apply_d_homothety(s, a), kPlan);
      const KappaMu expected = d_homothety_constants(fit.kappa, *fit.mu, a);
      refit_err = std::max(refit_err, std::abs(refit.kappa - expected.kappa));
      refit_err = std::max(refit_err, std::abs(*refit.mu - expected.mu));
    }
  }
  const bool ok = drift < 1e-10 && refit_err < 1e-6;
  char detail[96];
  std::snprintf(detail, sizeof detail, "index drift %.2e, refit error %.2e",
                drift, refit_err);
  report(4, "D_a-homothety invariance of the Boeckx index", ok, detail);
}

void criterion_5_riemannian_regime() {
  bool ok = true;
  double worst_curve = 0.0;
  for (double index : {1.5, 2.0, 3.0, 10.0, -1.5, -2.0, -3.0, -10.0}) {
    for (double scale : {0.25, 1.0, 4.0}) {
      const EigenvaluePair ev = riemannian_eigenvalues(index, scale);
      ok = ok && ev.lam_pos < 1.0 && ev.lam_neg < 1.0;
      worst_curve =
          std::max(worst_curve, std::abs((index - 1.0) * ev.lam_pos -
                                         (1.0 + index) * ev.lam_neg + 2.0));
      worst_curve = std::max(
          worst_curve,
          std::abs((1.0 - ev.lam_pos) * (1.0 - ev.lam_neg) - scale * scale));
    }
  }
  ok = ok && worst_curve < 1e-12;

  for (double index : {0.0, 0.5, -0.5, 1.0, -1.0}) {
    try {
      riemannian_eigenvalues(index, 1.0);
      ok = false;
    } catch (const InfeasibleRegimeError&) {
    }
  }

  // forced conformal factor is 1 everywhere; feasible only on the control
  for (auto [l2, l3] : {std::pair{0.0, 0.0}, {1.0, 4.0}, {3.0, -1.0}}) {
    const ConformalFeasibility c =
        conformal_feasibility(build_milnor_model(l2, l3), kPlan);
    ok = ok && c.forced_scale == 1.0;
    ok = ok && (c.feasible == (l2 == l3));
  }
  char detail[64];
  std::snprintf(detail, sizeof detail, "max curve residual %.2e", worst_curve);
  report(5, "Riemannian-regime eigenvalues and conformal rigidity", ok,
         detail);
}

void criterion_6_unique_base_metric() {
  const ContactMetricStructure s = build_milnor_model(1.0, 4.0);
  const NullityFit fit = fit_nullity(s, kPlan);
  const Mat closed = canonical_base_metric(s, fit, s.origin());
  double drift = 0.0;
  for (double scale : {0.25, 0.5, 1.0, 2.0, 4.0})
    drift = std::max(
        drift, (base_metric_via_error_tensor(s, fit, scale, s.origin()) - closed)
                   .cwiseAbs()
                   .maxCoeff());

  const AdaptedBasis basis =
      eigendistributions(s, compute_h(s, s.origin()).comps, s.origin());
  double ortho = 0.0;
  for (const Vec& vp : basis.pos)
    for (const Vec& vn : basis.neg)
      ortho = std::max(ortho, std::abs(vp.dot(closed * vn)));

  const bool ok = drift < 1e-9 && ortho < 1e-10;
  char detail[96];
  std::snprintf(detail, sizeof detail,
                "scale drift %.2e, orthogonality residual %.2e", drift, ortho);
  report(6, "base metric is unique and orthogonalizes the distributions", ok,
         detail);
}

void criterion_7_sasakian_lift() {
  bool ok = true;
  double defect = 0.0, residual = 0.0;
  for (auto [l2, l3] : {std::pair{1.0, 4.0}, {2.0, 0.5}}) {
    const ContactMetricStructure s = build_milnor_model(l2, l3);
    const NullityFit fit = fit_nullity(s, kPlan);
    const ContactMetricStructure lifted = build_lifted_structure(
        s, TensorField(canonical_base_metric(s, fit, s.origin())),
        TensorField(base_complex_structure(s, fit, s.origin())));
    ok = ok && validate_contact_metric(lifted, kPlan, 1e-9).pass();
    defect = std::max(defect, k_contact_defect(lifted, kPlan));
    residual = std::max(residual, sasakian_nullity_residual(lifted, kPlan));
  }
  ok = ok && defect < 1e-8 && residual < 1e-5;
  char detail[96];
  std::snprintf(detail, sizeof detail,
                "K-contact defect %.2e, Sasakian residual %.2e", defect,
                residual);
  report(7, "canonical lift is the Sasakian structure", ok, detail);
}

void criterion_8_para_regime() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst = 0.0;
  for (double index : {0.0, 0.2, -0.2, 0.6, -0.6, 0.9, -0.9}) {
    for (int n : {1, 2, 3}) {
      const ContactMetricStructure s = synthetic_with_index(n, 0.0, index);
      const AdaptedBasis basis =
          eigendistributions(s, compute_h(s, s.origin()).comps, s.origin());
      const std::vector<ParaSolution> sols =
          enumerate_para_solutions(s, basis, index);
      const Mat omega = omega_in_adapted_basis(s, basis, s.origin());
      ok = ok && sols.size() == (1u << n);
      for (const ParaSolution& sol : sols) {
        ok = ok &&
             (sol.F * sol.F - Mat::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() ==
                 0.0;
        const ResidualReport rep = para_compatibility_report(sol, omega);
        ok = ok && rep.find("signature_defect")->value == 0.0;
        worst = std::max(worst, rep.find("omega_compatibility")->value);
        // g = I - T on the adapted basis: nonzero diagonal <=> no T-eigenvalue 1
        for (int i = 0; i < 2 * n; ++i)
          ok = ok && std::abs(sol.g(i, i)) > 1e-10;
      }
    }
  }
  ok = ok && worst < 1e-12;

  for (double index : {1.0, -1.0, 1.5, -3.0}) {
    try {
      para_intersection_points(index);
      ok = false;
    } catch (const InfeasibleRegimeError&) {
    }
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 5.0;
  char detail[96];
  std::snprintf(detail, sizeof detail, "max compatibility residual %.2e, %.2f s",
                worst, elapsed);
  report(8, "para regime enumerates 2^n structures", ok, detail);
}

void criterion_9_fd_soundness() {
  // Engine Lie derivatives against hand-expanded closed forms on three smooth
  // fields; halving the step must divide the discrepancy by about four.
  struct Case {
    FrameModel::MatFn tensor;
    Valence valence;
    std::function<Vec(const Vec&)> direction;
    FrameModel::MatFn expected;
  };
  const Case cases[] = {
      // X = (-y, x), A = diag(e^x, 1)
      {[](const Vec& q) {
         Mat a = Mat::Identity(2, 2);
         a(0, 0) = std::exp(q[0]);
         return a;
       },
       Valence::Cov2,
       [](const Vec& q) {
         Vec v(2);
         v << -q[1], q[0];
         return v;
       },
       [](const Vec& q) {
         const double ex = std::exp(q[0]);
         Mat out(2, 2);
         out << -q[1] * ex, 1.0 - ex, 1.0 - ex, 0.0;
         return out;
       }},
      // X = (y, x^2), T = [[sin y, 0], [x, 1/2]]
      {[](const Vec& q) {
         Mat t(2, 2);
         t << std::sin(q[1]), 0.0, q[0], 0.5;
         return t;
       },
       Valence::Mixed11,
       [](const Vec& q) {
         Vec v(2);
         v << q[1], q[0] * q[0];
         return v;
       },
       [](const Vec& q) {
         const double x = q[0], y = q[1];
         Mat out(2, 2);
         out << x * x * std::cos(y) - x, std::sin(y) - 0.5,
             y - 2.0 * x * std::sin(y) + x, x;
         return out;
       }},
      // X = (-y, x), g = diag(e^y, 1 + x^2)
      {[](const Vec& q) {
         Mat g(2, 2);
         g << std::exp(q[1]), 0.0, 0.0, 1.0 + q[0] * q[0];
         return g;
       },
       Valence::Cov2,
       [](const Vec& q) {
         Vec v(2);
         v << -q[1], q[0];
         return v;
       },
       [](const Vec& q) {
         const double x = q[0], y = q[1];
         const double off = 1.0 + x * x - std::exp(y);
         Mat out(2, 2);
         out << x * std::exp(y), off, off, -2.0 * x * y;
         return out;
       }}};

  Vec p(2);
  p << 0.4, 0.7;
  bool ok = true;
  double worst_ratio_err = 0.0;
  for (const Case& c : cases) {
    auto error_at = [&](double step) {
      const FrameModel m = FrameModel::coordinate_chart(
          2, [](const Vec&) { return Mat(Mat::Identity(2, 2)); }, step);
      const Mat lie = lie_derivative(m, VectorField(c.direction),
                                     TensorField(c.tensor), c.valence, p);
      return (lie - c.expected(p)).cwiseAbs().maxCoeff();
    };
    const double ratio = error_at(1e-3) / error_at(5e-4);
    ok = ok && std::abs(ratio - 4.0) < 0.5;
    worst_ratio_err = std::max(worst_ratio_err, std::abs(ratio - 4.0));
  }
  char detail[64];
  std::snprintf(detail, sizeof detail, "max |ratio - 4| = %.2f",
                worst_ratio_err);
  report(9, "finite differences converge at second order", ok, detail);
}

}  // namespace

int main() {
  criterion_1_contact_axioms();
  criterion_2_identity_suite();
  criterion_3_nullity_fit();
  criterion_4_homothety_invariance();
  criterion_5_riemannian_regime();
  criterion_6_unique_base_metric();
  criterion_7_sasakian_lift();
  criterion_8_para_regime();
  criterion_9_fd_soundness();
  std::printf("%s\n", g_failures == 0 ? "ACCEPTANCE: ALL PASS"
                                      : "ACCEPTANCE: FAILURES PRESENT");
  return g_failures;
}
