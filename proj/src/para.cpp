#include "kmu/para.hpp"

#include <cmath>
#include <limits>

#include "kmu/errors.hpp"

namespace kmu {

namespace {

void require_para_regime(double index) {
  if (std::abs(index) >= 1.0)
    throw InfeasibleRegimeError(
        "regime requires |I_M| < 1: the eigenvalue line meets the hyperbola "
        "(1-x)(1-y) = -1 only when its slope is negative");
}

// Reciprocal nudged so that a * reciprocal == 1.0 exactly; keeps F^2 = I
// exact in floating point.
double exact_reciprocal(double a) {
  double r = 1.0 / a;
  if (a * r == 1.0) return r;
  for (double cand : {std::nextafter(r, 0.0),
                      std::nextafter(r, std::numeric_limits<double>::max())}) {
    if (a * cand == 1.0) return cand;
  }
  return r;
}

}  // namespace

IntersectionPoints para_intersection_points(double index) {
  require_para_regime(index);
  const double a0 = std::sqrt((1.0 + index) / (1.0 - index));
  const double inv = exact_reciprocal(a0);
  IntersectionPoints pts;
  pts.p1 = {1.0 + a0, 1.0 - inv};
  pts.p2 = {1.0 - a0, 1.0 + inv};
  return pts;
}

std::vector<Eigen::Vector2d> para_pairs_for_subset(double index,
                                                   std::uint32_t subset,
                                                   int n) {
  const IntersectionPoints pts = para_intersection_points(index);
  std::vector<Eigen::Vector2d> pairs(n);
  for (int i = 0; i < n; ++i)
    pairs[i] = (subset >> i) & 1u ? pts.p1 : pts.p2;
  return pairs;
}

std::vector<ParaSolution> enumerate_para_solutions(
    const ContactMetricStructure& s, const AdaptedBasis& basis, double index) {
  require_para_regime(index);
  const int n = s.n();
  if (static_cast<int>(basis.pos.size()) != n)
    throw PreconditionError("adapted basis size does not match the structure");
  const double a0 = std::sqrt((1.0 + index) / (1.0 - index));
  const double inv = exact_reciprocal(a0);

  std::vector<ParaSolution> sols;
  sols.reserve(1u << n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    ParaSolution sol;
    sol.subset = mask;
    sol.a0 = a0;
    sol.F = Mat::Zero(2 * n, 2 * n);
    sol.g = Mat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      const double sign = (mask >> i) & 1u ? 1.0 : -1.0;
      sol.F(n + i, i) = sign * a0;   // F f_i = +/- a0 f_{n+i}
      sol.F(i, n + i) = sign * inv;  // F f_{n+i} = +/- (1/a0) f_i
      sol.g(i, i) = -sign * a0;
      sol.g(n + i, n + i) = sign * inv;
    }
    sols.push_back(std::move(sol));
  }
  return sols;
}

SemiErrorTensor semi_error_tensor(const ContactMetricStructure& s,
                                  double index,
                                  const std::vector<Eigen::Vector2d>& pairs) {
  require_para_regime(index);
  const int n = s.n();
  if (static_cast<int>(pairs.size()) != n)
    throw PreconditionError("one eigenvalue pair per index required");
  for (const auto& pr : pairs) {
    if (std::abs(pr.x() - 1.0) < 1e-9 || std::abs(pr.y() - 1.0) < 1e-9)
      throw PreconditionError(
          "error tensor cannot have an eigenvalue equal to 1 (the recovered "
          "base tensor would be degenerate)");
  }

  SemiErrorTensor out;
  out.pairs = pairs;
  out.T = Mat::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    out.T(i, i) = pairs[i].x();
    out.T(n + i, n + i) = pairs[i].y();
  }
  // g~ is the identity in the adapted basis, so g = I - T entrywise.
  out.recovered_g = Mat::Identity(2 * n, 2 * n) - out.T;
  return out;
}

Mat omega_in_adapted_basis(const ContactMetricStructure& s,
                           const AdaptedBasis& basis, const Vec& p) {
  const Mat omega = d_eta(s, p);
  const int n = static_cast<int>(basis.pos.size());
  std::vector<const Vec*> b;
  for (const Vec& v : basis.pos) b.push_back(&v);
  for (const Vec& v : basis.neg) b.push_back(&v);
  Mat out(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a)
    for (int c = 0; c < 2 * n; ++c) out(a, c) = b[a]->dot(omega * (*b[c]));
  return out;
}

ResidualReport para_compatibility_report(const ParaSolution& sol,
                                         const Mat& omega) {
  const int m = sol.F.rows();
  const int n = m / 2;

  const double f_sq =
      (sol.F * sol.F - Mat::Identity(m, m)).cwiseAbs().maxCoeff();
  const double compat = (omega - sol.g * sol.F).cwiseAbs().maxCoeff();

  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (sol.g + sol.g.transpose()));
  int pos = 0, neg = 0;
  double min_abs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double v = eig.eigenvalues()[i];
    if (v > 1e-10) ++pos;
    if (v < -1e-10) ++neg;
    min_abs = std::min(min_abs, std::abs(v));
  }

  ResidualReport report;
  report.add("F_square_identity", f_sq, 1e-12);
  report.add("omega_compatibility", compat, 1e-12);
  report.add("signature_defect",
             static_cast<double>(std::abs(pos - n) + std::abs(neg - n)), 0.5);
  report.add("gram_nondegenerate", min_abs, 1e-10, CheckKind::LowerBound);
  return report;
}

}  // namespace kmu
