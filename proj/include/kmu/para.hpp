#pragma once

#include <cstdint>
#include <vector>

#include "kmu/contact.hpp"

namespace kmu {

/// Intersection of the eigenvalue line (I-1)x - (1+I)y + 2 = 0 with the
/// hyperbola (1-x)(1-y) = -1; nonempty exactly when |I_M| < 1.
struct IntersectionPoints {
  Eigen::Vector2d p1;  // (1 + a0, 1 - 1/a0), a0 = sqrt((1+I)/(1-I))
  Eigen::Vector2d p2;  // (1 - a0, 1 + 1/a0)
};

IntersectionPoints para_intersection_points(double index);

/// One of the 2^n almost para-Kahler base structures, in the components of
/// the adapted phi-basis (v_1..v_n, phi v_1..phi v_n) pushed to the base.
struct ParaSolution {
  std::uint32_t subset = 0;  // bitmask over {1..n} (bit i-1 <-> index i)
  Mat F;                     // (1,1), F^2 = I
  Mat g;                     // (0,2), signature (n, n)
  double a0 = 1.0;
};

/// All 2^n solutions, ordered by increasing subset bitmask. The eigenvalue
/// pair of the underlying error tensor is p1 for indices in the subset and
/// p2 otherwise.
std::vector<ParaSolution> enumerate_para_solutions(
    const ContactMetricStructure& s, const AdaptedBasis& basis, double index);

/// Error tensor with the requested eigenvalue pair per index, adapted-basis
/// components, plus the recovered base semi-metric g(X,Y) = g~(X - TX, Y).
/// Rejects any requested eigenvalue equal to 1 (it would make g degenerate).
struct SemiErrorTensor {
  Mat T;
  Mat recovered_g;
  std::vector<Eigen::Vector2d> pairs;
};

SemiErrorTensor semi_error_tensor(const ContactMetricStructure& s,
                                  double index,
                                  const std::vector<Eigen::Vector2d>& pairs);

/// Pair selection for a subset bitmask: p1 where the bit is set, else p2.
std::vector<Eigen::Vector2d> para_pairs_for_subset(double index,
                                                   std::uint32_t subset, int n);

/// The symplectic form d(eta) contracted with the adapted basis.
Mat omega_in_adapted_basis(const ContactMetricStructure& s,
                           const AdaptedBasis& basis, const Vec& p);

/// Residuals of F^2 - I, omega(.,.) - g(., F .), the (n, n) signature count,
/// and nondegeneracy of g.
ResidualReport para_compatibility_report(const ParaSolution& sol,
                                         const Mat& omega);

}  // namespace kmu
