#pragma once

#include <functional>
#include <vector>

#include "kmu/fields.hpp"

namespace kmu {

/// Structure constants c^k_{ij} of a moving frame: [E_i, E_j] = c^k_{ij} E_k.
class BracketTable {
 public:
  explicit BracketTable(int dim);

  /// Sets [E_i, E_j] = coeffs (and [E_j, E_i] = -coeffs).
  void set(int i, int j, const Vec& coeffs);

  /// Frame coefficients of [E_i, E_j].
  Vec bracket_coeffs(int i, int j) const;

  /// Bilinear extension to constant-coefficient fields.
  Vec bracket(const Vec& x, const Vec& y) const;

  /// Adjoint matrix of x: (ad_x)^k_j = x^i c^k_{ij}, so ad_x y = [x, y].
  Mat adjoint(const Vec& x) const;

  /// Max-norm of the cyclic Jacobi sum over all frame triples.
  double jacobi_residual() const;

  double antisymmetry_residual() const;

  int dim() const { return dim_; }

 private:
  int dim_;
  std::vector<Mat> c_;  // c_[k](i, j) = c^k_{ij}
};

enum class ModelMode { Homogeneous, Chart };

/// A manifold model carried by a moving frame E_1..E_m with a metric given by
/// its frame components. Two representations:
///
///  - Homogeneous: the frame has a constant bracket table and the metric is
///    frame-constant; all differential operators reduce to exact structure-
///    constant algebra.
///  - Chart: the frame fields are coordinate-component functions on a chart
///    of R^m; derivatives use central finite differences.
class FrameModel {
 public:
  using VecFn = std::function<Vec(const Vec&)>;
  using MatFn = std::function<Mat(const Vec&)>;

  static constexpr double kDefaultFdStep = 1e-5;
  static constexpr double kDefaultCurvatureFdStep = 1e-4;

  static FrameModel homogeneous(BracketTable table, Mat metric_components);
  static FrameModel chart(std::vector<VecFn> frame, MatFn metric_in_frame,
                          double fd_step = kDefaultFdStep,
                          double domain_radius = 10.0);
  /// Chart with the coordinate frame (E_i = d/dx^i) and a metric field.
  static FrameModel coordinate_chart(int dim, MatFn metric,
                                     double fd_step = kDefaultFdStep,
                                     double domain_radius = 10.0);
  /// Flat R^dim: coordinate frame, identity metric.
  static FrameModel flat_chart(int dim);

  int dim() const { return dim_; }
  ModelMode mode() const { return mode_; }
  Vec origin() const { return Vec::Zero(dim_); }

  /// Metric components in the frame at p.
  Mat metric(const Vec& p) const;
  const TensorField& metric_field() const { return metric_; }

  const BracketTable& brackets() const;

  /// Same frame, different metric (used by homothety and lifts).
  FrameModel with_metric(TensorField metric) const;
  FrameModel with_fd_step(double step) const;

  // Chart-mode helpers. All throw on homogeneous models.
  /// Columns are the coordinate components of the frame fields at p.
  Mat frame_matrix(const Vec& p) const;
  Vec frame_to_coord(const Vec& frame_comps, const Vec& p) const;
  Vec coord_to_frame(const Vec& coord_comps, const Vec& p) const;
  Mat coordinate_metric(const Vec& p) const;
  void require_in_domain(const Vec& p) const;

  double fd_step() const { return fd_step_; }
  double curvature_fd_step() const { return curvature_fd_step_; }
  double domain_radius() const { return domain_radius_; }

  /// Empty placeholder; usable only after assignment from a factory.
  FrameModel() : table_(0) {}

 private:
  int dim_ = 0;
  ModelMode mode_ = ModelMode::Homogeneous;
  BracketTable table_;
  std::vector<VecFn> frame_;
  TensorField metric_;
  double fd_step_ = kDefaultFdStep;
  double curvature_fd_step_ = kDefaultCurvatureFdStep;
  double domain_radius_ = 10.0;
};

}  // namespace kmu
