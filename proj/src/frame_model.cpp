#include "kmu/frame_model.hpp"

#include <cmath>
#include <utility>

#include "kmu/errors.hpp"

namespace kmu {

BracketTable::BracketTable(int dim) : dim_(dim) {
  c_.assign(dim, Mat::Zero(dim, dim));
}

void BracketTable::set(int i, int j, const Vec& coeffs) {
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_ || coeffs.size() != dim_)
    throw PreconditionError("bracket table index/size out of range");
  for (int k = 0; k < dim_; ++k) {
    c_[k](i, j) = coeffs[k];
    c_[k](j, i) = -coeffs[k];
  }
}

Vec BracketTable::bracket_coeffs(int i, int j) const {
  Vec out(dim_);
  for (int k = 0; k < dim_; ++k) out[k] = c_[k](i, j);
  return out;
}

Vec BracketTable::bracket(const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(dim_);
  for (int k = 0; k < dim_; ++k) out[k] = x.dot(c_[k] * y);
  return out;
}

Mat BracketTable::adjoint(const Vec& x) const {
  Mat ad = Mat::Zero(dim_, dim_);
  for (int k = 0; k < dim_; ++k) ad.row(k) = (x.transpose() * c_[k]);
  return ad;
}

double BracketTable::jacobi_residual() const {
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      for (int k = j + 1; k < dim_; ++k) {
        Vec sum = bracket(bracket_coeffs(i, j), Vec::Unit(dim_, k)) +
                  bracket(bracket_coeffs(j, k), Vec::Unit(dim_, i)) +
                  bracket(bracket_coeffs(k, i), Vec::Unit(dim_, j));
        worst = std::max(worst, sum.cwiseAbs().maxCoeff());
      }
  return worst;
}

double BracketTable::antisymmetry_residual() const {
  double worst = 0.0;
  for (int k = 0; k < dim_; ++k)
    worst = std::max(worst, (c_[k] + c_[k].transpose()).cwiseAbs().maxCoeff());
  return worst;
}

FrameModel FrameModel::homogeneous(BracketTable table, Mat metric_components) {
  FrameModel m;
  m.dim_ = table.dim();
  if (metric_components.rows() != m.dim_ || metric_components.cols() != m.dim_)
    throw PreconditionError("metric dimension mismatch");
  if ((metric_components - metric_components.transpose()).cwiseAbs().maxCoeff() >
      1e-12)
    throw PreconditionError("metric components must be symmetric");
  if (table.antisymmetry_residual() > 1e-12)
    throw PreconditionError("bracket table must be antisymmetric");
  if (table.jacobi_residual() > 1e-9)
    throw PreconditionError("bracket table violates the Jacobi identity");
  m.mode_ = ModelMode::Homogeneous;
  m.table_ = std::move(table);
  m.metric_ = TensorField(std::move(metric_components));
  return m;
}

FrameModel FrameModel::chart(std::vector<VecFn> frame, MatFn metric_in_frame,
                             double fd_step, double domain_radius) {
  FrameModel m;
  m.dim_ = static_cast<int>(frame.size());
  m.mode_ = ModelMode::Chart;
  m.frame_ = std::move(frame);
  m.metric_ = TensorField(std::move(metric_in_frame));
  m.fd_step_ = fd_step;
  m.domain_radius_ = domain_radius;
  return m;
}

FrameModel FrameModel::coordinate_chart(int dim, MatFn metric, double fd_step,
                                        double domain_radius) {
  std::vector<VecFn> frame;
  frame.reserve(dim);
  for (int i = 0; i < dim; ++i)
    frame.push_back([dim, i](const Vec&) { return Vec(Vec::Unit(dim, i)); });
  return chart(std::move(frame), std::move(metric), fd_step, domain_radius);
}

FrameModel FrameModel::flat_chart(int dim) {
  return coordinate_chart(dim,
                          [dim](const Vec&) { return Mat(Mat::Identity(dim, dim)); });
}

Mat FrameModel::metric(const Vec& p) const { return metric_(p); }

const BracketTable& FrameModel::brackets() const {
  if (mode_ != ModelMode::Homogeneous)
    throw Error("bracket table is only defined for homogeneous models");
  return table_;
}

FrameModel FrameModel::with_metric(TensorField metric) const {
  FrameModel m = *this;
  m.metric_ = std::move(metric);
  return m;
}

FrameModel FrameModel::with_fd_step(double step) const {
  FrameModel m = *this;
  m.fd_step_ = step;
  m.curvature_fd_step_ = std::max(step, kDefaultCurvatureFdStep * step / kDefaultFdStep);
  return m;
}

Mat FrameModel::frame_matrix(const Vec& p) const {
  if (mode_ != ModelMode::Chart)
    throw Error("frame_matrix is only defined for chart models");
  Mat f(dim_, dim_);
  for (int i = 0; i < dim_; ++i) f.col(i) = frame_[i](p);
  return f;
}

Vec FrameModel::frame_to_coord(const Vec& frame_comps, const Vec& p) const {
  return frame_matrix(p) * frame_comps;
}

Vec FrameModel::coord_to_frame(const Vec& coord_comps, const Vec& p) const {
  Eigen::FullPivLU<Mat> lu(frame_matrix(p));
  if (!lu.isInvertible())
    throw SingularMetricError("frame degenerate at evaluation point");
  return lu.solve(coord_comps);
}

Mat FrameModel::coordinate_metric(const Vec& p) const {
  Eigen::FullPivLU<Mat> lu(frame_matrix(p));
  if (!lu.isInvertible())
    throw SingularMetricError("frame degenerate at evaluation point");
  const Mat finv = lu.inverse();
  return finv.transpose() * metric_(p) * finv;
}

void FrameModel::require_in_domain(const Vec& p) const {
  if (mode_ != ModelMode::Chart) return;
  if (p.size() != dim_) throw ChartDomainError("point dimension mismatch");
  if (p.cwiseAbs().maxCoeff() > domain_radius_)
    throw ChartDomainError("point outside chart domain");
}

}  // namespace kmu
