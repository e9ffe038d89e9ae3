#pragma once

#include <vector>

#include "kmu/frame_model.hpp"

namespace kmu {

/// [X, Y] at p, frame components. Homogeneous models require frame-constant
/// fields (the bracket is then exact table algebra); chart models difference
/// the coordinate components.
Vec lie_bracket(const FrameModel& model, const VectorField& X,
                const VectorField& Y, const Vec& p);

/// Levi-Civita connection of the model metric.
class Connection {
 public:
  /// Frame Christoffel symbols at p: gamma[k](i,j) = Gamma^k_{ij}, meaning
  /// nabla_{E_i} E_j = Gamma^k_{ij} E_k.
  std::vector<Mat> christoffels(const Vec& p) const;

  /// nabla_X Y at p, frame components.
  Vec covariant_derivative(const VectorField& X, const VectorField& Y,
                           const Vec& p) const;

  const FrameModel& model() const { return model_; }

 private:
  friend Connection levi_civita(const FrameModel&);
  explicit Connection(FrameModel m) : model_(std::move(m)) {}
  FrameModel model_;
  std::vector<Mat> constant_gamma_;  // homogeneous mode cache
};

Connection levi_civita(const FrameModel& model);

/// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z at p,
/// frame components. Tensorial, so only the pointwise values of X, Y, Z enter.
Vec riemann_curvature(const Connection& conn, const VectorField& X,
                      const VectorField& Y, const VectorField& Z, const Vec& p);
Vec riemann_curvature(const FrameModel& model, const VectorField& X,
                      const VectorField& Y, const VectorField& Z, const Vec& p);

/// Lie derivative of a (0,2) or (1,1) tensor field along X at p, frame
/// components. Exact bracket algebra for frame-constant data on homogeneous
/// models; central finite differences on charts.
Mat lie_derivative(const FrameModel& model, const VectorField& X,
                   const TensorField& tensor, Valence valence, const Vec& p);

/// Lie derivative of a 1-form field along X at p, covariant frame components.
Vec lie_derivative_covector(const FrameModel& model, const VectorField& X,
                            const CovectorField& alpha, const Vec& p);

struct SymEigenResult {
  Vec values;   // descending
  Mat vectors;  // columns, orthonormal with respect to the supplied metric
};

/// Eigendecomposition of a (1,1) operator that is symmetric with respect to a
/// positive definite metric. Deterministic: eigenvalues sorted descending and
/// within an eigenspace the basis is Gram-Schmidt-oriented against the frame
/// order with the first significant component positive.
SymEigenResult sym_eigen(const Mat& op, const Mat& metric);

}  // namespace kmu
