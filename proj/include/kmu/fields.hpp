#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>

#include "kmu/errors.hpp"

namespace kmu {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A field of values over the model, represented by components in the moving
/// frame. Either frame-constant (homogeneous models and pointwise structures)
/// or a function of the chart point.
template <class V>
class Field {
 public:
  Field() = default;
  Field(V constant) : value_(std::move(constant)) {}        // NOLINT(implicit)
  Field(std::function<V(const Vec&)> fn) : fn_(std::move(fn)) {}  // NOLINT

  V operator()(const Vec& p) const { return fn_ ? fn_(p) : value_; }

  bool is_constant() const { return !fn_; }

  const V& constant_value() const {
    if (fn_) throw Error("field is not frame-constant");
    return value_;
  }

 private:
  V value_{};
  std::function<V(const Vec&)> fn_;
};

using ScalarField = Field<double>;
using VectorField = Field<Vec>;    // contravariant components X^i
using CovectorField = Field<Vec>;  // covariant components alpha_i
using TensorField = Field<Mat>;    // (1,1) as T^i_j or (0,2) as A_ij

enum class Valence { Cov2, Mixed11 };

}  // namespace kmu
