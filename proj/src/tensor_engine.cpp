#include "kmu/tensor_engine.hpp"

#include <cmath>
#include <functional>

#include "kmu/errors.hpp"

namespace kmu {

namespace {

constexpr double kSymmetryTol = 1e-8;

void require_constant_inputs(const FrameModel& model, bool ok) {
  (void)model;
  if (!ok)
    throw Error("homogeneous models require frame-constant fields");
}

// Coordinate components of a frame-component vector field, as a function.
std::function<Vec(const Vec&)> coord_field(const FrameModel& m,
                                           const VectorField& X) {
  return [&m, &X](const Vec& q) { return m.frame_to_coord(X(q), q); };
}

// Jacobian d(f)/d(x) by central differences, columns indexed by coordinate.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& p,
                double h) {
  const int n = p.size();
  Mat jac(f(p).size(), n);
  for (int b = 0; b < n; ++b) {
    Vec dp = Vec::Zero(n);
    dp[b] = h;
    jac.col(b) = (f(p + dp) - f(p - dp)) / (2.0 * h);
  }
  return jac;
}

// Directional derivative of a matrix-valued function along v.
Mat fd_directional(const std::function<Mat(const Vec&)>& f, const Vec& p,
                   const Vec& v, double h) {
  return (f(p + h * v) - f(p - h * v)) / (2.0 * h);
}

// Coordinate Christoffel symbols at p from finite differences of the
// coordinate metric. gamma[k](a,b) = Gamma^k_{ab}.
std::vector<Mat> coordinate_christoffels(const FrameModel& m, const Vec& p) {
  const int n = m.dim();
  const double h = m.fd_step();
  const Mat g = m.coordinate_metric(p);
  Eigen::FullPivLU<Mat> lu(g);
  if (!lu.isInvertible())
    throw SingularMetricError("metric singular at evaluation point");
  const Mat ginv = lu.inverse();

  std::vector<Mat> dg(n);  // dg[a] = d_a g
  for (int a = 0; a < n; ++a) {
    Vec dp = Vec::Zero(n);
    dp[a] = h;
    dg[a] = (m.coordinate_metric(p + dp) - m.coordinate_metric(p - dp)) /
            (2.0 * h);
  }

  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += ginv(k, l) * (dg[a](l, b) + dg[b](l, a) - dg[l](a, b));
        gamma[k](a, b) = 0.5 * s;
      }
  return gamma;
}

// Frame Christoffels of a homogeneous model via the constant-metric Koszul
// formula 2 g(nabla_i E_j, E_k) = c_ijk - c_jki + c_kij with lowered brackets.
std::vector<Mat> homogeneous_christoffels(const FrameModel& m) {
  const int n = m.dim();
  const Mat metric = m.metric(m.origin());
  Eigen::FullPivLU<Mat> lu(metric);
  if (!lu.isInvertible()) throw SingularMetricError("metric singular");
  const Mat minv = lu.inverse();
  const BracketTable& table = m.brackets();

  auto lowered = [&](int i, int j, int k) {
    return table.bracket_coeffs(i, j).dot(metric.col(k));
  };

  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec rhs(n);
      for (int k = 0; k < n; ++k)
        rhs[k] = 0.5 * (lowered(i, j, k) - lowered(j, k, i) + lowered(k, i, j));
      const Vec g_ij = minv * rhs;
      for (int k = 0; k < n; ++k) gamma[k](i, j) = g_ij[k];
    }
  return gamma;
}

}  // namespace

Vec lie_bracket(const FrameModel& model, const VectorField& X,
                const VectorField& Y, const Vec& p) {
  if (model.mode() == ModelMode::Homogeneous) {
    require_constant_inputs(model, X.is_constant() && Y.is_constant());
    return model.brackets().bracket(X(p), Y(p));
  }
  model.require_in_domain(p);
  const double h = model.fd_step();
  auto xc = coord_field(model, X);
  auto yc = coord_field(model, Y);
  const Vec x0 = xc(p);
  const Vec y0 = yc(p);
  const Vec bracket_coord = fd_jacobian(yc, p, h) * x0 - fd_jacobian(xc, p, h) * y0;
  return model.coord_to_frame(bracket_coord, p);
}

Connection levi_civita(const FrameModel& model) {
  Connection conn(model);
  if (model.mode() == ModelMode::Homogeneous)
    conn.constant_gamma_ = homogeneous_christoffels(model);
  return conn;
}

std::vector<Mat> Connection::christoffels(const Vec& p) const {
  if (model_.mode() == ModelMode::Homogeneous) return constant_gamma_;
  model_.require_in_domain(p);
  // Convert nabla_{E_i} E_j, computed in coordinates, back to the frame.
  const int n = model_.dim();
  const std::vector<Mat> cgamma = coordinate_christoffels(model_, p);
  const Mat f = model_.frame_matrix(p);
  Eigen::FullPivLU<Mat> lu(f);
  if (!lu.isInvertible()) throw SingularMetricError("frame degenerate");
  const double h = model_.fd_step();

  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  for (int j = 0; j < n; ++j) {
    auto ej = [this, j, n](const Vec& q) {
      return Vec(model_.frame_matrix(q).col(j));
    };
    const Mat dej = fd_jacobian(ej, p, h);
    for (int i = 0; i < n; ++i) {
      Vec cov = dej * f.col(i);
      for (int k = 0; k < n; ++k)
        cov[k] += f.col(i).dot(cgamma[k] * f.col(j));
      const Vec frame_comps = lu.solve(cov);
      for (int k = 0; k < n; ++k) gamma[k](i, j) = frame_comps[k];
    }
  }
  return gamma;
}

Vec Connection::covariant_derivative(const VectorField& X, const VectorField& Y,
                                     const Vec& p) const {
  const int n = model_.dim();
  if (model_.mode() == ModelMode::Homogeneous) {
    require_constant_inputs(model_, X.is_constant() && Y.is_constant());
    const Vec x = X(p);
    const Vec y = Y(p);
    Vec out = Vec::Zero(n);
    for (int k = 0; k < n; ++k) out[k] = x.dot(constant_gamma_[k] * y);
    return out;
  }
  model_.require_in_domain(p);
  const std::vector<Mat> cgamma = coordinate_christoffels(model_, p);
  auto xc = coord_field(model_, X);
  auto yc = coord_field(model_, Y);
  const Vec x0 = xc(p);
  Vec out = fd_jacobian(yc, p, model_.fd_step()) * x0;
  const Vec y0 = yc(p);
  for (int k = 0; k < n; ++k) out[k] += x0.dot(cgamma[k] * y0);
  return model_.coord_to_frame(out, p);
}

Vec riemann_curvature(const Connection& conn, const VectorField& X,
                      const VectorField& Y, const VectorField& Z,
                      const Vec& p) {
  const FrameModel& model = conn.model();
  const int n = model.dim();

  if (model.mode() == ModelMode::Homogeneous) {
    const std::vector<Mat> gamma = conn.christoffels(p);
    const BracketTable& table = model.brackets();
    const Vec x = X(p), y = Y(p), z = Z(p);
    // R(E_i,E_j)E_k, assembled once, then contracted (R is tensorial).
    Vec out = Vec::Zero(n);
    for (int m = 0; m < n; ++m) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (x[i] == 0.0 || y[j] == 0.0) continue;
          const Vec cij = table.bracket_coeffs(i, j);
          for (int k = 0; k < n; ++k) {
            if (z[k] == 0.0) continue;
            double r = 0.0;
            for (int l = 0; l < n; ++l)
              r += gamma[l](j, k) * gamma[m](i, l) -
                   gamma[l](i, k) * gamma[m](j, l) - cij[l] * gamma[m](l, k);
            acc += x[i] * y[j] * z[k] * r;
          }
        }
      out[m] = acc;
    }
    return out;
  }

  model.require_in_domain(p);
  // Coordinate curvature R^d_{abc} = d_a G^d_{bc} - d_b G^d_{ac}
  //                                + G^d_{ae} G^e_{bc} - G^d_{be} G^e_{ac},
  // with the derivative of the Christoffel field taken at a wider step to
  // keep the nested difference noise down.
  const int nc = n;
  const double h2 = model.curvature_fd_step();
  const std::vector<Mat> gamma0 = coordinate_christoffels(model, p);
  std::vector<std::vector<Mat>> dgamma(nc);  // dgamma[a][k](b,c)
  for (int a = 0; a < nc; ++a) {
    Vec dp = Vec::Zero(nc);
    dp[a] = h2;
    const std::vector<Mat> gp = coordinate_christoffels(model, p + dp);
    const std::vector<Mat> gm = coordinate_christoffels(model, p - dp);
    dgamma[a].resize(nc);
    for (int k = 0; k < nc; ++k) dgamma[a][k] = (gp[k] - gm[k]) / (2.0 * h2);
  }

  const Vec x = model.frame_to_coord(X(p), p);
  const Vec y = model.frame_to_coord(Y(p), p);
  const Vec z = model.frame_to_coord(Z(p), p);
  Vec out = Vec::Zero(nc);
  for (int d = 0; d < nc; ++d) {
    double acc = 0.0;
    for (int a = 0; a < nc; ++a)
      for (int b = 0; b < nc; ++b)
        for (int c = 0; c < nc; ++c) {
          double r = dgamma[a][d](b, c) - dgamma[b][d](a, c);
          for (int e = 0; e < nc; ++e)
            r += gamma0[d](a, e) * gamma0[e](b, c) -
                 gamma0[d](b, e) * gamma0[e](a, c);
          acc += x[a] * y[b] * z[c] * r;
        }
    out[d] = acc;
  }
  return model.coord_to_frame(out, p);
}

Vec riemann_curvature(const FrameModel& model, const VectorField& X,
                      const VectorField& Y, const VectorField& Z,
                      const Vec& p) {
  return riemann_curvature(levi_civita(model), X, Y, Z, p);
}

Mat lie_derivative(const FrameModel& model, const VectorField& X,
                   const TensorField& tensor, Valence valence, const Vec& p) {
  const int n = model.dim();

  if (model.mode() == ModelMode::Homogeneous) {
    require_constant_inputs(model, X.is_constant() && tensor.is_constant());
    const Mat ad = model.brackets().adjoint(X(p));  // ad^l_i = [X, E_i]^l
    const Mat a = tensor(p);
    if (valence == Valence::Cov2) return -(ad.transpose() * a + a * ad);
    return ad * a - a * ad;
  }

  model.require_in_domain(p);
  const double h = model.fd_step();
  auto xc = coord_field(model, X);
  const Mat jx = fd_jacobian(xc, p, h);
  const Vec x0 = xc(p);

  if (valence == Valence::Cov2) {
    auto ac = [&model, &tensor](const Vec& q) {
      Eigen::FullPivLU<Mat> lu(model.frame_matrix(q));
      const Mat finv = lu.inverse();
      return Mat(finv.transpose() * tensor(q) * finv);
    };
    const Mat a0 = ac(p);
    const Mat lie_coord =
        fd_directional(ac, p, x0, h) + jx.transpose() * a0 + a0 * jx;
    const Mat f = model.frame_matrix(p);
    return f.transpose() * lie_coord * f;
  }

  auto tc = [&model, &tensor](const Vec& q) {
    const Mat f = model.frame_matrix(q);
    Eigen::FullPivLU<Mat> lu(f);
    return Mat(f * tensor(q) * lu.inverse());
  };
  const Mat t0 = tc(p);
  const Mat lie_coord = fd_directional(tc, p, x0, h) - jx * t0 + t0 * jx;
  const Mat f = model.frame_matrix(p);
  Eigen::FullPivLU<Mat> lu(f);
  (void)n;
  return lu.solve(lie_coord * f);
}

Vec lie_derivative_covector(const FrameModel& model, const VectorField& X,
                            const CovectorField& alpha, const Vec& p) {
  if (model.mode() == ModelMode::Homogeneous) {
    require_constant_inputs(model, X.is_constant() && alpha.is_constant());
    const Mat ad = model.brackets().adjoint(X(p));
    return Vec(-(ad.transpose() * alpha(p)));
  }
  model.require_in_domain(p);
  const double h = model.fd_step();
  auto xc = coord_field(model, X);
  auto acoord = [&model, &alpha](const Vec& q) {
    Eigen::FullPivLU<Mat> lu(model.frame_matrix(q));
    return Vec(lu.inverse().transpose() * alpha(q));
  };
  const Vec x0 = xc(p);
  Vec lie_coord = (acoord(p + h * x0) - acoord(p - h * x0)) / (2.0 * h);
  lie_coord += fd_jacobian(xc, p, h).transpose() * acoord(p);
  return model.frame_matrix(p).transpose() * lie_coord;
}

SymEigenResult sym_eigen(const Mat& op, const Mat& metric) {
  const int n = op.rows();
  const Mat ma = metric * op;
  const double scale = std::max(1.0, ma.cwiseAbs().maxCoeff());
  if ((ma - ma.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale)
    throw SymmetryError("operator not symmetric with respect to the metric");

  Eigen::LLT<Mat> llt(metric);
  if (llt.info() != Eigen::Success)
    throw SingularMetricError("metric not positive definite");
  const Mat lt = Mat(llt.matrixL()).transpose();
  const Mat lt_inv = lt.inverse();

  Mat whitened = lt * op * lt_inv;
  whitened = 0.5 * (whitened + whitened.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(whitened);
  if (solver.info() != Eigen::Success) throw Error("eigensolver failed");

  SymEigenResult res;
  res.values = solver.eigenvalues().reverse();
  res.vectors = Mat(n, n);
  for (int i = 0; i < n; ++i)
    res.vectors.col(i) = lt_inv * solver.eigenvectors().col(n - 1 - i);

  // Deterministic orientation. Group near-equal eigenvalues, then rebuild each
  // eigenspace basis by metric Gram-Schmidt of the projected frame vectors.
  const double tie_tol = 1e-10 * std::max(1.0, res.values.cwiseAbs().maxCoeff());
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && std::abs(res.values[end] - res.values[start]) <= tie_tol)
      ++end;
    const int size = end - start;
    if (size > 1) {
      Mat proj = Mat::Zero(n, n);
      for (int i = start; i < end; ++i)
        proj += res.vectors.col(i) * res.vectors.col(i).transpose() * metric;
      int filled = 0;
      for (int k = 0; k < n && filled < size; ++k) {
        Vec w = proj * Vec::Unit(n, k);
        for (int i = start; i < start + filled; ++i)
          w -= res.vectors.col(i).dot(metric * w) * res.vectors.col(i);
        const double norm = std::sqrt(w.dot(metric * w));
        if (norm > 1e-8) res.vectors.col(start + filled++) = w / norm;
      }
    }
    start = end;
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (std::abs(res.vectors(k, i)) > 1e-10) {
        if (res.vectors(k, i) < 0.0) res.vectors.col(i) = -res.vectors.col(i);
        break;
      }
    }
  }
  return res;
}

}  // namespace kmu
