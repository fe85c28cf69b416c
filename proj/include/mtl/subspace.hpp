#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "mtl/errors.hpp"
#include "mtl/sym_tensor.hpp"

namespace mtl {

/// Linear subspace of R^n held by an orthonormal basis (columns of an n x k matrix).
template <typename Scalar>
class BasicSubspace {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicSubspace() = default;

  /// Wraps a basis that is already orthonormal (checked at 1e-12).
  explicit BasicSubspace(Matrix basis) : basis_(std::move(basis)) {
    if (basis_.cols() > basis_.rows()) throw DimensionError("subspace basis has more vectors than the ambient dimension");
    const Matrix gram = basis_.transpose() * basis_;
    if (basis_.cols() > 0 && (gram - Matrix::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff() > Scalar(1e-12))
      throw InvalidArgument("subspace basis is not orthonormal");
  }

  static BasicSubspace zero(int n) { return BasicSubspace(Matrix(n, 0)); }
  static BasicSubspace full(int n) { return BasicSubspace(Matrix::Identity(n, n)); }

  /// Span of the columns of `vectors`; numerical rank decided at `tol` relative to the largest singular value.
  static BasicSubspace span(const Matrix& vectors, Scalar tol = Scalar(1e-10)) {
    const int n = static_cast<int>(vectors.rows());
    if (vectors.cols() == 0) return zero(n);
    Eigen::JacobiSVD<Matrix> svd(vectors, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    int rank = 0;
    const Scalar smax = sv.size() > 0 ? sv[0] : Scalar(0);
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > tol * std::max(Scalar(1), smax)) ++rank;
    Matrix b = svd.matrixU().leftCols(rank);
    return BasicSubspace(orthonormalized(b));
  }

  static BasicSubspace span(const std::vector<Vector>& vectors, int n) {
    Matrix m(n, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vectors[i];
    return span(m);
  }

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }

  Matrix projector() const { return basis_ * basis_.transpose(); }
  Vector project(const Vector& x) const { return basis_ * (basis_.transpose() * x); }

  BasicSubspace complement() const {
    const int n = ambient_dim();
    if (dim() == 0) return full(n);
    Eigen::HouseholderQR<Matrix> qr(basis_);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    Matrix rest = q.rightCols(n - dim());
    return BasicSubspace(orthonormalized(rest));
  }

 private:
  // one Gram-Schmidt sweep to push the basis to orthonormality at working precision
  static Matrix orthonormalized(Matrix b) {
    for (int j = 0; j < b.cols(); ++j) {
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i < j; ++i) b.col(j) -= b.col(i).dot(b.col(j)) * b.col(i);
      b.col(j).normalize();
    }
    return b;
  }

  Matrix basis_;
};

/// Orthogonal map of R^n (proper or improper) with its cached determinant.
template <typename Scalar>
class BasicRotation {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit BasicRotation(Matrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols()) throw DimensionError("rotation matrix must be square");
    const int n = static_cast<int>(matrix_.rows());
    if ((matrix_.transpose() * matrix_ - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > Scalar(1e-12))
      throw InvalidArgument("matrix is not orthogonal");
    const Scalar d = matrix_.determinant();
    if (std::abs(std::abs(d) - Scalar(1)) > Scalar(1e-12)) throw InvalidArgument("orthogonal matrix with |det| != 1");
    determinant_ = d > 0 ? 1 : -1;
  }

  static BasicRotation identity(int n) { return BasicRotation(Matrix::Identity(n, n)); }

  /// Counterclockwise rotation by `angle` in the (i, j) coordinate plane of R^n.
  static BasicRotation plane(int n, int i, int j, Scalar angle) {
    Matrix m = Matrix::Identity(n, n);
    m(i, i) = std::cos(angle);
    m(j, j) = std::cos(angle);
    m(j, i) = std::sin(angle);
    m(i, j) = -std::sin(angle);
    return BasicRotation(m);
  }

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Matrix& matrix() const { return matrix_; }
  int determinant() const { return determinant_; }
  bool proper() const { return determinant_ > 0; }

  BasicRotation inverse() const { return BasicRotation(matrix_.transpose()); }
  friend BasicRotation operator*(const BasicRotation& a, const BasicRotation& b) {
    return BasicRotation(a.matrix_ * b.matrix_);
  }

 private:
  Matrix matrix_;
  int determinant_ = 1;
};

using Subspace = BasicSubspace<double>;
using Rotation = BasicRotation<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Q_L, the form (a, b) -> <pi_L a, pi_L b>.
template <typename Scalar>
BasicSymTensor<Scalar> metric_on_subspace(const BasicSubspace<Scalar>& l) {
  BasicSymTensor<Scalar> q(l.ambient_dim(), 2);
  for (int j = 0; j < l.dim(); ++j) q += vector_power(l.basis().col(j), 2);
  return q;
}

/// (theta T)(x_1..x_p) = T(theta^{-1} x_1, ..., theta^{-1} x_p); accepts improper maps.
template <typename Scalar>
BasicSymTensor<Scalar> rotate(const BasicSymTensor<Scalar>& t, const BasicRotation<Scalar>& theta) {
  if (theta.dim() != t.ambient_dim()) throw DimensionError("rotate: dimension mismatch");
  return substitute(t, theta.matrix());
}

/// pi_L^* T for T given in the coordinates of L's orthonormal basis.
template <typename Scalar>
BasicSymTensor<Scalar> pullback(const BasicSymTensor<Scalar>& t_sub, const BasicSubspace<Scalar>& l) {
  if (t_sub.ambient_dim() != l.dim()) throw DimensionError("pullback: tensor must live on L's coordinates");
  return substitute(t_sub, l.basis());
}

/// Restriction i_L^* T written in the coordinates of L's orthonormal basis.
template <typename Scalar>
BasicSymTensor<Scalar> restrict_to(const BasicSymTensor<Scalar>& t, const BasicSubspace<Scalar>& l) {
  if (t.ambient_dim() != l.ambient_dim()) throw DimensionError("restrict_to: dimension mismatch");
  if (l.dim() == 0) throw DimensionError("restrict_to: cannot express a tensor on the zero subspace");
  return substitute(t, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(l.basis().transpose()));
}

}  // namespace mtl
