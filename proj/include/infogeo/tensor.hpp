#pragma once

// Small dense tensors of rank 3 and 4 plus the symmetric-matrix index
// algebra the curvature formulas need: inversion, eigendecomposition,
// kernel extraction, raising/lowering. Dimensions stay small (q <= 16),
// so everything is direct dense arithmetic on top of Eigen.

#include <Eigen/Core>

#include <vector>

#include "infogeo/errors.hpp"

namespace infogeo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

template <typename Scalar>
class Tensor3T {
 public:
  Tensor3T() = default;
  explicit Tensor3T(int dim) : dim_(dim), v_(Eigen::VectorX<Scalar>::Zero(dim * dim * dim)) {}

  int dim() const { return dim_; }
  Scalar& operator()(int i, int j, int k) { return v_[(i * dim_ + j) * dim_ + k]; }
  Scalar operator()(int i, int j, int k) const { return v_[(i * dim_ + j) * dim_ + k]; }

  Eigen::VectorX<Scalar>& flat() { return v_; }
  const Eigen::VectorX<Scalar>& flat() const { return v_; }

 private:
  int dim_ = 0;
  Eigen::VectorX<Scalar> v_;
};

template <typename Scalar>
class Tensor4T {
 public:
  Tensor4T() = default;
  explicit Tensor4T(int dim)
      : dim_(dim), v_(Eigen::VectorX<Scalar>::Zero(dim * dim * dim * dim)) {}

  int dim() const { return dim_; }
  Scalar& operator()(int i, int j, int k, int l) {
    return v_[((i * dim_ + j) * dim_ + k) * dim_ + l];
  }
  Scalar operator()(int i, int j, int k, int l) const {
    return v_[((i * dim_ + j) * dim_ + k) * dim_ + l];
  }

  Eigen::VectorX<Scalar>& flat() { return v_; }
  const Eigen::VectorX<Scalar>& flat() const { return v_; }

 private:
  int dim_ = 0;
  Eigen::VectorX<Scalar> v_;
};

using Tensor3 = Tensor3T<double>;
using Tensor4 = Tensor4T<double>;

inline double max_abs(const Tensor3& t) { return t.dim() ? t.flat().cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const Tensor4& t) { return t.dim() ? t.flat().cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Eigenvalues ascending, eigenvectors orthonormal in matching columns.
struct EigenDecomp {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Deterministic symmetric eigendecomposition (same input bits give the
/// same output bits). Input is symmetrized before factoring.
EigenDecomp eig_sym(const Matrix& a);

/// Inverse of a symmetric positive definite matrix via its spectrum.
/// Throws SingularError if min eigenvalue <= tol * max eigenvalue.
Matrix sym_inverse(const Matrix& g, double tol = 1e-12);

/// Orthonormal basis of the near-null space of a PSD matrix: eigenvectors
/// with eigenvalue <= max(tol_rel * max_eigenvalue, 1e-12). Throws
/// NotPSDError if some eigenvalue < -max(tol_rel * scale, 1e-12).
std::vector<Vector> kernel_basis(const Matrix& a, double tol_rel = 1e-9);

/// Contracts a metric (or inverse metric) against one slot:
/// out has m at the contracted slot, out(..m..) = sum_i M(m,i) T(..i..).
/// Slots are 0-based. With M = g^-1 this raises the index; with M = g it
/// lowers it again.
Tensor3 contract_slot(const Tensor3& t, const Matrix& m, int slot);
Tensor4 contract_slot(const Tensor4& t, const Matrix& m, int slot);

inline Tensor3 raise_index(const Tensor3& t, const Matrix& g_inv, int slot) {
  return contract_slot(t, g_inv, slot);
}
inline Tensor4 raise_index(const Tensor4& t, const Matrix& g_inv, int slot) {
  return contract_slot(t, g_inv, slot);
}
inline Tensor3 lower_index(const Tensor3& t, const Matrix& g, int slot) {
  return contract_slot(t, g, slot);
}
inline Tensor4 lower_index(const Tensor4& t, const Matrix& g, int slot) {
  return contract_slot(t, g, slot);
}

}  // namespace infogeo
