#include "infogeo/tensor.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace infogeo {

EigenDecomp eig_sym(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("eig_sym needs a square matrix");
  if (!a.allFinite()) throw Error("eig_sym: non-finite entries");
  Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("eig_sym: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix sym_inverse(const Matrix& g, double tol) {
  EigenDecomp ed = eig_sym(g);
  const int q = static_cast<int>(ed.eigenvalues.size());
  double lmax = ed.eigenvalues[q - 1];
  double lmin = ed.eigenvalues[0];
  if (lmax <= 0.0 || lmin <= tol * lmax) {
    std::ostringstream os;
    os << "sym_inverse: spectrum not safely positive definite (min " << lmin << ", max " << lmax
       << ")";
    throw SingularError(os.str());
  }
  Matrix inv = ed.eigenvectors * ed.eigenvalues.cwiseInverse().asDiagonal() *
               ed.eigenvectors.transpose();
  return 0.5 * (inv + inv.transpose());
}

std::vector<Vector> kernel_basis(const Matrix& a, double tol_rel) {
  EigenDecomp ed = eig_sym(a);
  const int q = static_cast<int>(ed.eigenvalues.size());
  double scale = ed.eigenvalues.cwiseAbs().maxCoeff();
  double thr = std::max(tol_rel * scale, 1e-12);
  if (ed.eigenvalues[0] < -thr) {
    std::ostringstream os;
    os << "kernel_basis: eigenvalue " << ed.eigenvalues[0]
       << " is negative beyond tolerance " << thr;
    throw NotPSDError(os.str());
  }
  std::vector<Vector> kernel;
  for (int i = 0; i < q; ++i)
    if (ed.eigenvalues[i] <= thr) kernel.push_back(ed.eigenvectors.col(i));
  return kernel;
}

Tensor3 contract_slot(const Tensor3& t, const Matrix& m, int slot) {
  const int q = t.dim();
  if (m.rows() != q || m.cols() != q) throw DimensionError("contract_slot: dimension mismatch");
  if (slot < 0 || slot > 2) throw DimensionError("contract_slot: slot out of range for rank 3");
  Tensor3 out(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k) {
        double s = 0.0;
        for (int r = 0; r < q; ++r) {
          int a = slot == 0 ? r : i, b = slot == 1 ? r : j, c = slot == 2 ? r : k;
          int pick = slot == 0 ? i : slot == 1 ? j : k;
          s += m(pick, r) * t(a, b, c);
        }
        out(i, j, k) = s;
      }
  return out;
}

Tensor4 contract_slot(const Tensor4& t, const Matrix& m, int slot) {
  const int q = t.dim();
  if (m.rows() != q || m.cols() != q) throw DimensionError("contract_slot: dimension mismatch");
  if (slot < 0 || slot > 3) throw DimensionError("contract_slot: slot out of range for rank 4");
  Tensor4 out(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k)
        for (int l = 0; l < q; ++l) {
          double s = 0.0;
          for (int r = 0; r < q; ++r) {
            int a = slot == 0 ? r : i, b = slot == 1 ? r : j;
            int c = slot == 2 ? r : k, d = slot == 3 ? r : l;
            int pick = slot == 0 ? i : slot == 1 ? j : slot == 2 ? k : l;
            s += m(pick, r) * t(a, b, c, d);
          }
          out(i, j, k, l) = s;
        }
  return out;
}

}  // namespace infogeo
