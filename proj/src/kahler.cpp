#include "infogeo/kahler.hpp"

#include <Eigen/LU>

#include <cmath>

namespace infogeo {

namespace {

// dg(k,i,j) and ddg(k,l,i,j) of the base metric by Richardson central
// differences of second-order jet evaluations.
struct MetricDerivs {
  Matrix g;
  Tensor3 dg;
  Tensor4 ddg;
};

MetricDerivs metric_derivs_fd(const ScalarField& phi, const Vector& y) {
  const int q = phi.arity();
  MetricDerivs out;
  out.g = hessian_of(jet_of(phi, y));
  out.dg = Tensor3(q);
  out.ddg = Tensor4(q);
  VectorFieldFn flat_g = [phi, q](const Vector& p) {
    Matrix m = hessian_of(jet_of(phi, p));
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(m.data(), q * q));
  };
  for (int k = 0; k < q; ++k) {
    Eigen::VectorXd d = field_partial(flat_g, y, k, kSmoothFieldStep);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) out.dg(k, i, j) = d[j * q + i];
  }
  for (int k = 0; k < q; ++k)
    for (int l = k; l < q; ++l) {
      Eigen::VectorXd d = field_second_partial(flat_g, y, k, l, fd_default_step(2));
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
          out.ddg(k, l, i, j) = d[j * q + i];
          out.ddg(l, k, i, j) = d[j * q + i];
        }
    }
  return out;
}

}  // namespace

KahlerPoint kahler_point(const ScalarField& phi, const Vector& y, const Vector& fiber) {
  if (fiber.size() != y.size()) throw DimensionError("fiber dimension must match the base");
  return KahlerPoint{hessian_point(phi, y), fiber};
}

Matrix kahler_metric(const KahlerPoint& kp) { return metric_from_potential(kp.base); }

Tensor4 kahler_curvature(const KahlerPoint& kp) {
  const int q = kp.base.jet.dim();
  MetricDerivs md = metric_derivs_fd(kp.base.phi, kp.base.y);
  Matrix ginv = sym_inverse(md.g);
  // Calibrated sign (see header): R^N_ijkl = 1/4 dd g_ij - 1/4 g^st dg_it dg_sj.
  Tensor4 r(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k)
        for (int l = 0; l < q; ++l) {
          double s = 0.25 * md.ddg(k, l, i, j);
          for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b)
              s -= 0.25 * ginv(a, b) * md.dg(k, i, b) * md.dg(l, a, j);
          r(i, j, k, l) = s;
        }
  return r;
}

Matrix kahler_ricci(const KahlerPoint& kp) {
  const int q = kp.base.jet.dim();
  const ScalarField phi = kp.base.phi;
  VectorFieldFn logdet = [phi](const Vector& p) {
    Eigen::VectorXd v(1);
    v[0] = std::log(hessian_of(jet_of(phi, p)).determinant());
    return v;
  };
  Matrix ric(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j) {
      double d = field_second_partial(logdet, kp.base.y, i, j, fd_default_step(2))[0];
      ric(i, j) = ric(j, i) = -0.25 * d;
    }
  return ric;
}

double holomorphic_sectional(const KahlerPoint& kp, const Eigen::VectorXcd& v) {
  const int q = kp.base.jet.dim();
  if (v.size() != q) throw DimensionError("direction dimension mismatch");
  if (v.norm() == 0.0) throw ZeroVectorError("holomorphic sectional curvature of zero vector");
  Tensor4 r = kahler_curvature(kp);
  Matrix g = kahler_metric(kp);
  std::complex<double> num = 0.0;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k)
        for (int l = 0; l < q; ++l)
          num += r(i, j, k, l) * v[i] * std::conj(v[j]) * v[k] * std::conj(v[l]);
  double s = 0.0;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) s += g(i, j) * std::real(v[i] * std::conj(v[j]));
  return -2.0 * std::real(num) / (s * s);
}

KahlerCheck kahler_checks(const ScalarField& phi, const Vector& y, const Vector& fiber,
                          double route_tol) {
  KahlerPoint kp = kahler_point(phi, y, fiber);
  const int q = phi.arity();
  KahlerCheck out;

  HessianPoint base = kp.base;
  Tensor4 q_tensor = hessian_curvature_Q(base, route_tol);
  Matrix beta = koszul_beta(base, route_tol);

  Tensor4 rn = kahler_curvature(kp);
  double rres = 0.0;
  for (int i = 0; i < q * q * q * q; ++i)
    rres = std::max(rres, std::abs(rn.flat()[i] - 0.5 * q_tensor.flat()[i]));
  out.r_residual = rres;

  Matrix ric = kahler_ricci(kp);
  out.ricci_residual = max_abs(Matrix(ric + 0.5 * beta));

  Eigen::VectorXcd v = Eigen::VectorXcd::Constant(q, std::complex<double>(1.0, 0.0) / std::sqrt(double(q)));
  out.holo_sectional = holomorphic_sectional(kp, v);
  return out;
}

}  // namespace infogeo
