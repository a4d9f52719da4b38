#pragma once

// Pointwise tensor calculus of a Hessian structure in adapted affine
// transverse coordinates y^1..y^q. The flat connection D has identically
// vanishing Christoffel symbols in this chart, so every connection is
// represented by its Christoffel field, and the difference tensor of the
// Levi-Civita connection against D is the Levi-Civita field itself.
//
// For a potential phi with metric g_ij = d2 phi / dy^i dy^j:
//   gamma_ijk     = 1/2 d3 phi                     (totally symmetric)
//   Gamma^i_jk    = g^is gamma_sjk
//   Q_ijkl        = g_im d_k Gamma^m_jl            (route A)
//                 = 1/2 d4 phi_ijkl
//                   - 1/2 g^rs d3 phi_ikr d3 phi_jls   (route B)
//   R_ijkl        = 1/2 (Q_ijkl - Q_jikl)
//   alpha_i       = 1/2 d_i log det g = Gamma^r_ri
//   beta_ij       = d_j alpha_i = g^rt Q_trij
// Quantities with two formulas are computed by both routes and cross
// checked; disagreement raises RouteMismatchError.

#include <Eigen/Core>

#include <functional>
#include <utility>

#include "infogeo/diffops.hpp"
#include "infogeo/errors.hpp"
#include "infogeo/scalar_field.hpp"
#include "infogeo/tensor.hpp"

namespace infogeo {

struct HessianPoint {
  Vector y;
  ScalarField phi;
  Jet4 jet;  // jet of phi at y, order 4
};

/// Evaluates the jet of phi at y.
HessianPoint hessian_point(const ScalarField& phi, const Vector& y);

// Partial-derivative blocks of a jet, in tensor form.
Vector gradient_of(const Jet4& jet);
Matrix hessian_of(const Jet4& jet);
Tensor3 third_partials(const Jet4& jet);
Tensor4 fourth_partials(const Jet4& jet);

/// A metric field y -> g(y) with its first derivatives
/// dg(k,i,j) = d_k g_ij. Fields built from a potential differentiate
/// exactly through jets; generic fields fall back to Richardson-extrapolated
/// central differences.
struct MetricField {
  int dim = 0;
  std::function<Matrix(const Vector&)> value;
  std::function<Tensor3(const Vector&)> derivative;
};

MetricField metric_field(int dim, std::function<Matrix(const Vector&)> value);
MetricField metric_field_from_potential(const ScalarField& phi);

/// A connection as a Christoffel field Gamma(i,j,k) = Gamma^i_jk together
/// with its first derivatives dGamma(l,i,j,k) = d_l Gamma^i_jk. Fields
/// declared torsion-free assert Gamma(i,j,k) = Gamma(i,k,j) on every
/// evaluation; duals are never declared (their torsion is a diagnostic).
struct ConnectionField {
  int dim = 0;
  std::function<Tensor3(const Vector&)> christoffels;
  std::function<Tensor4(const Vector&)> derivative;
  bool flat = false;
  bool torsion_free = false;
};

ConnectionField flat_connection(int dim);
ConnectionField connection_field(int dim, std::function<Tensor3(const Vector&)> christoffels,
                                 bool declare_torsion_free = false);
/// Levi-Civita connection of a metric field (finite-difference derivative).
ConnectionField levi_civita_field(const MetricField& g);
/// Levi-Civita connection of a potential metric; Christoffels and their
/// derivatives both come exactly from the order-4 jet.
ConnectionField levi_civita_field(const ScalarField& phi);

/// g_ij = d2 phi. Throws NotMetricError (with the spectrum attached) if the
/// Hessian is not positive definite at y.
Matrix metric_from_potential(const HessianPoint& p);

/// max over i,j,k of |d_k g_ij - d_i g_kj| (Codazzi/Hessian necessary
/// condition). Exact zero for potential metrics by symmetry of third
/// partials; the field overload differentiates the given metric field.
double codazzi_symmetry_residual(const HessianPoint& p);
double codazzi_symmetry_residual(const MetricField& g, const Vector& y);

Tensor3 gamma_lower(const HessianPoint& p);   // gamma_ijk = 1/2 d3 phi
Tensor3 christoffel(const HessianPoint& p);   // Gamma^i_jk

/// Dual connection D' of c with respect to g:
/// X g(Y,Z) = g(c_X Y, Z) + g(Y, D'_X Z), solved componentwise as
/// g_is G'^s_kj = d_k g_ij - g_sj G^s_ki.
ConnectionField dual_of_connection(const ConnectionField& c, const MetricField& g);

Tensor3 connection_torsion(const ConnectionField& c, const Vector& y);  // T(i,j,k)=G(i,j,k)-G(i,k,j)

/// (D_k g)_ij = d_k g_ij - G^s_ki g_sj - G^s_kj g_is, returned as T(k,i,j).
Tensor3 covariant_metric_deriv(const ConnectionField& c, const MetricField& g, const Vector& y);

/// max |(D_i g)_jk - (D_j g)_ik| over all indices.
double codazzi_residual_general(const ConnectionField& c, const MetricField& g, const Vector& y);

/// R^i_jkl = d_k G^i_lj - d_l G^i_kj + G^i_ks G^s_lj - G^i_ls G^s_kj,
/// i.e. R(d_k, d_l) d_j = R^i_jkl d_i. Antisymmetric in (k,l).
Tensor4 connection_curvature(const ConnectionField& c, const Vector& y);

/// R_ijkl = g_is R^s_jkl (lowering on the first slot).
Tensor4 lower_curvature(const Tensor4& r_mixed, const Matrix& g);

/// max |g(R_D(X,Y)Z, W) + g(Z, R_D'(X,Y)W)| over coordinate frame vectors.
double curvature_duality_residual(const ConnectionField& d, const ConnectionField& d_dual,
                                  const MetricField& g, const Vector& y);

/// Q by both routes, cross-checked to `tol` relative; returns the closed
/// fourth-derivative form. Satisfies Q_ijkl = Q_klij = Q_kjil = Q_ilkj = Q_jilk.
/// If `residual_out` is given it receives the relative route disagreement.
Tensor4 hessian_curvature_Q(const HessianPoint& p, double tol = 1e-9,
                            double* residual_out = nullptr);

/// R_ijkl = 1/2 (Q_ijkl - Q_jikl).
Tensor4 riemann_from_Q(const Tensor4& q);

double volume_det(const Matrix& g);

/// First Koszul form, alpha_i = Gamma^r_ri, cross-checked against the
/// finite-difference derivative of 1/2 log det g.
Vector koszul_alpha(const HessianPoint& p, double tol = 1e-9, double* residual_out = nullptr);

/// Second Koszul form, beta_ij = g^rt Q_trij, cross-checked against the
/// finite-difference derivative of the exact alpha field. Symmetric.
Matrix koszul_beta(const HessianPoint& p, double tol = 1e-9, double* residual_out = nullptr);

/// lambda = tr(g^-1 beta)/q and the Einstein defect |beta - lambda g|_inf.
std::pair<double, double> einstein_check(const Matrix& g, const Matrix& beta);

/// Rayleigh quotient <Qhat(xi), xi> / <xi, xi> on symmetric contravariant
/// 2-tensors, <xi,eta> = g_ia g_jb xi^ij eta^ab. Throws ZeroTensorError.
double sectional_q(const Matrix& g, const Tensor4& q, const Matrix& xi);

/// Least-squares fit of Q ~ (c/2)(g_ij g_kl + g_il g_jk) over all q^4
/// components; returns (c, max-norm residual).
std::pair<double, double> constant_curvature_fit(const Matrix& g, const Tensor4& q);

struct HessianReport {
  Vector y;
  Matrix g;
  Matrix g_inv;
  Tensor3 gamma_lower;
  Tensor3 christoffel;
  Tensor4 Q;
  Tensor4 R;
  Vector alpha;
  Matrix beta;
  double c_fit = 0.0;
  double c_residual = 0.0;
  double einstein_lambda = 0.0;
  double einstein_residual = 0.0;
  // Self-check residuals (all relative to tensor scale, absolute floor 1).
  double codazzi_residual = 0.0;
  double q_route_residual = 0.0;
  double alpha_route_residual = 0.0;
  double beta_route_residual = 0.0;
  bool route_checks_ok = true;
};

/// Runs the whole calculus at one point, sharing a single jet. Route
/// mismatches are recorded in the flags rather than thrown; NotMetricError
/// propagates.
HessianReport full_report(const ScalarField& phi, const Vector& y, double route_tol = 1e-9);

}  // namespace infogeo
