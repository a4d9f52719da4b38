#include "infogeo/hessian.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <vector>

namespace infogeo {

namespace {

MultiIndex unit(int q, int i) {
  MultiIndex a(q, 0);
  a[i] += 1;
  return a;
}

MultiIndex unit2(int q, int i, int j) {
  MultiIndex a(q, 0);
  a[i] += 1;
  a[j] += 1;
  return a;
}

double rel_scale(double a, double b) { return std::max({a, b, 1.0}); }

}  // namespace

HessianPoint hessian_point(const ScalarField& phi, const Vector& y) {
  // The jet is evaluated before the aggregate is formed: gcc 11 leaks
  // partially constructed aggregates when a member initializer throws.
  Jet4 jet = jet_of(phi, y);
  return HessianPoint{y, phi, std::move(jet)};
}

Vector gradient_of(const Jet4& jet) {
  const int q = jet.dim();
  Vector g(q);
  for (int i = 0; i < q; ++i) g[i] = jet.partial(unit(q, i));
  return g;
}

Matrix hessian_of(const Jet4& jet) {
  const int q = jet.dim();
  Matrix h(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j) h(i, j) = h(j, i) = jet.partial(unit2(q, i, j));
  return h;
}

Tensor3 third_partials(const Jet4& jet) {
  const int q = jet.dim();
  Tensor3 t(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k) {
        MultiIndex a(q, 0);
        a[i] += 1;
        a[j] += 1;
        a[k] += 1;
        t(i, j, k) = jet.partial(a);
      }
  return t;
}

Tensor4 fourth_partials(const Jet4& jet) {
  const int q = jet.dim();
  Tensor4 t(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k)
        for (int l = 0; l < q; ++l) {
          MultiIndex a(q, 0);
          a[i] += 1;
          a[j] += 1;
          a[k] += 1;
          a[l] += 1;
          t(i, j, k, l) = jet.partial(a);
        }
  return t;
}

MetricField metric_field(int dim, std::function<Matrix(const Vector&)> value) {
  MetricField f;
  f.dim = dim;
  f.value = value;
  f.derivative = [dim, value](const Vector& y) {
    Tensor3 dg(dim);
    auto flatval = [&value, dim](const Vector& p) {
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(value(p).eval().data(), dim * dim));
    };
    for (int k = 0; k < dim; ++k) {
      Eigen::VectorXd d = field_partial(flatval, y, k, kSmoothFieldStep);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) dg(k, i, j) = d[j * dim + i];  // column-major map
    }
    return dg;
  };
  return f;
}

MetricField metric_field_from_potential(const ScalarField& phi) {
  const int q = phi.arity();
  MetricField f;
  f.dim = q;
  f.value = [phi](const Vector& y) { return hessian_of(jet_of(phi, y)); };
  f.derivative = [phi](const Vector& y) { return third_partials(jet_of(phi, y)); };
  return f;
}

ConnectionField flat_connection(int dim) {
  ConnectionField c;
  c.dim = dim;
  c.christoffels = [dim](const Vector&) { return Tensor3(dim); };
  c.derivative = [dim](const Vector&) { return Tensor4(dim); };
  c.flat = true;
  c.torsion_free = true;
  return c;
}

namespace {

// Declared symmetries are enforced at every evaluation.
std::function<Tensor3(const Vector&)> asserting_torsion_free(
    std::function<Tensor3(const Vector&)> fn) {
  return [fn](const Vector& y) {
    Tensor3 g = fn(y);
    const int q = g.dim();
    double scale = std::max(1.0, max_abs(g));
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        for (int k = j + 1; k < q; ++k)
          if (std::abs(g(i, j, k) - g(i, k, j)) > 1e-12 * scale)
            throw Error("connection declared torsion-free has asymmetric Christoffel symbols");
    return g;
  };
}

}  // namespace

ConnectionField connection_field(int dim, std::function<Tensor3(const Vector&)> christoffels,
                                 bool declare_torsion_free) {
  ConnectionField c;
  c.dim = dim;
  c.torsion_free = declare_torsion_free;
  if (declare_torsion_free) christoffels = asserting_torsion_free(std::move(christoffels));
  c.christoffels = christoffels;
  c.derivative = [dim, christoffels](const Vector& y) {
    Tensor4 dG(dim);
    auto flatval = [&christoffels](const Vector& p) { return christoffels(p).flat(); };
    for (int l = 0; l < dim; ++l) {
      Eigen::VectorXd d = field_partial(flatval, y, l, kSmoothFieldStep);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          for (int k = 0; k < dim; ++k) dG(l, i, j, k) = d[(i * dim + j) * dim + k];
    }
    return dG;
  };
  return c;
}

namespace {

Tensor3 levi_civita_at(const Matrix& g, const Tensor3& dg) {
  const int q = g.rows();
  Tensor3 gamma(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k)
        gamma(i, j, k) = 0.5 * (dg(k, i, j) + dg(j, i, k) - dg(i, j, k));
  return raise_index(gamma, sym_inverse(g), 0);
}

}  // namespace

ConnectionField levi_civita_field(const MetricField& g) {
  return connection_field(
      g.dim, [g](const Vector& y) { return levi_civita_at(g.value(y), g.derivative(y)); },
      /*declare_torsion_free=*/true);
}

ConnectionField levi_civita_field(const ScalarField& phi) {
  const int q = phi.arity();
  ConnectionField c;
  c.dim = q;
  c.torsion_free = true;
  c.christoffels = [phi](const Vector& y) {
    Jet4 jet = jet_of(phi, y);
    return levi_civita_at(hessian_of(jet), third_partials(jet));
  };
  // d_l Gamma^i_jk = -g^ia phi_abl Gamma^b_jk + 1/2 g^is phi_sjkl, all jet-exact.
  c.derivative = [phi, q](const Vector& y) {
    Jet4 jet = jet_of(phi, y);
    Matrix ginv = sym_inverse(hessian_of(jet));
    Tensor3 p3 = third_partials(jet);
    Tensor4 p4 = fourth_partials(jet);
    Tensor3 Gamma = levi_civita_at(hessian_of(jet), p3);
    Tensor4 dG(q);
    for (int l = 0; l < q; ++l)
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
          for (int k = 0; k < q; ++k) {
            double s = 0.0;
            for (int a = 0; a < q; ++a) {
              double m = 0.0;
              for (int b = 0; b < q; ++b) m += p3(a, b, l) * Gamma(b, j, k);
              s -= ginv(i, a) * m;
              s += 0.5 * ginv(i, a) * p4(a, j, k, l);
            }
            dG(l, i, j, k) = s;
          }
    return dG;
  };
  return c;
}

Matrix metric_from_potential(const HessianPoint& p) {
  Matrix g = hessian_of(p.jet);
  EigenDecomp ed = eig_sym(g);
  const int q = g.rows();
  double lmax = ed.eigenvalues[q - 1];
  if (lmax <= 0.0 || ed.eigenvalues[0] <= 1e-12 * lmax) {
    std::vector<double> spec(ed.eigenvalues.data(), ed.eigenvalues.data() + q);
    std::ostringstream os;
    os << "potential Hessian is not positive definite (min eigenvalue " << ed.eigenvalues[0]
       << ")";
    throw NotMetricError(os.str(), spec);
  }
  return g;
}

double codazzi_symmetry_residual(const HessianPoint& p) {
  Tensor3 dg = third_partials(p.jet);
  const int q = dg.dim();
  double r = 0.0;
  for (int k = 0; k < q; ++k)
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) r = std::max(r, std::abs(dg(k, i, j) - dg(i, k, j)));
  return r;
}

double codazzi_symmetry_residual(const MetricField& g, const Vector& y) {
  Tensor3 dg = g.derivative(y);
  const int q = g.dim;
  double r = 0.0;
  for (int k = 0; k < q; ++k)
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) r = std::max(r, std::abs(dg(k, i, j) - dg(i, k, j)));
  return r;
}

Tensor3 gamma_lower(const HessianPoint& p) {
  Tensor3 t = third_partials(p.jet);
  const int q = t.dim();
  Tensor3 gamma(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k) gamma(i, j, k) = 0.5 * t(i, j, k);
  return gamma;
}

Tensor3 christoffel(const HessianPoint& p) {
  return raise_index(gamma_lower(p), sym_inverse(metric_from_potential(p)), 0);
}

ConnectionField dual_of_connection(const ConnectionField& c, const MetricField& g) {
  if (c.dim != g.dim) throw DimensionError("dual_of_connection: dimension mismatch");
  const int q = c.dim;
  auto dual_at = [c, g, q](const Vector& y) {
    Matrix G = g.value(y);
    Matrix Ginv = sym_inverse(G);
    Tensor3 dg = g.derivative(y);
    Tensor3 Gamma = c.christoffels(y);
    Tensor3 dual(q);
    for (int k = 0; k < q; ++k)
      for (int j = 0; j < q; ++j) {
        Vector b(q);
        for (int i = 0; i < q; ++i) {
          double s = dg(k, i, j);
          for (int t = 0; t < q; ++t) s -= G(t, j) * Gamma(t, k, i);
          b[i] = s;
        }
        Vector x = Ginv * b;
        for (int s = 0; s < q; ++s) dual(s, k, j) = x[s];
      }
    return dual;
  };
  return connection_field(q, dual_at);
}

Tensor3 connection_torsion(const ConnectionField& c, const Vector& y) {
  Tensor3 G = c.christoffels(y);
  const int q = G.dim();
  Tensor3 t(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k) t(i, j, k) = G(i, j, k) - G(i, k, j);
  return t;
}

Tensor3 covariant_metric_deriv(const ConnectionField& c, const MetricField& g, const Vector& y) {
  const int q = c.dim;
  Matrix G = g.value(y);
  Tensor3 dg = g.derivative(y);
  Tensor3 Gamma = c.christoffels(y);
  Tensor3 out(q);
  for (int k = 0; k < q; ++k)
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        double s = dg(k, i, j);
        for (int t = 0; t < q; ++t) s -= Gamma(t, k, i) * G(t, j) + Gamma(t, k, j) * G(i, t);
        out(k, i, j) = s;
      }
  return out;
}

double codazzi_residual_general(const ConnectionField& c, const MetricField& g, const Vector& y) {
  Tensor3 Dg = covariant_metric_deriv(c, g, y);
  const int q = Dg.dim();
  double r = 0.0;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k) r = std::max(r, std::abs(Dg(i, j, k) - Dg(j, i, k)));
  return r;
}

Tensor4 connection_curvature(const ConnectionField& c, const Vector& y) {
  const int q = c.dim;
  Tensor3 G = c.christoffels(y);
  Tensor4 dG = c.derivative(y);
  Tensor4 r(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k)
        for (int l = 0; l < q; ++l) {
          double s = dG(k, i, l, j) - dG(l, i, k, j);
          for (int t = 0; t < q; ++t) s += G(i, k, t) * G(t, l, j) - G(i, l, t) * G(t, k, j);
          r(i, j, k, l) = s;
        }
  return r;
}

Tensor4 lower_curvature(const Tensor4& r_mixed, const Matrix& g) {
  return lower_index(r_mixed, g, 0);
}

double curvature_duality_residual(const ConnectionField& d, const ConnectionField& d_dual,
                                  const MetricField& g, const Vector& y) {
  const int q = d.dim;
  Matrix G = g.value(y);
  Tensor4 rd = connection_curvature(d, y);
  Tensor4 rdp = connection_curvature(d_dual, y);
  double res = 0.0;
  for (int w = 0; w < q; ++w)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k)
        for (int l = 0; l < q; ++l) {
          double s = 0.0;
          for (int i = 0; i < q; ++i) s += G(i, w) * rd(i, j, k, l) + G(j, i) * rdp(i, w, k, l);
          res = std::max(res, std::abs(s));
        }
  return res;
}

Tensor4 hessian_curvature_Q(const HessianPoint& p, double tol, double* residual_out) {
  const int q = p.jet.dim();
  Matrix g = metric_from_potential(p);
  Matrix ginv = sym_inverse(g);
  Tensor3 p3 = third_partials(p.jet);
  Tensor4 p4 = fourth_partials(p.jet);

  // Route B: closed fourth-derivative formula.
  Tensor4 qb(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k)
        for (int l = 0; l < q; ++l) {
          double s = 0.5 * p4(i, j, k, l);
          for (int r = 0; r < q; ++r)
            for (int t = 0; t < q; ++t) s -= 0.5 * ginv(r, t) * p3(i, k, r) * p3(j, l, t);
          qb(i, j, k, l) = s;
        }

  // Route A: lowered derivative of the raised difference tensor.
  ConnectionField lc = levi_civita_field(p.phi);
  Tensor4 dG = lc.derivative(p.y);
  Tensor4 qa(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k)
        for (int l = 0; l < q; ++l) {
          double s = 0.0;
          for (int m = 0; m < q; ++m) s += g(i, m) * dG(k, m, j, l);
          qa(i, j, k, l) = s;
        }

  double diff = 0.0;
  for (int i = 0; i < q * q * q * q; ++i) diff = std::max(diff, std::abs(qa.flat()[i] - qb.flat()[i]));
  double rel = diff / rel_scale(max_abs(qa), max_abs(qb));
  if (residual_out) *residual_out = rel;
  if (rel > tol) {
    std::ostringstream os;
    os << "Hessian curvature routes disagree: relative residual " << rel << " > " << tol;
    throw RouteMismatchError(os.str(), rel);
  }
  return qb;
}

Tensor4 riemann_from_Q(const Tensor4& q) {
  const int n = q.dim();
  Tensor4 r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) r(i, j, k, l) = 0.5 * (q(i, j, k, l) - q(j, i, k, l));
  return r;
}

double volume_det(const Matrix& g) { return g.determinant(); }

namespace {

// alpha_i = Gamma^r_ri from a jet; reused at stencil points for the beta
// finite-difference route.
Vector alpha_exact_at(const ScalarField& phi, const Vector& y) {
  Jet4 jet = jet_of(phi, y);
  Matrix g = hessian_of(jet);
  Tensor3 p3 = third_partials(jet);
  Tensor3 Gamma = levi_civita_at(g, p3);
  const int q = g.rows();
  Vector a = Vector::Zero(q);
  for (int i = 0; i < q; ++i)
    for (int r = 0; r < q; ++r) a[i] += Gamma(r, r, i);
  return a;
}

}  // namespace

Vector koszul_alpha(const HessianPoint& p, double tol, double* residual_out) {
  const int q = p.jet.dim();
  Vector exact = alpha_exact_at(p.phi, p.y);

  // Independent route: finite differences of 1/2 log det g.
  const ScalarField phi = p.phi;
  auto logdet = [phi](const Vector& y) {
    Eigen::VectorXd v(1);
    v[0] = std::log(hessian_of(jet_of(phi, y)).determinant());
    return v;
  };
  Vector fd(q);
  for (int i = 0; i < q; ++i) fd[i] = 0.5 * field_partial(logdet, p.y, i, kSmoothFieldStep)[0];

  double diff = (exact - fd).cwiseAbs().maxCoeff();
  double rel = diff / rel_scale(exact.cwiseAbs().maxCoeff(), fd.cwiseAbs().maxCoeff());
  if (residual_out) *residual_out = rel;
  if (rel > tol) {
    std::ostringstream os;
    os << "Koszul alpha routes disagree: relative residual " << rel << " > " << tol;
    throw RouteMismatchError(os.str(), rel);
  }
  return exact;
}

Matrix koszul_beta(const HessianPoint& p, double tol, double* residual_out) {
  const int q = p.jet.dim();
  Matrix g = metric_from_potential(p);
  Matrix ginv = sym_inverse(g);
  Tensor4 Q = hessian_curvature_Q(p, tol);

  // Trace route: beta_ij = g^rt Q_trij.
  Matrix beta(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      double s = 0.0;
      for (int r = 0; r < q; ++r)
        for (int t = 0; t < q; ++t) s += ginv(r, t) * Q(t, r, i, j);
      beta(i, j) = s;
    }

  // Derivative route: beta_ij = d_j alpha_i with alpha evaluated exactly.
  const ScalarField phi = p.phi;
  auto alpha_field = [phi](const Vector& y) { return alpha_exact_at(phi, y); };
  Matrix beta_fd(q, q);
  for (int j = 0; j < q; ++j) {
    Vector d = field_partial(alpha_field, p.y, j, kSmoothFieldStep);
    for (int i = 0; i < q; ++i) beta_fd(i, j) = d[i];
  }

  double diff = (beta - beta_fd).cwiseAbs().maxCoeff();
  double rel = diff / rel_scale(max_abs(beta), max_abs(beta_fd));
  if (residual_out) *residual_out = rel;
  if (rel > tol) {
    std::ostringstream os;
    os << "Koszul beta routes disagree: relative residual " << rel << " > " << tol;
    throw RouteMismatchError(os.str(), rel);
  }
  return 0.5 * (beta + beta.transpose());
}

std::pair<double, double> einstein_check(const Matrix& g, const Matrix& beta) {
  const int q = g.rows();
  double lambda = (sym_inverse(g) * beta).trace() / q;
  double residual = max_abs(Matrix(beta - lambda * g));
  return {lambda, residual};
}

double sectional_q(const Matrix& g, const Tensor4& q, const Matrix& xi_in) {
  const int n = g.rows();
  Matrix xi = 0.5 * (xi_in + xi_in.transpose());
  if (max_abs(xi) == 0.0) throw ZeroTensorError("sectional curvature of the zero tensor");
  double num = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) num += q(i, j, k, l) * xi(i, k) * xi(j, l);
  Matrix gx = g * xi;
  double den = (gx * gx).trace();
  if (den <= 0.0) throw ZeroTensorError("degenerate inner product for sectional curvature");
  return num / den;
}

std::pair<double, double> constant_curvature_fit(const Matrix& g, const Tensor4& q) {
  const int n = g.rows();
  double qb = 0.0, bb = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double b = g(i, j) * g(k, l) + g(i, l) * g(j, k);
          qb += q(i, j, k, l) * b;
          bb += b * b;
        }
  double c = 2.0 * qb / bb;
  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double b = g(i, j) * g(k, l) + g(i, l) * g(j, k);
          res = std::max(res, std::abs(q(i, j, k, l) - 0.5 * c * b));
        }
  return {c, res};
}

HessianReport full_report(const ScalarField& phi, const Vector& y, double route_tol) {
  HessianPoint p = hessian_point(phi, y);
  HessianReport rep;
  rep.y = y;
  rep.g = metric_from_potential(p);
  rep.g_inv = sym_inverse(rep.g);
  rep.gamma_lower = gamma_lower(p);
  rep.christoffel = christoffel(p);
  rep.codazzi_residual = codazzi_symmetry_residual(p);

  // Route mismatches flag the report instead of throwing.
  rep.Q = hessian_curvature_Q(p, 1e300, &rep.q_route_residual);
  rep.R = riemann_from_Q(rep.Q);
  rep.alpha = koszul_alpha(p, 1e300, &rep.alpha_route_residual);
  rep.beta = koszul_beta(p, 1e300, &rep.beta_route_residual);
  rep.route_checks_ok = rep.q_route_residual <= route_tol &&
                        rep.alpha_route_residual <= route_tol &&
                        rep.beta_route_residual <= route_tol;

  auto [lambda, eres] = einstein_check(rep.g, rep.beta);
  rep.einstein_lambda = lambda;
  rep.einstein_residual = eres;
  auto [c, cres] = constant_curvature_fit(rep.g, rep.Q);
  rep.c_fit = c;
  rep.c_residual = cres;
  return rep;
}

}  // namespace infogeo
