#include "doctest.h"

#include <cmath>
#include <random>

#include "infogeo/hessian.hpp"
#include "test_fields.hpp"

using namespace infogeo;

namespace {

Vector point1(double a) { return Vector{{a}}; }
Vector point2(double a, double b) { return Vector{{a, b}}; }

double tensor_diff(const Tensor4& a, const Tensor4& b) {
  double d = 0.0;
  for (int i = 0; i < a.flat().size(); ++i) d = std::max(d, std::abs(a.flat()[i] - b.flat()[i]));
  return d;
}

double tensor_diff(const Tensor3& a, const Tensor3& b) {
  double d = 0.0;
  for (int i = 0; i < a.flat().size(); ++i) d = std::max(d, std::abs(a.flat()[i] - b.flat()[i]));
  return d;
}

// Random torsion-free Christoffel field, affine in y:
// Gamma^i_jk(y) = c0(i,j,k) + dlin(i,j,k,l) y_l, symmetric in (j,k).
ConnectionField random_connection(std::mt19937_64& rng, int q) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  Tensor3 c0(q);
  Tensor4 dlin(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = j; k < q; ++k) {
        double v = u(rng);
        c0(i, j, k) = c0(i, k, j) = v;
        for (int l = 0; l < q; ++l) {
          double w = u(rng);
          dlin(i, j, k, l) = w;
          dlin(i, k, j, l) = w;
        }
      }
  return connection_field(
      q,
      [q, c0, dlin](const Vector& y) {
        Tensor3 g(q);
        for (int i = 0; i < q; ++i)
          for (int j = 0; j < q; ++j)
            for (int k = 0; k < q; ++k) {
              double v = c0(i, j, k);
              for (int l = 0; l < q; ++l) v += dlin(i, j, k, l) * y[l];
              g(i, j, k) = v;
            }
        return g;
      },
      /*declare_torsion_free=*/true);
}

// Random analytic SPD metric field: g(y) = A(y) A(y)^T + 0.4 I with A affine.
MetricField random_metric(std::mt19937_64& rng, int q) {
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  Matrix a0(q, q);
  std::vector<Matrix> a1(q, Matrix(q, q));
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      a0(i, j) = u(rng) + (i == j ? 1.0 : 0.0);
      for (int k = 0; k < q; ++k) a1[k](i, j) = 0.5 * u(rng);
    }
  return metric_field(q, [q, a0, a1](const Vector& y) {
    Matrix a = a0;
    for (int k = 0; k < q; ++k) a += y[k] * a1[k];
    return Matrix(a * a.transpose() + 0.4 * Matrix::Identity(q, q));
  });
}

}  // namespace

TEST_CASE("metric from potential") {
  HessianPoint p = hessian_point(field_quadratic(3), Vector{{0.4, -1.0, 2.0}});
  CHECK(max_abs(Matrix(metric_from_potential(p) - Matrix::Identity(3, 3))) <= 1e-14);

  p = hessian_point(field_neg_log(1), point1(2.0));
  CHECK(metric_from_potential(p)(0, 0) == doctest::Approx(0.25).epsilon(1e-14));

  p = hessian_point(field_neg_log(2), point2(1.0, 2.0));
  Matrix g = metric_from_potential(p);
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(1, 1) == doctest::Approx(0.25));
  CHECK(g(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("indefinite Hessians raise NotMetricError with the spectrum") {
  auto saddle = ScalarField::from_callable(2, [](auto&& y) { return y[0] * y[1]; });
  HessianPoint p = hessian_point(saddle, point2(0.0, 0.0));
  try {
    metric_from_potential(p);
    FAIL("expected NotMetricError");
  } catch (const NotMetricError& e) {
    REQUIRE(e.spectrum.size() == 2);
    CHECK(e.spectrum[0] == doctest::Approx(-1.0));
    CHECK(e.spectrum[1] == doctest::Approx(1.0));
  }
}

TEST_CASE("Codazzi residual: potential metrics satisfy it exactly") {
  for (const ScalarField& phi : {field_neg_log(2), field_mixed(2), field_exp_sum(3)}) {
    HessianPoint p = hessian_point(phi, Vector::Constant(phi.arity(), 0.9));
    CHECK(codazzi_symmetry_residual(p) == 0.0);  // same jet coefficient both sides
  }
}

TEST_CASE("Codazzi residual: Gaussian Fisher metric in (mu, sigma) fails by 2") {
  // g = diag(1/s^2, 2/s^2): d_sigma g_mumu = -2/s^3 but d_mu g_sigmamu = 0.
  MetricField g = metric_field(2, [](const Vector& y) {
    double s = y[1];
    return Matrix(Vector{{1.0 / (s * s), 2.0 / (s * s)}}.asDiagonal());
  });
  CHECK(codazzi_symmetry_residual(g, point2(0.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-9));

  MetricField constant = metric_field(2, [](const Vector&) {
    return Matrix(Vector{{1.0, 2.0}}.asDiagonal());
  });
  CHECK(codazzi_symmetry_residual(constant, point2(0.3, 0.7)) <= 1e-12);
}

TEST_CASE("Christoffel symbols and the lowered difference tensor") {
  HessianPoint p = hessian_point(field_quadratic(2), point2(0.5, -0.5));
  CHECK(max_abs(gamma_lower(p)) <= 1e-14);
  CHECK(max_abs(christoffel(p)) <= 1e-14);

  p = hessian_point(field_neg_log(1), point1(2.0));
  CHECK(gamma_lower(p)(0, 0, 0) == doctest::Approx(-0.125).epsilon(1e-14));
  CHECK(christoffel(p)(0, 0, 0) == doctest::Approx(-0.5).epsilon(1e-14));

  auto fexp = field_exp_sum(1);
  p = hessian_point(fexp, point1(0.0));
  CHECK(gamma_lower(p)(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(christoffel(p)(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("dual connection: Levi-Civita is self-dual") {
  MetricField g = metric_field_from_potential(field_mixed(2));
  ConnectionField lc = levi_civita_field(g);
  ConnectionField dual = dual_of_connection(lc, g);
  Vector y = point2(0.2, -0.1);
  CHECK(tensor_diff(dual.christoffels(y), lc.christoffels(y)) <= 1e-11);
}

TEST_CASE("dual of the flat connection doubles the Levi-Civita symbols") {
  // D' = 2*nabla - D with D flat: for phi = -log y at y = 2,
  // Gamma'^1_11 = 2 * (-0.5) = -1.
  ScalarField phi = field_neg_log(1);
  MetricField g = metric_field_from_potential(phi);
  ConnectionField dual = dual_of_connection(flat_connection(1), g);
  CHECK(dual.christoffels(point1(2.0))(0, 0, 0) == doctest::Approx(-1.0).epsilon(1e-11));

  // And in general 2*nabla - 0 across a 2d potential.
  ScalarField phi2 = field_mixed(2);
  MetricField g2 = metric_field_from_potential(phi2);
  ConnectionField dual2 = dual_of_connection(flat_connection(2), g2);
  ConnectionField lc2 = levi_civita_field(phi2);
  Vector y = point2(0.4, 0.1);
  Tensor3 expect = lc2.christoffels(y);
  for (int i = 0; i < expect.flat().size(); ++i) expect.flat()[i] *= 2.0;
  CHECK(tensor_diff(dual2.christoffels(y), expect) <= 1e-11);
}

TEST_CASE("duality is an involution on random inputs") {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 10; ++trial) {
    int q = 2 + static_cast<int>(rng() % 2);
    ConnectionField gamma = random_connection(rng, q);
    MetricField g = random_metric(rng, q);
    ConnectionField once = dual_of_connection(gamma, g);
    ConnectionField twice = dual_of_connection(once, g);
    Vector y(q);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < q; ++i) y[i] = u(rng);
    CHECK(tensor_diff(twice.christoffels(y), gamma.christoffels(y)) <= 1e-9);
  }
}

TEST_CASE("torsion of the dual detects the Codazzi property") {
  // Positive case: Hessian metric, flat D. Codazzi holds, dual torsion-free.
  ScalarField phi = field_neg_log(1);
  MetricField g = metric_field_from_potential(phi);
  Vector y1 = point1(2.0);
  CHECK(codazzi_residual_general(flat_connection(1), g, y1) <= 1e-10);
  ConnectionField dual = dual_of_connection(flat_connection(1), g);
  CHECK(max_abs(connection_torsion(dual, y1)) <= 1e-10);

  ScalarField phi2 = field_mixed(2);
  MetricField g2 = metric_field_from_potential(phi2);
  Vector y2 = point2(0.1, 0.6);
  CHECK(codazzi_residual_general(flat_connection(2), g2, y2) <= 1e-10);
  CHECK(max_abs(connection_torsion(dual_of_connection(flat_connection(2), g2), y2)) <= 1e-10);

  // Negative case: the Gaussian Fisher metric in (mu, sigma) coordinates.
  MetricField gauss = metric_field(2, [](const Vector& p) {
    double s = p[1];
    return Matrix(Vector{{1.0 / (s * s), 2.0 / (s * s)}}.asDiagonal());
  });
  Vector at = point2(0.0, 1.0);
  CHECK(codazzi_residual_general(flat_connection(2), gauss, at) ==
        doctest::Approx(2.0).epsilon(1e-8));
  double dual_torsion = max_abs(connection_torsion(dual_of_connection(flat_connection(2), gauss), at));
  CHECK(dual_torsion == doctest::Approx(2.0).epsilon(1e-8));  // T^mu_(sigma mu) = -2/s
}

TEST_CASE("covariant metric derivative identities") {
  // Metricity: (D_k g) = 0 for the Levi-Civita connection.
  ScalarField phi = field_mixed(2);
  MetricField g = metric_field_from_potential(phi);
  ConnectionField lc = levi_civita_field(phi);
  Vector y = point2(0.3, -0.2);
  CHECK(max_abs(covariant_metric_deriv(lc, g, y)) <= 1e-10);

  // Hessian structure: (D_k g)_ij = 2 gamma_ijk for flat D.
  Tensor3 dg = covariant_metric_deriv(flat_connection(2), g, y);
  HessianPoint p = hessian_point(phi, y);
  Tensor3 gamma = gamma_lower(p);
  double diff = 0.0;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        diff = std::max(diff, std::abs(dg(k, i, j) - 2.0 * gamma(i, j, k)));
  CHECK(diff <= 1e-10);
}

TEST_CASE("declared torsion-free connections assert their symmetry") {
  ConnectionField bad = connection_field(
      2,
      [](const Vector&) {
        Tensor3 g(2);
        g(0, 0, 1) = 0.3;  // no matching g(0,1,0)
        return g;
      },
      /*declare_torsion_free=*/true);
  CHECK_THROWS_AS(bad.christoffels(Vector::Zero(2)), Error);

  ConnectionField honest = connection_field(2, [](const Vector&) {
    Tensor3 g(2);
    g(0, 0, 1) = 0.3;
    return g;
  });
  CHECK_NOTHROW(honest.christoffels(Vector::Zero(2)));
  CHECK(max_abs(connection_torsion(honest, Vector::Zero(2))) == doctest::Approx(0.3));
}

TEST_CASE("curvature of connection fields") {
  CHECK(max_abs(connection_curvature(flat_connection(3), Vector::Zero(3))) == 0.0);

  // The dual of the flat connection for a Hessian metric is flat.
  ScalarField phi = field_neg_log(2);
  MetricField g = metric_field_from_potential(phi);
  ConnectionField dual = dual_of_connection(flat_connection(2), g);
  CHECK(max_abs(connection_curvature(dual, point2(1.0, 2.0))) <= 1e-9);

  ScalarField phi2 = field_mixed(2);
  MetricField g2 = metric_field_from_potential(phi2);
  ConnectionField dual2 = dual_of_connection(flat_connection(2), g2);
  CHECK(max_abs(connection_curvature(dual2, point2(0.2, 0.5))) <= 1e-9);
}

TEST_CASE("curvature duality residual") {
  // Self-dual pair: the residual reduces to the pair symmetry of Riemann.
  ScalarField phi = field_mixed(2);
  MetricField g = metric_field_from_potential(phi);
  ConnectionField lc = levi_civita_field(phi);
  Vector y = point2(0.15, 0.35);
  CHECK(curvature_duality_residual(lc, lc, g, y) <= 1e-9);

  // Flat D with its dual: both curvatures vanish.
  ConnectionField dual = dual_of_connection(flat_connection(2), g);
  CHECK(curvature_duality_residual(flat_connection(2), dual, g, y) <= 1e-9);

  // Random torsion-free connections with their computed duals.
  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 5; ++trial) {
    int q = 2;
    ConnectionField d = random_connection(rng, q);
    MetricField rg = random_metric(rng, q);
    ConnectionField dd = dual_of_connection(d, rg);
    Vector at(q);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int i = 0; i < q; ++i) at[i] = u(rng);
    CHECK(curvature_duality_residual(d, dd, rg, at) <= 1e-7);
  }
}

TEST_CASE("Hessian curvature tensor by two routes") {
  HessianPoint p = hessian_point(field_quadratic(2), point2(0.7, -0.4));
  CHECK(max_abs(hessian_curvature_Q(p)) <= 1e-14);

  p = hessian_point(field_neg_log(1), point1(2.0));
  Tensor4 q = hessian_curvature_Q(p);
  CHECK(q(0, 0, 0, 0) == doctest::Approx(0.0625).epsilon(1e-12));  // 1/y^4

  // exp potential: 1/2 e^y - 1/2 e^{-y} e^{2y} = 0 identically.
  for (double y : {-0.5, 0.0, 1.2}) {
    p = hessian_point(field_exp_sum(1), point1(y));
    CHECK(max_abs(hessian_curvature_Q(p)) <= 1e-12);
  }
}

TEST_CASE("Q symmetries of the closed formula") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 1.4);
  for (const ScalarField& phi : {field_neg_log(3), field_mixed(3)}) {
    Vector y(3);
    for (int i = 0; i < 3; ++i) y[i] = u(rng);
    HessianPoint p = hessian_point(phi, y);
    Tensor4 q = hessian_curvature_Q(p);
    double res = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            res = std::max(res, std::abs(q(i, j, k, l) - q(k, l, i, j)));
            res = std::max(res, std::abs(q(i, j, k, l) - q(k, j, i, l)));
            res = std::max(res, std::abs(q(i, j, k, l) - q(i, l, k, j)));
            res = std::max(res, std::abs(q(i, j, k, l) - q(j, i, l, k)));
          }
    CHECK(res <= 1e-10);
  }
}

TEST_CASE("Riemann from Q matches the Levi-Civita curvature") {
  // 1d is always flat.
  HessianPoint p1 = hessian_point(field_neg_log(1), point1(1.3));
  CHECK(max_abs(riemann_from_Q(hessian_curvature_Q(p1))) <= 1e-13);

  // Product of exponentials: Q vanishes, so R does too.
  HessianPoint pe = hessian_point(field_exp_sum(2), point2(0.2, -0.3));
  CHECK(max_abs(riemann_from_Q(hessian_curvature_Q(pe))) <= 1e-12);

  // Non-product potential with genuinely nonzero curvature: compare against
  // the independently computed (finite-difference) Levi-Civita Riemann.
  for (const ScalarField& phi : {field_neg_log(2), field_mixed(2)}) {
    Vector y = phi.arity() == 2 ? point2(0.8, 1.5) : point1(1.0);
    HessianPoint p = hessian_point(phi, y);
    Matrix g = metric_from_potential(p);
    Tensor4 r_from_q = riemann_from_Q(hessian_curvature_Q(p));

    MetricField gf = metric_field_from_potential(phi);
    ConnectionField lc_generic = connection_field(2, levi_civita_field(gf).christoffels);
    Tensor4 lowered = lower_curvature(connection_curvature(lc_generic, y), g);
    CHECK(tensor_diff(r_from_q, lowered) <= 1e-9);

    // The jet-exact route agrees too.
    Tensor4 exact = lower_curvature(connection_curvature(levi_civita_field(phi), y), g);
    CHECK(tensor_diff(r_from_q, exact) <= 1e-11);
  }
}

TEST_CASE("mixed potential really is curved") {
  HessianPoint p = hessian_point(field_mixed(2), point2(0.8, 1.5));
  CHECK(max_abs(riemann_from_Q(hessian_curvature_Q(p))) > 1e-4);
}

TEST_CASE("Koszul forms by both routes") {
  HessianPoint p = hessian_point(field_quadratic(2), point2(0.4, 0.6));
  CHECK(koszul_alpha(p).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(max_abs(koszul_beta(p)) <= 1e-10);

  p = hessian_point(field_neg_log(1), point1(2.0));
  CHECK(koszul_alpha(p)[0] == doctest::Approx(-0.5).epsilon(1e-11));
  CHECK(koszul_beta(p)(0, 0) == doctest::Approx(0.25).epsilon(1e-10));

  p = hessian_point(field_exp_sum(1), point1(0.7));
  CHECK(koszul_alpha(p)[0] == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(max_abs(koszul_beta(p)) <= 1e-9);

  // Route checks hold on a dense potential as well.
  p = hessian_point(field_mixed(3), Vector{{0.2, 0.5, -0.1}});
  CHECK_NOTHROW(koszul_alpha(p, 1e-9));
  CHECK_NOTHROW(koszul_beta(p, 1e-9));
}

TEST_CASE("volume determinant") {
  CHECK(volume_det(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
  CHECK(volume_det(Matrix(Vector{{0.25, 4.0}}.asDiagonal())) == doctest::Approx(1.0));
}

TEST_CASE("Einstein factor") {
  HessianPoint p = hessian_point(field_neg_log(2), point2(1.0, 2.0));
  Matrix g = metric_from_potential(p);
  Matrix beta = koszul_beta(p);
  auto [lambda, res] = einstein_check(g, beta);
  CHECK(lambda == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(res <= 1e-10);

  p = hessian_point(field_quadratic(2), point2(0.0, 0.0));
  auto [l0, r0] = einstein_check(metric_from_potential(p), koszul_beta(p));
  CHECK(std::abs(l0) <= 1e-10);
  CHECK(r0 <= 1e-10);

  p = hessian_point(field_exp_sum(1), point1(0.9));
  auto [le, re] = einstein_check(metric_from_potential(p), koszul_beta(p));
  CHECK(std::abs(le) <= 1e-9);
  CHECK(re <= 1e-9);
}

TEST_CASE("sectional curvature and the constant-curvature fit") {
  // phi = -log y in one dimension: constant curvature 1.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double y : {0.5, 1.0, 2.0, 3.7}) {
    HessianPoint p = hessian_point(field_neg_log(1), point1(y));
    Matrix g = metric_from_potential(p);
    Tensor4 q = hessian_curvature_Q(p);
    auto [c, res] = constant_curvature_fit(g, q);
    CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res <= 1e-10);
    for (int trial = 0; trial < 100; ++trial) {
      Matrix xi(1, 1);
      xi << (trial == 0 ? 1.0 : u(rng));
      if (xi(0, 0) == 0.0) continue;
      CHECK(sectional_q(g, q, xi) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  // Quadratic potential: everything vanishes.
  HessianPoint pq = hessian_point(field_quadratic(2), point2(0.3, 0.4));
  Matrix gq = metric_from_potential(pq);
  Tensor4 qq = hessian_curvature_Q(pq);
  auto [c0, res0] = constant_curvature_fit(gq, qq);
  CHECK(std::abs(c0) <= 1e-12);
  CHECK(res0 <= 1e-12);
  Matrix xi(2, 2);
  xi << 1.0, 0.2, 0.2, -0.7;
  CHECK(std::abs(sectional_q(gq, qq, xi)) <= 1e-12);

  // Einstein does not imply constant curvature: the 2d log barrier.
  HessianPoint pl = hessian_point(field_neg_log(2), point2(1.0, 2.0));
  Matrix gl = metric_from_potential(pl);
  Tensor4 ql = hessian_curvature_Q(pl);
  auto [cl, resl] = constant_curvature_fit(gl, ql);
  (void)cl;
  CHECK(resl > 1e-3);  // Q_1122 = 0 but (c/2) g_11 g_22 != 0

  CHECK_THROWS_AS(sectional_q(gq, qq, Matrix::Zero(2, 2)), ZeroTensorError);
}

TEST_CASE("full report on the reference potentials") {
  HessianReport rep = full_report(field_neg_log(1), point1(2.0));
  CHECK(rep.route_checks_ok);
  CHECK(rep.g(0, 0) == doctest::Approx(0.25));
  CHECK(rep.Q(0, 0, 0, 0) == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(rep.c_fit == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.c_residual <= 1e-10);
  CHECK(rep.alpha[0] == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(rep.beta(0, 0) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(rep.codazzi_residual == 0.0);

  rep = full_report(field_neg_log(2), point2(1.0, 2.0));
  CHECK(rep.route_checks_ok);
  CHECK(rep.einstein_lambda == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.einstein_residual <= 1e-10);
  CHECK(rep.c_residual > 1e-3);

  CHECK_THROWS_AS(full_report(ScalarField::from_callable(2, [](auto&& y) { return y[0] * y[1]; }),
                              point2(0.0, 0.0)),
                  NotMetricError);
}

TEST_CASE("route mismatches flag the report instead of throwing") {
  // An unreachable tolerance marks every cross-check as failed while the
  // tensor fields stay populated.
  HessianReport rep = full_report(field_mixed(2), point2(0.3, 0.9), 1e-300);
  CHECK_FALSE(rep.route_checks_ok);
  CHECK(rep.q_route_residual > 0.0);
  CHECK(rep.alpha_route_residual > 0.0);
  CHECK(rep.beta_route_residual > 0.0);
  CHECK(rep.g.rows() == 2);
  CHECK(max_abs(rep.Q) > 0.0);

  // And the strict functions throw at the same tolerance.
  HessianPoint p = hessian_point(field_mixed(2), point2(0.3, 0.9));
  CHECK_THROWS_AS(koszul_alpha(p, 1e-300), RouteMismatchError);
  CHECK_THROWS_AS(koszul_beta(p, 1e-300), RouteMismatchError);
  CHECK_THROWS_AS(hessian_curvature_Q(p, 1e-300), RouteMismatchError);
}
