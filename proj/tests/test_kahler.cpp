#include "doctest.h"

#include <cmath>
#include <random>

#include "infogeo/kahler.hpp"
#include "test_fields.hpp"

using namespace infogeo;

namespace {

Vector point1(double a) { return Vector{{a}}; }
Vector point2(double a, double b) { return Vector{{a, b}}; }

}  // namespace

TEST_CASE("lifted metric depends only on the base point") {
  ScalarField phi = field_neg_log(1);
  KahlerPoint kp = kahler_point(phi, point1(2.0), point1(5.0));
  Matrix gn = kahler_metric(kp);
  CHECK(gn(0, 0) == doctest::Approx(0.25));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  ScalarField phi2 = field_mixed(2);
  Vector base = point2(0.4, -0.2);
  KahlerPoint ref = kahler_point(phi2, base, point2(0.0, 0.0));
  Matrix g_ref = kahler_metric(ref);
  Tensor4 r_ref = kahler_curvature(ref);
  Matrix ric_ref = kahler_ricci(ref);
  for (int trial = 0; trial < 10; ++trial) {
    KahlerPoint kp2 = kahler_point(phi2, base, point2(u(rng), u(rng)));
    CHECK(max_abs(Matrix(kahler_metric(kp2) - g_ref)) <= 1e-12);
    double rdiff = 0.0;
    Tensor4 r2 = kahler_curvature(kp2);
    for (int i = 0; i < r2.flat().size(); ++i)
      rdiff = std::max(rdiff, std::abs(r2.flat()[i] - r_ref.flat()[i]));
    CHECK(rdiff <= 1e-12);
    CHECK(max_abs(Matrix(kahler_ricci(kp2) - ric_ref)) <= 1e-12);
  }
}

TEST_CASE("quadratic potential lifts flat") {
  KahlerPoint kp = kahler_point(field_quadratic(2), point2(0.5, 0.8), point2(1.0, -2.0));
  CHECK(max_abs(Matrix(kahler_metric(kp) - Matrix::Identity(2, 2))) <= 1e-14);
  CHECK(max_abs(kahler_curvature(kp)) <= 1e-11);
  CHECK(max_abs(kahler_ricci(kp)) <= 1e-11);
}

TEST_CASE("reference example pins the sign convention") {
  // phi = -log y at y = 1: Q_1111 = 1, beta_11 = 1, so the lift must give
  // R^N_1111 = 1/2 and Ric_11 = -1/2.
  KahlerPoint kp = kahler_point(field_neg_log(1), point1(1.0), point1(0.3));
  CHECK(kahler_curvature(kp)(0, 0, 0, 0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(kahler_ricci(kp)(0, 0) == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("lifted curvature is half of Q and lifted Ricci is minus half beta") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.6, 1.8);
  std::uniform_real_distribution<double> uf(-2.0, 2.0);
  std::vector<ScalarField> potentials = {field_neg_log(2), field_exp_sum(2), field_mixed(2),
                                         field_neg_log(3)};
  for (const ScalarField& phi : potentials) {
    const int q = phi.arity();
    for (int trial = 0; trial < 5; ++trial) {
      Vector y(q), fiber(q);
      for (int i = 0; i < q; ++i) {
        y[i] = u(rng);
        fiber[i] = uf(rng);
      }
      KahlerCheck check = kahler_checks(phi, y, fiber);
      CHECK(check.r_residual <= 1e-8);
      CHECK(check.ricci_residual <= 1e-8);
    }
  }
}

TEST_CASE("holomorphic sectional curvature of the -log lift is -1") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double y : {0.5, 1.0, 2.0}) {
    KahlerPoint kp = kahler_point(field_neg_log(1), point1(y), point1(0.0));
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXcd v(1);
      v[0] = std::complex<double>(u(rng), u(rng));
      if (std::abs(v[0]) < 1e-3) continue;
      CHECK(holomorphic_sectional(kp, v) == doctest::Approx(-1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("holomorphic sectional curvature of flat lifts is 0") {
  KahlerPoint kp = kahler_point(field_quadratic(2), point2(0.1, 0.2), point2(0.0, 0.0));
  Eigen::VectorXcd v(2);
  v[0] = std::complex<double>(1.0, 0.5);
  v[1] = std::complex<double>(-0.3, 0.8);
  CHECK(std::abs(holomorphic_sectional(kp, v)) <= 1e-10);

  // c = 0 case: sum of exponentials.
  KahlerPoint ke = kahler_point(field_exp_sum(2), point2(0.4, -0.6), point2(0.0, 0.0));
  CHECK(std::abs(holomorphic_sectional(ke, v)) <= 1e-9);

  CHECK_THROWS_AS(holomorphic_sectional(kp, Eigen::VectorXcd::Zero(2)), ZeroVectorError);
}

TEST_CASE("space form at c = 0: sum-of-exponentials base is Riemann-flat") {
  Vector y = point2(0.3, -0.8);
  HessianPoint p = hessian_point(field_exp_sum(2), y);
  Tensor4 r = riemann_from_Q(hessian_curvature_Q(p));
  CHECK(max_abs(r) <= 1e-9);

  MetricField gf = metric_field_from_potential(field_exp_sum(2));
  ConnectionField lc = levi_civita_field(gf);
  Tensor4 lowered = lower_curvature(connection_curvature(lc, y), metric_from_potential(p));
  CHECK(max_abs(lowered) <= 1e-9);
}

TEST_CASE("Kahler condition equals the base Codazzi residual") {
  // For a potential metric the lifted metric is Kahler; the obstruction
  // d_k g^N_ij - d_i g^N_kj is exactly the base Codazzi residual.
  HessianPoint p = hessian_point(field_mixed(2), point2(0.1, 0.4));
  CHECK(codazzi_symmetry_residual(p) == 0.0);
}
