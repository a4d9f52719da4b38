#include "doctest.h"

#include <Eigen/LU>

#include <cmath>
#include <random>
#include <thread>

#include "infogeo/fisher.hpp"
#include "test_fields.hpp"

using namespace infogeo;

namespace {

Vector point1(double a) { return Vector{{a}}; }
Vector point2(double a, double b) { return Vector{{a, b}}; }
Vector point3(double a, double b, double c) { return Vector{{a, b, c}}; }

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Two independent Bernoullis with theta1 = l1 + l2*l3, theta2 = l2. The
// parameter map is a submersion with a curved one-dimensional kernel, and
// the induced metric is NOT constant along it.
FamilySpec curved_kernel_family() {
  FamilySpec f;
  f.name = "curved-kernel-bernoulli-pair";
  f.param_dim = 3;
  f.param_names = {"l1", "l2", "l3"};
  f.axes = {finite_axis({0.0, 1.0}), finite_axis({0.0, 1.0})};
  f.log_density = ScalarField::from_callable(5, [](auto&& a) {
    using infogeo::exp;
    using infogeo::log;
    const auto& x1 = a[0];
    const auto& x2 = a[1];
    auto theta1 = a[2] + a[3] * a[4];
    const auto& theta2 = a[3];
    return x1 * theta1 - log(1.0 + exp(theta1)) + x2 * theta2 - log(1.0 + exp(theta2));
  });
  f.integration.method = Integration::Method::ExactSum;
  return f;
}

}  // namespace

TEST_CASE("bernoulli-logit Fisher at theta = 0 is 1/4") {
  FamilySpec f = bernoulli_logit_family();
  FisherResult outer = fisher_outer(f, point1(0.0));
  FisherResult hess = fisher_hess(f, point1(0.0));
  CHECK(outer.g(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(hess.g(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(outer.rank == 1);
  CHECK(outer.kernel.empty());
  CHECK(std::abs(outer.g(0, 0) - hess.g(0, 0)) <= 1e-12);
}

TEST_CASE("gaussian Fisher at sigma = 1 is diag(1, 2)") {
  FamilySpec f = gaussian_family();
  Vector lam = point2(0.3, 1.0);
  FisherResult outer = fisher_outer(f, lam);
  FisherResult hess = fisher_hess(f, lam);
  CHECK(outer.g(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(outer.g(1, 1) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::abs(outer.g(0, 1)) <= 1e-8);
  CHECK(max_abs(Matrix(outer.g - hess.g)) <= std::max(1e-10, 5.0 * outer.est_error));
  CHECK(outer.rank == 2);
}

TEST_CASE("exponential-rate Fisher is 1/rate^2") {
  FamilySpec f = exponential_rate_family();
  for (double rate : {0.5, 1.0, 2.5}) {
    FisherResult outer = fisher_outer(f, point1(rate));
    FisherResult hess = fisher_hess(f, point1(rate));
    double expect = 1.0 / (rate * rate);
    CHECK(outer.g(0, 0) == doctest::Approx(expect).epsilon(1e-8));
    CHECK(max_abs(Matrix(outer.g - hess.g)) <= std::max(1e-10, 5.0 * outer.est_error));
  }
}

TEST_CASE("categorical softmax Fisher is diag(p) - p p^T with the all-ones kernel") {
  const int k = 3;
  FamilySpec f = categorical_softmax_family(k);
  Vector theta = point3(0.2, -0.4, 0.9);
  FisherResult r = fisher_outer(f, theta);
  // Closed form.
  Vector p(k);
  double z = 0.0;
  for (int i = 0; i < k; ++i) z += std::exp(theta[i]);
  for (int i = 0; i < k; ++i) p[i] = std::exp(theta[i]) / z;
  Matrix expect = Matrix(p.asDiagonal()) - p * p.transpose();
  CHECK(max_abs(Matrix(r.g - expect)) <= 1e-12);
  REQUIRE(r.kernel.size() == 1);
  CHECK(std::abs(r.kernel[0].dot(Vector::Constant(k, 1.0 / std::sqrt(double(k))))) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.rank == k - 1);
}

TEST_CASE("degenerate reparam: rank 1 with kernel (1,-1)/sqrt(2)") {
  Matrix a(1, 2);
  a << 1.0, 1.0;
  FamilySpec f = linear_reparam(bernoulli_logit_family(), a);
  Vector lam = point2(0.3, -0.3);
  FisherResult r = fisher_outer(f, lam);
  double s = sigmoid(0.0) * (1.0 - sigmoid(0.0));  // 0.25 at l1 + l2 = 0
  Matrix expect(2, 2);
  expect << s, s, s, s;
  CHECK(max_abs(Matrix(r.g - expect)) <= 1e-13);
  auto [rank, kernel] = psd_and_kernel(r, 1e-9);
  CHECK(rank == 1);
  REQUIRE(kernel.size() == 1);
  CHECK(std::abs(kernel[0].dot(Vector{{1.0, -1.0}} / std::sqrt(2.0))) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("both Fisher forms agree across built-ins at random points") {
  std::mt19937_64 rng(2029);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> upos(0.6, 2.2);

  auto sample = [&](const FamilySpec& f) {
    Vector lam(f.param_dim);
    if (f.name == "gaussian") {
      lam[0] = u(rng);
      lam[1] = upos(rng);
    } else if (f.name == "exponential-rate") {
      lam[0] = upos(rng);
    } else {
      for (int i = 0; i < f.param_dim; ++i) lam[i] = u(rng);
    }
    return lam;
  };

  Matrix a(1, 2);
  a << 1.0, 1.0;
  std::vector<FamilySpec> corpus;
  corpus.push_back(bernoulli_logit_family());
  corpus.push_back(gaussian_family());
  corpus.push_back(categorical_softmax_family(3));
  corpus.push_back(exponential_rate_family());
  corpus.push_back(exp_family_bernoulli());
  corpus.push_back(exp_family_gaussian_location(2));
  corpus.push_back(linear_reparam(bernoulli_logit_family(), a));

  for (const FamilySpec& f : corpus) {
    for (int trial = 0; trial < 12; ++trial) {
      Vector lam = sample(f);
      FisherResult outer = fisher_outer(f, lam);
      FisherResult hess = fisher_hess(f, lam);
      double allowance = std::max(1e-10, 5.0 * std::max(outer.est_error, hess.est_error));
      INFO(f.name);
      CHECK(max_abs(Matrix(outer.g - hess.g)) <= allowance);
      CHECK(outer.psd_margin >= -1e-10 * std::max(1.0, max_abs(outer.g)));
    }
  }
}

TEST_CASE("normalization audit") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  std::uniform_real_distribution<double> upos(0.7, 2.0);
  FamilySpec gauss = gaussian_family();
  FamilySpec bern = bernoulli_logit_family();
  FamilySpec expo = exponential_rate_family();
  for (int trial = 0; trial < 10; ++trial) {
    CHECK(std::abs(normalization_mass(gauss, point2(u(rng), upos(rng))) - 1.0) <= 1e-10);
    CHECK(std::abs(normalization_mass(bern, point1(u(rng))) - 1.0) <= 1e-14);
    CHECK(std::abs(normalization_mass(expo, point1(upos(rng))) - 1.0) <= 1e-8);
  }
}

TEST_CASE("exponential-family bridge: Fisher metric equals Hess psi") {
  FamilySpec f = exp_family_bernoulli();
  ExprAst psi = ExprAst::parse("log(1+exp(t1))", {"t1"});
  ScalarField psi_field = psi.field();
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    Vector lam = point1(u(rng));
    Matrix hess_psi = hessian_of(jet_of(psi_field, lam));
    CHECK(max_abs(Matrix(fisher_outer(f, lam).g - hess_psi)) <= 1e-10);
    CHECK(max_abs(Matrix(fisher_hess(f, lam).g - hess_psi)) <= 1e-10);
  }

  FamilySpec g2 = exp_family_gaussian_location(2);
  for (int trial = 0; trial < 10; ++trial) {
    Vector lam = point2(u(rng), u(rng));
    CHECK(max_abs(Matrix(fisher_outer(g2, lam).g - Matrix::Identity(2, 2))) <= 1e-9);
    CHECK(max_abs(Matrix(fisher_hess(g2, lam).g - Matrix::Identity(2, 2))) <= 1e-9);
  }
}

TEST_CASE("linear reparametrization covariance") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  FamilySpec inner = gaussian_family();
  Matrix a(2, 3);
  a << 1.0, 0.4, -0.2, 0.0, 0.3, 0.5;
  FamilySpec outer = linear_reparam(inner, a);
  for (int trial = 0; trial < 5; ++trial) {
    Vector lam = point3(u(rng), u(rng), 2.4 + u(rng));  // keeps sigma = (A lam)_2 > 0
    Vector mu = a * lam;
    if (mu[1] < 0.4) continue;
    Matrix gi = fisher_outer(inner, mu).g;
    FisherResult ro = fisher_outer(outer, lam);
    CHECK(max_abs(Matrix(ro.g - a.transpose() * gi * a)) <=
          std::max(1e-9, 10.0 * ro.est_error));
    // Kernel contains null(A).
    Eigen::FullPivLU<Matrix> lu(a);
    Matrix null_space = lu.kernel();
    for (int c = 0; c < null_space.cols(); ++c) {
      Vector v = null_space.col(c).normalized();
      CHECK((ro.g * v).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("rank profile over grids") {
  Matrix a(1, 2);
  a << 1.0, 1.0;
  FamilySpec reparam = linear_reparam(bernoulli_logit_family(), a);
  std::vector<Vector> grid;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) grid.push_back(point2(-1.0 + 0.5 * i, -1.0 + 0.5 * j));
  RankProfile rp = rank_profile(reparam, grid);
  CHECK(rp.constant_rank);
  CHECK(rp.rank == 1);

  FamilySpec gauss = gaussian_family();
  std::vector<Vector> ggrid;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) ggrid.push_back(point2(-0.6 + 0.4 * i, 0.7 + 0.3 * j));
  RankProfile gp = rank_profile(gauss, ggrid);
  CHECK(gp.constant_rank);
  CHECK(gp.rank == 2);

  // A density that ignores its parameter has rank 0 everywhere.
  FamilySpec inert;
  inert.name = "inert";
  inert.param_dim = 1;
  inert.param_names = {"l1"};
  inert.axes = {finite_axis({0.0, 1.0})};
  inert.log_density = ScalarField::from_callable(2, [](auto&& v) {
    return (v[0] - v[0]) * v[1] + std::log(0.5);
  });
  inert.integration.method = Integration::Method::ExactSum;
  RankProfile ip = rank_profile(inert, {point1(-0.3), point1(0.8)});
  CHECK(ip.constant_rank);
  CHECK(ip.rank == 0);
}

TEST_CASE("rank profile reports deviating points") {
  FamilySpec f;
  f.name = "pinch";
  f.param_dim = 2;
  f.param_names = {"l1", "l2"};
  f.axes = {finite_axis({0.0, 1.0})};
  f.log_density = ScalarField::from_callable(3, [](auto&& v) {
    using infogeo::exp;
    using infogeo::log;
    auto theta = v[1] * v[2];
    return v[0] * theta - log(1.0 + exp(theta));
  });
  f.integration.method = Integration::Method::ExactSum;
  RankProfile rp = rank_profile(f, {point2(1.0, 1.0), point2(0.0, 0.0), point2(0.5, -0.5)});
  CHECK_FALSE(rp.constant_rank);
  CHECK(rp.rank == -1);
  REQUIRE(rp.deviating.size() == 1);
  CHECK(rp.deviating[0] == 1);  // the origin, where the score collapses
}

TEST_CASE("involutivity residual") {
  // Constant two-dimensional kernel: brackets vanish.
  Matrix a13(1, 3);
  a13 << 1.0, 1.0, 1.0;
  FamilySpec wide = linear_reparam(bernoulli_logit_family(), a13);
  CHECK(involutivity_residual(wide, point3(0.1, -0.2, 0.3)) <= 1e-10);

  // Nondegenerate family: empty frame, residual 0 by convention.
  CHECK(involutivity_residual(gaussian_family(), point2(0.0, 1.0)) == 0.0);

  // One-dimensional kernel: [K,K] = 0 automatically.
  Matrix a12(1, 2);
  a12 << 1.0, 1.0;
  FamilySpec narrow = linear_reparam(bernoulli_logit_family(), a12);
  CHECK(involutivity_residual(narrow, point2(0.4, -0.1)) == 0.0);
  CHECK(involutivity_residual(curved_kernel_family(), point3(0.2, 0.5, 0.3)) == 0.0);
}

TEST_CASE("rank drift is detected") {
  // theta = l1 * l2: the score direction collapses at the origin.
  FamilySpec f;
  f.name = "pinch";
  f.param_dim = 2;
  f.param_names = {"l1", "l2"};
  f.axes = {finite_axis({0.0, 1.0})};
  f.log_density = ScalarField::from_callable(3, [](auto&& v) {
    using infogeo::exp;
    using infogeo::log;
    auto theta = v[1] * v[2];
    return v[0] * theta - log(1.0 + exp(theta));
  });
  f.integration.method = Integration::Method::ExactSum;
  CHECK_THROWS_AS(involutivity_residual(f, point2(0.0, 0.0)), RankDriftError);
}

TEST_CASE("leafwise constancy residual") {
  Matrix a(1, 2);
  a << 1.0, 1.0;
  FamilySpec reparam = linear_reparam(bernoulli_logit_family(), a);
  CHECK(leafwise_constancy_residual(reparam, point2(0.3, -0.3)) <= 1e-9);

  CHECK(leafwise_constancy_residual(gaussian_family(), point2(0.1, 1.2)) == 0.0);

  // Curved-kernel family: degenerate but NOT foliated-metric; the residual
  // must clearly flag it.
  CHECK(leafwise_constancy_residual(curved_kernel_family(), point3(0.2, 0.5, 0.3)) > 1e-3);
}

TEST_CASE("transverse reduction") {
  Matrix a(1, 2);
  a << 1.0, 1.0;
  FamilySpec reparam = linear_reparam(bernoulli_logit_family(), a);
  TransverseReduction tr = transverse_reduce(reparam, point2(0.3, -0.3));
  CHECK(tr.reduced_g.rows() == 1);
  CHECK(tr.reduced_g(0, 0) == doctest::Approx(0.5).epsilon(1e-10));  // 2 * 0.25 along (1,1)/sqrt2
  CHECK(tr.codazzi_residual <= 1e-9);  // q = 1: trivially symmetric

  // Full-rank exponential family: reduction is the identity and the metric
  // is a Hessian metric, so the Codazzi residual vanishes.
  FamilySpec ef = exp_family_bernoulli();
  TransverseReduction tef = transverse_reduce(ef, point1(0.4));
  CHECK(tef.reduced_g.rows() == 1);
  CHECK(tef.codazzi_residual <= 1e-9);

  FamilySpec g2 = exp_family_gaussian_location(2);
  TransverseReduction tg2 = transverse_reduce(g2, point2(0.2, -0.4));
  CHECK(tg2.reduced_g.rows() == 2);
  CHECK(tg2.codazzi_residual <= 1e-7);

  // Gaussian in (mu, sigma): not Hessian in these coordinates; residual 2.
  TransverseReduction tg = transverse_reduce(gaussian_family(), point2(0.0, 1.0));
  CHECK(tg.reduced_g.rows() == 2);
  CHECK(tg.codazzi_residual == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("Monte Carlo integration is seeded and honest about error") {
  FamilySpec f = gaussian_family();
  f.integration.method = Integration::Method::MonteCarlo;
  f.integration.n = 40000;
  f.integration.seed = 99;
  Vector lam = point2(0.5, 1.0);
  FisherResult r1 = fisher_outer(f, lam);
  FisherResult r2 = fisher_outer(f, lam);
  CHECK(max_abs(Matrix(r1.g - r2.g)) == 0.0);  // same seed, same nodes
  CHECK(r1.method.find("monte-carlo") != std::string::npos);
  Matrix expect(2, 2);
  expect << 1.0, 0.0, 0.0, 2.0;
  CHECK(max_abs(Matrix(r1.g - expect)) <= 10.0 * r1.est_error);
  CHECK(r1.est_error > 1e-4);  // n^(-1/2) scaling, no false precision

  f.integration.seed = 100;
  FisherResult r3 = fisher_outer(f, lam);
  CHECK(max_abs(Matrix(r1.g - r3.g)) > 0.0);
}

TEST_CASE("constructor dimension checks") {
  ExprAst psi = ExprAst::parse("t1^2/2", {"t1"});
  CHECK_THROWS_AS(exp_family_natural(psi, {line_axis(), line_axis()}), DimensionError);
  Matrix bad(3, 2);
  bad.setZero();
  CHECK_THROWS_AS(linear_reparam(bernoulli_logit_family(), bad), DimensionError);
  CHECK_THROWS_AS(categorical_softmax_family(1), Error);
}

TEST_CASE("fisher evaluation is safe under data-parallel sweeps") {
  FamilySpec fam = gaussian_family();
  std::vector<Vector> grid;
  for (int i = 0; i < 8; ++i) grid.push_back(point2(-0.7 + 0.2 * i, 0.8 + 0.1 * i));
  std::vector<Matrix> serial;
  for (const Vector& lam : grid) serial.push_back(fisher_outer(fam, lam).g);
  std::vector<Matrix> parallel(grid.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < grid.size(); i += 4)
        parallel[i] = fisher_outer(fam, grid[i]).g;
    });
  }
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(max_abs(Matrix(serial[i] - parallel[i])) == 0.0);
}

TEST_CASE("psd_and_kernel rejects clearly indefinite input") {
  FisherResult fake;
  fake.g = Matrix(Vector{{1.0, -0.2}}.asDiagonal());
  fake.psd_margin = -0.2;
  CHECK_THROWS_AS(psd_and_kernel(fake, 1e-9), NotPSDError);
}
