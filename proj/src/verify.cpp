#include "infogeo/verify.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <sstream>

#include "infogeo/diffops.hpp"
#include "infogeo/expr.hpp"
#include "infogeo/fisher.hpp"
#include "infogeo/hessian.hpp"
#include "infogeo/kahler.hpp"

namespace infogeo {

namespace {

using RNG = std::mt19937_64;

Vector vec1(double a) { return Vector{{a}}; }
Vector vec2(double a, double b) { return Vector{{a, b}}; }

double tensor_diff(const Tensor4& a, const Tensor4& b) {
  double d = 0.0;
  for (int i = 0; i < a.flat().size(); ++i) d = std::max(d, std::abs(a.flat()[i] - b.flat()[i]));
  return d;
}

// ---------------------------------------------------------------------------
// Corpora
// ---------------------------------------------------------------------------

struct PotentialSample {
  ScalarField phi;
  Vector y;
  std::string desc;
};

// Built-in potentials at domain-valid probe points.
std::vector<PotentialSample> builtin_potentials() {
  std::vector<PotentialSample> out;
  auto quadratic = [](int q) {
    return ScalarField::from_callable(q, [q](auto&& y) {
      auto acc = 0.5 * y[0] * y[0];
      for (int i = 1; i < q; ++i) acc += 0.5 * y[i] * y[i];
      return acc;
    });
  };
  auto neg_log = [](int q) {
    return ScalarField::from_callable(q, [q](auto&& y) {
      auto acc = -log(y[0]);
      for (int i = 1; i < q; ++i) acc -= log(y[i]);
      return acc;
    });
  };
  auto exp_sum = [](int q) {
    return ScalarField::from_callable(q, [q](auto&& y) {
      auto acc = exp(y[0]);
      for (int i = 1; i < q; ++i) acc += exp(y[i]);
      return acc;
    });
  };
  auto mixed = [](int q) {
    return ScalarField::from_callable(q, [q](auto&& y) {
      auto acc = exp(y[0]) - log(y[0] + 3.0);
      for (int i = 1; i < q; ++i) acc += exp(y[i]) - log(y[i] + 3.0) + 0.25 * y[i - 1] * y[i];
      return acc;
    });
  };
  out.push_back({quadratic(2), vec2(0.3, -0.8), "quadratic q=2"});
  out.push_back({neg_log(1), vec1(2.0), "-log y, y=2"});
  out.push_back({neg_log(1), vec1(0.6), "-log y, y=0.6"});
  out.push_back({neg_log(2), vec2(1.0, 2.0), "-log -log, (1,2)"});
  out.push_back({neg_log(3), Vector{{0.7, 1.3, 2.1}}, "-log^3"});
  out.push_back({exp_sum(1), vec1(0.4), "exp, q=1"});
  out.push_back({exp_sum(2), vec2(0.2, -0.5), "exp sum q=2"});
  out.push_back({mixed(2), vec2(0.3, 0.9), "mixed q=2"});
  out.push_back({mixed(3), Vector{{0.1, 0.5, -0.2}}, "mixed q=3"});
  return out;
}

// Random degree-<=4 polynomial potentials restricted to points where the
// Hessian is safely positive definite.
std::vector<PotentialSample> random_polynomials(RNG& rng, int count) {
  std::uniform_real_distribution<double> coef(-0.5, 0.5);
  std::uniform_real_distribution<double> ridge(0.8, 1.6);
  std::uniform_real_distribution<double> upoint(-0.7, 0.7);
  std::vector<PotentialSample> out;
  while (static_cast<int>(out.size()) < count) {
    const int q = 1 + static_cast<int>(rng() % 3);
    std::vector<std::pair<double, MultiIndex>> terms;
    for (int t = 0; t < 8; ++t) {
      MultiIndex e(q, 0);
      int degree = 1 + static_cast<int>(rng() % 4);
      for (int d = 0; d < degree; ++d) e[rng() % q] += 1;
      terms.emplace_back(coef(rng), e);
    }
    double a = ridge(rng);
    auto phi = ScalarField::from_callable(q, [terms, q, a](auto&& v) {
      using S = std::remove_cvref_t<decltype(v[0])>;
      S acc = 0.5 * a * v[0] * v[0];
      for (int i = 1; i < q; ++i) acc += 0.5 * a * v[i] * v[i];
      for (const auto& [c, e] : terms) {
        S mono = v[0] * 0.0 + c;
        for (int i = 0; i < q; ++i)
          for (int k = 0; k < e[i]; ++k) mono = mono * v[i];
        acc += mono;
      }
      return acc;
    });
    Vector y(q);
    for (int i = 0; i < q; ++i) y[i] = upoint(rng);
    Matrix h = hessian_of(jet_of(phi, y));
    EigenDecomp ed = eig_sym(h);
    if (ed.eigenvalues[0] < 0.08 * std::max(1.0, ed.eigenvalues[q - 1])) continue;
    std::ostringstream os;
    os << "poly q=" << q << " #" << out.size();
    out.push_back({phi, y, os.str()});
  }
  return out;
}

std::vector<FamilySpec> builtin_families() {
  Matrix a(1, 2);
  a << 1.0, 1.0;
  std::vector<FamilySpec> out;
  out.push_back(bernoulli_logit_family());
  out.push_back(gaussian_family());
  out.push_back(categorical_softmax_family(3));
  out.push_back(exponential_rate_family());
  out.push_back(exp_family_bernoulli());
  out.push_back(exp_family_gaussian_location(2));
  out.push_back(linear_reparam(bernoulli_logit_family(), a));
  return out;
}

Vector random_lambda(const FamilySpec& f, RNG& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> upos(0.6, 2.2);
  Vector lam(f.param_dim);
  for (int i = 0; i < f.param_dim; ++i) lam[i] = u(rng);
  if (f.name == "gaussian") lam[1] = upos(rng);
  if (f.name == "exponential-rate") lam[0] = upos(rng);
  return lam;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

using SuiteFn = SuiteResult (*)(RNG&);

SuiteResult suite_fisher_identity(RNG& rng) {
  SuiteResult s{"fisher_identity", 0.0, 1.0, true, "ratio to max(1e-10, 5 est_error)"};
  for (const FamilySpec& f : builtin_families()) {
    for (int trial = 0; trial < 50; ++trial) {
      Vector lam = random_lambda(f, rng);
      FisherResult outer = fisher_outer(f, lam);
      FisherResult hess = fisher_hess(f, lam);
      double allow = std::max(1e-10, 5.0 * std::max(outer.est_error, hess.est_error));
      s.max_residual = std::max(s.max_residual, max_abs(Matrix(outer.g - hess.g)) / allow);
    }
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_fisher_psd(RNG& rng) {
  SuiteResult s{"fisher_psd", 0.0, 1.0, true, "ratio of -min eigenvalue to 1e-10 |g|"};
  for (const FamilySpec& f : builtin_families()) {
    for (int trial = 0; trial < 50; ++trial) {
      Vector lam = random_lambda(f, rng);
      FisherResult r = fisher_outer(f, lam);
      double ratio = std::max(0.0, -r.psd_margin) / (1e-10 * std::max(max_abs(r.g), 1e-12));
      s.max_residual = std::max(s.max_residual, ratio);
    }
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_expfam_bridge(RNG& rng) {
  SuiteResult s{"expfam_bridge", 0.0, 1e-9, true, "Fisher vs Hess psi, 20 points"};
  std::uniform_real_distribution<double> u(-1.5, 1.5);

  FamilySpec bern = exp_family_bernoulli();
  ScalarField psi1 = ExprAst::parse("log(1+exp(t1))", {"t1"}).field();
  for (int trial = 0; trial < 10; ++trial) {
    Vector lam = vec1(u(rng));
    Matrix h = hessian_of(jet_of(psi1, lam));
    s.max_residual = std::max(s.max_residual, max_abs(Matrix(fisher_outer(bern, lam).g - h)));
    s.max_residual = std::max(s.max_residual, max_abs(Matrix(fisher_hess(bern, lam).g - h)));
  }

  FamilySpec gl = exp_family_gaussian_location(2);
  ScalarField psi2 = ExprAst::parse("t1^2/2+t2^2/2", {"t1", "t2"}).field();
  for (int trial = 0; trial < 10; ++trial) {
    Vector lam = vec2(u(rng), u(rng));
    Matrix h = hessian_of(jet_of(psi2, lam));
    s.max_residual = std::max(s.max_residual, max_abs(Matrix(fisher_outer(gl, lam).g - h)));
    s.max_residual = std::max(s.max_residual, max_abs(Matrix(fisher_hess(gl, lam).g - h)));
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_degenerate_kernel(RNG&) {
  SuiteResult s{"degenerate_kernel", 0.0, 1e-9, true,
                "rank 1, kernel (1,-1)/sqrt2, involutivity, leafwise, 5x5 grid"};
  Matrix a(1, 2);
  a << 1.0, 1.0;
  FamilySpec f = linear_reparam(bernoulli_logit_family(), a);
  Vector axis = Vector{{1.0, -1.0}} / std::sqrt(2.0);
  for (int i = 0; i < 5 && s.pass; ++i)
    for (int j = 0; j < 5; ++j) {
      Vector lam = vec2(-1.0 + 0.5 * i, -1.0 + 0.5 * j);
      auto [rank, kernel] = psd_and_kernel(fisher_outer(f, lam), 1e-9);
      if (rank != 1 || kernel.size() != 1) {
        s.pass = false;
        s.note = "rank != 1 on the grid";
        s.max_residual = 1.0;
        break;
      }
      s.max_residual = std::max(s.max_residual, std::abs(1.0 - std::abs(kernel[0].dot(axis))));
      s.max_residual = std::max(s.max_residual, involutivity_residual(f, lam, 1e-9));
      s.max_residual = std::max(s.max_residual, leafwise_constancy_residual(f, lam, 1e-9));
    }
  s.pass = s.pass && s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_q_routes(RNG& rng) {
  SuiteResult s{"q_routes", 0.0, 1e-9, true, "built-ins + 100 random polynomials"};
  auto corpus = builtin_potentials();
  auto polys = random_polynomials(rng, 100);
  corpus.insert(corpus.end(), polys.begin(), polys.end());
  for (const PotentialSample& ps : corpus) {
    double residual = 0.0;
    hessian_curvature_Q(hessian_point(ps.phi, ps.y), 1e300, &residual);
    s.max_residual = std::max(s.max_residual, residual);
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_q_symmetries(RNG& rng) {
  SuiteResult s{"q_symmetries", 0.0, 1e-10, true, "Q_ijkl = Q_klij = Q_kjil = Q_ilkj = Q_jilk"};
  auto corpus = builtin_potentials();
  auto polys = random_polynomials(rng, 100);
  corpus.insert(corpus.end(), polys.begin(), polys.end());
  for (const PotentialSample& ps : corpus) {
    Tensor4 q = hessian_curvature_Q(hessian_point(ps.phi, ps.y), 1e300);
    const int n = q.dim();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double v = q(i, j, k, l);
            s.max_residual = std::max({s.max_residual, std::abs(v - q(k, l, i, j)),
                                       std::abs(v - q(k, j, i, l)), std::abs(v - q(i, l, k, j)),
                                       std::abs(v - q(j, i, l, k))});
          }
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_riemann_from_q(RNG& rng) {
  SuiteResult s{"riemann_from_q", 0.0, 1e-9, true,
                "R = (Q - Q^T)/2 vs finite-difference Levi-Civita Riemann"};
  auto corpus = builtin_potentials();
  auto polys = random_polynomials(rng, 100);
  corpus.insert(corpus.end(), polys.begin(), polys.end());
  for (const PotentialSample& ps : corpus) {
    HessianPoint p = hessian_point(ps.phi, ps.y);
    Matrix g = metric_from_potential(p);
    Tensor4 r_q = riemann_from_Q(hessian_curvature_Q(p, 1e300));
    MetricField gf = metric_field_from_potential(ps.phi);
    ConnectionField lc = connection_field(gf.dim, levi_civita_field(gf).christoffels);
    Tensor4 r_lc = lower_curvature(connection_curvature(lc, ps.y), g);
    double scale = std::max({max_abs(r_q), max_abs(r_lc), 1.0});
    s.max_residual = std::max(s.max_residual, tensor_diff(r_q, r_lc) / scale);
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_dual_flatness(RNG&) {
  SuiteResult s{"dual_flatness", 0.0, 1e-9, true, "curvature of 2 nabla - D vanishes"};
  for (const PotentialSample& ps : builtin_potentials()) {
    MetricField g = metric_field_from_potential(ps.phi);
    ConnectionField dual = dual_of_connection(flat_connection(g.dim), g);
    s.max_residual = std::max(s.max_residual, max_abs(connection_curvature(dual, ps.y)));
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

// Random torsion-free Christoffel field, affine in y.
ConnectionField random_connection(RNG& rng, int q) {
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

MetricField random_metric(RNG& rng, int q) {
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

SuiteResult suite_dual_involution(RNG& rng) {
  SuiteResult s{"dual_involution", 0.0, 1e-9, true, "dual(dual(Gamma)) = Gamma, random inputs"};
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    int q = 2 + static_cast<int>(rng() % 2);
    ConnectionField gamma = random_connection(rng, q);
    MetricField g = random_metric(rng, q);
    ConnectionField twice = dual_of_connection(dual_of_connection(gamma, g), g);
    Vector y(q);
    for (int i = 0; i < q; ++i) y[i] = u(rng);
    Tensor3 a = twice.christoffels(y);
    Tensor3 b = gamma.christoffels(y);
    for (int i = 0; i < a.flat().size(); ++i)
      s.max_residual = std::max(s.max_residual, std::abs(a.flat()[i] - b.flat()[i]));
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_codazzi_torsion(RNG&) {
  SuiteResult s{"codazzi_torsion_equivalence", 0.0, 1e-9, true,
                "Codazzi ~ 0 iff dual torsion ~ 0, positive and negative cases"};
  // Positive: Hessian potentials with flat D.
  for (const PotentialSample& ps : builtin_potentials()) {
    MetricField g = metric_field_from_potential(ps.phi);
    ConnectionField flat = flat_connection(g.dim);
    s.max_residual = std::max(s.max_residual, codazzi_residual_general(flat, g, ps.y));
    s.max_residual = std::max(
        s.max_residual, max_abs(connection_torsion(dual_of_connection(flat, g), ps.y)));
  }
  // Negative: the Gaussian Fisher metric in (mu, sigma). Both sides of the
  // equivalence must clearly fail together.
  MetricField gauss = metric_field(2, [](const Vector& p) {
    double sg = p[1];
    return Matrix(Vector{{1.0 / (sg * sg), 2.0 / (sg * sg)}}.asDiagonal());
  });
  Vector at = vec2(0.0, 1.0);
  double codazzi = codazzi_residual_general(flat_connection(2), gauss, at);
  double torsion = max_abs(connection_torsion(dual_of_connection(flat_connection(2), gauss), at));
  if (codazzi < 0.5 || torsion < 0.5) {
    s.pass = false;
    s.note = "negative case failed to fail";
    s.max_residual = 1e9;
    return s;
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_koszul_routes(RNG& rng) {
  SuiteResult s{"koszul_routes", 0.0, 1e-9, true, "alpha and beta by two routes"};
  auto corpus = builtin_potentials();
  auto polys = random_polynomials(rng, 30);
  corpus.insert(corpus.end(), polys.begin(), polys.end());
  for (const PotentialSample& ps : corpus) {
    HessianPoint p = hessian_point(ps.phi, ps.y);
    double ra = 0.0, rb = 0.0;
    koszul_alpha(p, 1e300, &ra);
    koszul_beta(p, 1e300, &rb);
    s.max_residual = std::max({s.max_residual, ra, rb});
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_koszul_reference(RNG&) {
  SuiteResult s{"koszul_reference", 0.0, 1e-10, true, "alpha = -1/2, beta = 1/4 at y=2"};
  ScalarField phi = ScalarField::from_callable(1, [](auto&& y) { return -log(y[0]); });
  HessianPoint p = hessian_point(phi, vec1(2.0));
  s.max_residual = std::max(std::abs(koszul_alpha(p)[0] + 0.5),
                            std::abs(koszul_beta(p)(0, 0) - 0.25));
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_constant_curvature(RNG& rng) {
  SuiteResult s{"constant_curvature", 0.0, 1e-10, true,
                "c = 1 for -log y with q(xi) = 1; c = 0 quadratic; Einstein != constant"};
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  ScalarField neg_log1 = ScalarField::from_callable(1, [](auto&& y) { return -log(y[0]); });
  for (double yv : {0.5, 1.0, 2.0, 3.3}) {
    HessianPoint p = hessian_point(neg_log1, vec1(yv));
    Matrix g = metric_from_potential(p);
    Tensor4 Q = hessian_curvature_Q(p);
    auto [c, res] = constant_curvature_fit(g, Q);
    s.max_residual = std::max({s.max_residual, std::abs(c - 1.0), res});
    int done = 0;
    while (done < 25) {
      double xi = u(rng);
      if (std::abs(xi) < 1e-3) continue;
      Matrix xim(1, 1);
      xim << xi;
      s.max_residual = std::max(s.max_residual, std::abs(sectional_q(g, Q, xim) - 1.0));
      ++done;
    }
  }

  ScalarField quad = ScalarField::from_callable(2, [](auto&& y) {
    return 0.5 * y[0] * y[0] + 0.5 * y[1] * y[1];
  });
  HessianPoint pq = hessian_point(quad, vec2(0.4, -0.1));
  auto [c0, r0] = constant_curvature_fit(metric_from_potential(pq), hessian_curvature_Q(pq));
  s.max_residual = std::max({s.max_residual, std::abs(c0), r0});

  // Einstein-but-not-constant: -log y1 - log y2 at (1,2).
  ScalarField neg_log2 = ScalarField::from_callable(2, [](auto&& y) {
    return -log(y[0]) - log(y[1]);
  });
  HessianPoint pl = hessian_point(neg_log2, vec2(1.0, 2.0));
  Matrix gl = metric_from_potential(pl);
  Matrix beta = koszul_beta(pl);
  auto [lambda, eres] = einstein_check(gl, beta);
  s.max_residual = std::max({s.max_residual, std::abs(lambda - 1.0), eres});
  auto [cl, resl] = constant_curvature_fit(gl, hessian_curvature_Q(pl));
  (void)cl;
  if (resl <= 1e-3) {
    s.pass = false;
    s.note = "constant-curvature fit unexpectedly succeeded on the Einstein example";
    s.max_residual = 1e9;
    return s;
  }

  // Coherence: wherever the fit succeeds, the sectional curvature equals
  // the fitted constant in every direction.
  for (const PotentialSample& ps : builtin_potentials()) {
    HessianPoint p = hessian_point(ps.phi, ps.y);
    Matrix g = metric_from_potential(p);
    Tensor4 Q = hessian_curvature_Q(p);
    auto [c, res] = constant_curvature_fit(g, Q);
    if (res > 1e-9 * std::max(1.0, max_abs(Q))) continue;
    const int n = g.rows();
    int done = 0;
    while (done < 100) {
      Matrix xi(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) xi(i, j) = xi(j, i) = u(rng);
      if (max_abs(xi) < 1e-3) continue;
      double rel = std::abs(sectional_q(g, Q, xi) - c) / std::max(std::abs(c), 1.0);
      // The coherence bound is 1e-8 relative; rescale into this suite's
      // tolerance so one max_residual covers both checks.
      s.max_residual = std::max(s.max_residual, rel * (s.tolerance / 1e-8));
      ++done;
    }
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_kahler_curvature_bridge(RNG& rng) {
  SuiteResult s{"kahler_curvature_bridge", 0.0, 1e-8, true, "|R^N - Q/2| over built-ins, 50 points"};
  std::uniform_real_distribution<double> u(0.8, 1.8);
  std::uniform_real_distribution<double> uf(-2.0, 2.0);
  auto corpus = builtin_potentials();
  int points = 0;
  for (int round = 0; points < 50; ++round) {
    const PotentialSample& ps = corpus[round % corpus.size()];
    const int q = ps.phi.arity();
    Vector y(q), fiber(q);
    for (int i = 0; i < q; ++i) {
      y[i] = u(rng);
      fiber[i] = uf(rng);
    }
    KahlerCheck check = kahler_checks(ps.phi, y, fiber);
    s.max_residual = std::max(s.max_residual, check.r_residual);
    ++points;
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_kahler_ricci_bridge(RNG& rng) {
  SuiteResult s{"kahler_ricci_bridge", 0.0, 1e-8, true, "|Ric^N + beta/2| over built-ins, 50 points"};
  std::uniform_real_distribution<double> u(0.8, 1.8);
  std::uniform_real_distribution<double> uf(-2.0, 2.0);
  auto corpus = builtin_potentials();
  int points = 0;
  for (int round = 0; points < 50; ++round) {
    const PotentialSample& ps = corpus[round % corpus.size()];
    const int q = ps.phi.arity();
    Vector y(q), fiber(q);
    for (int i = 0; i < q; ++i) {
      y[i] = u(rng);
      fiber[i] = uf(rng);
    }
    KahlerCheck check = kahler_checks(ps.phi, y, fiber);
    s.max_residual = std::max(s.max_residual, check.ricci_residual);
    ++points;
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_holo_sectional(RNG& rng) {
  SuiteResult s{"holo_sectional", 0.0, 1e-8, true, "-log y lift: H(v) = -1, 50 directions"};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField phi = ScalarField::from_callable(1, [](auto&& y) { return -log(y[0]); });
  int done = 0;
  for (double yv : {0.8, 1.2, 2.4}) {
    KahlerPoint kp = kahler_point(phi, vec1(yv), vec1(0.0));
    for (int trial = 0; trial < 17 && done < 50; ++trial) {
      Eigen::VectorXcd v(1);
      v[0] = std::complex<double>(u(rng), u(rng));
      if (std::abs(v[0]) < 1e-3) continue;
      s.max_residual = std::max(s.max_residual, std::abs(holomorphic_sectional(kp, v) + 1.0));
      ++done;
    }
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_flat_space_form(RNG& rng) {
  SuiteResult s{"flat_space_form", 0.0, 1e-9, true,
                "sum exp (q=2): Levi-Civita Riemann vanishes (space form, c = 0)"};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField phi = ScalarField::from_callable(2, [](auto&& y) { return exp(y[0]) + exp(y[1]); });
  MetricField gf = metric_field_from_potential(phi);
  for (int trial = 0; trial < 10; ++trial) {
    Vector y = vec2(u(rng), u(rng));
    HessianPoint p = hessian_point(phi, y);
    s.max_residual =
        std::max(s.max_residual, max_abs(riemann_from_Q(hessian_curvature_Q(p, 1e300))));
    ConnectionField lc = connection_field(2, levi_civita_field(gf).christoffels);
    Tensor4 lowered = lower_curvature(connection_curvature(lc, y), metric_from_potential(p));
    s.max_residual = std::max(s.max_residual, max_abs(lowered));
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

// Random well-behaved expressions for the jets-vs-fd shootout.
struct ExprGen {
  RNG& rng;
  std::vector<std::string> vars;

  std::string atom() {
    if (rng() % 3 == 1) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4g", 0.25 * static_cast<double>(1 + rng() % 8));
      return buf;
    }
    return vars[rng() % vars.size()];
  }

  std::string gen(int depth) {
    if (depth <= 0) return atom();
    switch (rng() % 8) {
      case 0: return "(" + gen(depth - 1) + "+" + gen(depth - 1) + ")";
      case 1: return "(" + gen(depth - 1) + "-" + gen(depth - 1) + ")";
      case 2: return "(" + gen(depth - 1) + "*" + gen(depth - 1) + ")";
      case 3: return "(" + gen(depth - 1) + "/(" + gen(depth - 1) + "+3))";
      case 4: return "exp(0.5*" + gen(depth - 1) + ")";
      case 5: return "log((" + gen(depth - 1) + ")^2+1.5)";
      case 6: return "sqrt((" + gen(depth - 1) + ")^2+0.75)";
      default: return "(" + gen(depth - 1) + ")^" + std::to_string(2 + rng() % 3);
    }
  }
};

SuiteResult suite_jets_vs_fd(RNG& rng) {
  SuiteResult s{"jets_vs_fd", 0.0, 1.0, true,
                "1000 random expressions, ratio to 1e-5 (1e-7 for order <= 2)"};
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  int accepted = 0;
  while (accepted < 1000) {
    int q = 1 + static_cast<int>(rng() % 3);
    ExprGen gen{rng, {}};
    for (int i = 1; i <= q; ++i) gen.vars.push_back("y" + std::to_string(i));
    ScalarField f = ExprAst::parse(gen.gen(3), gen.vars).field();
    Vector y(q);
    for (int i = 0; i < q; ++i) y[i] = u(rng);
    MultiIndex alpha(q, 0);
    int total = 1 + static_cast<int>(rng() % 4);
    for (int d = 0; d < total; ++d) alpha[rng() % q] += 1;
    double tol = total <= 2 ? 1e-7 : 1e-5;
    double jet, fd, value;
    try {
      Jet4 full = jet_of(f, y);
      double ladder = full.taylor().cwiseAbs().maxCoeff();
      if (!std::isfinite(ladder) || ladder > 300.0) continue;  // keep fd estimable
      jet = mixed_partial(f, y, alpha);
      fd = fd_partial(f, y, alpha);
      value = full.value();
      // Oracle self-consistency gate: the stencil must have converged
      // before it can judge the jets (pow chains can hide huge high-order
      // derivatives behind a tame order-4 ladder).
      double fd_check = fd_partial(f, y, alpha, 0.55 * fd_default_step(total));
      double scale0 = std::max({std::abs(jet), std::abs(fd), std::abs(value), 1.0});
      if (std::abs(fd - fd_check) > 0.25 * tol * scale0) continue;
    } catch (const DomainError&) {
      continue;
    }
    if (!std::isfinite(jet)) continue;
    ++accepted;
    double scale = std::max({std::abs(jet), std::abs(fd), std::abs(value), 1.0});
    s.max_residual = std::max(s.max_residual, std::abs(jet - fd) / (tol * scale));
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

SuiteResult suite_poly_exact(RNG&) {
  SuiteResult s{"poly_exact", 0.0, 0.0, true,
                "top-order partials of dyadic quartics are bit-stable"};
  ScalarField f = ScalarField::from_callable(2, [](auto&& v) {
    return 0.5 * pow(v[0], 4) - 0.25 * v[0] * v[0] * v[1] * v[1] + 2.0 * pow(v[1], 3) +
           0.125 * pow(v[0], 3) * v[1];
  });
  const double expect40 = 12.0;   // 0.5 * 4!
  const double expect22 = -1.0;   // -0.25 * 2! 2!
  const double expect31 = 0.75;   // 0.125 * 3!
  for (double a : {-2.0, -0.5, 0.0, 1.25, 3.0}) {
    Vector y = vec2(a, 0.7 * a - 0.3);
    s.max_residual = std::max(s.max_residual, std::abs(mixed_partial(f, y, {4, 0}) - expect40));
    s.max_residual = std::max(s.max_residual, std::abs(mixed_partial(f, y, {2, 2}) - expect22));
    s.max_residual = std::max(s.max_residual, std::abs(mixed_partial(f, y, {3, 1}) - expect31));
  }
  s.pass = s.max_residual <= s.tolerance;
  return s;
}

struct NamedSuite {
  const char* name;
  SuiteResult (*fn)(RNG&);
};

constexpr NamedSuite kSuites[] = {
    {"fisher_identity", suite_fisher_identity},
    {"fisher_psd", suite_fisher_psd},
    {"expfam_bridge", suite_expfam_bridge},
    {"degenerate_kernel", suite_degenerate_kernel},
    {"q_routes", suite_q_routes},
    {"q_symmetries", suite_q_symmetries},
    {"riemann_from_q", suite_riemann_from_q},
    {"dual_flatness", suite_dual_flatness},
    {"dual_involution", suite_dual_involution},
    {"codazzi_torsion_equivalence", suite_codazzi_torsion},
    {"koszul_routes", suite_koszul_routes},
    {"koszul_reference", suite_koszul_reference},
    {"constant_curvature", suite_constant_curvature},
    {"kahler_curvature_bridge", suite_kahler_curvature_bridge},
    {"kahler_ricci_bridge", suite_kahler_ricci_bridge},
    {"holo_sectional", suite_holo_sectional},
    {"flat_space_form", suite_flat_space_form},
    {"jets_vs_fd", suite_jets_vs_fd},
    {"poly_exact", suite_poly_exact},
};

}  // namespace

std::vector<SuiteResult> run_verification(const VerifyOptions& opt) {
  std::vector<SuiteResult> results;
  for (const NamedSuite& suite : kSuites) {
    std::string name = suite.name;
    if (!opt.only.empty() && name.find(opt.only) == std::string::npos) continue;
    RNG rng(opt.seed);  // every suite gets the same seed: reordering-proof
    SuiteResult r = suite.fn(rng);
    auto it = opt.tol_overrides.find(name);
    if (it != opt.tol_overrides.end()) {
      r.tolerance = it->second;
      r.pass = r.max_residual <= r.tolerance && r.max_residual < 1e9;
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace infogeo
