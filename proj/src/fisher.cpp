#include "infogeo/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "infogeo/quadrature.hpp"

namespace infogeo {

SampleAxis finite_axis(std::vector<double> points) {
  SampleAxis a;
  a.kind = AxisKind::Finite;
  a.points = std::move(points);
  return a;
}

SampleAxis line_axis(std::function<double(const Vector&)> center,
                     std::function<double(const Vector&)> scale) {
  SampleAxis a;
  a.kind = AxisKind::Line;
  a.center = center ? std::move(center) : [](const Vector&) { return 0.0; };
  a.scale = scale ? std::move(scale) : [](const Vector&) { return 1.0; };
  return a;
}

SampleAxis half_line_axis(std::function<double(const Vector&)> scale) {
  SampleAxis a;
  a.kind = AxisKind::HalfLine;
  a.scale = scale ? std::move(scale) : [](const Vector&) { return 1.0; };
  return a;
}

namespace {

struct Node {
  Vector x;
  double w;  // volume weight; integral f = sum w * f(x)
};

// Per-axis node/weight lists combined as a tensor product.
std::vector<Node> quadrature_nodes(const FamilySpec& f, const Vector& lam, int shrink) {
  std::vector<std::vector<std::pair<double, double>>> per_axis;
  for (const SampleAxis& ax : f.axes) {
    std::vector<std::pair<double, double>> taps;
    switch (ax.kind) {
      case AxisKind::Finite: {
        if (ax.points.empty()) throw IntegrationError("finite axis with no points");
        for (double p : ax.points) taps.emplace_back(p, 1.0);
        break;
      }
      case AxisKind::Line: {
        if (f.integration.method == Integration::Method::ExactSum)
          throw IntegrationError("exact-sum integration on a continuous axis");
        int n = std::max(4, f.integration.n / shrink);
        const QuadRule& rule = gauss_hermite(n);
        double c = ax.center(lam), s = ax.scale(lam);
        if (!(s > 0.0)) throw IntegrationError("non-positive scale hint");
        double r2 = std::sqrt(2.0);
        for (int k = 0; k < n; ++k) {
          double t = rule.nodes[k];
          taps.emplace_back(c + r2 * s * t, r2 * s * rule.weights[k] * std::exp(t * t));
        }
        break;
      }
      case AxisKind::HalfLine: {
        if (f.integration.method == Integration::Method::ExactSum)
          throw IntegrationError("exact-sum integration on a continuous axis");
        int n = std::max(8, f.integration.n_half_line / shrink);
        QuadRule rule = gauss_legendre01(n);
        double s = ax.scale(lam);
        if (!(s > 0.0)) throw IntegrationError("non-positive scale hint");
        for (int k = 0; k < n; ++k) {
          double t = rule.nodes[k];
          double om = 1.0 - t;
          taps.emplace_back(s * t / om, s * rule.weights[k] / (om * om));
        }
        break;
      }
    }
    per_axis.push_back(std::move(taps));
  }

  std::vector<Node> nodes;
  std::vector<std::size_t> idx(per_axis.size(), 0);
  const int d = static_cast<int>(per_axis.size());
  while (true) {
    Node node;
    node.x.resize(d);
    node.w = 1.0;
    for (int i = 0; i < d; ++i) {
      node.x[i] = per_axis[i][idx[i]].first;
      node.w *= per_axis[i][idx[i]].second;
    }
    nodes.push_back(std::move(node));
    int i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < per_axis[i].size()) break;
      idx[i] = 0;
    }
    if (i == d) break;
  }
  return nodes;
}

std::vector<Node> monte_carlo_nodes(const FamilySpec& f, const Vector& lam) {
  std::mt19937_64 rng(f.integration.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const int n = std::max(16, f.integration.n);
  const int d = f.x_dim();
  std::vector<Node> nodes;
  nodes.reserve(n);
  for (int s = 0; s < n; ++s) {
    Node node;
    node.x.resize(d);
    double inv_prop = 1.0;
    for (int i = 0; i < d; ++i) {
      const SampleAxis& ax = f.axes[i];
      switch (ax.kind) {
        case AxisKind::Finite: {
          std::size_t pick = std::min<std::size_t>(
              static_cast<std::size_t>(uniform(rng) * ax.points.size()), ax.points.size() - 1);
          node.x[i] = ax.points[pick];
          inv_prop *= static_cast<double>(ax.points.size());
          break;
        }
        case AxisKind::Line: {
          double c = ax.center(lam), sc = 1.5 * ax.scale(lam);
          double z = normal(rng);
          node.x[i] = c + sc * z;
          double dens = std::exp(-0.5 * z * z) / (sc * std::sqrt(2.0 * M_PI));
          inv_prop /= dens;
          break;
        }
        case AxisKind::HalfLine: {
          double mean = 1.5 * ax.scale(lam);
          double u = std::max(uniform(rng), 1e-300);
          double x = -mean * std::log(u);
          node.x[i] = x;
          inv_prop /= std::exp(-x / mean) / mean;
          break;
        }
      }
    }
    node.w = inv_prop / n;
    nodes.push_back(std::move(node));
  }
  return nodes;
}

struct Moments {
  Matrix outer;
  Matrix hess;  // E[d2 l], not negated
  double mass = 0.0;
};

Moments accumulate(const FamilySpec& f, const Vector& lam, const std::vector<Node>& nodes,
                   Matrix* mc_variance = nullptr) {
  const int m = f.param_dim;
  const int xd = f.x_dim();
  Moments mo;
  mo.outer = Matrix::Zero(m, m);
  mo.hess = Matrix::Zero(m, m);
  Matrix sq = Matrix::Zero(m, m);

  std::vector<Jet4> args(xd + m, Jet4());
  for (const Node& node : nodes) {
    for (int i = 0; i < xd; ++i) args[i] = Jet4::constant(m, node.x[i]);
    for (int j = 0; j < m; ++j) args[xd + j] = Jet4::variable(m, j, lam[j]);
    Jet4 l = f.log_density(std::span<const Jet4>(args.data(), args.size()));
    double p = std::exp(l.value());
    double wp = node.w * p;
    Vector score = gradient_of(l);
    Matrix h = hessian_of(l);
    mo.outer.noalias() += wp * score * score.transpose();
    mo.hess += wp * h;
    mo.mass += wp;
    if (mc_variance) {
      Matrix c = wp * score * score.transpose() * static_cast<double>(nodes.size());
      sq += c.cwiseProduct(c);
    }
  }
  if (mc_variance) {
    double n = static_cast<double>(nodes.size());
    Matrix mean = mo.outer;
    *mc_variance = (sq / n - mean.cwiseProduct(mean)).cwiseMax(0.0) / n;
  }
  return mo;
}

struct Evaluation {
  Moments mo;
  double est_error = 0.0;
  std::string method;
};

Evaluation evaluate(const FamilySpec& f, const Vector& lam) {
  if (lam.size() != f.param_dim) throw DimensionError("parameter point dimension mismatch");
  Evaluation ev;
  bool all_finite = std::all_of(f.axes.begin(), f.axes.end(), [](const SampleAxis& a) {
    return a.kind == AxisKind::Finite;
  });
  if (f.integration.method == Integration::Method::MonteCarlo) {
    Matrix var;
    ev.mo = accumulate(f, lam, monte_carlo_nodes(f, lam), &var);
    ev.est_error = std::sqrt(var.maxCoeff()) + std::abs(ev.mo.mass - 1.0);
    std::ostringstream os;
    os << "monte-carlo(" << f.integration.n << ", seed " << f.integration.seed << ")";
    ev.method = os.str();
    return ev;
  }
  ev.mo = accumulate(f, lam, quadrature_nodes(f, lam, 1));
  if (all_finite) {
    double scale = std::max(1.0, max_abs(ev.mo.outer));
    ev.est_error = std::abs(ev.mo.mass - 1.0) + 1e-14 * scale;
    ev.method = "exact-sum";
  } else {
    Moments coarse = accumulate(f, lam, quadrature_nodes(f, lam, 2));
    double diff = std::max(max_abs(Matrix(ev.mo.outer - coarse.outer)),
                           max_abs(Matrix(ev.mo.hess - coarse.hess)));
    ev.est_error = diff + std::abs(ev.mo.mass - 1.0) + 1e-14 * std::max(1.0, max_abs(ev.mo.outer));
    std::ostringstream os;
    os << "quadrature(gh " << f.integration.n << ", gl " << f.integration.n_half_line << ")";
    ev.method = os.str();
  }
  return ev;
}

FisherResult analyze(Matrix g, const Evaluation& ev) {
  FisherResult r;
  r.g = 0.5 * (g + g.transpose());
  r.method = ev.method;
  r.est_error = ev.est_error;
  EigenDecomp ed = eig_sym(r.g);
  r.psd_margin = ed.eigenvalues[0];
  const int m = static_cast<int>(ed.eigenvalues.size());
  try {
    r.kernel = kernel_basis(r.g, 1e-9);
    r.rank = m - static_cast<int>(r.kernel.size());
  } catch (const NotPSDError&) {
    // Clearly negative spectrum: leave the kernel empty and count strictly
    // positive directions; psd_and_kernel rejects such results.
    double thr = std::max(1e-9 * ed.eigenvalues.cwiseAbs().maxCoeff(), 1e-12);
    r.rank = 0;
    for (int i = 0; i < m; ++i)
      if (ed.eigenvalues[i] > thr) ++r.rank;
  }
  return r;
}

}  // namespace

FisherResult fisher_outer(const FamilySpec& f, const Vector& lam) {
  Evaluation ev = evaluate(f, lam);
  return analyze(ev.mo.outer, ev);
}

FisherResult fisher_hess(const FamilySpec& f, const Vector& lam) {
  Evaluation ev = evaluate(f, lam);
  return analyze(-ev.mo.hess, ev);
}

double normalization_mass(const FamilySpec& f, const Vector& lam) {
  return evaluate(f, lam).mo.mass;
}

std::pair<int, std::vector<Vector>> psd_and_kernel(const FisherResult& r, double tol) {
  double thr = std::max(tol * max_abs(r.g), 1e-12);
  if (r.psd_margin < -thr) {
    std::ostringstream os;
    os << "Fisher matrix has eigenvalue " << r.psd_margin << " below -" << thr;
    throw NotPSDError(os.str());
  }
  std::vector<Vector> kernel = kernel_basis(r.g, tol);
  return {static_cast<int>(r.g.rows() - kernel.size()), kernel};
}

RankProfile rank_profile(const FamilySpec& f, const std::vector<Vector>& sample, double tol) {
  if (sample.size() < 2) throw Error("rank_profile needs at least 2 sample points");
  RankProfile out;
  for (const Vector& lam : sample) {
    auto [rank, kernel] = psd_and_kernel(fisher_outer(f, lam), tol);
    out.ranks.push_back(rank);
  }
  out.rank = out.ranks.front();
  out.constant_rank = true;
  for (std::size_t i = 0; i < out.ranks.size(); ++i) {
    if (out.ranks[i] != out.rank) {
      out.constant_rank = false;
      out.deviating.push_back(i);
    }
  }
  if (!out.constant_rank) out.rank = -1;
  return out;
}

namespace {

Matrix kernel_matrix(const FamilySpec& f, const Vector& lam, double tol, int expect_rank = -1) {
  FisherResult r = fisher_outer(f, lam);
  auto [rank, kernel] = psd_and_kernel(r, tol);
  if (expect_rank >= 0 && rank != expect_rank) {
    std::ostringstream os;
    os << "rank drifted from " << expect_rank << " to " << rank << " inside a stencil";
    throw RankDriftError(os.str());
  }
  const int m = f.param_dim;
  Matrix k(m, static_cast<int>(kernel.size()));
  for (std::size_t a = 0; a < kernel.size(); ++a) k.col(static_cast<int>(a)) = kernel[a];
  return k;
}

// Greedy sign/order alignment of a new orthonormal frame against a
// reference: per reference column, pick the unused new column with the
// largest |overlap| and flip its sign to make the overlap positive.
Matrix align_frame(const Matrix& fresh, const Matrix& ref) {
  const int d = static_cast<int>(ref.cols());
  Matrix out(ref.rows(), d);
  std::vector<bool> used(fresh.cols(), false);
  for (int a = 0; a < d; ++a) {
    int best = -1;
    double best_abs = -1.0;
    for (int b = 0; b < fresh.cols(); ++b) {
      if (used[b]) continue;
      double ov = std::abs(ref.col(a).dot(fresh.col(b)));
      if (ov > best_abs) {
        best_abs = ov;
        best = b;
      }
    }
    used[best] = true;
    double sign = ref.col(a).dot(fresh.col(best)) < 0.0 ? -1.0 : 1.0;
    out.col(a) = sign * fresh.col(best);
  }
  return out;
}

}  // namespace

double involutivity_residual(const FamilySpec& f, const Vector& lam, double tol) {
  const int m = f.param_dim;
  Matrix k0 = kernel_matrix(f, lam, tol);
  const int d = static_cast<int>(k0.cols());
  if (d <= 1) return 0.0;  // empty or one-dimensional frames bracket to zero

  // d_j K by central differences of the aligned frame.
  std::vector<Matrix> dk(m);
  for (int j = 0; j < m; ++j) {
    double h = 1e-4 * std::max(1.0, std::abs(lam[j]));
    Vector lp = lam, lm = lam;
    lp[j] += h;
    lm[j] -= h;
    Matrix kp = align_frame(kernel_matrix(f, lp, tol, m - d), k0);
    Matrix km = align_frame(kernel_matrix(f, lm, tol, m - d), k0);
    dk[j] = (kp - km) / (2.0 * h);
  }

  Matrix p_normal = Matrix::Identity(m, m) - k0 * k0.transpose();
  double res = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      Vector bracket = Vector::Zero(m);
      for (int j = 0; j < m; ++j) bracket += k0(j, a) * dk[j].col(b) - k0(j, b) * dk[j].col(a);
      res = std::max(res, (p_normal * bracket).cwiseAbs().maxCoeff());
    }
  return res;
}

double leafwise_constancy_residual(const FamilySpec& f, const Vector& lam, double tol) {
  const int m = f.param_dim;
  FisherResult r0 = fisher_outer(f, lam);
  auto [rank, kernel] = psd_and_kernel(r0, tol);
  if (kernel.empty()) return 0.0;  // nondegenerate: vacuous

  // Normal frame: eigenvectors of g above the kernel threshold, frozen.
  EigenDecomp ed = eig_sym(r0.g);
  double thr = std::max(tol * ed.eigenvalues.cwiseAbs().maxCoeff(), 1e-12);
  std::vector<int> normal_cols;
  for (int i = 0; i < m; ++i)
    if (ed.eigenvalues[i] > thr) normal_cols.push_back(i);

  double res = 0.0;
  for (const Vector& k : kernel) {
    double h = 1e-4;
    Vector lp = lam + h * k, lm = lam - h * k;
    FisherResult rp = fisher_outer(f, lp);
    FisherResult rm = fisher_outer(f, lm);
    if (psd_and_kernel(rp, tol).first != rank || psd_and_kernel(rm, tol).first != rank)
      throw RankDriftError("rank drifted inside the leafwise-constancy stencil");
    Matrix deriv = (rp.g - rm.g) / (2.0 * h);
    for (int a : normal_cols)
      for (int b : normal_cols)
        res = std::max(res, std::abs(ed.eigenvectors.col(a).dot(deriv * ed.eigenvectors.col(b))));
  }
  return res;
}

TransverseReduction transverse_reduce(const FamilySpec& f, const Vector& lam, double tol) {
  const int m = f.param_dim;
  FisherResult r0 = fisher_outer(f, lam);
  psd_and_kernel(r0, tol);
  EigenDecomp ed = eig_sym(r0.g);
  double thr = std::max(tol * ed.eigenvalues.cwiseAbs().maxCoeff(), 1e-12);
  std::vector<int> normal_cols;
  for (int i = 0; i < m; ++i)
    if (ed.eigenvalues[i] > thr) normal_cols.push_back(i);
  const int q = static_cast<int>(normal_cols.size());
  if (q == 0) throw Error("transverse_reduce: the Fisher matrix vanishes");

  TransverseReduction out;
  out.basis.resize(m, q);
  for (int a = 0; a < q; ++a) out.basis.col(a) = ed.eigenvectors.col(normal_cols[a]);

  FamilySpec fam = f;
  Matrix basis = out.basis;
  auto reduced = [fam, lam, basis, q](const Vector& u) {
    Vector point = lam + basis * u;
    Matrix g = fisher_outer(fam, point).g;
    return Matrix(basis.transpose() * g * basis);
  };
  out.reduced_g = reduced(Vector::Zero(q));

  // Codazzi residual of the reduced metric field at u = 0.
  Tensor3 dg(q);
  VectorFieldFn flat = [&reduced, q](const Vector& u) {
    Matrix g = reduced(u);
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(g.data(), q * q));
  };
  Vector zero = Vector::Zero(q);
  for (int r = 0; r < q; ++r) {
    Eigen::VectorXd d = field_partial(flat, zero, r, 1e-4);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) dg(r, i, j) = d[j * q + i];
  }
  double res = 0.0;
  for (int r = 0; r < q; ++r)
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) res = std::max(res, std::abs(dg(r, i, j) - dg(i, r, j)));
  out.codazzi_residual = res;
  return out;
}

// ---------------------------------------------------------------------------
// Built-in families
// ---------------------------------------------------------------------------

FamilySpec gaussian_family() {
  FamilySpec f;
  f.name = "gaussian";
  f.param_dim = 2;
  f.param_names = {"mu", "sigma"};
  f.axes = {line_axis([](const Vector& lam) { return lam[0]; },
                      [](const Vector& lam) { return lam[1]; })};
  f.log_density = ScalarField::from_callable(3, [](auto&& a) {
    const auto& x = a[0];
    const auto& mu = a[1];
    const auto& sigma = a[2];
    auto z = (x - mu) / sigma;
    return -log(sigma) - 0.5 * std::log(2.0 * M_PI) - 0.5 * z * z;
  });
  f.integration.method = Integration::Method::GaussHermite;
  return f;
}

FamilySpec bernoulli_logit_family() {
  FamilySpec f;
  f.name = "bernoulli-logit";
  f.param_dim = 1;
  f.param_names = {"theta"};
  f.axes = {finite_axis({0.0, 1.0})};
  f.log_density = ScalarField::from_callable(2, [](auto&& a) {
    const auto& x = a[0];
    const auto& theta = a[1];
    return x * theta - log(1.0 + exp(theta));
  });
  f.integration.method = Integration::Method::ExactSum;
  return f;
}

FamilySpec categorical_softmax_family(int k) {
  if (k < 2) throw Error("categorical family needs k >= 2");
  FamilySpec f;
  f.name = "categorical-softmax";
  f.param_dim = k;
  for (int i = 0; i < k; ++i) f.param_names.push_back("theta" + std::to_string(i + 1));
  std::vector<double> pts(k);
  for (int i = 0; i < k; ++i) pts[i] = i;
  f.axes = {finite_axis(pts)};
  f.log_density = ScalarField::from_callable(1 + k, [k](auto&& a) {
    int xi = static_cast<int>(std::llround(value_of(a[0])));
    auto lse = exp(a[1]);
    for (int j = 2; j <= k; ++j) lse = lse + exp(a[j]);
    return a[1 + xi] - log(lse);
  });
  f.integration.method = Integration::Method::ExactSum;
  return f;
}

FamilySpec exponential_rate_family() {
  FamilySpec f;
  f.name = "exponential-rate";
  f.param_dim = 1;
  f.param_names = {"rate"};
  f.axes = {half_line_axis([](const Vector& lam) { return 1.0 / lam[0]; })};
  f.log_density = ScalarField::from_callable(2, [](auto&& a) {
    const auto& x = a[0];
    const auto& rate = a[1];
    return log(rate) - rate * x;
  });
  f.integration.method = Integration::Method::GaussLegendre;
  return f;
}

FamilySpec exp_family_natural(const ExprAst& psi, std::vector<SampleAxis> axes,
                              ScalarField log_base) {
  const int m = psi.arity();
  if (static_cast<int>(axes.size()) != m)
    throw DimensionError("exp_family_natural: sample dimension must equal param dimension");
  FamilySpec f;
  f.name = "exp-family-natural";
  f.param_dim = m;
  f.param_names = psi.variables();
  f.axes = std::move(axes);
  ScalarField psi_field = psi.field();
  ScalarField base = log_base;
  f.log_density = ScalarField::from_callable(2 * m, [psi_field, base, m](auto&& a) {
    auto acc = a[0] * a[m];
    for (int i = 1; i < m; ++i) acc += a[i] * a[m + i];
    acc -= psi_field(a.subspan(m, m));
    if (base.valid()) acc += base(a.subspan(0, m));
    return acc;
  });
  bool continuous = std::any_of(f.axes.begin(), f.axes.end(), [](const SampleAxis& a) {
    return a.kind != AxisKind::Finite;
  });
  f.integration.method =
      continuous ? Integration::Method::GaussHermite : Integration::Method::ExactSum;
  return f;
}

FamilySpec exp_family_bernoulli() {
  ExprAst psi = ExprAst::parse("log(1+exp(t1))", {"t1"});
  FamilySpec f = exp_family_natural(psi, {finite_axis({0.0, 1.0})});
  f.name = "exp-family-bernoulli";
  return f;
}

FamilySpec exp_family_gaussian_location(int m) {
  std::vector<std::string> names;
  std::string text;
  for (int i = 0; i < m; ++i) {
    names.push_back("t" + std::to_string(i + 1));
    if (i) text += "+";
    text += names.back() + "^2/2";
  }
  ExprAst psi = ExprAst::parse(text, names);
  std::vector<SampleAxis> axes;
  for (int i = 0; i < m; ++i) {
    axes.push_back(line_axis([i](const Vector& lam) { return lam[i]; },
                             [](const Vector&) { return 1.0; }));
  }
  ScalarField base = ScalarField::from_callable(m, [m](auto&& x) {
    auto acc = x[0] * x[0];
    for (int i = 1; i < m; ++i) acc += x[i] * x[i];
    return -0.5 * acc - 0.5 * m * std::log(2.0 * M_PI);
  });
  FamilySpec f = exp_family_natural(psi, std::move(axes), base);
  f.name = "exp-family-gaussian-location";
  return f;
}

FamilySpec linear_reparam(const FamilySpec& inner, const Matrix& a) {
  if (a.rows() != inner.param_dim)
    throw DimensionError("linear_reparam: matrix rows must equal inner parameter dimension");
  FamilySpec f;
  f.name = inner.name + "+linear-reparam";
  f.param_dim = static_cast<int>(a.cols());
  for (int i = 0; i < f.param_dim; ++i) f.param_names.push_back("l" + std::to_string(i + 1));
  f.integration = inner.integration;

  Matrix mat = a;
  // Continuous-axis hints are functions of the inner parameters.
  for (const SampleAxis& ax : inner.axes) {
    SampleAxis outer = ax;
    if (ax.center) {
      auto inner_center = ax.center;
      outer.center = [inner_center, mat](const Vector& lam) { return inner_center(mat * lam); };
    }
    if (ax.scale) {
      auto inner_scale = ax.scale;
      outer.scale = [inner_scale, mat](const Vector& lam) { return inner_scale(mat * lam); };
    }
    f.axes.push_back(std::move(outer));
  }

  ScalarField inner_l = inner.log_density;
  const int xd = inner.x_dim();
  const int mi = inner.param_dim;
  const int mo = f.param_dim;
  f.log_density = ScalarField::from_callable(xd + mo, [inner_l, mat, xd, mi, mo](auto&& arg) {
    using S = std::remove_cvref_t<decltype(arg[0])>;
    std::vector<S> composed(arg.begin(), arg.begin() + xd);
    for (int j = 0; j < mi; ++j) {
      S acc = arg[xd] * mat(j, 0);
      for (int k = 1; k < mo; ++k) acc += arg[xd + k] * mat(j, k);
      composed.push_back(std::move(acc));
    }
    return inner_l(std::span<const S>(composed.data(), composed.size()));
  });
  return f;
}

}  // namespace infogeo
