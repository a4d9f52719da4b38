#include "infogeo/diffops.hpp"

#include <cmath>
#include <vector>

namespace infogeo {

Jet4 jet_of(const ScalarField& f, const Eigen::VectorXd& y) {
  const int q = f.arity();
  if (y.size() != q) throw DimensionError("point dimension does not match field arity");
  std::vector<Jet4> seed;
  seed.reserve(q);
  for (int i = 0; i < q; ++i) seed.push_back(Jet4::variable(q, i, y[i]));
  return f(std::span<const Jet4>(seed.data(), seed.size()));
}

double mixed_partial(const ScalarField& f, const Eigen::VectorXd& y, const MultiIndex& alpha) {
  if (static_cast<int>(alpha.size()) != f.arity())
    throw DimensionError("multi-index arity does not match field arity");
  if (order(alpha) > JetTable::kMaxOrder)
    throw OrderError("mixed_partial supports |alpha| <= 4");
  return jet_of(f, y).partial(alpha);
}

namespace {

struct AxisStencil {
  std::vector<std::pair<int, double>> taps;  // (offset multiple, weight * h^order)
};

// Central stencils, all with O(h^2) leading truncation error.
AxisStencil axis_stencil(int deriv_order, double h) {
  switch (deriv_order) {
    case 0:
      return {{{0, 1.0}}};
    case 1:
      return {{{1, 0.5 / h}, {-1, -0.5 / h}}};
    case 2: {
      double ih2 = 1.0 / (h * h);
      return {{{1, ih2}, {0, -2.0 * ih2}, {-1, ih2}}};
    }
    case 3: {
      double ih3 = 1.0 / (h * h * h);
      return {{{2, 0.5 * ih3}, {1, -ih3}, {-1, ih3}, {-2, -0.5 * ih3}}};
    }
    case 4: {
      double ih4 = 1.0 / (h * h * h * h);
      return {{{2, ih4}, {1, -4.0 * ih4}, {0, 6.0 * ih4}, {-1, -4.0 * ih4}, {-2, ih4}}};
    }
    default:
      throw OrderError("fd_partial supports per-axis order <= 4");
  }
}

// Tensor product of per-axis stencils, evaluated at once.
double apply_stencil(const ScalarField& f, const Eigen::VectorXd& y, const MultiIndex& alpha,
                     const Eigen::VectorXd& h) {
  const int q = static_cast<int>(alpha.size());
  std::vector<AxisStencil> stencils(q);
  std::vector<int> active;
  for (int i = 0; i < q; ++i) {
    stencils[i] = axis_stencil(alpha[i], h[i]);
    if (alpha[i] > 0) active.push_back(i);
  }
  double acc = 0.0;
  Eigen::VectorXd point = y;
  // Iterate the cartesian product of taps over active axes.
  std::vector<std::size_t> tap(active.size(), 0);
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      int ax = active[k];
      auto [off, weight] = stencils[ax].taps[tap[k]];
      point[ax] = y[ax] + off * h[ax];
      w *= weight;
    }
    double value = f(point);
    if (!std::isfinite(value)) throw DomainError("non-finite field value at a stencil point");
    acc += w * value;
    std::size_t k = 0;
    for (; k < active.size(); ++k) {
      if (++tap[k] < stencils[active[k]].taps.size()) break;
      tap[k] = 0;
      point[active[k]] = y[active[k]];
    }
    if (k == active.size()) break;
  }
  return acc;
}

}  // namespace

double fd_default_step(int total_order) {
  switch (total_order) {
    case 0:
    case 1:
      return 1e-3;
    case 2:
      return 5e-3;
    case 3:
      return 1.2e-2;
    default:
      return 1.6e-2;
  }
}

double fd_partial(const ScalarField& f, const Eigen::VectorXd& y, const MultiIndex& alpha,
                  double step) {
  if (static_cast<int>(alpha.size()) != f.arity())
    throw DimensionError("multi-index arity does not match field arity");
  const int total = order(alpha);
  if (total > JetTable::kMaxOrder) throw OrderError("fd_partial supports |alpha| <= 4");
  if (step <= 0.0) throw Error("fd step must be positive");
  if (total == 0) return f(y);

  const int q = static_cast<int>(alpha.size());
  Eigen::VectorXd h(q);
  for (int i = 0; i < q; ++i) h[i] = step * std::max(1.0, std::abs(y[i]));

  double coarse = apply_stencil(f, y, alpha, h);
  double fine = apply_stencil(f, y, alpha, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

double fd_partial(const ScalarField& f, const Eigen::VectorXd& y, const MultiIndex& alpha) {
  return fd_partial(f, y, alpha, fd_default_step(order(alpha)));
}

Eigen::VectorXd field_partial(const VectorFieldFn& f, const Eigen::VectorXd& y, int axis,
                              double step) {
  double h = step * std::max(1.0, std::abs(y[axis]));
  auto diff = [&](double hh) {
    Eigen::VectorXd yp = y, ym = y;
    yp[axis] += hh;
    ym[axis] -= hh;
    return Eigen::VectorXd((f(yp) - f(ym)) / (2.0 * hh));
  };
  return (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
}

Eigen::VectorXd field_second_partial(const VectorFieldFn& f, const Eigen::VectorXd& y, int axis1,
                                     int axis2, double step) {
  double h1 = step * std::max(1.0, std::abs(y[axis1]));
  double h2 = step * std::max(1.0, std::abs(y[axis2]));
  auto diff = [&](double scale) -> Eigen::VectorXd {
    double a = scale * h1, b = scale * h2;
    if (axis1 == axis2) {
      Eigen::VectorXd yp = y, ym = y;
      yp[axis1] += a;
      ym[axis1] -= a;
      return (f(yp) - 2.0 * f(y) + f(ym)) / (a * a);
    }
    Eigen::VectorXd pp = y, pm = y, mp = y, mm = y;
    pp[axis1] += a;
    pp[axis2] += b;
    pm[axis1] += a;
    pm[axis2] -= b;
    mp[axis1] -= a;
    mp[axis2] += b;
    mm[axis1] -= a;
    mm[axis2] -= b;
    return (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * a * b);
  };
  // Two extrapolation levels: the h^2 and h^4 terms cancel.
  Eigen::VectorXd d1 = diff(1.0), d2 = diff(0.5), d4 = diff(0.25);
  Eigen::VectorXd r1 = (4.0 * d2 - d1) / 3.0;
  Eigen::VectorXd r2 = (4.0 * d4 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

}  // namespace infogeo
