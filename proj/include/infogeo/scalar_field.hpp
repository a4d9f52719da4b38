#pragma once

// A scalar function of q variables evaluable on plain reals or on Jet4
// scalars through the same callable. Fields are immutable and cheap to
// copy; evaluation is reentrant.

#include <Eigen/Core>

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "infogeo/errors.hpp"
#include "infogeo/jet.hpp"

namespace infogeo {

class ScalarField {
 public:
  using RealFn = std::function<double(std::span<const double>)>;
  using JetFn = std::function<Jet4(std::span<const Jet4>)>;

  ScalarField() = default;
  ScalarField(int arity, RealFn real_fn, JetFn jet_fn)
      : arity_(arity), real_(std::move(real_fn)), jet_(std::move(jet_fn)) {}

  /// Wraps a callable that is generic over the scalar type (a lambda taking
  /// std::span<const S> for S in {double, Jet4}).
  template <class F>
  static ScalarField from_callable(int arity, F f) {
    auto shared = std::make_shared<F>(std::move(f));
    return ScalarField(
        arity, [shared](std::span<const double> y) -> double { return (*shared)(y); },
        [shared](std::span<const Jet4> y) -> Jet4 { return (*shared)(y); });
  }

  int arity() const { return arity_; }
  bool valid() const { return static_cast<bool>(real_); }

  double operator()(std::span<const double> y) const {
    check(y.size());
    return real_(y);
  }
  double operator()(const Eigen::VectorXd& y) const {
    check(static_cast<std::size_t>(y.size()));
    return real_(std::span<const double>(y.data(), y.size()));
  }
  Jet4 operator()(std::span<const Jet4> y) const {
    check(y.size());
    return jet_(y);
  }

 private:
  void check(std::size_t n) const {
    if (!real_) throw Error("evaluating an empty ScalarField");
    if (static_cast<int>(n) != arity_) throw DimensionError("ScalarField arity mismatch");
  }

  int arity_ = 0;
  RealFn real_;
  JetFn jet_;
};

}  // namespace infogeo
