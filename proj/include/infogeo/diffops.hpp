#pragma once

// Pointwise differentiation of scalar fields: exact mixed partials up to
// order 4 by jet propagation, and an independent central finite-difference
// oracle with one step of Richardson extrapolation.

#include <Eigen/Core>

#include <functional>

#include "infogeo/jet.hpp"
#include "infogeo/scalar_field.hpp"

namespace infogeo {

/// Jet of f at y: every partial derivative with |a| <= 4 in one evaluation.
Jet4 jet_of(const ScalarField& f, const Eigen::VectorXd& y);

/// d^alpha f(y) by jet propagation. No truncation error beyond floating
/// point. Throws OrderError if |alpha| > 4, DomainError from f itself.
double mixed_partial(const ScalarField& f, const Eigen::VectorXd& y, const MultiIndex& alpha);

/// Central-difference estimate of d^alpha f(y) with one Richardson step
/// (combines the full- and half-step stencils, cancelling the leading h^2
/// term, so the truncation error is O(h^4); rounding grows like h^-|alpha|).
/// The per-axis step is `step * max(1, |y_i|)`.
double fd_partial(const ScalarField& f, const Eigen::VectorXd& y, const MultiIndex& alpha,
                  double step);

/// Default base step for a total derivative order k, balancing the h^4
/// Richardson truncation against the h^-k rounding floor:
///   k = 1: 1e-3,  k = 2: 5e-3,  k = 3: 1.2e-2,  k = 4: 1.6e-2.
/// (The naive eps^(1/6) choice is rounding-dominated for k >= 3.)
double fd_default_step(int total_order);

/// fd_partial with the per-order default step.
double fd_partial(const ScalarField& f, const Eigen::VectorXd& y, const MultiIndex& alpha);

/// Richardson-extrapolated central differences of a vector-valued field
/// (components differentiated jointly; step scaled by max(1, |y_axis|)).
/// The second-derivative variant extrapolates twice (O(h^6) truncation),
/// which the lifted-curvature checks need on stiff barrier metrics.
using VectorFieldFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
Eigen::VectorXd field_partial(const VectorFieldFn& f, const Eigen::VectorXd& y, int axis,
                              double step);
Eigen::VectorXd field_second_partial(const VectorFieldFn& f, const Eigen::VectorXd& y, int axis1,
                                     int axis2, double step);

/// Default step for differentiating smooth exactly-evaluable fields
/// (Christoffel and metric fields backed by jets). Smaller than the
/// fd_partial defaults: those budget for noisy user functions.
inline constexpr double kSmoothFieldStep = 3e-4;

}  // namespace infogeo
