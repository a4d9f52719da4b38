#pragma once

// The lifted metric on tube coordinates z^i = y^i + i*dy^i over a Hessian
// base, and the curvature bridges between the two pictures. Every lifted
// field depends only on Re z, so holomorphic derivatives reduce to half the
// real partials, and the whole computation stays over pairs of reals.
//
// Curvature sign convention: textbook Kahler conventions differ by a global
// sign. The sign here is fixed once so that the lifted curvature of the
// reference potential -log y1 equals +1/2 Q, and the holomorphic sectional
// curvature carries the matching normalization (a frozen factor -2), which
// makes a base of constant sectional curvature c lift to constant
// holomorphic sectional curvature -c. Both constants are pinned by tests.

#include <Eigen/Core>

#include <complex>

#include "infogeo/hessian.hpp"

namespace infogeo {

struct KahlerPoint {
  HessianPoint base;
  Vector fiber;  // the dy^i coordinates; lifted fields must not depend on it
};

KahlerPoint kahler_point(const ScalarField& phi, const Vector& y, const Vector& fiber);

/// g^N_{i jbar}(z) = g_ij(Re z); real symmetric because the base metric is.
Matrix kahler_metric(const KahlerPoint& kp);

/// Lifted curvature tensor R^N_{i jbar k lbar} (component order i,j,k,l)
/// from the standard component formula with d_k = 1/2 d/dy^k, evaluated by
/// finite differences of the metric field only. Independent of the
/// fourth-order jet route on the base.
Tensor4 kahler_curvature(const KahlerPoint& kp);

/// Lifted Ricci tensor, -1/4 d^2 log det g, again by finite differences.
Matrix kahler_ricci(const KahlerPoint& kp);

/// Holomorphic sectional curvature of the lift in direction v != 0.
double holomorphic_sectional(const KahlerPoint& kp, const Eigen::VectorXcd& v);

struct KahlerCheck {
  double r_residual = 0.0;      // |R^N - 1/2 Q|_inf
  double ricci_residual = 0.0;  // |Ric^N + 1/2 beta|_inf
  double holo_sectional = 0.0;  // sample value along (1,1,..)/sqrt(q)
};

/// Runs the lifted computations and compares them with the base tensors.
KahlerCheck kahler_checks(const ScalarField& phi, const Vector& y, const Vector& fiber,
                          double route_tol = 1e-9);

}  // namespace infogeo
