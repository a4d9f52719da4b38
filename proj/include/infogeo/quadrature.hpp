#pragma once

// Gauss quadrature rules built by the Golub-Welsch algorithm (eigenvalues
// of the Jacobi matrix of the orthogonal-polynomial recurrence), so node
// sets are deterministic and need no tables.

#include <Eigen/Core>

namespace infogeo {

struct QuadRule {
  Eigen::VectorXd nodes;    // ascending
  Eigen::VectorXd weights;  // positive
};

/// Weight exp(-x^2) on the real line; weights sum to sqrt(pi).
const QuadRule& gauss_hermite(int n);

/// Interval [-1, 1] with unit weight; weights sum to 2.
const QuadRule& gauss_legendre(int n);

/// Interval [0, 1] with unit weight.
QuadRule gauss_legendre01(int n);

}  // namespace infogeo
