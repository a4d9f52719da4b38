#include "infogeo/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <map>
#include <mutex>

#include "infogeo/errors.hpp"

namespace infogeo {

namespace {

// Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix with
// diagonal alpha_k and off-diagonal sqrt(beta_k); weights are mu0 times the
// squared first components of the eigenvectors.
QuadRule golub_welsch(int n, double mu0, const std::function<double(int)>& beta) {
  if (n < 1) throw IntegrationError("quadrature rule needs at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = std::sqrt(beta(k));
    jacobi(k, k - 1) = jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double v = solver.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v * v;
  }
  return rule;
}

const QuadRule& cached(std::map<int, QuadRule>& cache, std::mutex& mu, int n,
                       double mu0, const std::function<double(int)>& beta) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, golub_welsch(n, mu0, beta)).first;
  return it->second;
}

}  // namespace

const QuadRule& gauss_hermite(int n) {
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  return cached(cache, mu, n, std::sqrt(M_PI), [](int k) { return 0.5 * k; });
}

const QuadRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, QuadRule> cache;
  return cached(cache, mu, n, 2.0,
                [](int k) { return k * k / (4.0 * k * k - 1.0); });
}

QuadRule gauss_legendre01(int n) {
  const QuadRule& base = gauss_legendre(n);
  QuadRule out;
  out.nodes = 0.5 * (base.nodes.array() + 1.0);
  out.weights = 0.5 * base.weights;
  return out;
}

}  // namespace infogeo
