#pragma once

// Fisher information matrices of parametric families, degeneracy detection
// and the kernel-foliation checks: constant rank, involutivity of the
// kernel distribution, leafwise constancy of the induced metric, and the
// transverse (Hessian-candidate) reduction.
//
// Both classical forms are computed from one jet pass per integration node:
//   g_ij = E[ d_i l d_j l ]      (score outer product)
//   g_ij = -E[ d^2_ij l ]        (negated expected Hessian)
// Expectations run over exact sums for finite sample spaces, Gauss-Hermite
// nodes recentred by per-axis (center, scale) hints on the real line,
// mapped Gauss-Legendre on half-lines, or seeded importance-sampling Monte
// Carlo on request.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "infogeo/expr.hpp"
#include "infogeo/hessian.hpp"
#include "infogeo/scalar_field.hpp"
#include "infogeo/tensor.hpp"

namespace infogeo {

enum class AxisKind { Finite, Line, HalfLine };

/// One coordinate of the sample space. Continuous axes carry location and
/// scale hints (functions of the parameter point) used to place quadrature
/// nodes or proposal samples; the hints affect accuracy, never correctness.
struct SampleAxis {
  AxisKind kind = AxisKind::Line;
  std::vector<double> points;                    // Finite
  std::function<double(const Vector&)> center;   // Line; default 0
  std::function<double(const Vector&)> scale;    // Line/HalfLine; default 1
};

SampleAxis finite_axis(std::vector<double> points);
SampleAxis line_axis(std::function<double(const Vector&)> center = {},
                     std::function<double(const Vector&)> scale = {});
SampleAxis half_line_axis(std::function<double(const Vector&)> scale = {});

struct Integration {
  enum class Method { ExactSum, GaussHermite, GaussLegendre, MonteCarlo };
  Method method = Method::GaussHermite;
  int n = 64;             // nodes per continuous axis (GH), or samples (MC)
  int n_half_line = 128;  // mapped Gauss-Legendre nodes per half-line axis
  std::uint64_t seed = 1; // Monte Carlo only
};

struct FamilySpec {
  std::string name;
  int param_dim = 0;
  std::vector<SampleAxis> axes;
  ScalarField log_density;  // arity x_dim() + param_dim, variables (x..., params...)
  Integration integration;
  std::vector<std::string> param_names;

  int x_dim() const { return static_cast<int>(axes.size()); }
};

// Built-in families.
FamilySpec gaussian_family();                 // params (mu, sigma), sigma > 0
FamilySpec bernoulli_logit_family();          // param theta
FamilySpec categorical_softmax_family(int k); // params theta_1..theta_k; rank k-1
FamilySpec exponential_rate_family();         // param rate > 0

/// Natural exponential family with sufficient statistic T(x) = x:
/// l(x; t) = <t, x> + log_base(x) - psi(t). The log-partition psi must
/// match the declared sample space and base term for the density to
/// normalize (the audit below checks this).
FamilySpec exp_family_natural(const ExprAst& psi, std::vector<SampleAxis> axes,
                              ScalarField log_base = {});
FamilySpec exp_family_bernoulli();             // psi = log(1 + exp t)
FamilySpec exp_family_gaussian_location(int m);// psi = |t|^2/2, base N(0, I)

/// Precomposition of the parameters with a fixed matrix: inner params = A t.
FamilySpec linear_reparam(const FamilySpec& inner, const Matrix& a);

struct FisherResult {
  Matrix g;
  std::string method;
  double est_error = 0.0;
  int rank = 0;
  std::vector<Vector> kernel;  // orthonormal
  double psd_margin = 0.0;     // smallest eigenvalue
};

/// E[ d_i l d_j l ] with eigen-analysis attached.
FisherResult fisher_outer(const FamilySpec& f, const Vector& lam);
/// -E[ d^2_ij l ], same integration nodes and analysis.
FisherResult fisher_hess(const FamilySpec& f, const Vector& lam);

/// \int p(x; lam) dx by the family's integration rule; should be ~1.
double normalization_mass(const FamilySpec& f, const Vector& lam);

/// Validates the PSD margin (NotPSDError beyond -max(tol*|g|, 1e-12)) and
/// returns (rank, kernel) at the given relative tolerance.
std::pair<int, std::vector<Vector>> psd_and_kernel(const FisherResult& r, double tol = 1e-9);

struct RankProfile {
  std::vector<int> ranks;
  bool constant_rank = false;
  int rank = -1;
  std::vector<std::size_t> deviating;  // indices into the sample list
};
RankProfile rank_profile(const FamilySpec& f, const std::vector<Vector>& sample, double tol = 1e-9);

/// Involutivity of the kernel distribution at lam: Lie brackets of a
/// smoothly aligned orthonormal kernel frame, measured orthogonally to the
/// kernel. Throws RankDriftError if the rank changes inside the stencil.
double involutivity_residual(const FamilySpec& f, const Vector& lam, double tol = 1e-9);

/// max over kernel directions K and normal-frame pairs (Y, Z) of
/// |d_K g_F(Y, Z)|; near-zero certifies the induced metric is foliated.
double leafwise_constancy_residual(const FamilySpec& f, const Vector& lam, double tol = 1e-9);

struct TransverseReduction {
  Matrix basis;      // m x q, orthonormal columns spanning the normal space
  Matrix reduced_g;  // q x q restriction of g_F
  double codazzi_residual;  // of the reduced metric field along the basis
};
TransverseReduction transverse_reduce(const FamilySpec& f, const Vector& lam, double tol = 1e-9);

}  // namespace infogeo
