#pragma once

// Forward-mode truncated Taylor arithmetic in q variables up to total
// order 4. A Jet4 stores the Taylor coefficients c_a = d^a f / a! for
// every multi-index a with |a| <= 4; arithmetic propagates them exactly
// (generalized Leibniz / series composition), so extracted partials carry
// no truncation error beyond floating point.
//
// Callers see raw partial derivatives d^a f (Taylor coefficient times a!),
// matching the index notation of the tensor calculus built on top.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "infogeo/errors.hpp"

namespace infogeo {

/// Exponent vector, one entry per variable. order(a) = sum of entries.
using MultiIndex = std::vector<int>;

inline int order(const MultiIndex& a) {
  int s = 0;
  for (int e : a) s += e;
  return s;
}

/// a! = prod of factorials of the entries.
double multi_factorial(const MultiIndex& a);

/// Per-dimension enumeration of multi-indices with |a| <= 4 plus the
/// convolution pairing used by jet multiplication. Built once per q and
/// shared by every Jet4 of that dimension.
class JetTable {
 public:
  static constexpr int kMaxOrder = 4;

  static std::shared_ptr<const JetTable> get(int dim);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const MultiIndex& index(int i) const { return indices_[i]; }
  int order_of(int i) const { return orders_[i]; }
  double factorial(int i) const { return factorials_[i]; }

  /// Position of a multi-index; throws OrderError if |a| > 4 or a has
  /// the wrong arity.
  int position(const MultiIndex& a) const;

  /// All coefficient pairs (u, v) with index(u) + index(v) = index(g).
  const std::vector<std::pair<int, int>>& conv_pairs(int g) const { return pairs_[g]; }

 private:
  explicit JetTable(int dim);

  int dim_;
  std::vector<MultiIndex> indices_;
  std::vector<int> orders_;
  std::vector<double> factorials_;
  std::vector<std::vector<std::pair<int, int>>> pairs_;
  std::unordered_map<std::uint64_t, int> positions_;
};

class Jet4 {
 public:
  Jet4() = default;

  static Jet4 constant(int dim, double value);
  /// Seeds variable `axis` (0-based): value plus unit first-order term.
  static Jet4 variable(int dim, int axis, double value);

  int dim() const { return table_ ? table_->dim() : 0; }
  double value() const { return coeff_.size() ? coeff_[0] : 0.0; }

  /// Raw partial derivative d^a f (not divided by a!).
  double partial(const MultiIndex& a) const;

  /// Taylor coefficients in table order (coeff[i] = d^(index(i)) f / index(i)!).
  const Eigen::VectorXd& taylor() const { return coeff_; }
  const JetTable& table() const { return *table_; }

  Jet4 operator-() const;
  Jet4& operator+=(const Jet4& o);
  Jet4& operator-=(const Jet4& o);

  friend Jet4 operator+(Jet4 a, const Jet4& b) { return a += b; }
  friend Jet4 operator-(Jet4 a, const Jet4& b) { return a -= b; }
  friend Jet4 operator*(const Jet4& a, const Jet4& b);
  friend Jet4 operator/(const Jet4& a, const Jet4& b);

  friend Jet4 operator+(Jet4 a, double s);
  friend Jet4 operator+(double s, Jet4 a) { return std::move(a) + s; }
  friend Jet4 operator-(Jet4 a, double s) { return std::move(a) + (-s); }
  friend Jet4 operator-(double s, const Jet4& a) { return -a + s; }
  friend Jet4 operator*(Jet4 a, double s);
  friend Jet4 operator*(double s, Jet4 a) { return std::move(a) * s; }
  friend Jet4 operator/(Jet4 a, double s);
  friend Jet4 operator/(double s, const Jet4& a);

  /// g(f) for univariate g with derivatives g_derivs[k] = g^(k)(f.value()).
  /// Exact at truncation order 4: g(f0 + u) = sum_k g^(k)(f0)/k! u^k with
  /// u = f - f0 nilpotent beyond order 4.
  Jet4 compose(const std::array<double, 5>& g_derivs) const;

 private:
  Jet4(std::shared_ptr<const JetTable> table, Eigen::VectorXd coeff)
      : table_(std::move(table)), coeff_(std::move(coeff)) {}

  void require_same_table(const Jet4& o) const;

  std::shared_ptr<const JetTable> table_;
  Eigen::VectorXd coeff_;
};

Jet4 exp(const Jet4& f);
Jet4 log(const Jet4& f);    // DomainError if f.value() <= 0
Jet4 sqrt(const Jet4& f);   // DomainError if f.value() <= 0
Jet4 pow(const Jet4& f, double p);
Jet4 pow(const Jet4& f, int p);

// Plain-double passthroughs so scalar-generic code (expression evaluation,
// built-in potentials) resolves by unqualified lookup for both types.
inline double exp(double x) { return std::exp(x); }
inline double log(double x) {
  if (x <= 0.0) throw DomainError("log of non-positive value");
  return std::log(x);
}
inline double sqrt(double x) {
  if (x < 0.0) throw DomainError("sqrt of negative value");
  return std::sqrt(x);
}
inline double pow(double x, int p) {
  if (x == 0.0 && p < 0) throw DomainError("zero raised to a negative power");
  return std::pow(x, p);
}
inline double pow(double x, double p) {
  double ip;
  if (std::modf(p, &ip) == 0.0 && std::abs(ip) <= 64) return pow(x, static_cast<int>(ip));
  if (x <= 0.0) throw DomainError("non-integer power of a non-positive base");
  return std::pow(x, p);
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet4& x) { return x.value(); }

}  // namespace infogeo
