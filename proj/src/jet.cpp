#include "infogeo/jet.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace infogeo {

namespace {

// Packs a multi-index into a base-5 key (each exponent is <= 4).
std::uint64_t pack(const MultiIndex& a) {
  std::uint64_t k = 0;
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i) k = k * 5 + a[i];
  return k;
}

void enumerate(int dim, int max_order, MultiIndex& cur, int axis, int remaining,
               std::vector<MultiIndex>& out) {
  if (axis == dim) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur[axis] = e;
    enumerate(dim, max_order, cur, axis + 1, remaining - e, out);
  }
  cur[axis] = 0;
}

}  // namespace

double multi_factorial(const MultiIndex& a) {
  double f = 1.0;
  for (int e : a)
    for (int k = 2; k <= e; ++k) f *= k;
  return f;
}

JetTable::JetTable(int dim) : dim_(dim) {
  if (dim < 1 || dim > 16) throw DimensionError("jet dimension must be in [1,16]");
  MultiIndex cur(dim, 0);
  enumerate(dim, kMaxOrder, cur, 0, kMaxOrder, indices_);
  // Sort by (order, lexicographic) so position 0 is the constant term.
  std::sort(indices_.begin(), indices_.end(), [](const MultiIndex& a, const MultiIndex& b) {
    int oa = order(a), ob = order(b);
    if (oa != ob) return oa < ob;
    return a < b;
  });

  for (int i = 0; i < size(); ++i) positions_[pack(indices_[i])] = i;

  orders_.resize(size());
  factorials_.resize(size());
  pairs_.resize(size());
  for (int i = 0; i < size(); ++i) {
    orders_[i] = order(indices_[i]);
    factorials_[i] = multi_factorial(indices_[i]);
  }
  // Convolution pairs: for each target g, all (u, v) with u + v = g.
  for (int u = 0; u < size(); ++u) {
    for (int v = 0; v < size(); ++v) {
      if (orders_[u] + orders_[v] > kMaxOrder) continue;
      MultiIndex sum(dim_);
      for (int k = 0; k < dim_; ++k) sum[k] = indices_[u][k] + indices_[v][k];
      pairs_[positions_.at(pack(sum))].emplace_back(u, v);
    }
  }
}

std::shared_ptr<const JetTable> JetTable::get(int dim) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const JetTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(dim);
  if (it != cache.end()) return it->second;
  auto table = std::shared_ptr<const JetTable>(new JetTable(dim));
  cache[dim] = table;
  return table;
}

int JetTable::position(const MultiIndex& a) const {
  if (static_cast<int>(a.size()) != dim_)
    throw DimensionError("multi-index arity does not match jet dimension");
  if (order(a) > kMaxOrder) {
    std::ostringstream os;
    os << "derivative order " << order(a) << " exceeds the jet order " << kMaxOrder;
    throw OrderError(os.str());
  }
  for (int e : a)
    if (e < 0) throw DimensionError("negative multi-index entry");
  auto it = positions_.find(pack(a));
  if (it == positions_.end()) throw DimensionError("multi-index not found");
  return it->second;
}

Jet4 Jet4::constant(int dim, double value) {
  auto t = JetTable::get(dim);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(t->size());
  c[0] = value;
  return Jet4(std::move(t), std::move(c));
}

Jet4 Jet4::variable(int dim, int axis, double value) {
  if (axis < 0 || axis >= dim) throw DimensionError("variable axis out of range");
  auto t = JetTable::get(dim);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(t->size());
  c[0] = value;
  MultiIndex e(dim, 0);
  e[axis] = 1;
  c[t->position(e)] = 1.0;
  return Jet4(std::move(t), std::move(c));
}

double Jet4::partial(const MultiIndex& a) const {
  if (!table_) throw DimensionError("partial() on an empty jet");
  int i = table_->position(a);
  return coeff_[i] * table_->factorial(i);
}

void Jet4::require_same_table(const Jet4& o) const {
  if (!table_ || !o.table_ || table_->dim() != o.table_->dim())
    throw DimensionError("jet dimensions do not match");
}

Jet4 Jet4::operator-() const {
  Jet4 r = *this;
  r.coeff_ = -r.coeff_;
  return r;
}

Jet4& Jet4::operator+=(const Jet4& o) {
  require_same_table(o);
  coeff_ += o.coeff_;
  return *this;
}

Jet4& Jet4::operator-=(const Jet4& o) {
  require_same_table(o);
  coeff_ -= o.coeff_;
  return *this;
}

Jet4 operator*(const Jet4& a, const Jet4& b) {
  a.require_same_table(b);
  const JetTable& t = *a.table_;
  Eigen::VectorXd c(t.size());
  for (int g = 0; g < t.size(); ++g) {
    double s = 0.0;
    for (auto [u, v] : t.conv_pairs(g)) s += a.coeff_[u] * b.coeff_[v];
    c[g] = s;
  }
  return Jet4(a.table_, std::move(c));
}

Jet4 operator/(const Jet4& a, const Jet4& b) {
  double b0 = b.value();
  if (b0 == 0.0) throw DomainError("division by zero while propagating a jet");
  // 1/u expanded at b0: d^k (1/u) = (-1)^k k! / b0^(k+1).
  std::array<double, 5> inv;
  double p = 1.0 / b0, fact = 1.0, sign = 1.0;
  for (int k = 0; k <= 4; ++k) {
    inv[k] = sign * fact * p;
    p /= b0;
    fact *= (k + 1);
    sign = -sign;
  }
  return a * b.compose(inv);
}

Jet4 operator+(Jet4 a, double s) {
  if (!a.table_) throw DimensionError("arithmetic on an empty jet");
  a.coeff_[0] += s;
  return a;
}

Jet4 operator*(Jet4 a, double s) {
  if (!a.table_) throw DimensionError("arithmetic on an empty jet");
  a.coeff_ *= s;
  return a;
}

Jet4 operator/(Jet4 a, double s) {
  if (s == 0.0) throw DomainError("division by zero");
  a.coeff_ /= s;
  return a;
}

Jet4 operator/(double s, const Jet4& a) { return Jet4::constant(a.dim(), s) / a; }

Jet4 Jet4::compose(const std::array<double, 5>& g) const {
  if (!table_) throw DimensionError("compose() on an empty jet");
  Jet4 u = *this;
  u.coeff_[0] = 0.0;  // u = f - f0, nilpotent: u^5 truncates away
  Jet4 acc = Jet4::constant(dim(), g[0]);
  Jet4 upow = u;
  double kfact = 1.0;
  for (int k = 1; k <= 4; ++k) {
    kfact *= k;
    if (g[k] != 0.0) acc += upow * (g[k] / kfact);
    if (k < 4) upow = upow * u;
  }
  return acc;
}

Jet4 exp(const Jet4& f) {
  double e = std::exp(f.value());
  return f.compose({e, e, e, e, e});
}

Jet4 log(const Jet4& f) {
  double x = f.value();
  if (x <= 0.0) throw DomainError("log of non-positive value while propagating a jet");
  double ix = 1.0 / x;
  return f.compose({std::log(x), ix, -ix * ix, 2.0 * ix * ix * ix, -6.0 * ix * ix * ix * ix});
}

Jet4 sqrt(const Jet4& f) {
  double x = f.value();
  if (x <= 0.0) throw DomainError("sqrt of non-positive value while propagating a jet");
  double r = std::sqrt(x);
  double ix = 1.0 / x;
  return f.compose({r, 0.5 * r * ix, -0.25 * r * ix * ix, 0.375 * r * ix * ix * ix,
                    -0.9375 * r * ix * ix * ix * ix});
}

Jet4 pow(const Jet4& f, int p) {
  if (p == 0) return Jet4::constant(f.dim(), 1.0);
  if (p < 0) {
    if (f.value() == 0.0) throw DomainError("zero raised to a negative power");
    return 1.0 / pow(f, -p);
  }
  // Square-and-multiply keeps polynomial jets exact.
  Jet4 acc = Jet4::constant(f.dim(), 1.0);
  Jet4 base = f;
  int e = p;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return acc;
}

Jet4 pow(const Jet4& f, double p) {
  double ip;
  if (std::modf(p, &ip) == 0.0 && std::abs(ip) <= 64)
    return pow(f, static_cast<int>(ip));
  double x = f.value();
  if (x <= 0.0) throw DomainError("non-integer power of a non-positive base");
  std::array<double, 5> g;
  double coef = 1.0, xp = std::pow(x, p);
  for (int k = 0; k <= 4; ++k) {
    g[k] = coef * xp;
    coef *= (p - k);
    xp /= x;
  }
  return f.compose(g);
}

}  // namespace infogeo
