#pragma once

// Symmetric tensors on R^n in the homogeneous-polynomial model.
//
// A rank-p tensor T is stored by the coefficients t_{i_1...i_p} (i_1 <= ... <= i_p)
// of its polynomial p_T(y) = sum t_{i_1...i_p} y_{i_1} ... y_{i_p}. The symmetric
// product is polynomial multiplication, and multilinear evaluation is the averaged
// polarization of p_T.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mtl/errors.hpp"

namespace mtl {

/// Exponent vector of a monomial, one byte per coordinate, coordinate 0 in the high byte.
using MonomialKey = std::uint64_t;

inline constexpr int kMaxAmbientDim = 8;
inline constexpr int kMaxRank = 255;

/// 1-based nondecreasing multi-index (i_1, ..., i_p).
using MultiIndex = std::vector<int>;

namespace detail {

inline int exponent(MonomialKey key, int i) {
  return static_cast<int>((key >> (8 * (7 - i))) & 0xffu);
}

inline MonomialKey unit_key(int i) { return MonomialKey{1} << (8 * (7 - i)); }

inline MonomialKey key_from_multi_index(const MultiIndex& idx, int n) {
  MonomialKey key = 0;
  int prev = 1;
  for (int i : idx) {
    if (i < 1 || i > n) throw InvalidArgument("multi-index entry out of range 1.." + std::to_string(n));
    if (i < prev) throw InvalidArgument("multi-index must be nondecreasing");
    prev = i;
    key += unit_key(i - 1);
  }
  return key;
}

inline MultiIndex multi_index_from_key(MonomialKey key, int n) {
  MultiIndex idx;
  for (int i = 0; i < n; ++i)
    for (int e = exponent(key, i); e > 0; --e) idx.push_back(i + 1);
  return idx;
}

inline void enumerate_monomials(int n, int p, int first, MonomialKey acc, std::vector<MonomialKey>& out) {
  if (p == 0) {
    out.push_back(acc);
    return;
  }
  for (int i = first; i < n; ++i) enumerate_monomials(n, p - 1, i, acc + unit_key(i), out);
}

}  // namespace detail

/// All degree-p monomials in n variables, ordered lexicographically by multi-index.
inline std::vector<MonomialKey> monomial_basis(int n, int p) {
  std::vector<MonomialKey> out;
  detail::enumerate_monomials(n, p, 0, 0, out);
  return out;
}

template <typename Scalar>
class BasicSymTensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Terms = std::map<MonomialKey, Scalar>;

  BasicSymTensor() = default;

  /// Zero tensor of the given rank on R^n.
  BasicSymTensor(int n, int rank) : n_(n), rank_(rank) {
    if (n < 1 || n > kMaxAmbientDim) throw DimensionError("ambient dimension must be in 1..8");
    if (rank < 0 || rank > kMaxRank) throw InvalidArgument("tensor rank out of range");
  }

  static BasicSymTensor scalar(int n, Scalar value) {
    BasicSymTensor t(n, 0);
    t.add_term(0, value);
    return t;
  }

  static BasicSymTensor vector(const Vector& x) {
    BasicSymTensor t(static_cast<int>(x.size()), 1);
    for (int i = 0; i < t.n_; ++i) t.add_term(detail::unit_key(i), x[i]);
    return t;
  }

  int ambient_dim() const { return n_; }
  int rank() const { return rank_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Scalar coeff(const MultiIndex& idx) const {
    if (static_cast<int>(idx.size()) != rank_) throw InvalidArgument("multi-index length differs from rank");
    auto it = terms_.find(detail::key_from_multi_index(idx, n_));
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  /// Value of a rank-0 tensor.
  Scalar value() const {
    if (rank_ != 0) throw InvalidArgument("value() needs a rank-0 tensor");
    return terms_.empty() ? Scalar(0) : terms_.begin()->second;
  }

  Scalar max_abs() const {
    Scalar m(0);
    for (const auto& [k, c] : terms_) m = std::max(m, Scalar(std::abs(c)));
    return m;
  }

  /// Adds c to the coefficient of the monomial `key`; exact zeros are dropped.
  void add_term(MonomialKey key, Scalar c) {
    if (c == Scalar(0)) return;
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  BasicSymTensor& operator+=(const BasicSymTensor& o) {
    check_same_space(o);
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  BasicSymTensor& operator-=(const BasicSymTensor& o) {
    check_same_space(o);
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
  }
  BasicSymTensor& operator*=(Scalar a) {
    if (a == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= a;
    return *this;
  }

  friend BasicSymTensor operator+(BasicSymTensor a, const BasicSymTensor& b) { return a += b; }
  friend BasicSymTensor operator-(BasicSymTensor a, const BasicSymTensor& b) { return a -= b; }
  friend BasicSymTensor operator-(BasicSymTensor a) { return a *= Scalar(-1); }
  friend BasicSymTensor operator*(Scalar s, BasicSymTensor a) { return a *= s; }
  friend BasicSymTensor operator*(BasicSymTensor a, Scalar s) { return a *= s; }

  friend bool operator==(const BasicSymTensor& a, const BasicSymTensor& b) {
    return a.n_ == b.n_ && a.rank_ == b.rank_ && a.terms_ == b.terms_;
  }

 private:
  void check_same_space(const BasicSymTensor& o) const {
    if (o.n_ != n_ || o.rank_ != rank_) throw DimensionError("tensor space mismatch in addition");
  }

  int n_ = 1;
  int rank_ = 0;
  Terms terms_;
};

using SymTensor = BasicSymTensor<double>;

/// Symmetric product: the tensor whose polynomial is p_S * p_T.
template <typename Scalar>
BasicSymTensor<Scalar> sym_product(const BasicSymTensor<Scalar>& s, const BasicSymTensor<Scalar>& t) {
  if (s.ambient_dim() != t.ambient_dim()) throw DimensionError("sym_product: ambient dimensions differ");
  BasicSymTensor<Scalar> out(s.ambient_dim(), s.rank() + t.rank());
  for (const auto& [ka, ca] : s.terms())
    for (const auto& [kb, cb] : t.terms()) out.add_term(ka + kb, ca * cb);
  return out;
}

template <typename Scalar>
BasicSymTensor<Scalar> operator*(const BasicSymTensor<Scalar>& s, const BasicSymTensor<Scalar>& t) {
  return sym_product(s, t);
}

/// m-fold symmetric power T^m (T^0 is the scalar 1).
template <typename Scalar>
BasicSymTensor<Scalar> sym_power(const BasicSymTensor<Scalar>& t, int m) {
  auto out = BasicSymTensor<Scalar>::scalar(t.ambient_dim(), Scalar(1));
  for (int i = 0; i < m; ++i) out = sym_product(out, t);
  return out;
}

/// x^r, the tensor with polynomial <x, y>^r.
template <typename Derived>
BasicSymTensor<typename Derived::Scalar> vector_power(const Eigen::MatrixBase<Derived>& x, int r) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(x.size());
  BasicSymTensor<Scalar> out(n, r);
  // multinomial expansion: coefficient r!/prod(a_i!) prod x_i^{a_i}
  for (MonomialKey key : monomial_basis(n, r)) {
    Scalar c(1);
    int remaining = r;
    for (int i = 0; i < n && c != Scalar(0); ++i) {
      const int a = detail::exponent(key, i);
      // binom(remaining, a) * x_i^a
      Scalar binom(1);
      for (int j = 1; j <= a; ++j) binom = binom * Scalar(remaining - a + j) / Scalar(j);
      c *= binom * Scalar(std::pow(x[i], a));
      remaining -= a;
    }
    out.add_term(key, c);
  }
  return out;
}

/// Metric tensor Q on R^n.
template <typename Scalar = double>
BasicSymTensor<Scalar> metric_tensor(int n) {
  BasicSymTensor<Scalar> q(n, 2);
  for (int i = 0; i < n; ++i) q.add_term(2 * detail::unit_key(i), Scalar(1));
  return q;
}

/// Value of the polynomial p_T at y, i.e. T(y, ..., y).
template <typename Scalar, typename Derived>
Scalar evaluate_polynomial(const BasicSymTensor<Scalar>& t, const Eigen::MatrixBase<Derived>& y) {
  if (y.size() != t.ambient_dim()) throw DimensionError("evaluate_polynomial: point dimension mismatch");
  Scalar sum(0);
  for (const auto& [key, c] : t.terms()) {
    Scalar term = c;
    for (int i = 0; i < t.ambient_dim(); ++i) {
      const int e = detail::exponent(key, i);
      for (int k = 0; k < e; ++k) term *= y[i];
    }
    sum += term;
  }
  return sum;
}

/// Fully symmetric multilinear form T(x_1, ..., x_p), by averaged polarization:
/// p! T(x_1..x_p) = sum over subsets S of (-1)^{p-|S|} p_T(sum_{i in S} x_i).
template <typename Scalar>
Scalar evaluate(const BasicSymTensor<Scalar>& t,
                const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& args) {
  const int p = t.rank();
  if (static_cast<int>(args.size()) != p) throw InvalidArgument("evaluate: arity differs from rank");
  for (const auto& a : args)
    if (a.size() != t.ambient_dim()) throw DimensionError("evaluate: argument dimension mismatch");
  if (p == 0) return t.value();
  if (p > 20) throw InvalidArgument("evaluate: rank too large for polarization");
  Scalar sum(0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(t.ambient_dim());
  for (std::uint32_t mask = 1; mask < (1u << p); ++mask) {
    y.setZero();
    int count = 0;
    for (int i = 0; i < p; ++i)
      if (mask & (1u << i)) {
        y += args[i];
        ++count;
      }
    const Scalar v = evaluate_polynomial(t, y);
    sum += ((p - count) % 2 == 0) ? v : -v;
  }
  Scalar factorial(1);
  for (int i = 2; i <= p; ++i) factorial *= Scalar(i);
  return sum / factorial;
}

/// The tensor with polynomial y -> p_T(M^T y). M has one row per output coordinate and one
/// column per input coordinate; column i is the linear form replacing coordinate i.
template <typename Scalar, typename Derived>
BasicSymTensor<Scalar> substitute(const BasicSymTensor<Scalar>& t, const Eigen::MatrixBase<Derived>& m) {
  if (m.cols() != t.ambient_dim()) throw DimensionError("substitute: matrix columns differ from ambient dimension");
  const int n_out = static_cast<int>(m.rows());
  const int n_in = t.ambient_dim();
  // powers[i][e] = (column i)^e
  std::vector<std::vector<BasicSymTensor<Scalar>>> powers(n_in);
  for (int i = 0; i < n_in; ++i) {
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> col = m.col(i);
    powers[i].push_back(BasicSymTensor<Scalar>::scalar(n_out, Scalar(1)));
    powers[i].push_back(BasicSymTensor<Scalar>::vector(col));
  }
  BasicSymTensor<Scalar> out(n_out, t.rank());
  for (const auto& [key, c] : t.terms()) {
    auto term = BasicSymTensor<Scalar>::scalar(n_out, c);
    for (int i = 0; i < n_in; ++i) {
      const int e = detail::exponent(key, i);
      while (static_cast<int>(powers[i].size()) <= e) powers[i].push_back(sym_product(powers[i].back(), powers[i][1]));
      if (e > 0) term = sym_product(term, powers[i][e]);
    }
    out += term;
  }
  return out;
}

/// Largest coefficient-wise difference |a - b|.
template <typename Scalar>
Scalar max_abs_diff(const BasicSymTensor<Scalar>& a, const BasicSymTensor<Scalar>& b) {
  return (a - b).max_abs();
}

/// Coefficients whose magnitude is at most `tol` removed.
template <typename Scalar>
BasicSymTensor<Scalar> pruned(const BasicSymTensor<Scalar>& t, Scalar tol) {
  BasicSymTensor<Scalar> out(t.ambient_dim(), t.rank());
  for (const auto& [k, c] : t.terms())
    if (std::abs(c) > tol) out.add_term(k, c);
  return out;
}

/// Polynomial coefficient list (multi-index, t_{i_1..i_p}) in multi-index order.
template <typename Scalar>
std::vector<std::pair<MultiIndex, Scalar>> to_polynomial(const BasicSymTensor<Scalar>& t) {
  std::vector<std::pair<MultiIndex, Scalar>> out;
  for (const auto& [k, c] : t.terms()) out.emplace_back(detail::multi_index_from_key(k, t.ambient_dim()), c);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

template <typename Scalar>
BasicSymTensor<Scalar> from_polynomial(const std::vector<std::pair<MultiIndex, Scalar>>& coeffs, int n, int p) {
  BasicSymTensor<Scalar> out(n, p);
  for (const auto& [idx, c] : coeffs) {
    if (static_cast<int>(idx.size()) != p) throw InvalidArgument("from_polynomial: multi-index length differs from rank");
    out.add_term(detail::key_from_multi_index(idx, n), c);
  }
  return out;
}

/// Coefficient vector over monomial_basis(n, rank); the flat view used by least-squares code.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coefficient_vector(const BasicSymTensor<Scalar>& t) {
  const auto basis = monomial_basis(t.ambient_dim(), t.rank());
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    auto it = t.terms().find(basis[i]);
    v[static_cast<Eigen::Index>(i)] = it == t.terms().end() ? Scalar(0) : it->second;
  }
  return v;
}

template <typename Scalar, typename Derived>
BasicSymTensor<Scalar> from_coefficient_vector(const Eigen::MatrixBase<Derived>& v, int n, int p) {
  const auto basis = monomial_basis(n, p);
  if (static_cast<std::size_t>(v.size()) != basis.size()) throw DimensionError("coefficient vector has wrong length");
  BasicSymTensor<Scalar> out(n, p);
  for (std::size_t i = 0; i < basis.size(); ++i) out.add_term(basis[i], v[static_cast<Eigen::Index>(i)]);
  return out;
}

}  // namespace mtl
