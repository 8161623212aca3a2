#pragma once

#include "tdeflate/dense_tensor.hpp"
#include "tdeflate/multi_index.hpp"
#include "tdeflate/types.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace tdeflate {

/// Homogeneous degree-d form in n variables over the scaled monomial basis:
/// the stored coefficient a_alpha represents f = sum_alpha C(d,alpha) a_alpha x^alpha,
/// with C(d,alpha) the multinomial coefficient. In this basis the Bombieri-Weyl
/// product is the weighted coefficient sum and powers of linear forms have
/// coefficients a_alpha = prod_i u_i^alpha_i, both exactly.
template <typename Scalar>
class SymmetricTensor {
 public:
  SymmetricTensor() = default;

  SymmetricTensor(int n, int d)
      : basis_(MonomialBasis::get(n, d)),
        coeffs_(VectorX<Scalar>::Zero(basis_->size())) {}

  SymmetricTensor(std::shared_ptr<const MonomialBasis> basis, VectorX<Scalar> coeffs)
      : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != basis_->size())
      throw std::invalid_argument("SymmetricTensor: coefficient count mismatch");
    if (!coeffs_.allFinite()) throw std::invalid_argument("SymmetricTensor: non-finite coefficient");
  }

  int vars() const { return basis_->vars(); }
  int degree() const { return basis_->degree(); }
  const MonomialBasis& basis() const { return *basis_; }
  std::shared_ptr<const MonomialBasis> basis_ptr() const { return basis_; }

  const VectorX<Scalar>& coeffs() const { return coeffs_; }
  VectorX<Scalar>& coeffs() { return coeffs_; }

  Scalar coeff(std::span<const int> alpha) const { return coeffs_[basis_->index_of(alpha)]; }
  Scalar& coeff(std::span<const int> alpha) { return coeffs_[basis_->index_of(alpha)]; }
  Scalar coeff(std::initializer_list<int> alpha) const {
    return coeff(std::span<const int>(alpha.begin(), alpha.size()));
  }

  /// Hermitian Bombieri-Weyl norm sqrt(sum_alpha C(d,alpha) |a_alpha|^2).
  /// Positive definite, unlike the bilinear form (isotropic powers are BW-null).
  double norm() const {
    double total = 0;
    for (int i = 0; i < basis_->size(); ++i) {
      using std::norm;
      total += basis_->weight_double(i) * norm(coeffs_[i]);
    }
    return std::sqrt(total);
  }

  /// Evaluation f(point) = sum_alpha C(d,alpha) a_alpha point^alpha.
  template <typename PointScalar>
  auto operator()(const VectorX<PointScalar>& point) const {
    using Out = decltype(Scalar{} * PointScalar{});
    if (point.size() != vars()) throw std::invalid_argument("SymmetricTensor: point dimension mismatch");
    const PowerTable<PointScalar> pw(point, degree());
    Out total{};
    for (int i = 0; i < basis_->size(); ++i) {
      if (coeffs_[i] == Scalar{}) continue;
      const auto alpha = basis_->exponent(i);
      Out mono = Out{1};
      for (int v = 0; v < vars(); ++v) mono *= pw(v, alpha[v]);
      total += basis_->weight_double(i) * coeffs_[i] * mono;
    }
    return total;
  }

  template <typename To>
  SymmetricTensor<To> cast() const {
    return SymmetricTensor<To>(basis_, coeffs_.template cast<To>());
  }
  SymmetricTensor<double> real_part() const {
    if constexpr (is_complex_scalar<Scalar>::value)
      return SymmetricTensor<double>(basis_, coeffs_.real());
    else
      return *this;
  }

  SymmetricTensor& operator+=(const SymmetricTensor& other) {
    require_same_space(other);
    coeffs_ += other.coeffs_;
    return *this;
  }
  SymmetricTensor& operator-=(const SymmetricTensor& other) {
    require_same_space(other);
    coeffs_ -= other.coeffs_;
    return *this;
  }
  SymmetricTensor& operator*=(Scalar factor) {
    coeffs_ *= factor;
    return *this;
  }
  friend SymmetricTensor operator+(SymmetricTensor a, const SymmetricTensor& b) { return a += b; }
  friend SymmetricTensor operator-(SymmetricTensor a, const SymmetricTensor& b) { return a -= b; }
  friend SymmetricTensor operator*(Scalar s, SymmetricTensor t) { return t *= s; }

  /// Cached table of point powers point_i^k, k = 0..max.
  template <typename S>
  class PowerTable {
   public:
    PowerTable(const VectorX<S>& point, int max_power)
        : n_(static_cast<int>(point.size())), stride_(max_power + 1), data_(n_ * (max_power + 1)) {
      for (int v = 0; v < n_; ++v) {
        data_[v * stride_] = S{1};
        for (int k = 1; k <= max_power; ++k) data_[v * stride_ + k] = data_[v * stride_ + k - 1] * point[v];
      }
    }
    S operator()(int var, int power) const { return data_[var * stride_ + power]; }

   private:
    int n_;
    int stride_;
    std::vector<S> data_;
  };

 private:
  void require_same_space(const SymmetricTensor& other) const {
    if (vars() != other.vars() || degree() != other.degree())
      throw std::invalid_argument("SymmetricTensor: space mismatch");
  }

  std::shared_ptr<const MonomialBasis> basis_;
  VectorX<Scalar> coeffs_;
};

using SymmetricTensorXcd = SymmetricTensor<Complex>;
using SymmetricTensorXd = SymmetricTensor<double>;

/// d-th power of a linear form; coefficient at alpha is prod_i u_i^alpha_i.
template <typename Scalar>
SymmetricTensor<Scalar> power(const VectorX<Scalar>& u, int d) {
  if (d < 1) throw std::invalid_argument("power: need d >= 1");
  if (u.size() < 1) throw std::invalid_argument("power: empty linear form");
  SymmetricTensor<Scalar> result(static_cast<int>(u.size()), d);
  const auto& basis = result.basis();
  const typename SymmetricTensor<Scalar>::template PowerTable<Scalar> pw(u, d);
  for (int i = 0; i < basis.size(); ++i) {
    const auto alpha = basis.exponent(i);
    Scalar value = Scalar{1};
    for (int v = 0; v < basis.vars(); ++v) value *= pw(v, alpha[v]);
    result.coeffs()[i] = value;
  }
  return result;
}

/// Bombieri-Weyl product sum_alpha C(d,alpha) a_alpha b_alpha. Bilinear,
/// symmetric, and satisfies <u^d, v^d> = <u,v>^d.
template <typename Scalar>
Scalar bw_inner(const SymmetricTensor<Scalar>& f, const SymmetricTensor<Scalar>& g) {
  if (f.vars() != g.vars() || f.degree() != g.degree())
    throw std::invalid_argument("bw_inner: space mismatch");
  Scalar total{};
  for (int i = 0; i < f.basis().size(); ++i)
    total += Scalar(f.basis().weight_double(i)) * f.coeffs()[i] * g.coeffs()[i];
  return total;
}

/// Gradient of f at l. Computed division-free with prefix/suffix products of
/// the power table, so zero coordinates of l are handled exactly.
template <typename Scalar, typename PointScalar>
auto gradient(const SymmetricTensor<Scalar>& f, const VectorX<PointScalar>& l)
    -> VectorX<decltype(Scalar{} * PointScalar{})> {
  using Out = decltype(Scalar{} * PointScalar{});
  const int n = f.vars();
  const int d = f.degree();
  if (l.size() != n) throw std::invalid_argument("gradient: dimension mismatch");
  const typename SymmetricTensor<Scalar>::template PowerTable<PointScalar> pw(l, d);
  VectorX<Out> g = VectorX<Out>::Zero(n);
  std::vector<Out> prefix(n + 1), suffix(n + 1);
  for (int i = 0; i < f.basis().size(); ++i) {
    if (f.coeffs()[i] == Scalar{}) continue;
    const auto alpha = f.basis().exponent(i);
    prefix[0] = Out{1};
    for (int v = 0; v < n; ++v) prefix[v + 1] = prefix[v] * pw(v, alpha[v]);
    suffix[n] = Out{1};
    for (int v = n - 1; v >= 0; --v) suffix[v] = suffix[v + 1] * pw(v, alpha[v]);
    const Out base = Out(f.basis().weight_double(i)) * f.coeffs()[i];
    for (int j = 0; j < n; ++j) {
      if (alpha[j] == 0) continue;
      g[j] += base * static_cast<double>(alpha[j]) * (prefix[j] * suffix[j + 1] * pw(j, alpha[j] - 1));
    }
  }
  return g;
}

/// Hessian of f at l.
template <typename Scalar, typename PointScalar>
auto hessian(const SymmetricTensor<Scalar>& f, const VectorX<PointScalar>& l)
    -> MatrixX<decltype(Scalar{} * PointScalar{})> {
  using Out = decltype(Scalar{} * PointScalar{});
  const int n = f.vars();
  const int d = f.degree();
  if (l.size() != n) throw std::invalid_argument("hessian: dimension mismatch");
  const typename SymmetricTensor<Scalar>::template PowerTable<PointScalar> pw(l, d);
  MatrixX<Out> h = MatrixX<Out>::Zero(n, n);
  for (int i = 0; i < f.basis().size(); ++i) {
    if (f.coeffs()[i] == Scalar{}) continue;
    const auto alpha = f.basis().exponent(i);
    const Out base = Out(f.basis().weight_double(i)) * f.coeffs()[i];
    for (int j = 0; j < n; ++j) {
      if (alpha[j] == 0) continue;
      for (int k = j; k < n; ++k) {
        const int needed = (k == j) ? 2 : 1;
        if (alpha[k] < needed) continue;
        const double count =
            static_cast<double>(alpha[j]) * static_cast<double>(alpha[k] - (k == j ? 1 : 0));
        Out mono = Out{1};
        for (int v = 0; v < n; ++v) mono *= pw(v, alpha[v] - (v == j ? 1 : 0) - (v == k ? 1 : 0));
        const Out term = base * count * mono;
        h(j, k) += term;
        if (k != j) h(k, j) += term;
      }
    }
  }
  return h;
}

/// Inner products of T with the tangent basis {l^{d-1} e_k} of the cone over
/// the Veronese at l^d; equals grad T(l) / d by the contraction identity
/// <l^{d-1} v, m^d> = <l,m>^{d-1} <v,m> extended by linearity.
template <typename Scalar, typename PointScalar>
auto veronese_tangent_residuals(const SymmetricTensor<Scalar>& t, const VectorX<PointScalar>& l)
    -> VectorX<decltype(Scalar{} * PointScalar{})> {
  auto g = gradient(t, l);
  g /= static_cast<double>(t.degree());
  return g;
}

/// Embedding into the dense d-way tensor with entry a_{type(i_1..i_d)}; it
/// matches rank_one on powers and preserves Bombieri-Weyl products.
template <typename Scalar>
DenseTensor<Scalar> to_dense(const SymmetricTensor<Scalar>& f) {
  const int n = f.vars();
  const int d = f.degree();
  std::vector<int> shape(d, n);
  DenseTensor<Scalar> result(shape);
  std::vector<int> idx(d, 0);
  std::vector<int> alpha(n, 0);
  for (Eigen::Index flat = 0; flat < result.size(); ++flat) {
    std::fill(alpha.begin(), alpha.end(), 0);
    for (int m = 0; m < d; ++m) alpha[idx[m]] += 1;
    result.entries()[flat] = f.coeffs()[f.basis().index_of(alpha)];
    for (int m = d - 1; m >= 0; --m) {
      if (++idx[m] < n) break;
      idx[m] = 0;
    }
  }
  return result;
}

}  // namespace tdeflate
