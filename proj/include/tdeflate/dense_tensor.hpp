#pragma once

#include "tdeflate/types.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace tdeflate {

/// Dense p-way tensor with shape n_1 x ... x n_p, stored row-major with the
/// last index fastest. Value type; all operations below leave inputs intact.
template <typename Scalar>
class DenseTensor {
 public:
  DenseTensor() = default;

  explicit DenseTensor(std::vector<int> shape)
      : shape_(std::move(shape)), entries_(VectorX<Scalar>::Zero(checked_size(shape_))) {}

  DenseTensor(std::vector<int> shape, VectorX<Scalar> entries)
      : shape_(std::move(shape)), entries_(std::move(entries)) {
    if (entries_.size() != checked_size(shape_))
      throw std::invalid_argument("DenseTensor: entry count does not match shape");
    if (!entries_.allFinite()) throw std::invalid_argument("DenseTensor: non-finite entry");
  }

  int order() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  Eigen::Index size() const { return entries_.size(); }

  const VectorX<Scalar>& entries() const { return entries_; }
  VectorX<Scalar>& entries() { return entries_; }

  Scalar operator()(std::span<const int> idx) const { return entries_[offset(idx)]; }
  Scalar& operator()(std::span<const int> idx) { return entries_[offset(idx)]; }
  Scalar at(std::initializer_list<int> idx) const {
    return entries_[offset(std::span<const int>(idx.begin(), idx.size()))];
  }
  Scalar& at(std::initializer_list<int> idx) {
    return entries_[offset(std::span<const int>(idx.begin(), idx.size()))];
  }

  /// Frobenius norm; for complex scalars the Hermitian (positive) one.
  double norm() const { return entries_.norm(); }

  template <typename To>
  DenseTensor<To> cast() const {
    return DenseTensor<To>(shape_, entries_.template cast<To>());
  }
  DenseTensor<double> real_part() const {
    if constexpr (is_complex_scalar<Scalar>::value)
      return DenseTensor<double>(shape_, entries_.real());
    else
      return *this;
  }

  /// Flattening with the given modes as rows (ascending order), the complement
  /// as columns. Any index partition is reachable this way.
  MatrixX<Scalar> flatten(const std::vector<int>& row_modes) const {
    const int p = order();
    std::vector<bool> in_rows(p, false);
    for (int m : row_modes) {
      if (m < 0 || m >= p || in_rows[m]) throw std::invalid_argument("flatten: bad mode list");
      in_rows[m] = true;
    }
    if (row_modes.empty() || static_cast<int>(row_modes.size()) == p)
      throw std::invalid_argument("flatten: partition must be proper");
    Eigen::Index rows = 1, cols = 1;
    for (int m = 0; m < p; ++m) (in_rows[m] ? rows : cols) *= shape_[m];
    MatrixX<Scalar> out(rows, cols);
    std::vector<int> idx(p, 0);
    for (Eigen::Index flat = 0; flat < entries_.size(); ++flat) {
      Eigen::Index r = 0, c = 0;
      for (int m = 0; m < p; ++m) {
        if (in_rows[m])
          r = r * shape_[m] + idx[m];
        else
          c = c * shape_[m] + idx[m];
      }
      out(r, c) = entries_[flat];
      for (int m = p - 1; m >= 0; --m) {
        if (++idx[m] < shape_[m]) break;
        idx[m] = 0;
      }
    }
    return out;
  }

  DenseTensor& operator+=(const DenseTensor& other) {
    require_same_shape(other);
    entries_ += other.entries_;
    return *this;
  }
  DenseTensor& operator-=(const DenseTensor& other) {
    require_same_shape(other);
    entries_ -= other.entries_;
    return *this;
  }
  DenseTensor& operator*=(Scalar factor) {
    entries_ *= factor;
    return *this;
  }
  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(Scalar s, DenseTensor t) { return t *= s; }

 private:
  static Eigen::Index checked_size(const std::vector<int>& shape) {
    if (shape.empty()) throw std::invalid_argument("DenseTensor: empty shape");
    Eigen::Index total = 1;
    for (int n : shape) {
      if (n < 1) throw std::invalid_argument("DenseTensor: non-positive extent");
      total *= n;
    }
    return total;
  }

  Eigen::Index offset(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != order())
      throw std::invalid_argument("DenseTensor: index rank mismatch");
    Eigen::Index off = 0;
    for (int m = 0; m < order(); ++m) {
      if (idx[m] < 0 || idx[m] >= shape_[m]) throw std::out_of_range("DenseTensor: index out of range");
      off = off * shape_[m] + idx[m];
    }
    return off;
  }

  void require_same_shape(const DenseTensor& other) const {
    if (shape_ != other.shape_) throw std::invalid_argument("DenseTensor: shape mismatch");
  }

  std::vector<int> shape_;
  VectorX<Scalar> entries_;
};

using DenseTensorXcd = DenseTensor<Complex>;
using DenseTensorXd = DenseTensor<double>;

/// x_1 (x) x_2 (x) ... (x) x_p with entry (i_1,...,i_p) = prod_k x_k[i_k].
template <typename Scalar>
DenseTensor<Scalar> rank_one(std::span<const VectorX<Scalar>> factors) {
  if (factors.size() < 2) throw std::invalid_argument("rank_one: need at least two factors");
  std::vector<int> shape;
  shape.reserve(factors.size());
  for (const auto& f : factors) {
    if (f.size() < 1) throw std::invalid_argument("rank_one: empty factor");
    shape.push_back(static_cast<int>(f.size()));
  }
  DenseTensor<Scalar> result(shape);
  const int p = static_cast<int>(factors.size());
  std::vector<int> idx(p, 0);
  for (Eigen::Index flat = 0; flat < result.size(); ++flat) {
    Scalar value = factors[0][idx[0]];
    for (int m = 1; m < p; ++m) value *= factors[m][idx[m]];
    result.entries()[flat] = value;
    for (int m = p - 1; m >= 0; --m) {
      if (++idx[m] < shape[m]) break;
      idx[m] = 0;
    }
  }
  return result;
}

template <typename Scalar>
DenseTensor<Scalar> rank_one(std::initializer_list<VectorX<Scalar>> factors) {
  std::vector<VectorX<Scalar>> fs(factors);
  return rank_one<Scalar>(std::span<const VectorX<Scalar>>(fs));
}

/// Bombieri-Weyl product on dense tensors with Euclidean slot forms: the plain
/// entrywise bilinear sum. Agrees with prod_i <a_i, b_i> on rank-one inputs.
template <typename Scalar>
Scalar bw_inner(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b) {
  if (a.shape() != b.shape()) throw std::invalid_argument("bw_inner: shape mismatch");
  return a.entries().cwiseProduct(b.entries()).sum();
}

/// Contraction of T against all slots except `mode`:
/// out[i] = sum_{idx, idx_mode = i} T[idx] * prod_{j != mode} factors[j][idx_j].
template <typename Scalar>
VectorX<Scalar> contract_all_but(const DenseTensor<Scalar>& t,
                                 std::span<const VectorX<Scalar>> factors, int mode) {
  const int p = t.order();
  if (static_cast<int>(factors.size()) != p)
    throw std::invalid_argument("contract_all_but: factor count mismatch");
  for (int m = 0; m < p; ++m)
    if (factors[m].size() != t.shape()[m])
      throw std::invalid_argument("contract_all_but: factor length mismatch");
  VectorX<Scalar> out = VectorX<Scalar>::Zero(t.shape()[mode]);
  std::vector<int> idx(p, 0);
  for (Eigen::Index flat = 0; flat < t.size(); ++flat) {
    Scalar value = t.entries()[flat];
    for (int m = 0; m < p; ++m)
      if (m != mode) value *= factors[m][idx[m]];
    out[idx[mode]] += value;
    for (int m = p - 1; m >= 0; --m) {
      if (++idx[m] < t.shape()[m]) break;
      idx[m] = 0;
    }
  }
  return out;
}

/// Inner products of T with the tangent basis of the rank-one cone at
/// (x)otimes x: slot k replaced by every standard basis vector. Concatenated in
/// slot order; all zero iff T is orthogonal to the tangent space at x.
template <typename Scalar>
VectorX<Scalar> segre_tangent_residuals(const DenseTensor<Scalar>& t,
                                        std::span<const VectorX<Scalar>> x) {
  const int p = t.order();
  if (static_cast<int>(x.size()) != p)
    throw std::invalid_argument("segre_tangent_residuals: factor count mismatch");
  Eigen::Index total = 0;
  for (int m = 0; m < p; ++m) {
    if (x[m].size() != t.shape()[m])
      throw std::invalid_argument("segre_tangent_residuals: factor length mismatch");
    if (x[m].norm() == 0.0)
      throw std::invalid_argument("segre_tangent_residuals: zero factor (cone point)");
    total += t.shape()[m];
  }
  VectorX<Scalar> out(total);
  Eigen::Index at = 0;
  for (int m = 0; m < p; ++m) {
    out.segment(at, t.shape()[m]) = contract_all_but(t, x, m);
    at += t.shape()[m];
  }
  return out;
}

/// Number of singular values above rel_tol times the largest one.
template <typename Scalar>
int numerical_rank(const MatrixX<Scalar>& m, double rel_tol = 1e-8) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rel_tol * sv[0]) ++rank;
  return rank;
}

}  // namespace tdeflate
