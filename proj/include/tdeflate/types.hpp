#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <type_traits>

namespace tdeflate {

using Complex = std::complex<double>;

template <typename Scalar>
using VectorX = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A linear form on C^n, identified with its coordinate vector.
using LinearForm = VectorX<Complex>;

inline constexpr double kDefaultTol = 1e-10;

template <typename T>
struct is_complex_scalar : std::false_type {};
template <typename T>
struct is_complex_scalar<std::complex<T>> : std::true_type {};

/// Standard bilinear form sum_i a_i b_i (no conjugation). Symmetric in its
/// arguments and degenerate over C: isotropic vectors exist.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar bilinear_form(const Eigen::MatrixBase<DerivedA>& a,
                                        const Eigen::MatrixBase<DerivedB>& b) {
  static_assert(std::is_same_v<typename DerivedA::Scalar, typename DerivedB::Scalar>,
                "bilinear_form: mixed scalar types");
  if (a.size() != b.size()) throw std::invalid_argument("bilinear_form: dimension mismatch");
  return a.cwiseProduct(b).sum();
}

/// True iff |<v,v>| <= tol * (1 + sum |v_i|^2).
template <typename Derived>
bool is_isotropic(const Eigen::MatrixBase<Derived>& v, double tol = kDefaultTol) {
  if (tol < 0) throw std::invalid_argument("is_isotropic: negative tolerance");
  using std::abs;
  return abs(bilinear_form(v, v)) <= tol * (1.0 + v.squaredNorm());
}

inline bool nearly_real(const VectorX<Complex>& v, double tol = 1e-14) {
  return v.imag().template lpNorm<Eigen::Infinity>() <= tol * (1.0 + v.real().template lpNorm<Eigen::Infinity>());
}

}  // namespace tdeflate
