#pragma once

#include "tdeflate/types.hpp"

#include <cstdint>
#include <random>

namespace tdeflate {

/// SplitMix64 step; used to derive independent per-stream seeds so that work
/// items can run on any worker without sharing generator state.
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded generator with the sampling helpers used across the library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double gaussian() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }
  Complex cgaussian() { return {gaussian(), gaussian()}; }

  VectorX<double> gaussian_vector(int n) {
    VectorX<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }
  VectorX<Complex> cgaussian_vector(int n) {
    VectorX<Complex> v(n);
    for (int i = 0; i < n; ++i) v[i] = cgaussian();
    return v;
  }
  VectorX<double> unit_vector(int n) {
    VectorX<double> v = gaussian_vector(n);
    while (v.norm() < 1e-8) v = gaussian_vector(n);
    return v / v.norm();
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Haar-distributed real orthogonal matrix via QR of a Gaussian matrix with
/// the sign of the R diagonal fixed.
inline MatrixX<double> haar_orthogonal(int n, Rng& rng) {
  MatrixX<double> g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<MatrixX<double>> qr(g);
  MatrixX<double> q = qr.householderQ();
  const MatrixX<double> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace tdeflate
