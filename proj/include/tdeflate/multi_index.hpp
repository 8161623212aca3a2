#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdeflate {

/// Exact binomial coefficient in 64-bit integer arithmetic.
/// Intermediate products run in 128-bit; results that do not fit in a
/// signed 64-bit integer throw std::overflow_error.
inline std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (n < 0) throw std::invalid_argument("binomial: negative n");
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    if (r > static_cast<unsigned __int128>(INT64_MAX))
      throw std::overflow_error("binomial: result exceeds 64-bit range");
  }
  return static_cast<std::int64_t>(r);
}

/// Exact multinomial coefficient d! / (alpha_1! ... alpha_n!) with sum(alpha) = d.
inline std::int64_t multinomial(int d, std::span<const int> alpha) {
  std::int64_t result = 1;
  std::int64_t partial = 0;
  for (int a : alpha) {
    if (a < 0) throw std::invalid_argument("multinomial: negative exponent");
    partial += a;
    const std::int64_t factor = binomial(partial, a);
    if (factor != 0 && result > INT64_MAX / factor)
      throw std::overflow_error("multinomial: result exceeds 64-bit range");
    result *= factor;
  }
  if (partial != d) throw std::invalid_argument("multinomial: exponents do not sum to degree");
  return result;
}

/// Enumeration of all exponent multi-indices alpha with alpha_1+...+alpha_n = d,
/// in lexicographically descending order, together with the multinomial weights
/// C(d, alpha) of the scaled monomial basis.
///
/// Bases are immutable and cached per (n, d); get() is safe to call concurrently.
class MonomialBasis {
 public:
  static std::shared_ptr<const MonomialBasis> get(int n, int d) {
    if (n < 1) throw std::invalid_argument("MonomialBasis: need n >= 1");
    if (d < 0) throw std::invalid_argument("MonomialBasis: need d >= 0");
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{n, d}];
    if (!slot) slot = std::shared_ptr<const MonomialBasis>(new MonomialBasis(n, d));
    return slot;
  }

  int vars() const { return n_; }
  int degree() const { return d_; }
  int size() const { return static_cast<int>(weights_.size()); }

  std::span<const int> exponent(int idx) const {
    return {exponents_.data() + static_cast<std::size_t>(idx) * n_, static_cast<std::size_t>(n_)};
  }
  std::int64_t weight(int idx) const { return weights_[idx]; }
  double weight_double(int idx) const { return weights_double_[idx]; }

  /// Position of alpha in the descending-lex enumeration; throws on invalid input.
  int index_of(std::span<const int> alpha) const {
    if (static_cast<int>(alpha.size()) != n_)
      throw std::invalid_argument("MonomialBasis: exponent tuple has wrong length");
    int rank = 0;
    int remaining = d_;
    for (int v = 0; v + 1 < n_; ++v) {
      const int a = alpha[v];
      if (a < 0 || a > remaining)
        throw std::invalid_argument("MonomialBasis: exponent tuple out of range");
      for (int b = remaining; b > a; --b)
        rank += static_cast<int>(binomial(remaining - b + n_ - v - 2, n_ - v - 2));
      remaining -= a;
    }
    if (alpha[n_ - 1] != remaining)
      throw std::invalid_argument("MonomialBasis: exponents do not sum to degree");
    return rank;
  }

 private:
  MonomialBasis(int n, int d) : n_(n), d_(d) {
    const std::int64_t count = binomial(n + d - 1, d);
    exponents_.reserve(static_cast<std::size_t>(count) * n);
    weights_.reserve(count);
    std::vector<int> current(n, 0);
    emit(0, d, current);
    weights_double_.reserve(weights_.size());
    for (std::int64_t w : weights_) weights_double_.push_back(static_cast<double>(w));
  }

  void emit(int var, int remaining, std::vector<int>& current) {
    if (var == n_ - 1) {
      current[var] = remaining;
      exponents_.insert(exponents_.end(), current.begin(), current.end());
      weights_.push_back(multinomial(d_, current));
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      current[var] = a;
      emit(var + 1, remaining - a, current);
    }
  }

  int n_;
  int d_;
  std::vector<int> exponents_;
  std::vector<std::int64_t> weights_;
  std::vector<double> weights_double_;
};

}  // namespace tdeflate
