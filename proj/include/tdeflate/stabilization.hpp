#pragma once

#include "tdeflate/multi_index.hpp"

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdeflate {

/// Generic Waring rank of a form in S^d C^n: ceil(binom(n+d-1, d) / n) with
/// the known exceptional cases (d = 2; d = 4 and 3 <= n <= 5; (n, d) = (5, 3)).
/// Degenerate conventions: n = 0 gives 0, n = 1 gives 1 for every degree.
inline std::int64_t generic_rank(int n, int d) {
  if (n < 0) throw std::invalid_argument("generic_rank: need n >= 0");
  if (d < 1) throw std::invalid_argument("generic_rank: need d >= 1");
  if (n == 0) return 0;
  if (n == 1 || d == 1) return 1;
  if (d == 2) return n;
  if (d == 4 && n >= 3 && n <= 5) return binomial(n + 1, 2);
  if (n == 5 && d == 3) return 8;
  const std::int64_t count = binomial(n + d - 1, d);
  return (count + n - 1) / n;  // ceil division, exact integers
}

/// Largest dimension of a subspace of C^n spanned by pairwise orthogonal
/// isotropic vectors.
inline int max_isotropic_span(int n) {
  if (n < 0) throw std::invalid_argument("max_isotropic_span: need n >= 0");
  return n / 2;
}

struct StabQuery {
  int n = 0;
  int d = 0;
};

struct StabPerSpan {
  int s = 0;              // dimension of the isotropic span
  std::int64_t g_s = 0;   // generic rank of S^d C^s
  std::int64_t value = 0; // g_s + n - 2s
};

struct StabResult {
  int n = 0;
  int d = 0;
  std::vector<StabPerSpan> per_s;
  std::int64_t step = 0;
  /// True on the published range n in 4..10, d in 3..15; elsewhere the value
  /// is an extrapolation of the same formula.
  bool tabulated = false;
};

/// Step at which the chain of special data loci in S^d C^n stabilizes:
/// max over s in {0..floor(n/2)} of g_s + n - 2s.
inline StabResult stabilization_step(const StabQuery& query) {
  if (query.n < 1) throw std::invalid_argument("stabilization_step: need n >= 1");
  if (query.d < 1) throw std::invalid_argument("stabilization_step: need d >= 1");
  StabResult result;
  result.n = query.n;
  result.d = query.d;
  result.tabulated = query.n >= 4 && query.n <= 10 && query.d >= 3 && query.d <= 15;
  const int m = query.n / 2;
  for (int s = 0; s <= m; ++s) {
    StabPerSpan row;
    row.s = s;
    row.g_s = generic_rank(s, query.d);
    row.value = row.g_s + query.n - 2 * s;
    result.per_s.push_back(row);
    if (row.value > result.step) result.step = row.value;
  }
  return result;
}

struct StabTable {
  std::vector<int> n_values;
  std::vector<int> d_values;
  std::vector<std::vector<std::int64_t>> steps;  // steps[i][j] for (n_i, d_j)

  std::int64_t at(int n, int d) const {
    for (std::size_t i = 0; i < n_values.size(); ++i)
      for (std::size_t j = 0; j < d_values.size(); ++j)
        if (n_values[i] == n && d_values[j] == d) return steps[i][j];
    throw std::out_of_range("StabTable: cell not present");
  }

  /// CSV with header "n\d" followed by the degrees, one row per n.
  std::string to_csv() const {
    std::ostringstream out;
    out << "n\\d";
    for (int d : d_values) out << ',' << d;
    out << '\n';
    for (std::size_t i = 0; i < n_values.size(); ++i) {
      out << n_values[i];
      for (std::size_t j = 0; j < d_values.size(); ++j) out << ',' << steps[i][j];
      out << '\n';
    }
    return out.str();
  }

  std::string to_ascii() const {
    std::vector<std::size_t> widths(d_values.size() + 1, 4);
    auto digits = [](std::int64_t v) {
      std::size_t w = v <= 0 ? 1 : 0;
      while (v > 0) {
        ++w;
        v /= 10;
      }
      return w;
    };
    for (std::size_t i = 0; i < n_values.size(); ++i) widths[0] = std::max(widths[0], digits(n_values[i]));
    for (std::size_t j = 0; j < d_values.size(); ++j) {
      widths[j + 1] = digits(d_values[j]);
      for (std::size_t i = 0; i < n_values.size(); ++i)
        widths[j + 1] = std::max(widths[j + 1], digits(steps[i][j]));
    }
    std::ostringstream out;
    auto pad = [&](const std::string& text, std::size_t width) {
      for (std::size_t k = text.size(); k < width; ++k) out << ' ';
      out << text;
    };
    pad("n\\d", widths[0]);
    for (std::size_t j = 0; j < d_values.size(); ++j) {
      out << ' ';
      pad(std::to_string(d_values[j]), widths[j + 1]);
    }
    out << '\n';
    for (std::size_t i = 0; i < n_values.size(); ++i) {
      pad(std::to_string(n_values[i]), widths[0]);
      for (std::size_t j = 0; j < d_values.size(); ++j) {
        out << ' ';
        pad(std::to_string(steps[i][j]), widths[j + 1]);
      }
      out << '\n';
    }
    return out.str();
  }
};

inline StabTable stabilization_table(int n_min, int n_max, int d_min, int d_max) {
  if (n_min < 1 || d_min < 1 || n_max < n_min || d_max < d_min)
    throw std::invalid_argument("stabilization_table: invalid range");
  StabTable table;
  for (int n = n_min; n <= n_max; ++n) table.n_values.push_back(n);
  for (int d = d_min; d <= d_max; ++d) table.d_values.push_back(d);
  for (int n : table.n_values) {
    std::vector<std::int64_t> row;
    row.reserve(table.d_values.size());
    for (int d : table.d_values) row.push_back(stabilization_step({n, d}).step);
    table.steps.push_back(std::move(row));
  }
  return table;
}

}  // namespace tdeflate
