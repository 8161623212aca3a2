#pragma once

#include "tdeflate/critical.hpp"
#include "tdeflate/dense_tensor.hpp"
#include "tdeflate/symmetric_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace tdeflate {

// Coordinate convention for 2x2x2 tensors: entries a_{ijk} numbered 1..8 in
// lexicographic order, x1 = a000, x2 = a001, ..., x8 = a111. All shipped
// quadrics and the hyperdeterminant below use it.

struct CayleyMonomial {
  int coeff;
  int idx[4];  // 0-based positions into the row-major 2x2x2 entry vector
};

/// Cayley's degree-4 hyperdeterminant of format 2x2x2, as monomial data:
/// the four squares, six pair products with coefficient -2, and the two
/// diagonal quadruples with coefficient +4.
inline constexpr CayleyMonomial kCayley222[12] = {
    {1, {0, 0, 7, 7}},  {1, {1, 1, 6, 6}},  {1, {2, 2, 5, 5}},  {1, {3, 3, 4, 4}},
    {-2, {0, 1, 6, 7}}, {-2, {0, 2, 5, 7}}, {-2, {0, 3, 4, 7}}, {-2, {1, 2, 5, 6}},
    {-2, {1, 3, 4, 6}}, {-2, {2, 3, 4, 5}}, {4, {0, 3, 5, 6}},  {4, {1, 2, 4, 7}},
};

/// Evaluates the hyperdeterminant; vanishes on every rank-one tensor and, more
/// generally, on the dual variety of the Segre cone.
template <typename Scalar>
Scalar hyperdeterminant_222(const DenseTensor<Scalar>& t) {
  if (t.shape() != std::vector<int>{2, 2, 2})
    throw std::invalid_argument("hyperdeterminant_222: shape must be 2x2x2");
  const auto& e = t.entries();
  Scalar total{};
  for (const auto& m : kCayley222)
    total += static_cast<Scalar>(m.coeff) * e[m.idx[0]] * e[m.idx[1]] * e[m.idx[2]] * e[m.idx[3]];
  return total;
}

enum class HyperdetSign { Positive, Negative, Zero };

inline const char* to_string(HyperdetSign s) {
  switch (s) {
    case HyperdetSign::Positive: return "positive";
    case HyperdetSign::Negative: return "negative";
    case HyperdetSign::Zero: return "zero";
  }
  return "unknown";
}

/// Sign of delta at threshold tol * ||T||^4 (the hyperdeterminant is quartic).
inline HyperdetSign classify_hyperdet(double delta, double tensor_norm, double tol = kDefaultTol) {
  const double threshold = tol * std::pow(tensor_norm, 4);
  if (delta > threshold) return HyperdetSign::Positive;
  if (delta < -threshold) return HyperdetSign::Negative;
  return HyperdetSign::Zero;
}

struct RankReport {
  /// Dense tensors: numerical ranks of all index-partition flattenings, one
  /// per partition class (row group containing the first mode, by increasing
  /// bitmask of the remaining modes). Symmetric tensors: catalecticant ranks
  /// for split sizes 1..floor(d/2); flattenings of equal split size coincide
  /// up to permutation there.
  std::vector<int> flattening_ranks;
  std::optional<HyperdetSign> hyperdet_sign;  // real 2x2x2 only
};

inline constexpr double kRankRelTol = 1e-8;

inline RankReport rank_report(const DenseTensorXcd& t, double rank_rel_tol = kRankRelTol,
                              double hyperdet_tol = kDefaultTol) {
  RankReport report;
  const int p = t.order();
  if (p == 1) {
    report.flattening_ranks.push_back(t.norm() > 0 ? 1 : 0);
    return report;
  }
  const unsigned limit = 1u << (p - 1);
  for (unsigned mask = 0; mask + 1 < limit; ++mask) {
    std::vector<int> rows{0};
    for (int m = 1; m < p; ++m)
      if (mask & (1u << (m - 1))) rows.push_back(m);
    report.flattening_ranks.push_back(numerical_rank(t.flatten(rows), rank_rel_tol));
  }
  if (t.shape() == std::vector<int>{2, 2, 2}) {
    const double imag = t.entries().imag().template lpNorm<Eigen::Infinity>();
    if (imag <= 1e-14 * (1.0 + t.entries().real().template lpNorm<Eigen::Infinity>())) {
      const double delta = hyperdeterminant_222(t.real_part());
      report.hyperdet_sign = classify_hyperdet(delta, t.norm(), hyperdet_tol);
    }
  }
  return report;
}

/// Catalecticant of split size q: rows indexed by degree-q exponents, columns
/// by degree-(d-q) exponents, entry a_{row+col} in the scaled basis.
template <typename Scalar>
MatrixX<Scalar> catalecticant(const SymmetricTensor<Scalar>& f, int q) {
  const int n = f.vars();
  const int d = f.degree();
  if (q < 1 || q >= d) throw std::invalid_argument("catalecticant: split out of range");
  const auto rows = MonomialBasis::get(n, q);
  const auto cols = MonomialBasis::get(n, d - q);
  MatrixX<Scalar> out(rows->size(), cols->size());
  std::vector<int> alpha(n);
  for (int i = 0; i < rows->size(); ++i) {
    const auto beta = rows->exponent(i);
    for (int j = 0; j < cols->size(); ++j) {
      const auto gamma = cols->exponent(j);
      for (int v = 0; v < n; ++v) alpha[v] = beta[v] + gamma[v];
      out(i, j) = f.coeffs()[f.basis().index_of(alpha)];
    }
  }
  return out;
}

inline RankReport rank_report(const SymmetricTensorXcd& f, double rank_rel_tol = kRankRelTol) {
  RankReport report;
  for (int q = 1; q <= f.degree() / 2; ++q)
    report.flattening_ranks.push_back(numerical_rank(catalecticant(f, q), rank_rel_tol));
  if (report.flattening_ranks.empty() && f.degree() >= 1)
    report.flattening_ranks.push_back(f.norm() > 0 ? 1 : 0);
  return report;
}

/// Flattening ranks of the three single-mode partitions plus the
/// hyperdeterminant sign; for real 2x2x2 tensors this pins the real rank:
/// positive means rank 2, negative rank 3, zero on the boundary.
inline RankReport real_rank_222(const DenseTensorXcd& t, double tol = kDefaultTol) {
  if (t.shape() != std::vector<int>{2, 2, 2})
    throw std::invalid_argument("real_rank_222: shape must be 2x2x2");
  detail::require_real_dense(t, "real_rank_222");
  RankReport report;
  for (int mode = 0; mode < 3; ++mode)
    report.flattening_ranks.push_back(numerical_rank(t.flatten({mode}), kRankRelTol));
  report.hyperdet_sign = classify_hyperdet(hyperdeterminant_222(t.real_part()), t.norm(), tol);
  return report;
}

enum class ChainTermination { ReachedZero, MaxSteps, NoCriticalPointFound };

inline const char* to_string(ChainTermination t) {
  switch (t) {
    case ChainTermination::ReachedZero: return "ReachedZero";
    case ChainTermination::MaxSteps: return "MaxSteps";
    case ChainTermination::NoCriticalPointFound: return "NoCriticalPointFound";
  }
  return "unknown";
}

struct DeflationPolicy {
  enum class Kind { BestFit, Random, UserSelected };
  Kind kind = Kind::BestFit;
  std::uint64_t seed = 0;  // Random
  int index = 0;           // UserSelected

  static DeflationPolicy best_fit() { return {}; }
  static DeflationPolicy random(std::uint64_t seed) {
    return {Kind::Random, seed, 0};
  }
  static DeflationPolicy user_selected(int index) {
    return {Kind::UserSelected, 0, index};
  }
};

template <typename Point>
struct DeflationStep {
  double norm_before = 0.0;
  Point chosen;
  RankReport rank_after;  // of the tensor once the chosen term is subtracted
  double norm_after = 0.0;
};

template <typename Point>
struct DeflationChain {
  double initial_norm = 0.0;
  RankReport initial_rank;
  std::vector<DeflationStep<Point>> steps;
  ChainTermination terminated = ChainTermination::MaxSteps;
};

using SymmetricDeflationChain = DeflationChain<SymmetricCriticalPoint>;
using DenseDeflationChain = DeflationChain<DenseCriticalPoint>;

/// Relative norm at which a chain counts as having reached zero.
inline constexpr double kChainTerminationRel = 1e-9;

namespace detail {

template <typename Tensor, typename Point, typename SearchFn, typename ReportFn>
DeflationChain<Point> run_chain(const Tensor& t, const DeflationPolicy& policy,
                                int max_steps, double termination_rel, SearchFn&& search,
                                ReportFn&& report) {
  if (max_steps < 1) throw std::invalid_argument("deflate: max_steps >= 1 required");
  DeflationChain<Point> chain;
  Tensor current = t;
  chain.initial_norm = current.norm();
  chain.initial_rank = report(current);
  Rng pick_rng(policy.seed);
  const double floor_norm = termination_rel * chain.initial_norm;

  for (int step = 0; step < max_steps; ++step) {
    if (current.norm() <= floor_norm) {
      chain.terminated = ChainTermination::ReachedZero;
      return chain;
    }
    std::vector<Point> points = search(current);
    if (points.empty()) {
      chain.terminated = ChainTermination::NoCriticalPointFound;
      return chain;
    }
    std::size_t pick = 0;
    switch (policy.kind) {
      case DeflationPolicy::Kind::BestFit: pick = 0; break;
      case DeflationPolicy::Kind::Random:
        pick = static_cast<std::size_t>(pick_rng.uniform_int(0, static_cast<int>(points.size()) - 1));
        break;
      case DeflationPolicy::Kind::UserSelected:
        if (policy.index < 0 || policy.index >= static_cast<int>(points.size())) {
          chain.terminated = ChainTermination::NoCriticalPointFound;
          return chain;
        }
        pick = static_cast<std::size_t>(policy.index);
        break;
    }
    DeflationStep<Point> record;
    record.norm_before = current.norm();
    record.chosen = points[pick];
    current -= record.chosen.term.materialize();
    record.norm_after = current.norm();
    record.rank_after = report(current);
    chain.steps.push_back(std::move(record));
  }
  chain.terminated = current.norm() <= floor_norm ? ChainTermination::ReachedZero
                                                  : ChainTermination::MaxSteps;
  return chain;
}

}  // namespace detail

/// Iterated subtraction chain. Matrices enumerate critical points by SVD,
/// higher-order tensors search by ALS; each step records the rank indicators
/// of the partially deflated tensor.
inline DenseDeflationChain deflate(const DenseTensorXcd& t, const DeflationPolicy& policy,
                                   const SolverConfig& cfg, int max_steps,
                                   double termination_rel = kChainTerminationRel) {
  auto search = [&](const DenseTensorXcd& current) {
    return current.order() == 2 ? matrix_critical_points(current)
                                : segre_critical_search(current, cfg);
  };
  auto report = [&](const DenseTensorXcd& current) { return rank_report(current); };
  return detail::run_chain<DenseTensorXcd, DenseCriticalPoint>(t, policy, max_steps,
                                                               termination_rel, search, report);
}

inline SymmetricDeflationChain deflate(const SymmetricTensorXcd& t, const DeflationPolicy& policy,
                                       const SolverConfig& cfg, int max_steps,
                                       double termination_rel = kChainTerminationRel) {
  auto search = [&](const SymmetricTensorXcd& current) {
    return symmetric_critical_search(current, cfg);
  };
  auto report = [&](const SymmetricTensorXcd& current) { return rank_report(current); };
  return detail::run_chain<SymmetricTensorXcd, SymmetricCriticalPoint>(
      t, policy, max_steps, termination_rel, search, report);
}

enum class Sc10Sampling { GenericPositive, Diagonal };

struct Sc10Trial {
  int trial = 0;
  std::uint64_t seed = 0;
  double delta_before = 0.0;
  double delta_after = 0.0;
  HyperdetSign sign_before = HyperdetSign::Zero;
  HyperdetSign sign_after = HyperdetSign::Zero;
  std::vector<int> residual_flattening_ranks;
  bool solver_ok = true;
};

struct Sc10Summary {
  int trials = 0;
  int negative = 0;
  int positive = 0;
  int zero_at_tol = 0;
  int solver_failures = 0;
  std::vector<Sc10Trial> records;
};

/// Samples real 2x2x2 tensors with positive hyperdeterminant (rank 2),
/// subtracts the best-fit critical rank-one approximation, and tallies the
/// sign of the residual's hyperdeterminant at tolerance tol * ||residual||^4.
/// Diagonal sampling restricts to orthogonally decomposable diagonal tensors.
inline Sc10Summary sc10_experiment(int num_trials, std::uint64_t seed,
                                   Sc10Sampling sampling = Sc10Sampling::GenericPositive,
                                   const SolverConfig& base_cfg = {}, double tol = kDefaultTol) {
  if (num_trials < 1) throw std::invalid_argument("sc10_experiment: num_trials >= 1 required");
  Sc10Summary summary;
  summary.trials = num_trials;
  summary.records.resize(num_trials);

  parallel_for(static_cast<std::size_t>(num_trials), [&](std::size_t i) {
    Sc10Trial& trial = summary.records[i];
    trial.trial = static_cast<int>(i);
    trial.seed = split_seed(seed, i);
    Rng rng(trial.seed);

    DenseTensorXcd t({2, 2, 2});
    while (true) {
      if (sampling == Sc10Sampling::Diagonal) {
        VectorX<Complex> entries = VectorX<Complex>::Zero(8);
        entries[0] = Complex(rng.gaussian(), 0.0);
        entries[7] = Complex(rng.gaussian(), 0.0);
        t = DenseTensorXcd({2, 2, 2}, entries);
      } else {
        VectorX<Complex> entries(8);
        for (int k = 0; k < 8; ++k) entries[k] = Complex(rng.gaussian(), 0.0);
        t = DenseTensorXcd({2, 2, 2}, entries);
      }
      const double delta = hyperdeterminant_222(t.real_part());
      if (classify_hyperdet(delta, t.norm(), tol) == HyperdetSign::Positive) {
        trial.delta_before = delta;
        trial.sign_before = HyperdetSign::Positive;
        break;
      }
    }

    SolverConfig cfg = base_cfg;
    cfg.seed = split_seed(trial.seed, 0x5eed);
    const auto points = segre_critical_search(t, cfg);
    if (points.empty()) {
      trial.solver_ok = false;
      return;
    }
    const DenseTensorXcd residual = t - points.front().term.materialize();
    trial.delta_after = hyperdeterminant_222(residual.real_part());
    trial.sign_after = classify_hyperdet(trial.delta_after, residual.norm(), tol);
    for (int mode = 0; mode < 3; ++mode)
      trial.residual_flattening_ranks.push_back(numerical_rank(residual.flatten({mode}), kRankRelTol));
  });

  for (const auto& trial : summary.records) {
    if (!trial.solver_ok) {
      ++summary.solver_failures;
      continue;
    }
    switch (trial.sign_after) {
      case HyperdetSign::Negative: ++summary.negative; break;
      case HyperdetSign::Positive: ++summary.positive; break;
      case HyperdetSign::Zero: ++summary.zero_at_tol; break;
    }
  }
  return summary;
}

}  // namespace tdeflate
