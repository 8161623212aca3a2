#pragma once

#include "tdeflate/dense_tensor.hpp"
#include "tdeflate/parallel.hpp"
#include "tdeflate/random.hpp"
#include "tdeflate/symmetric_tensor.hpp"
#include "tdeflate/types.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdeflate {

enum class SolverSource { Svd, PowerIteration, Als, UserSupplied };

inline const char* to_string(SolverSource s) {
  switch (s) {
    case SolverSource::Svd: return "svd";
    case SolverSource::PowerIteration: return "power_iteration";
    case SolverSource::Als: return "als";
    case SolverSource::UserSupplied: return "user_supplied";
  }
  return "unknown";
}

struct SolverConfig {
  int max_iters = 300;
  double tol = 1e-10;
  int num_starts = 32;
  std::uint64_t seed = 0;
  /// Shift for the symmetric power iteration; 0 selects 1 + ||T|| which keeps
  /// the shifted iteration monotone for real symmetric inputs.
  double shift = 0.0;

  void validate() const {
    if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters >= 1 required");
    if (!(tol > 0)) throw std::invalid_argument("SolverConfig: tol > 0 required");
    if (num_starts < 1) throw std::invalid_argument("SolverConfig: num_starts >= 1 required");
  }
};

/// scale * u^d.
struct SymRankOne {
  LinearForm u;
  int degree = 0;
  Complex scale{1.0, 0.0};

  SymmetricTensorXcd materialize() const {
    SymmetricTensorXcd t = power<Complex>(u, degree);
    t *= scale;
    return t;
  }
  double norm() const { return std::abs(scale) * std::pow(u.norm(), degree); }
};

/// scale * x_1 (x) ... (x) x_p.
struct DenseRankOne {
  std::vector<LinearForm> factors;
  Complex scale{1.0, 0.0};

  DenseTensorXcd materialize() const {
    DenseTensorXcd t = rank_one<Complex>(std::span<const LinearForm>(factors));
    t *= scale;
    return t;
  }
  double norm() const {
    double p = std::abs(scale);
    for (const auto& f : factors) p *= f.norm();
    return p;
  }
};

template <typename Term>
struct CriticalPointT {
  Term term;
  Complex scale{};            // mirrors term.scale; the Lagrange multiplier of the stationarity system
  double residual_norm = 0.0; // max tangent residual of T - term, normalized as in verify_critical_*
  double objective = 0.0;     // ||T - term||^2 under the real Bombieri-Weyl norm
  SolverSource source = SolverSource::UserSupplied;
};

using SymmetricCriticalPoint = CriticalPointT<SymRankOne>;
using DenseCriticalPoint = CriticalPointT<DenseRankOne>;

struct VerifyResult {
  bool critical = false;
  double residual = 0.0;
};

/// Normality check at the cone over the Veronese: true iff all tangent
/// residuals of T - term at u vanish after normalization by
/// (||T|| + ||term||) |u|^{d-1}. Handles complex candidates; for isotropic u
/// the scale is immaterial and any value certifies.
inline VerifyResult verify_critical_symmetric(const SymmetricTensorXcd& t, const SymRankOne& term,
                                              double tol = kDefaultTol) {
  if (term.degree != t.degree() || term.u.size() != t.vars())
    throw std::invalid_argument("verify_critical_symmetric: shape mismatch");
  const double unorm = term.u.norm();
  if (unorm == 0.0) throw std::invalid_argument("verify_critical_symmetric: zero linear form");
  const SymmetricTensorXcd residual_tensor = t - term.materialize();
  const VectorX<Complex> r = veronese_tangent_residuals(residual_tensor, term.u);
  const double raw = r.template lpNorm<Eigen::Infinity>();
  const double denom = (t.norm() + term.norm()) * std::pow(unorm, t.degree() - 1);
  const double residual = denom > 0 ? raw / denom : 0.0;
  return {residual <= tol, residual};
}

/// Same check at the Segre cone, with per-slot normalization of the tangent
/// residual blocks.
inline VerifyResult verify_critical_dense(const DenseTensorXcd& t, const DenseRankOne& term,
                                          double tol = kDefaultTol) {
  if (static_cast<int>(term.factors.size()) != t.order())
    throw std::invalid_argument("verify_critical_dense: slot count mismatch");
  for (int m = 0; m < t.order(); ++m) {
    if (term.factors[m].size() != t.shape()[m])
      throw std::invalid_argument("verify_critical_dense: factor length mismatch");
    if (term.factors[m].norm() == 0.0)
      throw std::invalid_argument("verify_critical_dense: zero factor");
  }
  const DenseTensorXcd residual_tensor = t - term.materialize();
  const double scale_norm = t.norm() + term.norm();
  double residual = 0.0;
  for (int k = 0; k < t.order(); ++k) {
    const VectorX<Complex> block =
        contract_all_but(residual_tensor, std::span<const LinearForm>(term.factors), k);
    double slot_scale = 1.0;
    for (int j = 0; j < t.order(); ++j)
      if (j != k) slot_scale *= term.factors[j].norm();
    const double denom = scale_norm * slot_scale;
    if (denom > 0) residual = std::max(residual, block.template lpNorm<Eigen::Infinity>() / denom);
  }
  return {residual <= tol, residual};
}

namespace detail {

inline void require_real_dense(const DenseTensorXcd& t, const char* who) {
  const double scale = 1.0 + t.entries().real().template lpNorm<Eigen::Infinity>();
  if (t.entries().imag().template lpNorm<Eigen::Infinity>() > 1e-14 * scale)
    throw std::invalid_argument(std::string(who) + ": input must be real");
}

inline void require_real_symmetric(const SymmetricTensorXcd& t, const char* who) {
  const double scale = 1.0 + t.coeffs().real().template lpNorm<Eigen::Infinity>();
  if (t.coeffs().imag().template lpNorm<Eigen::Infinity>() > 1e-14 * scale)
    throw std::invalid_argument(std::string(who) + ": input must be real");
}

/// Flip so the first significant entry is positive; returns the applied sign.
inline double canonical_sign(VectorX<double>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-8) {
      if (v[i] < 0) {
        v = -v;
        return -1.0;
      }
      return 1.0;
    }
  }
  return 1.0;
}

template <typename Tensor>
bool is_duplicate_term(const Tensor& a, const Tensor& b, double tol = 1e-6) {
  const double da = a.norm(), db = b.norm();
  return (a - b).norm() <= tol * (da + db);
}

/// objective-then-lexicographic order on materialized coefficient vectors;
/// fixes the output order and the meaning of "best".
inline bool lex_less(const VectorX<double>& a, const VectorX<double>& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-15) return true;
    if (a[i] > b[i] + 1e-15) return false;
  }
  return false;
}

}  // namespace detail

/// Exact enumeration for real matrices: one critical point per singular triple
/// above the relative rank cutoff. The count equals the numerical rank, at
/// most min(m, n).
inline std::vector<DenseCriticalPoint> matrix_critical_points(const DenseTensorXcd& m,
                                                              double rank_rel_tol = 1e-8) {
  if (m.order() != 2) throw std::invalid_argument("matrix_critical_points: need a 2-way tensor");
  detail::require_real_dense(m, "matrix_critical_points");
  const int rows = m.shape()[0], cols = m.shape()[1];
  MatrixX<double> a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = m.at({i, j}).real();

  Eigen::JacobiSVD<MatrixX<double>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  std::vector<DenseCriticalPoint> out;
  if (sv.size() == 0 || sv[0] <= 0.0) return out;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] <= rank_rel_tol * sv[0]) continue;
    VectorX<double> u = svd.matrixU().col(k);
    VectorX<double> v = svd.matrixV().col(k);
    const double flip = detail::canonical_sign(u);
    v *= flip;
    DenseRankOne term{{u.cast<Complex>(), v.cast<Complex>()}, Complex(sv[k], 0.0)};
    DenseCriticalPoint point;
    point.term = term;
    point.scale = term.scale;
    point.residual_norm = verify_critical_dense(m, term, 1.0).residual;
    point.objective = (a - sv[k] * u * v.transpose()).squaredNorm();
    point.source = SolverSource::Svd;
    out.push_back(std::move(point));
  }
  return out;
}

/// Multi-start shifted power iteration for real symmetric tensors, with Newton
/// refinement of the stationarity system g(u) = lambda u, |u| = 1, where
/// g(u) = grad f(u) / d is the degree-(d-1) contraction map. Starts alternate
/// the shift sign so both ends of the spectrum are reachable. Points are
/// certified against the tangent residuals of T - lambda u^d, deduplicated
/// projectively, and sorted best-first (smallest objective, ties by
/// lexicographic coefficients).
inline std::vector<SymmetricCriticalPoint> symmetric_critical_search(const SymmetricTensorXcd& t,
                                                                     const SolverConfig& cfg) {
  cfg.validate();
  if (t.vars() < 2) throw std::invalid_argument("symmetric_critical_search: need n >= 2");
  if (t.degree() < 2) throw std::invalid_argument("symmetric_critical_search: need d >= 2");
  detail::require_real_symmetric(t, "symmetric_critical_search");

  const SymmetricTensorXd f = t.real_part();
  const int n = f.vars();
  const int d = f.degree();
  const double tnorm = f.norm();
  std::vector<SymmetricCriticalPoint> out;
  if (tnorm == 0.0) return out;
  const double shift = cfg.shift != 0.0 ? cfg.shift : 1.0 + tnorm;

  struct Candidate {
    VectorX<double> u;
    double lambda = 0.0;
    bool certified = false;
  };
  std::vector<Candidate> candidates(cfg.num_starts);

  parallel_for(static_cast<std::size_t>(cfg.num_starts), [&](std::size_t s) {
    Rng rng(split_seed(cfg.seed, s));
    VectorX<double> u = rng.unit_vector(n);
    const double alpha = (s % 2 == 0) ? shift : -shift;
    const double sgn = alpha >= 0 ? 1.0 : -1.0;
    for (int it = 0; it < cfg.max_iters; ++it) {
      VectorX<double> v = gradient(f, u) / static_cast<double>(d) + alpha * u;
      const double nv = v.norm();
      if (!std::isfinite(nv) || nv < 1e-300) return;
      v *= sgn / nv;
      const double delta = (v - u).norm();
      u = v;
      if (delta < 1e-14) break;
    }
    double lambda = u.dot(gradient(f, u)) / static_cast<double>(d);
    for (int it = 0; it < 40; ++it) {
      const VectorX<double> g = gradient(f, u) / static_cast<double>(d);
      VectorX<double> rhs(n + 1);
      rhs.head(n) = g - lambda * u;
      rhs[n] = 0.5 * (u.squaredNorm() - 1.0);
      if (rhs.template lpNorm<Eigen::Infinity>() < 1e-16 * (1.0 + tnorm)) break;
      MatrixX<double> jac(n + 1, n + 1);
      jac.topLeftCorner(n, n) =
          hessian(f, u) / static_cast<double>(d) - lambda * MatrixX<double>::Identity(n, n);
      jac.topRightCorner(n, 1) = -u;
      jac.bottomLeftCorner(1, n) = u.transpose();
      jac(n, n) = 0.0;
      const VectorX<double> step = jac.colPivHouseholderQr().solve(-rhs);
      if (!step.allFinite()) break;
      u += step.head(n);
      lambda += step[n];
      if (!u.allFinite() || !std::isfinite(lambda)) return;
      if (step.template lpNorm<Eigen::Infinity>() < 1e-15) break;
    }
    const double unorm = u.norm();
    if (!(unorm > 1e-8)) return;
    u /= unorm;
    const VectorX<double> g = gradient(f, u) / static_cast<double>(d);
    lambda = u.dot(g);
    const double raw = (g - lambda * u).template lpNorm<Eigen::Infinity>();
    Candidate c;
    c.u = u;
    c.lambda = lambda;
    c.certified = raw <= cfg.tol * tnorm && std::abs(lambda) > 1e-12 * tnorm;
    candidates[s] = std::move(c);
  });

  std::vector<SymmetricTensorXd> materialized;
  std::vector<VectorX<double>> coeff_vectors;
  for (auto& c : candidates) {
    if (!c.certified) continue;
    const double flip = detail::canonical_sign(c.u);
    if (flip < 0 && (d % 2) != 0) c.lambda = -c.lambda;
    SymmetricTensorXd term_tensor = power<double>(c.u, d);
    term_tensor *= c.lambda;
    bool duplicate = false;
    for (const auto& seen : materialized)
      if (detail::is_duplicate_term(seen, term_tensor)) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;

    SymRankOne term{c.u.cast<Complex>(), d, Complex(c.lambda, 0.0)};
    SymmetricCriticalPoint point;
    point.term = term;
    point.scale = term.scale;
    point.residual_norm = verify_critical_symmetric(t, term, 1.0).residual;
    point.objective = (f - term_tensor).norm() * (f - term_tensor).norm();
    point.source = SolverSource::PowerIteration;
    out.push_back(std::move(point));
    materialized.push_back(std::move(term_tensor));
    coeff_vectors.push_back(materialized.back().coeffs());
  }

  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out[a].objective != out[b].objective) return out[a].objective < out[b].objective;
    return detail::lex_less(coeff_vectors[a], coeff_vectors[b]);
  });
  std::vector<SymmetricCriticalPoint> sorted;
  sorted.reserve(out.size());
  for (std::size_t i : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

namespace detail {

/// Pairwise contraction: matrix of T against all slots except k and j.
inline MatrixX<double> contract_all_but_two(const DenseTensor<double>& t,
                                            std::span<const VectorX<double>> xs, int k, int j) {
  const int p = t.order();
  MatrixX<double> out = MatrixX<double>::Zero(t.shape()[k], t.shape()[j]);
  std::vector<int> idx(p, 0);
  for (Eigen::Index flat = 0; flat < t.size(); ++flat) {
    double value = t.entries()[flat];
    for (int m = 0; m < p; ++m)
      if (m != k && m != j) value *= xs[m][idx[m]];
    out(idx[k], idx[j]) += value;
    for (int m = p - 1; m >= 0; --m) {
      if (++idx[m] < t.shape()[m]) break;
      idx[m] = 0;
    }
  }
  return out;
}

}  // namespace detail

/// Multi-start alternating least squares for real tensors of order >= 3, with
/// Gauss-Newton refinement of the singular-tuple system
/// T(x_1,..,hat x_k,..,x_p) = lambda x_k, |x_k| = 1. Certification,
/// deduplication and ordering as in the symmetric search.
inline std::vector<DenseCriticalPoint> segre_critical_search(const DenseTensorXcd& t,
                                                             const SolverConfig& cfg) {
  cfg.validate();
  if (t.order() < 3) throw std::invalid_argument("segre_critical_search: need order >= 3");
  detail::require_real_dense(t, "segre_critical_search");

  const DenseTensorXd f = t.real_part();
  const int p = f.order();
  const double tnorm = f.norm();
  std::vector<DenseCriticalPoint> out;
  if (tnorm == 0.0) return out;
  Eigen::Index total_dim = 0;
  for (int m = 0; m < p; ++m) total_dim += f.shape()[m];

  struct Candidate {
    std::vector<VectorX<double>> xs;
    double lambda = 0.0;
    bool certified = false;
  };
  std::vector<Candidate> candidates(cfg.num_starts);

  parallel_for(static_cast<std::size_t>(cfg.num_starts), [&](std::size_t s) {
    Rng rng(split_seed(cfg.seed, s));
    std::vector<VectorX<double>> xs(p);
    for (int m = 0; m < p; ++m) xs[m] = rng.unit_vector(f.shape()[m]);
    const std::span<const VectorX<double>> view(xs);

    for (int it = 0; it < cfg.max_iters; ++it) {
      double delta = 0.0;
      for (int k = 0; k < p; ++k) {
        VectorX<double> v = contract_all_but(f, view, k);
        const double nv = v.norm();
        if (!std::isfinite(nv) || nv < 1e-300) return;
        v /= nv;
        delta = std::max(delta, std::min((v - xs[k]).norm(), (v + xs[k]).norm()));
        xs[k] = v;
      }
      if (delta < 1e-14) break;
    }

    double lambda = bilinear_form(contract_all_but(f, view, 0), xs[0]);
    for (int it = 0; it < 40; ++it) {
      VectorX<double> rhs(total_dim + p);
      Eigen::Index at = 0;
      for (int k = 0; k < p; ++k) {
        rhs.segment(at, f.shape()[k]) = contract_all_but(f, view, k) - lambda * xs[k];
        at += f.shape()[k];
      }
      for (int k = 0; k < p; ++k) rhs[total_dim + k] = 0.5 * (xs[k].squaredNorm() - 1.0);
      if (rhs.template lpNorm<Eigen::Infinity>() < 1e-16 * (1.0 + tnorm)) break;

      MatrixX<double> jac = MatrixX<double>::Zero(total_dim + p, total_dim + 1);
      Eigen::Index row = 0;
      for (int k = 0; k < p; ++k) {
        Eigen::Index col = 0;
        for (int j = 0; j < p; ++j) {
          if (j == k)
            jac.block(row, col, f.shape()[k], f.shape()[j]) =
                -lambda * MatrixX<double>::Identity(f.shape()[k], f.shape()[j]);
          else
            jac.block(row, col, f.shape()[k], f.shape()[j]) =
                detail::contract_all_but_two(f, view, k, j);
          col += f.shape()[j];
        }
        jac.block(row, total_dim, f.shape()[k], 1) = -xs[k];
        row += f.shape()[k];
      }
      Eigen::Index col = 0;
      for (int k = 0; k < p; ++k) {
        jac.block(total_dim + k, col, 1, f.shape()[k]) = xs[k].transpose();
        col += f.shape()[k];
      }
      const VectorX<double> step = jac.colPivHouseholderQr().solve(-rhs);
      if (!step.allFinite()) break;
      Eigen::Index seg = 0;
      for (int k = 0; k < p; ++k) {
        xs[k] += step.segment(seg, f.shape()[k]);
        if (!xs[k].allFinite()) return;
        seg += f.shape()[k];
      }
      lambda += step[total_dim];
      if (!std::isfinite(lambda)) return;
      if (step.template lpNorm<Eigen::Infinity>() < 1e-15) break;
    }

    for (int k = 0; k < p; ++k) {
      const double nk = xs[k].norm();
      if (!(nk > 1e-8)) return;
      xs[k] /= nk;
    }
    lambda = bilinear_form(contract_all_but(f, view, 0), xs[0]);
    double raw = 0.0;
    for (int k = 0; k < p; ++k)
      raw = std::max(raw, (contract_all_but(f, view, k) - lambda * xs[k])
                              .template lpNorm<Eigen::Infinity>());
    Candidate c;
    c.xs = std::move(xs);
    c.lambda = lambda;
    c.certified = raw <= cfg.tol * tnorm && std::abs(lambda) > 1e-12 * tnorm;
    candidates[s] = std::move(c);
  });

  std::vector<DenseTensorXd> materialized;
  for (auto& c : candidates) {
    if (!c.certified) continue;
    double sign_product = 1.0;
    for (auto& x : c.xs) sign_product *= detail::canonical_sign(x);
    c.lambda *= sign_product;
    DenseTensorXd term_tensor = rank_one<double>(std::span<const VectorX<double>>(c.xs));
    term_tensor *= c.lambda;
    bool duplicate = false;
    for (const auto& seen : materialized)
      if (detail::is_duplicate_term(seen, term_tensor)) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;

    DenseRankOne term;
    term.factors.reserve(p);
    for (const auto& x : c.xs) term.factors.push_back(x.cast<Complex>());
    term.scale = Complex(c.lambda, 0.0);
    DenseCriticalPoint point;
    point.term = std::move(term);
    point.scale = Complex(c.lambda, 0.0);
    point.residual_norm = verify_critical_dense(t, point.term, 1.0).residual;
    point.objective = (f - term_tensor).norm() * (f - term_tensor).norm();
    point.source = SolverSource::Als;
    out.push_back(std::move(point));
    materialized.push_back(std::move(term_tensor));
  }

  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out[a].objective != out[b].objective) return out[a].objective < out[b].objective;
    return detail::lex_less(materialized[a].entries(), materialized[b].entries());
  });
  std::vector<DenseCriticalPoint> sorted;
  sorted.reserve(out.size());
  for (std::size_t i : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

}  // namespace tdeflate
