#pragma once

#include "tdeflate/critical.hpp"
#include "tdeflate/dense_tensor.hpp"
#include "tdeflate/random.hpp"
#include "tdeflate/symmetric_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tdeflate {

/// Pairwise orthogonal isotropic vectors spanning a totally isotropic
/// subspace. The canonical frame pairs consecutive coordinates as (1, i).
struct IsotropicFrame {
  int n = 0;
  std::vector<LinearForm> vectors;
};

/// Canonical frame of the maximal size floor(n/2): w_1 = (1,i,0,...,0),
/// w_2 = (0,0,1,i,0,...,0), ... Its Gram matrix vanishes exactly, also in
/// floating point.
inline IsotropicFrame isotropic_frame(int n) {
  if (n < 2) throw std::invalid_argument("isotropic_frame: need n >= 2");
  IsotropicFrame frame;
  frame.n = n;
  const int m = n / 2;
  frame.vectors.reserve(m);
  for (int k = 0; k < m; ++k) {
    LinearForm w = LinearForm::Zero(n);
    w[2 * k] = Complex(1.0, 0.0);
    w[2 * k + 1] = Complex(0.0, 1.0);
    frame.vectors.push_back(std::move(w));
  }
  return frame;
}

enum class OdecoKind { NotOrthogonal, Weak, Strong, ClassicalReal };

inline const char* to_string(OdecoKind k) {
  switch (k) {
    case OdecoKind::NotOrthogonal: return "not_orthogonal";
    case OdecoKind::Weak: return "weak";
    case OdecoKind::Strong: return "strong";
    case OdecoKind::ClassicalReal: return "classical_real";
  }
  return "unknown";
}

struct SymmetricOdecoTerm {
  Complex scale{1.0, 0.0};
  LinearForm form;
};

struct SymmetricDecomposition {
  int n = 0;
  int d = 0;
  std::vector<SymmetricOdecoTerm> terms;

  SymmetricTensorXcd assemble() const {
    if (terms.empty()) throw std::invalid_argument("SymmetricDecomposition: no terms");
    SymmetricTensorXcd total(n, d);
    for (const auto& term : terms) {
      SymmetricTensorXcd t = power<Complex>(term.form, d);
      t *= term.scale;
      total += t;
    }
    return total;
  }
};

struct DenseOdecoTerm {
  Complex scale{1.0, 0.0};
  std::vector<LinearForm> factors;
};

struct DenseDecomposition {
  std::vector<int> shape;
  std::vector<DenseOdecoTerm> terms;

  DenseTensorXcd assemble() const {
    if (terms.empty()) throw std::invalid_argument("DenseDecomposition: no terms");
    DenseTensorXcd total(shape);
    for (const auto& term : terms) {
      DenseTensorXcd t = rank_one<Complex>(std::span<const LinearForm>(term.factors));
      t *= term.scale;
      total += t;
    }
    return total;
  }
};

/// Strongest tier the decomposition satisfies at tolerance tol:
/// Weak needs every pair of distinct terms orthogonal slot by slot, Strong
/// additionally forbids isotropic factors, ClassicalReal needs real factors.
inline OdecoKind odeco_check(const SymmetricDecomposition& dec, double tol = kDefaultTol) {
  if (dec.terms.empty()) throw std::invalid_argument("odeco_check: empty decomposition");
  double scale_sq = 0.0;
  for (const auto& term : dec.terms) {
    if (term.form.size() != dec.n) throw std::invalid_argument("odeco_check: form length mismatch");
    if (term.form.norm() == 0.0) throw std::invalid_argument("odeco_check: zero factor");
    scale_sq = std::max(scale_sq, term.form.squaredNorm());
  }
  for (std::size_t a = 0; a < dec.terms.size(); ++a)
    for (std::size_t b = a + 1; b < dec.terms.size(); ++b)
      if (std::abs(bilinear_form(dec.terms[a].form, dec.terms[b].form)) > tol * (1.0 + scale_sq))
        return OdecoKind::NotOrthogonal;
  bool strong = true;
  for (const auto& term : dec.terms)
    if (is_isotropic(term.form, tol)) strong = false;
  if (!strong) return OdecoKind::Weak;
  for (const auto& term : dec.terms)
    if (!nearly_real(term.form, tol) || std::abs(term.scale.imag()) > tol * (1.0 + std::abs(term.scale.real())))
      return OdecoKind::Strong;
  return OdecoKind::ClassicalReal;
}

inline OdecoKind odeco_check(const DenseDecomposition& dec, double tol = kDefaultTol) {
  if (dec.terms.empty()) throw std::invalid_argument("odeco_check: empty decomposition");
  const int p = static_cast<int>(dec.shape.size());
  for (const auto& term : dec.terms) {
    if (static_cast<int>(term.factors.size()) != p)
      throw std::invalid_argument("odeco_check: slot count mismatch");
    for (int j = 0; j < p; ++j) {
      if (term.factors[j].size() != dec.shape[j])
        throw std::invalid_argument("odeco_check: factor length mismatch");
      if (term.factors[j].norm() == 0.0) throw std::invalid_argument("odeco_check: zero factor");
    }
  }
  for (int j = 0; j < p; ++j) {
    double scale_sq = 0.0;
    for (const auto& term : dec.terms) scale_sq = std::max(scale_sq, term.factors[j].squaredNorm());
    for (std::size_t a = 0; a < dec.terms.size(); ++a)
      for (std::size_t b = a + 1; b < dec.terms.size(); ++b)
        if (std::abs(bilinear_form(dec.terms[a].factors[j], dec.terms[b].factors[j])) >
            tol * (1.0 + scale_sq))
          return OdecoKind::NotOrthogonal;
  }
  bool strong = true;
  for (const auto& term : dec.terms)
    for (const auto& factor : term.factors)
      if (is_isotropic(factor, tol)) strong = false;
  if (!strong) return OdecoKind::Weak;
  for (const auto& term : dec.terms) {
    if (std::abs(term.scale.imag()) > tol * (1.0 + std::abs(term.scale.real())))
      return OdecoKind::Strong;
    for (const auto& factor : term.factors)
      if (!nearly_real(factor, tol)) return OdecoKind::Strong;
  }
  return OdecoKind::ClassicalReal;
}

/// f = sum_{i<=s} l_i^d + sum_{j<=t} y_j^d with the l_i a randomly rotated
/// isotropic frame and the y_j real orthonormal directions orthogonal to it;
/// every pair of summands is Bombieri-Weyl orthogonal. Needs t <= n - 2s.
inline std::pair<SymmetricTensorXcd, SymmetricDecomposition> weakly_odeco_symmetric(
    int frame_size, int non_isotropic_count, int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("weakly_odeco_symmetric: need n, d >= 1");
  if (frame_size < 0 || non_isotropic_count < 0)
    throw std::invalid_argument("weakly_odeco_symmetric: negative term count");
  if (frame_size > n / 2)
    throw std::invalid_argument("weakly_odeco_symmetric: frame larger than floor(n/2)");
  if (non_isotropic_count > n - 2 * frame_size)
    throw std::invalid_argument("weakly_odeco_symmetric: too many non-isotropic directions");
  if (frame_size + non_isotropic_count == 0)
    throw std::invalid_argument("weakly_odeco_symmetric: empty decomposition");

  Rng rng(seed);
  const MatrixX<double> q = haar_orthogonal(n, rng);
  SymmetricDecomposition dec;
  dec.n = n;
  dec.d = d;
  for (int i = 0; i < frame_size; ++i) {
    LinearForm l = q.col(2 * i).cast<Complex>() + Complex(0.0, 1.0) * q.col(2 * i + 1).cast<Complex>();
    dec.terms.push_back({Complex(1.0, 0.0), std::move(l)});
  }
  for (int j = 0; j < non_isotropic_count; ++j) {
    LinearForm y = q.col(2 * frame_size + j).cast<Complex>();
    dec.terms.push_back({Complex(1.0, 0.0), std::move(y)});
  }
  return {dec.assemble(), std::move(dec)};
}

/// Rank-r weakly odeco dense tensor with real orthonormal slot frames.
inline std::pair<DenseTensorXcd, DenseDecomposition> weakly_odeco_dense(
    const std::vector<int>& shape, int r, std::uint64_t seed) {
  if (shape.size() < 2) throw std::invalid_argument("weakly_odeco_dense: need order >= 2");
  if (r < 1) throw std::invalid_argument("weakly_odeco_dense: need r >= 1");
  for (int nj : shape)
    if (r > nj) throw std::invalid_argument("weakly_odeco_dense: rank exceeds a slot dimension");

  Rng rng(seed);
  std::vector<MatrixX<double>> slot_frames;
  slot_frames.reserve(shape.size());
  for (int nj : shape) slot_frames.push_back(haar_orthogonal(nj, rng));
  DenseDecomposition dec;
  dec.shape = shape;
  for (int k = 0; k < r; ++k) {
    DenseOdecoTerm term;
    term.scale = Complex(rng.gaussian(), 0.0);
    while (std::abs(term.scale) < 0.1) term.scale = Complex(rng.gaussian(), 0.0);
    for (std::size_t j = 0; j < shape.size(); ++j)
      term.factors.push_back(slot_frames[j].col(k).cast<Complex>());
    dec.terms.push_back(std::move(term));
  }
  return {dec.assemble(), std::move(dec)};
}

/// Every power of a vector in the span of an isotropic frame is a critical
/// rank-one approximation of the frame's power sum, at any scale. Samples
/// random complex combinations and certifies each with scales 1/2, 1, 2+i.
inline bool isotropic_span_criticality(const IsotropicFrame& frame, int d, int num_samples,
                                       std::uint64_t seed, double tol = kDefaultTol) {
  if (frame.vectors.empty()) throw std::invalid_argument("isotropic_span_criticality: empty frame");
  if (d < 2) throw std::invalid_argument("isotropic_span_criticality: need d >= 2");
  if (num_samples < 1) throw std::invalid_argument("isotropic_span_criticality: need samples >= 1");

  SymmetricTensorXcd f(frame.n, d);
  for (const auto& l : frame.vectors) f += power<Complex>(l, d);

  Rng rng(seed);
  const Complex scales[] = {Complex(0.5, 0.0), Complex(1.0, 0.0), Complex(2.0, 1.0)};
  for (int s = 0; s < num_samples; ++s) {
    LinearForm l = LinearForm::Zero(frame.n);
    for (const auto& v : frame.vectors) l += rng.cgaussian() * v;
    if (l.norm() < 1e-10) {
      --s;
      continue;
    }
    for (const Complex& scale : scales) {
      SymRankOne term{l, d, scale};
      if (!verify_critical_symmetric(f, term, tol).critical) return false;
    }
  }
  return true;
}

struct Dl2Membership {
  bool component1 = false;  // orthogonality in slots {1,2}
  bool component2 = false;  // orthogonality in slots {2,3}
  bool component3 = false;  // orthogonality in slots {1,3}
  Complex quadric_a{};      // -x2 x5 + x1 x6 - x4 x7 + x3 x8
  Complex quadric_b{};      // -x2 x3 + x1 x4 - x6 x7 + x5 x8
  Complex quadric_c{};      // -x3 x5 - x4 x6 + x1 x7 + x2 x8

  bool any() const { return component1 || component2 || component3; }
  bool all() const { return component1 && component2 && component3; }
};

/// Membership in the three components of the first special data locus of the
/// 2x2x2 Segre cone. Each component is cut out by two of the three quadrics
/// below; on a sum of two rank-one terms the quadrics factor as a slot inner
/// product times two 2x2 determinants, so a component vanishes exactly when
/// the terms are orthogonal in the corresponding pair of slots.
inline Dl2Membership dl2_membership_222(const DenseTensorXcd& t, double tol = kDefaultTol) {
  if (t.shape() != std::vector<int>{2, 2, 2})
    throw std::invalid_argument("dl2_membership_222: shape must be 2x2x2");
  const auto& e = t.entries();
  // x1..x8 = a000..a111 in lexicographic order (0-based e[0]..e[7])
  Dl2Membership m;
  m.quadric_a = -e[1] * e[4] + e[0] * e[5] - e[3] * e[6] + e[2] * e[7];
  m.quadric_b = -e[1] * e[2] + e[0] * e[3] - e[5] * e[6] + e[4] * e[7];
  m.quadric_c = -e[2] * e[4] - e[3] * e[5] + e[0] * e[6] + e[1] * e[7];
  const double threshold = tol * t.norm() * t.norm();
  const bool za = std::abs(m.quadric_a) <= threshold;
  const bool zb = std::abs(m.quadric_b) <= threshold;
  const bool zc = std::abs(m.quadric_c) <= threshold;
  m.component1 = za && zb;
  m.component2 = za && zc;
  m.component3 = zb && zc;
  return m;
}

/// y lies in the normal space of the rank-one cone at x iff every tangent
/// residual of y at x vanishes. Independent of the scale carried by x.
inline bool normal_space_membership(const DenseRankOne& x, const DenseTensorXcd& y,
                                    double tol = kDefaultTol) {
  if (static_cast<int>(x.factors.size()) != y.order())
    throw std::invalid_argument("normal_space_membership: slot count mismatch");
  for (const auto& f : x.factors)
    if (f.norm() == 0.0) throw std::invalid_argument("normal_space_membership: zero factor");
  const double ynorm = y.norm();
  if (ynorm == 0.0) return true;
  for (int k = 0; k < y.order(); ++k) {
    const VectorX<Complex> block = contract_all_but(y, std::span<const LinearForm>(x.factors), k);
    double slot_scale = 1.0;
    for (int j = 0; j < y.order(); ++j)
      if (j != k) slot_scale *= x.factors[j].norm();
    if (block.template lpNorm<Eigen::Infinity>() > tol * ynorm * slot_scale) return false;
  }
  return true;
}

inline bool normal_space_membership(const SymRankOne& x, const SymmetricTensorXcd& y,
                                    double tol = kDefaultTol) {
  if (x.u.size() != y.vars() || x.degree != y.degree())
    throw std::invalid_argument("normal_space_membership: shape mismatch");
  const double unorm = x.u.norm();
  if (unorm == 0.0) throw std::invalid_argument("normal_space_membership: zero linear form");
  const double ynorm = y.norm();
  if (ynorm == 0.0) return true;
  const VectorX<Complex> r = veronese_tangent_residuals(y, x.u);
  return r.template lpNorm<Eigen::Infinity>() <=
         tol * ynorm * std::pow(unorm, y.degree() - 1);
}

struct DlSample {
  SymmetricTensorXcd tensor;
  SymmetricDecomposition decomposition;
  int frame_size = 0;        // s: dimension of the isotropic span used
  int span_terms = 0;        // k: terms drawn from the isotropic span
  int non_isotropic_terms = 0;  // t: real orthonormal terms
};

/// Random weakly odeco symmetric tensor of rank at most r: k powers of
/// combinations inside a rotated isotropic frame of size s plus t real
/// orthonormal powers, k + t = r, t <= n - 2s. The configuration (s, t) is
/// drawn uniformly among the feasible ones unless forced.
inline DlSample dl_sample(int r, int n, int d, std::uint64_t seed, int force_s = -1,
                          int force_t = -1) {
  if (r < 1) throw std::invalid_argument("dl_sample: need r >= 1");
  if (n < 1 || d < 1) throw std::invalid_argument("dl_sample: need n, d >= 1");
  struct Config {
    int s, t;
  };
  std::vector<Config> feasible;
  const int m = n / 2;
  for (int s = 0; s <= m; ++s) {
    if (s == 0) {
      if (r <= n) feasible.push_back({0, r});
      continue;
    }
    const int t_max = std::min(n - 2 * s, r - 1);
    for (int t = 0; t <= t_max; ++t) feasible.push_back({s, t});
  }
  if (force_s >= 0 || force_t >= 0) {
    feasible.erase(std::remove_if(feasible.begin(), feasible.end(),
                                  [&](const Config& c) {
                                    return (force_s >= 0 && c.s != force_s) ||
                                           (force_t >= 0 && c.t != force_t);
                                  }),
                   feasible.end());
  }
  if (feasible.empty()) throw std::invalid_argument("dl_sample: infeasible (r, n, d) request");

  Rng rng(seed);
  const Config cfg = feasible[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<int>(feasible.size()) - 1))];
  const int k = r - cfg.t;

  const MatrixX<double> q = haar_orthogonal(n, rng);
  DlSample sample;
  sample.frame_size = cfg.s;
  sample.span_terms = k;
  sample.non_isotropic_terms = cfg.t;
  sample.decomposition.n = n;
  sample.decomposition.d = d;

  std::vector<LinearForm> frame;
  for (int i = 0; i < cfg.s; ++i)
    frame.push_back(q.col(2 * i).cast<Complex>() +
                    Complex(0.0, 1.0) * q.col(2 * i + 1).cast<Complex>());
  for (int a = 0; a < k; ++a) {
    LinearForm l = LinearForm::Zero(n);
    for (const auto& w : frame) l += rng.cgaussian() * w;
    if (l.norm() < 1e-10) {
      --a;
      continue;
    }
    sample.decomposition.terms.push_back({Complex(1.0, 0.0), std::move(l)});
  }
  for (int j = 0; j < cfg.t; ++j)
    sample.decomposition.terms.push_back(
        {Complex(1.0, 0.0), q.col(2 * cfg.s + j).cast<Complex>()});
  sample.tensor = sample.decomposition.assemble();
  return sample;
}

}  // namespace tdeflate
