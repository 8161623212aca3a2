#pragma once

#include "tdeflate/critical.hpp"
#include "tdeflate/data_locus.hpp"
#include "tdeflate/deflation.hpp"
#include "tdeflate/symmetric_tensor.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tdeflate {

using Json = nlohmann::json;

/// Raised on any document that violates the file-format contract; the message
/// names the first offending field.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

namespace io_detail {

inline double require_finite(double v, const std::string& where) {
  if (!std::isfinite(v)) throw FormatError(where + ": non-finite number");
  return v;
}

inline Complex parse_complex(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError(where + ": expected [re, im]");
  return {require_finite(j[0].get<double>(), where), require_finite(j[1].get<double>(), where)};
}

inline Json dump_complex(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline const Json& require_field(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(where + ": missing field \"" + key + "\"");
  return *it;
}

}  // namespace io_detail

inline Json to_json(const DenseTensorXcd& t) {
  Json j;
  j["kind"] = "dense";
  j["shape"] = t.shape();
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < t.size(); ++i) entries.push_back(io_detail::dump_complex(t.entries()[i]));
  j["entries"] = std::move(entries);
  return j;
}

/// Symmetric tensors serialize coefficient-wise with exponent tuples in
/// lexicographically descending order (the basis enumeration order).
inline Json to_json(const SymmetricTensorXcd& f) {
  Json j;
  j["kind"] = "symmetric";
  j["n"] = f.vars();
  j["d"] = f.degree();
  Json coeffs = Json::array();
  for (int i = 0; i < f.basis().size(); ++i) {
    const auto alpha = f.basis().exponent(i);
    Json entry;
    entry["alpha"] = std::vector<int>(alpha.begin(), alpha.end());
    entry["re"] = f.coeffs()[i].real();
    entry["im"] = f.coeffs()[i].imag();
    coeffs.push_back(std::move(entry));
  }
  j["coeffs"] = std::move(coeffs);
  return j;
}

inline DenseTensorXcd dense_tensor_from_json(const Json& j) {
  const Json& shape_json = io_detail::require_field(j, "shape", "dense tensor");
  if (!shape_json.is_array() || shape_json.empty()) throw FormatError("shape: expected non-empty array");
  std::vector<int> shape;
  for (std::size_t i = 0; i < shape_json.size(); ++i) {
    if (!shape_json[i].is_number_integer() || shape_json[i].get<int>() < 1)
      throw FormatError("shape[" + std::to_string(i) + "]: expected positive integer");
    shape.push_back(shape_json[i].get<int>());
  }
  Eigen::Index expected = 1;
  for (int n : shape) expected *= n;
  const Json& entries_json = io_detail::require_field(j, "entries", "dense tensor");
  if (!entries_json.is_array() || static_cast<Eigen::Index>(entries_json.size()) != expected)
    throw FormatError("entries: expected " + std::to_string(expected) + " pairs");
  VectorX<Complex> entries(expected);
  for (Eigen::Index i = 0; i < expected; ++i)
    entries[i] = io_detail::parse_complex(entries_json[i], "entries[" + std::to_string(i) + "]");
  return {std::move(shape), std::move(entries)};
}

inline SymmetricTensorXcd symmetric_tensor_from_json(const Json& j) {
  const Json& n_json = io_detail::require_field(j, "n", "symmetric tensor");
  const Json& d_json = io_detail::require_field(j, "d", "symmetric tensor");
  if (!n_json.is_number_integer() || n_json.get<int>() < 1) throw FormatError("n: expected positive integer");
  if (!d_json.is_number_integer() || d_json.get<int>() < 1) throw FormatError("d: expected positive integer");
  const int n = n_json.get<int>();
  const int d = d_json.get<int>();
  SymmetricTensorXcd f(n, d);
  const Json& coeffs_json = io_detail::require_field(j, "coeffs", "symmetric tensor");
  if (!coeffs_json.is_array()) throw FormatError("coeffs: expected array");
  std::vector<bool> seen(f.basis().size(), false);
  for (std::size_t i = 0; i < coeffs_json.size(); ++i) {
    const std::string where = "coeffs[" + std::to_string(i) + "]";
    const Json& entry = coeffs_json[i];
    if (!entry.is_object()) throw FormatError(where + ": expected object");
    const Json& alpha_json = io_detail::require_field(entry, "alpha", where);
    if (!alpha_json.is_array() || static_cast<int>(alpha_json.size()) != n)
      throw FormatError(where + ".alpha: expected " + std::to_string(n) + " exponents");
    std::vector<int> alpha;
    for (const auto& a : alpha_json) {
      if (!a.is_number_integer() || a.get<int>() < 0)
        throw FormatError(where + ".alpha: expected non-negative integers");
      alpha.push_back(a.get<int>());
    }
    int idx = 0;
    try {
      idx = f.basis().index_of(alpha);
    } catch (const std::invalid_argument&) {
      throw FormatError(where + ".alpha: exponents do not sum to d");
    }
    if (seen[idx]) throw FormatError(where + ".alpha: duplicate exponent tuple");
    seen[idx] = true;
    const Json& re = io_detail::require_field(entry, "re", where);
    const Json& im = io_detail::require_field(entry, "im", where);
    if (!re.is_number() || !im.is_number()) throw FormatError(where + ": re/im must be numbers");
    f.coeffs()[idx] = Complex(io_detail::require_finite(re.get<double>(), where),
                              io_detail::require_finite(im.get<double>(), where));
  }
  return f;
}

using TensorVariant = std::variant<DenseTensorXcd, SymmetricTensorXcd>;

inline TensorVariant tensor_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("tensor: expected object");
  const Json& kind = io_detail::require_field(j, "kind", "tensor");
  if (kind == "dense") return dense_tensor_from_json(j);
  if (kind == "symmetric") return symmetric_tensor_from_json(j);
  throw FormatError("kind: expected \"dense\" or \"symmetric\"");
}

inline Json to_json(const SymRankOne& term) {
  Json j;
  j["kind"] = "symmetric_rank_one";
  j["n"] = static_cast<int>(term.u.size());
  j["d"] = term.degree;
  Json u = Json::array();
  for (Eigen::Index i = 0; i < term.u.size(); ++i) u.push_back(io_detail::dump_complex(term.u[i]));
  j["u"] = std::move(u);
  j["scale"] = io_detail::dump_complex(term.scale);
  return j;
}

inline Json to_json(const DenseRankOne& term) {
  Json j;
  j["kind"] = "dense_rank_one";
  Json factors = Json::array();
  for (const auto& f : term.factors) {
    Json coords = Json::array();
    for (Eigen::Index i = 0; i < f.size(); ++i) coords.push_back(io_detail::dump_complex(f[i]));
    factors.push_back(std::move(coords));
  }
  j["factors"] = std::move(factors);
  j["scale"] = io_detail::dump_complex(term.scale);
  return j;
}

inline LinearForm linear_form_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw FormatError(where + ": expected non-empty array");
  LinearForm v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] =
        io_detail::parse_complex(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

inline SymRankOne sym_rank_one_from_json(const Json& j) {
  SymRankOne term;
  const Json& d = io_detail::require_field(j, "d", "symmetric_rank_one");
  if (!d.is_number_integer() || d.get<int>() < 1) throw FormatError("d: expected positive integer");
  term.degree = d.get<int>();
  term.u = linear_form_from_json(io_detail::require_field(j, "u", "symmetric_rank_one"), "u");
  term.scale = io_detail::parse_complex(io_detail::require_field(j, "scale", "symmetric_rank_one"), "scale");
  return term;
}

inline DenseRankOne dense_rank_one_from_json(const Json& j) {
  DenseRankOne term;
  const Json& factors = io_detail::require_field(j, "factors", "dense_rank_one");
  if (!factors.is_array() || factors.size() < 2)
    throw FormatError("factors: expected at least two factor arrays");
  for (std::size_t i = 0; i < factors.size(); ++i)
    term.factors.push_back(linear_form_from_json(factors[i], "factors[" + std::to_string(i) + "]"));
  term.scale = io_detail::parse_complex(io_detail::require_field(j, "scale", "dense_rank_one"), "scale");
  return term;
}

using TermVariant = std::variant<SymRankOne, DenseRankOne>;

inline TermVariant term_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("term: expected object");
  const Json& kind = io_detail::require_field(j, "kind", "term");
  if (kind == "symmetric_rank_one") return sym_rank_one_from_json(j);
  if (kind == "dense_rank_one") return dense_rank_one_from_json(j);
  throw FormatError("kind: expected \"symmetric_rank_one\" or \"dense_rank_one\"");
}

template <typename Term>
Json to_json(const CriticalPointT<Term>& point) {
  Json j;
  j["term"] = to_json(point.term);
  j["scale"] = io_detail::dump_complex(point.scale);
  j["residual"] = point.residual_norm;
  j["objective"] = point.objective;
  j["source"] = to_string(point.source);
  return j;
}

template <typename Term>
Json to_json(const std::vector<CriticalPointT<Term>>& points) {
  Json arr = Json::array();
  for (const auto& p : points) arr.push_back(to_json(p));
  return arr;
}

inline Json to_json(const RankReport& report) {
  Json j;
  j["flattening_ranks"] = report.flattening_ranks;
  if (report.hyperdet_sign) j["hyperdet_sign"] = to_string(*report.hyperdet_sign);
  return j;
}

/// One chain step per JSON line.
template <typename Point>
std::string chain_to_jsonl(const DeflationChain<Point>& chain) {
  std::string out;
  for (std::size_t i = 0; i < chain.steps.size(); ++i) {
    const auto& step = chain.steps[i];
    Json j;
    j["step"] = i + 1;
    j["norm_before"] = step.norm_before;
    j["norm_after"] = step.norm_after;
    j["chosen"] = to_json(step.chosen);
    j["rank_after"] = to_json(step.rank_after);
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline Json to_json(const SymmetricDecomposition& dec) {
  Json j;
  j["kind"] = "symmetric_decomposition";
  j["n"] = dec.n;
  j["d"] = dec.d;
  Json terms = Json::array();
  for (const auto& term : dec.terms) {
    Json t;
    t["scale"] = io_detail::dump_complex(term.scale);
    Json coords = Json::array();
    for (Eigen::Index i = 0; i < term.form.size(); ++i)
      coords.push_back(io_detail::dump_complex(term.form[i]));
    t["form"] = std::move(coords);
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

inline Json to_json(const IsotropicFrame& frame) {
  Json j;
  j["n"] = frame.n;
  Json vectors = Json::array();
  for (const auto& v : frame.vectors) {
    Json coords = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) coords.push_back(io_detail::dump_complex(v[i]));
    vectors.push_back(std::move(coords));
  }
  j["vectors"] = std::move(vectors);
  return j;
}

inline std::string sc10_to_csv(const Sc10Summary& summary) {
  std::string out = "trial,seed,delta_sign_before,delta_sign_after\n";
  for (const auto& trial : summary.records) {
    out += std::to_string(trial.trial);
    out += ',';
    out += std::to_string(trial.seed);
    out += ',';
    out += trial.solver_ok ? to_string(trial.sign_before) : "solver_failure";
    out += ',';
    out += trial.solver_ok ? to_string(trial.sign_after) : "solver_failure";
    out += '\n';
  }
  return out;
}

}  // namespace tdeflate
