// Command-line interface for critical rank-one approximation, deflation
// chains, orthogonally decomposable tensor generation and testing, the 2x2x2
// hyperdeterminant, and the stabilization-step table.
//
// Exit codes: 0 success / affirmative result, 1 negative result,
// 2 usage or parse error, 3 numerical failure.

#include "tdeflate/critical.hpp"
#include "tdeflate/data_locus.hpp"
#include "tdeflate/deflation.hpp"
#include "tdeflate/json_io.hpp"
#include "tdeflate/stabilization.hpp"
#include "tdeflate/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace tdeflate;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

/// Fixed 17-significant-digit formatting so numeric output diffs cleanly.
std::string fmt17(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open input file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("JSON parse error: ") + e.what());
  }
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

struct ManifestInfo {
  std::string path;
  std::string command;
  Json config = Json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
};

void write_manifest(const ManifestInfo& info) {
  if (info.path.empty()) return;
  Json j;
  j["command"] = info.command;
  j["config"] = info.config;
  j["seed"] = info.seed;
  j["tool_version"] = std::string(kToolName) + " " + kVersion;
  j["outputs"] = info.outputs;
  write_file(info.path, j.dump(2) + "\n");
}

DeflationPolicy parse_policy(const std::string& text) {
  if (text == "best") return DeflationPolicy::best_fit();
  if (text == "random") return DeflationPolicy::random(0);
  if (text.rfind("index:", 0) == 0) {
    const int index = std::stoi(text.substr(6));
    if (index < 0) throw CLI::ValidationError("--policy", "index must be non-negative");
    return DeflationPolicy::user_selected(index);
  }
  throw CLI::ValidationError("--policy", "expected best, random, or index:K");
}

int cmd_stab_table(int n_min, int n_max, int d_min, int d_max, const std::string& out_path,
                   const std::string& manifest_path) {
  const StabTable table = stabilization_table(n_min, n_max, d_min, d_max);
  std::cout << table.to_ascii();
  const bool outside = n_min < 4 || n_max > 10 || d_min < 3 || d_max > 15;
  if (outside)
    std::cout << "note: values outside n in 4..10, d in 3..15 extrapolate the published table\n";
  std::vector<std::string> outputs;
  if (!out_path.empty()) {
    write_file(out_path, table.to_csv());
    outputs.push_back(out_path);
  }
  write_manifest({manifest_path,
                  "stab-table",
                  Json{{"n_min", n_min}, {"n_max", n_max}, {"d_min", d_min}, {"d_max", d_max}},
                  0,
                  outputs});
  return kExitOk;
}

template <typename Chain>
int report_chain(const Chain& chain, const std::string& log_path,
                 const std::string& manifest_path, const Json& config, std::uint64_t seed) {
  std::vector<std::string> outputs;
  if (!log_path.empty()) {
    write_file(log_path, chain_to_jsonl(chain));
    outputs.push_back(log_path);
  }
  const double final_norm = chain.steps.empty() ? chain.initial_norm : chain.steps.back().norm_after;
  std::cout << "terminated=" << to_string(chain.terminated) << " steps=" << chain.steps.size()
            << " final_norm=" << fmt17(final_norm) << "\n";
  if (!chain.steps.empty() && chain.steps.front().rank_after.hyperdet_sign)
    std::cout << "hyperdet_sign_after_step1=" << to_string(*chain.steps.front().rank_after.hyperdet_sign)
              << "\n";
  write_manifest({manifest_path, "deflate", config, seed, outputs});
  if (chain.terminated == ChainTermination::NoCriticalPointFound && chain.steps.empty())
    return kExitNumerical;
  return kExitOk;
}

int cmd_deflate(const std::string& input, const std::string& policy_text, int max_steps,
                std::uint64_t seed, const std::string& log_path, double tol, int starts,
                int max_iters, const std::string& manifest_path) {
  DeflationPolicy policy = parse_policy(policy_text);
  policy.seed = seed;
  SolverConfig cfg;
  cfg.tol = tol;
  cfg.num_starts = starts;
  cfg.max_iters = max_iters;
  cfg.seed = seed;
  const Json config{{"input", input},   {"policy", policy_text}, {"max_steps", max_steps},
                    {"tol", tol},       {"num_starts", starts},  {"max_iters", max_iters}};
  const TensorVariant tensor = tensor_from_json(load_json(input));
  if (std::holds_alternative<DenseTensorXcd>(tensor)) {
    const auto chain = deflate(std::get<DenseTensorXcd>(tensor), policy, cfg, max_steps);
    return report_chain(chain, log_path, manifest_path, config, seed);
  }
  const auto chain = deflate(std::get<SymmetricTensorXcd>(tensor), policy, cfg, max_steps);
  return report_chain(chain, log_path, manifest_path, config, seed);
}

int cmd_verify(const std::string& input, const std::string& term_path, double tol,
               const std::string& manifest_path) {
  const TensorVariant tensor = tensor_from_json(load_json(input));
  const TermVariant term = term_from_json(load_json(term_path));
  VerifyResult result;
  if (std::holds_alternative<SymmetricTensorXcd>(tensor)) {
    if (!std::holds_alternative<SymRankOne>(term))
      throw FormatError("term: symmetric tensor requires a symmetric_rank_one term");
    result = verify_critical_symmetric(std::get<SymmetricTensorXcd>(tensor),
                                       std::get<SymRankOne>(term), tol);
  } else {
    if (!std::holds_alternative<DenseRankOne>(term))
      throw FormatError("term: dense tensor requires a dense_rank_one term");
    result = verify_critical_dense(std::get<DenseTensorXcd>(tensor),
                                   std::get<DenseRankOne>(term), tol);
  }
  std::cout << "critical=" << (result.critical ? "true" : "false")
            << " residual=" << fmt17(result.residual) << "\n";
  write_manifest({manifest_path, "verify", Json{{"input", input}, {"term", term_path}, {"tol", tol}},
                  0, {}});
  return result.critical ? kExitOk : kExitNegative;
}

int cmd_odeco_gen(int n, int d, int frame_size, int real_count, std::uint64_t seed,
                  const std::string& out_path, const std::string& dec_path,
                  const std::string& manifest_path) {
  const auto [tensor, dec] = weakly_odeco_symmetric(frame_size, real_count, n, d, seed);
  const Json tensor_json = to_json(tensor);
  std::vector<std::string> outputs;
  if (out_path.empty()) {
    std::cout << tensor_json.dump(2) << "\n";
  } else {
    write_file(out_path, tensor_json.dump(2) + "\n");
    outputs.push_back(out_path);
  }
  if (!dec_path.empty()) {
    write_file(dec_path, to_json(dec).dump(2) + "\n");
    outputs.push_back(dec_path);
  }
  write_manifest({manifest_path, "odeco-gen",
                  Json{{"n", n}, {"d", d}, {"frame_size", frame_size}, {"real_count", real_count}},
                  seed, outputs});
  return kExitOk;
}

int cmd_dl2_test(const std::string& input, double tol, const std::string& manifest_path) {
  const TensorVariant tensor = tensor_from_json(load_json(input));
  if (!std::holds_alternative<DenseTensorXcd>(tensor))
    throw FormatError("input: dl2-test expects a dense 2x2x2 tensor");
  const Dl2Membership m = dl2_membership_222(std::get<DenseTensorXcd>(tensor), tol);
  std::cout << "component1=" << (m.component1 ? "true" : "false")
            << " component2=" << (m.component2 ? "true" : "false")
            << " component3=" << (m.component3 ? "true" : "false") << "\n";
  std::cout << "quadric_a=" << fmt17(std::abs(m.quadric_a))
            << " quadric_b=" << fmt17(std::abs(m.quadric_b))
            << " quadric_c=" << fmt17(std::abs(m.quadric_c)) << "\n";
  write_manifest({manifest_path, "dl2-test", Json{{"input", input}, {"tol", tol}}, 0, {}});
  return m.any() ? kExitOk : kExitNegative;
}

int cmd_hyperdet(const std::string& input, const std::string& manifest_path) {
  const TensorVariant tensor = tensor_from_json(load_json(input));
  if (!std::holds_alternative<DenseTensorXcd>(tensor))
    throw FormatError("input: hyperdet expects a dense 2x2x2 tensor");
  const Complex delta = hyperdeterminant_222(std::get<DenseTensorXcd>(tensor));
  if (delta.imag() == 0.0)
    std::cout << fmt17(delta.real()) << "\n";
  else
    std::cout << fmt17(delta.real()) << " + " << fmt17(delta.imag()) << "i\n";
  write_manifest({manifest_path, "hyperdet", Json{{"input", input}}, 0, {}});
  return kExitOk;
}

int cmd_sc10(int trials, std::uint64_t seed, const std::string& out_path, bool diagonal,
             double tol, const std::string& manifest_path) {
  const Sc10Sampling sampling = diagonal ? Sc10Sampling::Diagonal : Sc10Sampling::GenericPositive;
  const Sc10Summary summary = sc10_experiment(trials, seed, sampling, SolverConfig{}, tol);
  std::cout << "trials=" << summary.trials << " negative=" << summary.negative
            << " positive=" << summary.positive << " zero_at_tol=" << summary.zero_at_tol
            << " solver_failures=" << summary.solver_failures << "\n";
  std::vector<std::string> outputs;
  if (!out_path.empty()) {
    write_file(out_path, sc10_to_csv(summary));
    outputs.push_back(out_path);
  }
  write_manifest({manifest_path, "sc10",
                  Json{{"trials", trials}, {"diagonal", diagonal}, {"tol", tol}}, seed, outputs});
  return summary.solver_failures == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critical rank-one approximation and deflation chains for tensors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);

  std::string manifest_path;
  app.add_option("--manifest", manifest_path, "write a run manifest JSON to this path")
      ->configurable(false);

  // stab-table
  auto* stab = app.add_subcommand("stab-table", "stabilization step of the data-locus chain");
  int n_min = 4, n_max = 10, d_min = 3, d_max = 15;
  std::string stab_out;
  stab->add_option("--n-min", n_min);
  stab->add_option("--n-max", n_max);
  stab->add_option("--d-min", d_min);
  stab->add_option("--d-max", d_max);
  stab->add_option("--out", stab_out, "CSV output path");

  // deflate
  auto* defl = app.add_subcommand("deflate", "run an iterated rank-one subtraction chain");
  std::string defl_input, defl_policy = "best", defl_log;
  int defl_max_steps = 32, defl_starts = 32, defl_max_iters = 300;
  std::uint64_t defl_seed = 0;
  double defl_tol = 1e-10;
  defl->add_option("--input", defl_input, "tensor JSON file")->required();
  defl->add_option("--policy", defl_policy, "best | random | index:K");
  defl->add_option("--max-steps", defl_max_steps);
  defl->add_option("--seed", defl_seed);
  defl->add_option("--log", defl_log, "JSON-lines chain log path");
  defl->add_option("--tol", defl_tol, "certification tolerance");
  defl->add_option("--starts", defl_starts, "search starts per step");
  defl->add_option("--max-iters", defl_max_iters);

  // verify
  auto* verify = app.add_subcommand("verify", "certify a rank-one term as a critical approximation");
  std::string verify_input, verify_term;
  double verify_tol = kDefaultTol;
  verify->add_option("--input", verify_input, "tensor JSON file")->required();
  verify->add_option("--term", verify_term, "rank-one term JSON file")->required();
  verify->add_option("--tol", verify_tol);

  // odeco-gen
  auto* odeco = app.add_subcommand("odeco-gen", "generate a weakly odeco symmetric tensor");
  int odeco_n = 0, odeco_d = 0, odeco_frame = 0, odeco_real = 0;
  std::uint64_t odeco_seed = 0;
  std::string odeco_out, odeco_dec;
  odeco->add_option("--n", odeco_n, "number of variables")->required();
  odeco->add_option("--d", odeco_d, "degree")->required();
  odeco->add_option("--frame-size", odeco_frame, "isotropic frame terms");
  odeco->add_option("--real-count", odeco_real, "real orthonormal terms");
  odeco->add_option("--seed", odeco_seed);
  odeco->add_option("--out", odeco_out, "tensor JSON output path (stdout otherwise)");
  odeco->add_option("--decomposition", odeco_dec, "decomposition JSON output path");

  // dl2-test
  auto* dl2 = app.add_subcommand("dl2-test", "membership in the three 2x2x2 data-locus components");
  std::string dl2_input;
  double dl2_tol = kDefaultTol;
  dl2->add_option("--input", dl2_input, "tensor JSON file")->required();
  dl2->add_option("--tol", dl2_tol);

  // hyperdet
  auto* hyp = app.add_subcommand("hyperdet", "Cayley hyperdeterminant of a 2x2x2 tensor");
  std::string hyp_input;
  hyp->add_option("--input", hyp_input, "tensor JSON file")->required();

  // sc10
  auto* sc10 = app.add_subcommand("sc10", "rank-increase experiment on positive-hyperdeterminant tensors");
  int sc10_trials = 100;
  std::uint64_t sc10_seed = 0;
  std::string sc10_out;
  bool sc10_diagonal = false;
  double sc10_tol = kDefaultTol;
  sc10->add_option("--trials", sc10_trials);
  sc10->add_option("--seed", sc10_seed);
  sc10->add_option("--out", sc10_out, "per-trial CSV output path");
  sc10->add_flag("--diagonal", sc10_diagonal, "restrict sampling to diagonal (odeco) tensors");
  sc10->add_option("--tol", sc10_tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (stab->parsed())
      return cmd_stab_table(n_min, n_max, d_min, d_max, stab_out, manifest_path);
    if (defl->parsed())
      return cmd_deflate(defl_input, defl_policy, defl_max_steps, defl_seed, defl_log, defl_tol,
                         defl_starts, defl_max_iters, manifest_path);
    if (verify->parsed()) return cmd_verify(verify_input, verify_term, verify_tol, manifest_path);
    if (odeco->parsed())
      return cmd_odeco_gen(odeco_n, odeco_d, odeco_frame, odeco_real, odeco_seed, odeco_out,
                           odeco_dec, manifest_path);
    if (dl2->parsed()) return cmd_dl2_test(dl2_input, dl2_tol, manifest_path);
    if (hyp->parsed()) return cmd_hyperdet(hyp_input, manifest_path);
    if (sc10->parsed())
      return cmd_sc10(sc10_trials, sc10_seed, sc10_out, sc10_diagonal, sc10_tol, manifest_path);
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
