#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli_helpers.hpp"
#include "tdeflate/data_locus.hpp"
#include "tdeflate/json_io.hpp"
#include "tdeflate/random.hpp"

#include <fstream>
#include <string>

using namespace tdeflate;
using testutil::run_command;

namespace {

std::string write_json(const std::string& dir, const std::string& name, const Json& j) {
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

LinearForm basis_vector(int n, int k) {
  LinearForm v = LinearForm::Zero(n);
  v[k] = Complex(1.0, 0.0);
  return v;
}

}  // namespace

TEST_CASE("stab-table command") {
  const std::string bin = testutil::tdeflate_binary();
  const std::string dir = testutil::make_temp_dir();

  SUBCASE("full table with CSV output") {
    const std::string csv_path = dir + "/table.csv";
    const auto result = run_command(bin + " stab-table --out " + csv_path);
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("776") != std::string::npos);
    const std::string csv = slurp(csv_path);
    CHECK(csv.rfind("n\\d,3,", 0) == 0);
    CHECK(csv.find("10,10,15,26,42,66,99,143,201,273,364,476,612,776") != std::string::npos);
  }
  SUBCASE("single cell") {
    const auto result =
        run_command(bin + " stab-table --n-min 4 --n-max 4 --d-min 3 --d-max 3");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("4") != std::string::npos);
  }
  SUBCASE("inverted range is a usage error") {
    const auto result = run_command(bin + " stab-table --n-min 6 --n-max 4");
    CHECK(result.exit_code == 2);
  }
  SUBCASE("manifest echoes the run") {
    const std::string manifest = dir + "/manifest.json";
    const auto result = run_command(bin + " --manifest " + manifest +
                                    " stab-table --n-min 4 --n-max 5 --d-min 3 --d-max 4");
    CHECK(result.exit_code == 0);
    const Json j = Json::parse(slurp(manifest));
    CHECK(j["command"] == "stab-table");
    CHECK(j["config"]["n_max"] == 5);
    CHECK(j["tool_version"].get<std::string>().find("tdeflate") == 0);
  }
}

TEST_CASE("deflate command") {
  const std::string bin = testutil::tdeflate_binary();
  const std::string dir = testutil::make_temp_dir();

  SUBCASE("odeco rank-3 fixture reaches zero in three steps") {
    const auto [t, dec] = weakly_odeco_symmetric(0, 3, 4, 4, 77);
    const std::string input = write_json(dir, "odeco.json", to_json(t));
    const std::string log = dir + "/chain.jsonl";
    const auto result =
        run_command(bin + " deflate --input " + input + " --seed 5 --log " + log);
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("terminated=ReachedZero") != std::string::npos);
    CHECK(result.output.find("steps=3") != std::string::npos);
    const std::string chain_log = slurp(log);
    CHECK(std::count(chain_log.begin(), chain_log.end(), '\n') == 3);
  }
  SUBCASE("rank-one fixture needs one step") {
    const SymmetricTensorXcd t = power<Complex>(basis_vector(3, 1), 3);
    const std::string input = write_json(dir, "rank1.json", to_json(t));
    const auto result = run_command(bin + " deflate --input " + input);
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("steps=1") != std::string::npos);
  }
  SUBCASE("2x2x2 input reports the hyperdeterminant sign after the first step") {
    Rng rng(11);
    DenseTensorXcd t({2, 2, 2});
    do {
      for (Eigen::Index i = 0; i < 8; ++i) t.entries()[i] = Complex(rng.gaussian(), 0.0);
    } while (classify_hyperdet(hyperdeterminant_222(t.real_part()), t.norm()) !=
             HyperdetSign::Positive);
    const std::string input = write_json(dir, "t222.json", to_json(t));
    const auto result =
        run_command(bin + " deflate --input " + input + " --max-steps 1 --seed 3");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("hyperdet_sign_after_step1=") != std::string::npos);
  }
  SUBCASE("parse errors exit 2") {
    const std::string bad = dir + "/bad.json";
    std::ofstream(bad) << "{\"kind\":\"dense\"}";
    CHECK(run_command(bin + " deflate --input " + bad).exit_code == 2);
    CHECK(run_command(bin + " deflate --input " + dir + "/missing.json").exit_code == 2);
  }
}

TEST_CASE("verify command") {
  const std::string bin = testutil::tdeflate_binary();
  const std::string dir = testutil::make_temp_dir();

  SymmetricTensorXcd t = power<Complex>(basis_vector(2, 0), 3);
  t += power<Complex>(basis_vector(2, 1), 3);
  const std::string input = write_json(dir, "odeco.json", to_json(t));

  SUBCASE("odeco term verifies") {
    const SymRankOne term{basis_vector(2, 0), 3, Complex(1.0, 0.0)};
    const std::string term_path = write_json(dir, "term.json", to_json(term));
    const auto result = run_command(bin + " verify --input " + input + " --term " + term_path);
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("critical=true") != std::string::npos);
  }
  SUBCASE("isotropic span term verifies at any scale") {
    const auto frame = isotropic_frame(4);
    SymmetricTensorXcd f(4, 3);
    for (const auto& l : frame.vectors) f += power<Complex>(l, 3);
    const std::string f_path = write_json(dir, "frame_sum.json", to_json(f));
    LinearForm l = frame.vectors[0] + Complex(2.0, 1.0) * frame.vectors[1];
    const SymRankOne term{l, 3, Complex(0.5, 0.25)};
    const std::string term_path = write_json(dir, "iso_term.json", to_json(term));
    const auto result = run_command(bin + " verify --input " + f_path + " --term " + term_path);
    CHECK(result.exit_code == 0);
  }
  SUBCASE("wrong term exits 1") {
    const SymRankOne term{(basis_vector(2, 0) + basis_vector(2, 1)).eval(), 3, Complex(1.0, 0.0)};
    const std::string term_path = write_json(dir, "wrong.json", to_json(term));
    const auto result = run_command(bin + " verify --input " + input + " --term " + term_path);
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("critical=false") != std::string::npos);
  }
}

TEST_CASE("odeco-gen, dl2-test, hyperdet, sc10 commands") {
  const std::string bin = testutil::tdeflate_binary();
  const std::string dir = testutil::make_temp_dir();

  SUBCASE("odeco-gen writes a valid symmetric tensor and decomposition") {
    const std::string out = dir + "/gen.json";
    const std::string dec = dir + "/dec.json";
    const auto result = run_command(bin + " odeco-gen --n 4 --d 3 --frame-size 1 --real-count 2" +
                                    " --seed 9 --out " + out + " --decomposition " + dec);
    CHECK(result.exit_code == 0);
    const auto parsed = tensor_from_json(Json::parse(slurp(out)));
    REQUIRE(std::holds_alternative<SymmetricTensorXcd>(parsed));
    CHECK(std::get<SymmetricTensorXcd>(parsed).vars() == 4);
    const Json dec_json = Json::parse(slurp(dec));
    CHECK(dec_json["terms"].size() == 3);
  }
  SUBCASE("infeasible odeco-gen is a usage error") {
    CHECK(run_command(bin + " odeco-gen --n 3 --d 3 --frame-size 2 --real-count 0").exit_code == 2);
  }
  SUBCASE("dl2-test on an odeco fixture prints three trues") {
    const auto [t, dec] = weakly_odeco_dense({2, 2, 2}, 2, 5);
    const std::string input = write_json(dir, "odeco222.json", to_json(t));
    const auto result = run_command(bin + " dl2-test --input " + input);
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("component1=true component2=true component3=true") !=
          std::string::npos);
  }
  SUBCASE("hyperdet prints the diagonal value") {
    DenseTensorXcd diag({2, 2, 2});
    diag.at({0, 0, 0}) = Complex(1.0, 0.0);
    diag.at({1, 1, 1}) = Complex(1.0, 0.0);
    const std::string input = write_json(dir, "diag.json", to_json(diag));
    const auto result = run_command(bin + " hyperdet --input " + input);
    CHECK(result.exit_code == 0);
    CHECK(result.output.rfind("1\n") != std::string::npos);
  }
  SUBCASE("sc10 is bit-reproducible across runs and worker counts") {
    const std::string csv1 = dir + "/a.csv";
    const std::string csv2 = dir + "/b.csv";
    const std::string base = bin + " sc10 --trials 6 --seed 7 --out ";
    const auto r1 = run_command("TENSOR_DEFLATE_THREADS=1 " + base + csv1);
    const auto r2 = run_command("TENSOR_DEFLATE_THREADS=4 " + base + csv2);
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    CHECK(r1.output == r2.output);
    CHECK(slurp(csv1) == slurp(csv2));
    CHECK(std::count(r1.output.begin(), r1.output.end(), '\n') >= 1);
  }
}
