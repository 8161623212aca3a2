#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tdeflate/json_io.hpp"
#include "tdeflate/random.hpp"

#include <string>

using namespace tdeflate;

namespace {

DenseTensorXcd random_dense(Rng& rng, std::vector<int> shape) {
  Eigen::Index total = 1;
  for (int n : shape) total *= n;
  VectorX<Complex> entries(total);
  for (Eigen::Index i = 0; i < total; ++i) entries[i] = rng.cgaussian();
  return DenseTensorXcd(std::move(shape), std::move(entries));
}

}  // namespace

TEST_CASE("dense tensor json layout") {
  DenseTensorXcd t({2, 2});
  t.at({0, 1}) = Complex(1.5, -2.0);
  const Json j = to_json(t);
  CHECK(j["kind"] == "dense");
  CHECK(j["shape"] == Json::array({2, 2}));
  // row-major with the last index fastest: entry (0,1) is the second pair
  CHECK(j["entries"][1] == Json::array({1.5, -2.0}));
}

TEST_CASE("symmetric tensor json layout") {
  SymmetricTensorXcd f(2, 2);
  f.coeff({1, 1}) = Complex(3.0, 0.5);
  const Json j = to_json(f);
  CHECK(j["kind"] == "symmetric");
  CHECK(j["n"] == 2);
  CHECK(j["d"] == 2);
  // alphas serialize in lexicographically descending order
  CHECK(j["coeffs"][0]["alpha"] == Json::array({2, 0}));
  CHECK(j["coeffs"][1]["alpha"] == Json::array({1, 1}));
  CHECK(j["coeffs"][2]["alpha"] == Json::array({0, 2}));
  CHECK(j["coeffs"][1]["re"] == 3.0);
  CHECK(j["coeffs"][1]["im"] == 0.5);
}

TEST_CASE("round trips are exact") {
  Rng rng(7);
  SUBCASE("dense") {
    for (int rep = 0; rep < 10; ++rep) {
      const auto t = random_dense(rng, {2, 3, 2});
      const auto parsed = tensor_from_json(Json::parse(to_json(t).dump()));
      REQUIRE(std::holds_alternative<DenseTensorXcd>(parsed));
      const auto& u = std::get<DenseTensorXcd>(parsed);
      CHECK(u.shape() == t.shape());
      CHECK((u.entries() - t.entries()).norm() == 0.0);
    }
  }
  SUBCASE("symmetric") {
    for (int rep = 0; rep < 10; ++rep) {
      SymmetricTensorXcd f(3, 4);
      for (int i = 0; i < f.basis().size(); ++i) f.coeffs()[i] = rng.cgaussian();
      const auto parsed = tensor_from_json(Json::parse(to_json(f).dump()));
      REQUIRE(std::holds_alternative<SymmetricTensorXcd>(parsed));
      const auto& g = std::get<SymmetricTensorXcd>(parsed);
      CHECK((g.coeffs() - f.coeffs()).norm() == 0.0);
    }
  }
  SUBCASE("terms") {
    const SymRankOne term{rng.cgaussian_vector(3), 4, Complex(2.0, -1.0)};
    const auto parsed = term_from_json(Json::parse(to_json(term).dump()));
    REQUIRE(std::holds_alternative<SymRankOne>(parsed));
    const auto& back = std::get<SymRankOne>(parsed);
    CHECK(back.degree == 4);
    CHECK((back.u - term.u).norm() == 0.0);
    CHECK(back.scale == term.scale);
  }
}

TEST_CASE("format violations name the first offending field") {
  SUBCASE("missing kind") {
    CHECK_THROWS_WITH_AS(tensor_from_json(Json::parse(R"({"shape":[2]})")),
                         doctest::Contains("kind"), FormatError);
  }
  SUBCASE("entry count mismatch") {
    const auto j = Json::parse(R"({"kind":"dense","shape":[2,2],"entries":[[1,0],[0,0]]})");
    CHECK_THROWS_WITH_AS(tensor_from_json(j), doctest::Contains("entries"), FormatError);
  }
  SUBCASE("malformed complex pair") {
    const auto j = Json::parse(R"({"kind":"dense","shape":[2],"entries":[[1,0],[0]]})");
    CHECK_THROWS_WITH_AS(tensor_from_json(j), doctest::Contains("entries[1]"), FormatError);
  }
  SUBCASE("bad exponent tuple") {
    const auto j = Json::parse(
        R"({"kind":"symmetric","n":2,"d":2,"coeffs":[{"alpha":[1,2],"re":1,"im":0}]})");
    CHECK_THROWS_WITH_AS(tensor_from_json(j), doctest::Contains("alpha"), FormatError);
  }
  SUBCASE("duplicate exponent tuple") {
    const auto j = Json::parse(
        R"({"kind":"symmetric","n":2,"d":2,"coeffs":[
            {"alpha":[2,0],"re":1,"im":0},{"alpha":[2,0],"re":2,"im":0}]})");
    CHECK_THROWS_WITH_AS(tensor_from_json(j), doctest::Contains("duplicate"), FormatError);
  }
  SUBCASE("non-finite number") {
    Json j;
    j["kind"] = "dense";
    j["shape"] = Json::array({1});
    j["entries"] = Json::array({Json::array({std::numeric_limits<double>::infinity(), 0.0})});
    CHECK_THROWS_AS(tensor_from_json(j), FormatError);
  }
}

TEST_CASE("chain logs serialize one step per line") {
  const SymmetricTensorXcd t = [] {
    SymmetricTensorXcd f = power<Complex>((VectorX<double>(2) << 1, 0).finished().cast<Complex>(), 3);
    f += power<Complex>((VectorX<double>(2) << 0, 1).finished().cast<Complex>(), 3);
    return f;
  }();
  SolverConfig cfg;
  cfg.seed = 3;
  const auto chain = deflate(t, DeflationPolicy::best_fit(), cfg, 5);
  const std::string log = chain_to_jsonl(chain);
  const auto newlines = std::count(log.begin(), log.end(), '\n');
  CHECK(newlines == static_cast<long>(chain.steps.size()));
  // every line parses back as a JSON object with the step fields
  std::size_t start = 0;
  int step = 1;
  while (start < log.size()) {
    const std::size_t end = log.find('\n', start);
    const Json j = Json::parse(log.substr(start, end - start));
    CHECK(j["step"] == step);
    CHECK(j.contains("norm_before"));
    CHECK(j.contains("chosen"));
    CHECK(j.contains("rank_after"));
    ++step;
    start = end + 1;
  }
}

TEST_CASE("sc10 csv header and rows") {
  const auto summary = sc10_experiment(3, 5);
  const std::string csv = sc10_to_csv(summary);
  CHECK(csv.rfind("trial,seed,delta_sign_before,delta_sign_after\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("positive") != std::string::npos);
}
