#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "coupled_levy/error.hpp"
#include "coupled_levy/json_io.hpp"
#include "test_helpers.hpp"

using namespace coupled_levy;
using namespace testing_support;

TEST(JsonIo, ParsesEachFamily) {
  const auto u = parse_distribution(R"({"family": "uniform", "lo": -1, "hi": 3})");
  EXPECT_NEAR(u.cdf(1.0), 0.5, 1e-12);
  const auto t = parse_distribution(R"({"family": "triangular", "lo": -1, "mode": 0, "hi": 2})");
  EXPECT_NEAR(t.cdf(0.0), 1.0 / 3.0, 1e-12);
  const auto l = parse_distribution(R"({"family": "laplace", "loc": 2, "scale": 0.5})");
  EXPECT_NEAR(l.cdf(2.0), 0.5, 1e-12);
  const auto e = parse_distribution(R"({"family": "exponential", "rate": 2})");
  EXPECT_NEAR(e.cdf(1.0), 1.0 - std::exp(-2.0), 1e-12);
  const auto g = parse_distribution(R"({"family": "gaussian", "mu": 1, "sigma": 2})");
  EXPECT_NEAR(g.cdf(1.0), 0.5, 1e-12);
  const auto tab = parse_distribution(
      R"({"family": "tabulated", "grid": [0, 1, 2], "values": [1, 3]})");
  EXPECT_NEAR(tab.cdf(1.0), 0.25, 1e-12);
}

TEST(JsonIo, AtomsMixturesAndShift) {
  const auto a = parse_distribution(R"({"atoms": [[-1, 0.5], [1, 0.5]], "shift": 2})");
  EXPECT_DOUBLE_EQ(a.atom_at(1.0), 0.5);
  EXPECT_DOUBLE_EQ(a.atom_at(3.0), 0.5);
  const auto m = parse_distribution(
      R"({"atoms": [[0, 0.25]], "density": {"family": "uniform", "lo": 0, "hi": 1},
          "density_mass": 0.75})");
  EXPECT_NEAR(m.total_mass(), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.atom_at(0.0), 0.25);
  EXPECT_NEAR(m.cdf(0.5), 0.25 + 0.375, 1e-12);
}

TEST(JsonIo, RejectsMalformedLaws) {
  for (const char* bad : {
           "not json",
           "[1, 2]",
           R"({"family": "cauchy"})",
           R"({"family": "uniform", "lo": 1, "hi": 0})",
           R"({"family": "laplace", "scale": -1})",
           R"({"family": "uniform", "lo": "a", "hi": 1})",
           R"({"atoms": [[0, 0.5]]})",
           R"({"atoms": [[0, 0.5, 1]]})",
           R"({"family": "tabulated", "grid": [0, 1], "values": [1, 2]})",
       }) {
    EXPECT_THROW(parse_distribution(bad), ConfigError) << bad;
  }
}

TEST(JsonIo, Costs) {
  EXPECT_DOUBLE_EQ(parse_cost(R"({"form": "power", "p": 0.5})")(4.0), 2.0);
  EXPECT_DOUBLE_EQ(parse_cost(R"({"form": "capped", "c": 1})")(3.0), 1.0);
  EXPECT_NEAR(parse_cost(R"({"form": "bounded_exp"})")(1.0), ConcaveCost::bounded_exp()(1.0),
              0.0);
  const auto bands =
      parse_cost(R"({"form": "bands", "bands": [{"lambda": 1, "c": 0.5}, {"lambda": 2, "c": 1}]})");
  EXPECT_DOUBLE_EQ(bands(0.75), 0.5 + 1.5);
  EXPECT_THROW(parse_cost(R"({"form": "power", "p": 1.5})"), ConfigError);
  EXPECT_THROW(parse_cost(R"({"form": "log"})"), ConfigError);
  EXPECT_THROW(parse_cost(R"({"p": 0.5})"), ConfigError);
}

TEST(JsonIo, ProcessSpecs) {
  const auto s = parse_levy_spec(
      R"({"rate": 2, "jump_law": {"family": "laplace"}, "y0": 1, "horizon": 3})");
  EXPECT_EQ(s.rate, 2.0);
  EXPECT_EQ(s.x0, 0.0);
  EXPECT_EQ(s.y0, 1.0);
  EXPECT_EQ(s.horizon, 3.0);
  EXPECT_THROW(parse_levy_spec(R"({"rate": 0, "jump_law": {"family": "laplace"}})"),
               ConfigError);
  const auto c = parse_chain_spec(
      R"({"jump_law": {"atoms": [[-1, 0.25], [0, 0.5], [1, 0.25]]}, "y0": 2, "steps": 5})");
  EXPECT_EQ(c.steps, 5u);
  EXPECT_EQ(c.y0, 2.0);
  EXPECT_THROW(parse_chain_spec(R"({"jump_law": {"family": "laplace"}, "steps": 1.5})"),
               ConfigError);
}

TEST(JsonIo, LoadsFilesAndReportsMissingOnes) {
  const auto path = std::filesystem::temp_directory_path() / "coupled_levy_law.json";
  std::ofstream(path) << R"({"family": "exponential", "rate": 1})";
  EXPECT_NEAR(load_distribution(path).cdf(1.0), 1.0 - std::exp(-1.0), 1e-12);
  std::filesystem::remove(path);
  EXPECT_THROW(load_distribution(path), ConfigError);
}

TEST(JsonIo, WritesLawsAndDecompositions) {
  const auto text = distribution_to_json(laplace01());
  EXPECT_NE(text.find("\"laplace\""), std::string::npos);
  EXPECT_NE(text.find("\"total_mass\""), std::string::npos);
  const auto F = uniform01();
  const auto dec = hahn_jordan(F, shift(F, 0.5));
  const auto d = decomposition_to_json(dec);
  EXPECT_NE(d.find("\"zeta\""), std::string::npos);
  EXPECT_NE(d.find("\"nu_star\""), std::string::npos);
}
