#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "coupled_levy/error.hpp"
#include "coupled_levy/experiment.hpp"
#include "coupled_levy/json_io.hpp"
#include "test_helpers.hpp"

using namespace coupled_levy;
using namespace testing_support;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.distributions = {{"laplace", laplace01()}};
  c.couplings = {CouplingKind::amr, CouplingKind::synchronous};
  c.costs = {ConcaveCost::power(0.5), ConcaveCost::capped(1.0)};
  c.separations = {1.0};
  c.horizons = {0.5, 1.0};
  c.rate = 2.0;
  c.replicas = 2000;
  c.seed = 7;
  return c;
}

std::string slurp(const std::filesystem::path& p) { return read_text_file(p); }

}  // namespace

TEST(Experiment, SynchronousPowerCostIsConstant) {
  auto c = small_config();
  c.couplings = {CouplingKind::synchronous};
  c.costs = {ConcaveCost::power(0.5)};
  for (const auto& row : run_experiment(c)) {
    EXPECT_EQ(row.estimate.mean, 1.0);
    EXPECT_EQ(row.estimate.std_error, 0.0);
  }
}

TEST(Experiment, RowsFollowCellOrder) {
  const auto rows = run_experiment(small_config());
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0].coupling, CouplingKind::amr);
  EXPECT_EQ(rows[0].t, 0.5);
  EXPECT_EQ(rows[1].cost_form, "capped(1)");
  EXPECT_EQ(rows[2].t, 1.0);
  EXPECT_EQ(rows[4].coupling, CouplingKind::synchronous);
  const auto t = results_table(rows);
  EXPECT_EQ(t.header.size(), 9u);
  EXPECT_EQ(t.rows[0][7], "2000");
}

TEST(Experiment, RerunIsByteIdentical) {
  auto c = small_config();
  const auto dir = std::filesystem::temp_directory_path();
  c.output = dir / "coupled_levy_run_a.csv";
  ASSERT_EQ(run(c), 0);
  c.output = dir / "coupled_levy_run_b.csv";
  ASSERT_EQ(run(c), 0);
  EXPECT_EQ(slurp(dir / "coupled_levy_run_a.csv"), slurp(dir / "coupled_levy_run_b.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "coupled_levy_run_a.csv.timing.csv"));
  for (const char* f : {"coupled_levy_run_a.csv", "coupled_levy_run_b.csv",
                        "coupled_levy_run_a.csv.timing.csv", "coupled_levy_run_b.csv.timing.csv"}) {
    std::filesystem::remove(dir / f);
  }
}

TEST(Experiment, ResultsDoNotDependOnWorkerCount) {
  const auto c = small_config();
  const auto text = results_table(run_experiment(c)).to_csv();
  setenv("COUPLED_LEVY_THREADS", "1", 1);
  const auto serial = results_table(run_experiment(c)).to_csv();
  unsetenv("COUPLED_LEVY_THREADS");
  EXPECT_EQ(text, serial);
}

TEST(Experiment, ExitCodes) {
  auto c = small_config();
  c.distributions = {{"exponential", exponential1()}};
  c.couplings = {CouplingKind::reflection};
  c.output = std::filesystem::temp_directory_path() / "coupled_levy_never_written.csv";
  EXPECT_EQ(run(c), 3);
  EXPECT_FALSE(std::filesystem::exists(c.output));
  c = small_config();
  c.format = "xml";
  c.output = std::filesystem::temp_directory_path() / "coupled_levy_bad_format.csv";
  EXPECT_EQ(run(c), 2);
}

TEST(Experiment, ConfigDocument) {
  const auto c = parse_experiment_config(R"({
    "distributions": [{"name": "lap", "law": {"family": "laplace"}},
                      {"family": "uniform", "lo": -1, "hi": 1}],
    "couplings": ["amr", "sync"], "costs": [{"form": "power", "p": 0.5}],
    "separations": [1, 2], "horizons": [1], "rate": 2, "replicas": 10, "seed": 3})");
  ASSERT_EQ(c.distributions.size(), 2u);
  EXPECT_EQ(c.distributions[0].name, "lap");
  EXPECT_EQ(c.distributions[1].name, "uniform");
  EXPECT_EQ(c.couplings[1], CouplingKind::synchronous);
  EXPECT_EQ(c.replicas, 10u);
  EXPECT_EQ(c.seed, 3u);
  for (const char* bad : {
           R"({"couplings": ["amr"]})",
           R"({"distributions": [{"family": "laplace"}], "couplings": ["best"],
               "costs": [{"form": "bounded_exp"}], "separations": [1], "horizons": [1]})",
           R"({"distributions": [{"family": "laplace"}], "couplings": ["amr"],
               "costs": [{"form": "bounded_exp"}], "separations": [0], "horizons": [1]})",
           R"({"distributions": [{"family": "laplace"}], "couplings": ["amr"],
               "costs": [{"form": "bounded_exp"}], "separations": [1], "horizons": [1],
               "replicas": 0})",
           R"({"distributions": ["/nonexistent/law.json"], "couplings": ["amr"],
               "costs": [{"form": "bounded_exp"}], "separations": [1], "horizons": [1]})",
       }) {
    EXPECT_THROW(parse_experiment_config(bad), ConfigError) << bad;
  }
}

TEST(Csv, RoundTripsQuotedFields) {
  Table t;
  t.header = {"name", "value"};
  t.rows = {{"a,b", "1.5"}, {"say \"hi\"", "2"}};
  const auto back = parse_csv(t.to_csv());
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_TRUE(parse_csv("").rows.empty());
  EXPECT_THROW(parse_csv("a,b\n1\n"), ConfigError);
}

TEST(Csv, NumbersRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5, 12345678.9}) {
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(1.0), "1");
}

TEST(PlotData, CostVersusTime) {
  const auto json = emit_plot_data(results_table(run_experiment(small_config())), "cost_vs_t");
  EXPECT_NE(json.find("laplace/amr/power(0.5)/a=1"), std::string::npos);
  EXPECT_NE(json.find("laplace/sync/capped(1)/a=1"), std::string::npos);
}

TEST(PlotData, FAlphaHasOneSeriesPerGamma) {
  std::vector<double> gammas;
  for (int k = 1; k <= 9; ++k) gammas.push_back(k / 10.0);
  const auto table = f_alpha_table(gammas, 50);
  EXPECT_EQ(table.rows.size(), 450u);
  const auto json = emit_plot_data(table, "f_alpha");
  std::size_t series = 0;
  for (auto pos = json.find("\"gamma="); pos != std::string::npos;
       pos = json.find("\"gamma=", pos + 1)) {
    ++series;
  }
  EXPECT_EQ(series, 9u);
}

TEST(PlotData, EmptyAndUnknown) {
  const auto json = emit_plot_data(Table{}, "survival_vs_tv");
  EXPECT_NE(json.find("\"series\": []"), std::string::npos);
  EXPECT_THROW(emit_plot_data(Table{}, "histogram"), ConfigError);
  Table t;
  t.header = {"x"};
  t.rows = {{"1"}};
  EXPECT_THROW(emit_plot_data(t, "survival_vs_tv"), ConfigError);
}
