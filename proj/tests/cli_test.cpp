#include "portprep/cli.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "portprep/report.hpp"

namespace portprep {
namespace {

TEST(Format, TwelveSignificantDigits) {
  EXPECT_EQ(format_significant(0.875), "0.875");
  EXPECT_EQ(format_significant(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_significant(1.0), "1");
  EXPECT_EQ(format_significant(1e-12), "1e-12");
}

TEST(Report, CsvSchema) {
  Report report;
  ReportRow row;
  row.task = "pbsp";
  row.d = 2;
  row.n = 3;
  row.formula = 0.875;
  row.verdict = "pass";
  row.provenance = "formula";
  report.add(row);
  const std::string csv = report.to_csv();
  EXPECT_EQ(csv,
            "task,d,N,epsilon,formula,dense,sampled,sigma,verdict,"
            "provenance\n"
            "pbsp,2,3,,0.875,,,,pass,formula\n");
}

TEST(Report, JsonMirrorsCsvRows) {
  Report report;
  ReportRow row;
  row.task = "pbsp";
  row.d = 2;
  row.n = 3;
  row.formula = 0.875;
  row.verdict = "pass";
  row.provenance = "formula";
  report.add(row);
  const auto parsed = nlohmann::json::parse(report.to_json());
  ASSERT_TRUE(parsed.is_array());
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0]["task"], "pbsp");
  EXPECT_EQ(parsed[0]["d"], 2);
  EXPECT_EQ(parsed[0]["N"], 3);
  EXPECT_EQ(parsed[0]["formula"], "0.875");
  EXPECT_TRUE(parsed[0]["dense"].is_null());
  EXPECT_TRUE(parsed[0]["epsilon"].is_null());
  EXPECT_EQ(parsed[0]["verdict"], "pass");
}

TEST(Parsing, IntLists) {
  EXPECT_EQ(parse_int_list("4"), (std::vector<int>{4}));
  EXPECT_EQ(parse_int_list("2,3,5"), (std::vector<int>{2, 3, 5}));
  EXPECT_EQ(parse_int_list("1..4"), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_THROW(parse_int_list("abc"), UsageError);
  EXPECT_THROW(parse_int_list("4..1"), UsageError);
  EXPECT_THROW(parse_int_list(""), UsageError);
}

TEST(Parsing, DoubleLists) {
  EXPECT_EQ(parse_double_list("0.5,0.1"), (std::vector<double>{0.5, 0.1}));
  EXPECT_THROW(parse_double_list("x"), UsageError);
}

TEST(Config, FileLoadAndShapes) {
  const std::string path = "/tmp/portprep_config_test.json";
  {
    std::ofstream out(path);
    out << R"({"d": [2], "N": "1..2", "eps": "0.2", "trials": 500,)"
        << R"( "seed": 9, "format": "json"})";
  }
  const RunConfig config = load_config_file(path);
  EXPECT_EQ(config.d_values, (std::vector<int>{2}));
  EXPECT_EQ(config.n_values, (std::vector<int>{1, 2}));
  EXPECT_EQ(config.eps_values, (std::vector<double>{0.2}));
  EXPECT_EQ(config.trials, 500);
  EXPECT_EQ(config.seed, 9u);
  EXPECT_EQ(config.format, "json");
  std::remove(path.c_str());
  EXPECT_THROW(load_config_file("/nonexistent/config.json"), UsageError);
}

TEST(Tables, PbspFormulaColumn) {
  RunConfig config;
  config.d_values = {2};
  config.n_values = {1, 2, 3, 4};
  const Report report = table_report("pbsp", config);
  ASSERT_EQ(report.rows().size(), 4u);
  const std::vector<double> expected = {0.5, 0.75, 0.875, 0.9375};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(*report.rows()[i].formula, expected[i], 1e-12);
    ASSERT_TRUE(report.rows()[i].dense.has_value());
    EXPECT_NEAR(*report.rows()[i].dense, expected[i], 1e-10);
    EXPECT_EQ(report.rows()[i].verdict, "pass");
  }
}

TEST(Tables, PbtFormulaColumn) {
  RunConfig config;
  config.d_values = {2};
  config.n_values = {1, 2, 3, 4};
  const Report report = table_report("pbt", config);
  const std::vector<double> expected = {0.25, 0.4, 0.5, 4.0 / 7.0};
  ASSERT_EQ(report.rows().size(), 4u);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(*report.rows()[i].formula, expected[i], 1e-12);
  }
}

TEST(Tables, UphpPlanColumns) {
  RunConfig config;
  config.d_values = {2};
  config.eps_values = {0.5, 0.1};
  const Report report = table_report("uphp", config);
  ASSERT_EQ(report.rows().size(), 2u);
  EXPECT_EQ(*report.rows()[0].n, 3);
  EXPECT_NEAR(*report.rows()[0].formula, 6.0, 1e-12);
  EXPECT_EQ(*report.rows()[1].n, 10);
  EXPECT_NEAR(*report.rows()[1].formula, 20.0, 1e-12);
}

TEST(Tables, DenseColumnAbsentAboveBudget) {
  RunConfig config;
  config.d_values = {2};
  config.n_values = {15};
  config.dense_budget = Index(1) << 20;
  const Report report = table_report("pbsp", config);
  ASSERT_EQ(report.rows().size(), 1u);
  EXPECT_TRUE(report.rows()[0].formula.has_value());
  EXPECT_FALSE(report.rows()[0].dense.has_value());
  EXPECT_EQ(report.rows()[0].provenance, "formula");
  const std::string csv = report.to_csv();
  EXPECT_NE(csv.find("pbsp,2,15,,0.999969482422,,,"), std::string::npos);
}

TEST(Tables, UnknownTableThrows) {
  EXPECT_THROW(table_report("bogus", RunConfig{}), UsageError);
}

TEST(Tables, DegenerateRowsAreFlagged) {
  RunConfig config;
  config.d_values = {1, 2};
  config.n_values = {0, 1};
  const Report report = table_report("pbsp", config);
  ASSERT_EQ(report.rows().size(), 4u);
  EXPECT_EQ(report.rows()[0].verdict, "degenerate");  // d=1, N=0
  EXPECT_EQ(report.rows()[1].verdict, "degenerate");  // d=1, N=1
  EXPECT_EQ(report.rows()[2].verdict, "degenerate");  // d=2, N=0
  EXPECT_NEAR(*report.rows()[2].formula, 0.0, 1e-15);
  EXPECT_EQ(report.rows()[3].verdict, "pass");  // d=2, N=1
}

TEST(Verify, DefaultGridPasses) {
  RunConfig config;  // d in {2,3}, N in {1,2,3}, seed 42
  const Report report = verify_report(config);
  EXPECT_FALSE(report.empty());
  for (const auto& row : report.rows()) {
    EXPECT_NE(row.verdict, "fail")
        << row.task << " d=" << (row.d ? *row.d : -1)
        << " N=" << (row.n ? *row.n : -1);
  }
  EXPECT_TRUE(report.all_passed());
}

TEST(Verify, InjectedDefectFailsCompleteness) {
  RunConfig config;
  config.d_values = {2};
  config.n_values = {2};
  config.inject_povm_defect = true;
  const Report report = verify_report(config);
  EXPECT_FALSE(report.all_passed());
  bool completeness_failed = false;
  for (const auto& row : report.rows()) {
    if (row.task == "verify-povm-completeness" && row.verdict == "fail") {
      completeness_failed = true;
    }
  }
  EXPECT_TRUE(completeness_failed);
}

TEST(Verify, ByteIdenticalReports) {
  RunConfig config;
  config.d_values = {2};
  config.n_values = {1, 2};
  const std::string first = verify_report(config).to_csv();
  const std::string second = verify_report(config).to_csv();
  EXPECT_EQ(first, second);
  const std::string json_first = verify_report(config).to_json();
  const std::string json_second = verify_report(config).to_json();
  EXPECT_EQ(json_first, json_second);
}

TEST(Sample, WithinThreeSigma) {
  RunConfig config;
  config.d_values = {2};
  config.n_values = {3};
  config.trials = 100000;
  config.seed = 7;
  const Report report = sample_report(config);
  ASSERT_EQ(report.rows().size(), 1u);
  const ReportRow& row = report.rows()[0];
  EXPECT_NEAR(*row.formula, 0.875, 1e-12);
  EXPECT_NEAR(*row.sigma, std::sqrt(0.875 * 0.125 / 100000.0), 1e-12);
  EXPECT_EQ(row.verdict, "pass");
  EXPECT_LE(std::abs(*row.sampled - 0.875), 3.0 * *row.sigma);
}

TEST(Sample, SeedChangesEstimateNotSchema) {
  RunConfig config;
  config.d_values = {2};
  config.n_values = {3};
  config.trials = 2000;
  config.seed = 1;
  const Report first = sample_report(config);
  config.seed = 2;
  const Report second = sample_report(config);
  EXPECT_NE(*first.rows()[0].sampled, *second.rows()[0].sampled);
  config.seed = 1;
  const Report repeat = sample_report(config);
  EXPECT_DOUBLE_EQ(*first.rows()[0].sampled, *repeat.rows()[0].sampled);
}

TEST(Sample, TinyTrialCountWidensInterval) {
  RunConfig config;
  config.d_values = {2};
  config.n_values = {3};
  config.trials = 10;
  const Report report = sample_report(config);
  ASSERT_EQ(report.rows().size(), 1u);
  EXPECT_GE(*report.rows()[0].sigma, 0.1);  // 3 sigma spans ~0.31
}

TEST(Sample, DifferentSeedsSameVerdictAtFullTrials) {
  RunConfig config;
  config.d_values = {2};
  config.n_values = {3};
  config.trials = 100000;
  config.seed = 7;
  const Report first = sample_report(config);
  config.seed = 8;
  const Report second = sample_report(config);
  EXPECT_NE(*first.rows()[0].sampled, *second.rows()[0].sampled);
  EXPECT_EQ(first.rows()[0].verdict, "pass");
  EXPECT_EQ(second.rows()[0].verdict, "pass");
}

TEST(QracDemo, SimulatedGuessMatchesFormula) {
  RunConfig config;
  config.d_values = {4};
  config.eps_values = {0.2};
  const Report report = qrac_demo_report(config);
  ASSERT_EQ(report.rows().size(), 1u);
  const ReportRow& row = report.rows()[0];
  EXPECT_EQ(row.verdict, "pass");
  ASSERT_TRUE(row.dense.has_value());
  EXPECT_NEAR(*row.dense, *row.formula, 1e-10);
  EXPECT_GE(*row.dense, 0.6);
}

#ifdef PORTPREP_CLI_PATH
int run_cli(const std::string& args) {
  const std::string command =
      std::string(PORTPREP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliBinary, ExitCodes) {
  EXPECT_EQ(run_cli("table pbsp --d 2 --N 1..3"), 0);
  EXPECT_EQ(run_cli("verify --d 2 --N 1..2"), 0);
  EXPECT_EQ(run_cli("verify --d 2 --N 2 --inject-povm-defect"), 1);
  EXPECT_EQ(run_cli("table bogus"), 2);
  EXPECT_EQ(run_cli("--not-a-flag"), 2);
  EXPECT_EQ(run_cli("table pbsp --d 2 --N 1while"), 2);
  EXPECT_EQ(run_cli("uphp plan --d 2 --eps 0.5"), 0);
  EXPECT_EQ(run_cli("qrac demo --d 4 --eps 0.2"), 0);
}

TEST(CliBinary, CapacityExitCode) {
  // The verify pullback check needs a 16-dimensional dense memory and has
  // no structured fallback, so an 8-dimensional budget is a capacity error.
  EXPECT_EQ(run_cli("verify --d 2 --N 1 --dense-budget 8"), 3);
  EXPECT_EQ(run_cli("sample --d 2 --N 3 --trials 50"), 0);
}

TEST(CliBinary, ConfigFileWithFlagOverride) {
  const std::string config_path = "/tmp/portprep_cli_config.json";
  const std::string out_path = "/tmp/portprep_cli_config_out.csv";
  {
    std::ofstream out(config_path);
    out << R"({"d": [2], "N": [1, 2], "seed": 3})";
  }
  ASSERT_EQ(run_cli("table pbsp --config " + config_path + " --N 3 --out " +
                    out_path),
            0);
  std::ifstream in(out_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  // --N overrides the config file list; d comes from the file.
  EXPECT_NE(buffer.str().find("pbsp,2,3,,0.875"), std::string::npos);
  EXPECT_EQ(buffer.str().find("pbsp,2,1,"), std::string::npos);
  std::remove(config_path.c_str());
  std::remove(out_path.c_str());
}

TEST(CliBinary, ByteIdenticalFileOutput) {
  const std::string path_a = "/tmp/portprep_out_a.csv";
  const std::string path_b = "/tmp/portprep_out_b.csv";
  ASSERT_EQ(run_cli("table pbsp --d 2,3 --N 1..3 --seed 11 --out " + path_a),
            0);
  ASSERT_EQ(run_cli("table pbsp --d 2,3 --N 1..3 --seed 11 --out " + path_b),
            0);
  std::ifstream a(path_a), b(path_b);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_FALSE(sa.str().empty());
  EXPECT_EQ(sa.str(), sb.str());
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}
#endif

}  // namespace
}  // namespace portprep
