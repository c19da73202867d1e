#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "portprep/cli.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;

struct FlagValues {
  std::string d_text;
  std::string n_text;
  std::string eps_text;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::int64_t dense_budget = 0;
  std::string format;
  std::string out_path;
  std::string config_path;
};

void add_common_flags(CLI::App& app, FlagValues& flags) {
  app.add_option("--d", flags.d_text,
                 "qudit dimensions: single value, list, or a..b range");
  app.add_option("--N", flags.n_text,
                 "port counts: single value, list, or a..b range");
  app.add_option("--eps", flags.eps_text, "error targets, comma separated");
  app.add_option("--trials", flags.trials, "Monte Carlo trials");
  app.add_option("--seed", flags.seed, "root seed for all sampling");
  app.add_option("--dense-budget", flags.dense_budget,
                 "largest total dimension evaluated densely");
  app.add_option("--format", flags.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", flags.out_path, "write the report to this path");
  app.add_option("--config", flags.config_path,
                 "JSON file mirroring the flags; flags override it");
}

portprep::RunConfig build_config(const CLI::App& app, const FlagValues& flags) {
  portprep::RunConfig config;
  if (app.count("--config") > 0) {
    config = portprep::load_config_file(flags.config_path);
  }
  if (app.count("--d") > 0) {
    config.d_values = portprep::parse_int_list(flags.d_text);
  }
  if (app.count("--N") > 0) {
    config.n_values = portprep::parse_int_list(flags.n_text);
  }
  if (app.count("--eps") > 0) {
    config.eps_values = portprep::parse_double_list(flags.eps_text);
  }
  if (app.count("--trials") > 0) {
    config.trials = flags.trials;
  }
  if (app.count("--seed") > 0) {
    config.seed = flags.seed;
  }
  if (app.count("--dense-budget") > 0) {
    config.dense_budget = flags.dense_budget;
  }
  if (app.count("--format") > 0) {
    config.format = flags.format;
  }
  if (app.count("--out") > 0) {
    config.out_path = flags.out_path;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and verification harness for port-based state "
               "preparation, the derived hybrid processor, and their "
               "optimality certificates"};
  app.fallthrough();
  app.require_subcommand(1);

  FlagValues flags;
  add_common_flags(app, flags);

  std::string table_which;
  CLI::App* table = app.add_subcommand(
      "table", "closed-form / dense / sampled comparison tables");
  table->add_option("which", table_which, "pbsp | pbt | uphp | qrac")
      ->required()
      ->check(CLI::IsMember({"pbsp", "pbt", "uphp", "qrac"}));

  bool inject_defect = false;
  CLI::App* verify = app.add_subcommand(
      "verify", "run every invariant suite; exit 1 on any failed verdict");
  verify->add_flag("--inject-povm-defect", inject_defect,
                   "test hook: perturb one POVM element so the completeness "
                   "check must fail");

  CLI::App* sample =
      app.add_subcommand("sample", "Monte Carlo sampling of the protocol");

  CLI::App* uphp = app.add_subcommand("uphp", "hybrid processor commands");
  uphp->require_subcommand(1);
  CLI::App* uphp_plan = uphp->add_subcommand(
      "plan", "memory sizing for target error epsilon");

  CLI::App* qrac = app.add_subcommand("qrac", "random access code commands");
  qrac->require_subcommand(1);
  CLI::App* qrac_demo = qrac->add_subcommand(
      "demo", "build a code from a random Boolean function and measure it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    portprep::RunConfig config = build_config(app, flags);
    config.inject_povm_defect = inject_defect;

    portprep::Report report;
    bool is_verify = false;
    if (table->parsed()) {
      report = portprep::table_report(table_which, config);
    } else if (verify->parsed()) {
      report = portprep::verify_report(config);
      is_verify = true;
    } else if (sample->parsed()) {
      report = portprep::sample_report(config);
    } else if (uphp->parsed() && uphp_plan->parsed()) {
      report = portprep::uphp_plan_report(config);
    } else if (qrac->parsed() && qrac_demo->parsed()) {
      report = portprep::qrac_demo_report(config);
    }

    portprep::write_report(report, config, std::cout);
    if (is_verify && !report.all_passed()) {
      for (const auto& row : report.rows()) {
        if (row.verdict == "fail") {
          std::cerr << "failed: " << row.task << " d="
                    << (row.d ? std::to_string(*row.d) : "-") << " N="
                    << (row.n ? std::to_string(*row.n) : "-") << "\n";
        }
      }
      return kExitVerifyFailed;
    }
    return kExitOk;
  } catch (const portprep::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const portprep::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailed;
  }
}
