#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "portprep/bounds.hpp"
#include "portprep/pbsp.hpp"
#include "portprep/pbt.hpp"
#include "portprep/report.hpp"
#include "portprep/uphp.hpp"

namespace portprep {

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
  std::vector<int> d_values = {2, 3};
  std::vector<int> n_values = {1, 2, 3};
  std::vector<double> eps_values = {0.5, 0.1};
  std::int64_t trials = 100000;
  std::uint64_t seed = 42;
  Index dense_budget = kDefaultDenseBudget;
  std::string format = "csv";  // csv | json
  std::string out_path;        // empty: stdout
  bool inject_povm_defect = false;
};

// ---------------------------------------------------------------------------
// Grid parsing: "4" | "2,3,4" | "1..4"

namespace detail {

inline int parse_full_int(const std::string& text) {
  std::size_t consumed = 0;
  int value = 0;
  try {
    value = std::stoi(text, &consumed);
  } catch (const std::invalid_argument&) {
    throw UsageError("cannot parse integer '" + text + "'");
  } catch (const std::out_of_range&) {
    throw UsageError("integer out of range: '" + text + "'");
  }
  if (consumed != text.size()) {
    throw UsageError("trailing characters in integer '" + text + "'");
  }
  return value;
}

inline double parse_full_double(const std::string& text) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::invalid_argument&) {
    throw UsageError("cannot parse number '" + text + "'");
  } catch (const std::out_of_range&) {
    throw UsageError("number out of range: '" + text + "'");
  }
  if (consumed != text.size()) {
    throw UsageError("trailing characters in number '" + text + "'");
  }
  return value;
}

}  // namespace detail

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  const auto range_pos = text.find("..");
  if (range_pos != std::string::npos) {
    const int lo = detail::parse_full_int(text.substr(0, range_pos));
    const int hi = detail::parse_full_int(text.substr(range_pos + 2));
    if (hi < lo) {
      throw UsageError("empty range '" + text + "'");
    }
    for (int v = lo; v <= hi; ++v) {
      values.push_back(v);
    }
    return values;
  }
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) {
      values.push_back(detail::parse_full_int(item));
    }
  }
  if (values.empty()) {
    throw UsageError("empty list '" + text + "'");
  }
  return values;
}

inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) {
      values.push_back(detail::parse_full_double(item));
    }
  }
  if (values.empty()) {
    throw UsageError("empty list '" + text + "'");
  }
  return values;
}

/// Loads defaults from a JSON file mirroring the flags; values given on the
/// command line override the file afterwards. List-valued keys accept either
/// arrays or the flag string syntax.
inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open config file '" + path + "'");
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  RunConfig config;
  auto int_list = [&](const char* key, std::vector<int>& out) {
    if (!doc.contains(key)) {
      return;
    }
    if (doc[key].is_string()) {
      out = parse_int_list(doc[key].get<std::string>());
    } else {
      out = doc[key].get<std::vector<int>>();
    }
  };
  int_list("d", config.d_values);
  int_list("N", config.n_values);
  if (doc.contains("eps")) {
    if (doc["eps"].is_string()) {
      config.eps_values = parse_double_list(doc["eps"].get<std::string>());
    } else {
      config.eps_values = doc["eps"].get<std::vector<double>>();
    }
  }
  if (doc.contains("trials")) {
    config.trials = doc["trials"].get<std::int64_t>();
  }
  if (doc.contains("seed")) {
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("dense-budget")) {
    config.dense_budget = doc["dense-budget"].get<Index>();
  }
  if (doc.contains("format")) {
    config.format = doc["format"].get<std::string>();
  }
  if (doc.contains("out")) {
    config.out_path = doc["out"].get<std::string>();
  }
  return config;
}

// ---------------------------------------------------------------------------
// Report builders

namespace detail {

inline bool within_dense_budget(int d, int exponent, Index budget) {
  try {
    checked_dense_dim(d, exponent, budget);
    return true;
  } catch (const CapacityError&) {
    return false;
  }
}

inline std::string pass_fail(bool ok) { return ok ? "pass" : "fail"; }

/// Stable per-row substream so reports do not depend on evaluation order.
inline SeededRng row_rng(const RunConfig& config, int d, int n) {
  return SeededRng(config.seed).split(
      static_cast<std::uint64_t>(d) * 1000003ull +
      static_cast<std::uint64_t>(n));
}

}  // namespace detail

inline Report table_pbsp(const RunConfig& config) {
  Report report;
  for (const int d : config.d_values) {
    for (const int n : config.n_values) {
      ReportRow row;
      row.task = "pbsp";
      row.d = d;
      row.n = n;
      row.formula = success_probability_formula(d, n);
      row.provenance = "formula";
      if (d == 1 || n == 0) {
        row.verdict = "degenerate";
        report.add(std::move(row));
        continue;
      }
      if (detail::within_dense_budget(d, 2 * n, config.dense_budget)) {
        SeededRng rng = detail::row_rng(config, d, n);
        const StateVector psi = haar_state(d, rng);
        const ChannelResult dense =
            run_probabilistic(psi, {d, n}, config.dense_budget);
        row.dense = dense.success_probability;
        row.provenance = "dense";
        row.verdict = detail::pass_fail(
            std::abs(*row.dense - *row.formula) <= kBoundTolerance);
      }
      report.add(std::move(row));
    }
  }
  return report;
}

inline Report table_pbt(const RunConfig& config) {
  Report report;
  for (const int d : config.d_values) {
    for (const int n : config.n_values) {
      if (d < 2 || n < 1) {
        ReportRow row;
        row.task = "pbt";
        row.d = d;
        row.n = n;
        row.verdict = "degenerate";
        row.provenance = "formula";
        report.add(std::move(row));
        continue;
      }
      ReportRow row;
      row.task = "pbt";
      row.d = d;
      row.n = n;
      row.formula = prob_pbt_formula(d, n);
      row.provenance = "formula";
      if (detail::within_dense_budget(d, 2 * n + 2, config.dense_budget)) {
        row.dense = pbt_entanglement_fidelity({d, n}, config.dense_budget);
        row.provenance = "dense";
        const double bound = pbt_standard_fidelity_bound(d, n);
        const bool bound_ok =
            bound <= 0.0 || *row.dense >= bound - 1e-9;
        row.verdict = detail::pass_fail(bound_ok);
      }
      report.add(std::move(row));
    }
  }
  return report;
}

inline Report table_uphp(const RunConfig& config) {
  Report report;
  for (const int d : config.d_values) {
    for (const double eps : config.eps_values) {
      ReportRow row;
      row.task = "uphp";
      row.d = d;
      row.epsilon = eps;
      row.provenance = "formula";
      if (d < 2 || !(eps > 0.0) || eps >= 1.0) {
        row.verdict = "degenerate";
        report.add(std::move(row));
        continue;
      }
      const MemoryPlan plan = plan_memory(d, eps);
      row.n = plan.num_ports;
      row.formula = plan.log2_memory;
      row.verdict = detail::pass_fail(
          plan.log2_memory <=
          plan.log2_bound + plan.log2_slack + kBoundTolerance);
      report.add(std::move(row));
    }
  }
  return report;
}

inline Report table_qrac(const RunConfig& config) {
  Report report;
  for (const int d : config.d_values) {
    const bool power_of_two = d >= 4 && (d & (d - 1)) == 0;
    for (const double eps : config.eps_values) {
      ReportRow row;
      row.task = "qrac";
      row.d = d;
      row.epsilon = eps;
      row.provenance = "formula";
      if (!power_of_two || !(eps > 0.0) || eps >= 0.25) {
        row.verdict = "degenerate";
        report.add(std::move(row));
        continue;
      }
      int k = 0;
      while ((1 << (k + 1)) < d) {
        ++k;
      }
      const std::vector<int> truth_table(std::size_t(1) << k, 0);
      const QracInstance instance = build_qrac(truth_table, k, eps);
      row.n = instance.num_ports;
      row.formula = instance.min_guess_probability();
      const bool success_ok =
          instance.min_guess_probability() >=
          instance.success_threshold() - kBoundTolerance;
      const bool nayak_ok =
          instance.log2_memory >=
          uphp_lower_bound_log2(instance.d, eps) - kBoundTolerance;
      row.verdict = detail::pass_fail(success_ok && nayak_ok);
      report.add(std::move(row));
    }
  }
  return report;
}

inline Report table_report(const std::string& which, const RunConfig& config) {
  if (which == "pbsp") {
    return table_pbsp(config);
  }
  if (which == "pbt") {
    return table_pbt(config);
  }
  if (which == "uphp") {
    return table_uphp(config);
  }
  if (which == "qrac") {
    return table_qrac(config);
  }
  throw UsageError("unknown table '" + which +
                   "' (expected pbsp, pbt, uphp, or qrac)");
}

// ---------------------------------------------------------------------------
// Verification suite

namespace detail {

inline void add_check(Report& report, const std::string& task, int d, int n,
                      double measured, bool ok,
                      std::optional<double> reference = std::nullopt) {
  ReportRow row;
  row.task = task;
  row.d = d;
  row.n = n;
  row.formula = reference;
  row.dense = measured;
  row.verdict = pass_fail(ok);
  row.provenance = "dense";
  report.add(std::move(row));
}

}  // namespace detail

/// Runs every invariant suite on the configured grid. Exit status of the
/// verify command is zero iff every row passes.
inline Report verify_report(const RunConfig& config) {
  Report report;
  for (const int d : config.d_values) {
    for (const int n : config.n_values) {
      if (d < 2 || n < 1) {
        continue;
      }
      SeededRng rng = detail::row_rng(config, d, n);
      const StateVector psi = haar_state(d, rng);

      if (!detail::within_dense_budget(d, 2 * n, config.dense_budget)) {
        // Structured fallback: formula-only row, dense checks skipped.
        ReportRow row;
        row.task = "verify-structured-only";
        row.d = d;
        row.n = n;
        row.formula = success_probability_formula(d, n);
        row.verdict = "pass";
        row.provenance = "formula";
        report.add(std::move(row));
        continue;
      }

      // POVM completeness and positivity.
      {
        Povm prob = prob_povm(psi, n, config.dense_budget);
        Povm det = det_povm(psi, n, config.dense_budget);
        if (config.inject_povm_defect) {
          prob.scale_element(prob.size() - 1, 1.0 + 1e-3);
        }
        const double residual = std::max(prob.completeness_residual(),
                                         det.completeness_residual());
        const double min_eig =
            std::min(prob.min_eigenvalue(), det.min_eigenvalue());
        detail::add_check(report, "verify-povm-completeness", d, n, residual,
                          residual <= tol::kCompleteness && min_eig >= -1e-9,
                          0.0);
      }

      // Dense channel evaluation against the closed forms.
      const ChannelResult dense_prob =
          run_probabilistic(psi, {d, n}, config.dense_budget);
      const ChannelResult dense_det =
          run_deterministic(psi, {d, n}, config.dense_budget);
      const double formula = success_probability_formula(d, n);
      detail::add_check(
          report, "verify-dense-vs-formula-prob", d, n,
          dense_prob.success_probability,
          std::abs(dense_prob.success_probability - formula) <=
              kBoundTolerance,
          formula);
      detail::add_check(
          report, "verify-dense-vs-formula-det", d, n,
          dense_det.worst_case_fidelity_estimate,
          std::abs(dense_det.worst_case_fidelity_estimate - formula) <=
              kBoundTolerance,
          formula);

      // Structured fast path must match the dense evaluation.
      {
        const ChannelResult structured =
            structured_run(psi, {d, n}, PbspVariant::kProbabilistic);
        double diff = std::abs(structured.success_probability -
                               dense_prob.success_probability);
        for (std::size_t i = 0; i < structured.outcomes.size(); ++i) {
          diff = std::max(diff,
                          std::abs(structured.outcomes[i].probability -
                                   dense_prob.outcomes[i].probability));
        }
        detail::add_check(report, "verify-dense-vs-structured", d, n, diff,
                          diff <= kBoundTolerance, 0.0);
      }

      // Non-signaling certificates.
      {
        const auto prob_cert =
            nonsignaling_prob_certificate(psi, d, n, config.dense_budget);
        detail::add_check(
            report, "verify-nonsignaling-prob", d, n,
            std::abs(prob_cert.p_before - prob_cert.p_after),
            prob_cert.agrees && prob_cert.decomposition_ok &&
                prob_cert.dominates,
            0.0);
        const auto fid_cert =
            nonsignaling_fid_certificate(psi, d, n, config.dense_budget);
        detail::add_check(
            report, "verify-nonsignaling-fid", d, n,
            std::abs(fid_cert.residual_direct - fid_cert.residual_sum),
            fid_cert.agrees && fid_cert.saturates &&
                fid_cert.marginal_residual <= kBoundTolerance,
            0.0);
      }

      // Achievability bound for the constructed protocol.
      {
        const BoundVerdict verdict =
            pbsp_fidelity_bound_check(d, n, formula);
        detail::add_check(report, "verify-fidelity-bound", d, n, verdict.lhs,
                          verdict.satisfied, verdict.rhs);
      }

      // The preparation protocol must beat the teleportation baseline.
      {
        const double pbt = prob_pbt_formula(d, n);
        detail::add_check(report, "verify-pbt-separation", d, n, pbt,
                          formula > pbt, formula);
      }
    }

    // Fidelity / trace-distance sandwich on random pairs, per dimension.
    if (d >= 2) {
      SeededRng rng = detail::row_rng(config, d, 0);
      double worst = 0.0;
      for (int trial = 0; trial < 20; ++trial) {
        const DensityOperator rho = random_density(d, rng);
        const DensityOperator sigma = random_density(d, rng);
        const double fid = fidelity(rho, sigma);
        const double dist = trace_distance(rho, sigma);
        worst = std::max(worst, (1.0 - std::sqrt(fid)) - dist);
        worst = std::max(worst, dist - std::sqrt(1.0 - fid));
      }
      detail::add_check(report, "verify-fvdg", d, 0, worst, worst <= 1e-9,
                        0.0);
    }
  }

  // Random access code suite (k = 1).
  for (const double eps : config.eps_values) {
    if (!(eps > 0.0) || eps >= 0.25) {
      continue;
    }
    SeededRng rng = SeededRng(config.seed).split(777);
    std::vector<int> truth_table(2);
    for (auto& bit : truth_table) {
      bit = rng.next_bernoulli(0.5) ? 1 : 0;
    }
    const QracInstance instance = build_qrac(truth_table, 1, eps);
    ReportRow row;
    row.task = "verify-qrac";
    row.d = instance.d;
    row.n = instance.num_ports;
    row.epsilon = eps;
    row.formula = instance.success_threshold();
    row.dense = instance.min_guess_probability();
    const bool nayak_ok =
        instance.log2_memory >=
        uphp_lower_bound_log2(instance.d, eps) - kBoundTolerance;
    row.verdict = detail::pass_fail(
        instance.min_guess_probability() >= instance.success_threshold() &&
        nayak_ok);
    row.provenance = "dense";
    report.add(std::move(row));
  }

  // Kraus pullback identity on the smallest dense instance. This check has
  // no structured fallback: a budget below the 16-dimensional memory is a
  // capacity error, not a silent skip.
  {
    SeededRng rng = SeededRng(config.seed).split(778);
    const HybridProcessor proc =
        make_processor(boolean_unitary({0, 1}, 1), 1);
    double worst = 0.0;
    for (int x = 0; x < 2; ++x) {
      const Povm povm = qrac_measurement_povm(proc, x, config.dense_budget);
      for (int trial = 0; trial < 5; ++trial) {
        const DensityOperator memory = random_density(
            static_cast<int>(povm.layout().total_dim()), rng);
        const Matrix channel_output = dense_processor_channel(
            proc, x, memory.matrix(), config.dense_budget);
        for (int y = 0; y < 2; ++y) {
          const double via_povm =
              (povm.element(static_cast<std::size_t>(y)).matrix() *
               memory.matrix())
                  .trace()
                  .real();
          double via_channel = 0.0;
          for (Index i = 0; i < proc.d; ++i) {
            if ((i & 1) == y) {
              via_channel += channel_output(i, i).real();
            }
          }
          worst = std::max(worst, std::abs(via_povm - via_channel));
        }
      }
    }
    ReportRow row;
    row.task = "verify-qrac-pullback";
    row.d = proc.d;
    row.n = proc.num_ports;
    row.formula = 0.0;
    row.dense = worst;
    row.verdict = detail::pass_fail(worst <= kBoundTolerance);
    row.provenance = "dense";
    report.add(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Monte Carlo front-end

inline Report sample_report(const RunConfig& config) {
  if (config.trials < 1) {
    throw UsageError("trials must be at least 1");
  }
  Report report;
  for (const int d : config.d_values) {
    for (const int n : config.n_values) {
      ReportRow row;
      row.task = "sample";
      row.d = d;
      row.n = n;
      row.formula = success_probability_formula(d, n);
      row.provenance = "sampled";
      if (d < 2 || n < 1) {
        row.verdict = "degenerate";
        report.add(std::move(row));
        continue;
      }
      SeededRng rng = detail::row_rng(config, d, n);
      const StateVector psi = haar_state(d, rng);
      const ChannelResult empirical =
          sample_outcomes(psi, {d, n}, config.trials, rng);
      row.sampled = empirical.success_probability;
      row.sigma = std::sqrt(*row.formula * (1.0 - *row.formula) /
                            double(config.trials));
      row.verdict = detail::pass_fail(
          std::abs(*row.sampled - *row.formula) <= 3.0 * *row.sigma);
      report.add(std::move(row));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Processor planning and random access code demo

inline Report uphp_plan_report(const RunConfig& config) {
  return table_uphp(config);
}

inline Report qrac_demo_report(const RunConfig& config) {
  Report report;
  for (const int d : config.d_values) {
    const bool power_of_two = d >= 4 && (d & (d - 1)) == 0;
    for (const double eps : config.eps_values) {
      ReportRow row;
      row.task = "qrac-demo";
      row.d = d;
      row.epsilon = eps;
      row.provenance = "dense";
      if (!power_of_two || !(eps > 0.0) || eps >= 0.25) {
        row.verdict = "degenerate";
        row.provenance = "formula";
        report.add(std::move(row));
        continue;
      }
      int k = 0;
      while ((1 << (k + 1)) < d) {
        ++k;
      }
      SeededRng rng = detail::row_rng(config, d, static_cast<int>(eps * 1e6));
      std::vector<int> truth_table(std::size_t(1) << k);
      for (auto& bit : truth_table) {
        bit = rng.next_bernoulli(0.5) ? 1 : 0;
      }
      const QracInstance instance = build_qrac(truth_table, k, eps);
      const HybridProcessor proc = instance.processor();

      double min_guess = 1.0;
      for (int x = 0; x < (1 << k); ++x) {
        const DensityOperator output =
            apply_processor(qrac_input(instance.d, x), proc);
        double guess = 0.0;
        for (Index i = 0; i < instance.d; ++i) {
          if ((i & 1) == truth_table[static_cast<std::size_t>(x)]) {
            guess += output.matrix()(i, i).real();
          }
        }
        min_guess = std::min(min_guess, guess);
      }
      row.n = instance.num_ports;
      row.formula = instance.min_guess_probability();
      row.dense = min_guess;
      row.verdict = detail::pass_fail(
          min_guess >= instance.success_threshold() &&
          std::abs(min_guess - *row.formula) <= kBoundTolerance);
      report.add(std::move(row));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

inline void write_report(const Report& report, const RunConfig& config,
                         std::ostream& out) {
  const std::string text =
      config.format == "json" ? report.to_json() : report.to_csv();
  if (config.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(config.out_path, std::ios::binary);
  if (!file) {
    throw UsageError("cannot open output file '" + config.out_path + "'");
  }
  file << text;
}

}  // namespace portprep
