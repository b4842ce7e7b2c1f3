// Command-line front end: theoretical rate tables, seeded simulation runs,
// paired estimator comparisons, and design-pair diagnostics.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lknn/config.hpp"
#include "lknn/diagnostics.hpp"
#include "lknn/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string format_rate(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

const char* regime_name(lknn::RateRegime regime) {
  return regime == lknn::RateRegime::SourceLimited ? "transfer-limited" : "smoothness-limited";
}

int cmd_rates(double beta, std::size_t dim, double gamma, double rho) {
  using lknn::RateSetting;
  struct Row {
    const char* label;
    RateSetting setting;
  };
  const Row rows[] = {
      {"standard one-sample (source)", RateSetting::StandardOneSample},
      {"standard two-sample (target)", RateSetting::StandardTwoSampleTarget},
      {"local one-sample (source)", RateSetting::LocalOneSample},
      {"local two-sample (target)", RateSetting::LocalTwoSampleTarget},
  };
  std::printf("rate exponents for beta=%g, d=%zu, gamma=%g, rho=%g\n", beta, dim, gamma, rho);
  for (const auto& row : rows) {
    const auto rate = lknn::theoretical_rate(row.setting, beta, dim, gamma, rho);
    std::printf("  %-30s %s  (%s)\n", row.label, format_rate(rate.rate).c_str(),
                regime_name(rate.regime));
  }
  const auto [gap_lo, gap_hi] = lknn::adaptive_gap_interval(beta, dim);
  std::printf("local beats standard for gamma in (%s, %s)\n", format_rate(gap_lo).c_str(),
              format_rate(gap_hi).c_str());
  return kExitOk;
}

void print_summary(const std::string& name, const lknn::RateReport& report) {
  std::printf("%s: fitted slope %.4f +/- %.4f  (theoretical %.4f, %s)\n", name.c_str(),
              report.fitted_slope, report.slope_std_err, report.theoretical,
              regime_name(report.regime));
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 std::optional<std::string> output, std::optional<unsigned> threads,
                 bool timing) {
  lknn::ExperimentConfig config = lknn::load_config(config_path);
  if (seed) config.seed = *seed;
  if (output) config.output = *output;
  if (threads) config.threads = *threads;
  lknn::ExperimentPlan plan = config.make_plan();
  lknn::require_fittable(plan);

  auto [curve, report] = lknn::run_rate_experiment(plan);
  std::ofstream out(config.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + config.output);
  lknn::write_risk_csv(out, curve, config.estimator.schedule_name(), timing);
  print_summary(config.estimator.schedule_name(), report);
  std::printf("wrote %s\n", config.output.c_str());
  return kExitOk;
}

int cmd_compare(const std::string& config_path, std::optional<std::uint64_t> seed,
                std::optional<std::string> output, std::optional<unsigned> threads,
                bool timing) {
  lknn::ExperimentConfig config = lknn::load_config(config_path);
  if (seed) config.seed = *seed;
  if (output) config.output = *output;
  if (threads) config.threads = *threads;

  lknn::ExperimentConfig standard_config = config;
  standard_config.estimator.schedule = lknn::Schedule::Standard;
  lknn::ExperimentConfig local_config = config;
  local_config.estimator.schedule = lknn::Schedule::Local;

  lknn::ExperimentPlan standard_plan = standard_config.make_plan();
  lknn::require_fittable(standard_plan);
  lknn::ExperimentPlan local_plan = local_config.make_plan();

  // Same seed: both runs regenerate identical datasets and test points per
  // cell, so the rows are paired.
  auto [standard_curve, standard_report] = lknn::run_rate_experiment(standard_plan);
  auto [local_curve, local_report] = lknn::run_rate_experiment(local_plan);

  std::ofstream out(config.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + config.output);
  lknn::write_paired_risk_csv(out, standard_curve, "standard", local_curve, "local", timing);
  print_summary("standard", standard_report);
  print_summary("local", local_report);
  std::printf("wrote %s\n", config.output.c_str());
  return kExitOk;
}

lknn::DistributionSpec parse_family_arg(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw CLI::ValidationError("expected family:params, e.g. exponential:1 or uniform:0,1");
  const std::string family = text.substr(0, colon);
  std::vector<double> params;
  std::stringstream ss(text.substr(colon + 1));
  std::string cell;
  while (std::getline(ss, cell, ',')) params.push_back(std::stod(cell));
  if (family == "exponential" && params.size() == 1)
    return lknn::DistributionSpec::exponential(params[0]);
  if (family == "pareto" && params.size() == 1) return lknn::DistributionSpec::pareto(params[0]);
  if (family == "uniform" && params.size() == 2)
    return lknn::DistributionSpec::uniform(params[0], params[1]);
  if (family == "gaussian" && params.size() == 2)
    return lknn::DistributionSpec::gaussian(params[0], params[1]);
  throw CLI::ValidationError("unsupported family spec: " + text);
}

int cmd_check(const std::string& source_text, const std::string& target_text,
              std::optional<double> gamma_arg, std::optional<double> rho_arg) {
  const lknn::DistributionSpec source = parse_family_arg(source_text);
  const lknn::DistributionSpec target = parse_family_arg(target_text);

  double threshold = std::numeric_limits<double>::quiet_NaN();
  try {
    threshold = lknn::dre_threshold(source, target);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  std::printf("design pair: %s -> %s\n", source.describe().c_str(), target.describe().c_str());
  std::printf("density-ratio exponent threshold: %g\n", threshold);

  const double gamma = gamma_arg ? *gamma_arg
                                 : (std::isinf(threshold) ? 1.0 : 0.9 * threshold);
  bool any_violated = false;

  const auto dre = lknn::check_dre_numeric(source, target, gamma);
  std::printf("tail-ratio integral at gamma=%g: %s (%s)\n", gamma,
              lknn::verdict_name(dre.verdict).c_str(), dre.detail.c_str());
  any_violated |= dre.verdict == lknn::Verdict::Violated;

  const double rho = rho_arg ? *rho_arg
                             : (target.family() == lknn::Family::Pareto ? 0.9 * target.alpha()
                                                                        : 4.0);
  const auto pm = lknn::check_pseudo_moment(target, rho);
  std::printf("pseudo-moment integral at rho=%g: %s (%s)\n", rho,
              lknn::verdict_name(pm.verdict).c_str(), pm.detail.c_str());
  any_violated |= pm.verdict == lknn::Verdict::Violated;

  for (const auto* role : {"source", "target"}) {
    const auto& spec = role == std::string("source") ? source : target;
    const auto constants = spec.reference_mass_constants().value_or(
        lknn::MassPropertyConstants{1.0, 1.0, 2.0, 1.0});
    std::vector<double> x_grid, r_grid;
    const double left = std::isinf(spec.support_left()) ? -12.0 : spec.support_left();
    const double right = spec.family() == lknn::Family::Pareto
                             ? 50.0
                             : (spec.family() == lknn::Family::Uniform ? spec.support_right()
                                                                       : 12.0);
    for (int i = 0; i <= 200; ++i) x_grid.push_back(left + (right - left) * i / 200.0);
    for (int i = 1; i <= 20; ++i)
      r_grid.push_back(std::min(constants.r_minus, constants.r_plus) * i / 20.0);
    const auto mass = lknn::check_mass_properties(spec, constants, x_grid, r_grid);
    std::printf("ball-mass comparison (%s, a-=%g r-=%g a+=%g r+=%g): %s (%s)\n", role,
                constants.a_minus, constants.r_minus, constants.a_plus, constants.r_plus,
                lknn::verdict_name(mass.verdict).c_str(), mass.detail.c_str());
    any_violated |= mass.verdict == lknn::Verdict::Violated;
  }

  return any_violated ? kExitRuntime : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local nearest-neighbour regression experiments"};
  app.require_subcommand(1);

  double beta = 1.0, gamma = 1.0, rho = 4.0;
  std::size_t dim = 1;
  auto* rates = app.add_subcommand("rates", "print theoretical rate exponents");
  rates->add_option("--beta", beta, "smoothness exponent")->check(CLI::PositiveNumber);
  rates->add_option("--dim,-d", dim, "covariate dimension")->check(CLI::PositiveNumber);
  rates->add_option("--gamma", gamma, "tail-ratio exponent")->check(CLI::PositiveNumber);
  rates->add_option("--rho", rho, "target moment exponent")->check(CLI::PositiveNumber);

  std::string config_path;
  std::optional<std::uint64_t> seed_arg;
  std::optional<std::string> output_arg;
  std::optional<unsigned> threads_arg;
  bool timing = false;
  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--config,-c", config_path, "experiment config (JSON)")->required();
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { seed_arg = v; }, "override config seed");
    cmd->add_option_function<std::string>(
        "--output,-o", [&](std::string v) { output_arg = std::move(v); }, "override output CSV");
    cmd->add_option_function<unsigned>(
        "--threads", [&](unsigned v) { threads_arg = v; }, "worker threads (0 = auto)");
    cmd->add_flag("--timing", timing,
                  "record wall times in the CSV (off by default so output is reproducible)");
  };
  auto* simulate = app.add_subcommand("simulate", "run one estimator over the n-grid");
  add_run_options(simulate);
  auto* compare =
      app.add_subcommand("compare", "run standard and local schedules on identical data");
  add_run_options(compare);

  std::string source_text, target_text;
  std::optional<double> gamma_arg, rho_arg;
  auto* check = app.add_subcommand("check", "diagnose a source/target design pair");
  check->add_option("--source", source_text, "source family, e.g. exponential:1")->required();
  check->add_option("--target", target_text, "target family, e.g. exponential:2")->required();
  check->add_option_function<double>(
      "--gamma", [&](double v) { gamma_arg = v; }, "tail-ratio exponent to test");
  check->add_option_function<double>(
      "--rho", [&](double v) { rho_arg = v; }, "moment exponent to test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (rates->parsed()) return cmd_rates(beta, dim, gamma, rho);
    if (simulate->parsed())
      return cmd_simulate(config_path, seed_arg, output_arg, threads_arg, timing);
    if (compare->parsed())
      return cmd_compare(config_path, seed_arg, output_arg, threads_arg, timing);
    if (check->parsed()) return cmd_check(source_text, target_text, gamma_arg, rho_arg);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
