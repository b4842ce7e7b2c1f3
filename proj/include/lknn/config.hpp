#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lknn/experiment.hpp"
#include "lknn/risk.hpp"

namespace lknn {

using json = nlohmann::json;

inline DistributionSpec distribution_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "uniform")
    return DistributionSpec::uniform(j.at("a").get<double>(), j.at("b").get<double>(),
                                     j.value("dim", std::size_t{1}));
  if (family == "exponential") return DistributionSpec::exponential(j.at("lambda").get<double>());
  if (family == "pareto") return DistributionSpec::pareto(j.at("alpha").get<double>());
  if (family == "gaussian")
    return DistributionSpec::gaussian(j.at("mu").get<double>(), j.at("sigma").get<double>());
  throw std::invalid_argument("unknown family: " + family);
}

inline json distribution_to_json(const DistributionSpec& spec) {
  json j;
  j["family"] = family_name(spec.family());
  switch (spec.family()) {
    case Family::Uniform:
      j["a"] = spec.uniform_a();
      j["b"] = spec.uniform_b();
      j["dim"] = spec.dim();
      break;
    case Family::Exponential:
      j["lambda"] = spec.lambda();
      break;
    case Family::Pareto:
      j["alpha"] = spec.alpha();
      break;
    case Family::Gaussian:
      j["mu"] = spec.mu();
      j["sigma"] = spec.sigma();
      break;
  }
  return j;
}

inline TargetFunction function_from_json(const json& j) {
  const std::string name = j.at("name").get<std::string>();
  if (name == "sine")
    return TargetFunction::sine(j.at("amplitude").get<double>(), j.at("frequency").get<double>());
  if (name == "cusp")
    return TargetFunction::cusp(j.at("bound").get<double>(), j.at("l").get<double>(),
                                j.at("beta").get<double>(), j.at("center").get<double>());
  throw std::invalid_argument("unknown target function: " + name);
}

inline json function_to_json(const TargetFunction& f) {
  json j;
  j["name"] = f.name();
  if (f.name() == "sine") {
    j["amplitude"] = f.param1();
    j["frequency"] = f.param2();
  } else {
    j["bound"] = f.bound();
    j["l"] = f.param1();
    j["beta"] = f.beta();
    j["center"] = f.param2();
  }
  return j;
}

inline NoiseSpec noise_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  NoiseSpec noise;
  if (kind == "gaussian") {
    noise.kind = NoiseKind::Gaussian;
    noise.scale = j.at("sigma").get<double>();
  } else if (kind == "laplace") {
    noise.kind = NoiseKind::Laplace;
    noise.scale = j.at("b").get<double>();
  } else {
    throw std::invalid_argument("unknown noise kind: " + kind);
  }
  if (!(noise.scale >= 0.0)) throw std::invalid_argument("noise scale must be >= 0");
  return noise;
}

inline json noise_to_json(const NoiseSpec& noise) {
  json j;
  if (noise.kind == NoiseKind::Gaussian) {
    j["kind"] = "gaussian";
    j["sigma"] = noise.scale;
  } else {
    j["kind"] = "laplace";
    j["b"] = noise.scale;
  }
  return j;
}

// Everything cmd_simulate / cmd_compare need: task, estimator, grids, seed,
// output path. Parse and serialize are exact inverses.
struct ExperimentConfig {
  DistributionSpec source = DistributionSpec::uniform(0.0, 1.0);
  DistributionSpec target = DistributionSpec::uniform(0.0, 1.0);
  TargetFunction function = TargetFunction::sine(1.0, 6.283185307179586);
  NoiseSpec noise;
  EstimatorConfig estimator;
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> m_grid;
  std::size_t replicates = 1;
  std::size_t test_count = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output = "risk.csv";

  RegressionTask make_task() const { return RegressionTask(function, noise, source, target); }

  ExperimentPlan make_plan() const {
    return ExperimentPlan{make_task(), estimator, n_grid,     m_grid,
                          replicates,  test_count, seed,      threads};
  }
};

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig config;
  const json& task = j.at("task");
  config.source = distribution_from_json(task.at("source"));
  config.target = distribution_from_json(task.at("target"));
  config.function = function_from_json(task.at("function"));
  config.noise = noise_from_json(task.at("noise"));

  const json& est = j.at("estimator");
  const std::string schedule = est.at("schedule").get<std::string>();
  if (schedule == "local")
    config.estimator.schedule = Schedule::Local;
  else if (schedule == "standard")
    config.estimator.schedule = Schedule::Standard;
  else
    throw std::invalid_argument("unknown schedule: " + schedule);
  config.estimator.two_sample = est.value("two_sample", false);
  config.estimator.kappa_source = est.value("kappa", 1.0);
  config.estimator.kappa_target = est.value("kappa_target", config.estimator.kappa_source);
  config.estimator.ell_multiplier = est.value("ell_multiplier", 3.0);
  config.estimator.beta = est.value("beta", 1.0);
  if (est.contains("gamma")) config.estimator.gamma = est.at("gamma").get<double>();
  if (est.contains("rho")) config.estimator.rho = est.at("rho").get<double>();
  if (est.contains("density_override"))
    config.estimator.density_override = est.at("density_override").get<double>();

  config.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  if (j.contains("m_grid")) config.m_grid = j.at("m_grid").get<std::vector<std::size_t>>();
  config.replicates = j.at("replicates").get<std::size_t>();
  config.test_count = j.at("test_count").get<std::size_t>();
  config.seed = j.at("seed").get<std::uint64_t>();
  config.threads = j.value("threads", 0u);
  config.output = j.value("output", std::string("risk.csv"));
  return config;
}

inline json config_to_json(const ExperimentConfig& config) {
  json j;
  j["task"]["source"] = distribution_to_json(config.source);
  j["task"]["target"] = distribution_to_json(config.target);
  j["task"]["function"] = function_to_json(config.function);
  j["task"]["noise"] = noise_to_json(config.noise);
  json est;
  est["schedule"] = config.estimator.schedule_name();
  est["two_sample"] = config.estimator.two_sample;
  est["kappa"] = config.estimator.kappa_source;
  est["kappa_target"] = config.estimator.kappa_target;
  est["ell_multiplier"] = config.estimator.ell_multiplier;
  est["beta"] = config.estimator.beta;
  if (config.estimator.gamma) est["gamma"] = *config.estimator.gamma;
  if (config.estimator.rho) est["rho"] = *config.estimator.rho;
  if (config.estimator.density_override)
    est["density_override"] = *config.estimator.density_override;
  j["estimator"] = est;
  j["n_grid"] = config.n_grid;
  if (!config.m_grid.empty()) j["m_grid"] = config.m_grid;
  j["replicates"] = config.replicates;
  j["test_count"] = config.test_count;
  j["seed"] = config.seed;
  j["threads"] = config.threads;
  j["output"] = config.output;
  return j;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument("config error in " + path + ": " + e.what());
  }
}

}  // namespace lknn
