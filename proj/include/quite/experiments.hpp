#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "quite/priors.hpp"
#include "quite/worker_model.hpp"

namespace quite {

enum class Scenario { MseVsN, PerrVsN, PerrVsDegree, TwoStageCompare, BcrbOnly };

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct ExperimentConfig {
  Scenario scenario = Scenario::MseVsN;
  ModelKind model = ModelKind::Btl;
  std::vector<int> n_grid = {40, 70, 100, 140, 200};
  std::vector<double> alpha_grid = {0.5, 1.0};
  int degree = 20;                          // D for the N sweeps
  std::vector<int> budget_grid = {5, 10};   // C = alpha * D values
  std::vector<int> degree_factors = {1, 2, 4};  // D = factor * C
  Prior prior_q = Prior::uniform(0.0, 1.0);
  Prior prior_rho = Prior::uniform(1.0, 20.0);
  double epsilon = 0.06;
  int max_iters = 30;
  double tau = 0.0;
  int stage_degree = 10;  // two-stage: D1 = D2; single-stage uses 2x
  int trials = 100;
  int calibration_trials = 100;
  std::vector<std::string> estimators;  // empty: scenario default
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  double planck_z_fraction = 0.2;  // z = fraction * (b - a) for the bound
  std::string out_dir = "results";
};

struct ResultRow {
  std::string scenario;
  std::string model;
  int n = 0;
  int k = 0;
  int d = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::string estimator;
  std::string metric;
  double value = 0.0;
  double stderr_ = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> table;
  std::vector<std::string> errors;  // recorded grid-point failures
};

nlohmann::json prior_to_json(const Prior& p);
Prior prior_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Monte Carlo sweep over the scenario's grid; deterministic given the seed
// regardless of the worker-pool size.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// results.csv, config.echo and one SVG plot per figure-style scenario.
void emit_outputs(const ExperimentResult& result, const ExperimentConfig& cfg,
                  const std::string& out_dir);

std::string results_csv(const std::vector<ResultRow>& table);

}  // namespace quite
