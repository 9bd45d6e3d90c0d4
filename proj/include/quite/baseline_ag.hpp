#pragma once

#include <utility>
#include <vector>

#include "quite/estimation.hpp"
#include "quite/graph.hpp"
#include "quite/simulation.hpp"
#include "quite/worker_model.hpp"

namespace quite {

struct AgConfig {
  double step_q = 1.0;    // lambda_q
  double step_rho = 1.0;  // lambda_rho
  int max_iters = 1000;
  double tau = 1e-5;
  Interval i_rho;  // rho iterates are clipped here after each step
};

struct AgResult {
  std::vector<double> q_hat;
  std::vector<double> rho_hat;
  int iterations = 0;
  bool diverged = false;
  int diverged_at = -1;
};

// L(rho, q) = -log P(W | rho, Gamma^T q).
double negative_loglik(const AnswerSet& w, const ComparisonGraph& g,
                       const std::vector<double>& rho,
                       const std::vector<double>& q, WorkerModel model);

// Analytic gradients of L with respect to q (through the incidence map) and
// to rho.
std::pair<std::vector<double>, std::vector<double>> ag_gradients(
    const AnswerSet& w, const ComparisonGraph& g,
    const std::vector<double>& rho, const std::vector<double>& q,
    WorkerModel model);

// Alternate-gradient iteration: q step, mean-centering, rho step, both
// gradients evaluated at the previous iterate; stops on the normalized
// q-change criterion or at max_iters.
AgResult run_ag(const AnswerSet& w, const ComparisonGraph& g,
                const AgConfig& cfg, std::vector<double> q0,
                std::vector<double> rho0, WorkerModel model);

}  // namespace quite
