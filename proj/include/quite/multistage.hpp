#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "quite/estimation.hpp"
#include "quite/graph.hpp"
#include "quite/simulation.hpp"

namespace quite {

struct StagePlan {
  ComparisonGraph g2;
  Assignment assignment2;
  std::vector<double> d_hat_g2;              // stage-1 distance estimates on g2
  std::vector<double> target_reliabilities;  // rho*_e per g2 edge
};

// Rank-neighborhood graph: sort objects by q_hat, connect each rank to the
// ranks at most D/2 away, excluding every unordered pair already evaluated
// in stage 1.  Boundary ranks get fewer neighbors, so the result is not
// regular.
ComparisonGraph build_second_stage_graph(
    const std::vector<double>& q_hat, int degree,
    const std::vector<std::pair<int, int>>& stage1_edges);

// Reliability that minimizes the per-edge distance-estimate variance proxy:
// x*/|d|, where x* solves x sinh x = 2(cosh x + 1) for BTL and minimizes the
// probit analogue numerically (computed once and cached).  A zero distance
// returns the top of I_rho: the hardest pair wants the best worker.
double optimal_edge_reliability(WorkerModel model, double d_hat,
                                Interval i_rho);

// Model-specific scale constant x* above (exposed for tests).
double optimal_reliability_constant(ModelKind kind);

// Sorted-partition matching: workers in descending rho_hat blocks of size
// per_edge, edges in ascending |d_hat| blocks (last block padded with dummy
// pairs that generate no tasks); block i of pairs goes to block i of workers.
Assignment assign_workers_sorted(const std::vector<double>& rho_hat,
                                 const std::vector<double>& d_hat,
                                 int per_edge);

struct StageDiagnostics {
  int iterations = 0;
  int edges = 0;
  std::size_t evaluations = 0;
  double mean_sigma = 0.0;  // MSE proxy: average per-edge variance estimate
};

struct TwoStageResult {
  EstimateState state;  // final estimates on the union graph
  EstimateState stage1_state;
  StagePlan plan;
  ComparisonGraph union_graph;
  StageDiagnostics diag1, diag2;
};

// Full protocol: QUITE on (g1, w1); build g2 and its assignment from the
// stage-1 estimates; draw the stage-2 answers from the ground truth; rerun
// QUITE on the union of both answer sets, seeding iteration 1 with the
// stage-1 per-edge posteriors (new edges get the stage-1 d_hat as mean and
// the stage-1 median sigma as variance).
TwoStageResult run_two_stage(const GroundTruth& gt, const ComparisonGraph& g1,
                             const AnswerSet& w1, const QuiteConfig& cfg1,
                             const QuiteConfig& cfg2, int degree2,
                             int per_edge2, std::mt19937_64& rng_quite,
                             std::mt19937_64& rng_answers);

void write_stage_diagnostics_csv(std::ostream& os, const StageDiagnostics& d1,
                                 const StageDiagnostics& d2);

}  // namespace quite
