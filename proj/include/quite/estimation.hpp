#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "quite/graph.hpp"
#include "quite/priors.hpp"
#include "quite/rng.hpp"
#include "quite/simulation.hpp"
#include "quite/worker_model.hpp"

namespace quite {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// Mixture comparison curve G(delta) = E_rho[F(rho delta)] under the
// reliability prior; strictly increasing with G(0) = 1/2.
class MixtureLink {
 public:
  MixtureLink(Prior frho, WorkerModel model)
      : frho_(std::move(frho)), model_(model) {}

  double value(double delta) const;       // G, adaptive quadrature
  double derivative(double delta) const;  // G' = E_rho[rho F'(rho delta)]

  // delta with |G(delta) - p| < 1e-9, found by bisection on [lo, hi] and
  // clipped there; p must lie strictly inside (0, 1).
  double inverse(double p, double lo, double hi) const;

 private:
  Prior frho_;
  WorkerModel model_;
};

struct EstimateState {
  int iter = 0;
  std::vector<double> delta;    // per-edge MAP distance estimates
  std::vector<double> sigma;    // their variances (strictly positive)
  std::vector<double> q_hat;    // qualities, reference entry exactly 0
  std::vector<double> d_hat;    // Gamma^T q_hat
  std::vector<double> rho_hat;  // worker reliabilities within I_rho
};

// Which previous-iteration quantity seeds the per-edge Gaussian prior mean.
enum class ChainPrior { Delta, DHat };

struct QuiteConfig {
  WorkerModel model;
  Prior fq;    // quality prior (initialization + I_d construction)
  Prior frho;  // reliability prior
  Interval i_d;
  Interval i_rho;
  int max_iters = 30;
  double tau = 0.0;
  bool single_iteration = false;
  bool unit_weights = false;
  ChainPrior chain_prior = ChainPrior::Delta;
  double sigma_floor = 1e-8;
  bool keep_trace = false;
};

// Replaces the INIT path at iteration 1 (two-stage protocol): per-edge
// Gaussian priors plus reliability estimates carried over from a prior stage.
struct WarmStart {
  std::vector<double> delta0;
  std::vector<double> sigma0;
  std::vector<double> rho0;
};

struct QuiteResult {
  EstimateState state;
  std::vector<EstimateState> trace;  // filled when cfg.keep_trace
  int iterations = 0;
  bool stopped_early = false;
};

// p_hat_e: empirical fraction of 0-answers on edge e.
double empirical_zero_fraction(const AnswerSet& w, int e);

// delta^(1) = G^{-1}(p_hat) and its delta-method variance, with the
// half-count clamp on p_hat and the sigma floor applied.
std::pair<std::vector<double>, std::vector<double>> initial_edge_estimates(
    const AnswerSet& w, const MixtureLink& link, Interval i_d,
    double sigma_floor);

// argmax over d in I_d of sum_k log F(s_k d) + log N(d; mean, var), where
// s_k = (1-2w_k) rho_k is prepacked; strictly concave, derivative bisection.
double map_edge_distance(const double* signed_rho, std::size_t n, double mean,
                         double var, WorkerModel model, Interval i_d);

// First-order variance of the MAP distance at d_star (implicit-function
// approximation); floored at sigma_floor.
double map_edge_variance(const double* signed_rho, std::size_t n,
                         double d_star, double var, WorkerModel model,
                         double sigma_floor);

// Convenience wrappers over the packed forms.
double map_edge_distance(const AnswerSet& w, int e,
                         const std::vector<double>& rho_hat, double mean,
                         double var, WorkerModel model, Interval i_d);
double map_edge_variance(const AnswerSet& w, int e,
                         const std::vector<double>& rho_hat, double d_star,
                         double var, WorkerModel model, double sigma_floor);

// Weighted graph least squares with q_N = 0: minimizes
// sum_e w_e (x_{i_e} - x_{j_e} - delta_e)^2, w_e = 1/sigma_e or 1.
std::vector<double> weighted_ls_qualities(const ComparisonGraph& g,
                                          const std::vector<double>& delta,
                                          const std::vector<double>& sigma,
                                          bool unit_weights = false);

// argmax over rho in I_rho of sum_e log F(t_e rho) + log f_rho(rho), with
// t_e = (1-2w_{e,k}) d_hat_e prepacked per worker.
double map_worker_reliability(const double* signed_d, std::size_t n,
                              const Prior& frho, WorkerModel model,
                              Interval i_rho);
double map_worker_reliability(const AnswerSet& w, int k,
                              const std::vector<double>& d_hat,
                              const Prior& frho, WorkerModel model,
                              Interval i_rho);

// The full iterative estimator.  Deterministic given the rng state; the
// optional warm start switches iteration 1 from INIT to per-edge MAP.
QuiteResult run_quite(const AnswerSet& w, const ComparisonGraph& g,
                      const QuiteConfig& cfg, std::mt19937_64& rng,
                      const WarmStart* warm = nullptr);

// CSV export: trace rows are (iter, id, quantity, value); estimates are
// (id, value) pairs per file.
void write_trace_csv(std::ostream& os, const std::vector<EstimateState>& trace);
void write_qualities_csv(std::ostream& os, const std::vector<double>& q);
void write_reliabilities_csv(std::ostream& os, const std::vector<double>& rho);

}  // namespace quite
