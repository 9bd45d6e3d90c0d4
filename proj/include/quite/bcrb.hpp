#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "quite/graph.hpp"
#include "quite/priors.hpp"
#include "quite/worker_model.hpp"

namespace quite {

// Pieces of the Bayesian information matrix
//   M = [ Gamma Delta_q Gamma^T + beta_q I ,              0
//                    0                     , Delta_rho + beta_rho I ].
struct BimComponents {
  std::vector<double> delta_q;    // E diagonal entries
  std::vector<double> delta_rho;  // K diagonal entries
  double beta_q = 0.0;
  double beta_rho = 0.0;
};

// rho^2 F'(rho d)^2 / (F(rho d)(1 - F(rho d))); the reliability entries use
// the d^2-weighted variant, obtained by swapping the squared factor.
double information_integrand(WorkerModel model, double rho, double d);

// Per-edge and per-worker information entries: the scalar expectations over
// f_rho x f_d are computed once by nested adaptive quadrature and scaled by
// the assignment counts.  f_d must be an even density.
std::pair<std::vector<double>, std::vector<double>> delta_entries(
    WorkerModel model, const Prior& frho, const Prior& fd,
    const Assignment& a);

// beta = -E[(log f)''] under the prior; requires a twice-differentiable
// interior (PlanckTaper or Gaussian — plain Uniform is rejected with a hint
// to smooth it first).
std::pair<double, double> prior_curvatures(const Prior& fq, const Prior& frho);

// Block-diagonal BIM handle; the zero off-diagonal blocks are never stored.
class Bim {
 public:
  Bim(Eigen::MatrixXd upper, std::vector<double> lower_diag)
      : upper_(std::move(upper)), lower_diag_(std::move(lower_diag)) {}

  const Eigen::MatrixXd& upper_block() const { return upper_; }
  const std::vector<double>& lower_block_diagonal() const { return lower_diag_; }
  Eigen::MatrixXd off_diagonal_block() const {
    return Eigen::MatrixXd::Zero(upper_.rows(),
                                 static_cast<Eigen::Index>(lower_diag_.size()));
  }

 private:
  Eigen::MatrixXd upper_;
  std::vector<double> lower_diag_;
};

Bim assemble_bim(const BimComponents& c, const ComparisonGraph& g);

struct QualityBounds {
  std::vector<double> per_object;    // diag of the inverse upper block
  std::vector<double> per_distance;  // diag of Gamma^T (upper)^-1 Gamma
};

QualityBounds quality_mse_bound(const BimComponents& c,
                                const ComparisonGraph& g);

// ([Delta_rho]_kk + beta_rho)^{-1} per worker.
std::vector<double> reliability_mse_bound(const BimComponents& c);

// Density of q1 - q2 by numerical self-convolution of fq on a uniform grid;
// returns an Empirical prior on [-(hi-lo), hi-lo].  For a plain Uniform
// parent prefer Prior::triangular_difference, which is exact.
Prior difference_prior(const Prior& fq, int grid_points = 4096);

}  // namespace quite
