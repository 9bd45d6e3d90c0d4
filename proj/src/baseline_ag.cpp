#include "quite/baseline_ag.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quite/kernels.hpp"

namespace quite {

namespace {

void check_dims(const AnswerSet& w, const ComparisonGraph& g,
                const std::vector<double>& rho, const std::vector<double>& q) {
  if (w.n_edges != g.num_edges() ||
      static_cast<int>(q.size()) != g.n_objects ||
      static_cast<int>(rho.size()) != w.n_workers)
    throw std::invalid_argument("AG: dimension mismatch");
}

}  // namespace

double negative_loglik(const AnswerSet& w, const ComparisonGraph& g,
                       const std::vector<double>& rho,
                       const std::vector<double>& q, WorkerModel model) {
  check_dims(w, g, rho, q);
  std::vector<double> d = g.distances_from_qualities(q);
  std::vector<double> x(w.edge_worker.size());
  for (int e = 0; e < w.n_edges; ++e)
    for (std::int64_t p = w.edge_off[e]; p < w.edge_off[e + 1]; ++p)
      x[p] = (1.0 - 2.0 * w.edge_answer[p]) * rho[w.edge_worker[p]] * d[e];
  return -kernels::log_f_sum(model.kind, x.data(), x.size());
}

std::pair<std::vector<double>, std::vector<double>> ag_gradients(
    const AnswerSet& w, const ComparisonGraph& g,
    const std::vector<double>& rho, const std::vector<double>& q,
    WorkerModel model) {
  check_dims(w, g, rho, q);
  std::vector<double> d = g.distances_from_qualities(q);
  const std::int64_t total = w.total();
  std::vector<double> x(total), r(total);
  for (int e = 0; e < w.n_edges; ++e)
    for (std::int64_t p = w.edge_off[e]; p < w.edge_off[e + 1]; ++p)
      x[p] = (1.0 - 2.0 * w.edge_answer[p]) * rho[w.edge_worker[p]] * d[e];
  kernels::ratio_fill(model.kind, x.data(), total, r.data());

  // dL/dd_e = -sum_k (1-2w) rho_k R(x);  dL/drho_k = -sum_e (1-2w) d_e R(x)
  std::vector<double> grad_d(w.n_edges, 0.0), grad_rho(w.n_workers, 0.0);
  for (int e = 0; e < w.n_edges; ++e) {
    double acc = 0.0;
    for (std::int64_t p = w.edge_off[e]; p < w.edge_off[e + 1]; ++p) {
      double sign = 1.0 - 2.0 * w.edge_answer[p];
      acc += sign * rho[w.edge_worker[p]] * r[p];
      grad_rho[w.edge_worker[p]] -= sign * d[e] * r[p];
    }
    grad_d[e] = -acc;
  }
  // map through the incidence matrix: grad_q = Gamma grad_d
  std::vector<double> grad_q(g.n_objects, 0.0);
  for (int e = 0; e < w.n_edges; ++e) {
    grad_q[g.edges[e].first] += grad_d[e];
    grad_q[g.edges[e].second] -= grad_d[e];
  }
  return {std::move(grad_q), std::move(grad_rho)};
}

AgResult run_ag(const AnswerSet& w, const ComparisonGraph& g,
                const AgConfig& cfg, std::vector<double> q0,
                std::vector<double> rho0, WorkerModel model) {
  check_dims(w, g, rho0, q0);
  AgResult out;
  std::vector<double> q = std::move(q0), rho = std::move(rho0);
  const int n = g.n_objects;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    auto [gq, grho] = ag_gradients(w, g, rho, q, model);
    std::vector<double> q_new(n);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      q_new[i] = q[i] - cfg.step_q * gq[i];
      mean += q_new[i];
    }
    mean /= n;
    for (int i = 0; i < n; ++i) q_new[i] -= mean;
    for (int k = 0; k < w.n_workers; ++k) {
      double v = rho[k] - cfg.step_rho * grho[k];
      rho[k] = std::clamp(v, cfg.i_rho.lo, cfg.i_rho.hi);
    }

    double diff2 = 0.0, norm2 = 0.0;
    bool finite = true;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(q_new[i])) finite = false;
      double dd = q_new[i] - q[i];
      diff2 += dd * dd;
      norm2 += q[i] * q[i];
    }
    for (double v : rho)
      if (!std::isfinite(v)) finite = false;
    q = std::move(q_new);
    out.iterations = iter;
    if (!finite) {
      out.diverged = true;
      out.diverged_at = iter;
      break;
    }
    if (std::sqrt(diff2) < cfg.tau * n * std::sqrt(norm2)) break;
  }
  out.q_hat = std::move(q);
  out.rho_hat = std::move(rho);
  return out;
}

}  // namespace quite
