#include "quite/bcrb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "quite/quadrature.hpp"

namespace quite {

double information_integrand(WorkerModel model, double rho, double d) {
  return rho * rho * model.fisher(rho * d);
}

namespace {

// E_{rho,d}[w(rho,d) g(rho d)] with an even f_d: integrate d over [0, hi]
// and double it, nesting adaptive quadrature over rho inside.
template <class Weight>
double mixed_expectation(const WorkerModel& model, const Prior& frho,
                         const Prior& fd, Weight&& weight) {
  auto inner = [&](double d) {
    auto f = [&](double rho) {
      return frho.density(rho) * weight(rho, d) * model.fisher(rho * d);
    };
    return integrate(f, frho.lo(), frho.hi(), 1e-9);
  };
  auto outer = [&](double d) { return fd.density(d) * inner(d); };
  return 2.0 * integrate(outer, 0.0, fd.hi(), 1e-9);
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> delta_entries(
    WorkerModel model, const Prior& frho, const Prior& fd,
    const Assignment& a) {
  if (std::fabs(fd.lo() + fd.hi()) > 1e-12 * std::fabs(fd.hi()))
    throw std::invalid_argument("delta_entries: f_d support not symmetric");
  double eq = mixed_expectation(model, frho, fd,
                                [](double rho, double) { return rho * rho; });
  double erho = mixed_expectation(model, frho, fd,
                                  [](double, double d) { return d * d; });
  std::vector<double> dq(a.edge_workers.size());
  for (std::size_t e = 0; e < dq.size(); ++e)
    dq[e] = static_cast<double>(a.edge_workers[e].size()) * eq;
  std::vector<double> drho(a.worker_edges.size());
  for (std::size_t k = 0; k < drho.size(); ++k)
    drho[k] = static_cast<double>(a.worker_edges[k].size()) * erho;
  return {std::move(dq), std::move(drho)};
}

namespace {

double curvature_expectation(const Prior& p) {
  switch (p.kind()) {
    case PriorKind::Gaussian:
      // -(log f)'' = 1/var exactly
      return 1.0 / p.gaussian_params().second;
    case PriorKind::PlanckTaper: {
      double margin = 4e-5 * (p.hi() - p.lo());
      auto f = [&](double x) {
        return -p.density(x) * p.log_density_derivs(x).d2;
      };
      return integrate(f, p.lo() + margin, p.hi() - margin, 1e-9);
    }
    default:
      throw std::invalid_argument(
          "prior_curvatures: prior not twice differentiable; smooth it with "
          "a Planck taper first");
  }
}

}  // namespace

std::pair<double, double> prior_curvatures(const Prior& fq,
                                           const Prior& frho) {
  return {curvature_expectation(fq), curvature_expectation(frho)};
}

Bim assemble_bim(const BimComponents& c, const ComparisonGraph& g) {
  const int n = g.n_objects;
  if (static_cast<int>(c.delta_q.size()) != g.num_edges())
    throw std::invalid_argument("assemble_bim: delta_q size mismatch");
  Eigen::MatrixXd upper = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [i, j] = g.edges[e];
    double v = c.delta_q[e];
    upper(i, i) += v;
    upper(j, j) += v;
    upper(i, j) -= v;
    upper(j, i) -= v;
  }
  for (int i = 0; i < n; ++i) upper(i, i) += c.beta_q;
  std::vector<double> lower(c.delta_rho.size());
  for (std::size_t k = 0; k < lower.size(); ++k)
    lower[k] = c.delta_rho[k] + c.beta_rho;
  return Bim(std::move(upper), std::move(lower));
}

QualityBounds quality_mse_bound(const BimComponents& c,
                                const ComparisonGraph& g) {
  Bim bim = assemble_bim(c, g);
  Eigen::LLT<Eigen::MatrixXd> llt(bim.upper_block());
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("quality_mse_bound: upper block not SPD");
  const int n = g.n_objects;
  Eigen::MatrixXd inv =
      llt.solve(Eigen::MatrixXd::Identity(n, n));
  QualityBounds out;
  out.per_object.resize(n);
  for (int i = 0; i < n; ++i) out.per_object[i] = inv(i, i);
  out.per_distance.resize(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [i, j] = g.edges[e];
    out.per_distance[e] = inv(i, i) + inv(j, j) - 2.0 * inv(i, j);
  }
  return out;
}

std::vector<double> reliability_mse_bound(const BimComponents& c) {
  std::vector<double> out(c.delta_rho.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = 1.0 / (c.delta_rho[k] + c.beta_rho);
  return out;
}

Prior difference_prior(const Prior& fq, int grid_points) {
  if (grid_points < 16)
    throw std::invalid_argument("difference_prior: grid too small");
  const double lo = fq.lo(), hi = fq.hi();
  const int n = grid_points;
  const double h = (hi - lo) / (n - 1);
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = fq.density(lo + h * i);
  // discrete autocorrelation: f_d(j h) = h sum_i f_i f_{i-j}
  std::vector<double> fd(2 * n - 1, 0.0);
  for (int j = -(n - 1); j <= n - 1; ++j) {
    double acc = 0.0;
    int start = std::max(0, j), stop = std::min(n - 1, n - 1 + j);
    for (int i = start; i <= stop; ++i) acc += f[i] * f[i - j];
    fd[j + n - 1] = acc * h;
  }
  return Prior::empirical(-(hi - lo), hi - lo, std::move(fd));
}

}  // namespace quite
