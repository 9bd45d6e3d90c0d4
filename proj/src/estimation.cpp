#include "quite/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "quite/kernels.hpp"
#include "quite/quadrature.hpp"

namespace quite {

namespace {

// Bracketed derivative bisection for a strictly concave objective on
// [lo, hi]: returns the boundary if the derivative does not change sign,
// otherwise the interior stationary point to within `tol`.
template <class DF>
double argmax_concave(DF&& df, double lo, double hi, double tol = 1e-8) {
  if (df(lo) <= 0.0) return lo;
  if (df(hi) >= 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    (df(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double MixtureLink::value(double delta) const {
  auto f = [&](double rho) { return model_.F(rho * delta) * frho_.density(rho); };
  return integrate(f, frho_.lo(), frho_.hi(), 1e-11);
}

double MixtureLink::derivative(double delta) const {
  auto f = [&](double rho) {
    return rho * model_.F_derivs(rho * delta).d1 * frho_.density(rho);
  };
  return integrate(f, frho_.lo(), frho_.hi(), 1e-11);
}

double MixtureLink::inverse(double p, double lo, double hi) const {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("mixture link inverse: p outside (0,1)");
  if (value(lo) >= p) return lo;
  if (value(hi) <= p) return hi;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double g = value(mid);
    if (std::fabs(g - p) < 1e-9 || hi - lo < 1e-13) return mid;
    (g < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double empirical_zero_fraction(const AnswerSet& w, int e) {
  std::int64_t c = w.count(e);
  if (c < 1) throw std::runtime_error("edge has no answers");
  std::int64_t ones = 0;
  for (std::int64_t p = w.edge_off[e]; p < w.edge_off[e + 1]; ++p)
    ones += w.edge_answer[p];
  return 1.0 - static_cast<double>(ones) / static_cast<double>(c);
}

std::pair<std::vector<double>, std::vector<double>> initial_edge_estimates(
    const AnswerSet& w, const MixtureLink& link, Interval i_d,
    double sigma_floor) {
  std::vector<double> delta(w.n_edges), sigma(w.n_edges);
  // p_hat takes only |K_e|+1 values per count, so memoize on (ones, count)
  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<double, double>>
      cache;
  for (int e = 0; e < w.n_edges; ++e) {
    std::int64_t c = w.count(e);
    if (c < 1) throw std::runtime_error("edge has no answers");
    std::int64_t ones = 0;
    for (std::int64_t p = w.edge_off[e]; p < w.edge_off[e + 1]; ++p)
      ones += w.edge_answer[p];
    auto key = std::make_pair(ones, c);
    auto it = cache.find(key);
    if (it == cache.end()) {
      double count = static_cast<double>(c);
      double p_hat = 1.0 - static_cast<double>(ones) / count;
      // half-count clamp keeps G^{-1} finite at p in {0,1}
      p_hat = std::min(std::max(p_hat, 0.5 / count), 1.0 - 0.5 / count);
      double d = link.inverse(p_hat, i_d.lo, i_d.hi);
      double slope = link.derivative(d);
      double var = (1.0 / (slope * slope)) * p_hat * (1.0 - p_hat) / count;
      var = std::max(var, sigma_floor);
      it = cache.emplace(key, std::make_pair(d, var)).first;
    }
    delta[e] = it->second.first;
    sigma[e] = it->second.second;
  }
  return {std::move(delta), std::move(sigma)};
}

double map_edge_distance(const double* signed_rho, std::size_t n, double mean,
                         double var, WorkerModel model, Interval i_d) {
  if (!(var > 0.0)) throw std::invalid_argument("map_edge_distance: var <= 0");
  auto df = [&](double d) {
    return kernels::deriv_sum(model.kind, signed_rho, n, d) + (mean - d) / var;
  };
  return argmax_concave(df, i_d.lo, i_d.hi);
}

double map_edge_variance(const double* signed_rho, std::size_t n,
                         double d_star, double var, WorkerModel model,
                         double sigma_floor) {
  // numerator: sum_k rho_k^2 g(rho_k d*) — g is even, signs drop out
  double num = kernels::fisher_sum(model.kind, signed_rho, n, d_star);
  // u: log-likelihood curvature at the answer-signed points plus the
  // Gaussian prior curvature -1/var
  double u = kernels::curvature_sum(model.kind, signed_rho, n, d_star) -
             1.0 / var;
  if (u == 0.0) return sigma_floor;
  return std::max(num / (u * u), sigma_floor);
}

namespace {

// Packs (1-2w) rho over one edge's answers into `out`.
void pack_edge(const AnswerSet& w, int e, const std::vector<double>& rho,
               std::vector<double>& out) {
  out.clear();
  for (std::int64_t p = w.edge_off[e]; p < w.edge_off[e + 1]; ++p)
    out.push_back((1.0 - 2.0 * w.edge_answer[p]) * rho[w.edge_worker[p]]);
}

}  // namespace

double map_edge_distance(const AnswerSet& w, int e,
                         const std::vector<double>& rho_hat, double mean,
                         double var, WorkerModel model, Interval i_d) {
  if (w.count(e) < 1) throw std::runtime_error("edge has no answers");
  std::vector<double> s;
  pack_edge(w, e, rho_hat, s);
  return map_edge_distance(s.data(), s.size(), mean, var, model, i_d);
}

double map_edge_variance(const AnswerSet& w, int e,
                         const std::vector<double>& rho_hat, double d_star,
                         double var, WorkerModel model, double sigma_floor) {
  std::vector<double> s;
  pack_edge(w, e, rho_hat, s);
  return map_edge_variance(s.data(), s.size(), d_star, var, model,
                           sigma_floor);
}

std::vector<double> weighted_ls_qualities(const ComparisonGraph& g,
                                          const std::vector<double>& delta,
                                          const std::vector<double>& sigma,
                                          bool unit_weights) {
  const int n = g.n_objects;
  const int m = g.num_edges();
  if (static_cast<int>(delta.size()) != m ||
      (!unit_weights && static_cast<int>(sigma.size()) != m))
    throw std::invalid_argument("weighted LS: vector length mismatch");
  if (!g.connected())
    throw std::runtime_error("weighted LS: graph not connected");

  // reduced system with the last object as the zero reference
  const int r = n - 1;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(r, r);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r);
  for (int e = 0; e < m; ++e) {
    double we = 1.0;
    if (!unit_weights) {
      if (!(sigma[e] > 0.0))
        throw std::invalid_argument("weighted LS: nonpositive variance");
      we = 1.0 / sigma[e];
    }
    int i = g.edges[e].first, j = g.edges[e].second;
    if (i < r) {
      lap(i, i) += we;
      rhs(i) += we * delta[e];
    }
    if (j < r) {
      lap(j, j) += we;
      rhs(j) -= we * delta[e];
    }
    if (i < r && j < r) {
      lap(i, j) -= we;
      lap(j, i) -= we;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(lap);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("weighted LS: reduced Laplacian not SPD");
  Eigen::VectorXd x = llt.solve(rhs);
  x += llt.solve(rhs - lap * x);  // one refinement step
  std::vector<double> q(n, 0.0);
  for (int i = 0; i < r; ++i) q[i] = x(i);
  return q;
}

double map_worker_reliability(const double* signed_d, std::size_t n,
                              const Prior& frho, WorkerModel model,
                              Interval i_rho) {
  double lo = i_rho.lo, hi = i_rho.hi;
  bool flat_prior = frho.kind() == PriorKind::Uniform;
  if (!flat_prior) {
    // stay clear of support edges where log f (or its FD stencil) blows up
    double margin = 3e-5 * (frho.hi() - frho.lo());
    lo = std::max(lo, frho.lo() + margin);
    hi = std::min(hi, frho.hi() - margin);
  }
  auto df = [&](double rho) {
    double s = kernels::deriv_sum(model.kind, signed_d, n, rho);
    if (!flat_prior) s += frho.log_density_derivs(rho).d1;
    return s;
  };
  return argmax_concave(df, lo, hi);
}

double map_worker_reliability(const AnswerSet& w, int k,
                              const std::vector<double>& d_hat,
                              const Prior& frho, WorkerModel model,
                              Interval i_rho) {
  if (w.worker_off[k + 1] - w.worker_off[k] < 1)
    throw std::runtime_error("worker has no answers");
  std::vector<double> t;
  for (std::int64_t p = w.worker_off[k]; p < w.worker_off[k + 1]; ++p)
    t.push_back((1.0 - 2.0 * w.worker_answer[p]) * d_hat[w.worker_edge[p]]);
  return map_worker_reliability(t.data(), t.size(), frho, model, i_rho);
}

QuiteResult run_quite(const AnswerSet& w, const ComparisonGraph& g,
                      const QuiteConfig& cfg, std::mt19937_64& rng,
                      const WarmStart* warm) {
  const int n = g.n_objects;
  const int m = g.num_edges();
  const int k_workers = w.n_workers;
  if (w.n_edges != m) throw std::invalid_argument("run_quite: edge mismatch");
  if (cfg.max_iters < 1) throw std::invalid_argument("run_quite: I_max < 1");
  for (int e = 0; e < m; ++e)
    if (w.count(e) < 1) throw std::runtime_error("run_quite: empty edge");
  for (int k = 0; k < k_workers; ++k)
    if (w.worker_off[k + 1] - w.worker_off[k] < 1)
      throw std::runtime_error("run_quite: worker without answers");

  QuiteResult out;
  std::vector<double> q_prev = cfg.fq.sample_n(rng, n);  // q_hat^(0)
  std::vector<double> delta(m), sigma(m), rho_hat;
  std::vector<double> prior_mean(m), prior_var(m);
  if (warm) {
    if (static_cast<int>(warm->delta0.size()) != m ||
        static_cast<int>(warm->sigma0.size()) != m ||
        static_cast<int>(warm->rho0.size()) != k_workers)
      throw std::invalid_argument("run_quite: warm start size mismatch");
  }

  MixtureLink link(cfg.frho, cfg.model);
  std::vector<double> signed_rho(w.edge_worker.size());
  std::vector<double> signed_d(w.worker_edge.size());
  EstimateState st;
  st.q_hat.assign(n, 0.0);

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    if (iter == 1 && !warm) {
      auto init = initial_edge_estimates(w, link, cfg.i_d, cfg.sigma_floor);
      delta = std::move(init.first);
      sigma = std::move(init.second);
    } else {
      const std::vector<double>& rho_used =
          (iter == 1 && warm) ? warm->rho0 : rho_hat;
      if (iter == 1 && warm) {
        prior_mean = warm->delta0;
        prior_var = warm->sigma0;
      } else {
        prior_mean = (cfg.chain_prior == ChainPrior::Delta) ? delta : st.d_hat;
        prior_var = sigma;
      }
      for (std::int64_t p = 0; p < w.total(); ++p) {
        // flat (1-2w) rho per answer, grouped by edge
        signed_rho[p] =
            (1.0 - 2.0 * w.edge_answer[p]) * rho_used[w.edge_worker[p]];
      }
      for (int e = 0; e < m; ++e) {
        const double* s = signed_rho.data() + w.edge_off[e];
        std::size_t cnt = static_cast<std::size_t>(w.count(e));
        double d_star = map_edge_distance(s, cnt, prior_mean[e], prior_var[e],
                                          cfg.model, cfg.i_d);
        delta[e] = d_star;
        sigma[e] = map_edge_variance(s, cnt, d_star, prior_var[e], cfg.model,
                                     cfg.sigma_floor);
      }
    }

    st.iter = iter;
    st.delta = delta;
    st.sigma = sigma;
    st.q_hat = weighted_ls_qualities(g, delta, sigma, cfg.unit_weights);
    st.d_hat = g.distances_from_qualities(st.q_hat);

    for (std::int64_t p = 0; p < static_cast<std::int64_t>(signed_d.size()); ++p)
      signed_d[p] =
          (1.0 - 2.0 * w.worker_answer[p]) * st.d_hat[w.worker_edge[p]];
    rho_hat.resize(k_workers);
    for (int k = 0; k < k_workers; ++k) {
      const double* t = signed_d.data() + w.worker_off[k];
      std::size_t cnt =
          static_cast<std::size_t>(w.worker_off[k + 1] - w.worker_off[k]);
      rho_hat[k] =
          map_worker_reliability(t, cnt, cfg.frho, cfg.model, cfg.i_rho);
    }
    st.rho_hat = rho_hat;
    if (cfg.keep_trace) out.trace.push_back(st);

    out.iterations = iter;
    double diff2 = 0.0, norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = st.q_hat[i] - q_prev[i];
      diff2 += d * d;
      norm2 += q_prev[i] * q_prev[i];
    }
    q_prev = st.q_hat;
    if (cfg.single_iteration) break;
    if (std::sqrt(diff2) < cfg.tau * n * std::sqrt(norm2)) {
      out.stopped_early = true;
      break;
    }
  }
  out.state = std::move(st);
  return out;
}

void write_trace_csv(std::ostream& os,
                     const std::vector<EstimateState>& trace) {
  os << "iter,id,quantity,value\n";
  for (const auto& st : trace) {
    for (std::size_t e = 0; e < st.delta.size(); ++e)
      os << st.iter << ',' << e + 1 << ",delta," << st.delta[e] << '\n';
    for (std::size_t e = 0; e < st.sigma.size(); ++e)
      os << st.iter << ',' << e + 1 << ",sigma," << st.sigma[e] << '\n';
    for (std::size_t i = 0; i < st.q_hat.size(); ++i)
      os << st.iter << ',' << i + 1 << ",q_hat," << st.q_hat[i] << '\n';
    for (std::size_t e = 0; e < st.d_hat.size(); ++e)
      os << st.iter << ',' << e + 1 << ",d_hat," << st.d_hat[e] << '\n';
    for (std::size_t k = 0; k < st.rho_hat.size(); ++k)
      os << st.iter << ',' << k + 1 << ",rho_hat," << st.rho_hat[k] << '\n';
  }
}

void write_qualities_csv(std::ostream& os, const std::vector<double>& q) {
  os << "object,q_hat\n";
  for (std::size_t i = 0; i < q.size(); ++i)
    os << i + 1 << ',' << q[i] << '\n';
}

void write_reliabilities_csv(std::ostream& os, const std::vector<double>& rho) {
  os << "worker,rho_hat\n";
  for (std::size_t k = 0; k < rho.size(); ++k)
    os << k + 1 << ',' << rho[k] << '\n';
}

}  // namespace quite
