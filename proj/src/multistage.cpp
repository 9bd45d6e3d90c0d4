#include "quite/multistage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "quite/metrics.hpp"

namespace quite {

ComparisonGraph build_second_stage_graph(
    const std::vector<double>& q_hat, int degree,
    const std::vector<std::pair<int, int>>& stage1_edges) {
  const int n = static_cast<int>(q_hat.size());
  if (degree <= 0 || degree % 2 != 0 || degree >= n)
    throw std::invalid_argument("second stage: need even 0 < D < N");
  std::vector<int> by_rank = ranking_from_qualities(q_hat);
  std::set<std::pair<int, int>> excluded;
  for (auto [i, j] : stage1_edges) excluded.insert(std::minmax(i, j));

  ComparisonGraph g2;
  g2.n_objects = n;
  const int half = degree / 2;
  for (int r = 0; r < n; ++r)
    for (int rp = r + 1; rp <= std::min(n - 1, r + half); ++rp) {
      int a = by_rank[r], b = by_rank[rp];
      if (excluded.count(std::minmax(a, b))) continue;
      g2.edges.emplace_back(a, b);
    }
  return g2;
}

namespace {

// x sinh x - 2(cosh x + 1): the BTL variance proxy's stationarity condition.
double btl_constant() {
  double lo = 1.0, hi = 5.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = mid * std::sinh(mid) - 2.0 * (std::cosh(mid) + 1.0);
    (v < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Probit variance proxy h(x) = e^{x^2} Phi(x) Phi(-x) / x^2, minimized by
// golden-section search.
double thurstone_constant() {
  WorkerModel model(ModelKind::Thurstone);
  auto h = [&](double x) {
    return std::exp(x * x) * model.F(x) * model.F(-x) / (x * x);
  };
  const double gr = 0.61803398874989484820;
  double a = 0.2, b = 5.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 300 && b - a > 1e-12; ++it) {
    if (h(c) < h(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

double optimal_reliability_constant(ModelKind kind) {
  static const double btl = btl_constant();
  static const double thu = thurstone_constant();
  return kind == ModelKind::Btl ? btl : thu;
}

double optimal_edge_reliability(WorkerModel model, double d_hat,
                                Interval i_rho) {
  if (d_hat == 0.0) return i_rho.hi;
  return optimal_reliability_constant(model.kind) / std::fabs(d_hat);
}

Assignment assign_workers_sorted(const std::vector<double>& rho_hat,
                                 const std::vector<double>& d_hat,
                                 int per_edge) {
  const int k = static_cast<int>(rho_hat.size());
  const int e_count = static_cast<int>(d_hat.size());
  if (per_edge < 1 || k % per_edge != 0)
    throw std::invalid_argument("assign_workers_sorted: K not divisible by M");
  const int blocks = k / per_edge;  // = 1/alpha

  std::vector<int> workers(k);
  std::iota(workers.begin(), workers.end(), 0);
  std::stable_sort(workers.begin(), workers.end(),
                   [&](int a, int b) { return rho_hat[a] > rho_hat[b]; });

  std::vector<int> edges(e_count);
  std::iota(edges.begin(), edges.end(), 0);
  std::stable_sort(edges.begin(), edges.end(), [&](int a, int b) {
    return std::fabs(d_hat[a]) < std::fabs(d_hat[b]);
  });

  // ceil-sized edge blocks; the padding pairs are virtual and never appear
  const int block_size = (e_count + blocks - 1) / blocks;
  std::vector<std::vector<int>> ew(e_count);
  for (int pos = 0; pos < e_count; ++pos) {
    int block = std::min(pos / block_size, blocks - 1);
    int e = edges[pos];
    ew[e].assign(workers.begin() + static_cast<std::ptrdiff_t>(block) * per_edge,
                 workers.begin() +
                     static_cast<std::ptrdiff_t>(block + 1) * per_edge);
  }
  return Assignment::from_edge_workers(k, std::move(ew));
}

TwoStageResult run_two_stage(const GroundTruth& gt, const ComparisonGraph& g1,
                             const AnswerSet& w1, const QuiteConfig& cfg1,
                             const QuiteConfig& cfg2, int degree2,
                             int per_edge2, std::mt19937_64& rng_quite,
                             std::mt19937_64& rng_answers) {
  TwoStageResult out;
  QuiteResult stage1 = run_quite(w1, g1, cfg1, rng_quite);
  out.stage1_state = stage1.state;
  out.diag1 = {stage1.iterations, g1.num_edges(),
               static_cast<std::size_t>(w1.total()),
               std::accumulate(stage1.state.sigma.begin(),
                               stage1.state.sigma.end(), 0.0) /
                   std::max<std::size_t>(1, stage1.state.sigma.size())};

  out.plan.g2 = build_second_stage_graph(stage1.state.q_hat, degree2, g1.edges);
  out.plan.d_hat_g2 =
      out.plan.g2.distances_from_qualities(stage1.state.q_hat);
  out.plan.target_reliabilities.resize(out.plan.d_hat_g2.size());
  for (std::size_t e = 0; e < out.plan.d_hat_g2.size(); ++e)
    out.plan.target_reliabilities[e] = optimal_edge_reliability(
        cfg1.model, out.plan.d_hat_g2[e], cfg1.i_rho);
  out.plan.assignment2 = assign_workers_sorted(
      stage1.state.rho_hat, out.plan.d_hat_g2, per_edge2);

  AnswerSet w2 =
      generate_answers(cfg1.model, gt, out.plan.g2, out.plan.assignment2,
                       rng_answers);

  out.union_graph.n_objects = g1.n_objects;
  out.union_graph.edges = g1.edges;
  out.union_graph.edges.insert(out.union_graph.edges.end(),
                               out.plan.g2.edges.begin(),
                               out.plan.g2.edges.end());
  AnswerSet w_union = AnswerSet::merge(w1, w2);

  // seed iteration 1 of the second stage with the stage-1 posteriors
  WarmStart warm;
  warm.delta0 = stage1.state.delta;
  warm.sigma0 = stage1.state.sigma;
  std::vector<double> sorted_sigma = stage1.state.sigma;
  std::nth_element(sorted_sigma.begin(),
                   sorted_sigma.begin() + sorted_sigma.size() / 2,
                   sorted_sigma.end());
  double med = sorted_sigma.empty() ? 1.0
                                    : sorted_sigma[sorted_sigma.size() / 2];
  for (double d : out.plan.d_hat_g2) {
    warm.delta0.push_back(d);
    warm.sigma0.push_back(med);
  }
  warm.rho0 = stage1.state.rho_hat;

  QuiteResult stage2 = run_quite(w_union, out.union_graph, cfg2, rng_quite,
                                 &warm);
  out.state = stage2.state;
  out.diag2 = {stage2.iterations, out.plan.g2.num_edges(),
               static_cast<std::size_t>(w2.total()),
               std::accumulate(stage2.state.sigma.begin(),
                               stage2.state.sigma.end(), 0.0) /
                   std::max<std::size_t>(1, stage2.state.sigma.size())};
  return out;
}

void write_stage_diagnostics_csv(std::ostream& os, const StageDiagnostics& d1,
                                 const StageDiagnostics& d2) {
  os << "stage,mse_proxy,iterations,edges,evaluations\n";
  os << "1," << d1.mean_sigma << ',' << d1.iterations << ',' << d1.edges << ','
     << d1.evaluations << '\n';
  os << "2," << d2.mean_sigma << ',' << d2.iterations << ',' << d2.edges << ','
     << d2.evaluations << '\n';
}

}  // namespace quite
