#include "quite/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "quite/baseline_ag.hpp"
#include "quite/bcrb.hpp"
#include "quite/estimation.hpp"
#include "quite/graph.hpp"
#include "quite/metrics.hpp"
#include "quite/multistage.hpp"
#include "quite/simulation.hpp"

namespace quite {

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::MseVsN: return "mse_vs_N";
    case Scenario::PerrVsN: return "perr_vs_N";
    case Scenario::PerrVsDegree: return "perr_vs_degree";
    case Scenario::TwoStageCompare: return "two_stage_compare";
    case Scenario::BcrbOnly: return "bcrb_only";
  }
  return "?";
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "mse_vs_N") return Scenario::MseVsN;
  if (s == "perr_vs_N") return Scenario::PerrVsN;
  if (s == "perr_vs_degree") return Scenario::PerrVsDegree;
  if (s == "two_stage_compare") return Scenario::TwoStageCompare;
  if (s == "bcrb_only") return Scenario::BcrbOnly;
  throw std::invalid_argument("unknown scenario: " + s);
}

nlohmann::json prior_to_json(const Prior& p) {
  nlohmann::json j;
  switch (p.kind()) {
    case PriorKind::Uniform:
      j = {{"kind", "uniform"}, {"a", p.param_a()}, {"b", p.param_b()}};
      break;
    case PriorKind::PlanckTaper:
      j = {{"kind", "planck_taper"},
           {"a", p.param_a()},
           {"b", p.param_b()},
           {"z", p.taper_width()}};
      break;
    case PriorKind::Gaussian: {
      auto [mu, var] = p.gaussian_params();
      j = {{"kind", "gaussian"}, {"mu", mu}, {"var", var}};
      break;
    }
    case PriorKind::TriangularDifference:
      j = {{"kind", "triangular_difference"},
           {"a", p.param_a()},
           {"b", p.param_b()}};
      break;
    case PriorKind::Empirical:
      throw std::invalid_argument("empirical priors are not config-expressible");
  }
  return j;
}

Prior prior_from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform")
    return Prior::uniform(j.at("a").get<double>(), j.at("b").get<double>());
  if (kind == "planck_taper")
    return Prior::planck_taper(j.at("a").get<double>(), j.at("b").get<double>(),
                               j.at("z").get<double>());
  if (kind == "gaussian")
    return Prior::gaussian(j.at("mu").get<double>(), j.at("var").get<double>());
  if (kind == "triangular_difference")
    return Prior::triangular_difference(j.at("a").get<double>(),
                                        j.at("b").get<double>());
  throw std::invalid_argument("unknown prior kind: " + kind);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return nlohmann::json{
      {"scenario", to_string(cfg.scenario)},
      {"model", to_string(cfg.model)},
      {"n_grid", cfg.n_grid},
      {"alpha_grid", cfg.alpha_grid},
      {"degree", cfg.degree},
      {"budget_grid", cfg.budget_grid},
      {"degree_factors", cfg.degree_factors},
      {"prior_q", prior_to_json(cfg.prior_q)},
      {"prior_rho", prior_to_json(cfg.prior_rho)},
      {"epsilon", cfg.epsilon},
      {"max_iters", cfg.max_iters},
      {"tau", cfg.tau},
      {"stage_degree", cfg.stage_degree},
      {"trials", cfg.trials},
      {"calibration_trials", cfg.calibration_trials},
      {"estimators", cfg.estimators},
      {"seed", cfg.seed},
      {"threads", cfg.threads},
      {"planck_z_fraction", cfg.planck_z_fraction},
      {"out_dir", cfg.out_dir},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("scenario"))
    cfg.scenario = scenario_from_string(j.at("scenario").get<std::string>());
  if (j.contains("model"))
    cfg.model = model_from_string(j.at("model").get<std::string>());
  if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
  if (j.contains("alpha_grid"))
    cfg.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
  if (j.contains("degree")) cfg.degree = j.at("degree").get<int>();
  if (j.contains("budget_grid"))
    cfg.budget_grid = j.at("budget_grid").get<std::vector<int>>();
  if (j.contains("degree_factors"))
    cfg.degree_factors = j.at("degree_factors").get<std::vector<int>>();
  if (j.contains("prior_q")) cfg.prior_q = prior_from_json(j.at("prior_q"));
  if (j.contains("prior_rho"))
    cfg.prior_rho = prior_from_json(j.at("prior_rho"));
  if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
  if (j.contains("max_iters")) cfg.max_iters = j.at("max_iters").get<int>();
  if (j.contains("tau")) cfg.tau = j.at("tau").get<double>();
  if (j.contains("stage_degree"))
    cfg.stage_degree = j.at("stage_degree").get<int>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
  if (j.contains("calibration_trials"))
    cfg.calibration_trials = j.at("calibration_trials").get<int>();
  if (j.contains("estimators"))
    cfg.estimators = j.at("estimators").get<std::vector<std::string>>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  if (j.contains("planck_z_fraction"))
    cfg.planck_z_fraction = j.at("planck_z_fraction").get<double>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (cfg.n_grid.empty() || cfg.alpha_grid.empty() || cfg.trials < 1)
    throw std::invalid_argument("config: empty grid or trials < 1");
  return cfg;
}

namespace {

std::mt19937_64 gp_stream(std::uint64_t seed, int gp, Stream purpose,
                          std::uint64_t trial) {
  std::uint64_t root = splitmix64(seed ^ splitmix64(0x517cc1b7ULL + gp));
  return substream(root, purpose, trial);
}

template <class F>
void parallel_trials(int threads, int count, F&& fn) {
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::string first_error;
  auto worker = [&] {
    for (;;) {
      int t = next.fetch_add(1);
      if (t >= count) return;
      try {
        fn(t);
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error.empty()) first_error = ex.what();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!first_error.empty()) throw std::runtime_error(first_error);
}

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;
};

MeanStderr aggregate(const std::vector<double>& xs) {
  MeanStderr out;
  int n = static_cast<int>(xs.size());
  if (n == 0) return out;
  for (double x : xs) out.mean += x;
  out.mean /= n;
  if (n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
  }
  return out;
}

Interval distance_interval(const Prior& fq) {
  double len = fq.hi() - fq.lo();
  return {-len, len};
}

QuiteConfig make_quite_config(const ExperimentConfig& cfg, bool single_iter) {
  QuiteConfig qc{WorkerModel(cfg.model), cfg.prior_q, cfg.prior_rho,
                 distance_interval(cfg.prior_q),
                 Interval{cfg.prior_rho.lo(), cfg.prior_rho.hi()}};
  qc.max_iters = cfg.max_iters;
  qc.tau = cfg.tau;
  qc.single_iteration = single_iter;
  return qc;
}

AgConfig make_ag_config(const ExperimentConfig& cfg, int n) {
  AgConfig ac;
  ac.step_q = ac.step_rho = static_cast<double>(n) / 5.0;
  ac.max_iters = 1000;
  ac.tau = 1e-5;
  ac.i_rho = {cfg.prior_rho.lo(), cfg.prior_rho.hi()};
  return ac;
}

std::vector<double> run_ag_trial(const ExperimentConfig& cfg,
                                 const ComparisonGraph& g, const AnswerSet& w,
                                 std::mt19937_64 rng_init) {
  AgConfig ac = make_ag_config(cfg, g.n_objects);
  std::vector<double> q0 = cfg.prior_q.sample_n(rng_init, g.n_objects);
  double mean = 0.0;
  for (double v : q0) mean += v;
  mean /= static_cast<double>(q0.size());
  for (double& v : q0) v -= mean;
  std::vector<double> rho0(w.n_workers, cfg.prior_rho.mean());
  return run_ag(w, g, ac, std::move(q0), std::move(rho0), WorkerModel(cfg.model))
      .q_hat;
}

// Planck-smoothed copy of a uniform prior for the bound computation.
Prior smooth_for_bound(const Prior& p, double z_fraction) {
  if (p.kind() == PriorKind::Uniform) {
    double a = p.param_a(), b = p.param_b();
    return Prior::planck_taper(a, b, z_fraction * (b - a));
  }
  return p;
}

struct BoundSummary {
  double mean_object_bound = 0.0;
  double mean_rho_bound = 0.0;
};

BoundSummary bcrb_summary(const ExperimentConfig& cfg,
                          const ComparisonGraph& g, const Assignment& a) {
  Prior fq_s = smooth_for_bound(cfg.prior_q, cfg.planck_z_fraction);
  Prior frho_s = smooth_for_bound(cfg.prior_rho, cfg.planck_z_fraction);
  Prior fd = difference_prior(fq_s);
  BimComponents comp;
  auto deltas = delta_entries(WorkerModel(cfg.model), frho_s, fd, a);
  comp.delta_q = std::move(deltas.first);
  comp.delta_rho = std::move(deltas.second);
  auto betas = prior_curvatures(fq_s, frho_s);
  comp.beta_q = betas.first;
  comp.beta_rho = betas.second;
  QualityBounds qb = quality_mse_bound(comp, g);
  std::vector<double> rb = reliability_mse_bound(comp);
  BoundSummary out;
  for (double v : qb.per_object) out.mean_object_bound += v;
  out.mean_object_bound /= static_cast<double>(qb.per_object.size());
  for (double v : rb) out.mean_rho_bound += v;
  out.mean_rho_bound /= static_cast<double>(rb.size());
  return out;
}

struct RowBuilder {
  const ExperimentConfig& cfg;
  std::vector<ResultRow>& table;
  int n = 0, k = 0, d = 0;
  double alpha = 0.0;

  void add(const std::string& estimator, const std::string& metric,
           double value, double se, int trials) {
    table.push_back(ResultRow{to_string(cfg.scenario), to_string(cfg.model), n,
                              k, d, alpha, cfg.epsilon, estimator, metric,
                              value, se, trials, cfg.seed});
  }
};

std::vector<std::string> default_estimators(Scenario s) {
  switch (s) {
    case Scenario::MseVsN: return {"quite"};
    case Scenario::PerrVsN: return {"quite", "quite_l1", "ag"};
    case Scenario::PerrVsDegree: return {"quite"};
    case Scenario::TwoStageCompare: return {"two_stage", "single_stage"};
    case Scenario::BcrbOnly: return {};
  }
  return {};
}

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// One simulated estimate under the shared (graph, assignment) of the grid
// point; `calibration` switches to the disjoint calibration streams.
struct SingleStageData {
  GroundTruth gt;
  AnswerSet w;
};

SingleStageData simulate_point(const ExperimentConfig& cfg, int gp,
                               const ComparisonGraph& g, const Assignment& a,
                               std::uint64_t trial, bool calibration) {
  std::uint64_t idx = trial;
  Stream gt_purpose = calibration ? Stream::Calibration : Stream::Qualities;
  auto rng_gt = gp_stream(cfg.seed, gp, gt_purpose, idx);
  SingleStageData out;
  out.gt = sample_ground_truth(cfg.prior_q, cfg.prior_rho, g.n_objects,
                               a.n_workers, rng_gt);
  auto rng_w = gp_stream(cfg.seed, gp,
                         calibration ? Stream::PriorSample : Stream::Answers,
                         idx);
  out.w = generate_answers(WorkerModel(cfg.model), out.gt, g, a, rng_w);
  return out;
}

std::vector<double> estimate_qualities(const ExperimentConfig& cfg, int gp,
                                       const std::string& estimator,
                                       const ComparisonGraph& g,
                                       const AnswerSet& w, std::uint64_t trial,
                                       bool calibration) {
  Stream init_purpose =
      calibration ? Stream::Stage2Answers : Stream::QualityInit;
  auto rng = gp_stream(cfg.seed, gp, init_purpose, trial);
  if (estimator == "quite" || estimator == "quite_l1") {
    QuiteConfig qc = make_quite_config(cfg, estimator == "quite_l1");
    return run_quite(w, g, qc, rng).state.q_hat;
  }
  if (estimator == "ag") return run_ag_trial(cfg, g, w, rng);
  throw std::invalid_argument("unknown estimator: " + estimator);
}

void run_mse_scenario(const ExperimentConfig& cfg, ExperimentResult& result) {
  std::vector<std::string> estimators =
      cfg.estimators.empty() ? default_estimators(cfg.scenario)
                             : cfg.estimators;
  int gp = 0;
  for (int n : cfg.n_grid) {
    for (double alpha : cfg.alpha_grid) {
      ++gp;
      RowBuilder rows{cfg, result.table};
      rows.n = n;
      rows.k = n;
      rows.d = cfg.degree;
      rows.alpha = alpha;
      try {
        auto rng_g = gp_stream(cfg.seed, gp, Stream::Graph, 0);
        ComparisonGraph g = random_regular_graph(n, cfg.degree, rng_g);
        int per_edge = static_cast<int>(std::lround(alpha * n));
        auto rng_a = gp_stream(cfg.seed, gp, Stream::Assignment, 0);
        Assignment a = regular_assignment(g, n, per_edge, rng_a);

        BoundSummary bound = bcrb_summary(cfg, g, a);
        rows.add("bcrb", "bound", bound.mean_object_bound, 0.0, 0);
        rows.add("bcrb", "rho_bound", bound.mean_rho_bound, 0.0, 0);
        if (cfg.scenario == Scenario::BcrbOnly) continue;

        for (const auto& est : estimators) {
          // calibration pass on disjoint streams fixes the affine scale
          std::vector<std::pair<std::vector<double>, std::vector<double>>>
              calib(cfg.calibration_trials);
          parallel_trials(cfg.threads, cfg.calibration_trials, [&](int t) {
            SingleStageData data = simulate_point(cfg, gp, g, a, t, true);
            calib[t] = {estimate_qualities(cfg, gp, est, g, data.w, t, true),
                        data.gt.q};
          });
          double scale = calibrate_scale(calib);

          std::vector<double> mses(cfg.trials);
          parallel_trials(cfg.threads, cfg.trials, [&](int t) {
            SingleStageData data = simulate_point(cfg, gp, g, a, t, false);
            auto q_hat =
                estimate_qualities(cfg, gp, est, g, data.w, t, false);
            mses[t] = affine_adjusted_mse(q_hat, data.gt.q, scale);
          });
          MeanStderr ms = aggregate(mses);
          rows.add(est, "mse", ms.mean, ms.se, cfg.trials);
          rows.add(est, "scale", scale, 0.0, cfg.calibration_trials);
        }
      } catch (const std::exception& ex) {
        result.errors.push_back(std::string(to_string(cfg.scenario)) + " N=" +
                                std::to_string(n) + " alpha=" +
                                std::to_string(alpha) + ": " + ex.what());
      }
    }
  }
}

void run_perr_vs_n(const ExperimentConfig& cfg, ExperimentResult& result) {
  std::vector<std::string> estimators =
      cfg.estimators.empty() ? default_estimators(cfg.scenario)
                             : cfg.estimators;
  int gp = 1000000;  // distinct stream family from the MSE scenario
  for (int n : cfg.n_grid) {
    for (double alpha : cfg.alpha_grid) {
      ++gp;
      RowBuilder rows{cfg, result.table};
      rows.n = n;
      rows.k = n;
      rows.d = cfg.degree;
      rows.alpha = alpha;
      try {
        auto rng_g = gp_stream(cfg.seed, gp, Stream::Graph, 0);
        ComparisonGraph g = random_regular_graph(n, cfg.degree, rng_g);
        int per_edge = static_cast<int>(std::lround(alpha * n));
        auto rng_a = gp_stream(cfg.seed, gp, Stream::Assignment, 0);
        Assignment a = regular_assignment(g, n, per_edge, rng_a);

        std::vector<std::vector<double>> errs(estimators.size());
        for (auto& v : errs) v.assign(cfg.trials, 0.0);
        parallel_trials(cfg.threads, cfg.trials, [&](int t) {
          SingleStageData data = simulate_point(cfg, gp, g, a, t, false);
          for (std::size_t ei = 0; ei < estimators.size(); ++ei) {
            auto q_hat = estimate_qualities(cfg, gp, estimators[ei], g,
                                            data.w, t, false);
            bool ok = is_epsilon_quality(ranking_from_qualities(q_hat),
                                         data.gt.q, cfg.epsilon);
            errs[ei][t] = ok ? 0.0 : 1.0;
          }
        });
        for (std::size_t ei = 0; ei < estimators.size(); ++ei) {
          MeanStderr ms = aggregate(errs[ei]);
          rows.add(estimators[ei], "error_prob", ms.mean, ms.se, cfg.trials);
        }
      } catch (const std::exception& ex) {
        result.errors.push_back(std::string("perr_vs_N N=") +
                                std::to_string(n) + ": " + ex.what());
      }
    }
  }
}

void run_perr_vs_degree(const ExperimentConfig& cfg,
                        ExperimentResult& result) {
  int gp = 2000000;
  for (int n : cfg.n_grid) {
    for (int budget : cfg.budget_grid) {
      for (int factor : cfg.degree_factors) {
        ++gp;
        int degree = budget * factor;
        double alpha = 1.0 / factor;
        RowBuilder rows{cfg, result.table};
        rows.n = n;
        rows.k = n;
        rows.d = degree;
        rows.alpha = alpha;
        try {
          if (degree >= n) throw std::invalid_argument("degree >= N");
          auto rng_g = gp_stream(cfg.seed, gp, Stream::Graph, 0);
          ComparisonGraph g = random_regular_graph(n, degree, rng_g);
          int per_edge = n / factor;
          auto rng_a = gp_stream(cfg.seed, gp, Stream::Assignment, 0);
          Assignment a = regular_assignment(g, n, per_edge, rng_a);

          std::vector<double> errs(cfg.trials, 0.0);
          parallel_trials(cfg.threads, cfg.trials, [&](int t) {
            SingleStageData data = simulate_point(cfg, gp, g, a, t, false);
            auto q_hat =
                estimate_qualities(cfg, gp, "quite", g, data.w, t, false);
            bool ok = is_epsilon_quality(ranking_from_qualities(q_hat),
                                         data.gt.q, cfg.epsilon);
            errs[t] = ok ? 0.0 : 1.0;
          });
          MeanStderr ms = aggregate(errs);
          rows.add("quite", "error_prob", ms.mean, ms.se, cfg.trials);
        } catch (const std::exception& ex) {
          result.errors.push_back(std::string("perr_vs_degree D=") +
                                  std::to_string(degree) + ": " + ex.what());
        }
      }
    }
  }
}

void run_two_stage_compare(const ExperimentConfig& cfg,
                           ExperimentResult& result) {
  int gp = 3000000;
  for (int n : cfg.n_grid) {
    for (double alpha : cfg.alpha_grid) {
      ++gp;
      int d1 = cfg.stage_degree;
      int d_single = 2 * cfg.stage_degree;
      RowBuilder rows{cfg, result.table};
      rows.n = n;
      rows.k = n;
      rows.d = d_single;
      rows.alpha = alpha;
      try {
        int per_edge = static_cast<int>(std::lround(alpha * n));
        auto rng_g1 = gp_stream(cfg.seed, gp, Stream::Graph, 0);
        ComparisonGraph g1 = random_regular_graph(n, d1, rng_g1);
        auto rng_a1 = gp_stream(cfg.seed, gp, Stream::Assignment, 0);
        Assignment a1 = regular_assignment(g1, n, per_edge, rng_a1);
        auto rng_gs = gp_stream(cfg.seed, gp, Stream::Graph, 1);
        ComparisonGraph gs = random_regular_graph(n, d_single, rng_gs);
        auto rng_as = gp_stream(cfg.seed, gp, Stream::Assignment, 1);
        Assignment as = regular_assignment(gs, n, per_edge, rng_as);

        std::vector<double> err_two(cfg.trials, 0.0),
            err_single(cfg.trials, 0.0), eval_two(cfg.trials, 0.0),
            eval_single(cfg.trials, 0.0);
        parallel_trials(cfg.threads, cfg.trials, [&](int t) {
          auto rng_gt = gp_stream(cfg.seed, gp, Stream::Qualities, t);
          GroundTruth gt = sample_ground_truth(cfg.prior_q, cfg.prior_rho, n,
                                               n, rng_gt);
          WorkerModel model(cfg.model);

          auto rng_w1 = gp_stream(cfg.seed, gp, Stream::Answers, t);
          AnswerSet w1 = generate_answers(model, gt, g1, a1, rng_w1);
          QuiteConfig qc = make_quite_config(cfg, false);
          auto rng_run = gp_stream(cfg.seed, gp, Stream::QualityInit, t);
          auto rng_w2 = gp_stream(cfg.seed, gp, Stream::Stage2Answers, t);
          TwoStageResult two = run_two_stage(gt, g1, w1, qc, qc, d1, per_edge,
                                             rng_run, rng_w2);
          bool ok2 = is_epsilon_quality(ranking_from_qualities(two.state.q_hat),
                                        gt.q, cfg.epsilon);
          err_two[t] = ok2 ? 0.0 : 1.0;
          eval_two[t] = static_cast<double>(w1.total()) +
                        static_cast<double>(two.diag2.evaluations);

          auto rng_ws = gp_stream(cfg.seed, gp, Stream::SingleStage, t);
          AnswerSet ws = generate_answers(model, gt, gs, as, rng_ws);
          auto rng_run_s = gp_stream(cfg.seed, gp, Stream::QualityInit,
                                     t + 0x40000000ULL);
          auto qs = run_quite(ws, gs, qc, rng_run_s).state.q_hat;
          bool oks =
              is_epsilon_quality(ranking_from_qualities(qs), gt.q, cfg.epsilon);
          err_single[t] = oks ? 0.0 : 1.0;
          eval_single[t] = static_cast<double>(ws.total());
        });
        MeanStderr m2 = aggregate(err_two), ms = aggregate(err_single);
        MeanStderr e2 = aggregate(eval_two), es = aggregate(eval_single);
        rows.add("two_stage", "error_prob", m2.mean, m2.se, cfg.trials);
        rows.add("single_stage", "error_prob", ms.mean, ms.se, cfg.trials);
        rows.add("two_stage", "evaluations", e2.mean, e2.se, cfg.trials);
        rows.add("single_stage", "evaluations", es.mean, es.se, cfg.trials);
      } catch (const std::exception& ex) {
        result.errors.push_back(std::string("two_stage N=") +
                                std::to_string(n) + ": " + ex.what());
      }
    }
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  switch (cfg.scenario) {
    case Scenario::MseVsN:
    case Scenario::BcrbOnly:
      run_mse_scenario(cfg, result);
      break;
    case Scenario::PerrVsN:
      run_perr_vs_n(cfg, result);
      break;
    case Scenario::PerrVsDegree:
      run_perr_vs_degree(cfg, result);
      break;
    case Scenario::TwoStageCompare:
      run_two_stage_compare(cfg, result);
      break;
  }
  return result;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct PlotSeries {
  std::string label;
  bool dashed = false;
  std::vector<std::pair<double, double>> pts;
};

// Minimal deterministic SVG line plot; y axis optionally log10.
std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, bool log_y,
                     std::vector<PlotSeries> series) {
  const double w = 720, h = 480, ml = 70, mr = 170, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& s : series)
    for (auto [x, y] : s.pts) {
      if (log_y && y <= 0.0) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      double yy = log_y ? std::log10(y) : y;
      ymin = std::min(ymin, yy);
      ymax = std::max(ymax, yy);
    }
  if (xmin > xmax) return "<svg xmlns='http://www.w3.org/2000/svg'/>\n";
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  double span = ymax - ymin;
  ymin -= 0.05 * span;
  ymax += 0.05 * span;
  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  auto py = [&](double y) {
    double yy = log_y ? std::log10(y) : y;
    return h - mb - (yy - ymin) / (ymax - ymin) * (h - mt - mb);
  };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
     << h << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << w / 2 << "' y='20' text-anchor='middle' "
        "font-size='15'>" << title << "</text>\n";
  // axes
  os << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
     << "' y2='" << h - mb << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
     << h - mb << "' stroke='black'/>\n";
  os << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 12
     << "' text-anchor='middle' font-size='12'>" << xlabel << "</text>\n";
  os << "<text x='18' y='" << (mt + h - mb) / 2
     << "' text-anchor='middle' font-size='12' transform='rotate(-90 18 "
     << (mt + h - mb) / 2 << ")'>" << ylabel << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    double fx = xmin + (xmax - xmin) * i / 4.0;
    os << "<text x='" << px(fx) << "' y='" << h - mb + 16
       << "' text-anchor='middle' font-size='10'>" << format_double(fx)
       << "</text>\n";
    double fy = ymin + (ymax - ymin) * i / 4.0;
    double label = log_y ? std::pow(10.0, fy) : fy;
    os << "<text x='" << ml - 6 << "' y='"
       << h - mb - (h - mt - mb) * i / 4.0 + 4
       << "' text-anchor='end' font-size='10'>" << format_double(label)
       << "</text>\n";
  }
  int ci = 0;
  double ly = mt + 10;
  for (auto& s : series) {
    const char* color = colors[ci % 8];
    std::ostringstream path;
    bool first = true;
    for (auto [x, y] : s.pts) {
      if (log_y && y <= 0.0) continue;
      path << (first ? "M" : "L") << format_double(px(x)) << ' '
           << format_double(py(y)) << ' ';
      first = false;
    }
    os << "<path d='" << path.str() << "' fill='none' stroke='" << color
       << "' stroke-width='1.5'"
       << (s.dashed ? " stroke-dasharray='6 4'" : "") << "/>\n";
    for (auto [x, y] : s.pts) {
      if (log_y && y <= 0.0) continue;
      os << "<circle cx='" << format_double(px(x)) << "' cy='"
         << format_double(py(y)) << "' r='2.5' fill='" << color << "'/>\n";
    }
    os << "<line x1='" << w - mr + 10 << "' y1='" << ly << "' x2='"
       << w - mr + 34 << "' y2='" << ly << "' stroke='" << color
       << "' stroke-width='1.5'"
       << (s.dashed ? " stroke-dasharray='6 4'" : "") << "/>\n";
    os << "<text x='" << w - mr + 40 << "' y='" << ly + 4
       << "' font-size='11'>" << s.label << "</text>\n";
    ly += 18;
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

std::string csv_escape(const std::string& s) { return s; }  // plain tokens

}  // namespace

std::string results_csv(const std::vector<ResultRow>& table) {
  std::ostringstream os;
  os << "scenario,model,N,K,D,alpha,epsilon,estimator,metric,value,stderr,"
        "trials,seed\n";
  for (const auto& r : table) {
    os << csv_escape(r.scenario) << ',' << csv_escape(r.model) << ',' << r.n
       << ',' << r.k << ',' << r.d << ',' << format_double(r.alpha) << ','
       << format_double(r.epsilon) << ',' << csv_escape(r.estimator) << ','
       << csv_escape(r.metric) << ',' << format_double(r.value) << ','
       << format_double(r.stderr_) << ',' << r.trials << ',' << r.seed
       << '\n';
  }
  return os.str();
}

void emit_outputs(const ExperimentResult& result, const ExperimentConfig& cfg,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream f(fs::path(out_dir) / "results.csv");
    if (!f) throw std::runtime_error("cannot write " + out_dir + "/results.csv");
    f << results_csv(result.table);
  }
  {
    std::ofstream f(fs::path(out_dir) / "config.echo");
    if (!f) throw std::runtime_error("cannot write " + out_dir + "/config.echo");
    f << config_to_json(cfg).dump(2) << '\n';
  }
  if (result.table.empty()) return;

  bool mse_style = cfg.scenario == Scenario::MseVsN;
  bool degree_style = cfg.scenario == Scenario::PerrVsDegree;
  std::string y_metric = mse_style ? "mse" : "error_prob";

  // series keyed by (estimator, alpha); BCRB bound rows become dashed series
  std::vector<PlotSeries> series;
  auto find_series = [&](const std::string& label) -> PlotSeries& {
    for (auto& s : series)
      if (s.label == label) return s;
    series.push_back(PlotSeries{label, false, {}});
    return series.back();
  };
  for (const auto& r : result.table) {
    double x = degree_style ? r.d : r.n;
    if (r.metric == y_metric) {
      std::ostringstream label;
      label << r.estimator << " a=" << format_double(r.alpha);
      if (degree_style) label.str(r.estimator + " C=" +
                                  format_double(r.alpha * r.d));
      find_series(label.str()).pts.emplace_back(x, r.value);
    } else if (mse_style && r.metric == "bound" && r.estimator == "bcrb") {
      std::ostringstream label;
      label << "bcrb a=" << format_double(r.alpha);
      PlotSeries& s = find_series(label.str());
      s.dashed = true;
      s.pts.emplace_back(x, r.value);
    }
  }
  if (series.empty()) return;
  for (auto& s : series)
    std::sort(s.pts.begin(), s.pts.end());
  std::string fname = std::string(to_string(cfg.scenario)) + ".svg";
  std::string xlabel = degree_style ? "D" : "N";
  std::string ylabel = mse_style ? "MSE" : "error probability";
  std::ofstream f(fs::path(out_dir) / fname);
  if (!f) throw std::runtime_error("cannot write plot file");
  f << svg_plot(std::string(to_string(cfg.scenario)) + " (" +
                    to_string(cfg.model) + ")",
                xlabel, ylabel, mse_style, std::move(series));
}

}  // namespace quite
