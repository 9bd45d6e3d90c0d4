// Command-line front end: synthetic-crowd simulation, estimation, bounds and
// the Monte Carlo experiment runner.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "quite/baseline_ag.hpp"
#include "quite/bcrb.hpp"
#include "quite/estimation.hpp"
#include "quite/experiments.hpp"
#include "quite/graph.hpp"
#include "quite/kernels.hpp"
#include "quite/metrics.hpp"
#include "quite/multistage.hpp"
#include "quite/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  json j;
  f >> j;
  return j;
}

quite::ExperimentConfig load_config(const std::string& path,
                                    std::optional<std::uint64_t> seed,
                                    std::optional<std::string> out,
                                    std::optional<std::string> scenario) {
  quite::ExperimentConfig cfg;
  if (!path.empty()) cfg = quite::config_from_json(load_json(path));
  if (seed) cfg.seed = *seed;
  if (out) cfg.out_dir = *out;
  if (scenario) cfg.scenario = quite::scenario_from_string(*scenario);
  return cfg;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

int cmd_simulate(const quite::ExperimentConfig& cfg, int n, int k, int degree,
                 int per_edge, const std::string& out_dir) {
  fs::create_directories(out_dir);
  auto rng_g = quite::substream(cfg.seed, quite::Stream::Graph);
  quite::ComparisonGraph g = quite::random_regular_graph(n, degree, rng_g);
  auto rng_a = quite::substream(cfg.seed, quite::Stream::Assignment);
  quite::Assignment a = quite::regular_assignment(g, k, per_edge, rng_a);
  auto rng_gt = quite::substream(cfg.seed, quite::Stream::Qualities);
  quite::GroundTruth gt =
      quite::sample_ground_truth(cfg.prior_q, cfg.prior_rho, n, k, rng_gt);
  auto rng_w = quite::substream(cfg.seed, quite::Stream::Answers);
  quite::AnswerSet w =
      quite::generate_answers(quite::WorkerModel(cfg.model), gt, g, a, rng_w);

  auto fg = open_out(fs::path(out_dir) / "graph.txt");
  quite::write_edge_list(fg, g);
  auto fa = open_out(fs::path(out_dir) / "assignment.txt");
  quite::write_assignment(fa, a);
  auto fw = open_out(fs::path(out_dir) / "answers.txt");
  quite::write_answers(fw, w);
  auto fq = open_out(fs::path(out_dir) / "true_qualities.csv");
  auto fr = open_out(fs::path(out_dir) / "true_reliabilities.csv");
  quite::write_ground_truth(fq, fr, gt);
  std::cout << "simulated N=" << n << " K=" << k << " E=" << g.num_edges()
            << " evaluations=" << w.total() << " -> " << out_dir << "\n";
  return 0;
}

int cmd_estimate(const quite::ExperimentConfig& cfg, const std::string& dir,
                 const std::string& algorithm, const std::string& out_dir,
                 bool trace) {
  std::ifstream fg(fs::path(dir) / "graph.txt");
  if (!fg) throw std::runtime_error("missing graph.txt in " + dir);
  quite::ComparisonGraph g = quite::read_edge_list(fg);
  std::ifstream fa(fs::path(dir) / "assignment.txt");
  if (!fa) throw std::runtime_error("missing assignment.txt in " + dir);
  quite::Assignment a = quite::read_assignment(fa, g.num_edges());
  std::ifstream fw(fs::path(dir) / "answers.txt");
  if (!fw) throw std::runtime_error("missing answers.txt in " + dir);
  quite::AnswerSet w = quite::read_answers(fw, a);

  fs::create_directories(out_dir);
  double len = cfg.prior_q.hi() - cfg.prior_q.lo();
  quite::QuiteConfig qc{quite::WorkerModel(cfg.model),
                        cfg.prior_q,
                        cfg.prior_rho,
                        {-len, len},
                        {cfg.prior_rho.lo(), cfg.prior_rho.hi()}};
  qc.max_iters = cfg.max_iters;
  qc.tau = cfg.tau;
  qc.keep_trace = trace;

  std::vector<double> q_hat, rho_hat;
  if (algorithm == "quite" || algorithm == "quite_l1") {
    qc.single_iteration = algorithm == "quite_l1";
    auto rng = quite::substream(cfg.seed, quite::Stream::QualityInit);
    quite::QuiteResult res = quite::run_quite(w, g, qc, rng);
    q_hat = res.state.q_hat;
    rho_hat = res.state.rho_hat;
    if (trace) {
      auto ft = open_out(fs::path(out_dir) / "trace.csv");
      quite::write_trace_csv(ft, res.trace);
    }
    std::cout << "quite finished after " << res.iterations << " iterations\n";
  } else if (algorithm == "ag") {
    quite::AgConfig ac;
    ac.step_q = ac.step_rho = g.n_objects / 5.0;
    ac.i_rho = {cfg.prior_rho.lo(), cfg.prior_rho.hi()};
    auto rng = quite::substream(cfg.seed, quite::Stream::QualityInit);
    std::vector<double> q0 = cfg.prior_q.sample_n(rng, g.n_objects);
    double mean = 0.0;
    for (double v : q0) mean += v;
    for (double& v : q0) v -= mean / q0.size();
    std::vector<double> rho0(a.n_workers, cfg.prior_rho.mean());
    quite::AgResult res = quite::run_ag(w, g, ac, q0, rho0,
                                        quite::WorkerModel(cfg.model));
    if (res.diverged)
      throw std::runtime_error("AG diverged at iteration " +
                               std::to_string(res.diverged_at));
    q_hat = res.q_hat;
    rho_hat = res.rho_hat;
    std::cout << "ag finished after " << res.iterations << " iterations\n";
  } else {
    throw std::runtime_error("unknown algorithm: " + algorithm);
  }

  auto fq = open_out(fs::path(out_dir) / "qualities.csv");
  quite::write_qualities_csv(fq, q_hat);
  auto fr = open_out(fs::path(out_dir) / "reliabilities.csv");
  quite::write_reliabilities_csv(fr, rho_hat);
  return 0;
}

int cmd_bcrb(const quite::ExperimentConfig& cfg, int n, int k, int degree,
             int per_edge, const std::string& out_dir) {
  fs::create_directories(out_dir);
  auto rng_g = quite::substream(cfg.seed, quite::Stream::Graph);
  quite::ComparisonGraph g = quite::random_regular_graph(n, degree, rng_g);
  auto rng_a = quite::substream(cfg.seed, quite::Stream::Assignment);
  quite::Assignment a = quite::regular_assignment(g, k, per_edge, rng_a);

  auto smooth = [&](const quite::Prior& p) {
    if (p.kind() == quite::PriorKind::Uniform)
      return quite::Prior::planck_taper(
          p.param_a(), p.param_b(),
          cfg.planck_z_fraction * (p.param_b() - p.param_a()));
    return p;
  };
  quite::Prior fq = smooth(cfg.prior_q);
  quite::Prior frho = smooth(cfg.prior_rho);
  quite::Prior fd = quite::difference_prior(fq);
  quite::BimComponents comp;
  auto deltas =
      quite::delta_entries(quite::WorkerModel(cfg.model), frho, fd, a);
  comp.delta_q = std::move(deltas.first);
  comp.delta_rho = std::move(deltas.second);
  auto betas = quite::prior_curvatures(fq, frho);
  comp.beta_q = betas.first;
  comp.beta_rho = betas.second;
  quite::QualityBounds qb = quite::quality_mse_bound(comp, g);
  std::vector<double> rb = quite::reliability_mse_bound(comp);

  auto f = open_out(fs::path(out_dir) / "bcrb.csv");
  f << "class,index,bound\n";
  for (std::size_t i = 0; i < qb.per_object.size(); ++i)
    f << "quality," << i + 1 << ',' << qb.per_object[i] << '\n';
  for (std::size_t e = 0; e < qb.per_distance.size(); ++e)
    f << "distance," << e + 1 << ',' << qb.per_distance[e] << '\n';
  for (std::size_t w = 0; w < rb.size(); ++w)
    f << "reliability," << w + 1 << ',' << rb[w] << '\n';
  std::cout << "bcrb written for N=" << n << " K=" << k << " D=" << degree
            << "\n";
  return 0;
}

int cmd_experiment(const quite::ExperimentConfig& cfg) {
  quite::ExperimentResult res = quite::run_experiment(cfg);
  quite::emit_outputs(res, cfg, cfg.out_dir);
  std::cout << "wrote " << res.table.size() << " result rows to "
            << cfg.out_dir << "\n";
  for (const auto& e : res.errors) std::cerr << "grid-point error: " << e << "\n";
  return res.errors.empty() ? 0 : 1;
}

int cmd_compare(quite::ExperimentConfig cfg) {
  cfg.scenario = quite::Scenario::PerrVsN;
  if (cfg.estimators.empty()) cfg.estimators = {"quite", "quite_l1", "ag"};
  quite::ExperimentResult res = quite::run_experiment(cfg);
  quite::emit_outputs(res, cfg, cfg.out_dir);
  std::cout << "estimator comparison (" << quite::to_string(cfg.model)
            << ", eps=" << cfg.epsilon << ")\n";
  std::cout << "  N    alpha  estimator    error_prob  stderr\n";
  for (const auto& r : res.table) {
    if (r.metric != "error_prob") continue;
    std::printf("  %-4d %-6.3g %-12s %-11.4g %.4g\n", r.n, r.alpha,
                r.estimator.c_str(), r.value, r.stderr_);
  }
  for (const auto& e : res.errors) std::cerr << "grid-point error: " << e << "\n";
  return res.errors.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairwise-comparison ranking with heterogeneous workers"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", scenario, algorithm = "quite";
  std::string data_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_opt, scenario_opt;
  int n = 40, k = 40, degree = 20, per_edge = 20;
  bool trace = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", config_path, "JSON config file");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed = s; }, "root RNG seed");
    sub->add_option_function<std::string>(
        "--out", [&](std::string s) { out_opt = s; }, "output directory");
  };

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic crowd");
  add_common(sim);
  sim->add_option("--n", n, "number of objects");
  sim->add_option("--k", k, "number of workers");
  sim->add_option("--degree", degree, "graph degree D");
  sim->add_option("--per-edge", per_edge, "workers per edge M");

  CLI::App* est = app.add_subcommand("estimate", "run an estimator on files");
  add_common(est);
  est->add_option("--data", data_dir, "directory with graph/assignment/answers");
  est->add_option("--algorithm", algorithm, "quite | quite_l1 | ag");
  est->add_flag("--trace", trace, "write per-iteration trace CSV");

  CLI::App* bcrb = app.add_subcommand("bcrb", "compute the Bayesian bound");
  add_common(bcrb);
  bcrb->add_option("--n", n, "number of objects");
  bcrb->add_option("--k", k, "number of workers");
  bcrb->add_option("--degree", degree, "graph degree D");
  bcrb->add_option("--per-edge", per_edge, "workers per edge M");

  CLI::App* exp = app.add_subcommand("experiment", "Monte Carlo scenario run");
  add_common(exp);
  exp->add_option_function<std::string>(
      "--scenario", [&](std::string s) { scenario_opt = s; },
      "mse_vs_N | perr_vs_N | perr_vs_degree | two_stage_compare | bcrb_only");

  CLI::App* cmp = app.add_subcommand("compare", "QUITE vs AG head to head");
  add_common(cmp);

  CLI11_PARSE(app, argc, argv);

  try {
    quite::ExperimentConfig cfg =
        load_config(config_path, seed, out_opt, scenario_opt);
    std::string out = out_opt.value_or(cfg.out_dir.empty() ? out_dir
                                                           : cfg.out_dir);
    if (sim->parsed()) return cmd_simulate(cfg, n, k, degree, per_edge, out);
    if (est->parsed()) return cmd_estimate(cfg, data_dir, algorithm, out, trace);
    if (bcrb->parsed()) return cmd_bcrb(cfg, n, k, degree, per_edge, out);
    if (exp->parsed()) return cmd_experiment(cfg);
    if (cmp->parsed()) return cmd_compare(cfg);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
