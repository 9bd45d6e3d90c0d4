#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support/test_common.hpp"

#include <algorithm>
#include <sstream>

#include "quite/simulation.hpp"

using quite::Assignment;
using quite::ComparisonGraph;
using quite::GroundTruth;
using quite::ModelKind;
using quite::Prior;
using quite::WorkerModel;

namespace {

// one-edge graph with `k` workers all assigned to it
std::pair<ComparisonGraph, Assignment> single_edge(int k) {
  ComparisonGraph g;
  g.n_objects = 2;
  g.edges = {{0, 1}};
  std::vector<std::vector<int>> ew(1);
  for (int i = 0; i < k; ++i) ew[0].push_back(i);
  return {g, Assignment::from_edge_workers(k, std::move(ew))};
}

}  // namespace

TEST_CASE("ground truth sampling: ranges, determinism, no ties") {
  Prior fq = Prior::uniform(0.0, 1.0);
  Prior frho = Prior::uniform(1.0, 20.0);
  auto g = quite::substream(5, quite::Stream::Qualities);
  GroundTruth gt = quite::sample_ground_truth(fq, frho, 200, 200, g);
  for (double q : gt.q) {
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
  }
  for (double r : gt.rho) {
    CHECK(r >= 1.0);
    CHECK(r <= 20.0);
  }
  auto g2 = quite::substream(5, quite::Stream::Qualities);
  GroundTruth gt2 = quite::sample_ground_truth(fq, frho, 200, 200, g2);
  CHECK(gt.q == gt2.q);
  CHECK(gt.rho == gt2.rho);

  // continuous law: a million draws stay tie-free
  auto g3 = quite::substream(6, quite::Stream::Qualities);
  std::vector<double> many = fq.sample_n(g3, 1000000);
  std::sort(many.begin(), many.end());
  CHECK(std::adjacent_find(many.begin(), many.end()) == many.end());
}

TEST_CASE("answers follow the Bernoulli law of the model") {
  const int k = 100000;
  auto [g, a] = single_edge(k);

  SUBCASE("zero distance gives a fair coin") {
    GroundTruth gt{{0.3, 0.3}, std::vector<double>(k, 5.0)};
    auto rng = quite::substream(8, quite::Stream::Answers);
    quite::AnswerSet w =
        quite::generate_answers(WorkerModel(ModelKind::Btl), gt, g, a, rng);
    double zeros = 0.0;
    for (auto v : w.edge_answer) zeros += (v == 0);
    CHECK(std::fabs(zeros / k - 0.5) < 0.01);
  }

  SUBCASE("rho=5, d=0.3 BTL matches the closed form") {
    GroundTruth gt{{0.65, 0.35}, std::vector<double>(k, 5.0)};
    auto rng = quite::substream(9, quite::Stream::Answers);
    quite::AnswerSet w =
        quite::generate_answers(WorkerModel(ModelKind::Btl), gt, g, a, rng);
    double zeros = 0.0;
    for (auto v : w.edge_answer) zeros += (v == 0);
    double target = std::exp(1.5) / (1.0 + std::exp(1.5));  // ~0.8176
    CHECK(std::fabs(zeros / k - target) < 0.01);
  }

  SUBCASE("zero-rate grows with reliability at fixed positive distance") {
    double prev = 0.0;
    for (double rho : {1.0, 5.0, 20.0}) {
      GroundTruth gt{{0.5, 0.2}, std::vector<double>(k, rho)};
      auto rng = quite::substream(10, quite::Stream::Answers,
                                  static_cast<std::uint64_t>(rho));
      quite::AnswerSet w =
          quite::generate_answers(WorkerModel(ModelKind::Btl), gt, g, a, rng);
      double zeros = 0.0;
      for (auto v : w.edge_answer) zeros += (v == 0);
      double rate = zeros / k;
      CHECK(rate > prev);
      prev = rate;
    }
  }
}

TEST_CASE("answer marginals match both outcomes within 3 standard errors") {
  const int k = 100000;
  auto [g, a] = single_edge(k);
  for (ModelKind kind : {ModelKind::Btl, ModelKind::Thurstone}) {
    GroundTruth gt{{0.7, 0.45}, std::vector<double>(k, 3.0)};
    auto rng = quite::substream(11, quite::Stream::Answers,
                                kind == ModelKind::Btl ? 0 : 1);
    quite::AnswerSet w = quite::generate_answers(WorkerModel(kind), gt, g, a, rng);
    double p0 = WorkerModel(kind).F(3.0 * 0.25);
    double zeros = 0.0;
    for (auto v : w.edge_answer) zeros += (v == 0);
    double se = std::sqrt(p0 * (1.0 - p0) / k);
    CHECK(std::fabs(zeros / k - p0) < 3.0 * se);
    CHECK(std::fabs((1.0 - zeros / k) - (1.0 - p0)) < 3.0 * se);
  }
}

TEST_CASE("answers of two workers on one edge are uncorrelated given truth") {
  const int trials = 100000;
  auto [g, a] = single_edge(2);
  GroundTruth gt{{0.6, 0.3}, {4.0, 9.0}};
  WorkerModel m(ModelKind::Btl);
  double s1 = 0, s2 = 0, s12 = 0;
  for (int t = 0; t < trials; ++t) {
    auto rng = quite::substream(12, quite::Stream::Answers, t);
    quite::AnswerSet w = quite::generate_answers(m, gt, g, a, rng);
    double w1 = w.edge_answer[0], w2 = w.edge_answer[1];
    s1 += w1;
    s2 += w2;
    s12 += w1 * w2;
  }
  double cov = s12 / trials - (s1 / trials) * (s2 / trials);
  CHECK(std::fabs(cov) < 3.0 * 0.25 / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("dimension mismatches are rejected") {
  auto [g, a] = single_edge(3);
  GroundTruth bad_q{{0.1}, {1.0, 1.0, 1.0}};
  auto rng = quite::substream(1, quite::Stream::Answers);
  CHECK_THROWS_AS(
      quite::generate_answers(WorkerModel(ModelKind::Btl), bad_q, g, a, rng),
      std::invalid_argument);
  GroundTruth bad_rho{{0.1, 0.2}, {1.0}};
  CHECK_THROWS_AS(
      quite::generate_answers(WorkerModel(ModelKind::Btl), bad_rho, g, a, rng),
      std::invalid_argument);
}

TEST_CASE("answers round-trip through the text format") {
  auto r = testutil::rng(10);
  ComparisonGraph g = quite::random_regular_graph(8, 4, r);
  Assignment a = quite::regular_assignment(g, 8, 4, r);
  GroundTruth gt = quite::sample_ground_truth(Prior::uniform(0, 1),
                                              Prior::uniform(1, 20), 8, 8, r);
  quite::AnswerSet w =
      quite::generate_answers(WorkerModel(ModelKind::Btl), gt, g, a, r);
  std::ostringstream os;
  quite::write_answers(os, w);
  std::istringstream is(os.str());
  quite::AnswerSet back = quite::read_answers(is, a);
  CHECK(back.edge_answer == w.edge_answer);
  CHECK(back.edge_worker == w.edge_worker);
  CHECK(back.worker_answer == w.worker_answer);
}

TEST_CASE("merge combines disjoint edge sets consistently") {
  auto r = testutil::rng(17);
  ComparisonGraph g1 = quite::random_regular_graph(6, 2, r);
  Assignment a1 = quite::regular_assignment(g1, 6, 3, r);
  GroundTruth gt = quite::sample_ground_truth(Prior::uniform(0, 1),
                                              Prior::uniform(1, 20), 6, 6, r);
  WorkerModel m(ModelKind::Btl);
  quite::AnswerSet w1 = quite::generate_answers(m, gt, g1, a1, r);
  quite::AnswerSet w2 = quite::generate_answers(m, gt, g1, a1, r);
  quite::AnswerSet u = quite::AnswerSet::merge(w1, w2);
  CHECK(u.n_edges == w1.n_edges + w2.n_edges);
  CHECK(u.total() == w1.total() + w2.total());
  // per-worker counts add up
  for (int k = 0; k < u.n_workers; ++k) {
    auto cnt = [](const quite::AnswerSet& w, int k) {
      return w.worker_off[k + 1] - w.worker_off[k];
    };
    CHECK(cnt(u, k) == cnt(w1, k) + cnt(w2, k));
  }
}
