#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support/test_common.hpp"

#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "quite/graph.hpp"

using quite::Assignment;
using quite::ComparisonGraph;

TEST_CASE("random regular graph basics") {
  auto g = testutil::rng(1);
  ComparisonGraph c4 = quite::random_regular_graph(4, 2, g);
  CHECK(c4.num_edges() == 4);
  CHECK(c4.connected());
  std::vector<int> deg(4, 0);
  for (auto [i, j] : c4.edges) {
    ++deg[i];
    ++deg[j];
  }
  for (int d : deg) CHECK(d == 2);  // the 4-cycle is forced

  ComparisonGraph big = quite::random_regular_graph(40, 20, g);
  CHECK(big.num_edges() == 400);
  CHECK(big.connected());

  CHECK_THROWS_AS(quite::random_regular_graph(5, 3, g), std::invalid_argument);
  CHECK_THROWS_AS(quite::random_regular_graph(4, 4, g), std::invalid_argument);
  CHECK_THROWS_AS(quite::random_regular_graph(4, 0, g), std::invalid_argument);
}

TEST_CASE("incidence matrix structure") {
  ComparisonGraph g;
  g.n_objects = 2;
  g.edges = {{0, 1}};
  Eigen::MatrixXd gamma = g.incidence_matrix();
  CHECK(gamma(0, 0) == 1.0);
  CHECK(gamma(1, 0) == -1.0);

  auto r = testutil::rng(5);
  ComparisonGraph big = quite::random_regular_graph(12, 4, r);
  Eigen::MatrixXd G = big.incidence_matrix();
  // columns sum to zero with exactly two nonzeros
  for (int e = 0; e < big.num_edges(); ++e) {
    CHECK(G.col(e).sum() == doctest::Approx(0.0));
    CHECK((G.col(e).array() != 0.0).count() == 2);
  }
  // (Gamma^T q)_e = q_i - q_j, checked by direct indexing
  std::vector<double> q(12);
  for (auto& v : q) v = quite::uniform(r, -2.0, 2.0);
  Eigen::VectorXd qe = Eigen::Map<Eigen::VectorXd>(q.data(), 12);
  Eigen::VectorXd d = G.transpose() * qe;
  auto dv = big.distances_from_qualities(q);
  for (int e = 0; e < big.num_edges(); ++e) {
    CHECK(d(e) == doctest::Approx(q[big.edges[e].first] -
                                  q[big.edges[e].second]));
    CHECK(dv[e] == doctest::Approx(d(e)));
  }
}

TEST_CASE("incidence rank is N-1 with the all-ones nullspace") {
  auto r = testutil::rng(4);
  for (int n : {4, 6, 9}) {
    ComparisonGraph g = quite::random_regular_graph(n, 2, r);
    Eigen::MatrixXd G = g.incidence_matrix();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    CHECK(lu.rank() == n - 1);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    CHECK((G.transpose() * ones).norm() < 1e-12);
  }
}

TEST_CASE("distances from qualities") {
  auto r = testutil::rng(6);
  ComparisonGraph c4 = quite::random_regular_graph(4, 2, r);
  std::vector<double> zero(4, 0.0);
  for (double d : c4.distances_from_qualities(zero)) CHECK(d == 0.0);
  std::vector<double> q = {1, 2, 3, 4};
  auto d = c4.distances_from_qualities(q);
  for (int e = 0; e < 4; ++e)
    CHECK(d[e] == q[c4.edges[e].first] - q[c4.edges[e].second]);
  CHECK_THROWS_AS(c4.distances_from_qualities({1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("regular assignment marginals are exact") {
  auto r = testutil::rng(9);
  ComparisonGraph c4 = quite::random_regular_graph(4, 2, r);

  Assignment all = quite::regular_assignment(c4, 4, 4, r);
  for (const auto& ws : all.edge_workers) CHECK(ws.size() == 4);
  for (const auto& es : all.worker_edges) CHECK(es.size() == 4);

  ComparisonGraph big = quite::random_regular_graph(40, 20, r);
  Assignment a = quite::regular_assignment(big, 40, 20, r);
  for (const auto& ws : a.edge_workers) CHECK(ws.size() == 20);
  for (const auto& es : a.worker_edges) CHECK(es.size() == 200);

  CHECK_THROWS_AS(quite::regular_assignment(c4, 3, 2, r),
                  std::invalid_argument);

  // random feasible instances keep exact marginals on both sides
  for (int trial = 0; trial < 100; ++trial) {
    int n = 4 + 2 * static_cast<int>(quite::uniform_index(r, 5));  // 4..12
    ComparisonGraph g = quite::random_regular_graph(n, 2, r);
    int e = g.num_edges();
    int k = e;  // E*M % K == 0 for any M
    int m = 1 + static_cast<int>(quite::uniform_index(r, k));
    Assignment inst = quite::regular_assignment(g, k, m, r);
    for (const auto& ws : inst.edge_workers) {
      CHECK(static_cast<int>(ws.size()) == m);
      CHECK(std::set<int>(ws.begin(), ws.end()).size() == ws.size());
    }
    for (const auto& es : inst.worker_edges)
      CHECK(static_cast<int>(es.size()) == e * m / k);
  }
}

TEST_CASE("edge list and assignment round-trip through text") {
  auto r = testutil::rng(13);
  ComparisonGraph g = quite::random_regular_graph(10, 4, r);
  std::ostringstream os;
  quite::write_edge_list(os, g);
  std::istringstream is(os.str());
  ComparisonGraph back = quite::read_edge_list(is);
  CHECK(back.n_objects == g.n_objects);
  CHECK(back.edges == g.edges);

  Assignment a = quite::regular_assignment(g, 10, 5, r);
  std::ostringstream oa;
  quite::write_assignment(oa, a);
  std::istringstream ia(oa.str());
  Assignment aback = quite::read_assignment(ia, g.num_edges());
  CHECK(aback.edge_workers == a.edge_workers);
}
