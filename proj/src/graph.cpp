#include "quite/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace quite {

bool ComparisonGraph::connected() const {
  if (n_objects <= 1) return true;
  std::vector<std::vector<int>> adj(n_objects);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<char> seen(n_objects, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == n_objects;
}

Eigen::MatrixXd ComparisonGraph::incidence_matrix() const {
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n_objects, num_edges());
  for (int e = 0; e < num_edges(); ++e) {
    gamma(edges[e].first, e) = 1.0;
    gamma(edges[e].second, e) = -1.0;
  }
  return gamma;
}

std::vector<double> ComparisonGraph::distances_from_qualities(
    const std::vector<double>& q) const {
  if (static_cast<int>(q.size()) != n_objects)
    throw std::invalid_argument("quality vector length != N");
  std::vector<double> d(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e)
    d[e] = q[edges[e].first] - q[edges[e].second];
  return d;
}

Assignment Assignment::from_edge_workers(int n_workers,
                                         std::vector<std::vector<int>> ew) {
  Assignment a;
  a.n_workers = n_workers;
  a.edge_workers = std::move(ew);
  a.worker_edges.assign(n_workers, {});
  for (std::size_t e = 0; e < a.edge_workers.size(); ++e)
    for (int k : a.edge_workers[e]) {
      if (k < 0 || k >= n_workers)
        throw std::invalid_argument("worker index out of range");
      a.worker_edges[k].push_back(static_cast<int>(e));
    }
  return a;
}

std::size_t Assignment::total_evaluations() const {
  std::size_t n = 0;
  for (const auto& w : edge_workers) n += w.size();
  return n;
}

ComparisonGraph random_regular_graph(int n, int degree, std::mt19937_64& rng,
                                     int max_retries) {
  if (degree <= 0 || degree >= n)
    throw std::invalid_argument("random_regular_graph: need 0 < D < N");
  if ((static_cast<long long>(n) * degree) % 2 != 0)
    throw std::invalid_argument("random_regular_graph: N*D must be even");

  std::vector<int> stubs(static_cast<std::size_t>(n) * degree);
  for (int v = 0; v < n; ++v)
    std::fill_n(stubs.begin() + static_cast<std::size_t>(v) * degree, degree, v);

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    // Fisher-Yates on the stub list, then pair consecutive stubs
    for (std::size_t i = stubs.size() - 1; i > 0; --i)
      std::swap(stubs[i], stubs[uniform_index(rng, i + 1)]);

    ComparisonGraph g;
    g.n_objects = n;
    g.edges.reserve(stubs.size() / 2);
    std::set<std::pair<int, int>> used;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int a = stubs[i], b = stubs[i + 1];
      if (a == b) { ok = false; break; }
      auto key = std::minmax(a, b);
      if (!used.insert(key).second) { ok = false; break; }
      g.edges.emplace_back(a, b);
    }
    if (ok && g.connected()) return g;
  }
  throw std::runtime_error(
      "random_regular_graph: no simple connected graph found within retries");
}

Assignment regular_assignment(const ComparisonGraph& g, int n_workers,
                              int per_edge, std::mt19937_64& rng) {
  const int e_count = g.num_edges();
  if (per_edge < 1 || per_edge > n_workers)
    throw std::invalid_argument("regular_assignment: need 1 <= M <= K");
  if ((static_cast<long long>(e_count) * per_edge) % n_workers != 0)
    throw std::invalid_argument("regular_assignment: E*M not divisible by K");

  std::vector<int> perm(n_workers);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size() - 1; i > 0; --i)
    std::swap(perm[i], perm[uniform_index(rng, i + 1)]);

  // circulant schedule: edge e gets slots [e*M, (e+1)*M) mod K of the
  // permuted worker list, giving exact marginals on both sides
  std::vector<std::vector<int>> ew(e_count);
  for (int e = 0; e < e_count; ++e) {
    ew[e].reserve(per_edge);
    long long base = static_cast<long long>(e) * per_edge;
    for (int t = 0; t < per_edge; ++t)
      ew[e].push_back(perm[(base + t) % n_workers]);
  }
  return Assignment::from_edge_workers(n_workers, std::move(ew));
}

void write_edge_list(std::ostream& os, const ComparisonGraph& g) {
  os << g.n_objects << ' ' << g.num_edges() << '\n';
  for (auto [i, j] : g.edges) os << i + 1 << ' ' << j + 1 << '\n';
}

ComparisonGraph read_edge_list(std::istream& is) {
  ComparisonGraph g;
  int e_count = 0;
  if (!(is >> g.n_objects >> e_count))
    throw std::runtime_error("edge list: bad header");
  g.edges.reserve(e_count);
  for (int e = 0; e < e_count; ++e) {
    int i, j;
    if (!(is >> i >> j)) throw std::runtime_error("edge list: truncated");
    if (i < 1 || j < 1 || i > g.n_objects || j > g.n_objects || i == j)
      throw std::runtime_error("edge list: invalid pair");
    g.edges.emplace_back(i - 1, j - 1);
  }
  return g;
}

void write_assignment(std::ostream& os, const Assignment& a) {
  for (const auto& workers : a.edge_workers) {
    for (std::size_t i = 0; i < workers.size(); ++i)
      os << (i ? " " : "") << workers[i] + 1;
    os << '\n';
  }
}

Assignment read_assignment(std::istream& is, int n_edges) {
  std::vector<std::vector<int>> ew(n_edges);
  int max_worker = 0;
  std::string line;
  for (int e = 0; e < n_edges; ++e) {
    if (!std::getline(is >> std::ws, line))
      throw std::runtime_error("assignment: truncated");
    std::istringstream ls(line);
    int k;
    while (ls >> k) {
      ew[e].push_back(k - 1);
      max_worker = std::max(max_worker, k);
    }
    if (ew[e].empty()) throw std::runtime_error("assignment: empty edge line");
  }
  return Assignment::from_edge_workers(max_worker, std::move(ew));
}

}  // namespace quite
