#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "quite/rng.hpp"

namespace quite {

// Undirected comparison graph: objects are nodes, evaluated pairs are edges.
// Edge e is stored as the ordered pair (i_e, j_e), 0-based internally; the
// implied incidence matrix has +1 at (i_e, e) and -1 at (j_e, e).
struct ComparisonGraph {
  int n_objects = 0;
  std::vector<std::pair<int, int>> edges;

  int num_edges() const { return static_cast<int>(edges.size()); }
  bool connected() const;

  // Dense N x E signed incidence matrix.
  Eigen::MatrixXd incidence_matrix() const;

  // d_e = q_{i_e} - q_{j_e}.
  std::vector<double> distances_from_qualities(
      const std::vector<double>& q) const;
};

// Worker-to-edge allocation; the two index maps stay mutually consistent.
struct Assignment {
  int n_workers = 0;
  std::vector<std::vector<int>> edge_workers;  // per edge: set K_e
  std::vector<std::vector<int>> worker_edges;  // per worker: set E_k (derived)

  static Assignment from_edge_workers(int n_workers,
                                      std::vector<std::vector<int>> ew);
  std::size_t total_evaluations() const;
};

// Simple connected D-regular graph via the pairing model, rejecting
// self-loops, duplicate pairs and disconnected outcomes.
ComparisonGraph random_regular_graph(int n, int degree, std::mt19937_64& rng,
                                     int max_retries = 1000);

// Regular allocation: every edge gets exactly `per_edge` distinct workers and
// every worker gets exactly E*per_edge/K edges (the divisibility is checked).
// Built from a circulant schedule over a random worker permutation.
Assignment regular_assignment(const ComparisonGraph& g, int n_workers,
                              int per_edge, std::mt19937_64& rng);

// Text formats: edge list is "N E" header then one "i j" pair per line
// (1-based); assignment is one line per edge with worker indices (1-based).
void write_edge_list(std::ostream& os, const ComparisonGraph& g);
ComparisonGraph read_edge_list(std::istream& is);
void write_assignment(std::ostream& os, const Assignment& a);
Assignment read_assignment(std::istream& is, int n_edges);

}  // namespace quite
