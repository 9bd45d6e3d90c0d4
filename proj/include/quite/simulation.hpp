#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "quite/graph.hpp"
#include "quite/priors.hpp"
#include "quite/rng.hpp"
#include "quite/worker_model.hpp"

namespace quite {

struct GroundTruth {
  std::vector<double> q;    // object qualities
  std::vector<double> rho;  // worker reliabilities, all > 0
};

// Sparse binary answers w_{e,k}, stored twice for fast sweeps: grouped by
// edge (CSR) and by worker (CSC).  The layout mirrors the Assignment exactly.
struct AnswerSet {
  int n_edges = 0;
  int n_workers = 0;

  // by edge: entries [edge_off[e], edge_off[e+1]) hold (worker, answer)
  std::vector<std::int64_t> edge_off;
  std::vector<int> edge_worker;
  std::vector<std::uint8_t> edge_answer;

  // by worker: entries [worker_off[k], worker_off[k+1]) hold (edge, answer)
  std::vector<std::int64_t> worker_off;
  std::vector<int> worker_edge;
  std::vector<std::uint8_t> worker_answer;

  std::int64_t count(int e) const { return edge_off[e + 1] - edge_off[e]; }
  std::int64_t total() const { return static_cast<std::int64_t>(edge_worker.size()); }

  static AnswerSet from_entries(const Assignment& a,
                                const std::vector<std::uint8_t>& answers);

  // Merge two answer sets over disjoint edge sets (indices already remapped).
  static AnswerSet merge(const AnswerSet& first, const AnswerSet& second);
};

GroundTruth sample_ground_truth(const Prior& fq, const Prior& frho, int n,
                                int k, std::mt19937_64& rng);

// Each w_{e,k} is an independent Bernoulli draw with P(w=0) = F(rho_k d_e).
AnswerSet generate_answers(const WorkerModel& model, const GroundTruth& gt,
                           const ComparisonGraph& g, const Assignment& a,
                           std::mt19937_64& rng);

// Text format: one "e k w" record per line (1-based indices).
void write_answers(std::ostream& os, const AnswerSet& w);
AnswerSet read_answers(std::istream& is, const Assignment& a);

void write_ground_truth(std::ostream& qualities, std::ostream& reliabilities,
                        const GroundTruth& gt);

}  // namespace quite
