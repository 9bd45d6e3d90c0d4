#include "quite/simulation.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace quite {

AnswerSet AnswerSet::from_entries(const Assignment& a,
                                  const std::vector<std::uint8_t>& answers) {
  AnswerSet w;
  w.n_edges = static_cast<int>(a.edge_workers.size());
  w.n_workers = a.n_workers;

  w.edge_off.assign(w.n_edges + 1, 0);
  for (int e = 0; e < w.n_edges; ++e)
    w.edge_off[e + 1] = w.edge_off[e] +
                        static_cast<std::int64_t>(a.edge_workers[e].size());
  if (w.edge_off.back() != static_cast<std::int64_t>(answers.size()))
    throw std::invalid_argument("answer count does not match assignment");

  w.edge_worker.resize(answers.size());
  w.edge_answer = answers;
  std::int64_t pos = 0;
  for (int e = 0; e < w.n_edges; ++e)
    for (int k : a.edge_workers[e]) w.edge_worker[pos++] = k;

  // transpose to the by-worker layout
  w.worker_off.assign(w.n_workers + 1, 0);
  for (int k : w.edge_worker) w.worker_off[k + 1]++;
  for (int k = 0; k < w.n_workers; ++k) w.worker_off[k + 1] += w.worker_off[k];
  w.worker_edge.resize(answers.size());
  w.worker_answer.resize(answers.size());
  std::vector<std::int64_t> cursor(w.worker_off.begin(), w.worker_off.end() - 1);
  for (int e = 0; e < w.n_edges; ++e)
    for (std::int64_t p = w.edge_off[e]; p < w.edge_off[e + 1]; ++p) {
      int k = w.edge_worker[p];
      w.worker_edge[cursor[k]] = e;
      w.worker_answer[cursor[k]] = w.edge_answer[p];
      ++cursor[k];
    }
  return w;
}

AnswerSet AnswerSet::merge(const AnswerSet& first, const AnswerSet& second) {
  if (first.n_workers != second.n_workers)
    throw std::invalid_argument("merge: worker pools differ");
  AnswerSet out;
  out.n_edges = first.n_edges + second.n_edges;
  out.n_workers = first.n_workers;
  out.edge_off.reserve(out.n_edges + 1);
  out.edge_off = first.edge_off;
  for (int e = 0; e < second.n_edges; ++e)
    out.edge_off.push_back(out.edge_off.back() + second.count(e));
  auto append = [](auto& dst, const auto& a, const auto& b) {
    dst = a;
    dst.insert(dst.end(), b.begin(), b.end());
  };
  append(out.edge_worker, first.edge_worker, second.edge_worker);
  append(out.edge_answer, first.edge_answer, second.edge_answer);

  out.worker_off.assign(out.n_workers + 1, 0);
  for (int k : out.edge_worker) out.worker_off[k + 1]++;
  for (int k = 0; k < out.n_workers; ++k)
    out.worker_off[k + 1] += out.worker_off[k];
  out.worker_edge.resize(out.edge_worker.size());
  out.worker_answer.resize(out.edge_worker.size());
  std::vector<std::int64_t> cursor(out.worker_off.begin(),
                                   out.worker_off.end() - 1);
  for (int e = 0; e < out.n_edges; ++e)
    for (std::int64_t p = out.edge_off[e]; p < out.edge_off[e + 1]; ++p) {
      int k = out.edge_worker[p];
      out.worker_edge[cursor[k]] = e;
      out.worker_answer[cursor[k]] = out.edge_answer[p];
      ++cursor[k];
    }
  return out;
}

GroundTruth sample_ground_truth(const Prior& fq, const Prior& frho, int n,
                                int k, std::mt19937_64& rng) {
  GroundTruth gt;
  gt.q = fq.sample_n(rng, n);
  gt.rho = frho.sample_n(rng, k);
  return gt;
}

AnswerSet generate_answers(const WorkerModel& model, const GroundTruth& gt,
                           const ComparisonGraph& g, const Assignment& a,
                           std::mt19937_64& rng) {
  if (static_cast<int>(gt.q.size()) != g.n_objects)
    throw std::invalid_argument("generate_answers: |q| != N");
  if (static_cast<int>(a.edge_workers.size()) != g.num_edges())
    throw std::invalid_argument("generate_answers: assignment/graph mismatch");
  if (static_cast<int>(gt.rho.size()) != a.n_workers)
    throw std::invalid_argument("generate_answers: |rho| != K");

  std::vector<std::uint8_t> answers;
  answers.reserve(a.total_evaluations());
  for (int e = 0; e < g.num_edges(); ++e) {
    double d = gt.q[g.edges[e].first] - gt.q[g.edges[e].second];
    for (int k : a.edge_workers[e]) {
      double p0 = model.F(gt.rho[k] * d);
      answers.push_back(bernoulli(rng, p0) ? 0 : 1);
    }
  }
  return AnswerSet::from_entries(a, answers);
}

void write_answers(std::ostream& os, const AnswerSet& w) {
  for (int e = 0; e < w.n_edges; ++e)
    for (std::int64_t p = w.edge_off[e]; p < w.edge_off[e + 1]; ++p)
      os << e + 1 << ' ' << w.edge_worker[p] + 1 << ' '
         << static_cast<int>(w.edge_answer[p]) << '\n';
}

AnswerSet read_answers(std::istream& is, const Assignment& a) {
  std::map<std::pair<int, int>, std::uint8_t> records;
  int e, k, v;
  while (is >> e >> k >> v) {
    if (v != 0 && v != 1) throw std::runtime_error("answers: w must be 0/1");
    records[{e - 1, k - 1}] = static_cast<std::uint8_t>(v);
  }
  std::vector<std::uint8_t> answers;
  answers.reserve(a.total_evaluations());
  for (int edge = 0; edge < static_cast<int>(a.edge_workers.size()); ++edge)
    for (int worker : a.edge_workers[edge]) {
      auto it = records.find({edge, worker});
      if (it == records.end())
        throw std::runtime_error("answers: missing record for assigned pair");
      answers.push_back(it->second);
    }
  return AnswerSet::from_entries(a, answers);
}

void write_ground_truth(std::ostream& qualities, std::ostream& reliabilities,
                        const GroundTruth& gt) {
  for (std::size_t i = 0; i < gt.q.size(); ++i)
    qualities << i + 1 << ' ' << gt.q[i] << '\n';
  for (std::size_t k = 0; k < gt.rho.size(); ++k)
    reliabilities << k + 1 << ' ' << gt.rho[k] << '\n';
}

}  // namespace quite
