#include "quite/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace quite {

std::vector<int> ranking_from_qualities(const std::vector<double>& q_hat) {
  for (double v : q_hat)
    if (!std::isfinite(v))
      throw std::runtime_error("ranking: non-finite quality");
  std::vector<int> order(q_hat.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return q_hat[a] > q_hat[b]; });
  return order;
}

bool is_epsilon_quality(const std::vector<int>& ranking,
                        const std::vector<double>& q_true, double eps) {
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  // a violation is a later-ranked object whose true quality exceeds the
  // running minimum of earlier-ranked ones by more than eps
  double running_min = std::numeric_limits<double>::infinity();
  for (int idx : ranking) {
    double q = q_true[idx];
    if (q > running_min + eps) return false;
    running_min = std::min(running_min, q);
  }
  return true;
}

double affine_adjusted_mse(const std::vector<double>& q_hat,
                           const std::vector<double>& q_true, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  if (q_hat.size() != q_true.size() || q_hat.empty())
    throw std::invalid_argument("affine_adjusted_mse: size mismatch");
  double offset = q_true.back();
  double acc = 0.0;
  for (std::size_t i = 0; i < q_hat.size(); ++i) {
    double err = scale * q_hat[i] + offset - q_true[i];
    acc += err * err;
  }
  return acc / static_cast<double>(q_hat.size());
}

double calibrate_scale(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>&
        trials) {
  if (trials.empty()) throw std::invalid_argument("calibrate_scale: no trials");
  double sum = 0.0;
  int used = 0;
  for (const auto& [q_hat, q_true] : trials) {
    double offset = q_true.back();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < q_hat.size(); ++i) {
      num += q_hat[i] * (q_true[i] - offset);
      den += q_hat[i] * q_hat[i];
    }
    if (den == 0.0) continue;  // degenerate all-zero estimate, skip
    sum += num / den;
    ++used;
  }
  if (used == 0) throw std::runtime_error("calibrate_scale: all trials degenerate");
  return std::max(sum / used, 1e-6);
}

}  // namespace quite
