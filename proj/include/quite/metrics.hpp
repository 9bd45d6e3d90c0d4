#pragma once

#include <utility>
#include <vector>

namespace quite {

// Permutation of object indices, best first; ties broken by lower index.
std::vector<int> ranking_from_qualities(const std::vector<double>& q_hat);

// True iff no pair with true gap q_i > q_j + eps is inverted in the ranking.
// Single sweep over the ranking with a running minimum: O(N log N) overall
// including the sort that produced the ranking.
bool is_epsilon_quality(const std::vector<int>& ranking,
                        const std::vector<double>& q_true, double eps);

// Mean over objects of (A q_hat_i + B - q_i)^2 with B = q_true_N, the LS
// reference value; the reference object contributes zero by construction.
double affine_adjusted_mse(const std::vector<double>& q_hat,
                           const std::vector<double>& q_true, double scale);

// Mean over calibration trials of the per-trial MSE-minimizing scale
// A_t = sum q_hat (q - B) / sum q_hat^2, floored at 1e-6.
double calibrate_scale(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>&
        trials);

}  // namespace quite
