#pragma once

// Comparison schemes: no cooperation, SINR-greedy aperture selection
// without egress limits, and randomized egress admission.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "maas/problem.hpp"

namespace maas {

inline SharingAllocation no_comp(const SharingProblem& p) {
  return SharingAllocation::zeros(p);
}

// Top-min(L_A, L_R(k)) helpers by SINR for each user, ties by cell id;
// ignores the egress constraint.
inline SharingAllocation greedy_maas(const SharingProblem& p) {
  SharingAllocation a = SharingAllocation::zeros(p);
  for (int k = 0; k < p.scenario.num_users(); ++k) {
    const int deg = p.degree(k);
    std::vector<int> order(deg);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
      return p.scenario.sinr[p.ingress[k][lhs]][k] > p.scenario.sinr[p.ingress[k][rhs]][k];
    });
    int take = std::min(deg, static_cast<int>(std::floor(p.l_a)));
    for (int n = 0; n < take; ++n) a.x[p.var_offset[k] + order[n]] = 1.0;
  }
  return a;
}

// Users request their greedy helper sets; each helper cell grants the
// requests in a random order while the grant fits within L_Tbar.
inline SharingAllocation randomized_egress(const SharingProblem& p, std::uint64_t seed,
                                           bool fractional_topup = false) {
  SharingAllocation requests = greedy_maas(p);
  SharingAllocation a = SharingAllocation::zeros(p);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < p.scenario.num_cells(); ++i) {
    std::vector<std::pair<int, int>> pending;  // (user, flat index)
    for (const auto& [k, idx] : p.egress_vars[i])
      if (requests.x[idx] > 0.0) pending.emplace_back(k, idx);
    std::shuffle(pending.begin(), pending.end(), rng);
    double budget = p.l_t_bar;
    for (const auto& [k, idx] : pending) {
      double beta = p.scenario.users[k].beta;
      if (beta <= budget + 1e-12) {
        a.x[idx] = 1.0;
        budget -= beta;
      } else if (fractional_topup && budget > 1e-12) {
        a.x[idx] = budget / beta;
        budget = 0.0;
      }
    }
  }
  return a;
}

}  // namespace maas
