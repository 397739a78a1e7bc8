#pragma once

// Per-user primal subproblem: exact maximization of the local Lagrangian
// over the box via price-metric ordering and a sequential threshold scan.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "maas/problem.hpp"

namespace maas {

struct PriceState {
  std::vector<double> psi;     // per-cell egress price, >= 0
  std::vector<double> lambda;  // per-user ingress price, >= 0
  double nu = 0.005;           // subgradient step size

  static PriceState init(const SharingProblem& p, double epsilon, double nu) {
    PriceState s;
    s.psi.assign(p.scenario.num_cells(), epsilon);
    s.lambda.assign(p.scenario.num_users(), 0.0);
    s.nu = nu;
    return s;
  }
};

struct UserPrimalResult {
  // x over the user's ingress neighborhood, aligned with problem.ingress[k].
  std::vector<double> x;
  // Helper cells with x > 0, in increasing metric order.
  std::vector<int> active_set;
  // Helper cell id of the single fractional entry, or -1 if none.
  int fractional_helper = -1;
};

// m_{i,k} = (beta_k psi_i + lambda_k) / (w_k beta_k S_{i->j}^k).
inline double metric(const SharingProblem& p, const PriceState& prices, int helper,
                     int user) {
  const auto& u = p.scenario.users[user];
  double s = p.scenario.sinr[helper][user];
  if (!(s > 0.0)) throw std::invalid_argument("metric requires helper SINR > 0");
  return (u.beta * prices.psi[helper] + prices.lambda[user]) / (u.weight * u.beta * s);
}

// Exact maximizer of the per-user Lagrangian over [0,1]^{|N_R(k)|}:
// sort helpers by increasing metric, fill x=1 while 1/g stays above the
// metric, close with at most one fractional entry, zero the rest.
inline UserPrimalResult solve_user(const SharingProblem& p, const PriceState& prices,
                                   int user) {
  const int deg = p.degree(user);
  const auto& u = p.scenario.users[user];
  UserPrimalResult res;
  res.x.assign(deg, 0.0);
  if (deg == 0) return res;

  std::vector<int> order(deg);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> m(deg);
  for (int n = 0; n < deg; ++n) m[n] = metric(p, prices, p.ingress[user][n], user);
  // Ties broken by helper cell id; ingress[k] is ascending so index order works.
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return m[a] < m[b]; });

  double g = 1.0 + p.scenario.sinr[u.serving_cell][user];
  for (int pos = 0; pos < deg; ++pos) {
    int n = order[pos];
    double s = p.scenario.sinr[p.ingress[user][n]][user];
    if (1.0 / (g + s) > m[n]) {
      res.x[n] = 1.0;
      res.active_set.push_back(p.ingress[user][n]);
      g += s;
      continue;
    }
    // First failing helper: fractional closure, everything after stays 0.
    double y = m[n] > 0.0 ? (1.0 / m[n] - g) / s : 1.0;
    y = std::clamp(y, 0.0, 1.0);
    if (y < 1e-12) y = 0.0;
    res.x[n] = y;
    if (y > 0.0) {
      res.active_set.push_back(p.ingress[user][n]);
      if (y < 1.0) res.fractional_helper = p.ingress[user][n];
    }
    break;
  }
  return res;
}

// Largest violation of the KKT sign pattern at the given allocation:
// x=1 needs 1/g >= m, x=0 needs 1/g <= m, fractional needs 1/g = m.
inline double kkt_residual(const SharingProblem& p, const PriceState& prices,
                           const SharingAllocation& a, int user) {
  double g = combined_snr(p, user, a);
  double worst = 0.0;
  for (int n = 0; n < p.degree(user); ++n) {
    double m = metric(p, prices, p.ingress[user][n], user);
    double x = a.x[p.var_offset[user] + n];
    double inv_g = 1.0 / g;
    double viol;
    if (x >= 1.0 - 1e-12)
      viol = std::max(0.0, m - inv_g);
    else if (x <= 1e-12)
      viol = std::max(0.0, inv_g - m);
    else
      viol = std::abs(inv_g - m);
    worst = std::max(worst, viol);
  }
  return worst;
}

// Primal sweep over all users against frozen prices.
inline SharingAllocation primal_sweep(const SharingProblem& p, const PriceState& prices) {
  SharingAllocation a = SharingAllocation::zeros(p);
  for (int k = 0; k < p.scenario.num_users(); ++k) {
    UserPrimalResult r = solve_user(p, prices, k);
    for (int n = 0; n < p.degree(k); ++n) a.x[p.var_offset[k] + n] = r.x[n];
  }
  return a;
}

}  // namespace maas
