#pragma once

// NUM instance evaluation: allocation storage, combined SNR metric,
// weighted log-utility objective, gradient, and constraint residuals.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "maas/scenario.hpp"

namespace maas {

// Sharing allocation x_{i->j}^k over the problem's flat variable index.
// Only pairs (helper i, user k) with i in N_R(k) have a slot, so the flat
// vector is the sparse support.
struct SharingAllocation {
  std::vector<double> x;

  static SharingAllocation zeros(const SharingProblem& p) {
    SharingAllocation a;
    a.x.assign(p.num_vars(), 0.0);
    return a;
  }

  double get(const SharingProblem& p, int helper, int user) const {
    for (int n = 0; n < p.degree(user); ++n)
      if (p.ingress[user][n] == helper) return x[p.var_offset[user] + n];
    throw std::out_of_range("helper not in user's ingress neighborhood");
  }

  void set(const SharingProblem& p, int helper, int user, double v) {
    for (int n = 0; n < p.degree(user); ++n)
      if (p.ingress[user][n] == helper) {
        x[p.var_offset[user] + n] = v;
        return;
      }
    throw std::out_of_range("helper not in user's ingress neighborhood");
  }
};

struct ConstraintResiduals {
  std::vector<double> ingress_slack;  // per user: L_eff(k) - sum_i x
  std::vector<double> egress_slack;   // per cell: L_Tbar - sum beta x
  double box_violation = 0.0;         // max(-x, x-1, 0) over entries

  double max_ingress_violation() const {
    double v = 0.0;
    for (double s : ingress_slack) v = std::max(v, -s);
    return v;
  }
  double max_egress_violation() const {
    double v = 0.0;
    for (double s : egress_slack) v = std::max(v, -s);
    return v;
  }
};

// g(x_k) = 1 + serving SINR + sum over helpers of SINR * x.
inline double combined_snr(const SharingProblem& p, int user, const SharingAllocation& a) {
  const auto& u = p.scenario.users[user];
  double g = 1.0 + p.scenario.sinr[u.serving_cell][user];
  for (int n = 0; n < p.degree(user); ++n)
    g += p.scenario.sinr[p.ingress[user][n]][user] * a.x[p.var_offset[user] + n];
  return g;
}

// Weighted sum rate in nats: sum_k w_k beta_k log g(x_k).
inline double objective(const SharingProblem& p, const SharingAllocation& a) {
  double obj = 0.0;
  for (int k = 0; k < p.scenario.num_users(); ++k) {
    const auto& u = p.scenario.users[k];
    obj += u.weight * u.beta * std::log(combined_snr(p, k, a));
  }
  return obj;
}

// d obj / d x_{i->j}^k = w_k beta_k S_{i->j}^k / g(x_k), flat layout.
inline std::vector<double> objective_gradient(const SharingProblem& p,
                                              const SharingAllocation& a) {
  std::vector<double> grad(p.num_vars());
  for (int k = 0; k < p.scenario.num_users(); ++k) {
    const auto& u = p.scenario.users[k];
    double g = combined_snr(p, k, a);
    for (int n = 0; n < p.degree(k); ++n)
      grad[p.var_offset[k] + n] = u.weight * u.beta * p.scenario.sinr[p.ingress[k][n]][k] / g;
  }
  return grad;
}

// Per-cell egress demand: sum over helped users of beta * x.
inline std::vector<double> egress_demand(const SharingProblem& p, const SharingAllocation& a) {
  std::vector<double> demand(p.scenario.num_cells(), 0.0);
  for (int i = 0; i < p.scenario.num_cells(); ++i)
    for (const auto& [k, idx] : p.egress_vars[i])
      demand[i] += p.scenario.users[k].beta * a.x[idx];
  return demand;
}

inline ConstraintResiduals residuals(const SharingProblem& p, const SharingAllocation& a) {
  ConstraintResiduals r;
  r.ingress_slack.resize(p.scenario.num_users());
  for (int k = 0; k < p.scenario.num_users(); ++k) {
    double sum = 0.0;
    for (int n = 0; n < p.degree(k); ++n) sum += a.x[p.var_offset[k] + n];
    r.ingress_slack[k] = p.l_eff(k) - sum;
  }
  auto demand = egress_demand(p, a);
  r.egress_slack.resize(demand.size());
  for (std::size_t i = 0; i < demand.size(); ++i) r.egress_slack[i] = p.l_t_bar - demand[i];
  for (double v : a.x) r.box_violation = std::max({r.box_violation, -v, v - 1.0});
  return r;
}

inline bool is_feasible(const SharingProblem& p, const SharingAllocation& a,
                        double tol = 1e-6) {
  if (tol < 0.0) throw std::invalid_argument("tol must be >= 0");
  auto r = residuals(p, a);
  return r.max_ingress_violation() <= tol && r.max_egress_violation() <= tol &&
         r.box_violation <= tol;
}

}  // namespace maas
