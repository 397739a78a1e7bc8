#pragma once

// Ground-truth solvers for desk-scale validation: exact integer search by
// pruned enumeration, and a centralized solver for the convex relaxation
// (projected gradient ascent with Dykstra projections).

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "maas/baselines.hpp"
#include "maas/primal.hpp"
#include "maas/problem.hpp"

namespace maas {

struct BruteForceResult {
  SharingAllocation allocation;
  double objective = 0.0;
};

namespace detail {

inline double user_term(const SharingProblem& p, int k, double extra_snr) {
  const auto& u = p.scenario.users[k];
  return u.weight * u.beta *
         std::log(1.0 + p.scenario.sinr[u.serving_cell][k] + extra_snr);
}

}  // namespace detail

// Exact optimum of the integer NUM by depth-first enumeration over
// per-user helper subsets, pruning on egress demand and an optimistic
// suffix bound. Guarded by a total-bit cap unless forced.
inline BruteForceResult brute_force_integer(const SharingProblem& p, bool force = false) {
  int total_bits = 0;
  for (int k = 0; k < p.scenario.num_users(); ++k) total_bits += p.degree(k);
  if (!force && total_bits > 30)
    throw std::invalid_argument("brute_force_integer: instance too large (" +
                                std::to_string(total_bits) + " sharing bits > 30)");

  const int K = p.scenario.num_users();
  const int cap = static_cast<int>(std::floor(p.l_a));

  // Candidate subsets per user (bitmask over ingress[k], size <= cap),
  // ordered by decreasing utility term for tighter early incumbents.
  std::vector<std::vector<std::pair<double, unsigned>>> cand(K);
  for (int k = 0; k < K; ++k) {
    int deg = p.degree(k);
    for (unsigned mask = 0; mask < (1u << deg); ++mask) {
      if (std::popcount(mask) > cap) continue;
      double extra = 0.0;
      for (int n = 0; n < deg; ++n)
        if (mask & (1u << n)) extra += p.scenario.sinr[p.ingress[k][n]][k];
      cand[k].emplace_back(detail::user_term(p, k, extra), mask);
    }
    std::sort(cand[k].begin(), cand[k].end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
  }

  // Optimistic bound: best candidate term for each remaining user.
  std::vector<double> suffix_bound(K + 1, 0.0);
  for (int k = K - 1; k >= 0; --k)
    suffix_bound[k] = suffix_bound[k + 1] + (cand[k].empty() ? 0.0 : cand[k][0].first);

  std::vector<double> demand(p.scenario.num_cells(), 0.0);
  std::vector<unsigned> choice(K, 0), best_choice(K, 0);
  double best = -std::numeric_limits<double>::infinity();

  auto dfs = [&](auto&& self, int k, double acc) -> void {
    if (k == K) {
      if (acc > best) {
        best = acc;
        best_choice = choice;
      }
      return;
    }
    if (acc + suffix_bound[k] <= best + 1e-12) return;
    int deg = p.degree(k);
    double beta = p.scenario.users[k].beta;
    for (const auto& [term, mask] : cand[k]) {
      if (acc + term + suffix_bound[k + 1] <= best + 1e-12) break;
      bool ok = true;
      for (int n = 0; n < deg && ok; ++n)
        if (mask & (1u << n)) {
          int i = p.ingress[k][n];
          if (demand[i] + beta > p.l_t_bar + 1e-12) ok = false;
        }
      if (!ok) continue;
      for (int n = 0; n < deg; ++n)
        if (mask & (1u << n)) demand[p.ingress[k][n]] += beta;
      choice[k] = mask;
      self(self, k + 1, acc + term);
      for (int n = 0; n < deg; ++n)
        if (mask & (1u << n)) demand[p.ingress[k][n]] -= beta;
    }
  };
  dfs(dfs, 0, 0.0);

  BruteForceResult res;
  res.allocation = SharingAllocation::zeros(p);
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < p.degree(k); ++n)
      if (best_choice[k] & (1u << n)) res.allocation.x[p.var_offset[k] + n] = 1.0;
  res.objective = objective(p, res.allocation);
  return res;
}

// Dykstra alternating projection onto the intersection of the box, the
// per-user aperture halfspaces, and the per-cell egress halfspaces.
inline void project_feasible(const SharingProblem& p, std::vector<double>& x,
                             double tol = 1e-12, int max_cycles = 2000) {
  struct Halfspace {
    std::vector<int> idx;
    std::vector<double> coef;
    double bound;
    double norm2;
  };
  std::vector<Halfspace> hs;
  for (int k = 0; k < p.scenario.num_users(); ++k) {
    if (p.degree(k) <= p.l_a) continue;  // inactive within the box
    Halfspace h;
    for (int n = 0; n < p.degree(k); ++n) {
      h.idx.push_back(p.var_offset[k] + n);
      h.coef.push_back(1.0);
    }
    h.bound = p.l_a;
    h.norm2 = static_cast<double>(h.idx.size());
    hs.push_back(std::move(h));
  }
  for (int i = 0; i < p.scenario.num_cells(); ++i) {
    double total = 0.0;
    for (const auto& [k, idx] : p.egress_vars[i]) total += p.scenario.users[k].beta;
    if (total <= p.l_t_bar) continue;
    Halfspace h;
    h.norm2 = 0.0;
    for (const auto& [k, idx] : p.egress_vars[i]) {
      double b = p.scenario.users[k].beta;
      h.idx.push_back(idx);
      h.coef.push_back(b);
      h.norm2 += b * b;
    }
    h.bound = p.l_t_bar;
    hs.push_back(std::move(h));
  }

  const std::size_t n = x.size();
  const std::size_t num_sets = hs.size() + 1;  // halfspaces + box
  std::vector<std::vector<double>> incr(num_sets, std::vector<double>(n, 0.0));

  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    double change = 0.0;
    for (std::size_t s = 0; s < hs.size(); ++s) {
      const auto& h = hs[s];
      auto& q = incr[s];
      double dot = 0.0;
      for (std::size_t t = 0; t < h.idx.size(); ++t) {
        x[h.idx[t]] += q[h.idx[t]];
        dot += h.coef[t] * x[h.idx[t]];
      }
      double scale = std::max(0.0, (dot - h.bound) / h.norm2);
      for (std::size_t t = 0; t < h.idx.size(); ++t) {
        double y = x[h.idx[t]];
        x[h.idx[t]] = y - scale * h.coef[t];
        double new_q = y - x[h.idx[t]];
        change = std::max(change, std::abs(new_q - q[h.idx[t]]));
        q[h.idx[t]] = new_q;
      }
    }
    auto& qb = incr[hs.size()];
    for (std::size_t t = 0; t < n; ++t) {
      double y = x[t] + qb[t];
      x[t] = std::clamp(y, 0.0, 1.0);
      double new_q = y - x[t];
      change = std::max(change, std::abs(new_q - qb[t]));
      qb[t] = new_q;
    }
    if (change < tol) break;
  }
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
}

struct RelaxedResult {
  SharingAllocation allocation;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Exact per-user box maximizer of the local Lagrangian by cyclic
// coordinate ascent; independent of the metric-ordering rule.
inline std::vector<double> coordinate_ascent_user(const SharingProblem& p,
                                                  const PriceState& prices, int k,
                                                  int max_sweeps = 500) {
  const int deg = p.degree(k);
  const auto& u = p.scenario.users[k];
  std::vector<double> x(deg, 0.0), s(deg), m(deg);
  for (int n = 0; n < deg; ++n) {
    s[n] = p.scenario.sinr[p.ingress[k][n]][k];
    m[n] = (u.beta * prices.psi[p.ingress[k][n]] + prices.lambda[k]) /
           (u.weight * u.beta * s[n]);
  }
  double base = 1.0 + p.scenario.sinr[u.serving_cell][k];
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (int n = 0; n < deg; ++n) {
      double g_rest = base;
      for (int t = 0; t < deg; ++t)
        if (t != n) g_rest += s[t] * x[t];
      double xn = m[n] > 0.0 ? (1.0 / m[n] - g_rest) / s[n] : 1.0;
      xn = std::clamp(xn, 0.0, 1.0);
      moved = std::max(moved, std::abs(xn - x[n]));
      x[n] = xn;
    }
    if (moved < 1e-14) break;
  }
  return x;
}

// Rough nonnegative multiplier estimates for the gap certificate, from the
// stationarity relation on binding constraints.
inline PriceState estimate_multipliers(const SharingProblem& p,
                                       const SharingAllocation& a, double tol) {
  PriceState est;
  est.psi.assign(p.scenario.num_cells(), 0.0);
  est.lambda.assign(p.scenario.num_users(), 0.0);
  auto r = residuals(p, a);
  for (int pass = 0; pass < 4; ++pass) {
    for (int i = 0; i < p.scenario.num_cells(); ++i) {
      if (r.egress_slack[i] > 10.0 * tol) {
        est.psi[i] = 0.0;
        continue;
      }
      double best = 0.0;
      for (const auto& [k, idx] : p.egress_vars[i]) {
        if (a.x[idx] <= 1e-9) continue;
        const auto& u = p.scenario.users[k];
        double g = combined_snr(p, k, a);
        int helper_pos = idx - p.var_offset[k];
        double s = p.scenario.sinr[p.ingress[k][helper_pos]][k];
        double cand = (u.weight * u.beta * s / g - est.lambda[k]) / u.beta;
        best = std::max(best, cand);
      }
      est.psi[i] = std::max(0.0, best);
    }
    for (int k = 0; k < p.scenario.num_users(); ++k) {
      if (r.ingress_slack[k] > 10.0 * tol) {
        est.lambda[k] = 0.0;
        continue;
      }
      const auto& u = p.scenario.users[k];
      double g = combined_snr(p, k, a);
      double best = 0.0;
      for (int n = 0; n < p.degree(k); ++n) {
        if (a.x[p.var_offset[k] + n] <= 1e-9) continue;
        double s = p.scenario.sinr[p.ingress[k][n]][k];
        double cand = u.weight * u.beta * s / g - u.beta * est.psi[p.ingress[k][n]];
        best = std::max(best, cand);
      }
      est.lambda[k] = std::max(0.0, best);
    }
  }
  return est;
}

inline double dual_value_independent(const SharingProblem& p, const PriceState& prices) {
  double q = 0.0;
  for (int k = 0; k < p.scenario.num_users(); ++k) {
    const auto& u = p.scenario.users[k];
    auto xk = coordinate_ascent_user(p, prices, k);
    double g = 1.0 + p.scenario.sinr[u.serving_cell][k];
    double lin = 0.0;
    for (int n = 0; n < p.degree(k); ++n) {
      int i = p.ingress[k][n];
      g += p.scenario.sinr[i][k] * xk[n];
      lin += (u.beta * prices.psi[i] + prices.lambda[k]) * xk[n];
    }
    q += u.weight * u.beta * std::log(g) - lin + prices.lambda[k] * p.l_eff(k);
  }
  for (int i = 0; i < p.scenario.num_cells(); ++i) q += prices.psi[i] * p.l_t_bar;
  return q;
}

}  // namespace detail

// Centralized solve of the convex relaxation by projected gradient ascent
// with backtracking; certifies the result with a duality-gap estimate.
inline RelaxedResult centralized_relaxed(const SharingProblem& p, double tol = 1e-7,
                                         int max_iters = 20000) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  RelaxedResult res;
  res.allocation = SharingAllocation::zeros(p);
  std::vector<double>& x = res.allocation.x;
  if (x.empty()) {
    res.converged = true;
    res.objective = objective(p, res.allocation);
    res.duality_gap = 0.0;
    return res;
  }

  double f = objective(p, res.allocation);
  double step = 1.0;
  int settled = 0;
  for (int it = 1; it <= max_iters; ++it) {
    res.iterations = it;
    auto grad = objective_gradient(p, res.allocation);
    SharingAllocation trial = res.allocation;
    double f_new = f;
    double move2 = 0.0;
    double trial_infeas = 0.0;
    bool accepted = false;
    // Backtracking on the gradient-mapping sufficient increase test; moves
    // that fail to improve are rejected outright so the iterate is monotone.
    for (int bt = 0; bt < 60; ++bt) {
      trial.x = x;
      for (std::size_t t = 0; t < x.size(); ++t) trial.x[t] += step * grad[t];
      project_feasible(p, trial.x);
      move2 = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t) {
        double d = trial.x[t] - x[t];
        move2 += d * d;
      }
      f_new = objective(p, trial);
      if (move2 == 0.0) break;
      auto rt = residuals(p, trial);
      trial_infeas = std::max({rt.max_egress_violation(), rt.max_ingress_violation(),
                               rt.box_violation});
      // Far pre-projection points can exhaust the projection's cycle budget;
      // treat a still-infeasible trial as a failed step.
      if (trial_infeas <= tol && f_new >= f + 1e-4 / step * move2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    // Uphill but short of the sufficient-increase test still counts, as long
    // as the trial itself is feasible to projection accuracy.
    if (!accepted && f_new > f && trial_infeas <= tol) accepted = true;
    double gain = f_new - f;
    if (accepted) {
      x = trial.x;
      f = f_new;
      step = std::min(step * 1.3, 1e4);
    } else {
      step = 1.0;
    }

    // Converged once the gradient-projection line search stops producing
    // gains above roundoff: for a concave objective over a convex set a
    // stalled sweep from a unit step is the optimality certificate (up to
    // projection accuracy), and sub-floor gains cannot accumulate to more
    // than max_iters * floor.
    if (gain < 1e-12 * std::max(1.0, std::abs(f))) {
      auto r = residuals(p, res.allocation);
      double infeas = std::max({r.max_egress_violation(), r.max_ingress_violation(),
                                r.box_violation});
      if (infeas < tol)
        ++settled;
      else
        settled = 0;
    } else {
      settled = 0;
    }
    if (settled >= 3) {
      res.converged = true;
      break;
    }
  }
  res.objective = f;
  PriceState est = detail::estimate_multipliers(p, res.allocation, tol);
  res.duality_gap = detail::dual_value_independent(p, est) - res.objective;
  return res;
}

}  // namespace maas
