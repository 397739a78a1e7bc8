#pragma once

// LiquidMAAS outer loop: alternate exact primal sweeps with projected
// subgradient updates of the egress and ingress prices.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "maas/primal.hpp"

namespace maas {

enum class ConvergenceMode { paper, kkt };

struct SolverConfig {
  double nu = 0.005;           // price step size
  double epsilon_init = 1e-3;  // initial egress price
  int max_iters = 2000;
  double eps1 = 1e-3;  // ingress tolerance
  double eps2 = 1e-3;  // egress tolerance
  ConvergenceMode mode = ConvergenceMode::kkt;
  bool diminishing_step = false;  // nu_t = nu / sqrt(t)
  int recovery_window = 400;      // largest sliding window for ergodic recovery

  void validate() const {
    if (!(nu > 0.0)) throw std::invalid_argument("nu must be > 0");
    if (!(epsilon_init > 0.0)) throw std::invalid_argument("epsilon_init must be > 0");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (!(eps1 > 0.0 && eps2 > 0.0)) throw std::invalid_argument("tolerances must be > 0");
    if (recovery_window < 1) throw std::invalid_argument("recovery_window must be >= 1");
  }
};

struct SolverReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;
  std::vector<std::vector<double>> egress_demand_trace;  // per iteration, per cell
  std::vector<double> max_violation_trace;
  PriceState final_prices;
};

inline double update_ingress_price(const PriceState& prices, const SharingProblem& p,
                                   int user, double selected_count, double nu) {
  return std::max(prices.lambda[user] - nu * (p.l_eff(user) - selected_count), 0.0);
}

// Delta_i = L_Tbar - egress demand of cell i.
inline double egress_headroom(const SharingProblem& p, const SharingAllocation& a, int cell) {
  double demand = 0.0;
  for (const auto& [k, idx] : p.egress_vars[cell])
    demand += p.scenario.users[k].beta * a.x[idx];
  return p.l_t_bar - demand;
}

inline double update_egress_price(const PriceState& prices, int cell, double headroom,
                                  double nu) {
  return std::max(prices.psi[cell] - nu * headroom, 0.0);
}

inline bool check_convergence(const SharingProblem& p, const SharingAllocation& a,
                              const PriceState& prices, const SolverConfig& cfg) {
  auto r = residuals(p, a);
  if (cfg.mode == ConvergenceMode::paper) {
    // Literal step-6 test: apertures fill to L_R(k) and headrooms vanish.
    for (int k = 0; k < p.scenario.num_users(); ++k)
      if (std::abs(p.degree(k) - (p.l_eff(k) - r.ingress_slack[k])) >= cfg.eps1) return false;
    for (double slack : r.egress_slack)
      if (std::abs(slack) >= cfg.eps2) return false;
    return true;
  }
  // kkt mode: primal feasibility, complementary slackness, and per-user
  // stationarity of the current allocation at the current prices.
  if (r.max_egress_violation() > cfg.eps2 || r.max_ingress_violation() > cfg.eps1 ||
      r.box_violation > cfg.eps1)
    return false;
  for (int i = 0; i < p.scenario.num_cells(); ++i)
    if (prices.psi[i] > cfg.eps2 && std::abs(r.egress_slack[i]) > cfg.eps2) return false;
  for (int k = 0; k < p.scenario.num_users(); ++k) {
    if (prices.lambda[k] > cfg.eps1 && std::abs(r.ingress_slack[k]) > cfg.eps1) return false;
    if (kkt_residual(p, prices, a, k) > cfg.eps1) return false;
  }
  return true;
}

// Lagrangian dual value at the given prices; the primal sweep is the exact
// inner maximizer, so this evaluates q(lambda, psi).
inline double dual_value(const SharingProblem& p, const PriceState& prices) {
  SharingAllocation a = primal_sweep(p, prices);
  double q = objective(p, a);
  for (int k = 0; k < p.scenario.num_users(); ++k) {
    double sum = 0.0;
    for (int n = 0; n < p.degree(k); ++n) sum += a.x[p.var_offset[k] + n];
    q += prices.lambda[k] * (p.l_eff(k) - sum);
  }
  for (int i = 0; i < p.scenario.num_cells(); ++i)
    q += prices.psi[i] * egress_headroom(p, a, i);
  return q;
}

struct SolveResult {
  SharingAllocation allocation;
  SolverReport report;
};

inline SolveResult run(const SharingProblem& p, const SolverConfig& cfg) {
  cfg.validate();
  PriceState prices = PriceState::init(p, cfg.epsilon_init, cfg.nu);
  SolverReport report;
  SharingAllocation last = SharingAllocation::zeros(p);
  SharingAllocation best = last;
  double best_obj = -std::numeric_limits<double>::infinity();
  bool have_feasible = false;

  // Ergodic primal recovery. When the dual optimum sits on a metric tie, the
  // sweep flips between maximizer-set endpoints and never meets the
  // tolerances by itself; the sliding-window average of (allocation, prices)
  // lies on the flat segment between them, and the telescoped price updates
  // drive its residual slack to (price drift)/(nu * window). Several window
  // lengths are checked from one cumulative sum since the drift tolerated
  // grows linearly with the window.
  const int window = cfg.recovery_window;
  std::vector<int> windows;
  for (int w = window; w >= 1 && static_cast<int>(windows.size()) < 4; w /= 2)
    windows.push_back(w);
  std::sort(windows.begin(), windows.end());
  const std::size_t num_x = last.x.size();
  const std::size_t num_cells = prices.psi.size();
  const std::size_t state_len = num_x + num_cells + prices.lambda.size();
  std::vector<double> cum(state_len, 0.0);
  std::vector<std::vector<double>> cum_ring(window + 1);
  cum_ring[0] = cum;  // cumulative sum after zero sweeps

  // Once an averaged candidate passes, keep iterating for a short grace
  // period in case the raw sweep converges on its own: the raw sweep has at
  // most one fractional variable per user, which the average does not.
  bool have_pending = false;
  SharingAllocation pending_alloc = last;
  PriceState pending_prices = prices;
  int pending_iter = 0;
  int grace_deadline = cfg.max_iters;

  for (int t = 1; t <= cfg.max_iters; ++t) {
    double nu_t = cfg.diminishing_step ? cfg.nu / std::sqrt(static_cast<double>(t)) : cfg.nu;
    last = primal_sweep(p, prices);

    auto r = residuals(p, last);
    double obj = objective(p, last);
    report.objective_trace.push_back(obj);
    std::vector<double> demand(r.egress_slack.size());
    for (std::size_t i = 0; i < demand.size(); ++i) demand[i] = p.l_t_bar - r.egress_slack[i];
    report.egress_demand_trace.push_back(std::move(demand));
    report.max_violation_trace.push_back(
        std::max(r.max_egress_violation(), r.max_ingress_violation()));
    report.iterations = t;

    bool feasible = r.max_egress_violation() <= cfg.eps2 &&
                    r.max_ingress_violation() <= cfg.eps1;
    if (feasible && (!have_feasible || obj > best_obj)) {
      best = last;
      best_obj = obj;
      have_feasible = true;
    }

    if (check_convergence(p, last, prices, cfg)) {
      report.converged = true;
      report.final_prices = prices;
      return {last, std::move(report)};
    }

    if (have_pending && t >= grace_deadline) break;

    if (cfg.mode == ConvergenceMode::kkt && !have_pending) {
      for (std::size_t v = 0; v < num_x; ++v) cum[v] += last.x[v];
      for (std::size_t i = 0; i < num_cells; ++i) cum[num_x + i] += prices.psi[i];
      for (std::size_t k = 0; k < prices.lambda.size(); ++k)
        cum[num_x + num_cells + k] += prices.lambda[k];
      cum_ring[t % (window + 1)] = cum;

      for (int w : windows) {
        if (t < w) continue;
        const std::vector<double>& base = cum_ring[(t - w) % (window + 1)];
        SharingAllocation avg = last;
        PriceState avg_prices = prices;
        for (std::size_t v = 0; v < num_x; ++v) avg.x[v] = (cum[v] - base[v]) / w;
        for (std::size_t i = 0; i < num_cells; ++i)
          avg_prices.psi[i] = (cum[num_x + i] - base[num_x + i]) / w;
        for (std::size_t k = 0; k < prices.lambda.size(); ++k)
          avg_prices.lambda[k] =
              (cum[num_x + num_cells + k] - base[num_x + num_cells + k]) / w;
        if (check_convergence(p, avg, avg_prices, cfg)) {
          have_pending = true;
          pending_alloc = avg;
          pending_prices = std::move(avg_prices);
          pending_iter = t;
          grace_deadline = std::min(cfg.max_iters, t + std::max(1, t / 4));
          break;
        }
        auto ra = residuals(p, avg);
        if (ra.max_egress_violation() <= cfg.eps2 && ra.max_ingress_violation() <= cfg.eps1) {
          double avg_obj = objective(p, avg);
          if (!have_feasible || avg_obj > best_obj) {
            best = avg;
            best_obj = avg_obj;
            have_feasible = true;
          }
        }
      }
    }

    for (int k = 0; k < p.scenario.num_users(); ++k) {
      double sum = 0.0;
      for (int n = 0; n < p.degree(k); ++n) sum += last.x[p.var_offset[k] + n];
      prices.lambda[k] = update_ingress_price(prices, p, k, sum, nu_t);
    }
    for (int i = 0; i < p.scenario.num_cells(); ++i)
      prices.psi[i] = update_egress_price(prices, i, r.egress_slack[i], nu_t);
  }

  if (have_pending) {
    report.converged = true;
    report.iterations = pending_iter;
    report.objective_trace.resize(pending_iter);
    report.egress_demand_trace.resize(pending_iter);
    report.max_violation_trace.resize(pending_iter);
    report.final_prices = std::move(pending_prices);
    return {pending_alloc, std::move(report)};
  }
  report.final_prices = prices;
  return {have_feasible ? best : last, std::move(report)};
}

}  // namespace maas
