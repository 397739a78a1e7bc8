// End-to-end acceptance suite: one pass/fail line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "maas/maas.hpp"

using namespace maas;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL") << " — "
            << detail << "\n";
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Small instance with the egress limit set at the median greedy demand, so
// roughly half the cells bind.
SharingProblem small_binding_instance(std::uint64_t seed) {
  auto p = maas::testing::random_problem(10, 3, seed, 2.0, 1.0);
  auto demand = egress_demand(p, greedy_maas(p));
  std::vector<double> sorted = demand;
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  double median = 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  p.l_t_bar = std::max(0.05, median);
  return p;
}

SolverConfig accepted_solver(double l_t_bar, double nu, bool diminishing, int max_iters) {
  SolverConfig cfg;
  cfg.nu = nu;
  cfg.diminishing_step = diminishing;
  cfg.max_iters = max_iters;
  cfg.eps1 = 1e-3;
  cfg.eps2 = 1e-3 * l_t_bar;
  cfg.mode = ConvergenceMode::kkt;
  return cfg;
}

int fractional_count(const SharingProblem& p, const SharingAllocation& a, int user) {
  int n_frac = 0;
  for (int n = 0; n < p.degree(user); ++n) {
    double x = a.x[p.var_offset[user] + n];
    if (x > 1e-9 && x < 1.0 - 1e-9) ++n_frac;
  }
  return n_frac;
}

}  // namespace

// Criteria 1-3: oracle equivalence, integer structure, and feasibility at
// convergence on 20 small binding instances.
static void criteria_1_2_3() {
  auto t0 = std::chrono::steady_clock::now();
  double worst_rel = 0.0;
  int frac_violations = 0;
  double worst_egress = 0.0, worst_ingress = 0.0;
  bool all_converged = true;
  double worst_eps2 = 1.0;

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto p = small_binding_instance(seed);
    // The reference value stabilizes well inside the comparison tolerance by
    // 5000 iterations; on degenerate active sets the final creep toward the
    // convergence flag costs minutes without moving the objective.
    auto relaxed = centralized_relaxed(p, 1e-7, 5000);
    auto cfg = accepted_solver(p.l_t_bar, 0.001, true, 150000);
    auto res = run(p, cfg);
    all_converged = all_converged && res.report.converged;

    double rel = std::abs(relaxed.objective - objective(p, res.allocation)) /
                 std::abs(relaxed.objective);
    worst_rel = std::max(worst_rel, rel);

    for (int k = 0; k < p.scenario.num_users(); ++k)
      if (fractional_count(p, res.allocation, k) > 1) ++frac_violations;

    auto r = residuals(p, res.allocation);
    worst_egress = std::max(worst_egress, r.max_egress_violation() / p.l_t_bar);
    worst_ingress = std::max(worst_ingress, r.max_ingress_violation());
    worst_eps2 = std::min(worst_eps2, p.l_t_bar);
  }
  double secs = seconds_since(t0);

  report(1, all_converged && worst_rel <= 1e-3 && secs < 60.0,
         "relaxed-oracle equivalence: worst relative gap " + format_sig(worst_rel, 3) +
             " (limit 1e-3), " + format_sig(secs, 3) + " s (limit 60)");
  report(2, frac_violations == 0,
         "integer structure: " + std::to_string(frac_violations) +
             " users with >1 fractional variable (limit 0)");
  report(3, worst_egress <= 1e-3 && worst_ingress <= 1e-3,
         "feasibility at convergence: egress " + format_sig(worst_egress, 3) +
             " x L_Tbar, ingress " + format_sig(worst_ingress, 3) + " (limits 1e-3)");
}

// Criterion 4: brute-force agreement on tiny instances whose relaxed
// optimum is integral.
static void criterion_4() {
  int found = 0;
  double worst_rel = 0.0;
  bool ok = true;
  for (std::uint64_t seed = 100; seed < 400 && found < 10; ++seed) {
    auto p = maas::testing::random_problem(4, 2, seed, 2.0,
                                           seed % 3 == 0 ? 0.6 : 10.0, -13.0, 0.0);
    int bits = 0;
    for (const auto& nr : p.ingress) bits += static_cast<int>(nr.size());
    if (bits == 0 || bits > 30) continue;
    auto relaxed = centralized_relaxed(p, 1e-8);
    if (!relaxed.converged) continue;
    bool integral = true;
    for (double x : relaxed.allocation.x)
      if (x > 1e-4 && x < 1.0 - 1e-4) integral = false;
    if (!integral) continue;

    ++found;
    auto integer = brute_force_integer(p);
    auto cfg = accepted_solver(p.l_t_bar, 0.001, true, 150000);
    auto res = run(p, cfg);
    double rel = std::abs(integer.objective - objective(p, res.allocation)) /
                 std::abs(integer.objective);
    worst_rel = std::max(worst_rel, rel);
    ok = ok && res.report.converged;
  }
  report(4, ok && found == 10 && worst_rel <= 5e-3,
         "brute-force agreement on " + std::to_string(found) +
             "/10 integral instances: worst relative gap " + format_sig(worst_rel, 3) +
             " (limit 5e-3)");
}

// Criterion 5: solve_user vs dense grid search of the per-user Lagrangian.
static void criterion_5() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> psi_d(0.0, 0.4), lam_d(0.0, 0.2);
  std::uniform_real_distribution<double> serv_db(0.0, 20.0), help_db(-10.0, 10.0);
  std::uniform_int_distribution<int> deg_d(1, 2);

  double worst_gap = 0.0;
  for (int draw = 0; draw < 200; ++draw) {
    int deg = deg_d(rng);
    std::vector<double> helpers(deg);
    for (auto& h : helpers) h = db_to_linear(help_db(rng));
    auto p = maas::testing::single_user_problem(db_to_linear(serv_db(rng)), helpers);
    PriceState prices = PriceState::init(p, 0.0, 0.005);
    for (auto& v : prices.psi) v = psi_d(rng);
    prices.lambda[0] = lam_d(rng);

    auto lag = [&](const std::vector<double>& x) {
      double g = 1.0 + p.scenario.sinr[0][0];
      double lin = 0.0;
      for (int n = 0; n < deg; ++n) {
        g += p.scenario.sinr[n + 1][0] * x[n];
        lin += (prices.psi[n + 1] + prices.lambda[0]) * x[n];  // beta = w = 1
      }
      return std::log(g) - lin;
    };

    double grid_best = -1e300;
    std::vector<double> x(deg);
    if (deg == 1) {
      for (int a = 0; a <= 1000; ++a) {
        x[0] = a * 1e-3;
        grid_best = std::max(grid_best, lag(x));
      }
    } else {
      for (int a = 0; a <= 1000; ++a) {
        x[0] = a * 1e-3;
        for (int b = 0; b <= 1000; ++b) {
          x[1] = b * 1e-3;
          grid_best = std::max(grid_best, lag(x));
        }
      }
    }
    auto r = solve_user(p, prices, 0);
    worst_gap = std::max(worst_gap, grid_best - lag(r.x));
  }
  report(5, worst_gap <= 1e-6,
         "primal exactness vs dense grid: worst gap " + format_sig(worst_gap, 3) +
             " (limit 1e-6)");
}

// Criterion 6: analytic gradient vs central finite differences.
static void criterion_6() {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  auto p = maas::testing::random_problem(8, 3, 42, 3.0, 1.0);
  // Central differences: truncation ~h^2, roundoff ~eps*|f|/h; h = 1e-5
  // balances the two near 1e-9 absolute for objectives of size ~30.
  const double h = 1e-5;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto a = SharingAllocation::zeros(p);
    for (auto& v : a.x) v = unit(rng);
    auto grad = objective_gradient(p, a);
    for (int v = 0; v < p.num_vars(); ++v) {
      auto lo = a, hi = a;
      lo.x[v] -= h;
      hi.x[v] += h;
      double fd = (objective(p, hi) - objective(p, lo)) / (2.0 * h);
      worst_rel = std::max(worst_rel, std::abs(grad[v] - fd) / std::max(1e-12, std::abs(fd)));
    }
  }
  report(6, worst_rel <= 1e-6,
         "gradient check: worst relative error " + format_sig(worst_rel, 3) +
             " (limit 1e-6)");
}

// Criteria 7-8 on the 57-cell scenario.
static void criteria_7_8() {
  auto t0 = std::chrono::steady_clock::now();
  auto p = maas::testing::paper_scale_problem(33, 3.0, 1.0);

  auto cfg = accepted_solver(1.0, 0.005, false, 300);
  auto res = run(p, cfg);
  double max_final_demand = 0.0;
  for (double d : egress_demand(p, res.allocation))
    max_final_demand = std::max(max_final_demand, d);

  std::filesystem::create_directories("acceptance_out");
  write_trace(p, res.report, "acceptance_out/egress_demand_trace.csv");
  double secs = seconds_since(t0);
  report(7,
         res.report.converged && res.report.iterations <= 300 &&
             max_final_demand <= 1.0 + cfg.eps2 && secs < 300.0,
         "paper-scale convergence: " + std::to_string(res.report.iterations) +
             " iterations (limit 300), max final demand " +
             format_sig(max_final_demand, 6) + " (limit " + format_sig(1.0 + cfg.eps2, 6) +
             "), trace in acceptance_out/, " + format_sig(secs, 3) + " s (limit 300)");

  // Baseline ordering at L_Tbar = 1 and greedy agreement at L_Tbar = 8.
  double obj_none = objective(p, no_comp(p));
  double obj_rand = objective(p, randomized_egress(p, 2024));
  double obj_lm = objective(p, res.allocation);
  double obj_greedy = objective(p, greedy_maas(p));

  SharingProblem loose = p;
  loose.l_t_bar = 8.0;
  // With the egress limit slack the ingress prices bounce off the zero
  // projection at a fixed step; a gentler diminishing schedule settles them.
  auto cfg8 = accepted_solver(8.0, 0.001, true, 5000);
  auto res8 = run(loose, cfg8);
  double obj_lm8 = objective(loose, res8.allocation);
  double obj_greedy8 = objective(loose, greedy_maas(loose));
  double rel8 = std::abs(obj_greedy8 - obj_lm8) / obj_greedy8;

  bool ordered = obj_none < obj_rand && obj_rand < obj_lm && obj_lm <= obj_greedy + 1e-6;
  report(8, ordered && res8.report.converged && rel8 <= 0.01,
         "baseline ordering: no_comp " + format_sig(obj_none, 6) + " < randomized " +
             format_sig(obj_rand, 6) + " < liquidmaas " + format_sig(obj_lm, 6) +
             " <= greedy " + format_sig(obj_greedy, 6) + "; at L_Tbar=8 gap to greedy " +
             format_sig(rel8, 3) + " (limit 0.01)");
}

// Criterion 9: bit-identical allocation CSVs for identical seeds/configs.
static void criterion_9() {
  std::string csv1, csv2;
  for (int rep = 0; rep < 2; ++rep) {
    auto p = maas::testing::paper_scale_problem(7, 3.0, 1.0, 5);
    auto cfg = accepted_solver(1.0, 0.005, false, 500);
    auto res = run(p, cfg);
    auto csv = allocation_csv(p, res.allocation);
    (rep == 0 ? csv1 : csv2) = csv;
  }
  report(9, !csv1.empty() && csv1 == csv2,
         "determinism: repeated generate+solve produced " +
             std::string(csv1 == csv2 ? "identical" : "different") + " allocation CSVs");
}

int main() {
  criteria_1_2_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criteria_7_8();
  criterion_9();
  std::cout << (g_failures == 0 ? "all acceptance criteria passed"
                                : std::to_string(g_failures) + " criteria failed")
            << "\n";
  return g_failures == 0 ? 0 : 1;
}
