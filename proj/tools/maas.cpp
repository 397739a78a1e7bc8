// Experiment CLI: scenario generation, solver runs, algorithm comparison,
// egress-limit sweeps, and oracle validation.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "maas/maas.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitParseError = 2;
constexpr int kExitInfeasibleParams = 3;
constexpr int kExitNonConvergence = 4;

struct GenerateParams {
  int sites = 19;
  int sectors = 3;
  double isd = 100.0;
  int users_per_cell = 10;
  int antennas = 2;
  std::uint64_t seed = 1;
  double smin_db = -10.0;
  double la = 3.0;
  double ltbar = 1.0;
  maas::RadioParams radio;
};

maas::SharingProblem generate_problem(const GenerateParams& g) {
  auto cells = maas::generate_hex_layout(g.sites, g.sectors, g.isd, g.antennas);
  auto users = maas::drop_users(cells, g.users_per_cell, g.seed, g.isd / 2.0);
  maas::NetworkScenario sc;
  sc.cells = std::move(cells);
  sc.users = std::move(users);
  maas::RadioParams rp = g.radio;
  rp.shadowing_seed = g.seed + 1;
  sc.sinr = maas::compute_sinr_matrix(sc.cells, sc.users, rp);
  return maas::build_neighborhoods(std::move(sc), maas::db_to_linear(g.smin_db),
                                   g.la, g.ltbar);
}

double mean_degree(const maas::SharingProblem& p) {
  if (p.ingress.empty()) return 0.0;
  double total = 0.0;
  for (const auto& nr : p.ingress) total += static_cast<double>(nr.size());
  return total / static_cast<double>(p.ingress.size());
}

std::string out_dir_default() {
  const char* env = std::getenv("MAAS_OUT_DIR");
  return env ? env : "out";
}

maas::SharingAllocation run_algorithm(const maas::SharingProblem& p,
                                      const std::string& name,
                                      const maas::SolverConfig& cfg,
                                      std::uint64_t seed,
                                      maas::SolverReport* report = nullptr) {
  if (name == "no_comp") return maas::no_comp(p);
  if (name == "greedy") return maas::greedy_maas(p);
  if (name == "randomized") return maas::randomized_egress(p, seed);
  if (name == "liquidmaas") {
    auto res = maas::run(p, cfg);
    if (report) *report = std::move(res.report);
    return res.allocation;
  }
  throw CLI::ValidationError("unknown algorithm: " + name);
}

struct CompareRow {
  std::string algorithm;
  double wsr = 0.0;
  double gain = 1.0;
  bool egress_feasible = true;
};

std::vector<CompareRow> compare_algorithms(const maas::SharingProblem& p,
                                           const maas::SolverConfig& cfg,
                                           std::uint64_t seed,
                                           maas::SolverReport* lm_report = nullptr) {
  std::vector<CompareRow> rows;
  double base = 0.0;
  for (const std::string& name : {"no_comp", "randomized", "liquidmaas", "greedy"}) {
    CompareRow row;
    row.algorithm = name;
    auto alloc = run_algorithm(p, name, cfg, seed, name == "liquidmaas" ? lm_report : nullptr);
    row.wsr = maas::objective(p, alloc);
    row.egress_feasible = maas::residuals(p, alloc).max_egress_violation() <= 1e-6 + cfg.eps2;
    if (name == "no_comp") base = row.wsr;
    row.gain = base > 0.0 ? row.wsr / base : 1.0;
    rows.push_back(row);
  }
  return rows;
}

void print_compare_table(std::ostream& os, const std::vector<CompareRow>& rows) {
  os << "algorithm      WSR(nats)        gain_vs_no_comp  egress_feasible\n";
  for (const auto& r : rows) {
    os << r.algorithm;
    for (std::size_t t = r.algorithm.size(); t < 15; ++t) os << ' ';
    os << maas::format_sig(r.wsr) << "   " << maas::format_sig(r.gain, 6) << "           "
       << (r.egress_feasible ? "yes" : "no") << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiquidMAAS uplink CoMP helper-allocation experiments"};
  app.set_config("--config", "", "Config file with parameter defaults");
  app.require_subcommand(1);

  GenerateParams gen;
  std::string out_dir = out_dir_default();
  std::string scenario_path;
  std::string algorithm = "liquidmaas";
  maas::SolverConfig solver;
  std::string mode = "kkt";
  bool diminishing = false;
  constexpr double kUnset = -1e300;
  double la_override = kUnset, ltbar_override = kUnset;
  std::vector<double> ltbar_list;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  int num_instances = 5;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--seed", gen.seed, "RNG seed");
  };
  auto add_solver = [&](CLI::App* cmd) {
    cmd->add_option("--nu", solver.nu, "Price step size");
    cmd->add_option("--eps1", solver.eps1, "Ingress tolerance");
    cmd->add_option("--eps2", solver.eps2, "Egress tolerance");
    cmd->add_option("--epsilon-init", solver.epsilon_init, "Initial egress price");
    cmd->add_option("--max-iters", solver.max_iters, "Iteration cap");
    cmd->add_option("--mode", mode, "Convergence test: paper or kkt")
        ->check(CLI::IsMember({"paper", "kkt"}));
    cmd->add_flag("--diminishing", diminishing, "Use nu/sqrt(t) step schedule");
  };
  auto add_limits = [&](CLI::App* cmd) {
    cmd->add_option("--la", la_override, "Override aperture limit L_A");
    cmd->add_option("--ltbar", ltbar_override, "Override egress limit");
  };

  auto* cmd_gen = app.add_subcommand("generate", "Generate a network scenario file");
  cmd_gen->add_option("--sites", gen.sites, "Number of hex sites")->check(CLI::PositiveNumber);
  cmd_gen->add_option("--sectors", gen.sectors, "Sectors per site")->check(CLI::PositiveNumber);
  cmd_gen->add_option("--isd", gen.isd, "Inter-site distance (m)");
  cmd_gen->add_option("--users-per-cell", gen.users_per_cell, "Average users per cell");
  cmd_gen->add_option("--antennas", gen.antennas, "Antennas per cell");
  cmd_gen->add_option("--alpha", gen.radio.alpha, "FPC alpha");
  cmd_gen->add_option("--p0-dbm", gen.radio.p0_dbm, "FPC target P0 (dBm)");
  cmd_gen->add_option("--pmax-dbm", gen.radio.pmax_dbm, "Max transmit power (dBm)");
  cmd_gen->add_option("--nf-db", gen.radio.noise_figure_db, "Noise figure (dB)");
  double bw_mhz = gen.radio.bandwidth_hz / 1e6;
  cmd_gen->add_option("--bw-mhz", bw_mhz, "Bandwidth (MHz)")->check(CLI::PositiveNumber);
  cmd_gen->add_flag("--shadowing", gen.radio.shadowing, "Enable log-normal shadowing");
  cmd_gen->add_option("--smin-db", gen.smin_db, "Helper admission threshold (dB)");
  cmd_gen->add_option("--la", gen.la, "Aperture limit L_A");
  cmd_gen->add_option("--ltbar", gen.ltbar, "Egress bandwidth limit");
  add_common(cmd_gen);

  auto* cmd_solve = app.add_subcommand("solve", "Solve a scenario with one algorithm");
  cmd_solve->add_option("--scenario", scenario_path, "Scenario file")->required();
  cmd_solve->add_option("--algorithm", algorithm, "no_comp, greedy, randomized, liquidmaas")
      ->check(CLI::IsMember({"no_comp", "greedy", "randomized", "liquidmaas"}));
  add_solver(cmd_solve);
  add_limits(cmd_solve);
  add_common(cmd_solve);

  auto* cmd_compare = app.add_subcommand("compare", "Run all four algorithms");
  cmd_compare->add_option("--scenario", scenario_path, "Scenario file")->required();
  add_solver(cmd_compare);
  add_limits(cmd_compare);
  add_common(cmd_compare);

  auto* cmd_sweep = app.add_subcommand("sweep", "Compare across egress limits");
  cmd_sweep->add_option("--scenario", scenario_path, "Scenario file")->required();
  cmd_sweep->add_option("--ltbar-list", ltbar_list, "Egress limits, strictly increasing")
      ->required();
  cmd_sweep->add_option("--jobs", jobs, "Parallel sweep workers");
  add_solver(cmd_sweep);
  add_limits(cmd_sweep);
  add_common(cmd_sweep);

  auto* cmd_validate = app.add_subcommand("validate", "Oracle comparisons on small instances");
  cmd_validate->add_option("--instances", num_instances, "Number of random instances");
  add_solver(cmd_validate);
  add_common(cmd_validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParseError;
  }

  solver.mode = mode == "paper" ? maas::ConvergenceMode::paper : maas::ConvergenceMode::kkt;
  solver.diminishing_step = diminishing;
  gen.radio.bandwidth_hz = bw_mhz * 1e6;

  try {
    fs::create_directories(out_dir);

    if (*cmd_gen) {
      if (gen.ltbar < 0.0 || gen.la < 0.0) {
        std::cerr << "error: limits must be >= 0\n";
        return kExitInfeasibleParams;
      }
      auto p = generate_problem(gen);
      std::string path = out_dir + "/scenario.json";
      maas::write_problem(p, path);
      std::cout << "wrote " << path << "\n"
                << "cells: " << p.scenario.num_cells()
                << "  users: " << p.scenario.num_users()
                << "  mean |N_R(k)|: " << mean_degree(p) << "\n";
      return 0;
    }

    auto load = [&]() {
      if ((la_override != kUnset && la_override < 0.0) ||
          (ltbar_override != kUnset && ltbar_override < 0.0))
        throw std::invalid_argument("limits must be >= 0");
      auto p = maas::read_problem(scenario_path);
      if (la_override != kUnset) p.l_a = la_override;
      if (ltbar_override != kUnset) p.l_t_bar = ltbar_override;
      return p;
    };

    if (*cmd_solve) {
      auto p = load();
      maas::SolverReport report;
      auto start = std::chrono::steady_clock::now();
      auto alloc = run_algorithm(p, algorithm, solver, gen.seed, &report);
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      maas::write_allocation(p, alloc, out_dir + "/allocation_" + algorithm + ".csv");
      auto r = maas::residuals(p, alloc);
      std::ostringstream summary;
      summary << "algorithm: " << algorithm << "\n"
              << "objective_nats: " << maas::format_sig(maas::objective(p, alloc)) << "\n"
              << "max_egress_violation: " << maas::format_sig(r.max_egress_violation()) << "\n"
              << "max_ingress_violation: " << maas::format_sig(r.max_ingress_violation()) << "\n"
              << "wall_seconds: " << secs << "\n";
      if (algorithm == "liquidmaas") {
        summary << "iterations: " << report.iterations << "\n"
                << "converged: " << (report.converged ? "true" : "false") << "\n";
        maas::write_trace(p, report, out_dir + "/trace.csv");
        std::vector<maas::Series> series(p.scenario.num_cells());
        for (int i = 0; i < p.scenario.num_cells(); ++i)
          for (int t = 0; t < report.iterations; ++t) {
            series[i].x.push_back(t + 1);
            series[i].y.push_back(report.egress_demand_trace[t][i]);
          }
        maas::write_svg(maas::render_line_chart(series, "Per-cell egress demand",
                                                "iteration", "demand"),
                        out_dir + "/convergence.svg");
      }
      std::ofstream(out_dir + "/summary.txt") << summary.str();
      std::cout << summary.str();
      if (algorithm == "liquidmaas" && !report.converged) {
        std::cerr << "error: solver did not converge within " << solver.max_iters
                  << " iterations\n";
        return kExitNonConvergence;
      }
      return 0;
    }

    if (*cmd_compare) {
      auto p = load();
      maas::SolverReport lm_report;
      auto rows = compare_algorithms(p, solver, gen.seed, &lm_report);
      print_compare_table(std::cout, rows);
      std::ofstream csv(out_dir + "/compare.csv");
      csv << "algorithm,wsr_nats,gain\n";
      for (const auto& r : rows)
        csv << r.algorithm << "," << maas::format_sig(r.wsr) << ","
            << maas::format_sig(r.gain) << "\n";

      // Per-user rate percentiles for LiquidMAAS.
      auto res = maas::run(p, solver);
      std::vector<double> rates;
      for (int k = 0; k < p.scenario.num_users(); ++k)
        rates.push_back(p.scenario.users[k].beta *
                        std::log2(maas::combined_snr(p, k, res.allocation)));
      std::sort(rates.begin(), rates.end());
      auto pct = [&](double q) {
        return rates.empty() ? 0.0
                             : rates[std::min(rates.size() - 1,
                                              static_cast<std::size_t>(q * rates.size()))];
      };
      std::cout << "liquidmaas per-user rate (bit/s/Hz x beta): p10="
                << maas::format_sig(pct(0.10), 5) << " p50=" << maas::format_sig(pct(0.50), 5)
                << " p90=" << maas::format_sig(pct(0.90), 5) << "\n";
      return lm_report.converged ? 0 : kExitNonConvergence;
    }

    if (*cmd_sweep) {
      for (std::size_t t = 0; t + 1 < ltbar_list.size(); ++t)
        if (!(ltbar_list[t] < ltbar_list[t + 1])) {
          std::cerr << "error: --ltbar-list must be strictly increasing\n";
          return kExitInfeasibleParams;
        }
      auto p = load();
      std::vector<std::vector<CompareRow>> results(ltbar_list.size());
      std::atomic<std::size_t> next{0};
      auto worker = [&]() {
        for (std::size_t t = next.fetch_add(1); t < ltbar_list.size();
             t = next.fetch_add(1)) {
          maas::SharingProblem local = p;
          local.l_t_bar = ltbar_list[t];
          results[t] = compare_algorithms(local, solver, gen.seed);
        }
      };
      std::vector<std::thread> pool;
      for (int w = 0; w < std::max(1, jobs); ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();

      std::ofstream csv(out_dir + "/sweep.csv");
      csv << "l_t_bar,no_comp,randomized,liquidmaas,greedy\n";
      std::vector<maas::Series> series(3);
      series[0].label = "randomized";
      series[1].label = "liquidmaas";
      series[2].label = "greedy";
      std::cout << "l_t_bar   gain(randomized)  gain(liquidmaas)  gain(greedy)\n";
      for (std::size_t t = 0; t < ltbar_list.size(); ++t) {
        csv << ltbar_list[t];
        for (const auto& row : results[t]) csv << "," << maas::format_sig(row.gain);
        csv << "\n";
        std::cout << ltbar_list[t] << "      " << maas::format_sig(results[t][1].gain, 6)
                  << "          " << maas::format_sig(results[t][2].gain, 6) << "          "
                  << maas::format_sig(results[t][3].gain, 6) << "\n";
        for (int s = 0; s < 3; ++s) {
          series[s].x.push_back(ltbar_list[t]);
          series[s].y.push_back(results[t][s + 1].gain);
        }
      }
      maas::write_svg(maas::render_line_chart(series, "Mean WSR gain vs egress limit",
                                              "L_T_bar", "gain over no CoMP"),
                      out_dir + "/gain.svg");
      return 0;
    }

    if (*cmd_validate) {
      std::mt19937_64 rng(gen.seed);
      std::cout << "instance  relaxed_obj      liquidmaas_obj   rel_diff    gap_estimate\n";
      bool all_ok = true;
      for (int inst = 0; inst < num_instances; ++inst) {
        // Synthetic small instance: random SINRs, half-binding egress.
        const int J = 8, per_cell = 3;
        maas::NetworkScenario sc;
        for (int i = 0; i < J; ++i) sc.cells.push_back({i, 100.0 * i, 0.0, 2});
        std::uniform_real_distribution<double> serv_db(0.0, 20.0), cross_db(-20.0, 5.0);
        for (int i = 0; i < J; ++i)
          for (int n = 0; n < per_cell; ++n) {
            int id = static_cast<int>(sc.users.size());
            sc.users.push_back({id, 100.0 * i, 10.0 * n, i, 1.0 / per_cell, 1.0});
          }
        sc.sinr.assign(J, std::vector<double>(sc.users.size()));
        for (int i = 0; i < J; ++i)
          for (std::size_t k = 0; k < sc.users.size(); ++k)
            sc.sinr[i][k] = maas::db_to_linear(
                sc.users[k].serving_cell == i ? serv_db(rng) : cross_db(rng));
        auto p = maas::build_neighborhoods(std::move(sc), maas::db_to_linear(-10.0), 2.0, 0.5);

        auto relaxed = maas::centralized_relaxed(p, 1e-7);
        maas::SolverConfig cfg = solver;
        cfg.nu = 0.001;
        cfg.diminishing_step = true;
        cfg.max_iters = std::max(cfg.max_iters, 50000);
        auto lm = maas::run(p, cfg);
        double lm_obj = maas::objective(p, lm.allocation);
        double rel = std::abs(relaxed.objective - lm_obj) / std::abs(relaxed.objective);
        all_ok = all_ok && relaxed.converged && lm.report.converged && rel < 1e-3;
        std::cout << inst << "         " << maas::format_sig(relaxed.objective) << "  "
                  << maas::format_sig(lm_obj) << "  " << maas::format_sig(rel, 3)
                  << "     " << maas::format_sig(relaxed.duality_gap, 3) << "\n";
      }
      std::cout << (all_ok ? "validate: OK\n" : "validate: FAILED\n");
      return all_ok ? 0 : kExitNonConvergence;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasibleParams;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  return 0;
}
