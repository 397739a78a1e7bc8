#pragma once

// Shared test fixtures: the four-cell example topology and random
// synthetic instances with controllable neighborhood structure.

#include <cstdint>
#include <random>
#include <vector>

#include "maas/maas.hpp"

namespace maas::testing {

// Four cells, seven users, backhaul links only between cells (0,1), (0,3),
// (1,2), (2,3) (zero-indexed). SINRs chosen so the -10 dB threshold
// reproduces the intended ingress sets:
//   N_R(u0)=N_R(u1)={1,3}, N_R(u2)={0,2},
//   N_R(u3)=N_R(u4)=N_R(u5)={1,3}, N_R(u6)={0,2}.
inline SharingProblem fig1_problem(double l_a = 3.0, double l_t_bar = 1.0) {
  NetworkScenario sc;
  for (int i = 0; i < 4; ++i) sc.cells.push_back({i, 200.0 * i, 0.0, 2});
  const int serving[7] = {0, 0, 1, 2, 2, 2, 3};
  const double beta[7] = {0.5, 0.5, 1.0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0};
  for (int k = 0; k < 7; ++k)
    sc.users.push_back({k, 200.0 * serving[k], 10.0 * k, serving[k], beta[k], 1.0});

  const double serving_sinr[7] = {10.0, 8.0, 6.0, 5.0, 4.0, 3.0, 2.0};
  const std::vector<std::vector<int>> helpers = {
      {1, 3}, {1, 3}, {0, 2}, {1, 3}, {1, 3}, {1, 3}, {0, 2}};
  const std::vector<std::vector<double>> helper_sinr = {
      {1.0, 0.5}, {0.8, 0.6}, {1.2, 0.3}, {0.9, 0.4},
      {0.7, 0.2}, {0.5, 0.35}, {0.45, 0.25}};

  sc.sinr.assign(4, std::vector<double>(7, 0.01));  // below the -10 dB cut
  for (int k = 0; k < 7; ++k) {
    sc.sinr[serving[k]][k] = serving_sinr[k];
    for (std::size_t n = 0; n < helpers[k].size(); ++n)
      sc.sinr[helpers[k][n]][k] = helper_sinr[k][n];
  }
  return build_neighborhoods(std::move(sc), 0.1, l_a, l_t_bar);
}

// Random synthetic instance: serving SINR uniform in [0,20] dB, cross
// SINRs uniform in [cross_lo_db, cross_hi_db]; the -10 dB threshold then
// controls the expected neighborhood size.
inline SharingProblem random_problem(int num_cells, int users_per_cell,
                                     std::uint64_t seed, double l_a, double l_t_bar,
                                     double cross_lo_db = -20.0,
                                     double cross_hi_db = 5.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> serv_db(0.0, 20.0);
  std::uniform_real_distribution<double> cross_db(cross_lo_db, cross_hi_db);

  NetworkScenario sc;
  for (int i = 0; i < num_cells; ++i) sc.cells.push_back({i, 100.0 * i, 0.0, 2});
  for (int i = 0; i < num_cells; ++i)
    for (int n = 0; n < users_per_cell; ++n) {
      int id = static_cast<int>(sc.users.size());
      sc.users.push_back({id, 100.0 * i, 10.0 * n, i, 1.0 / users_per_cell, 1.0});
    }
  sc.sinr.assign(num_cells, std::vector<double>(sc.users.size()));
  for (int i = 0; i < num_cells; ++i)
    for (std::size_t k = 0; k < sc.users.size(); ++k)
      sc.sinr[i][k] = db_to_linear(sc.users[k].serving_cell == i ? serv_db(rng)
                                                                 : cross_db(rng));
  return build_neighborhoods(std::move(sc), db_to_linear(-10.0), l_a, l_t_bar);
}

// Single user with a given serving SINR and helper SINR list; one cell
// per helper plus the serving cell. beta/weight default to 1.
inline SharingProblem single_user_problem(double serving_sinr,
                                          const std::vector<double>& helper_sinrs,
                                          double l_a = 100.0, double l_t_bar = 100.0,
                                          double beta = 1.0, double weight = 1.0) {
  NetworkScenario sc;
  int num_cells = static_cast<int>(helper_sinrs.size()) + 1;
  for (int i = 0; i < num_cells; ++i) sc.cells.push_back({i, 100.0 * i, 0.0, 2});
  sc.users.push_back({0, 0.0, 0.0, 0, beta, weight});
  sc.sinr.assign(num_cells, std::vector<double>(1));
  sc.sinr[0][0] = serving_sinr;
  for (std::size_t n = 0; n < helper_sinrs.size(); ++n)
    sc.sinr[n + 1][0] = helper_sinrs[n];
  return build_neighborhoods(std::move(sc), 1e-9, l_a, l_t_bar);
}

// The paper-scale layout: 19 sites x 3 sectors, 10 users per cell,
// Table-2-style radio defaults.
inline SharingProblem paper_scale_problem(std::uint64_t seed, double l_a = 3.0,
                                          double l_t_bar = 1.0,
                                          int users_per_cell = 10) {
  auto cells = generate_hex_layout(19, 3, 100.0, 2);
  auto users = drop_users(cells, users_per_cell, seed, 50.0);
  NetworkScenario sc;
  sc.cells = std::move(cells);
  sc.users = std::move(users);
  RadioParams rp;
  rp.shadowing_seed = seed + 1;
  sc.sinr = compute_sinr_matrix(sc.cells, sc.users, rp);
  return build_neighborhoods(std::move(sc), db_to_linear(-10.0), l_a, l_t_bar);
}

}  // namespace maas::testing
