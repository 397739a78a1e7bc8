#pragma once

// Network scenario construction: hexagonal cell layout, user placement,
// uplink SINR computation under open-loop fractional power control, and
// derivation of the ingress/egress sharing neighborhoods.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace maas {

struct CellSite {
  int id = 0;
  double x = 0.0;  // meters
  double y = 0.0;
  int num_antennas = 1;
};

struct User {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  int serving_cell = 0;
  double beta = 1.0;    // bandwidth fraction, in (0,1]
  double weight = 1.0;  // scheduling priority, > 0
};

// dB values at or below this sentinel denote linear zero.
inline constexpr double kZeroDb = -300.0;

inline double db_to_linear(double db) {
  return db <= kZeroDb ? 0.0 : std::pow(10.0, db / 10.0);
}

inline double linear_to_db(double lin) {
  return lin <= 0.0 ? 2.0 * kZeroDb : 10.0 * std::log10(lin);
}

struct NetworkScenario {
  std::vector<CellSite> cells;
  std::vector<User> users;
  // sinr[i][k] = linear SINR of user k's uplink signal at cell i.
  std::vector<std::vector<double>> sinr;

  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_users() const { return static_cast<int>(users.size()); }

  std::vector<std::vector<int>> users_of_cell() const {
    std::vector<std::vector<int>> u(cells.size());
    for (const auto& usr : users) u[usr.serving_cell].push_back(usr.id);
    return u;
  }

  void validate() const {
    for (int j = 0; j < num_cells(); ++j) {
      if (cells[j].id != j) throw std::invalid_argument("cell ids must be dense 0..J-1");
      if (cells[j].num_antennas < 1) throw std::invalid_argument("num_antennas must be >= 1");
    }
    std::vector<double> beta_sum(cells.size(), 0.0);
    for (int k = 0; k < num_users(); ++k) {
      const User& u = users[k];
      if (u.id != k) throw std::invalid_argument("user ids must be dense 0..K-1");
      if (u.serving_cell < 0 || u.serving_cell >= num_cells())
        throw std::invalid_argument("invalid serving cell");
      if (!(u.beta > 0.0 && u.beta <= 1.0)) throw std::invalid_argument("beta must be in (0,1]");
      if (!(u.weight > 0.0)) throw std::invalid_argument("weight must be > 0");
      beta_sum[u.serving_cell] += u.beta;
    }
    for (double s : beta_sum)
      if (s > 1.0 + 1e-9) throw std::invalid_argument("per-cell beta sum exceeds 1");
    if (static_cast<int>(sinr.size()) != num_cells())
      throw std::invalid_argument("SINR matrix row count != number of cells");
    for (const auto& row : sinr) {
      if (static_cast<int>(row.size()) != num_users())
        throw std::invalid_argument("SINR matrix column count != number of users");
      for (double s : row)
        if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("SINR entries must be finite and >= 0");
    }
    for (int k = 0; k < num_users(); ++k)
      if (!(sinr[users[k].serving_cell][k] > 0.0))
        throw std::invalid_argument("serving-cell SINR must be > 0");
  }
};

// The NUM instance: scenario plus sharing neighborhoods and limits.
struct SharingProblem {
  NetworkScenario scenario;
  // ingress[k] = N_R(k), helper cell ids sorted ascending; never contains sigma(k).
  std::vector<std::vector<int>> ingress;
  double l_a = 3.0;      // max helper count per user (ingress/aperture limit)
  double l_t_bar = 1.0;  // per-cell egress bandwidth limit
  double s_min = 0.1;    // linear admission threshold

  // Flat variable index: one slot per (helper cell, user) pair with
  // i in N_R(k). var_offset[k]..var_offset[k+1] are user k's slots, in
  // the order of ingress[k].
  std::vector<int> var_offset;
  // egress_vars[i] = (user k, flat index) for every variable where cell i
  // is the helper.
  std::vector<std::vector<std::pair<int, int>>> egress_vars;

  int num_vars() const { return var_offset.empty() ? 0 : var_offset.back(); }
  int degree(int k) const { return static_cast<int>(ingress[k].size()); }

  // Effective ingress cap: min(L_A, L_R(k)).
  double l_eff(int k) const { return std::min(l_a, static_cast<double>(degree(k))); }

  void build_index() {
    const int num_users = scenario.num_users();
    var_offset.assign(num_users + 1, 0);
    for (int k = 0; k < num_users; ++k)
      var_offset[k + 1] = var_offset[k] + degree(k);
    egress_vars.assign(scenario.num_cells(), {});
    for (int k = 0; k < num_users; ++k)
      for (int n = 0; n < degree(k); ++n)
        egress_vars[ingress[k][n]].emplace_back(k, var_offset[k] + n);
  }

  // N_T(i, j): users of cell j that cell i can help.
  std::vector<int> egress_neighborhood(int helper, int cell) const {
    std::vector<int> out;
    for (const auto& [k, idx] : egress_vars[helper])
      if (scenario.users[k].serving_cell == cell) out.push_back(k);
    return out;
  }
};

inline std::vector<CellSite> generate_hex_layout(int num_sites, int sectors_per_site,
                                                 double isd, int num_antennas = 2) {
  if (num_sites < 1) throw std::invalid_argument("num_sites must be >= 1");
  if (sectors_per_site < 1) throw std::invalid_argument("sectors_per_site must be >= 1");
  if (!(isd > 0.0)) throw std::invalid_argument("isd must be > 0");

  // Hex spiral of site centers, ISD between adjacent sites.
  constexpr double kPi = 3.14159265358979323846;
  std::vector<std::pair<double, double>> dirs;
  for (int s = 0; s < 6; ++s)
    dirs.emplace_back(isd * std::cos(kPi / 3.0 * s), isd * std::sin(kPi / 3.0 * s));

  std::vector<std::pair<double, double>> sites;
  sites.emplace_back(0.0, 0.0);
  for (int ring = 1; static_cast<int>(sites.size()) < num_sites; ++ring) {
    double px = ring * dirs[4].first;
    double py = ring * dirs[4].second;
    for (int side = 0; side < 6 && static_cast<int>(sites.size()) < num_sites; ++side)
      for (int step = 0; step < ring && static_cast<int>(sites.size()) < num_sites; ++step) {
        sites.emplace_back(px, py);
        px += dirs[side].first;
        py += dirs[side].second;
      }
  }

  std::vector<CellSite> cells;
  cells.reserve(static_cast<std::size_t>(num_sites) * sectors_per_site);
  for (const auto& [sx, sy] : sites)
    for (int s = 0; s < sectors_per_site; ++s) {
      CellSite c;
      c.id = static_cast<int>(cells.size());
      if (sectors_per_site > 1) {
        // Sector antennas displaced from the site center along the azimuth.
        double az = 2.0 * kPi * s / sectors_per_site;
        c.x = sx + 0.3 * isd * std::cos(az);
        c.y = sy + 0.3 * isd * std::sin(az);
      } else {
        c.x = sx;
        c.y = sy;
      }
      c.num_antennas = num_antennas;
      cells.push_back(c);
    }
  return cells;
}

struct RadioParams {
  double alpha = 0.8;          // fractional power control exponent
  double p0_dbm = -80.0;       // FPC target
  double pmax_dbm = 24.0;      // transmit power cap
  double noise_figure_db = 4.0;
  double bandwidth_hz = 10e6;  // UL system bandwidth
  double carrier_ghz = 2.0;
  // Log-distance pathloss PL(dB) = pl0 + 10 n log10(d / 1 m).
  double pl0_db = 38.5;
  double pathloss_exponent = 3.76;
  bool shadowing = false;
  double shadowing_sigma_db = 8.0;
  // Interference: expected mode averages over each other cell's users;
  // sampled mode draws one co-scheduled user per cell.
  enum class Interference { expected, sampled };
  Interference interference = Interference::expected;
  std::uint64_t shadowing_seed = 1;
};

inline double pathloss_db(const RadioParams& rp, double dx, double dy) {
  double d = std::max(1.0, std::hypot(dx, dy));
  return rp.pl0_db + 10.0 * rp.pathloss_exponent * std::log10(d);
}

inline std::vector<User> drop_users(const std::vector<CellSite>& cells,
                                    int avg_users_per_cell, std::uint64_t seed,
                                    double drop_radius = 50.0) {
  if (avg_users_per_cell < 1) throw std::invalid_argument("avg_users_per_cell must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<User> users;
  users.reserve(cells.size() * static_cast<std::size_t>(avg_users_per_cell));
  constexpr double kPi = 3.14159265358979323846;
  for (const auto& cell : cells)
    for (int n = 0; n < avg_users_per_cell; ++n) {
      double r = drop_radius * std::sqrt(unit(rng));
      double th = 2.0 * kPi * unit(rng);
      User u;
      u.id = static_cast<int>(users.size());
      u.x = cell.x + r * std::cos(th);
      u.y = cell.y + r * std::sin(th);
      users.push_back(u);
    }

  // Serve each user from the cell with the least pathloss (strongest
  // received power under the distance-based model).
  RadioParams rp;
  for (auto& u : users) {
    int best = 0;
    double best_pl = std::numeric_limits<double>::infinity();
    for (const auto& cell : cells) {
      double pl = pathloss_db(rp, u.x - cell.x, u.y - cell.y);
      if (pl < best_pl) {
        best_pl = pl;
        best = cell.id;
      }
    }
    u.serving_cell = best;
  }

  // Equal bandwidth split among each cell's connected users.
  std::vector<int> count(cells.size(), 0);
  for (const auto& u : users) ++count[u.serving_cell];
  for (auto& u : users) u.beta = 1.0 / count[u.serving_cell];
  return users;
}

inline std::vector<std::vector<double>> compute_sinr_matrix(
    const std::vector<CellSite>& cells, const std::vector<User>& users,
    const RadioParams& rp) {
  if (rp.alpha < 0.0 || rp.alpha > 1.0) throw std::invalid_argument("alpha must be in [0,1]");
  const int J = static_cast<int>(cells.size());
  const int K = static_cast<int>(users.size());

  std::vector<std::vector<double>> pl(J, std::vector<double>(K));
  for (int i = 0; i < J; ++i)
    for (int k = 0; k < K; ++k)
      pl[i][k] = pathloss_db(rp, users[k].x - cells[i].x, users[k].y - cells[i].y);
  if (rp.shadowing) {
    std::mt19937_64 rng(rp.shadowing_seed);
    std::normal_distribution<double> shadow(0.0, rp.shadowing_sigma_db);
    for (int i = 0; i < J; ++i)
      for (int k = 0; k < K; ++k) pl[i][k] += shadow(rng);
  }

  // Open-loop fractional power control, capped at pmax.
  std::vector<double> ptx_dbm(K);
  for (int k = 0; k < K; ++k)
    ptx_dbm[k] = std::min(rp.pmax_dbm, rp.p0_dbm + rp.alpha * pl[users[k].serving_cell][k]);

  auto rx_mw = [&](int k, int i) {
    double dbm = ptx_dbm[k] - pl[i][k];
    return ptx_dbm[k] <= kZeroDb ? 0.0 : std::pow(10.0, dbm / 10.0);
  };

  // Per-cell representative interferer power at each receiving cell.
  std::vector<std::vector<int>> u_of = [&] {
    std::vector<std::vector<int>> u(J);
    for (const auto& usr : users) u[usr.serving_cell].push_back(usr.id);
    return u;
  }();
  std::vector<int> sampled(J, -1);
  if (rp.interference == RadioParams::Interference::sampled) {
    std::mt19937_64 rng(rp.shadowing_seed ^ 0x9e3779b97f4a7c15ULL);
    for (int j = 0; j < J; ++j)
      if (!u_of[j].empty()) {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(u_of[j].size()) - 1);
        sampled[j] = u_of[j][pick(rng)];
      }
  }
  // rep[j][i] = interference power contributed by cell j's uplink at cell i.
  std::vector<std::vector<double>> rep(J, std::vector<double>(J, 0.0));
  for (int j = 0; j < J; ++j) {
    if (u_of[j].empty()) continue;
    for (int i = 0; i < J; ++i) {
      if (rp.interference == RadioParams::Interference::sampled) {
        rep[j][i] = rx_mw(sampled[j], i);
      } else {
        double acc = 0.0;
        for (int m : u_of[j]) acc += rx_mw(m, i);
        rep[j][i] = acc / static_cast<double>(u_of[j].size());
      }
    }
  }

  std::vector<std::vector<double>> sinr(J, std::vector<double>(K, 0.0));
  for (int k = 0; k < K; ++k) {
    const User& u = users[k];
    double noise_dbm = -174.0 + 10.0 * std::log10(u.beta * rp.bandwidth_hz) + rp.noise_figure_db;
    double noise_mw = std::pow(10.0, noise_dbm / 10.0);
    for (int i = 0; i < J; ++i) {
      double interf = 0.0;
      for (int j = 0; j < J; ++j)
        if (j != u.serving_cell) interf += rep[j][i];
      interf *= u.beta;
      sinr[i][k] = cells[i].num_antennas * rx_mw(k, i) / (noise_mw + interf);
    }
  }
  return sinr;
}

inline SharingProblem build_neighborhoods(NetworkScenario scenario, double s_min,
                                          double l_a, double l_t_bar) {
  if (!(s_min > 0.0)) throw std::invalid_argument("s_min must be > 0 (linear)");
  if (l_a < 0.0 || l_t_bar < 0.0) throw std::invalid_argument("limits must be >= 0");
  scenario.validate();

  SharingProblem p;
  p.s_min = s_min;
  p.l_a = l_a;
  p.l_t_bar = l_t_bar;
  p.ingress.resize(scenario.num_users());
  for (int k = 0; k < scenario.num_users(); ++k) {
    int serving = scenario.users[k].serving_cell;
    for (int i = 0; i < scenario.num_cells(); ++i)
      if (i != serving && scenario.sinr[i][k] >= s_min) p.ingress[k].push_back(i);
  }
  p.scenario = std::move(scenario);
  p.build_index();
  return p;
}

}  // namespace maas
