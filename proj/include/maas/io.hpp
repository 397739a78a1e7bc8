#pragma once

// File formats: JSON scenario files (SINRs in dB), allocation CSV,
// and per-iteration trace CSV.

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "maas/dual.hpp"
#include "maas/problem.hpp"
#include "maas/scenario.hpp"

namespace maas {

inline nlohmann::json problem_to_json(const SharingProblem& p) {
  nlohmann::json j;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : p.scenario.cells)
    j["cells"].push_back({{"id", c.id}, {"x", c.x}, {"y", c.y},
                          {"num_antennas", c.num_antennas}});
  j["users"] = nlohmann::json::array();
  for (const auto& u : p.scenario.users)
    j["users"].push_back({{"id", u.id}, {"x", u.x}, {"y", u.y},
                          {"serving_cell", u.serving_cell}, {"beta", u.beta},
                          {"weight", u.weight}});
  j["sinr_db"] = nlohmann::json::array();
  for (const auto& row : p.scenario.sinr) {
    nlohmann::json r = nlohmann::json::array();
    for (double s : row) r.push_back(linear_to_db(s));
    j["sinr_db"].push_back(std::move(r));
  }
  j["s_min_db"] = linear_to_db(p.s_min);
  j["l_a"] = p.l_a;
  j["l_t_bar"] = p.l_t_bar;
  j["ingress"] = p.ingress;
  return j;
}

inline SharingProblem problem_from_json(const nlohmann::json& j) {
  NetworkScenario sc;
  for (const auto& c : j.at("cells")) {
    CellSite cell;
    cell.id = c.at("id");
    cell.x = c.at("x");
    cell.y = c.at("y");
    cell.num_antennas = c.at("num_antennas");
    sc.cells.push_back(cell);
  }
  for (const auto& u : j.at("users")) {
    User usr;
    usr.id = u.at("id");
    usr.x = u.at("x");
    usr.y = u.at("y");
    usr.serving_cell = u.at("serving_cell");
    usr.beta = u.at("beta");
    usr.weight = u.at("weight");
    sc.users.push_back(usr);
  }
  for (const auto& row : j.at("sinr_db")) {
    std::vector<double> r;
    for (const auto& v : row) r.push_back(db_to_linear(v));
    sc.sinr.push_back(std::move(r));
  }
  double s_min = db_to_linear(j.at("s_min_db"));
  SharingProblem p = build_neighborhoods(std::move(sc), s_min, j.at("l_a"), j.at("l_t_bar"));
  // A hand-written file may pin the neighborhoods explicitly.
  if (j.contains("ingress")) {
    std::vector<std::vector<int>> ingress = j.at("ingress");
    if (ingress.size() != p.ingress.size())
      throw std::invalid_argument("ingress list size != number of users");
    for (std::size_t k = 0; k < ingress.size(); ++k) {
      std::sort(ingress[k].begin(), ingress[k].end());
      for (int i : ingress[k]) {
        if (i < 0 || i >= p.scenario.num_cells() ||
            i == p.scenario.users[k].serving_cell)
          throw std::invalid_argument("invalid ingress neighborhood entry");
        if (p.scenario.sinr[i][k] < p.s_min)
          throw std::invalid_argument("ingress entry below s_min threshold");
      }
    }
    p.ingress = std::move(ingress);
    p.build_index();
  }
  return p;
}

inline void write_problem(const SharingProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << problem_to_json(p).dump(2) << "\n";
}

inline SharingProblem read_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  nlohmann::json j;
  try {
    in >> j;
    return problem_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("failed to parse scenario file " + path + ": " + e.what());
  }
}

inline std::string format_sig(double v, int digits = 12) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

inline std::string allocation_csv(const SharingProblem& p, const SharingAllocation& a) {
  std::ostringstream os;
  os << "user_id,serving_cell,helper_cell,x\n";
  for (int k = 0; k < p.scenario.num_users(); ++k)
    for (int n = 0; n < p.degree(k); ++n)
      os << k << "," << p.scenario.users[k].serving_cell << "," << p.ingress[k][n]
         << "," << format_sig(a.x[p.var_offset[k] + n]) << "\n";
  return os.str();
}

inline void write_allocation(const SharingProblem& p, const SharingAllocation& a,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << allocation_csv(p, a);
}

inline SharingAllocation read_allocation(const SharingProblem& p, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  SharingAllocation a = SharingAllocation::zeros(p);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    int user = std::stoi(field);
    std::getline(ls, field, ',');  // serving cell, redundant
    std::getline(ls, field, ',');
    int helper = std::stoi(field);
    std::getline(ls, field, ',');
    a.set(p, helper, user, std::stod(field));
  }
  return a;
}

inline void write_trace(const SharingProblem& p, const SolverReport& rep,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "iter,objective,max_violation";
  for (int i = 0; i < p.scenario.num_cells(); ++i) out << ",demand_cell" << i;
  out << "\n";
  for (int t = 0; t < rep.iterations; ++t) {
    out << (t + 1) << "," << format_sig(rep.objective_trace[t]) << ","
        << format_sig(rep.max_violation_trace[t]);
    for (double d : rep.egress_demand_trace[t]) out << "," << format_sig(d);
    out << "\n";
  }
}

}  // namespace maas
