// Copyright (c) 2026 The lsfem authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver for the built-in convergence studies.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lsfem/benchmarks.hpp"

namespace {

struct CliConfig {
  std::string case_name;
  std::vector<int> levels;
  std::string ghost = "dirichlet";
  std::string band = "full";
  double eps_factor = 2.0;
  int m_damp = 2;
  std::string out;
  bool vtk = false;
  bool analytic_ls = false;
  bool advect_ls = false;
  std::string search = "traversal";
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw CLI::ValidationError("config", "not a boolean: " + v);
}

std::vector<int> parse_levels(const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(std::stoi(trim(item)));
  return out;
}

// key=value lines; '#' starts a comment. Values override the flags.
void apply_config_file(const std::string& path, CliConfig& cfg) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("--config", "cannot open " + path);
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("config", "expected key=value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "case")
      cfg.case_name = val;
    else if (key == "levels")
      cfg.levels = parse_levels(val);
    else if (key == "ghost")
      cfg.ghost = val;
    else if (key == "band")
      cfg.band = val;
    else if (key == "eps-factor")
      cfg.eps_factor = std::stod(val);
    else if (key == "m-damp")
      cfg.m_damp = std::stoi(val);
    else if (key == "out")
      cfg.out = val;
    else if (key == "vtk")
      cfg.vtk = parse_bool(val);
    else if (key == "analytic-ls")
      cfg.analytic_ls = parse_bool(val);
    else if (key == "advect-ls")
      cfg.advect_ls = parse_bool(val);
    else if (key == "search")
      cfg.search = val;
    else
      throw CLI::ValidationError("config", "unknown key: " + key);
  }
}

void print_rows(const lsfem::CaseResult& res) {
  std::printf("%8s %8s %14s %8s\n", "inv_h", "inv_dt", "l2_error", "eoc");
  for (const auto& r : res.rows) {
    char inv_dt[32] = "-";
    char eoc[32] = "-";
    if (r.inv_dt) std::snprintf(inv_dt, sizeof inv_dt, "%g", *r.inv_dt);
    if (r.eoc) std::snprintf(eoc, sizeof eoc, "%.2f", *r.eoc);
    std::printf("%8g %8s %14.6e %8s\n", r.inv_h, inv_dt, r.l2_error, eoc);
  }
  for (std::size_t i = 0; i < res.final_radius.size(); ++i)
    std::printf("level %zu: final interface radius %.6f\n", i,
                res.final_radius[i]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Convergence studies for the diffuse-interface embedded-boundary "
      "transport solver"};
  CliConfig cfg;
  std::string config_path;

  app.add_option("--case", cfg.case_name, "benchmark name")->required();
  app.add_option("--levels", cfg.levels, "mesh levels nx, comma separated")
      ->required()
      ->delimiter(',');
  app.add_option("--ghost", cfg.ghost, "penalty kind")
      ->check(CLI::IsMember({"dirichlet", "neumann"}));
  app.add_option("--band", cfg.band, "extension band treatment")
      ->check(CLI::IsMember({"full", "damped"}));
  app.add_option("--eps-factor", cfg.eps_factor,
                 "interface half-width in units of h");
  app.add_option("--m-damp", cfg.m_damp, "damping plateau half-width / eps");
  app.add_option("--out", cfg.out, "output directory for CSV/VTK");
  app.add_flag("--vtk", cfg.vtk, "write field snapshots");
  auto* fa = app.add_flag("--analytic-ls", cfg.analytic_ls,
                          "evaluate the level set analytically everywhere");
  auto* fv = app.add_flag("--advect-ls", cfg.advect_ls,
                          "advect the level set numerically");
  fa->excludes(fv);
  app.add_option("--search", cfg.search, "closest-point search algorithm")
      ->check(CLI::IsMember({"traversal", "bisection"}));
  app.add_option("--config", config_path,
                 "key=value file overriding any flag");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) apply_config_file(config_path, cfg);

    if (cfg.advect_ls) {
      if (cfg.case_name == "parabolic")
        cfg.case_name = "parabolic-ls";
      else if (cfg.case_name != "parabolic-ls")
        throw std::invalid_argument(
            "--advect-ls applies to the parabolic case only");
    }
    if (cfg.levels.empty())
      throw std::invalid_argument("need at least one mesh level");
    for (int nx : cfg.levels)
      if (nx < 2) throw std::invalid_argument("mesh levels must be >= 2");
    if (!(cfg.eps_factor > 0))
      throw std::invalid_argument("--eps-factor must be positive");
    if (cfg.m_damp < 2)
      throw std::invalid_argument("--m-damp must be at least 2");

    lsfem::RunOptions opts;
    opts.ghost = cfg.ghost == "neumann"
                     ? lsfem::GhostPenaltyConfig::Kind::kNeumann
                     : lsfem::GhostPenaltyConfig::Kind::kDirichlet;
    opts.damped = cfg.band == "damped";
    opts.eps_factor = cfg.eps_factor;
    opts.m_damp = cfg.m_damp;
    opts.search = cfg.search == "bisection" ? lsfem::SearchAlgo::kBisection
                                            : lsfem::SearchAlgo::kTraversal;
    opts.analytic_ls = cfg.analytic_ls;
    opts.write_vtk = cfg.vtk;
    if (!cfg.out.empty()) {
      std::filesystem::create_directories(cfg.out);
      opts.out_dir = cfg.out;
    }

    const lsfem::CaseResult res =
        lsfem::run_case(cfg.case_name, cfg.levels, opts);
    std::printf("case %s (%s, %s)\n", cfg.case_name.c_str(),
                cfg.ghost.c_str(), cfg.band.c_str());
    print_rows(res);
  } catch (const lsfem::SolveError& e) {
    std::fprintf(stderr, "solver failure: %s (residual %.3e after %d steps)\n",
                 e.what(), e.residual(), e.iterations());
    return 1;
  } catch (const lsfem::SearchError& e) {
    std::fprintf(stderr, "search failure: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
