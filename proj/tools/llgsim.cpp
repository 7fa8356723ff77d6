// llgsim: command-line front end for the micromagnetics engine — convergence
// and efficiency studies, thin-film stability/energy sweeps, domain-wall
// velocity experiments, and demag self-checks. Every subcommand writes CSV
// outputs plus a metadata echo of the effective configuration.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "llg/demag.hpp"
#include "llg/experiments.hpp"
#include "llg/io.hpp"
#include "llg/verify.hpp"

namespace {

constexpr const char* kVersion = "llgsim 0.1.0";

struct CommonOpts {
  std::string out = "out";
  long seed = 0;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("-o,--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "seed echoed into metadata (runs are deterministic)");
  cmd->add_option("--threads", c.threads, "worker threads for sweep cells")
      ->envname("LLGSIM_THREADS");
}

llg::Scheme parse_scheme(const std::string& s) {
  if (s == "bdf1") return llg::Scheme::BDF1;
  if (s == "bdf2") return llg::Scheme::BDF2;
  if (s == "bdf3") return llg::Scheme::BDF3;
  throw CLI::ValidationError("scheme", "must be bdf1|bdf2|bdf3");
}

std::vector<llg::Scheme> parse_schemes(const std::string& s) {
  if (s == "all") return {llg::Scheme::BDF1, llg::Scheme::BDF2, llg::Scheme::BDF3};
  return {parse_scheme(s)};
}

void write_metadata(const CLI::App& app, const std::string& dir, double wall_seconds,
                    double t_unit_ps = 0.0) {
  std::ofstream f(dir + "/metadata.txt");
  f << "# " << kVersion << "\n";
  f << "# wall_seconds = " << llg::io::sci(wall_seconds) << "\n";
  if (t_unit_ps > 0.0) f << "# t_unit_ps = " << llg::io::sci(t_unit_ps) << "\n";
  // The echo feeds back through --config; unset vector options print as {}
  // which does not re-parse, and they carry no information anyway.
  std::istringstream cfg(app.config_to_str(true, true));
  std::string line;
  while (std::getline(cfg, line))
    if (line.find("=\"{}\"") == std::string::npos && line.find("={}") == std::string::npos)
      f << line << "\n";
}

// Default step-count schedules from the accuracy tables.
std::vector<int> default_steps(llg::Scheme s, int dim) {
  using llg::Scheme;
  if (dim == 1)
    return s == Scheme::BDF3 ? std::vector<int>{12, 16, 24, 32, 36}
                             : std::vector<int>{8, 12, 16, 24, 32};
  switch (s) {
    case Scheme::BDF1: return {40, 57, 78, 102, 129};
    case Scheme::BDF2: return {2, 3, 4, 5, 6};
    case Scheme::BDF3: return {6, 7, 8, 9, 11};
  }
  return {};
}

int run_converge_time(const CLI::App& app, const CommonOpts& common,
                      const std::string& scheme, int dim, int grid_n, double alpha,
                      double T, const std::string& bootstrap, std::vector<int> steps) {
  llg::io::ensure_dir(common.out);
  const auto t0 = std::chrono::steady_clock::now();
  llg::ManufacturedCase mc{dim, alpha, T};
  llg::StudyConfig cfg;
  cfg.bootstrap =
      bootstrap == "substep" ? llg::BootstrapMode::Substep : llg::BootstrapMode::Exact;
  std::vector<llg::StudyRow> rows;
  for (llg::Scheme s : parse_schemes(scheme)) {
    const std::vector<int> sched = steps.empty() ? default_steps(s, dim) : steps;
    llg::ConvergenceReport rep = dim == 1
                                     ? llg::temporal_study_1d(s, mc, sched, grid_n, cfg)
                                     : llg::temporal_study_3d(s, mc, sched, cfg);
    rows.insert(rows.end(), rep.rows.begin(), rep.rows.end());
    std::printf("%s dim=%d fitted orders: inf %.3f  l2 %.3f  h1 %.3f\n",
                llg::scheme_name(s), dim, rep.orders.linf, rep.orders.l2, rep.orders.h1);
  }
  llg::write_study_csv(common.out + "/converge_time.csv", rows);
  write_metadata(app, common.out,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int run_converge_space(const CLI::App& app, const CommonOpts& common,
                       const std::string& scheme, int dim, double k, double alpha, double T,
                       std::vector<int> grids) {
  llg::io::ensure_dir(common.out);
  const auto t0 = std::chrono::steady_clock::now();
  llg::ManufacturedCase mc{dim, alpha, T};
  llg::StudyConfig cfg;
  if (grids.empty())
    grids = dim == 1 ? std::vector<int>{16, 32, 64, 128, 256}
                     : std::vector<int>{4, 6, 8, 10, 12};
  std::vector<llg::StudyRow> rows;
  for (llg::Scheme s : parse_schemes(scheme)) {
    llg::ConvergenceReport rep = llg::spatial_study(s, mc, grids, k, cfg);
    rows.insert(rows.end(), rep.rows.begin(), rep.rows.end());
    std::printf("%s dim=%d fitted spatial orders: inf %.3f  l2 %.3f  h1 %.3f\n",
                llg::scheme_name(s), dim, rep.orders.linf, rep.orders.l2, rep.orders.h1);
  }
  llg::write_study_csv(common.out + "/converge_space.csv", rows);
  write_metadata(app, common.out,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int run_efficiency(const CLI::App& app, const CommonOpts& common, int grid_n, double alpha,
                   double T, int repeats) {
  llg::io::ensure_dir(common.out);
  const auto t0 = std::chrono::steady_clock::now();
  llg::ManufacturedCase mc{1, alpha, T};
  llg::StudyConfig cfg;
  cfg.timing_repeats = repeats;
  std::vector<llg::StudyRow> rows;
  const std::vector<std::pair<llg::Scheme, std::vector<int>>> ladders = {
      {llg::Scheme::BDF1, {1000, 2000, 4000, 9000}},
      {llg::Scheme::BDF2, {32, 64, 96, 128, 192}},
      {llg::Scheme::BDF3, {3, 4, 6, 8, 12}},
  };
  for (const auto& [s, ladder] : ladders) {
    llg::ConvergenceReport rep = llg::efficiency_study(s, mc, ladder, grid_n, cfg);
    rows.insert(rows.end(), rep.rows.begin(), rep.rows.end());
  }
  llg::write_study_csv(common.out + "/efficiency.csv", rows);
  write_metadata(app, common.out,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

int run_stability(const CLI::App& app, const CommonOpts& common, const std::string& scheme,
                  bool downscaled, double k_ps, double T_ns, std::vector<double> alphas,
                  bool no_demag, bool write_energy, bool write_fields) {
  llg::io::ensure_dir(common.out);
  const auto t0 = std::chrono::steady_clock::now();
  llg::FilmConfig cfg = downscaled ? llg::FilmConfig::downscaled() : llg::FilmConfig{};
  cfg.k_ps = k_ps;
  if (T_ns > 0) cfg.T_ns = T_ns;
  if (!alphas.empty()) cfg.alphas = alphas;
  cfg.demag = !no_demag;

  std::vector<llg::StabilityOutcome> all;
  for (llg::Scheme s : parse_schemes(scheme)) {
    cfg.scheme = s;
    auto outcomes = llg::stability_sweep(cfg, s, common.threads);
    for (const auto& o : outcomes) {
      std::printf("%s alpha=%-6g -> %s (steps %d, final energy %.6e)%s%s\n",
                  llg::scheme_name(s), o.alpha, o.stable ? "stable" : "UNSTABLE",
                  o.steps_completed, o.final_energy, o.reason.empty() ? "" : ": ",
                  o.reason.c_str());
      if (write_energy) {
        std::ostringstream name;
        name << common.out << "/energy_" << llg::scheme_name(s) << "_alpha" << o.alpha
             << ".csv";
        llg::write_energy_trace_csv(name.str(), o.energy_trace);
      }
      if (write_fields && !o.angle_map.empty()) {
        const llg::DeviceSetup ds = llg::film_setup(cfg, o.alpha);
        std::ostringstream name;
        name << common.out << "/angle_" << llg::scheme_name(s) << "_alpha" << o.alpha
             << ".csv";
        llg::write_angle_map_csv(name.str(), ds.grid, ds.cell_nm, o.angle_map);
      }
    }
    all.insert(all.end(), outcomes.begin(), outcomes.end());
  }
  llg::write_stability_csv(common.out + "/stability.csv", all);
  const llg::DeviceSetup ds = llg::film_setup(cfg, 1.0);
  write_metadata(app, common.out,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                 ds.params.t_unit_ps());
  return 0;
}

int run_domain_wall(const CLI::App& app, const CommonOpts& common, bool fallback,
                    double k_ps, double T_ns, std::vector<double> alphas,
                    std::vector<double> fields, bool no_demag, bool write_traces,
                    bool write_fields) {
  llg::io::ensure_dir(common.out);
  const auto t0 = std::chrono::steady_clock::now();
  llg::StripConfig cfg = fallback ? llg::StripConfig::fallback() : llg::StripConfig{};
  cfg.k_ps = k_ps;
  if (T_ns > 0) cfg.T_ns = T_ns;
  if (!alphas.empty()) cfg.alphas = alphas;
  if (!fields.empty()) cfg.he_mT = fields;
  cfg.demag = !no_demag;

  llg::FieldSweepResult result = llg::field_sweep(cfg, common.threads);
  llg::write_velocity_csv(common.out + "/velocity.csv", cfg, result);
  for (const auto& row : result.table) {
    std::printf("alpha=%-6g slope=%.4f (m/s)/mT r2=%.5f V(m/s):", row.alpha, row.slope,
                row.r2);
    for (double v : row.velocity) std::printf(" %.1f", v);
    std::printf("\n");
  }
  if (write_traces)
    for (const auto& run : result.runs) {
      std::ostringstream name;
      name << common.out << "/wall_alpha" << run.alpha << "_he" << run.he_mT << "mT.csv";
      llg::write_wall_trace_csv(name.str(), run.trace);
    }
  if (write_fields) {
    // Snapshot of the relaxed starting state for external viewers.
    const llg::DeviceSetup s0 = llg::strip_setup(cfg, 1.0);
    llg::DemagOperator op = llg::build_demag_operator(s0.grid, s0.cell_nm);
    llg::VectorField relaxed = llg::relax_wall(cfg, op);
    llg::io::write_field_bin(relaxed, common.out + "/wall_initial.field");
    llg::io::write_field_vtk(relaxed, common.out + "/wall_initial.vtk");
  }
  const llg::DeviceSetup ds = llg::strip_setup(cfg, 1.0);
  write_metadata(app, common.out,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                 ds.params.t_unit_ps());
  return 0;
}

int run_demag_check(const CLI::App& app, const CommonOpts& common, int grid,
                    std::vector<double> cell) {
  llg::io::ensure_dir(common.out);
  const auto t0 = std::chrono::steady_clock::now();
  if (cell.size() != 3) cell = {1.0, 1.0, 1.0};
  llg::GridSpec g = llg::GridSpec::cube(grid);
  llg::DemagOperator op = llg::build_demag_operator(g, {cell[0], cell[1], cell[2]});
  llg::VectorField m(g);
  m.fill(llg::e1);
  llg::VectorField hs = llg::stray_field(op, m);
  double mean = 0.0;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) mean += hs(0, i, j, k);
  mean /= double(g.cells());
  std::printf("uniform cube %d^3: mean h_x = %.6f (expected -1/3 for cubic cells)\n", grid,
              mean);
  std::ofstream f(common.out + "/demag_check.csv");
  f << "grid,cell_x,cell_y,cell_z,mean_hx\n"
    << grid << ',' << llg::io::sci(cell[0]) << ',' << llg::io::sci(cell[1]) << ','
    << llg::io::sci(cell[2]) << ',' << llg::io::sci(mean) << '\n';
  write_metadata(app, common.out,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"micromagnetics simulation engine (semi-implicit projection schemes)"};
  app.option_defaults()->always_capture_default();  // faithful metadata echo
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "read options from a flat key=value file");
  app.require_subcommand(1);

  auto* ct = app.add_subcommand("converge-time", "temporal accuracy study");
  CommonOpts ct_common;
  add_common(ct, ct_common);
  std::string ct_scheme = "all", ct_bootstrap = "exact";
  int ct_dim = 1, ct_grid = 10000;
  double ct_alpha = 0.01, ct_T = 0.1;
  std::vector<int> ct_steps;
  ct->add_option("--scheme", ct_scheme, "bdf1|bdf2|bdf3|all");
  ct->add_option("--dim", ct_dim, "1 or 3")->check(CLI::IsMember({1, 3}));
  ct->add_option("--grid-n", ct_grid, "1D cells (1/h)");
  ct->add_option("--alpha", ct_alpha, "Gilbert damping");
  ct->add_option("--T", ct_T, "final dimensionless time");
  ct->add_option("--steps", ct_steps, "step-count schedule (k = T/steps)");
  ct->add_option("--bootstrap", ct_bootstrap, "exact|substep")
      ->check(CLI::IsMember({"exact", "substep"}));

  auto* cs = app.add_subcommand("converge-space", "spatial accuracy study");
  CommonOpts cs_common;
  add_common(cs, cs_common);
  std::string cs_scheme = "all";
  int cs_dim = 1;
  double cs_k = 1e-5, cs_alpha = 0.01, cs_T = 0.1;
  std::vector<int> cs_grids;
  cs->add_option("--scheme", cs_scheme, "bdf1|bdf2|bdf3|all");
  cs->add_option("--dim", cs_dim, "1 or 3")->check(CLI::IsMember({1, 3}));
  cs->add_option("--k", cs_k, "fixed time step");
  cs->add_option("--alpha", cs_alpha, "Gilbert damping");
  cs->add_option("--T", cs_T, "final dimensionless time");
  cs->add_option("--grids", cs_grids, "grid resolutions (1/h)");

  auto* ef = app.add_subcommand("efficiency", "wall time vs error, varying k");
  CommonOpts ef_common;
  add_common(ef, ef_common);
  int ef_grid = 5000, ef_repeats = 3;
  double ef_alpha = 0.01, ef_T = 0.1;
  ef->add_option("--grid-n", ef_grid, "1D cells (1/h)");
  ef->add_option("--alpha", ef_alpha, "Gilbert damping");
  ef->add_option("--T", ef_T, "final dimensionless time");
  ef->add_option("--repeats", ef_repeats, "timing repeats (median kept)");

  auto* st = app.add_subcommand("stability", "thin-film damping sweep");
  CommonOpts st_common;
  add_common(st, st_common);
  std::string st_scheme = "bdf3";
  bool st_down = false, st_nodemag = false, st_fields = false;
  double st_kps = 1.0, st_Tns = -1.0;
  std::vector<double> st_alphas;
  st->add_option("--scheme", st_scheme, "bdf1|bdf2|bdf3|all");
  st->add_flag("--downscaled", st_down, "50x50x2 cells on 240x240x20 nm");
  st->add_option("--k-ps", st_kps, "time step in ps");
  st->add_option("--T-ns", st_Tns, "duration in ns");
  st->add_option("--alphas", st_alphas, "damping values");
  st->add_flag("--no-demag", st_nodemag, "disable the stray field");
  st->add_flag("--write-angle-maps", st_fields, "emit per-alpha angle maps");

  auto* en = app.add_subcommand("energy", "thin-film energy decay traces");
  CommonOpts en_common;
  add_common(en, en_common);
  std::string en_scheme = "bdf3";
  bool en_down = false, en_nodemag = false;
  double en_kps = 1.0, en_Tns = -1.0;
  std::vector<double> en_alphas = {0.1, 1.0, 5.0, 10.0};
  en->add_option("--scheme", en_scheme, "bdf1|bdf2|bdf3|all");
  en->add_flag("--downscaled", en_down, "50x50x2 cells on 240x240x20 nm");
  en->add_option("--k-ps", en_kps, "time step in ps");
  en->add_option("--T-ns", en_Tns, "duration in ns");
  en->add_option("--alphas", en_alphas, "damping values");
  en->add_flag("--no-demag", en_nodemag, "disable the stray field");

  auto* dw = app.add_subcommand("domain-wall", "Neel wall velocity sweep");
  CommonOpts dw_common;
  add_common(dw, dw_common);
  bool dw_fallback = false, dw_nodemag = false, dw_traces = false, dw_fields = false;
  double dw_kps = 1.0, dw_Tns = -1.0;
  std::vector<double> dw_alphas, dw_fields_mT;
  dw->add_flag("--fallback", dw_fallback, "64x32x2 grid instead of 128x64x4");
  dw->add_option("--k-ps", dw_kps, "time step in ps");
  dw->add_option("--T-ns", dw_Tns, "duration in ns");
  dw->add_option("--alphas", dw_alphas, "damping values");
  dw->add_option("--fields-mT", dw_fields_mT, "applied fields in mT");
  dw->add_flag("--no-demag", dw_nodemag, "disable the stray field");
  dw->add_flag("--write-traces", dw_traces, "emit per-cell wall traces");
  dw->add_flag("--write-fields", dw_fields, "emit relaxed-state snapshots");

  auto* dc = app.add_subcommand("demag-check", "uniform-cube demag sanity check");
  CommonOpts dc_common;
  add_common(dc, dc_common);
  int dc_grid = 16;
  std::vector<double> dc_cell = {1.0, 1.0, 1.0};
  dc->add_option("--grid", dc_grid, "cells per axis");
  dc->add_option("--cell", dc_cell, "cell dimensions")->expected(3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (ct->parsed())
      return run_converge_time(app, ct_common, ct_scheme, ct_dim, ct_grid, ct_alpha, ct_T,
                               ct_bootstrap, ct_steps);
    if (cs->parsed())
      return run_converge_space(app, cs_common, cs_scheme, cs_dim, cs_k, cs_alpha, cs_T,
                                cs_grids);
    if (ef->parsed())
      return run_efficiency(app, ef_common, ef_grid, ef_alpha, ef_T, ef_repeats);
    if (st->parsed())
      return run_stability(app, st_common, st_scheme, st_down, st_kps, st_Tns, st_alphas,
                           st_nodemag, true, st_fields);
    if (en->parsed())
      return run_stability(app, en_common, en_scheme, en_down, en_kps, en_Tns, en_alphas,
                           en_nodemag, true, false);
    if (dw->parsed())
      return run_domain_wall(app, dw_common, dw_fallback, dw_kps, dw_Tns, dw_alphas,
                             dw_fields_mT, dw_nodemag, dw_traces, dw_fields);
    if (dc->parsed()) return run_demag_check(app, dc_common, dc_grid, dc_cell);
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
