#include "llg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "llg/io.hpp"

namespace llg {

FilmConfig FilmConfig::downscaled() {
  FilmConfig c;
  c.Lx_nm = 240;
  c.Ly_nm = 240;
  c.Lz_nm = 20;
  c.nx = 50;
  c.ny = 50;
  c.nz = 2;
  c.T_ns = 0.5;
  return c;
}

StripConfig StripConfig::fallback() {
  StripConfig c;
  c.nx = 64;
  c.ny = 32;
  c.nz = 2;
  return c;
}

namespace {

DeviceSetup device_setup(double Lx, double Ly, double Lz, int nx, int ny, int nz,
                         double k_ps, double T_ns, double alpha) {
  DeviceSetup s;
  const double L = std::max({Lx, Ly, Lz});
  s.params = MaterialParams::permalloy(L * 1e-9, alpha);
  s.grid = GridSpec::box(nx, ny, nz, (Lx / L) / nx, (Ly / L) / ny, (Lz / L) / nz);
  s.cell_nm = {Lx / nx, Ly / ny, Lz / nz};
  s.k = k_ps / s.params.t_unit_ps();
  s.k_to_ps = k_ps;
  s.steps = int(std::lround(T_ns * 1000.0 / k_ps));
  return s;
}

StepperOptions device_options(const DeviceSetup& s, Scheme scheme, Vec3 he,
                              int bootstrap_substeps) {
  StepperOptions o;
  o.scheme = scheme;
  o.k = s.k;
  o.eps = s.params.epsilon;
  o.q = s.params.q;
  o.alpha = s.params.alpha;
  o.he = he;
  o.bootstrap_substeps = bootstrap_substeps;
  return o;
}

}  // namespace

DeviceSetup film_setup(const FilmConfig& cfg, double alpha) {
  return device_setup(cfg.Lx_nm, cfg.Ly_nm, cfg.Lz_nm, cfg.nx, cfg.ny, cfg.nz, cfg.k_ps,
                      cfg.T_ns, alpha);
}

DeviceSetup strip_setup(const StripConfig& cfg, double alpha) {
  return device_setup(cfg.Lx_nm, cfg.Ly_nm, cfg.Lz_nm, cfg.nx, cfg.ny, cfg.nz, cfg.k_ps,
                      cfg.T_ns, alpha);
}

StabilityOutcome stability_run(const FilmConfig& cfg, Scheme scheme, double alpha,
                               const DemagOperator* shared_op) {
  const DeviceSetup s = film_setup(cfg, alpha);
  StabilityOutcome out;
  out.scheme = scheme;
  out.alpha = alpha;
  out.k_ps = cfg.k_ps;

  DemagOperator local;
  const DemagOperator* op = nullptr;
  if (cfg.demag) {
    if (shared_op) {
      op = shared_op;
    } else {
      local = build_demag_operator(s.grid, s.cell_nm);
      op = &local;
    }
  }

  Stepper st(s.grid, device_options(s, scheme, Vec3{}, cfg.bootstrap_substeps), op);
  VectorField m0(s.grid);
  m0.fill(e1);

  auto record = [&](int step) {
    const EnergyValue e = energy(st.m(), st.stray(), Vec3{}, s.params,
                                 st.options().spatial_order());
    out.energy_trace.push_back({step * cfg.k_ps / 1000.0, e.dimensionless});
    return e.dimensionless;
  };

  try {
    st.bootstrap_substep(m0, 0.0);
    const double e0 = record(scheme_order(scheme) - 1);
    const double blowup = 10.0 * std::abs(e0) + 1e-9;
    out.stable = true;
    for (int step = scheme_order(scheme) - 1; step < s.steps; ++step) {
      st.step();
      out.steps_completed = st.steps_taken();
      if ((step + 1) % cfg.sample_every == 0 || step + 1 == s.steps) {
        const double e = record(step + 1);
        if (!std::isfinite(e) || e > blowup) {
          out.stable = false;
          out.reason = "energy blowup";
          break;
        }
      }
    }
  } catch (const std::exception& ex) {
    out.stable = false;
    out.reason = ex.what();
  }

  out.final_energy = out.energy_trace.empty() ? 0.0 : out.energy_trace.back().energy;
  out.max_unit_dev = st.max_unit_norm_violation();

  // In-plane angle of the last accepted state on the mid-z slice.
  try {
    const VectorField& m = st.m();
    out.angle_map.assign(std::size_t(s.grid.nx) * s.grid.ny, 0.0);
    const int kmid = s.grid.nz / 2;
    for (int j = 0; j < s.grid.ny; ++j)
      for (int i = 0; i < s.grid.nx; ++i)
        out.angle_map[i + std::size_t(s.grid.nx) * j] =
            std::atan2(m(1, i, j, kmid), m(0, i, j, kmid));
  } catch (const std::exception&) {
    // no accepted state (bootstrap failed); leave map empty
    out.angle_map.clear();
  }
  return out;
}

std::vector<StabilityOutcome> stability_sweep(const FilmConfig& cfg, Scheme scheme,
                                              int threads) {
  std::vector<StabilityOutcome> out(cfg.alphas.size());
  DemagOperator shared;
  const DemagOperator* op = nullptr;
  if (cfg.demag) {
    const DeviceSetup s = film_setup(cfg, cfg.alphas.empty() ? 1.0 : cfg.alphas[0]);
    shared = build_demag_operator(s.grid, s.cell_nm);
    op = &shared;
  }
  const int nthreads = std::max(1, threads);
  auto worker = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < cfg.alphas.size(); i += stride)
      out[i] = stability_run(cfg, scheme, cfg.alphas[i], op);
  };
  if (nthreads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t, nthreads);
    for (auto& th : pool) th.join();
  }
  return out;
}

double dissipation_time(const std::vector<EnergySample>& trace, double frac) {
  if (trace.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double e0 = trace.front().energy;
  const double ef = trace.back().energy;
  const double excess0 = e0 - ef;
  if (!(excess0 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double threshold = ef + (1.0 - frac) * excess0;
  for (const auto& s : trace)
    if (s.energy <= threshold) return s.t_ns;
  return std::numeric_limits<double>::quiet_NaN();
}

VectorField init_neel_wall(const GridSpec& grid, double delta_dimless) {
  VectorField m(grid);
  const double xc = 0.5 * grid.nx * grid.hx;
  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const double u = ((i + 0.5) * grid.hx - xc) / delta_dimless;
        m.set(i, j, k, {-std::tanh(u), 1.0 / std::cosh(u), 0.0});
      }
  project(m);
  fill_ghosts(m);
  return m;
}

namespace {

double crossing_in_row(const VectorField& m, int j, int k) {
  const GridSpec& g = m.grid;
  for (int i = 0; i + 1 < g.nx; ++i) {
    const double a = m(0, i, j, k), b = m(0, i + 1, j, k);
    if (a >= 0.0 && b < 0.0) {
      const double frac = a / (a - b);
      return (i + 0.5 + frac) * g.hx;
    }
  }
  throw std::runtime_error("wall lost: no +to- crossing of m1");
}

}  // namespace

double wall_position(const VectorField& m, bool average_over_width) {
  const GridSpec& g = m.grid;
  const int kmid = g.nz / 2;
  if (!average_over_width) return crossing_in_row(m, g.ny / 2, kmid);
  double sum = 0.0;
  int count = 0;
  for (int j = 0; j < g.ny; ++j) {
    try {
      sum += crossing_in_row(m, j, kmid);
      ++count;
    } catch (const std::exception&) {
    }
  }
  if (count == 0) throw std::runtime_error("wall lost: no +to- crossing of m1");
  return sum / count;
}

std::pair<double, double> linear_fit(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  const double cov = n * sxy - sx * sy;
  const double var = (n * sxx - sx * sx) * (n * syy - sy * sy);
  const double r2 = var > 0.0 ? cov * cov / var : 1.0;
  return {slope, r2};
}

VelocityFit wall_velocity(const WallTrace& trace, double window_frac) {
  const std::size_t n = trace.t_ns.size();
  const std::size_t start = std::size_t(n * (1.0 - window_frac));
  std::vector<double> t(trace.t_ns.begin() + start, trace.t_ns.end());
  std::vector<double> x(trace.x_nm.begin() + start, trace.x_nm.end());
  if (t.size() < 10) throw std::invalid_argument("wall_velocity: need >= 10 samples");
  VelocityFit fit;
  auto [slope, r2] = linear_fit(t, x);
  fit.velocity = slope;  // nm/ns == m/s
  fit.r2 = r2;
  fit.steady = r2 >= 0.9;
  return fit;
}

VectorField relax_wall(const StripConfig& cfg, const DemagOperator& op) {
  StripConfig rc = cfg;
  rc.T_ns = cfg.relax_ns;
  const DeviceSetup s = strip_setup(rc, cfg.relax_alpha);
  const double delta =
      cfg.delta_nm > 0.0
          ? cfg.delta_nm / (std::max({cfg.Lx_nm, cfg.Ly_nm, cfg.Lz_nm}))
          : std::sqrt(s.params.epsilon / s.params.q);
  VectorField m0 = init_neel_wall(s.grid, delta);
  Stepper st(s.grid, device_options(s, cfg.scheme, Vec3{}, cfg.bootstrap_substeps),
             cfg.demag ? &op : nullptr);
  st.bootstrap_substep(m0, 0.0);
  st.advance(s.steps - (scheme_order(cfg.scheme) - 1));
  return st.m();
}

WallRun wall_run(const StripConfig& cfg, const DemagOperator& op, const VectorField& start,
                 double alpha, double he_mT) {
  const DeviceSetup s = strip_setup(cfg, alpha);
  const double L_nm = std::max({cfg.Lx_nm, cfg.Ly_nm, cfg.Lz_nm});
  const Vec3 he{s.params.he_from_tesla(he_mT * 1e-3), 0.0, 0.0};

  WallRun run;
  run.alpha = alpha;
  run.he_mT = he_mT;

  Stepper st(s.grid, device_options(s, cfg.scheme, he, cfg.bootstrap_substeps),
             cfg.demag ? &op : nullptr);
  st.bootstrap_substep(start, 0.0);
  auto sample = [&](int step) {
    run.trace.t_ns.push_back(step * cfg.k_ps / 1000.0);
    run.trace.x_nm.push_back(wall_position(st.m(), cfg.average_wall_over_width) * L_nm);
  };
  sample(scheme_order(cfg.scheme) - 1);
  for (int step = scheme_order(cfg.scheme) - 1; step < s.steps; ++step) {
    st.step();
    if ((step + 1) % cfg.sample_every == 0 || step + 1 == s.steps) sample(step + 1);
  }
  run.fit = wall_velocity(run.trace);
  return run;
}

FieldSweepResult field_sweep(const StripConfig& cfg, int threads) {
  FieldSweepResult result;
  const DeviceSetup s0 = strip_setup(cfg, 1.0);
  const DemagOperator op = build_demag_operator(s0.grid, s0.cell_nm);
  const VectorField relaxed = relax_wall(cfg, op);

  const std::size_t cells = cfg.alphas.size() * cfg.he_mT.size();
  result.runs.resize(cells);
  auto worker = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t c = begin; c < cells; c += stride) {
      const double alpha = cfg.alphas[c / cfg.he_mT.size()];
      const double he = cfg.he_mT[c % cfg.he_mT.size()];
      result.runs[c] = wall_run(cfg, op, relaxed, alpha, he);
    }
  };
  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t, nthreads);
    for (auto& th : pool) th.join();
  }

  for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
    FieldSweepRow row;
    row.alpha = cfg.alphas[a];
    std::vector<double> he, v;
    for (std::size_t f = 0; f < cfg.he_mT.size(); ++f) {
      const auto& run = result.runs[a * cfg.he_mT.size() + f];
      row.velocity.push_back(run.fit.velocity);
      he.push_back(run.he_mT);
      v.push_back(run.fit.velocity);
    }
    auto [slope, r2] = linear_fit(he, v);
    row.slope = slope;
    row.r2 = r2;
    result.table.push_back(row);
  }
  return result;
}

void write_stability_csv(const std::string& path, const std::vector<StabilityOutcome>& v) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "scheme,alpha,k_ps,stable,steps,final_energy,reason\n";
  for (const auto& o : v)
    f << scheme_name(o.scheme) << ',' << io::sci(o.alpha) << ',' << io::sci(o.k_ps) << ','
      << (o.stable ? 1 : 0) << ',' << o.steps_completed << ',' << io::sci(o.final_energy)
      << ',' << (o.reason.empty() ? "-" : o.reason) << '\n';
}

void write_energy_trace_csv(const std::string& path, const std::vector<EnergySample>& t) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "t_ns,F_dimensionless\n";
  for (const auto& s : t) f << io::sci(s.t_ns) << ',' << io::sci(s.energy) << '\n';
}

void write_wall_trace_csv(const std::string& path, const WallTrace& t) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "t_ns,x_w_nm\n";
  for (std::size_t i = 0; i < t.t_ns.size(); ++i)
    f << io::sci(t.t_ns[i]) << ',' << io::sci(t.x_nm[i]) << '\n';
}

void write_velocity_csv(const std::string& path, const StripConfig& cfg,
                        const FieldSweepResult& r) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "alpha";
  for (double he : cfg.he_mT) f << ",V_" << he << "mT_mps";
  f << ",slope_mps_per_mT,r2\n";
  for (const auto& row : r.table) {
    f << io::sci(row.alpha);
    for (double v : row.velocity) f << ',' << io::sci(v);
    f << ',' << io::sci(row.slope) << ',' << io::sci(row.r2) << '\n';
  }
}

void write_angle_map_csv(const std::string& path, const GridSpec& g, Vec3 cell_nm,
                         const std::vector<double>& angles) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "x_nm,y_nm,angle_rad\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f << io::sci((i + 0.5) * cell_nm.x) << ',' << io::sci((j + 0.5) * cell_nm.y) << ','
        << io::sci(angles[i + std::size_t(g.nx) * j]) << '\n';
}

}  // namespace llg
