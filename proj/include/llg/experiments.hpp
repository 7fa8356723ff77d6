#pragma once

#include <string>
#include <vector>

#include "llg/demag.hpp"
#include "llg/stepper.hpp"
#include "llg/verify.hpp"

namespace llg {

/// Thin-film stability/energy experiment: uniform in-plane start, no applied
/// field, sweep over damping.
struct FilmConfig {
  double Lx_nm = 480, Ly_nm = 480, Lz_nm = 20;
  int nx = 100, ny = 100, nz = 4;
  double k_ps = 1.0;
  double T_ns = 2.0;
  std::vector<double> alphas = {0.0, 0.01, 0.1, 1.0, 5.0, 10.0, 40.0, 100.0};
  Scheme scheme = Scheme::BDF3;
  bool demag = true;
  int bootstrap_substeps = 10;
  int sample_every = 1;

  static FilmConfig downscaled();  // 240x240x20 nm on 50x50x2 cells, 0.5 ns
};

/// Nanostrip domain-wall experiment: Neel wall driven by a field along +x.
struct StripConfig {
  double Lx_nm = 800, Ly_nm = 100, Lz_nm = 4;
  int nx = 128, ny = 64, nz = 4;
  double k_ps = 1.0;
  double T_ns = 1.6;
  std::vector<double> alphas = {0.1, 0.4, 0.8, 1.0, 2.0, 3.0, 5.0};
  std::vector<double> he_mT = {5.0, 6.0, 7.0, 8.0, 9.0};
  double relax_ns = 0.5;
  double relax_alpha = 5.0;
  double delta_nm = 20.0;  // initial wall-width parameter; 0 = sqrt(eps/q) balance
  Scheme scheme = Scheme::BDF3;
  bool demag = true;
  int bootstrap_substeps = 10;
  int sample_every = 4;
  bool average_wall_over_width = false;

  static StripConfig fallback();  // 64x32x2 grid, same extents
};

/// Shared device-run plumbing: dimensionless grid (L = longest extent),
/// material constants, physical cell sizes, step counts.
struct DeviceSetup {
  GridSpec grid;
  MaterialParams params;
  Vec3 cell_nm;
  double k = 0.0;  // dimensionless
  int steps = 0;

  double t_ns(int step) const { return step * params.t_unit_ps() * k_to_ps / 1000.0; }
  double k_to_ps = 0.0;  // k in ps
};

DeviceSetup film_setup(const FilmConfig& cfg, double alpha);
DeviceSetup strip_setup(const StripConfig& cfg, double alpha);

struct EnergySample {
  double t_ns = 0.0;
  double energy = 0.0;  // dimensionless
};

struct StabilityOutcome {
  Scheme scheme = Scheme::BDF3;
  double alpha = 0.0;
  double k_ps = 0.0;
  bool stable = false;
  int steps_completed = 0;
  double final_energy = 0.0;
  std::string reason;  // empty when stable
  std::vector<EnergySample> energy_trace;
  std::vector<double> angle_map;  // atan2(m2, m1) on the mid-z slice, nx*ny
  double max_unit_dev = 0.0;
};

/// One film run. Instability (solver rejection, non-finite state, energy
/// blowup past 10x the initial value) is a recorded outcome.
StabilityOutcome stability_run(const FilmConfig& cfg, Scheme scheme, double alpha,
                               const DemagOperator* shared_op = nullptr);
std::vector<StabilityOutcome> stability_sweep(const FilmConfig& cfg, Scheme scheme,
                                              int threads = 1);

/// First sampled time at which frac of the initial excess energy (relative to
/// the final sample) has dissipated; NaN if never reached.
double dissipation_time(const std::vector<EnergySample>& trace, double frac = 0.9);

/// tanh/sech 180-degree in-plane wall centered at Lx/2, |m| = 1 pointwise.
VectorField init_neel_wall(const GridSpec& grid, double delta_dimless);

/// Zero crossing of m1 along the centerline (mid y,z); dimensionless x.
/// Throws "wall lost" when no +to- crossing exists.
double wall_position(const VectorField& m, bool average_over_width = false);

struct WallTrace {
  std::vector<double> t_ns;
  std::vector<double> x_nm;
};

struct VelocityFit {
  double velocity = 0.0;  // m/s
  double r2 = 0.0;
  bool steady = false;  // r2 >= 0.9 over the fit window
};

/// Least-squares slope of x_w(t) over the trailing window (m/s, since the
/// trace is nm vs ns). Requires >= 10 samples in the window.
VelocityFit wall_velocity(const WallTrace& trace, double window_frac = 0.5);

struct WallRun {
  double alpha = 0.0;
  double he_mT = 0.0;
  VelocityFit fit;
  WallTrace trace;
};

VectorField relax_wall(const StripConfig& cfg, const DemagOperator& op);
WallRun wall_run(const StripConfig& cfg, const DemagOperator& op, const VectorField& start,
                 double alpha, double he_mT);

struct FieldSweepRow {
  double alpha = 0.0;
  std::vector<double> velocity;  // one per he value
  double slope = 0.0;            // (m/s)/mT
  double r2 = 0.0;               // of the per-alpha linear fit
};

struct FieldSweepResult {
  std::vector<WallRun> runs;
  std::vector<FieldSweepRow> table;
};

FieldSweepResult field_sweep(const StripConfig& cfg, int threads = 1);

// Simple least squares y = a + b x; returns (b, r2).
std::pair<double, double> linear_fit(const std::vector<double>& x,
                                     const std::vector<double>& y);

void write_stability_csv(const std::string& path, const std::vector<StabilityOutcome>& v);
void write_energy_trace_csv(const std::string& path, const std::vector<EnergySample>& t);
void write_wall_trace_csv(const std::string& path, const WallTrace& t);
void write_velocity_csv(const std::string& path, const StripConfig& cfg,
                        const FieldSweepResult& r);
void write_angle_map_csv(const std::string& path, const GridSpec& g, Vec3 cell_nm,
                         const std::vector<double>& angles);

}  // namespace llg
