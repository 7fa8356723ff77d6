#pragma once

#include <string>
#include <vector>

#include "llg/stepper.hpp"

namespace llg {

/// Closed-form benchmark solution
///   m_e = (cos(P) sin t, sin(P) sin t, cos t),
/// P = cos(pi x) in 1D and cos(pi x) cos(pi y) cos(pi z) in 3D, together with
/// the compensating forcing for the model with eps = 1 and f = 0. |m_e| = 1
/// identically and the homogeneous Neumann condition holds on the unit box.
struct ManufacturedCase {
  int dim = 1;
  double alpha = 0.01;
  double T = 0.1;

  Vec3 exact(Vec3 x, double t) const;
  Vec3 forcing(Vec3 x, double t) const;

  VectorField sample_exact(const GridSpec& g, double t) const;
  Stepper::ForcingFn forcing_fn(const GridSpec& g) const;
};

enum class BootstrapMode { Exact, Substep };

struct StudyRow {
  Scheme scheme;
  int dim = 1;
  double k = 0.0;
  double h = 0.0;
  NormTriple err;
  double seconds = 0.0;
  long gmres_iters = 0;
};

struct ConvergenceReport {
  std::vector<StudyRow> rows;
  NormTriple orders;  // least-squares slopes of log err vs log k (or log h)
};

struct StudyConfig {
  KrylovConfig krylov = tight_krylov();
  BootstrapMode bootstrap = BootstrapMode::Exact;
  int timing_repeats = 1;
  int refine_passes = 2;  // keeps solver noise under the finest table rows

  static KrylovConfig tight_krylov();
};

/// Error at T vs the time step over a schedule of step counts; 1D runs use a
/// fixed fine grid (paper setup: 1/h = 10000).
ConvergenceReport temporal_study_1d(Scheme s, const ManufacturedCase& c,
                                    const std::vector<int>& n_steps, int grid_n,
                                    const StudyConfig& cfg = {});

/// Coordinated 3D refinement: k = T/N0 with the grid resolution tied to the
/// scheme order (k = h^2 for BDF1, k = h for BDF2, k = h^{4/3} for BDF3).
ConvergenceReport temporal_study_3d(Scheme s, const ManufacturedCase& c,
                                    const std::vector<int>& n0, const StudyConfig& cfg = {});
int coordinated_grid_n(Scheme s, double T, int n0);

/// Error at T vs h at a fixed small time step.
ConvergenceReport spatial_study(Scheme s, const ManufacturedCase& c,
                                const std::vector<int>& grid_ns, double k,
                                const StudyConfig& cfg = {});

/// Wall time vs achieved max-norm error, varying k at fixed h. Timing covers
/// the time loop only; `timing_repeats` runs are taken and the median kept.
ConvergenceReport efficiency_study(Scheme s, const ManufacturedCase& c,
                                   const std::vector<int>& n_steps, int grid_n,
                                   const StudyConfig& cfg = {});

/// Time to reach a given error by log-log interpolation along a ladder of
/// (error, seconds) rows sorted by error. Extrapolates at most one decade.
double seconds_at_error(const std::vector<StudyRow>& rows, double err_target);

double fit_order(const std::vector<double>& x, const std::vector<double>& y);
NormTriple fitted_orders(const std::vector<StudyRow>& rows, bool vs_k);

void write_study_csv(const std::string& path, const std::vector<StudyRow>& rows);

}  // namespace llg
