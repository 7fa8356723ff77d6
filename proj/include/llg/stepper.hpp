#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "llg/demag.hpp"
#include "llg/fft.hpp"
#include "llg/grid.hpp"
#include "llg/krylov.hpp"
#include "llg/physics.hpp"

namespace llg {

enum class Scheme { BDF1 = 1, BDF2 = 2, BDF3 = 3 };

int scheme_order(Scheme s);
double scheme_c0(Scheme s);  // 1, 3/2, 11/6
const char* scheme_name(Scheme s);
// Spatial operators paired with each scheme: BDF1/BDF2 run the classic
// three-point stencils, the third-order scheme runs the long stencils.
SpatialOrder scheme_spatial(Scheme s);

/// Explicit polynomial prediction at the next level from history (newest
/// last): order 1 copies, order 2 gives 2a-b, order 3 gives 3a-3b+c.
VectorField extrapolate(std::span<const VectorField> history, int order);

/// Matrix-free implicit operator y -> (c0/k) y - alpha eps lap(y)
/// + m_hat x (eps lap(y)), acting on flat component-major vectors of interior
/// cells. Ghost reflection is applied to y before the stencils.
LinearOp make_implicit_operator(const GridSpec& grid, Scheme scheme, double k, double eps,
                                double alpha, VectorField m_hat, SpatialOrder order);

/// Exact inverse of the frozen-coefficient operator
///   base y - alpha_eps lap(y) + eps m_bar x lap(y)
/// with a constant coupling vector m_bar, block-diagonal (3x3 per mode) in
/// the cell-centered cosine basis that the ghost reflection realizes. Used as
/// a right preconditioner; m_bar is refreshed each step with the volume
/// average of the extrapolated magnetization.
class SpectralShiftPrecond {
 public:
  SpectralShiftPrecond(const GridSpec& grid, double base, double alpha_eps, double eps,
                       SpatialOrder order);
  void set_coupling(Vec3 m_bar) { m_bar_ = m_bar; }
  void apply(std::span<const double> in, std::span<double> out) const;
  LinearOp op() const;

 private:
  GridSpec grid_;
  std::array<std::optional<fft::Dct>, 3> dct_;
  std::array<std::vector<double>, 3> lambda_;
  double base_ = 1.0;
  double alpha_eps_ = 0.0;
  double eps_ = 0.0;
  Vec3 m_bar_{};
  mutable std::array<std::vector<double>, 3> work_;
  mutable std::vector<double> line_in_, line_out_;
};

/// Pointwise renormalization m = m~ / |m~|. Throws on a zero-magnitude cell.
void project(VectorField& m);

struct StepRejected : std::runtime_error {
  StepRejected(const std::string& what, SolveStats s)
      : std::runtime_error(what), stats(s) {}
  SolveStats stats;
};

struct StepperOptions {
  Scheme scheme = Scheme::BDF3;
  double k = 1e-3;
  double eps = 1.0;
  double q = 0.0;
  double alpha = 0.0;
  Vec3 he{};
  std::optional<SpatialOrder> spatial;  // defaults to scheme_spatial(scheme)
  KrylovConfig krylov{};
  bool use_spectral_precond = true;
  // Extra residual-recompute/correct passes after the main solve. The stencil
  // scale 1/h^2 caps attainable residuals near 1e-10 relative in double
  // precision; refinement pushes the smooth solution error further down,
  // which the finest accuracy-study rows need.
  int refine_passes = 0;
  int bootstrap_substeps = 100;

  SpatialOrder spatial_order() const { return spatial.value_or(scheme_spatial(scheme)); }
};

/// Semi-implicit projection time integrator. History ring holds the last
/// `order` accepted magnetization levels and their composite source terms;
/// each step extrapolates coefficients, solves the implicit system by GMRES
/// warm-started from the previous level, projects back to the unit sphere,
/// and refreshes the stray field once.
class Stepper {
 public:
  using ForcingFn = std::function<void(double t, VectorField& g_out)>;

  Stepper(const GridSpec& grid, StepperOptions opt, const DemagOperator* demag = nullptr,
          ForcingFn forcing = nullptr);

  // Seed all history levels directly (oldest first, spaced k apart starting
  // at t_oldest). Levels must already satisfy |m| = 1.
  void seed_history(std::vector<VectorField> levels, double t_oldest = 0.0);
  // Generate the missing history levels from m0 with fine BDF1 substeps.
  void bootstrap_substep(const VectorField& m0, double t0 = 0.0);

  void step();
  void advance(int nsteps);

  const GridSpec& grid() const { return grid_; }
  const StepperOptions& options() const { return opt_; }
  const VectorField& m() const;  // newest accepted level, ghosts synchronized
  const VectorField* stray() const { return demag_ ? &hs_ : nullptr; }
  double time() const { return t_newest_; }
  int steps_taken() const { return steps_; }
  long total_gmres_iters() const { return gmres_iters_; }
  double max_unit_norm_violation() const { return max_unit_dev_; }
  const std::vector<VectorField>& history() const { return hist_m_; }

 private:
  SourceTerm source_for(const VectorField& m);
  void push_level(VectorField m);

  GridSpec grid_;
  StepperOptions opt_;
  const DemagOperator* demag_ = nullptr;
  ForcingFn forcing_;
  std::vector<VectorField> hist_m_;  // newest last
  std::vector<SourceTerm> hist_f_;
  VectorField hs_;
  double t_newest_ = 0.0;
  int steps_ = 0;
  long gmres_iters_ = 0;
  double max_unit_dev_ = 0.0;
  std::unique_ptr<SpectralShiftPrecond> precond_;
};

}  // namespace llg
