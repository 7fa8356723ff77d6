#include "llg/stepper.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

namespace llg {

int scheme_order(Scheme s) { return static_cast<int>(s); }

double scheme_c0(Scheme s) {
  switch (s) {
    case Scheme::BDF1: return 1.0;
    case Scheme::BDF2: return 1.5;
    case Scheme::BDF3: return 11.0 / 6.0;
  }
  return 1.0;
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::BDF1: return "bdf1";
    case Scheme::BDF2: return "bdf2";
    case Scheme::BDF3: return "bdf3";
  }
  return "?";
}

SpatialOrder scheme_spatial(Scheme s) {
  return s == Scheme::BDF3 ? SpatialOrder::Fourth : SpatialOrder::Second;
}

namespace {

// History-combination weights on the explicit side, newest first:
// BDF1: m^n; BDF2: 2m^{n+1} - m^n/2; BDF3: 3m^{n+2} - 3m^{n+1}/2 + m^n/3.
std::array<double, 3> history_weights(Scheme s) {
  switch (s) {
    case Scheme::BDF1: return {1.0, 0.0, 0.0};
    case Scheme::BDF2: return {2.0, -0.5, 0.0};
    case Scheme::BDF3: return {3.0, -1.5, 1.0 / 3.0};
  }
  return {1.0, 0.0, 0.0};
}

std::array<double, 3> extrapolation_weights(int order) {
  switch (order) {
    case 1: return {1.0, 0.0, 0.0};
    case 2: return {2.0, -1.0, 0.0};
    default: return {3.0, -3.0, 1.0};
  }
}

std::int64_t flat_size(const GridSpec& g) { return 3 * g.cells(); }

void flatten(const VectorField& f, std::span<double> out) {
  const GridSpec& g = f.grid;
  std::int64_t p = 0;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out[p++] = f(c, i, j, k);
}

void unflatten(std::span<const double> in, VectorField& f) {
  const GridSpec& g = f.grid;
  std::int64_t p = 0;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(c, i, j, k) = in[p++];
}

}  // namespace

VectorField extrapolate(std::span<const VectorField> history, int order) {
  if (static_cast<int>(history.size()) < order)
    throw std::invalid_argument("extrapolate: insufficient history");
  const auto w = extrapolation_weights(order);
  const VectorField& a = history[history.size() - 1];
  VectorField out(a.grid);
  const std::int64_t n = a.grid.storage();
  for (int c = 0; c < 3; ++c) {
    for (std::int64_t id = 0; id < n; ++id) out.comp[c][id] = w[0] * a.comp[c][id];
    for (int l = 1; l < order; ++l) {
      const auto& src = history[history.size() - 1 - l].comp[c];
      for (std::int64_t id = 0; id < n; ++id) out.comp[c][id] += w[l] * src[id];
    }
  }
  return out;
}

LinearOp make_implicit_operator(const GridSpec& grid, Scheme scheme, double k, double eps,
                                double alpha, VectorField m_hat, SpatialOrder order) {
  const double c0k = scheme_c0(scheme) / k;
  // Scratch fields live in the closure; one operator instance is used by a
  // single solve at a time.
  auto y = std::make_shared<VectorField>(grid);
  auto lap = std::make_shared<VectorField>(grid);
  auto mh = std::make_shared<VectorField>(std::move(m_hat));
  return [grid, c0k, eps, alpha, order, y, lap, mh](std::span<const double> in,
                                                    std::span<double> out) {
    unflatten(in, *y);
    fill_ghosts(*y);
    laplacian(*y, order, *lap);
    const GridSpec& g = grid;
    std::int64_t p = 0;
    for (int c = 0; c < 3; ++c) {
      const int c1 = (c + 1) % 3, c2 = (c + 2) % 3;
      for (int kk = 0; kk < g.nz; ++kk)
        for (int j = 0; j < g.ny; ++j)
          for (int i = 0; i < g.nx; ++i) {
            const std::int64_t id = g.at(i, j, kk);
            const double cross = mh->comp[c1][id] * lap->comp[c2][id] -
                                 mh->comp[c2][id] * lap->comp[c1][id];
            out[p++] = c0k * y->comp[c][id] - alpha * eps * lap->comp[c][id] + eps * cross;
          }
    }
  };
}

SpectralShiftPrecond::SpectralShiftPrecond(const GridSpec& grid, double base,
                                           double alpha_eps, double eps, SpatialOrder order)
    : grid_(grid), base_(base), alpha_eps_(alpha_eps), eps_(eps) {
  for (int a = 0; a < 3; ++a) {
    const int n = grid.count(a);
    lambda_[a].assign(n, 0.0);
    if (!grid.active(a)) continue;
    dct_[a].emplace(n);
    const double h = grid.h(a);
    for (int j = 0; j < n; ++j) {
      const double th = std::numbers::pi * j / n;
      if (order == SpatialOrder::Fourth)
        lambda_[a][j] = (32.0 * std::cos(th) - 2.0 * std::cos(2.0 * th) - 30.0) / (12.0 * h * h);
      else
        lambda_[a][j] = (2.0 * std::cos(th) - 2.0) / (h * h);
    }
  }
  for (auto& w : work_) w.resize(grid.cells());
  const int nmax = std::max({grid.nx, grid.ny, grid.nz});
  line_in_.resize(nmax);
  line_out_.resize(nmax);
}

void SpectralShiftPrecond::apply(std::span<const double> in, std::span<double> out) const {
  const GridSpec& g = grid_;
  const std::int64_t cells = g.cells();
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  auto idx = [&](int i, int j, int k) { return i + std::int64_t(nx) * (j + std::int64_t(ny) * k); };

  auto pass = [&](std::vector<double>& w, int axis, bool forward) {
    if (!dct_[axis]) return;
    const auto& d = *dct_[axis];
    const int n = g.count(axis);
    if (axis == 0) {
      for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j) {
          double* row = w.data() + idx(0, j, k);
          forward ? d.forward(row, row) : d.inverse(row, row);
        }
    } else {
      for (int b = 0; b < (axis == 1 ? nz : ny); ++b)
        for (int a = 0; a < nx; ++a) {
          for (int t = 0; t < n; ++t)
            line_in_[t] = w[axis == 1 ? idx(a, t, b) : idx(a, b, t)];
          forward ? d.forward(line_in_.data(), line_out_.data())
                  : d.inverse(line_in_.data(), line_out_.data());
          for (int t = 0; t < n; ++t)
            w[axis == 1 ? idx(a, t, b) : idx(a, b, t)] = line_out_[t];
        }
    }
  };

  for (int c = 0; c < 3; ++c) {
    const double* src = in.data() + c * cells;
    std::copy(src, src + cells, work_[c].begin());
    pass(work_[c], 0, true);
    pass(work_[c], 1, true);
    pass(work_[c], 2, true);
  }

  // Per cosine mode the operator freezes to the 3x3 block a I + [b]x with
  // a = base - alpha_eps*lam and b = eps*lam*m_bar; invert it in closed form:
  // (a I + [b]x)^{-1} = (a^2 I - a [b]x + b b^T) / (a (a^2 + |b|^2)).
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::int64_t id = idx(i, j, k);
        const double lam = lambda_[0][i] + lambda_[1][j] + lambda_[2][k];
        const double a = base_ - alpha_eps_ * lam;
        const Vec3 b = (eps_ * lam) * m_bar_;
        const Vec3 w{work_[0][id], work_[1][id], work_[2][id]};
        const Vec3 r = (a * a) * w - a * cross(b, w) + dot(b, w) * b;
        const double s = 1.0 / (a * (a * a + dot(b, b)));
        work_[0][id] = s * r.x;
        work_[1][id] = s * r.y;
        work_[2][id] = s * r.z;
      }

  for (int c = 0; c < 3; ++c) {
    pass(work_[c], 0, false);
    pass(work_[c], 1, false);
    pass(work_[c], 2, false);
    std::copy(work_[c].begin(), work_[c].end(), out.begin() + c * cells);
  }
}

LinearOp SpectralShiftPrecond::op() const {
  return [this](std::span<const double> in, std::span<double> out) { apply(in, out); };
}

void project(VectorField& m) {
  const GridSpec& g = m.grid;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::int64_t id = g.at(i, j, k);
        const double nx = m.comp[0][id], ny = m.comp[1][id], nz = m.comp[2][id];
        const double r = std::sqrt(nx * nx + ny * ny + nz * nz);
        if (!(r > 0.0)) throw std::runtime_error("projection singularity: |m~| = 0");
        m.comp[0][id] = nx / r;
        m.comp[1][id] = ny / r;
        m.comp[2][id] = nz / r;
      }
}

Stepper::Stepper(const GridSpec& grid, StepperOptions opt, const DemagOperator* demag,
                 ForcingFn forcing)
    : grid_(grid), opt_(opt), demag_(demag), forcing_(std::move(forcing)) {
  grid_.validate();
  if (!(opt_.k > 0.0)) throw std::invalid_argument("Stepper: k must be > 0");
  if (opt_.use_spectral_precond)
    precond_ = std::make_unique<SpectralShiftPrecond>(grid_, scheme_c0(opt_.scheme) / opt_.k,
                                                      opt_.alpha * opt_.eps, opt_.eps,
                                                      opt_.spatial_order());
}

SourceTerm Stepper::source_for(const VectorField& m) {
  if (demag_) {
    stray_field(*demag_, m, hs_);
    return compose_source(m, &hs_, opt_.he, opt_.q);
  }
  return compose_source(m, nullptr, opt_.he, opt_.q);
}

void Stepper::push_level(VectorField m) {
  fill_ghosts(m);
  hist_f_.push_back(source_for(m));
  hist_m_.push_back(std::move(m));
  const int order = scheme_order(opt_.scheme);
  if (static_cast<int>(hist_m_.size()) > order) {
    hist_m_.erase(hist_m_.begin());
    hist_f_.erase(hist_f_.begin());
  }
}

void Stepper::seed_history(std::vector<VectorField> levels, double t_oldest) {
  const int order = scheme_order(opt_.scheme);
  if (static_cast<int>(levels.size()) != order)
    throw std::invalid_argument("seed_history: need exactly `order` levels");
  hist_m_.clear();
  hist_f_.clear();
  for (auto& l : levels) push_level(std::move(l));
  t_newest_ = t_oldest + (order - 1) * opt_.k;
}

void Stepper::bootstrap_substep(const VectorField& m0, double t0) {
  const int order = scheme_order(opt_.scheme);
  hist_m_.clear();
  hist_f_.clear();
  VectorField m = m0;
  project(m);
  push_level(std::move(m));
  t_newest_ = t0;

  const int nsub = std::max(1, opt_.bootstrap_substeps);
  for (int level = 1; level < order; ++level) {
    StepperOptions sub = opt_;
    sub.scheme = Scheme::BDF1;
    sub.k = opt_.k / nsub;
    sub.spatial = opt_.spatial_order();
    Stepper fine(grid_, sub, demag_, forcing_);
    fine.seed_history({hist_m_.back()}, t_newest_);
    fine.advance(nsub);
    gmres_iters_ += fine.total_gmres_iters();
    push_level(fine.m());
    t_newest_ += opt_.k;
  }
}

const VectorField& Stepper::m() const {
  if (hist_m_.empty()) throw std::runtime_error("Stepper: history not initialized");
  return hist_m_.back();
}

void Stepper::step() {
  const int order = scheme_order(opt_.scheme);
  if (static_cast<int>(hist_m_.size()) != order)
    throw std::runtime_error("Stepper: bootstrap incomplete");
  const SpatialOrder sp = opt_.spatial_order();
  const double t_new = t_newest_ + opt_.k;
  const double eps = opt_.eps, alpha = opt_.alpha, k = opt_.k;

  VectorField m_hat = extrapolate(hist_m_, order);
  SourceTerm f_hat = extrapolate(hist_f_, order);
  fill_ghosts(m_hat);
  ScalarField gs = grad_sq(m_hat, sp);

  const auto hw = history_weights(opt_.scheme);
  VectorField rhs(grid_);
  for (int c = 0; c < 3; ++c) {
    auto& out = rhs.comp[c];
    for (int l = 0; l < order; ++l) {
      const auto& src = hist_m_[hist_m_.size() - 1 - l].comp[c];
      const double w = hw[l] / k;
      if (l == 0)
        for (std::int64_t id = 0; id < grid_.storage(); ++id) out[id] = w * src[id];
      else
        for (std::int64_t id = 0; id < grid_.storage(); ++id) out[id] += w * src[id];
    }
  }
  for (int kk = 0; kk < grid_.nz; ++kk)
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) {
        const Vec3 mh = m_hat.value(i, j, kk);
        const Vec3 fh = f_hat.value(i, j, kk);
        const double coef = alpha * (eps * gs(i, j, kk) - dot(mh, fh));
        const Vec3 add = alpha * fh + coef * mh - cross(mh, fh);
        const std::int64_t id = grid_.at(i, j, kk);
        rhs.comp[0][id] += add.x;
        rhs.comp[1][id] += add.y;
        rhs.comp[2][id] += add.z;
      }
  if (forcing_) {
    VectorField gforce(grid_);
    forcing_(t_new, gforce);
    for (int c = 0; c < 3; ++c)
      for (int kk = 0; kk < grid_.nz; ++kk)
        for (int j = 0; j < grid_.ny; ++j)
          for (int i = 0; i < grid_.nx; ++i)
            rhs(c, i, j, kk) += gforce(c, i, j, kk);
  }

  const std::int64_t n = flat_size(grid_);
  std::vector<double> b(n), x(n);
  flatten(rhs, b);
  flatten(hist_m_.back(), x);  // warm start from the previous level

  LinearOp A = make_implicit_operator(grid_, opt_.scheme, k, eps, alpha, m_hat, sp);
  SolveStats stats;
  LinearOp P;
  if (precond_) {
    Vec3 mean{};
    for (int kk = 0; kk < grid_.nz; ++kk)
      for (int j = 0; j < grid_.ny; ++j)
        for (int i = 0; i < grid_.nx; ++i) mean = mean + m_hat.value(i, j, kk);
    precond_->set_coupling((1.0 / double(grid_.cells())) * mean);
    P = precond_->op();
  }
  stats = gmres(A, b, x, opt_.krylov, precond_ ? &P : nullptr);
  gmres_iters_ += stats.iterations;
  if (!stats.converged)
    throw StepRejected("GMRES did not converge (residual " +
                           std::to_string(stats.final_residual) + " after " +
                           std::to_string(stats.iterations) + " iterations)",
                       stats);
  for (int pass = 0; pass < opt_.refine_passes; ++pass) {
    std::vector<double> r(n), d(n, 0.0);
    A(x, r);
    for (std::int64_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    KrylovConfig rcfg = opt_.krylov;
    rcfg.rel_tol = 1e-2;  // each pass shaves the smooth error by ~100x
    rcfg.max_iters = 60;  // best-effort near the roundoff floor
    SolveStats rs = gmres(A, r, d, rcfg, precond_ ? &P : nullptr);
    gmres_iters_ += rs.iterations;
    for (std::int64_t i = 0; i < n; ++i) x[i] += d[i];
  }

  VectorField m_new(grid_);
  unflatten(x, m_new);
  project(m_new);
  if (!all_finite(m_new)) throw StepRejected("non-finite state after step", stats);

  double dev = 0.0;
  for (int kk = 0; kk < grid_.nz; ++kk)
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i)
        dev = std::max(dev, std::abs(norm(m_new.value(i, j, kk)) - 1.0));
  max_unit_dev_ = std::max(max_unit_dev_, dev);

  push_level(std::move(m_new));
  t_newest_ = t_new;
  ++steps_;
}

void Stepper::advance(int nsteps) {
  for (int s = 0; s < nsteps; ++s) step();
}

}  // namespace llg
