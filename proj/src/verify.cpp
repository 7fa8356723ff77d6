#include "llg/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "llg/io.hpp"

namespace llg {

namespace {
constexpr double pi = std::numbers::pi;

struct PointGeometry {
  double P;   // profile
  double G2;  // |grad P|^2
  double LP;  // lap P
};

PointGeometry geometry(int dim, Vec3 x) {
  PointGeometry g;
  if (dim == 1) {
    const double cx = std::cos(pi * x.x), sx = std::sin(pi * x.x);
    g.P = cx;
    g.G2 = pi * pi * sx * sx;
    g.LP = -pi * pi * cx;
  } else {
    const double cx = std::cos(pi * x.x), sx = std::sin(pi * x.x);
    const double cy = std::cos(pi * x.y), sy = std::sin(pi * x.y);
    const double cz = std::cos(pi * x.z), sz = std::sin(pi * x.z);
    g.P = cx * cy * cz;
    g.G2 = pi * pi *
           (sx * sx * cy * cy * cz * cz + cx * cx * sy * sy * cz * cz +
            cx * cx * cy * cy * sz * sz);
    g.LP = -3.0 * pi * pi * g.P;
  }
  return g;
}
}  // namespace

Vec3 ManufacturedCase::exact(Vec3 x, double t) const {
  const double P = geometry(dim, x).P;
  const double s = std::sin(t), c = std::cos(t);
  return {std::cos(P) * s, std::sin(P) * s, c};
}

Vec3 ManufacturedCase::forcing(Vec3 x, double t) const {
  // g = m_t - alpha lap m - alpha |grad m|^2 m + m x lap m for the exact
  // solution, written in the local frame p = (cos P, sin P, 0),
  // p_perp = (-sin P, cos P, 0), e3.
  const PointGeometry ge = geometry(dim, x);
  const double s = std::sin(t), c = std::cos(t);
  const double cp = std::cos(ge.P), sp = std::sin(ge.P);
  const double a = alpha;
  const double wp = c + a * s * c * c * ge.G2 - c * s * ge.LP;
  const double wq = -a * s * ge.LP - c * s * ge.G2;
  const double we = -s - a * c * s * s * ge.G2 + s * s * ge.LP;
  return {wp * cp - wq * sp, wp * sp + wq * cp, we};
}

VectorField ManufacturedCase::sample_exact(const GridSpec& g, double t) const {
  VectorField m(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const Vec3 x{(i + 0.5) * g.hx, (j + 0.5) * g.hy, (k + 0.5) * g.hz};
        m.set(i, j, k, exact(x, t));
      }
  fill_ghosts(m);
  return m;
}

Stepper::ForcingFn ManufacturedCase::forcing_fn(const GridSpec& g) const {
  ManufacturedCase c = *this;
  return [c, g](double t, VectorField& out) {
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const Vec3 x{(i + 0.5) * g.hx, (j + 0.5) * g.hy, (k + 0.5) * g.hz};
          out.set(i, j, k, c.forcing(x, t));
        }
  };
}

KrylovConfig StudyConfig::tight_krylov() {
  // Tight enough that per-step solver error stays below the smallest tabulated
  // scheme errors; still reachable in double precision for the stiff 1D
  // operator (kappa ~ 1e6, roundoff floor ~1e-10 relative residual).
  KrylovConfig k;
  k.rel_tol = 1e-10;
  k.abs_tol = 1e-14;
  k.max_iters = 4000;
  return k;
}

namespace {

StudyRow run_case(Scheme s, const ManufacturedCase& c, const GridSpec& g, int n_steps,
                  const StudyConfig& cfg) {
  const double k = c.T / n_steps;
  const int order = scheme_order(s);
  if (n_steps < order)
    throw std::invalid_argument("run_case: schedule shorter than scheme order");

  StepperOptions opt;
  opt.scheme = s;
  opt.k = k;
  opt.eps = 1.0;
  opt.q = 0.0;
  opt.alpha = c.alpha;
  opt.krylov = cfg.krylov;
  opt.refine_passes = cfg.refine_passes;

  const int march = n_steps - (order - 1);
  double best = 0.0;
  std::vector<double> times;
  Stepper* kept = nullptr;
  std::unique_ptr<Stepper> holder;
  const int repeats = std::max(1, cfg.timing_repeats);
  for (int rep = 0; rep < repeats; ++rep) {
    auto st = std::make_unique<Stepper>(g, opt, nullptr, c.forcing_fn(g));
    if (cfg.bootstrap == BootstrapMode::Exact) {
      std::vector<VectorField> levels;
      for (int l = 0; l < order; ++l) levels.push_back(c.sample_exact(g, l * k));
      st->seed_history(std::move(levels), 0.0);
    } else {
      st->bootstrap_substep(c.sample_exact(g, 0.0), 0.0);
    }
    const auto t0 = std::chrono::steady_clock::now();
    st->advance(march);
    times.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    holder = std::move(st);
    kept = holder.get();
  }
  std::sort(times.begin(), times.end());
  best = times[times.size() / 2];

  StudyRow row;
  row.scheme = s;
  row.dim = c.dim;
  row.k = k;
  row.h = g.hx;
  row.err = error_norms(kept->m(), c.sample_exact(g, c.T));
  row.seconds = best;
  row.gmres_iters = kept->total_gmres_iters();
  return row;
}

}  // namespace

double fit_order(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

NormTriple fitted_orders(const std::vector<StudyRow>& rows, bool vs_k) {
  std::vector<double> lx, li, l2, lh;
  for (const auto& r : rows) {
    lx.push_back(std::log(vs_k ? r.k : r.h));
    li.push_back(std::log(r.err.linf));
    l2.push_back(std::log(r.err.l2));
    lh.push_back(std::log(r.err.h1));
  }
  NormTriple o;
  o.linf = fit_order(lx, li);
  o.l2 = fit_order(lx, l2);
  o.h1 = fit_order(lx, lh);
  return o;
}

ConvergenceReport temporal_study_1d(Scheme s, const ManufacturedCase& c,
                                    const std::vector<int>& n_steps, int grid_n,
                                    const StudyConfig& cfg) {
  ConvergenceReport rep;
  const GridSpec g = GridSpec::line(grid_n);
  for (int n : n_steps) rep.rows.push_back(run_case(s, c, g, n, cfg));
  rep.orders = fitted_orders(rep.rows, true);
  return rep;
}

int coordinated_grid_n(Scheme s, double T, int n0) {
  const double k = T / n0;
  switch (s) {
    case Scheme::BDF1: return int(std::lround(1.0 / std::sqrt(k)));
    case Scheme::BDF2: return int(std::lround(1.0 / k));
    case Scheme::BDF3: return int(std::lround(1.0 / std::pow(k, 0.75)));
  }
  return 1;
}

ConvergenceReport temporal_study_3d(Scheme s, const ManufacturedCase& c,
                                    const std::vector<int>& n0, const StudyConfig& cfg) {
  ConvergenceReport rep;
  for (int N0 : n0) {
    const GridSpec g = GridSpec::cube(coordinated_grid_n(s, c.T, N0));
    rep.rows.push_back(run_case(s, c, g, N0, cfg));
  }
  rep.orders = fitted_orders(rep.rows, true);
  return rep;
}

ConvergenceReport spatial_study(Scheme s, const ManufacturedCase& c,
                                const std::vector<int>& grid_ns, double k,
                                const StudyConfig& cfg) {
  ConvergenceReport rep;
  const int n_steps = int(std::lround(c.T / k));
  for (int n : grid_ns) {
    const GridSpec g = c.dim == 1 ? GridSpec::line(n) : GridSpec::cube(n);
    ManufacturedCase cc = c;
    StudyRow row = run_case(s, cc, g, n_steps, cfg);
    rep.rows.push_back(row);
  }
  rep.orders = fitted_orders(rep.rows, false);
  return rep;
}

ConvergenceReport efficiency_study(Scheme s, const ManufacturedCase& c,
                                   const std::vector<int>& n_steps, int grid_n,
                                   const StudyConfig& cfg) {
  ConvergenceReport rep;
  const GridSpec g = c.dim == 1 ? GridSpec::line(grid_n) : GridSpec::cube(grid_n);
  for (int n : n_steps) rep.rows.push_back(run_case(s, c, g, n, cfg));
  rep.orders = fitted_orders(rep.rows, true);
  return rep;
}

double seconds_at_error(const std::vector<StudyRow>& rows, double err_target) {
  if (rows.empty()) throw std::invalid_argument("seconds_at_error: no rows");
  std::vector<std::pair<double, double>> pts;  // (log err, log sec)
  for (const auto& r : rows)
    if (r.err.linf > 0.0 && r.seconds > 0.0)
      pts.emplace_back(std::log(r.err.linf), std::log(r.seconds));
  std::sort(pts.begin(), pts.end());
  const double lx = std::log(err_target);
  if (pts.size() == 1) return std::exp(pts[0].second);
  // Clamp extrapolation to one decade beyond the ladder.
  const double lo = pts.front().first - std::log(10.0);
  const double hi = pts.back().first + std::log(10.0);
  if (lx < lo || lx > hi)
    throw std::runtime_error("seconds_at_error: target outside ladder range");
  std::size_t i = 0;
  while (i + 2 < pts.size() && pts[i + 1].first < lx) ++i;
  const auto [x0, y0] = pts[i];
  const auto [x1, y1] = pts[i + 1];
  const double w = (lx - x0) / (x1 - x0);
  return std::exp(y0 + w * (y1 - y0));
}

void write_study_csv(const std::string& path, const std::vector<StudyRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "scheme,dim,k,h,err_inf,err_l2,err_h1,seconds,gmres_iters_total\n";
  for (const auto& r : rows)
    f << scheme_name(r.scheme) << ',' << r.dim << ',' << io::sci(r.k) << ',' << io::sci(r.h)
      << ',' << io::sci(r.err.linf) << ',' << io::sci(r.err.l2) << ',' << io::sci(r.err.h1)
      << ',' << io::sci(r.seconds) << ',' << r.gmres_iters << '\n';
}

}  // namespace llg
