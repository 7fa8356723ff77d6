#include "llg/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace llg {

double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

GridSpec GridSpec::line(int n) {
  GridSpec g;
  g.nx = n;
  g.ny = g.nz = 1;
  g.hx = 1.0 / n;
  g.hy = g.hz = 1.0;
  g.dim = 1;
  g.validate();
  return g;
}

GridSpec GridSpec::cube(int n) {
  GridSpec g;
  g.nx = g.ny = g.nz = n;
  g.hx = g.hy = g.hz = 1.0 / n;
  g.dim = 3;
  g.validate();
  return g;
}

GridSpec GridSpec::box(int nx, int ny, int nz, double hx, double hy, double hz) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.hx = hx;
  g.hy = hy;
  g.hz = hz;
  g.dim = 3;
  g.validate();
  return g;
}

bool GridSpec::meets_fourth_order_minimum() const {
  for (int a = 0; a < 3; ++a)
    if (active(a) && count(a) < 5) return false;
  return true;
}

void GridSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (count(a) < 1) throw std::invalid_argument("GridSpec: cell count must be >= 1");
    if (!(h(a) > 0.0)) throw std::invalid_argument("GridSpec: mesh size must be > 0");
  }
  if (dim != 1 && dim != 3) throw std::invalid_argument("GridSpec: dim must be 1 or 3");
}

void VectorField::fill(Vec3 u) {
  for (int c = 0; c < 3; ++c)
    for (auto& x : comp[c]) x = u[c];
}

namespace {

// Reflect one axis of a raw component array. Covers the full extent of the
// other two axes so corner ghosts are consistent after all three passes.
void reflect_axis(const GridSpec& g, std::vector<double>& v, int axis) {
  const int n = g.count(axis);
  const std::int64_t stride = axis == 0 ? 1
                              : axis == 1 ? g.sx()
                                          : std::int64_t(g.sx()) * g.sy();
  // Index pairs (ghost -> interior source), ghost offsets relative to cell 0.
  int src_lo1 = 0, src_lo2 = std::min(1, n - 1);
  int src_hi1 = n - 1, src_hi2 = std::max(n - 2, 0);

  const int pa = (axis + 1) % 3, pb = (axis + 2) % 3;
  const int na = g.count(pa) + 2 * GridSpec::ghost;
  const int nb = g.count(pb) + 2 * GridSpec::ghost;
  const std::int64_t sa = pa == 0 ? 1 : (pa == 1 ? g.sx() : std::int64_t(g.sx()) * g.sy());
  const std::int64_t sb = pb == 0 ? 1 : (pb == 1 ? g.sx() : std::int64_t(g.sx()) * g.sy());

  for (int ib = 0; ib < nb; ++ib) {
    for (int ia = 0; ia < na; ++ia) {
      const std::int64_t base = sa * ia + sb * ib;
      auto cell = [&](int i) { return base + stride * (i + GridSpec::ghost); };
      v[cell(-1)] = v[cell(src_lo1)];
      v[cell(-2)] = v[cell(src_lo2)];
      v[cell(n)] = v[cell(src_hi1)];
      v[cell(n + 1)] = v[cell(src_hi2)];
    }
  }
}

void reflect_all(const GridSpec& g, std::vector<double>& v) {
  for (int a = 0; a < 3; ++a) reflect_axis(g, v, a);
}

struct Stencil {
  double c1, c2;  // first difference: (c1*(f[i+1]-f[i-1]) + c2*(f[i+2]-f[i-2]))/h
  double d0, d1c, d2c;  // second difference: (d0*f[i] + d1c*(f[i+1]+f[i-1]) + d2c*(f[i+2]+f[i-2]))/h^2
};

Stencil stencil_for(SpatialOrder order) {
  if (order == SpatialOrder::Second)
    return {0.5, 0.0, -2.0, 1.0, 0.0};
  // (f_{i-2} - 8 f_{i-1} + 8 f_{i+1} - f_{i+2}) / (12 h)
  // (-f_{i-2} + 16 f_{i-1} - 30 f_i + 16 f_{i+1} - f_{i+2}) / (12 h^2)
  return {8.0 / 12.0, -1.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};
}

void check_axis(const GridSpec& g, int axis) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis out of range");
  if (!g.active(axis)) throw std::invalid_argument("difference along inactive axis");
}

void d1_component(const GridSpec& g, const std::vector<double>& in, std::vector<double>& out,
                  int axis, SpatialOrder order, bool accumulate_square) {
  const Stencil s = stencil_for(order);
  const double ih = 1.0 / g.h(axis);
  const std::int64_t st = axis == 0 ? 1 : (axis == 1 ? g.sx() : std::int64_t(g.sx()) * g.sy());
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::int64_t id = g.at(i, j, k);
        const double v =
            ih * (s.c1 * (in[id + st] - in[id - st]) + s.c2 * (in[id + 2 * st] - in[id - 2 * st]));
        if (accumulate_square)
          out[id] += v * v;
        else
          out[id] = v;
      }
}

void d2_component(const GridSpec& g, const std::vector<double>& in, std::vector<double>& out,
                  int axis, SpatialOrder order, bool accumulate) {
  const Stencil s = stencil_for(order);
  const double ih2 = 1.0 / (g.h(axis) * g.h(axis));
  const std::int64_t st = axis == 0 ? 1 : (axis == 1 ? g.sx() : std::int64_t(g.sx()) * g.sy());
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::int64_t id = g.at(i, j, k);
        const double v = ih2 * (s.d0 * in[id] + s.d1c * (in[id + st] + in[id - st]) +
                                s.d2c * (in[id + 2 * st] + in[id - 2 * st]));
        if (accumulate)
          out[id] += v;
        else
          out[id] = v;
      }
}

}  // namespace

void fill_ghosts(ScalarField& f) { reflect_all(f.grid, f.v); }

void fill_ghosts(VectorField& f) {
  for (auto& c : f.comp) reflect_all(f.grid, c);
}

ScalarField d1(const ScalarField& f, int axis, SpatialOrder order) {
  check_axis(f.grid, axis);
  ScalarField out(f.grid);
  d1_component(f.grid, f.v, out.v, axis, order, false);
  return out;
}

ScalarField d2(const ScalarField& f, int axis, SpatialOrder order) {
  check_axis(f.grid, axis);
  ScalarField out(f.grid);
  d2_component(f.grid, f.v, out.v, axis, order, false);
  return out;
}

void laplacian(const VectorField& m, SpatialOrder order, VectorField& out) {
  const GridSpec& g = m.grid;
  for (int c = 0; c < 3; ++c) {
    std::fill(out.comp[c].begin(), out.comp[c].end(), 0.0);
    for (int a = 0; a < 3; ++a)
      if (g.active(a)) d2_component(g, m.comp[c], out.comp[c], a, order, true);
  }
}

VectorField laplacian(const VectorField& m, SpatialOrder order) {
  VectorField out(m.grid);
  laplacian(m, order, out);
  return out;
}

void grad_sq(const VectorField& m, SpatialOrder order, ScalarField& out) {
  const GridSpec& g = m.grid;
  std::fill(out.v.begin(), out.v.end(), 0.0);
  for (int c = 0; c < 3; ++c)
    for (int a = 0; a < 3; ++a)
      if (g.active(a)) d1_component(g, m.comp[c], out.v, a, order, true);
}

ScalarField grad_sq(const VectorField& m, SpatialOrder order) {
  ScalarField out(m.grid);
  grad_sq(m, order, out);
  return out;
}

NormTriple error_norms(const VectorField& num, const VectorField& exact) {
  const GridSpec& g = num.grid;
  if (!(g == exact.grid)) throw std::invalid_argument("error_norms: grid mismatch");

  VectorField e(g);
  for (int c = 0; c < 3; ++c)
    for (std::int64_t id = 0; id < g.storage(); ++id)
      e.comp[c][id] = num.comp[c][id] - exact.comp[c][id];

  NormTriple n;
  const double vol = g.cell_volume();
  double sum2 = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const double v = e(c, i, j, k);
          n.linf = std::max(n.linf, std::abs(v));
          sum2 += v * v;
        }
  n.l2 = std::sqrt(vol * sum2);

  fill_ghosts(e);
  ScalarField gs = grad_sq(e, SpatialOrder::Fourth);
  double sumg = 0.0;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) sumg += gs(i, j, k);
  n.h1 = std::sqrt(vol * (sum2 + sumg));
  return n;
}

bool all_finite(const VectorField& f) {
  for (const auto& c : f.comp)
    for (double x : c)
      if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace llg
