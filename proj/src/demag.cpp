#include "llg/demag.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace llg {

namespace {

double safe_asinh_term(double coef, double num, double den2) {
  // coef * asinh(num / sqrt(den2)); the coefficient vanishes exactly whenever
  // the denominator does, so the whole term is zero there.
  if (den2 <= 0.0 || coef == 0.0) return 0.0;
  return coef * std::asinh(num / std::sqrt(den2));
}

double safe_atan_term(double coef, double num, double den) {
  if (coef == 0.0 || den == 0.0) return 0.0;
  return coef * std::atan(num / den);
}

}  // namespace

double newell_f(double x, double y, double z) {
  const double x2 = x * x, y2 = y * y, z2 = z * z;
  const double R = std::sqrt(x2 + y2 + z2);
  double v = 0.0;
  v += safe_asinh_term(0.5 * y * (z2 - x2), y, x2 + z2);
  v += safe_asinh_term(0.5 * z * (y2 - x2), z, x2 + y2);
  v += safe_atan_term(-x * y * z, y * z, x * R);
  v += (2.0 * x2 - y2 - z2) * R / 6.0;
  return v;
}

double newell_g(double x, double y, double z) {
  const double x2 = x * x, y2 = y * y, z2 = z * z;
  const double R = std::sqrt(x2 + y2 + z2);
  double v = 0.0;
  v += safe_asinh_term(x * y * z, z, x2 + y2);
  v += safe_asinh_term(y * (3.0 * z2 - y2) / 6.0, x, y2 + z2);
  v += safe_asinh_term(x * (3.0 * z2 - x2) / 6.0, y, x2 + z2);
  v += safe_atan_term(-z * z2 / 6.0, x * y, z * R);
  v += safe_atan_term(-0.5 * z * y2, x * z, y * R);
  v += safe_atan_term(-0.5 * z * x2, y * z, x * R);
  v -= x * y * R / 3.0;
  return v;
}

namespace {

constexpr double four_pi = 4.0 * 3.14159265358979323846;

// Triple centered second difference of phi over one cell in each axis.
template <typename F>
double triple_diff(F&& phi, double X, double Y, double Z, double dx, double dy, double dz) {
  auto d2x = [&](double yy, double zz) {
    return 2.0 * phi(X, yy, zz) - phi(X + dx, yy, zz) - phi(X - dx, yy, zz);
  };
  auto d2xy = [&](double zz) {
    return 2.0 * d2x(Y, zz) - d2x(Y + dy, zz) - d2x(Y - dy, zz);
  };
  return 2.0 * d2xy(Z) - d2xy(Z + dz) - d2xy(Z - dz);
}

}  // namespace

double demag_nxx(double X, double Y, double Z, double dx, double dy, double dz) {
  return triple_diff(newell_f, X, Y, Z, dx, dy, dz) / (four_pi * dx * dy * dz);
}

double demag_nxy(double X, double Y, double Z, double dx, double dy, double dz) {
  return triple_diff(newell_g, X, Y, Z, dx, dy, dz) / (four_pi * dx * dy * dz);
}

double demag_entry(int a, int b, Vec3 d, Vec3 cell) {
  if (a > b) std::swap(a, b);
  if (a == 0 && b == 0) return demag_nxx(d.x, d.y, d.z, cell.x, cell.y, cell.z);
  if (a == 1 && b == 1) return demag_nxx(d.y, d.x, d.z, cell.y, cell.x, cell.z);
  if (a == 2 && b == 2) return demag_nxx(d.z, d.y, d.x, cell.z, cell.y, cell.x);
  if (a == 0 && b == 1) return demag_nxy(d.x, d.y, d.z, cell.x, cell.y, cell.z);
  if (a == 0 && b == 2) return demag_nxy(d.x, d.z, d.y, cell.x, cell.z, cell.y);
  return demag_nxy(d.y, d.z, d.x, cell.y, cell.z, cell.x);  // yz
}

namespace {

// Tabulated tensor over the displacement lattice [-(n-1), n-1] per axis.
struct TensorLattice {
  int nx, ny, nz;          // displacement extents (2n-1 per axis)
  std::array<std::vector<double>, 6> k;

  std::int64_t index(int ix, int iy, int iz) const {
    // ix in [-(nx/2), nx/2] with nx odd
    const int ox = nx / 2, oy = ny / 2, oz = nz / 2;
    return (ix + ox) + std::int64_t(nx) * ((iy + oy) + std::int64_t(ny) * (iz + oz));
  }
};

// Evaluate phi on the corner lattice once per component, then difference.
// The lattice spans p in [-n, n] per axis (tensor displacements plus one cell
// for the second differences).
template <typename F>
void tabulate_component(F&& phi, int nx, int ny, int nz, double dx, double dy, double dz,
                        double scale, std::vector<double>& out) {
  const int ex = 2 * nx + 1, ey = 2 * ny + 1, ez = 2 * nz + 1;
  std::vector<double> tab(std::int64_t(ex + 2) * (ey + 2) * (ez + 2));
  auto tat = [&](int px, int py, int pz) -> double& {
    return tab[(px + nx + 1) +
               std::int64_t(ex + 2) * ((py + ny + 1) + std::int64_t(ey + 2) * (pz + nz + 1))];
  };
  for (int pz = -nz - 1; pz <= nz + 1; ++pz)
    for (int py = -ny - 1; py <= ny + 1; ++py)
      for (int px = -nx - 1; px <= nx + 1; ++px)
        tat(px, py, pz) = phi(px * dx, py * dy, pz * dz);

  out.assign(std::int64_t(ex) * ey * ez, 0.0);
  auto oat = [&](int px, int py, int pz) -> double& {
    return out[(px + nx) + std::int64_t(ex) * ((py + ny) + std::int64_t(ey) * (pz + nz))];
  };
  for (int pz = -nz; pz <= nz; ++pz)
    for (int py = -ny; py <= ny; ++py)
      for (int px = -nx; px <= nx; ++px) {
        double s = 0.0;
        for (int a = -1; a <= 1; ++a)
          for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c) {
              const double w = (a == 0 ? 2.0 : -1.0) * (b == 0 ? 2.0 : -1.0) *
                               (c == 0 ? 2.0 : -1.0);
              s += w * tat(px + a, py + b, pz + c);
            }
        oat(px, py, pz) = s * scale;
      }
}

TensorLattice tensor_lattice(const GridSpec& g, Vec3 cell) {
  const int mx = g.nx - 1, my = g.ny - 1, mz = g.nz - 1;
  TensorLattice t;
  t.nx = 2 * mx + 1;
  t.ny = 2 * my + 1;
  t.nz = 2 * mz + 1;
  const double dx = cell.x, dy = cell.y, dz = cell.z;
  const double scale = 1.0 / (four_pi * dx * dy * dz);

  auto fxx = [](double x, double y, double z) { return newell_f(x, y, z); };
  tabulate_component([&](double x, double y, double z) { return fxx(x, y, z); }, mx, my, mz,
                     dx, dy, dz, scale, t.k[0]);
  // yy: swap x<->y roles; zz: swap x<->z roles.
  tabulate_component([&](double x, double y, double z) { return fxx(y, x, z); }, mx, my, mz,
                     dx, dy, dz, scale, t.k[3]);
  tabulate_component([&](double x, double y, double z) { return fxx(z, y, x); }, mx, my, mz,
                     dx, dy, dz, scale, t.k[5]);
  tabulate_component([](double x, double y, double z) { return newell_g(x, y, z); }, mx, my,
                     mz, dx, dy, dz, scale, t.k[1]);
  tabulate_component([](double x, double y, double z) { return newell_g(x, z, y); }, mx, my,
                     mz, dx, dy, dz, scale, t.k[2]);
  tabulate_component([](double x, double y, double z) { return newell_g(y, z, x); }, mx, my,
                     mz, dx, dy, dz, scale, t.k[4]);
  return t;
}

void check_cell(Vec3 cell) {
  if (!(cell.x > 0.0) || !(cell.y > 0.0) || !(cell.z > 0.0))
    throw std::invalid_argument("demag: degenerate cell dimensions");
}

}  // namespace

DemagOperator build_demag_operator(const GridSpec& grid, Vec3 cell_dims) {
  check_cell(cell_dims);
  DemagOperator op;
  op.grid = grid;
  op.cell = cell_dims;
  op.px = grid.nx > 1 ? fft::next_smooth(2 * grid.nx - 1) : 1;
  op.py = grid.ny > 1 ? fft::next_smooth(2 * grid.ny - 1) : 1;
  op.pz = grid.nz > 1 ? fft::next_smooth(2 * grid.nz - 1) : 1;

  const TensorLattice lat = tensor_lattice(grid, cell_dims);
  const std::int64_t ptot = op.padded();
  fft::Plan plan_x(op.px), plan_y(op.py), plan_z(op.pz);

  std::vector<fft::cplx> work(ptot);
  std::vector<fft::cplx> line(std::max({op.px, op.py, op.pz}));
  auto pidx = [&](int ix, int iy, int iz) {
    return ix + std::int64_t(op.px) * (iy + std::int64_t(op.py) * iz);
  };

  for (int comp = 0; comp < 6; ++comp) {
    std::fill(work.begin(), work.end(), fft::cplx(0.0, 0.0));
    for (int dz = -(grid.nz - 1); dz <= grid.nz - 1; ++dz)
      for (int dy = -(grid.ny - 1); dy <= grid.ny - 1; ++dy)
        for (int dx = -(grid.nx - 1); dx <= grid.nx - 1; ++dx) {
          const int ix = (dx % op.px + op.px) % op.px;
          const int iy = (dy % op.py + op.py) % op.py;
          const int iz = (dz % op.pz + op.pz) % op.pz;
          work[pidx(ix, iy, iz)] = lat.k[comp][lat.index(dx, dy, dz)];
        }

    // 3D FFT axis by axis.
    for (int iz = 0; iz < op.pz; ++iz)
      for (int iy = 0; iy < op.py; ++iy) plan_x.forward(&work[pidx(0, iy, iz)]);
    if (op.py > 1)
      for (int iz = 0; iz < op.pz; ++iz)
        for (int ix = 0; ix < op.px; ++ix) {
          for (int iy = 0; iy < op.py; ++iy) line[iy] = work[pidx(ix, iy, iz)];
          plan_y.forward(line.data());
          for (int iy = 0; iy < op.py; ++iy) work[pidx(ix, iy, iz)] = line[iy];
        }
    if (op.pz > 1)
      for (int iy = 0; iy < op.py; ++iy)
        for (int ix = 0; ix < op.px; ++ix) {
          for (int iz = 0; iz < op.pz; ++iz) line[iz] = work[pidx(ix, iy, iz)];
          plan_z.forward(line.data());
          for (int iz = 0; iz < op.pz; ++iz) work[pidx(ix, iy, iz)] = line[iz];
        }

    // Symmetric real kernels have real spectra; drop the roundoff imaginary part.
    op.spec[comp].resize(ptot);
    for (std::int64_t i = 0; i < ptot; ++i) op.spec[comp][i] = work[i].real();
  }
  return op;
}

namespace {

void fft3(const DemagOperator& op, std::vector<fft::cplx>& a, bool inverse) {
  fft::Plan plan_x(op.px), plan_y(op.py), plan_z(op.pz);
  std::vector<fft::cplx> line(std::max({op.px, op.py, op.pz}));
  auto pidx = [&](int ix, int iy, int iz) {
    return ix + std::int64_t(op.px) * (iy + std::int64_t(op.py) * iz);
  };
  for (int iz = 0; iz < op.pz; ++iz)
    for (int iy = 0; iy < op.py; ++iy) {
      fft::cplx* p = &a[pidx(0, iy, iz)];
      inverse ? plan_x.inverse(p) : plan_x.forward(p);
    }
  if (op.py > 1)
    for (int iz = 0; iz < op.pz; ++iz)
      for (int ix = 0; ix < op.px; ++ix) {
        for (int iy = 0; iy < op.py; ++iy) line[iy] = a[pidx(ix, iy, iz)];
        inverse ? plan_y.inverse(line.data()) : plan_y.forward(line.data());
        for (int iy = 0; iy < op.py; ++iy) a[pidx(ix, iy, iz)] = line[iy];
      }
  if (op.pz > 1)
    for (int iy = 0; iy < op.py; ++iy)
      for (int ix = 0; ix < op.px; ++ix) {
        for (int iz = 0; iz < op.pz; ++iz) line[iz] = a[pidx(ix, iy, iz)];
        inverse ? plan_z.inverse(line.data()) : plan_z.forward(line.data());
        for (int iz = 0; iz < op.pz; ++iz) a[pidx(ix, iy, iz)] = line[iz];
      }
}

}  // namespace

void stray_field(const DemagOperator& op, const VectorField& m, VectorField& hs) {
  const GridSpec& g = m.grid;
  if (!(g == op.grid)) throw std::invalid_argument("stray_field: grid mismatch");
  if (!(hs.grid == g)) hs = VectorField(g);

  const std::int64_t ptot = op.padded();
  std::vector<fft::cplx> A(ptot, fft::cplx(0, 0));  // m0 + i m1
  std::vector<fft::cplx> B(ptot, fft::cplx(0, 0));  // m2
  auto pidx = [&](int ix, int iy, int iz) {
    return ix + std::int64_t(op.px) * (iy + std::int64_t(op.py) * iz);
  };
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::int64_t src = g.at(i, j, k);
        const std::int64_t dst = pidx(i, j, k);
        A[dst] = {m.comp[0][src], m.comp[1][src]};
        B[dst] = {m.comp[2][src], 0.0};
      }

  fft3(op, A, false);
  fft3(op, B, false);

  // Unpack the two real spectra of A via Hermitian symmetry, multiply by the
  // (real) tensor spectra, and repack h0 + i h1 / h2 for the inverse pass.
  std::vector<fft::cplx> C(ptot), D(ptot);
  for (int iz = 0; iz < op.pz; ++iz) {
    const int nz_ = iz == 0 ? 0 : op.pz - iz;
    for (int iy = 0; iy < op.py; ++iy) {
      const int ny_ = iy == 0 ? 0 : op.py - iy;
      for (int ix = 0; ix < op.px; ++ix) {
        const int nx_ = ix == 0 ? 0 : op.px - ix;
        const std::int64_t id = pidx(ix, iy, iz);
        const fft::cplx a = A[id];
        const fft::cplx an = std::conj(A[pidx(nx_, ny_, nz_)]);
        const fft::cplx m0 = 0.5 * (a + an);
        const fft::cplx m1 = fft::cplx(0.0, -0.5) * (a - an);
        const fft::cplx m2 = B[id];
        const double nxx = op.spec[0][id], nxy = op.spec[1][id], nxz = op.spec[2][id];
        const double nyy = op.spec[3][id], nyz = op.spec[4][id], nzz = op.spec[5][id];
        const fft::cplx h0 = -(nxx * m0 + nxy * m1 + nxz * m2);
        const fft::cplx h1 = -(nxy * m0 + nyy * m1 + nyz * m2);
        const fft::cplx h2 = -(nxz * m0 + nyz * m1 + nzz * m2);
        C[id] = h0 + fft::cplx(0.0, 1.0) * h1;
        D[id] = h2;
      }
    }
  }

  fft3(op, C, true);
  fft3(op, D, true);

  const double scale = 1.0 / double(ptot);
  for (auto& c : hs.comp) std::fill(c.begin(), c.end(), 0.0);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::int64_t dst = g.at(i, j, k);
        const std::int64_t src = pidx(i, j, k);
        hs.comp[0][dst] = C[src].real() * scale;
        hs.comp[1][dst] = C[src].imag() * scale;
        hs.comp[2][dst] = D[src].real() * scale;
      }
}

VectorField stray_field(const DemagOperator& op, const VectorField& m) {
  VectorField hs(m.grid);
  stray_field(op, m, hs);
  return hs;
}

VectorField stray_field_direct(const GridSpec& g, Vec3 cell_dims, const VectorField& m) {
  check_cell(cell_dims);
  const TensorLattice lat = tensor_lattice(g, cell_dims);
  VectorField hs(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        Vec3 h{0, 0, 0};
        for (int kk = 0; kk < g.nz; ++kk)
          for (int jj = 0; jj < g.ny; ++jj)
            for (int ii = 0; ii < g.nx; ++ii) {
              const std::int64_t d = lat.index(i - ii, j - jj, k - kk);
              const Vec3 mm = m.value(ii, jj, kk);
              h.x -= lat.k[0][d] * mm.x + lat.k[1][d] * mm.y + lat.k[2][d] * mm.z;
              h.y -= lat.k[1][d] * mm.x + lat.k[3][d] * mm.y + lat.k[4][d] * mm.z;
              h.z -= lat.k[2][d] * mm.x + lat.k[4][d] * mm.y + lat.k[5][d] * mm.z;
            }
        hs.set(i, j, k, h);
      }
  return hs;
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

constexpr std::uint32_t kCacheMagic = 0x4b474c4c;  // "LLGK"
constexpr std::uint32_t kCacheVersion = 1;

}  // namespace

void save_demag_cache(const DemagOperator& op, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open demag cache for writing: " + path);
  auto put = [&](const void* p, std::size_t n) { f.write(static_cast<const char*>(p), n); };
  put(&kCacheMagic, 4);
  put(&kCacheVersion, 4);
  const std::int32_t dims[3] = {op.grid.nx, op.grid.ny, op.grid.nz};
  const std::int32_t pads[3] = {op.px, op.py, op.pz};
  const double cell[3] = {op.cell.x, op.cell.y, op.cell.z};
  put(dims, sizeof dims);
  put(cell, sizeof cell);
  put(pads, sizeof pads);
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& s : op.spec) h = fnv1a(s.data(), s.size() * sizeof(double), h);
  put(&h, 8);
  for (const auto& s : op.spec) put(s.data(), s.size() * sizeof(double));
}

bool load_demag_cache(const GridSpec& grid, Vec3 cell_dims, const std::string& path,
                      DemagOperator& op) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  auto get = [&](void* p, std::size_t n) { f.read(static_cast<char*>(p), n); };
  std::uint32_t magic = 0, version = 0;
  get(&magic, 4);
  get(&version, 4);
  if (magic != kCacheMagic || version != kCacheVersion) return false;
  std::int32_t dims[3], pads[3];
  double cell[3];
  get(dims, sizeof dims);
  get(cell, sizeof cell);
  get(pads, sizeof pads);
  if (dims[0] != grid.nx || dims[1] != grid.ny || dims[2] != grid.nz) return false;
  if (cell[0] != cell_dims.x || cell[1] != cell_dims.y || cell[2] != cell_dims.z) return false;
  std::uint64_t stored = 0;
  get(&stored, 8);
  op.grid = grid;
  op.cell = cell_dims;
  op.px = pads[0];
  op.py = pads[1];
  op.pz = pads[2];
  const std::int64_t ptot = op.padded();
  std::uint64_t h = 1469598103934665603ull;
  for (auto& s : op.spec) {
    s.resize(ptot);
    get(s.data(), ptot * sizeof(double));
    h = fnv1a(s.data(), s.size() * sizeof(double), h);
  }
  return bool(f) && h == stored;
}

}  // namespace llg
