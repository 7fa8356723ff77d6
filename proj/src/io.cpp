#include "llg/io.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace llg::io {

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

namespace {
constexpr std::uint32_t kFieldMagic = 0x46474c4c;  // "LLGF"
constexpr std::uint32_t kFieldVersion = 1;
}  // namespace

void write_field_bin(const VectorField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  auto put = [&](const void* p, std::size_t n) { out.write(static_cast<const char*>(p), n); };
  put(&kFieldMagic, 4);
  put(&kFieldVersion, 4);
  const std::int32_t dims[3] = {f.grid.nx, f.grid.ny, f.grid.nz};
  const double cell[3] = {f.grid.hx, f.grid.hy, f.grid.hz};
  put(dims, sizeof dims);
  put(cell, sizeof cell);
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < f.grid.nz; ++k)
      for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i) {
          const double v = f(c, i, j, k);
          put(&v, sizeof v);
        }
}

VectorField read_field_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto get = [&](void* p, std::size_t n) { in.read(static_cast<char*>(p), n); };
  std::uint32_t magic = 0, version = 0;
  get(&magic, 4);
  get(&version, 4);
  if (magic != kFieldMagic || version != kFieldVersion)
    throw std::runtime_error("bad field file header: " + path);
  std::int32_t dims[3];
  double cell[3];
  get(dims, sizeof dims);
  get(cell, sizeof cell);
  GridSpec g = GridSpec::box(dims[0], dims[1], dims[2], cell[0], cell[1], cell[2]);
  VectorField f(g);
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          double v = 0;
          get(&v, sizeof v);
          f(c, i, j, k) = v;
        }
  if (!in) throw std::runtime_error("truncated field file: " + path);
  return f;
}

void write_field_vtk(const VectorField& f, const std::string& path, const std::string& name) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const GridSpec& g = f.grid;
  out << "# vtk DataFile Version 2.0\n"
      << "magnetization snapshot\nASCII\nDATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << g.nx << ' ' << g.ny << ' ' << g.nz << '\n'
      << "ORIGIN " << 0.5 * g.hx << ' ' << 0.5 * g.hy << ' ' << 0.5 * g.hz << '\n'
      << "SPACING " << g.hx << ' ' << g.hy << ' ' << g.hz << '\n'
      << "POINT_DATA " << g.cells() << '\n'
      << "VECTORS " << name << " double\n";
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const Vec3 v = f.value(i, j, k);
        out << v.x << ' ' << v.y << ' ' << v.z << '\n';
      }
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory " + path);
}

}  // namespace llg::io
