#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace llg {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int c) { return c == 0 ? x : (c == 1 ? y : z); }
  double operator[](int c) const { return c == 0 ? x : (c == 1 ? y : z); }
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(Vec3 a);

enum class SpatialOrder { Second, Fourth };

/// Cell-centered Cartesian grid. Interior cells are indexed 0..n-1 per axis
/// with centers at (i+1/2)h; two ghost layers (-2,-1 and n,n+1) surround every
/// axis. Axes with a single cell are inactive: excluded from stencils and
/// norms, their ghost layers hold copies of the lone interior layer.
struct GridSpec {
  int nx = 1, ny = 1, nz = 1;
  double hx = 1.0, hy = 1.0, hz = 1.0;
  int dim = 3;
  static constexpr int ghost = 2;

  static GridSpec line(int n);                 // 1D unit interval
  static GridSpec cube(int n);                 // 3D unit cube
  static GridSpec box(int nx, int ny, int nz, double hx, double hy, double hz);

  int count(int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
  double h(int axis) const { return axis == 0 ? hx : (axis == 1 ? hy : hz); }
  bool active(int axis) const { return count(axis) > 1; }
  std::int64_t cells() const { return std::int64_t(nx) * ny * nz; }
  double cell_volume() const { return hx * hy * hz; }

  int sx() const { return nx + 2 * ghost; }
  int sy() const { return ny + 2 * ghost; }
  int sz() const { return nz + 2 * ghost; }
  std::int64_t storage() const { return std::int64_t(sx()) * sy() * sz(); }

  // Storage index; valid for i in [-ghost, n+ghost) per axis.
  std::int64_t at(int i, int j, int k) const {
    return (i + ghost) +
           std::int64_t(sx()) * ((j + ghost) + std::int64_t(sy()) * (k + ghost));
  }
  std::int64_t interior_index(int i, int j, int k) const {
    return i + std::int64_t(nx) * (j + std::int64_t(ny) * k);
  }

  bool operator==(const GridSpec&) const = default;

  // The fourth-order stencil order claim needs at least 5 cells per active
  // axis; device grids (thin films, strips) run thinner axes regardless.
  bool meets_fourth_order_minimum() const;
  void validate() const;  // throws std::invalid_argument
};

struct ScalarField {
  GridSpec grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g) : grid(g), v(g.storage(), 0.0) {}

  double& operator()(int i, int j, int k) { return v[grid.at(i, j, k)]; }
  double operator()(int i, int j, int k) const { return v[grid.at(i, j, k)]; }
};

struct VectorField {
  GridSpec grid;
  std::array<std::vector<double>, 3> comp;

  VectorField() = default;
  explicit VectorField(const GridSpec& g) : grid(g) {
    for (auto& c : comp) c.assign(g.storage(), 0.0);
  }

  double& operator()(int c, int i, int j, int k) { return comp[c][grid.at(i, j, k)]; }
  double operator()(int c, int i, int j, int k) const { return comp[c][grid.at(i, j, k)]; }

  Vec3 value(int i, int j, int k) const {
    const auto id = grid.at(i, j, k);
    return {comp[0][id], comp[1][id], comp[2][id]};
  }
  void set(int i, int j, int k, Vec3 u) {
    const auto id = grid.at(i, j, k);
    comp[0][id] = u.x;
    comp[1][id] = u.y;
    comp[2][id] = u.z;
  }
  void fill(Vec3 u);
};

struct NormTriple {
  double linf = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;
};

// Ghost synchronization: even reflection about each physical boundary face
// (ghost -1 mirrors interior 0, ghost -2 mirrors interior 1, and likewise at
// the far end). Inactive axes copy the interior layer. Idempotent.
void fill_ghosts(ScalarField& f);
void fill_ghosts(VectorField& f);

// Long-stencil first/second differences along one axis. Input ghosts must be
// synchronized; output is valid on interior cells, ghosts zeroed.
ScalarField d1(const ScalarField& f, int axis, SpatialOrder order);
ScalarField d2(const ScalarField& f, int axis, SpatialOrder order);

void laplacian(const VectorField& m, SpatialOrder order, VectorField& out);
VectorField laplacian(const VectorField& m, SpatialOrder order);

// Pointwise |grad m|^2 summed over components and active axes.
void grad_sq(const VectorField& m, SpatialOrder order, ScalarField& out);
ScalarField grad_sq(const VectorField& m, SpatialOrder order);

// Discrete error norms over interior cells: componentwise max norm, midpoint
// L2, and H1 = sqrt(L2^2 + ||grad_h e||_2^2) with the fourth-order gradient.
NormTriple error_norms(const VectorField& num, const VectorField& exact);

bool all_finite(const VectorField& f);

}  // namespace llg
