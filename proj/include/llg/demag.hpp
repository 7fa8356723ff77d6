#pragma once

#include <array>
#include <string>

#include "llg/fft.hpp"
#include "llg/grid.hpp"

namespace llg {

/// Cell-averaged prism (Newell) demagnetization tensor, precomputed in the
/// frequency domain on a zero-padded grid for open-boundary convolution.
/// Immutable after construction; stray_field allocates its own workspace so
/// one operator can serve concurrent evaluations.
struct DemagOperator {
  GridSpec grid;
  Vec3 cell;            // physical cell dimensions (any consistent unit)
  int px = 1, py = 1, pz = 1;  // padded extents, >= 2n-1 per active axis
  // Real spectra of the six tensor components: xx, xy, xz, yy, yz, zz.
  std::array<std::vector<double>, 6> spec;

  std::int64_t padded() const { return std::int64_t(px) * py * pz; }
};

/// Newell's prism interaction primitives (exposed for verification).
double newell_f(double x, double y, double z);
double newell_g(double x, double y, double z);

/// Demag tensor entry for two equal prisms of size (dx,dy,dz) whose centers
/// are separated by (X,Y,Z). Convention: h = -N m, trace N(0,0,0) = 1.
double demag_nxx(double X, double Y, double Z, double dx, double dy, double dz);
double demag_nxy(double X, double Y, double Z, double dx, double dy, double dz);
double demag_entry(int a, int b, Vec3 d, Vec3 cell);

DemagOperator build_demag_operator(const GridSpec& grid, Vec3 cell_dims);

void stray_field(const DemagOperator& op, const VectorField& m, VectorField& hs);
VectorField stray_field(const DemagOperator& op, const VectorField& m);

/// O(N^2) direct summation over the same tensor lattice; reference path for
/// small grids and cross-checks.
VectorField stray_field_direct(const GridSpec& grid, Vec3 cell_dims, const VectorField& m);

/// Binary cache of the spectral kernel. Header: magic "LLGK", version,
/// grid dims, cell sizes, padded dims, FNV-1a checksum of the payload.
void save_demag_cache(const DemagOperator& op, const std::string& path);
bool load_demag_cache(const GridSpec& grid, Vec3 cell_dims, const std::string& path,
                      DemagOperator& op);

}  // namespace llg
