#pragma once

#include <string>

#include "llg/grid.hpp"

namespace llg::io {

/// Scientific notation with 17 significant digits; CSV fields round-trip to
/// the same double.
std::string sci(double v);

/// Field snapshot, binary: magic "LLGF", version, dims, cell sizes, then the
/// three components over interior cells, x fastest (row-major in k,j,i).
void write_field_bin(const VectorField& f, const std::string& path);
VectorField read_field_bin(const std::string& path);

/// Legacy-VTK structured-points text export (POINT_DATA vectors), for
/// external viewers.
void write_field_vtk(const VectorField& f, const std::string& path,
                     const std::string& name = "m");

void ensure_dir(const std::string& path);

}  // namespace llg::io
