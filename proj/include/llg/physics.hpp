#pragma once

#include "llg/grid.hpp"

namespace llg {

inline constexpr double mu0 = 4.0e-7 * 3.14159265358979323846;
inline constexpr double gamma_default = 1.76086e11;  // 1/(T s)

inline constexpr Vec3 e1{1.0, 0.0, 0.0};
inline constexpr Vec3 e2{0.0, 1.0, 0.0};
inline constexpr Vec3 e3{0.0, 0.0, 1.0};

/// Material constants and their nondimensionalization. For physical runs
/// epsilon = Cex/(mu0 Ms^2 L^2), q = Ku/(mu0 Ms^2), and one dimensionless time
/// unit equals t_unit = 1/(mu0 gamma Ms) seconds.
struct MaterialParams {
  double epsilon = 1.0;
  double q = 0.0;
  double alpha = 0.0;
  double mu0_ = mu0;
  double Ms = 1.0;       // A/m
  double Cex = 0.0;      // J/m
  double Ku = 0.0;       // J/m^3
  double L = 1.0;        // m, characteristic length
  double gamma = gamma_default;
  double t_unit = 1.0;   // s per dimensionless time unit

  static MaterialParams dimensionless(double epsilon, double q, double alpha);
  static MaterialParams from_physical(double Cex, double Ku, double Ms, double L,
                                      double alpha, double gamma = gamma_default);
  // Permalloy: Cex = 1.3e-11 J/m, Ku = 100 J/m^3, Ms = 8.0e5 A/m.
  static MaterialParams permalloy(double L, double alpha);

  double t_unit_ps() const { return t_unit * 1e12; }
  // Dimensionless field magnitude of an applied induction B (tesla).
  double he_from_tesla(double B) const { return B / (mu0_ * Ms); }
};

using ExternalField = Vec3;
using SourceTerm = VectorField;

/// Composite source f = -q (m2 e2 + m3 e3) + h_s + h_e. Pass hs = nullptr to
/// drop the stray-field contribution.
void compose_source(const VectorField& m, const VectorField* hs, ExternalField he,
                    double q, SourceTerm& f);
SourceTerm compose_source(const VectorField& m, const VectorField* hs, ExternalField he,
                          double q);

/// h_eff = eps * lap(m) + f. Ghosts of m must be synchronized.
VectorField effective_field(const VectorField& m, const SourceTerm& f, double eps,
                            SpatialOrder order = SpatialOrder::Fourth);

/// Fully explicit right-hand side
///   alpha (eps lap m + f) + alpha (eps |grad m|^2 - m.f) m - m x (eps lap m + f).
/// Reference form used by explicit sub-stepping and test oracles.
void llg_rhs(const VectorField& m, const SourceTerm& f, double eps, double alpha,
             SpatialOrder order, VectorField& out);
VectorField llg_rhs(const VectorField& m, const SourceTerm& f, double eps, double alpha,
                    SpatialOrder order = SpatialOrder::Fourth);

struct EnergyValue {
  double dimensionless = 0.0;  // sum over cells of the energy density times h^3
  double joules = 0.0;         // (mu0 Ms^2 / 2) L^3 times the dimensionless value
};

/// Discrete Gibbs free energy: density eps|grad m|^2 + q (m2^2+m3^2)
/// - 2 h_e.m - h_s.m integrated with midpoint weights.
EnergyValue energy(const VectorField& m, const VectorField* hs, ExternalField he,
                   const MaterialParams& p, SpatialOrder order = SpatialOrder::Fourth);

}  // namespace llg
