#include "llg/physics.hpp"

#include <stdexcept>

namespace llg {

MaterialParams MaterialParams::dimensionless(double epsilon, double q, double alpha) {
  MaterialParams p;
  p.epsilon = epsilon;
  p.q = q;
  p.alpha = alpha;
  return p;
}

MaterialParams MaterialParams::from_physical(double Cex, double Ku, double Ms, double L,
                                             double alpha, double gamma) {
  MaterialParams p;
  p.Cex = Cex;
  p.Ku = Ku;
  p.Ms = Ms;
  p.L = L;
  p.alpha = alpha;
  p.gamma = gamma;
  p.epsilon = Cex / (mu0 * Ms * Ms * L * L);
  p.q = Ku / (mu0 * Ms * Ms);
  p.t_unit = 1.0 / (mu0 * gamma * Ms);
  return p;
}

MaterialParams MaterialParams::permalloy(double L, double alpha) {
  return from_physical(1.3e-11, 100.0, 8.0e5, L, alpha);
}

void compose_source(const VectorField& m, const VectorField* hs, ExternalField he,
                    double q, SourceTerm& f) {
  const GridSpec& g = m.grid;
  if (hs && !(hs->grid == g)) throw std::invalid_argument("compose_source: grid mismatch");
  if (!(f.grid == g)) f = SourceTerm(g);
  const std::int64_t n = g.storage();
  for (std::int64_t id = 0; id < n; ++id) {
    f.comp[0][id] = he.x;
    f.comp[1][id] = -q * m.comp[1][id] + he.y;
    f.comp[2][id] = -q * m.comp[2][id] + he.z;
  }
  if (hs)
    for (int c = 0; c < 3; ++c)
      for (std::int64_t id = 0; id < n; ++id) f.comp[c][id] += hs->comp[c][id];
}

SourceTerm compose_source(const VectorField& m, const VectorField* hs, ExternalField he,
                          double q) {
  SourceTerm f(m.grid);
  compose_source(m, hs, he, q, f);
  return f;
}

VectorField effective_field(const VectorField& m, const SourceTerm& f, double eps,
                            SpatialOrder order) {
  VectorField h = laplacian(m, order);
  const std::int64_t n = m.grid.storage();
  for (int c = 0; c < 3; ++c)
    for (std::int64_t id = 0; id < n; ++id)
      h.comp[c][id] = eps * h.comp[c][id] + f.comp[c][id];
  return h;
}

void llg_rhs(const VectorField& m, const SourceTerm& f, double eps, double alpha,
             SpatialOrder order, VectorField& out) {
  const GridSpec& g = m.grid;
  VectorField lap(g);
  laplacian(m, order, lap);
  ScalarField gs(g);
  grad_sq(m, order, gs);

  if (!(out.grid == g)) out = VectorField(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const Vec3 mv = m.value(i, j, k);
        const Vec3 fv = f.value(i, j, k);
        const Vec3 u = eps * lap.value(i, j, k) + fv;  // eps lap m + f
        const double coef = alpha * (eps * gs(i, j, k) - dot(mv, fv));
        out.set(i, j, k, alpha * u + coef * mv - cross(mv, u));
      }
}

VectorField llg_rhs(const VectorField& m, const SourceTerm& f, double eps, double alpha,
                    SpatialOrder order) {
  VectorField out(m.grid);
  llg_rhs(m, f, eps, alpha, order, out);
  return out;
}

EnergyValue energy(const VectorField& m, const VectorField* hs, ExternalField he,
                   const MaterialParams& p, SpatialOrder order) {
  const GridSpec& g = m.grid;
  ScalarField gs(g);
  grad_sq(m, order, gs);

  double sum = 0.0;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const Vec3 mv = m.value(i, j, k);
        double d = p.epsilon * gs(i, j, k) + p.q * (mv.y * mv.y + mv.z * mv.z) -
                   2.0 * dot(he, mv);
        if (hs) d -= dot(hs->value(i, j, k), mv);
        sum += d;
      }
  EnergyValue e;
  e.dimensionless = sum * g.cell_volume();
  e.joules = 0.5 * p.mu0_ * p.Ms * p.Ms * p.L * p.L * p.L * e.dimensionless;
  return e;
}

}  // namespace llg
