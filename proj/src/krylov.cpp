#include "llg/krylov.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace llg {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace

SolveStats gmres(const LinearOp& apply, std::span<const double> b, std::span<double> x,
                 const KrylovConfig& cfg, const LinearOp* right_precond) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::size_t n = b.size();
  if (x.size() != n) throw std::invalid_argument("gmres: size mismatch");
  const int m = std::max(2, cfg.restart);

  SolveStats stats;
  auto finish = [&](double res, bool ok) {
    stats.final_residual = res;
    stats.converged = ok;
    stats.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return stats;
  };

  const double bnorm = nrm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return finish(0.0, true);
  }
  const double target = std::max(cfg.rel_tol * bnorm, cfg.abs_tol);

  std::vector<double> r(n), w(n), z(n);
  std::vector<std::vector<double>> V;
  std::vector<double> H((m + 1) * m, 0.0);  // column-major Hessenberg
  std::vector<double> cs(m), sn(m), g(m + 1), y(m);
  auto Hc = [&](int i, int j) -> double& { return H[j * (m + 1) + i]; };

  auto residual = [&] {
    apply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return nrm2(r);
  };

  double rnorm = residual();
  if (cfg.monitor) cfg.monitor(0, rnorm);
  if (rnorm <= target) return finish(rnorm, true);

  while (stats.iterations < cfg.max_iters) {
    // Start (or restart) an Arnoldi cycle from the current residual.
    if (V.empty()) V.resize(m + 1);
    for (auto& v : V)
      if (v.size() != n) v.assign(n, 0.0);
    const double beta = rnorm;
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int j = 0;
    bool broke_down = false;
    for (; j < m && stats.iterations < cfg.max_iters; ++j) {
      if (right_precond) {
        (*right_precond)(V[j], z);
        apply(z, w);
      } else {
        apply(V[j], w);
      }
      ++stats.iterations;

      const double wnorm_in = nrm2(w);
      for (int i = 0; i <= j; ++i) {
        const double hij = dot(w, V[i]);
        Hc(i, j) = hij;
        axpy(-hij, V[i], w);
      }
      double wnorm = nrm2(w);
      // Second Gram-Schmidt pass if w retains a component along the basis
      // larger than 1e-8 relative.
      double loss = 0.0;
      for (int i = 0; i <= j; ++i) loss = std::max(loss, std::abs(dot(w, V[i])));
      if (wnorm > 0.0 && loss > 1e-8 * wnorm) {
        for (int i = 0; i <= j; ++i) {
          const double c = dot(w, V[i]);
          Hc(i, j) += c;
          axpy(-c, V[i], w);
        }
        wnorm = nrm2(w);
      }
      Hc(j + 1, j) = wnorm;

      if (wnorm <= 1e-14 * std::max(1.0, wnorm_in)) {
        stats.breakdown = true;  // invariant subspace reached
        broke_down = true;
      } else {
        for (std::size_t i = 0; i < n; ++i) V[j + 1][i] = w[i] / wnorm;
      }

      // Apply accumulated Givens rotations to the new column, then form the
      // rotation that annihilates H(j+1,j).
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * Hc(i, j) + sn[i] * Hc(i + 1, j);
        Hc(i + 1, j) = -sn[i] * Hc(i, j) + cs[i] * Hc(i + 1, j);
        Hc(i, j) = t;
      }
      const double denom = std::hypot(Hc(j, j), Hc(j + 1, j));
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = Hc(j, j) / denom;
        sn[j] = Hc(j + 1, j) / denom;
      }
      Hc(j, j) = denom;
      Hc(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      const double res_est = std::abs(g[j + 1]);
      if (cfg.monitor) cfg.monitor(stats.iterations, res_est);
      if (res_est <= target || broke_down) {
        ++j;
        break;
      }
    }

    // Back-substitute the triangular system and update the iterate.
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int l = i + 1; l < j; ++l) s -= Hc(i, l) * y[l];
      y[i] = Hc(i, i) != 0.0 ? s / Hc(i, i) : 0.0;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int l = 0; l < j; ++l) axpy(y[l], V[l], w);
    if (right_precond) {
      (*right_precond)(w, z);
      axpy(1.0, z, x);
    } else {
      axpy(1.0, w, x);
    }

    rnorm = residual();
    if (rnorm <= target) return finish(rnorm, true);
    if (broke_down) return finish(rnorm, false);
  }
  return finish(rnorm, false);
}

}  // namespace llg
