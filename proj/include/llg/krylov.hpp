#pragma once

#include <functional>
#include <span>
#include <vector>

namespace llg {

using LinearOp = std::function<void(std::span<const double>, std::span<double>)>;

struct KrylovConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-13;
  int restart = 40;
  int max_iters = 2000;
  std::function<void(int, double)> monitor;  // (iteration, residual estimate)
};

struct SolveStats {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  bool breakdown = false;
  double wall_time = 0.0;
};

/// Restarted GMRES, matrix-free, with optional right preconditioner (solves
/// A M^{-1} u = b, x = M^{-1} u, so the monitored residual is the true one).
/// Modified Gram-Schmidt with a second pass when orthogonality degrades past
/// 1e-8. On entry x holds the initial guess; on exit the best iterate.
/// Convergence target: ||b - A x||_2 <= max(rel_tol ||b||_2, abs_tol).
SolveStats gmres(const LinearOp& apply, std::span<const double> b, std::span<double> x,
                 const KrylovConfig& cfg, const LinearOp* right_precond = nullptr);

}  // namespace llg
