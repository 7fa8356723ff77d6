#pragma once

#include <complex>
#include <vector>

namespace llg::fft {

using cplx = std::complex<double>;

/// Mixed-radix complex FFT plan for a fixed length. Handles any n >= 1
/// (generic DFT stage for prime factors). Transforms are unnormalized; the
/// inverse of forward() is inverse() scaled by 1/n.
class Plan {
 public:
  explicit Plan(int n);

  int size() const { return n_; }
  void forward(cplx* data) const { run(data, +1); }
  void inverse(cplx* data) const { run(data, -1); }

 private:
  void run(cplx* data, int sign) const;
  void rec(const cplx* in, std::int64_t stride, cplx* out, int n, int root_step,
           const cplx* roots) const;

  int n_ = 0;
  std::vector<int> factors_;
  std::vector<cplx> roots_fwd_;        // e^{-2 pi i k / n}
  std::vector<cplx> roots_inv_;        // conjugates
  mutable std::vector<cplx> scratch_;  // ping buffer, size n
};

/// Orthogonality-free DCT pair on cell-centered data:
///   forward (DCT-II):  X_j = sum_i x_i cos(pi j (i+1/2) / n)
///   inverse (DCT-III): x_i = (X_0 + 2 sum_{j>=1} X_j cos(pi j (i+1/2)/n)) / n
/// inverse(forward(x)) == x. Both run through a complex FFT of length 2n.
class Dct {
 public:
  explicit Dct(int n);

  int size() const { return n_; }
  void forward(const double* in, double* out) const;
  void inverse(const double* in, double* out) const;

 private:
  int n_;
  Plan plan_;                        // length 2n
  mutable std::vector<cplx> buf_;
  std::vector<cplx> twiddle_;        // e^{-i pi j / (2n)}
  // Dense cosine matrices for very short transforms, where per-call FFT
  // plumbing costs more than the arithmetic (thin device axes hit this path
  // thousands of times per preconditioner application).
  std::vector<double> dense_fwd_, dense_inv_;
};

/// Smallest integer >= n whose prime factors are all in {2,3,5}.
int next_smooth(int n);

}  // namespace llg::fft
