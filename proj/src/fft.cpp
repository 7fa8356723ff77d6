#include "llg/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace llg::fft {

namespace {
constexpr double pi = std::numbers::pi;

std::vector<int> factorize(int n) {
  std::vector<int> f;
  for (int p : {2, 3, 5})
    while (n % p == 0) {
      f.push_back(p);
      n /= p;
    }
  for (int p = 7; p * p <= n; p += 2)
    while (n % p == 0) {
      f.push_back(p);
      n /= p;
    }
  if (n > 1) f.push_back(n);
  return f;
}
}  // namespace

Plan::Plan(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("fft::Plan: n must be >= 1");
  factors_ = factorize(n);
  roots_fwd_.resize(n);
  roots_inv_.resize(n);
  for (int k = 0; k < n; ++k) {
    const double a = -2.0 * pi * k / n;
    roots_fwd_[k] = {std::cos(a), std::sin(a)};
    roots_inv_[k] = std::conj(roots_fwd_[k]);
  }
  scratch_.resize(n);
}

void Plan::rec(const cplx* in, std::int64_t stride, cplx* out, int n, int root_step,
               const cplx* roots) const {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  if (n == 2) {
    const cplx a = in[0], b = in[stride];
    out[0] = a + b;
    out[1] = a - b;
    return;
  }
  int p = 2;
  {
    int m = n;
    p = n;  // prime fallback
    for (int f : factors_)
      if (m % f == 0) {
        p = f;
        break;
      }
  }
  const int m = n / p;
  for (int r = 0; r < p; ++r)
    rec(in + r * stride, stride * p, out + r * m, m, root_step * p, roots);

  if (p == 2) {
    // Radix-2 butterfly: X[q] = E[q] + w^q O[q], X[q+m] = E[q] - w^q O[q].
    std::int64_t w_idx = 0;
    for (int q = 0; q < m; ++q) {
      const cplx e = out[q];
      const cplx o = roots[w_idx] * out[m + q];
      out[q] = e + o;
      out[m + q] = e - o;
      w_idx += root_step;
    }
    return;
  }

  // Generic combine for p interleaved sub-transforms. Twiddle indices advance
  // by fixed strides and wrap by subtraction; no modulo in the loops.
  cplx tmp[64];
  std::vector<cplx> tmp_heap;
  cplx* t = tmp;
  if (p > 64) {
    tmp_heap.resize(p);
    t = tmp_heap.data();
  }
  const std::int64_t mstep = (std::int64_t(m) * root_step) % n_;
  std::int64_t base_q = 0;  // (q*root_step) mod n
  for (int q = 0; q < m; ++q) {
    for (int r = 0; r < p; ++r) t[r] = out[r * m + q];
    std::int64_t base_k = base_q;  // (kk*root_step) mod n, kk = q + kblk*m
    for (int kblk = 0; kblk < p; ++kblk) {
      cplx acc = t[0];
      std::int64_t w_idx = 0;
      for (int r = 1; r < p; ++r) {
        w_idx += base_k;
        if (w_idx >= n_) w_idx -= n_;
        acc += roots[w_idx] * t[r];
      }
      out[q + kblk * m] = acc;  // writes cover exactly the slots buffered in t
      base_k += mstep;
      if (base_k >= n_) base_k -= n_;
    }
    base_q += root_step;
    if (base_q >= n_) base_q -= n_;
  }
}

void Plan::run(cplx* data, int sign) const {
  const cplx* roots = sign > 0 ? roots_fwd_.data() : roots_inv_.data();
  rec(data, 1, scratch_.data(), n_, 1, roots);
  std::copy(scratch_.begin(), scratch_.end(), data);
}

Dct::Dct(int n) : n_(n), plan_(2 * n) {
  buf_.resize(2 * n);
  twiddle_.resize(n);
  for (int j = 0; j < n; ++j) {
    const double a = -pi * j / (2.0 * n);
    twiddle_[j] = {std::cos(a), std::sin(a)};
  }
  if (n <= 8) {
    dense_fwd_.resize(std::size_t(n) * n);
    dense_inv_.resize(std::size_t(n) * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double c = std::cos(pi * j * (i + 0.5) / n);
        dense_fwd_[j * n + i] = c;
        dense_inv_[i * n + j] = (j == 0 ? 1.0 : 2.0) * c / n;
      }
  }
}

void Dct::forward(const double* in, double* out) const {
  const int n = n_;
  if (!dense_fwd_.empty()) {
    double tmp[8];
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += dense_fwd_[j * n + i] * in[i];
      tmp[j] = s;
    }
    std::copy(tmp, tmp + n, out);
    return;
  }
  for (int i = 0; i < n; ++i) {
    buf_[i] = in[i];
    buf_[2 * n - 1 - i] = in[i];
  }
  plan_.forward(buf_.data());
  for (int j = 0; j < n; ++j) out[j] = 0.5 * (twiddle_[j] * buf_[j]).real();
}

void Dct::inverse(const double* in, double* out) const {
  const int n = n_;
  if (!dense_inv_.empty()) {
    double tmp[8];
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += dense_inv_[i * n + j] * in[j];
      tmp[i] = s;
    }
    std::copy(tmp, tmp + n, out);
    return;
  }
  // x_i = Re sum_{j<n} d_j e^{2 pi i (i j) / (2n)}, d_j = c_j e^{i pi j/(2n)},
  // c_0 = X_0/2, c_j = X_j.
  buf_[0] = cplx(0.5 * in[0], 0.0);
  for (int j = 1; j < n; ++j) buf_[j] = in[j] * std::conj(twiddle_[j]);
  for (int j = n; j < 2 * n; ++j) buf_[j] = 0.0;
  plan_.inverse(buf_.data());
  const double scale = 2.0 / n;
  for (int i = 0; i < n; ++i) out[i] = scale * buf_[i].real();
}

int next_smooth(int n) {
  auto smooth = [](int v) {
    for (int p : {2, 3, 5})
      while (v % p == 0) v /= p;
    return v == 1;
  };
  int v = std::max(1, n);
  while (!smooth(v)) ++v;
  return v;
}

}  // namespace llg::fft
