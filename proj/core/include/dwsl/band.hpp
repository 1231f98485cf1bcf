// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "dwsl/error.hpp"

namespace dwsl {

template <class T>
inline T conj_value(const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return v;
  } else {
    return std::conj(v);
  }
}

// Square band matrix with kl sub- and ku super-diagonals. Row-wise storage
// keeps kl extra super-diagonals for pivoting fill.
template <class T>
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1), data_(std::size_t(n) * width_) {}

  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  bool in_band(int i, int j) const { return j - i >= -kl_ && j - i <= ku_; }

  T& at(int i, int j) { return data_[std::size_t(i) * width_ + (j - i + kl_)]; }
  const T& at(int i, int j) const { return data_[std::size_t(i) * width_ + (j - i + kl_)]; }

  T get(int i, int j) const { return in_band(i, j) ? at(i, j) : T{}; }

  void multiply(std::span<const T> x, std::span<T> y) const {
    for (int i = 0; i < n_; ++i) {
      T acc{};
      for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) acc += at(i, j) * x[j];
      y[i] = acc;
    }
  }

  void multiply_adjoint(std::span<const T> x, std::span<T> y) const {
    for (int j = 0; j < n_; ++j) y[j] = T{};
    for (int i = 0; i < n_; ++i)
      for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j)
        y[j] += conj_value(at(i, j)) * x[i];
  }

 private:
  template <class>
  friend class BandLU;
  int n_ = 0, kl_ = 0, ku_ = 0, width_ = 1;
  std::vector<T> data_;
};

// Gaussian elimination with partial pivoting inside the band.
template <class T>
class BandLU {
 public:
  explicit BandLU(BandMatrix<T> a) : lu_(std::move(a)), piv_(lu_.n_) {
    const int n = lu_.n_, kl = lu_.kl_, kmax = lu_.kl_ + lu_.ku_;
    double scale = 0.0;
    for (const auto& v : lu_.data_) scale = std::max(scale, std::abs(v));
    const double tiny = scale * 1e-300 + 1e-300;
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::abs(lu_.at(k, k));
      for (int i = k + 1; i <= std::min(n - 1, k + kl); ++i) {
        double v = std::abs(lu_.at(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      piv_[k] = p;
      if (!(best > tiny)) raise(ErrorCode::SingularFactorization, "zero pivot in band LU");
      const int jmax = std::min(n - 1, k + kmax);
      if (p != k)
        for (int j = k; j <= jmax; ++j) std::swap(lu_.at(k, j), lu_.at(p, j));
      const T pivot = lu_.at(k, k);
      for (int i = k + 1; i <= std::min(n - 1, k + kl); ++i) {
        T l = lu_.at(i, k) / pivot;
        lu_.at(i, k) = l;
        if (l == T{}) continue;
        for (int j = k + 1; j <= jmax; ++j) lu_.at(i, j) -= l * lu_.at(k, j);
      }
    }
  }

  int size() const { return lu_.n_; }

  void solve_in_place(std::span<T> b) const {
    const int n = lu_.n_, kl = lu_.kl_, kmax = lu_.kl_ + lu_.ku_;
    for (int k = 0; k < n; ++k) {
      if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
      for (int i = k + 1; i <= std::min(n - 1, k + kl); ++i) b[i] -= lu_.at(i, k) * b[k];
    }
    for (int k = n - 1; k >= 0; --k) {
      T acc = b[k];
      for (int j = k + 1; j <= std::min(n - 1, k + kmax); ++j) acc -= lu_.at(k, j) * b[j];
      b[k] = acc / lu_.at(k, k);
    }
  }

  void solve_adjoint_in_place(std::span<T> b) const {
    const int n = lu_.n_, kl = lu_.kl_, kmax = lu_.kl_ + lu_.ku_;
    for (int k = 0; k < n; ++k) {
      T acc = b[k];
      for (int j = std::max(0, k - kmax); j < k; ++j) acc -= conj_value(lu_.at(j, k)) * b[j];
      b[k] = acc / conj_value(lu_.at(k, k));
    }
    for (int k = n - 1; k >= 0; --k) {
      T acc = b[k];
      for (int i = k + 1; i <= std::min(n - 1, k + kl); ++i) acc -= conj_value(lu_.at(i, k)) * b[i];
      b[k] = acc;
      if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
    }
  }

 private:
  BandMatrix<T> lu_;
  std::vector<int> piv_;
};

// Periodic tridiagonal N x N matrix: diag[i] = A(i,i), lower[i] = A(i,i-1),
// upper[i] = A(i,i+1), indices mod N.
template <class T>
struct PeriodicTridiagonal {
  std::vector<T> diag, lower, upper;
  int size() const { return static_cast<int>(diag.size()); }

  void multiply(std::span<const T> x, std::span<T> y) const {
    const int n = size();
    for (int i = 0; i < n; ++i)
      y[i] = lower[i] * x[(i - 1 + n) % n] + diag[i] * x[i] + upper[i] * x[(i + 1) % n];
  }
};

// Position of original index i under the interleaving order
// 0, N-1, 1, N-2, ... that turns a periodic tridiagonal into a pentadiagonal band.
inline int interleave_position(int i, int n) { return i <= (n - 1) / 2 ? 2 * i : 2 * (n - 1 - i) + 1; }

template <class T>
BandMatrix<T> to_band(const PeriodicTridiagonal<T>& a) {
  const int n = a.size();
  BandMatrix<T> band(n, 2, 2);
  auto put = [&](int i, int j, T v) {
    int pi = interleave_position(i, n), pj = interleave_position(j, n);
    band.at(pi, pj) += v;
  };
  for (int i = 0; i < n; ++i) {
    put(i, i, a.diag[i]);
    put(i, (i - 1 + n) % n, a.lower[i]);
    put(i, (i + 1) % n, a.upper[i]);
  }
  return band;
}

// Factorisation of a periodic tridiagonal through its interleaved band form.
template <class T>
class PeriodicTridiagonalLU {
 public:
  explicit PeriodicTridiagonalLU(const PeriodicTridiagonal<T>& a)
      : n_(a.size()), lu_(to_band(a)) {}

  int size() const { return n_; }

  void solve_in_place(std::span<T> b) const { apply(b, false); }
  void solve_adjoint_in_place(std::span<T> b) const { apply(b, true); }

 private:
  void apply(std::span<T> b, bool adjoint) const {
    std::vector<T> work(n_);
    for (int i = 0; i < n_; ++i) work[interleave_position(i, n_)] = b[i];
    if (adjoint)
      lu_.solve_adjoint_in_place(work);
    else
      lu_.solve_in_place(work);
    for (int i = 0; i < n_; ++i) b[i] = work[interleave_position(i, n_)];
  }

  int n_;
  BandLU<T> lu_;
};

}  // namespace dwsl
