// SPDX-License-Identifier: Apache-2.0
#include "dwsl/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dwsl/error.hpp"

namespace dwsl {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& b) const {
  if (cols_ != b.rows_) raise(ErrorCode::InvalidArgument, "matrix product shape mismatch");
  DenseMatrix r(rows_, b.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Complex aik = (*this)(i, k);
      if (aik == Complex{}) continue;
      for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& b) const {
  DenseMatrix r(*this);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += b.a_[i];
  return r;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& b) const {
  DenseMatrix r(*this);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= b.a_[i];
  return r;
}

DenseMatrix DenseMatrix::scaled(Complex s) const {
  DenseMatrix r(*this);
  for (auto& v : r.a_) v *= s;
  return r;
}

std::vector<Complex> DenseMatrix::apply(std::span<const Complex> x) const {
  std::vector<Complex> y(rows_);
  for (int i = 0; i < rows_; ++i) {
    Complex acc{};
    for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<Complex> DenseMatrix::apply_adjoint(std::span<const Complex> x) const {
  std::vector<Complex> y(cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) y[j] += std::conj((*this)(i, j)) * x[i];
  return y;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : a_) m = std::max(m, std::abs(v));
  return m;
}

DenseLU::DenseLU(DenseMatrix a) : lu_(std::move(a)), piv_(lu_.rows()) {
  const int n = lu_.rows();
  if (n != lu_.cols()) raise(ErrorCode::InvalidArgument, "LU of a non-square matrix");
  const double scale = lu_.max_abs();
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(lu_(k, k));
    for (int i = k + 1; i < n; ++i)
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    piv_[k] = p;
    if (!(best > scale * 1e-300) || best == 0.0)
      raise(ErrorCode::SingularFactorization, "zero pivot in dense LU");
    if (p != k)
      for (int j = k; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
    const Complex pivot = lu_(k, k);
    for (int i = k + 1; i < n; ++i) {
      Complex l = lu_(i, k) / pivot;
      lu_(i, k) = l;
      if (l == Complex{}) continue;
      for (int j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
    }
  }
}

void DenseLU::solve_in_place(std::span<Complex> b) const {
  const int n = lu_.rows();
  for (int k = 0; k < n; ++k) {
    if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
    for (int i = k + 1; i < n; ++i) b[i] -= lu_(i, k) * b[k];
  }
  for (int k = n - 1; k >= 0; --k) {
    Complex acc = b[k];
    for (int j = k + 1; j < n; ++j) acc -= lu_(k, j) * b[j];
    b[k] = acc / lu_(k, k);
  }
}

void DenseLU::solve_adjoint_in_place(std::span<Complex> b) const {
  const int n = lu_.rows();
  for (int k = 0; k < n; ++k) {
    Complex acc = b[k];
    for (int j = 0; j < k; ++j) acc -= std::conj(lu_(j, k)) * b[j];
    b[k] = acc / std::conj(lu_(k, k));
  }
  for (int k = n - 1; k >= 0; --k) {
    Complex acc = b[k];
    for (int i = k + 1; i < n; ++i) acc -= std::conj(lu_(i, k)) * b[i];
    b[k] = acc;
    if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
  }
}

DenseMatrix DenseLU::solve(const DenseMatrix& b) const {
  const int n = lu_.rows();
  DenseMatrix x(n, b.cols());
  std::vector<Complex> col(n);
  for (int j = 0; j < b.cols(); ++j) {
    for (int i = 0; i < n; ++i) col[i] = b(i, j);
    solve_in_place(col);
    for (int i = 0; i < n; ++i) x(i, j) = col[i];
  }
  return x;
}

DenseMatrix DenseLU::inverse() const { return solve(DenseMatrix::identity(lu_.rows())); }

namespace {

void reduce_to_hessenberg(DenseMatrix& h) {
  const int n = h.rows();
  std::vector<Complex> v(n);
  for (int k = 0; k + 2 < n; ++k) {
    double norm2 = 0.0;
    for (int i = k + 1; i < n; ++i) norm2 += std::norm(h(i, k));
    double tail = norm2 - std::norm(h(k + 1, k));
    if (tail == 0.0) continue;
    double norm = std::sqrt(norm2);
    Complex x0 = h(k + 1, k);
    Complex phase = x0 == Complex{} ? Complex(1.0) : x0 / std::abs(x0);
    Complex alpha = -phase * norm;
    for (int i = 0; i < n; ++i) v[i] = 0.0;
    v[k + 1] = x0 - alpha;
    for (int i = k + 2; i < n; ++i) v[i] = h(i, k);
    double vn2 = 0.0;
    for (int i = k + 1; i < n; ++i) vn2 += std::norm(v[i]);
    if (vn2 == 0.0) continue;
    // H <- (I - 2 v v* / |v|^2) H (I - 2 v v* / |v|^2)
    for (int j = 0; j < n; ++j) {
      Complex s{};
      for (int i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
      s *= 2.0 / vn2;
      for (int i = k + 1; i < n; ++i) h(i, j) -= v[i] * s;
    }
    for (int i = 0; i < n; ++i) {
      Complex s{};
      for (int j = k + 1; j < n; ++j) s += h(i, j) * v[j];
      s *= 2.0 / vn2;
      for (int j = k + 1; j < n; ++j) h(i, j) -= s * std::conj(v[j]);
    }
    for (int i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

struct Givens {
  double c;
  Complex s;
};

Givens make_givens(Complex a, Complex b) {
  double ab = std::abs(b);
  if (ab == 0.0) return {1.0, 0.0};
  double aa = std::abs(a);
  if (aa == 0.0) return {0.0, std::conj(b) / ab};
  double r = std::hypot(aa, ab);
  return {aa / r, (a / aa) * std::conj(b) / r};
}

}  // namespace

std::vector<Complex> eigenvalues(DenseMatrix h) {
  const int n = h.rows();
  if (n != h.cols()) raise(ErrorCode::InvalidArgument, "eigenvalues of a non-square matrix");
  std::vector<Complex> eig;
  eig.reserve(n);
  if (n == 0) return eig;
  reduce_to_hessenberg(h);
  const double eps = std::numeric_limits<double>::epsilon();
  const double hnorm = std::max(h.max_abs(), std::numeric_limits<double>::min());
  std::vector<Givens> rot(n);
  int hi = n - 1, iter = 0, total = 0;
  while (hi >= 0) {
    if (hi == 0) {
      eig.push_back(h(0, 0));
      break;
    }
    int l = hi;
    for (; l > 0; --l) {
      double off = std::abs(h(l, l - 1));
      double diag = std::abs(h(l, l)) + std::abs(h(l - 1, l - 1));
      if (diag == 0.0) diag = hnorm;
      if (off <= eps * diag) {
        h(l, l - 1) = 0.0;
        break;
      }
    }
    if (l == hi) {
      eig.push_back(h(hi, hi));
      --hi;
      iter = 0;
      continue;
    }
    ++iter;
    if (++total > 100 * n) raise(ErrorCode::NoConvergence, "QR iteration did not converge");
    Complex mu;
    if (iter % 11 == 10) {
      mu = h(hi, hi) + Complex(0.75, 0.5) * std::abs(h(hi, hi - 1));
    } else {
      Complex a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
      Complex tr = a + d, det = a * d - b * c;
      Complex disc = std::sqrt(tr * tr * 0.25 - det);
      Complex e1 = tr * 0.5 + disc, e2 = tr * 0.5 - disc;
      mu = std::abs(e1 - d) < std::abs(e2 - d) ? e1 : e2;
    }
    for (int k = l; k <= hi; ++k) h(k, k) -= mu;
    for (int k = l; k < hi; ++k) {
      Givens g = make_givens(h(k, k), h(k + 1, k));
      rot[k] = g;
      for (int j = k; j <= hi; ++j) {
        Complex x = h(k, j), y = h(k + 1, j);
        h(k, j) = g.c * x + g.s * y;
        h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
      }
    }
    for (int k = l; k < hi; ++k) {
      const Givens& g = rot[k];
      for (int i = l; i <= std::min(k + 2, hi); ++i) {
        Complex x = h(i, k), y = h(i, k + 1);
        h(i, k) = g.c * x + std::conj(g.s) * y;
        h(i, k + 1) = -g.s * x + g.c * y;
      }
    }
    for (int k = l; k <= hi; ++k) h(k, k) += mu;
  }
  return eig;
}

double vector_norm(std::span<const Complex> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

double operator_norm(int dim, const std::function<std::vector<Complex>(std::span<const Complex>)>& op,
                     const std::function<std::vector<Complex>(std::span<const Complex>)>& op_adj,
                     const PowerIterationOptions& options) {
  if (dim <= 0) return 0.0;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  std::vector<Complex> x(dim);
  for (auto& v : x) v = Complex(gauss(rng), gauss(rng));
  double nx = vector_norm(x);
  for (auto& v : x) v /= nx;
  double sigma = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    auto y = op(x);
    double s = vector_norm(y);
    if (s == 0.0) return sigma;
    bool done = it > 0 && std::abs(s - sigma) <= options.tolerance * s;
    sigma = std::max(sigma, s);
    if (done) break;
    x = op_adj(y);
    double n = vector_norm(x);
    if (n == 0.0) break;
    for (auto& v : x) v /= n;
  }
  return sigma;
}

double spectral_norm(const DenseMatrix& m, const PowerIterationOptions& options) {
  return operator_norm(
      m.cols(), [&](std::span<const Complex> x) { return m.apply(x); },
      [&](std::span<const Complex> y) { return m.apply_adjoint(y); }, options);
}

std::vector<double> singular_values(const DenseMatrix& a_in) {
  DenseMatrix a = a_in;
  const int m = a.rows(), n = a.cols();
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        Complex gamma{};
        for (int i = 0; i < m; ++i) {
          alpha += std::norm(a(i, p));
          beta += std::norm(a(i, q));
          gamma += std::conj(a(i, p)) * a(i, q);
        }
        double g = std::abs(gamma);
        if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
        off = std::max(off, g / std::sqrt(alpha * beta));
        Complex phase = gamma / g;
        double zeta = (beta - alpha) / (2.0 * g);
        double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (int i = 0; i < m; ++i) {
          Complex ap = a(i, p), aq = a(i, q) * std::conj(phase);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
      }
    if (off <= eps) break;
  }
  std::vector<double> sv(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += std::norm(a(i, j));
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

}  // namespace dwsl
