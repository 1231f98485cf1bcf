// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dwsl/types.hpp"

namespace dwsl {

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {}

  static DenseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Complex& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  const Complex& operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }
  std::span<Complex> data() { return a_; }
  std::span<const Complex> data() const { return a_; }

  DenseMatrix adjoint() const;
  DenseMatrix operator*(const DenseMatrix& b) const;
  DenseMatrix operator+(const DenseMatrix& b) const;
  DenseMatrix operator-(const DenseMatrix& b) const;
  DenseMatrix scaled(Complex s) const;
  std::vector<Complex> apply(std::span<const Complex> x) const;
  std::vector<Complex> apply_adjoint(std::span<const Complex> x) const;
  double max_abs() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Complex> a_;
};

class DenseLU {
 public:
  explicit DenseLU(DenseMatrix a);
  void solve_in_place(std::span<Complex> b) const;
  void solve_adjoint_in_place(std::span<Complex> b) const;
  DenseMatrix inverse() const;
  DenseMatrix solve(const DenseMatrix& b) const;
  int size() const { return lu_.rows(); }

 private:
  DenseMatrix lu_;
  std::vector<int> piv_;
};

// Householder reduction to upper Hessenberg form followed by single-shift
// complex QR with Wilkinson shifts. Eigenvalues only.
std::vector<Complex> eigenvalues(DenseMatrix a);

struct PowerIterationOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
  unsigned long long seed = 0x5eedULL;
};

// ||M|| from op(x) = M x and op_adj(x) = M* x by power iteration on M*M.
double operator_norm(int dim, const std::function<std::vector<Complex>(std::span<const Complex>)>& op,
                     const std::function<std::vector<Complex>(std::span<const Complex>)>& op_adj,
                     const PowerIterationOptions& options = {});

double spectral_norm(const DenseMatrix& m, const PowerIterationOptions& options = {});

// Singular values in descending order from the Hermitian matrix A*A.
std::vector<double> singular_values(const DenseMatrix& a);

double vector_norm(std::span<const Complex> x);

}  // namespace dwsl
