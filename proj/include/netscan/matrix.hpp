#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "netscan/rng.hpp"

namespace netscan {

/// Dense row-major matrix of doubles. The only tensor type in the project;
/// vectors are 1xC or Nx1 matrices.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

  size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  static Matrix zeros(int r, int c) { return Matrix(r, c); }
  static Matrix filled(int r, int c, double v) {
    Matrix m(r, c);
    for (auto& x : m.data) x = v;
    return m;
  }
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rs);
};

Matrix matmul(const Matrix& a, const Matrix& b);  // throws ShapeMismatch
Matrix transpose(const Matrix& a);
Matrix relu(const Matrix& a);

/// Softmax of a 1-D vector; result sums to 1 within 1e-12.
std::vector<double> softmax_row(const std::vector<double>& v);

/// Inverted dropout: training mode zeroes entries with probability `rate` and
/// scales survivors by 1/(1-rate); inference mode is the identity.
Matrix dropout(const Matrix& m, double rate, Rng& rng, bool training);

bool all_finite(const Matrix& m);

/// Glorot-uniform initialization, U(-a, a) with a = sqrt(6/(fan_in+fan_out)).
Matrix glorot(int fan_in, int fan_out, Rng& rng);

}  // namespace netscan
