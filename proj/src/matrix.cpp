#include "netscan/matrix.hpp"

#include <cmath>

#include "netscan/errors.hpp"

namespace netscan {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rs) {
  Matrix m(static_cast<int>(rs.size()), rs.size() ? static_cast<int>(rs.begin()->size()) : 0);
  int r = 0;
  for (const auto& row : rs) {
    if (static_cast<int>(row.size()) != m.cols)
      throw ScanError(Err::ShapeMismatch, "ragged initializer rows");
    int c = 0;
    for (double v : row) m.at(r, c++) = v;
    ++r;
  }
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw ScanError(Err::ShapeMismatch, "matmul " + std::to_string(a.rows) + "x" +
                                            std::to_string(a.cols) + " * " + std::to_string(b.rows) +
                                            "x" + std::to_string(b.cols));
  Matrix out(a.rows, b.cols);
  // i-k-j order keeps the inner loop contiguous in both b and out.
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
  return out;
}

Matrix relu(const Matrix& a) {
  Matrix out = a;
  for (auto& v : out.data)
    if (v < 0.0) v = 0.0;
  return out;
}

std::vector<double> softmax_row(const std::vector<double>& v) {
  double mx = -HUGE_VAL;
  for (double x : v) mx = std::max(mx, x);
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    sum += out[i];
  }
  for (auto& x : out) x /= sum;
  return out;
}

Matrix dropout(const Matrix& m, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0)
    throw ScanError(Err::ConfigError, "dropout rate must be in [0,1)");
  if (!training || rate == 0.0) return m;
  Matrix out = m;
  const double keep = 1.0 - rate;
  for (auto& v : out.data) v = rng.next_double() < rate ? 0.0 : v / keep;
  return out;
}

bool all_finite(const Matrix& m) {
  for (double v : m.data)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix glorot(int fan_in, int fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (auto& v : m.data) v = rng.uniform(-a, a);
  return m;
}

}  // namespace netscan
