#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "vrl/numeric.hpp"

namespace vrl {

template <class S>
using Matrix = std::vector<std::vector<S>>;

namespace detail {

// Pivot magnitude for row selection. Exact mode only needs nonzero.
template <class S>
double pivot_size(const S& x) {
  return ScalarTraits<S>::to_double(ScalarTraits<S>::abs(x));
}

}  // namespace detail

// Row-echelon rank by Gaussian elimination with partial pivoting. In exact
// mode any nonzero pivot counts; in float mode pivots below `float_tol`
// (relative to the largest entry seen in the column sweep) are treated as
// zero.
template <class S>
int matrix_rank(Matrix<S> m, double float_tol = 1e-9) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  double scale = 0.0;
  for (const auto& row : m)
    for (const S& x : row) scale = std::max(scale, detail::pivot_size(x));
  if (scale == 0.0) return 0;
  const double threshold = ScalarTraits<S>::exact ? 0.0 : float_tol * scale;

  int rank = 0;
  std::size_t lead = 0;
  for (std::size_t col = 0; col < cols && lead < rows; ++col) {
    std::size_t best = lead;
    double best_size = detail::pivot_size(m[lead][col]);
    for (std::size_t r = lead + 1; r < rows; ++r) {
      double size = detail::pivot_size(m[r][col]);
      if (size > best_size) {
        best = r;
        best_size = size;
      }
    }
    if (best_size <= threshold) continue;
    std::swap(m[lead], m[best]);
    for (std::size_t r = lead + 1; r < rows; ++r) {
      if (m[r][col] == ScalarTraits<S>::from_long(0)) continue;
      S factor = m[r][col] / m[lead][col];
      for (std::size_t c = col; c < cols; ++c)
        m[r][c] -= factor * m[lead][c];
    }
    ++lead;
    ++rank;
  }
  return rank;
}

// Square solve by Gaussian elimination; nullopt when singular (pivot at or
// below the float threshold).
template <class S>
std::optional<std::vector<S>> solve_square(Matrix<S> a, std::vector<S> b,
                                           double float_tol = 1e-12) {
  const std::size_t n = a.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (const S& x : row) scale = std::max(scale, detail::pivot_size(x));
  const double threshold = ScalarTraits<S>::exact ? 0.0 : float_tol * scale;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    double best_size = detail::pivot_size(a[col][col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double size = detail::pivot_size(a[r][col]);
      if (size > best_size) {
        best = r;
        best_size = size;
      }
    }
    if (best_size <= threshold) return std::nullopt;
    std::swap(a[col], a[best]);
    std::swap(b[col], b[best]);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[r][col] == ScalarTraits<S>::from_long(0)) continue;
      S factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<S> x(n, ScalarTraits<S>::from_long(0));
  for (std::size_t i = n; i-- > 0;) {
    S acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

template <class S>
Matrix<S> transpose(const Matrix<S>& m) {
  if (m.empty()) return {};
  Matrix<S> out(m[0].size(),
                std::vector<S>(m.size(), ScalarTraits<S>::from_long(0)));
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m[r].size(); ++c) out[c][r] = m[r][c];
  return out;
}

template <class S>
Matrix<S> matmul(const Matrix<S>& a, const Matrix<S>& b) {
  Matrix<S> out(a.size(),
                std::vector<S>(b[0].size(), ScalarTraits<S>::from_long(0)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == ScalarTraits<S>::from_long(0)) continue;
      for (std::size_t j = 0; j < b[0].size(); ++j)
        out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

template <class S>
std::vector<S> matvec(const Matrix<S>& a, const std::vector<S>& v) {
  std::vector<S> out(a.size(), ScalarTraits<S>::from_long(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
  return out;
}

}  // namespace vrl
