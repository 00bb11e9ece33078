#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "qpie/rational.hpp"

namespace qpie {

/// Dense exact-rational matrix, row major.
using RatMat = std::vector<std::vector<Rat>>;

inline RatMat rat_identity(int n) {
  RatMat I(n, std::vector<Rat>(n, Rat(0)));
  for (int i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

inline RatMat rat_matmul(const RatMat& A, const RatMat& B) {
  if (A.empty() || B.empty() || A[0].size() != B.size())
    throw std::invalid_argument("matmul: shape mismatch");
  size_t n = A.size(), m = B[0].size(), k = B.size();
  RatMat C(n, std::vector<Rat>(m, Rat(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (A[i][l] == 0) continue;
      for (size_t j = 0; j < m; ++j) C[i][j] += A[i][l] * B[l][j];
    }
  return C;
}

inline std::vector<Rat> rat_matvec(const RatMat& A,
                                   const std::vector<Rat>& x) {
  if (A.empty() || A[0].size() != x.size())
    throw std::invalid_argument("matvec: shape mismatch");
  std::vector<Rat> y(A.size(), Rat(0));
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i] += A[i][j] * x[j];
  return y;
}

/// Exact inverse by Gauss-Jordan elimination; empty optional when singular.
inline std::optional<RatMat> rat_inverse(const RatMat& A) {
  const size_t n = A.size();
  for (const auto& row : A)
    if (row.size() != n) throw std::invalid_argument("inverse: not square");
  RatMat work = A;
  RatMat inv = rat_identity(static_cast<int>(n));
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && work[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(work[piv], work[col]);
    std::swap(inv[piv], inv[col]);
    Rat p = work[col][col];
    for (size_t j = 0; j < n; ++j) {
      work[col][j] /= p;
      inv[col][j] /= p;
    }
    for (size_t i = 0; i < n; ++i) {
      if (i == col || work[i][col] == 0) continue;
      Rat f = work[i][col];
      for (size_t j = 0; j < n; ++j) {
        work[i][j] -= f * work[col][j];
        inv[i][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

}  // namespace qpie
