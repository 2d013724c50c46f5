#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "multinorm/arith.hpp"
#include "multinorm/base.hpp"

namespace multinorm {

using Mat = std::vector<std::vector<BigInt>>;

inline Mat identity_matrix(int n) {
  Mat I(n, std::vector<BigInt>(n, 0));
  for (int i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

inline Mat mat_mul(const Mat& A, const Mat& B) {
  int m = static_cast<int>(A.size());
  int k = m ? static_cast<int>(A[0].size()) : 0;
  int n = B.empty() ? 0 : static_cast<int>(B[0].size());
  Mat C(m, std::vector<BigInt>(n, 0));
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < k; ++t) {
      if (A[i][t] == 0) continue;
      for (int j = 0; j < n; ++j) C[i][j] += A[i][t] * B[t][j];
    }
  return C;
}

// Row-echelon basis (upper triangular, positive pivots) of the lattice
// spanned by `rows` in Z^dim.  The lattice must have full rank.
inline Mat hnf_row_basis(const std::vector<std::vector<BigInt>>& rows, int dim) {
  std::vector<std::vector<BigInt>> work;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != dim)
      fail(ErrorCode::Internal, "hnf: row dimension mismatch");
    work.push_back(row);
  }
  Mat basis;
  for (int c = 0; c < dim; ++c) {
    // Euclidean elimination in column c across the remaining rows.
    for (;;) {
      int best = -1;
      for (size_t i = 0; i < work.size(); ++i) {
        if (work[i][c] == 0) continue;
        if (best < 0 || boost::multiprecision::abs(work[i][c]) <
                            boost::multiprecision::abs(work[best][c]))
          best = static_cast<int>(i);
      }
      if (best < 0) fail(ErrorCode::Internal, "hnf: lattice is not full rank");
      bool reduced_any = false;
      for (size_t i = 0; i < work.size(); ++i) {
        if (static_cast<int>(i) == best || work[i][c] == 0) continue;
        BigInt q = work[i][c] / work[best][c];
        for (int j = 0; j < dim; ++j) work[i][j] -= q * work[best][j];
        if (work[i][c] != 0) reduced_any = true;  // remainder left, loop again
      }
      if (!reduced_any) {
        auto pivot_row = work[best];
        work.erase(work.begin() + best);
        if (pivot_row[c] < 0)
          for (int j = 0; j < dim; ++j) pivot_row[j] = -pivot_row[j];
        basis.push_back(std::move(pivot_row));
        // Drop rows that became zero.
        std::erase_if(work, [](const std::vector<BigInt>& r) {
          for (const auto& x : r)
            if (x != 0) return false;
          return true;
        });
        break;
      }
    }
  }
  // Reduce entries above each pivot.
  for (int i = dim - 1; i >= 0; --i) {
    for (int k = 0; k < i; ++k) {
      BigInt q = basis[k][i] / basis[i][i];
      if (basis[k][i] - q * basis[i][i] < 0) q -= 1;  // floor
      if (q != 0)
        for (int j = 0; j < dim; ++j) basis[k][j] -= q * basis[i][j];
    }
  }
  return basis;
}

inline BigInt hnf_det(const Mat& B) {
  BigInt d = 1;
  for (size_t i = 0; i < B.size(); ++i) d *= B[i][i];
  return d;
}

// Solve x * B = v over Z for upper-triangular B; nullopt if not integral.
inline std::optional<std::vector<BigInt>> solve_in_lattice(
    const Mat& B, const std::vector<BigInt>& v) {
  int n = static_cast<int>(B.size());
  std::vector<BigInt> x(n, 0), rest = v;
  for (int j = 0; j < n; ++j) {
    if (rest[j] % B[j][j] != 0) return std::nullopt;
    x[j] = rest[j] / B[j][j];
    for (int k = j; k < n; ++k) rest[k] -= x[j] * B[j][k];
  }
  for (int k = 0; k < n; ++k)
    if (rest[k] != 0) return std::nullopt;
  return x;
}

struct SmithResult {
  std::vector<BigInt> diag;  // nonnegative, each dividing the next
  Mat U, V, W;               // U * X * V = diag, W = V^{-1}
};

// Smith normal form with full transform tracking.
inline SmithResult smith_normal_form(const Mat& X) {
  int m = static_cast<int>(X.size());
  int n = m ? static_cast<int>(X[0].size()) : 0;
  Mat S = X;
  Mat U = identity_matrix(m), V = identity_matrix(n), W = identity_matrix(n);

  auto row_sub = [&](int dst, int src, const BigInt& q) {
    for (int j = 0; j < n; ++j) S[dst][j] -= q * S[src][j];
    for (int j = 0; j < m; ++j) U[dst][j] -= q * U[src][j];
  };
  auto col_sub = [&](int dst, int src, const BigInt& q) {
    for (int i = 0; i < m; ++i) S[i][dst] -= q * S[i][src];
    for (int i = 0; i < n; ++i) V[i][dst] -= q * V[i][src];
    // W = V^{-1}: the inverse op adds on the other side.
    for (int j = 0; j < n; ++j) W[src][j] += q * W[dst][j];
  };
  auto row_swap = [&](int a, int b) {
    if (a == b) return;
    std::swap(S[a], S[b]);
    std::swap(U[a], U[b]);
  };
  auto col_swap = [&](int a, int b) {
    if (a == b) return;
    for (int i = 0; i < m; ++i) std::swap(S[i][a], S[i][b]);
    for (int i = 0; i < n; ++i) std::swap(V[i][a], V[i][b]);
    std::swap(W[a], W[b]);
  };
  auto row_neg = [&](int a) {
    for (int j = 0; j < n; ++j) S[a][j] = -S[a][j];
    for (int j = 0; j < m; ++j) U[a][j] = -U[a][j];
  };

  int r = std::min(m, n);
  for (int t = 0; t < r; ++t) {
    for (;;) {
      // Smallest nonzero entry in the remaining block.
      int pi = -1, pj = -1;
      for (int i = t; i < m; ++i)
        for (int j = t; j < n; ++j) {
          if (S[i][j] == 0) continue;
          if (pi < 0 || boost::multiprecision::abs(S[i][j]) <
                            boost::multiprecision::abs(S[pi][pj])) {
            pi = i;
            pj = j;
          }
        }
      if (pi < 0) { pi = pj = -1; break; }
      row_swap(t, pi);
      col_swap(t, pj);
      if (S[t][t] < 0) row_neg(t);
      bool clean = true;
      for (int i = t + 1; i < m; ++i) {
        if (S[i][t] == 0) continue;
        BigInt q = S[i][t] / S[t][t];
        row_sub(i, t, q);
        if (S[i][t] != 0) clean = false;
      }
      for (int j = t + 1; j < n; ++j) {
        if (S[t][j] == 0) continue;
        BigInt q = S[t][j] / S[t][t];
        col_sub(j, t, q);
        if (S[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // Enforce divisibility: pull a bad later diagonal into this column.
      bool redo = false;
      for (int i = t + 1; i < m && !redo; ++i)
        for (int j = t + 1; j < n; ++j)
          if (S[i][j] % S[t][t] != 0) {
            col_sub(t, j, BigInt(-1));  // col_t += col_j
            redo = true;
            break;
          }
      if (!redo) break;
    }
    if (S[t][t] == 0) break;
  }

  SmithResult out;
  out.diag.resize(r);
  for (int t = 0; t < r; ++t) out.diag[t] = S[t][t];
  out.U = std::move(U);
  out.V = std::move(V);
  out.W = std::move(W);
  return out;
}

}  // namespace multinorm
