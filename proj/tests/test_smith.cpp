#include <catch2/catch_amalgamated.hpp>

#include "multinorm/smith.hpp"
#include "support.hpp"

using namespace multinorm;

namespace {

BigInt det_laplace(const Mat& M) {
  int n = static_cast<int>(M.size());
  if (n == 0) return 1;
  if (n == 1) return M[0][0];
  BigInt d = 0;
  for (int j = 0; j < n; ++j) {
    if (M[0][j] == 0) continue;
    Mat sub;
    for (int i = 1; i < n; ++i) {
      std::vector<BigInt> row;
      for (int k = 0; k < n; ++k)
        if (k != j) row.push_back(M[i][k]);
      sub.push_back(row);
    }
    BigInt term = M[0][j] * det_laplace(sub);
    d += (j % 2 == 0) ? term : -term;
  }
  return d;
}

Mat random_matrix(std::mt19937_64& rng, int m, int n, int64_t lo, int64_t hi) {
  Mat M(m, std::vector<BigInt>(n));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      M[i][j] = testsupport::rand_range(rng, lo, hi);
  return M;
}

}  // namespace

TEST_CASE("smith normal form: shape, transforms, divisibility, determinant") {
  auto rng = testsupport::make_rng(301);
  for (int trial = 0; trial < 250; ++trial) {
    int m = static_cast<int>(testsupport::rand_range(rng, 1, 5));
    int n = static_cast<int>(testsupport::rand_range(rng, 1, 5));
    Mat X = random_matrix(rng, m, n, -15, 15);
    auto r = smith_normal_form(X);

    // U X V is the diagonal matrix of r.diag.
    Mat D = mat_mul(mat_mul(r.U, X), r.V);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        BigInt want = (i == j && i < static_cast<int>(r.diag.size()))
                          ? r.diag[i]
                          : BigInt(0);
        REQUIRE(D[i][j] == want);
      }

    // Divisibility chain, nonnegative.
    for (size_t i = 0; i < r.diag.size(); ++i) {
      REQUIRE(r.diag[i] >= 0);
      if (i + 1 < r.diag.size() && r.diag[i] != 0)
        REQUIRE(r.diag[i + 1] % r.diag[i] == 0);
      if (r.diag[i] == 0 && i + 1 < r.diag.size()) REQUIRE(r.diag[i + 1] == 0);
    }

    // W really is V^{-1}.
    Mat WV = mat_mul(r.W, r.V);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        REQUIRE(WV[i][j] == (i == j ? 1 : 0));

    // Transforms are unimodular; for square X the invariant product matches.
    if (m == n) {
      BigInt dU = det_laplace(r.U), dV = det_laplace(r.V);
      REQUIRE((dU == 1 || dU == -1));
      REQUIRE((dV == 1 || dV == -1));
      BigInt dX = det_laplace(X);
      BigInt prod = 1;
      for (const auto& d : r.diag) prod *= d;
      REQUIRE(boost::multiprecision::abs(dX) == prod);
    }
  }
}

TEST_CASE("hermite basis of a full-rank lattice") {
  auto rng = testsupport::make_rng(302);
  for (int trial = 0; trial < 200; ++trial) {
    int dim = static_cast<int>(testsupport::rand_range(rng, 1, 4));
    Mat M;
    BigInt d = 0;
    while (d == 0) {
      M = random_matrix(rng, dim, dim, -8, 8);
      d = det_laplace(M);
    }
    // Add redundant integer combinations of the rows.
    std::vector<std::vector<BigInt>> rows = M;
    for (int extra = 0; extra < 2; ++extra) {
      std::vector<BigInt> comb(dim, 0);
      for (int i = 0; i < dim; ++i) {
        int64_t k = testsupport::rand_range(rng, -3, 3);
        for (int j = 0; j < dim; ++j) comb[j] += k * M[i][j];
      }
      rows.push_back(comb);
    }
    Mat B = hnf_row_basis(rows, dim);

    // Upper triangular with positive pivots, same covolume.
    for (int i = 0; i < dim; ++i) {
      REQUIRE(B[i][i] > 0);
      for (int j = 0; j < i; ++j) REQUIRE(B[i][j] == 0);
    }
    REQUIRE(hnf_det(B) == boost::multiprecision::abs(d));

    // Every original row lies in the lattice spanned by B.
    for (const auto& row : rows) {
      auto x = solve_in_lattice(B, row);
      REQUIRE(x.has_value());
      std::vector<BigInt> back(dim, 0);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) back[j] += (*x)[i] * B[i][j];
      REQUIRE(back == row);
    }

    // A point outside the lattice is rejected (when index > 1).
    if (hnf_det(B) > 1) {
      // Some unit vector must fall outside a proper sublattice.
      bool outside_found = false;
      for (int i = 0; i < dim && !outside_found; ++i) {
        std::vector<BigInt> e(dim, 0);
        e[i] = 1;
        if (!solve_in_lattice(B, e).has_value()) outside_found = true;
      }
      REQUIRE(outside_found);
    }
  }
}

TEST_CASE("lattice index counts cosets") {
  // For the lattice spanned by B in Z^m with index D = det(B), the box
  // [0, D)^m contains exactly D^{m-1} lattice points.
  auto rng = testsupport::make_rng(303);
  for (int trial = 0; trial < 30; ++trial) {
    int dim = 2;
    Mat M;
    BigInt d = 0;
    while (d == 0 || boost::multiprecision::abs(d) > 12) {
      M = random_matrix(rng, dim, dim, -4, 4);
      d = det_laplace(M);
    }
    Mat B = hnf_row_basis(M, dim);
    int64_t D = static_cast<int64_t>(hnf_det(B));
    int64_t count = 0;
    for (int64_t x = 0; x < D; ++x)
      for (int64_t y = 0; y < D; ++y)
        if (solve_in_lattice(B, {BigInt(x), BigInt(y)}).has_value()) ++count;
    REQUIRE(count == D);  // D^{m-1} with m = 2
  }
}
