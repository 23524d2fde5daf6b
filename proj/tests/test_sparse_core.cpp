#include <catch_amalgamated.hpp>

#include <sstream>

#include "blocksolve/factorization.hpp"
#include "blocksolve/matrix_market.hpp"
#include "blocksolve/sparse.hpp"
#include "oracle.hpp"

using namespace blocksolve;

namespace {

SparseMatrix sym2x2(double a11, double a21, double a22) {
  SparseMatrix m(2, 2, true);
  m.add(0, 0, a11);
  m.add(1, 0, a21);
  m.add(1, 1, a22);
  m.finalize();
  return m;
}

}  // namespace

TEST_CASE("symmetric indefinite factorization on small fixtures", "[sparse]") {
  SECTION("saddle block [[2,1],[1,0]] has inertia (1,1,0)") {
    SymIndefFactor f(sym2x2(2.0, 1.0, 0.0));
    CHECK(f.inertia().positive == 1);
    CHECK(f.inertia().negative == 1);
    CHECK(f.inertia().zero == 0);

    const Vector x = f.solve(Vector{2.0, 0.0});
    CHECK_THAT(x[0], Catch::Matchers::WithinAbs(0.0, 1e-14));
    CHECK_THAT(x[1], Catch::Matchers::WithinAbs(2.0, 1e-14));

    const Vector x2 = f.solve(Vector{0.0, -1.0});
    CHECK_THAT(x2[0], Catch::Matchers::WithinAbs(-1.0, 1e-14));
    CHECK_THAT(x2[1], Catch::Matchers::WithinAbs(2.0, 1e-14));
  }
  SECTION("identity has inertia (3,0,0) and solves trivially") {
    SymIndefFactor f(SparseMatrix::identity(3));
    CHECK(f.inertia().positive == 3);
    CHECK(f.inertia().negative == 0);
    const Vector x = f.solve(Vector{1.0, 2.0, 3.0});
    CHECK(x == Vector{1.0, 2.0, 3.0});
  }
  SECTION("rank-1 matrix is rejected") {
    CHECK_THROWS_AS(SymIndefFactor(sym2x2(1.0, 1.0, 1.0)), SingularMatrixError);
  }
}

TEST_CASE("symmetric indefinite solve matches the dense inverse oracle", "[sparse]") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 3 + static_cast<int>(seed * 7 % 48);
    DenseMatrix a = oracle::random_symmetric(n, seed);
    SymIndefFactor f{DenseMatrix(a)};
    const Vector b = oracle::random_vector(n, seed, "rhs");
    const Vector x = f.solve(b);
    const Vector expected = oracle::dense_solve(oracle::to_eigen(a), b);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += (x[i] - expected[i]) * (x[i] - expected[i]);
      den += expected[i] * expected[i];
    }
    INFO("seed " << seed << " dim " << n);
    CHECK(std::sqrt(num) <= 1e-10 * (1.0 + std::sqrt(den)));
  }
}

TEST_CASE("inertia matches eigenvalue signs on random symmetric matrices", "[sparse]") {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const int n = 4 + static_cast<int>(seed % 9);
    DenseMatrix a = oracle::random_symmetric(n, seed);
    SymIndefFactor f{DenseMatrix(a)};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::to_eigen(a));
    int pos = 0, neg = 0;
    for (int i = 0; i < n; ++i) (es.eigenvalues()[i] > 0 ? pos : neg) += 1;
    CHECK(f.inertia().positive == pos);
    CHECK(f.inertia().negative == neg);
  }
}

TEST_CASE("multi right-hand-side solve matches column-wise solves", "[sparse]") {
  DenseMatrix a = oracle::random_symmetric(12, 99);
  SymIndefFactor f{DenseMatrix(a)};
  DenseMatrix rhs(12, 3);
  for (int j = 0; j < 3; ++j) {
    const Vector col = oracle::random_vector(12, 99, "rhs." + std::to_string(j));
    std::copy(col.begin(), col.end(), rhs.col(j).begin());
  }
  const DenseMatrix solved = f.solve(rhs);
  for (int j = 0; j < 3; ++j) {
    const Vector single = f.solve(rhs.col(j));
    for (int i = 0; i < 12; ++i) CHECK(solved(i, j) == single[i]);
  }
}

TEST_CASE("cholesky factorization contract", "[sparse]") {
  SECTION("scalar one") {
    SparseMatrix m(1, 1, true);
    m.add(0, 0, 1.0);
    m.finalize();
    SpdFactor f(m);
    CHECK(f.solve(Vector{3.0}) == Vector{3.0});
  }
  SECTION("[[4,2],[2,2]] factors and solves") {
    SpdFactor f(sym2x2(4.0, 2.0, 2.0));
    const Vector x = f.solve(Vector{6.0, 4.0});
    // dense check: [[4,2],[2,2]] x = (6,4) => x = (1,1)
    CHECK_THAT(x[0], Catch::Matchers::WithinAbs(1.0, 1e-14));
    CHECK_THAT(x[1], Catch::Matchers::WithinAbs(1.0, 1e-14));
  }
  SECTION("zero matrix is rejected") {
    SparseMatrix m(1, 1, true);
    m.add(0, 0, 0.0);
    m.finalize();
    CHECK_THROWS_AS(SpdFactor(m), NotPositiveDefiniteError);
  }
  SECTION("indefinite input is rejected") {
    CHECK_THROWS_AS(SpdFactor(sym2x2(1.0, 2.0, 1.0)), NotPositiveDefiniteError);
  }
}

TEST_CASE("cholesky succeeds exactly when eigenvalues clear the threshold", "[sparse]") {
  for (std::uint64_t seed = 50; seed < 56; ++seed) {
    const int n = 6;
    PhiloxStream rng(seed, "gram");
    Eigen::MatrixXd x(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) x(i, j) = rng.next_normal();
    Eigen::MatrixXd gram = x.transpose() * x + 1e-10 * Eigen::MatrixXd::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    REQUIRE(es.eigenvalues().minCoeff() > 1e-12);
    DenseMatrix a(n, n);
    Eigen::Map<Eigen::MatrixXd>(a.data(), n, n) = gram;
    CHECK_NOTHROW(SpdFactor(a));

    // rank-deficient Gram from a wide factor must be rejected
    Eigen::MatrixXd wide = x.topRows(n - 2);
    Eigen::MatrixXd singular_gram = wide.transpose() * wide;
    DenseMatrix b(n, n);
    Eigen::Map<Eigen::MatrixXd>(b.data(), n, n) = singular_gram;
    CHECK_THROWS_AS(SpdFactor(b), NotPositiveDefiniteError);
  }
}

TEST_CASE("sparse matrix vector products", "[sparse]") {
  SECTION("diagonal") {
    SparseMatrix m(2, 2);
    m.add(0, 0, 2.0);
    m.add(1, 1, 3.0);
    m.finalize();
    CHECK(spmv(m, Vector{1.0, 1.0}) == Vector{2.0, 3.0});
  }
  SECTION("transpose of a wide row") {
    SparseMatrix m(1, 2);
    m.add(0, 0, 1.0);
    m.add(0, 1, 2.0);
    m.finalize();
    CHECK(spmv(m, Vector{5.0}, /*transpose=*/true) == Vector{5.0, 10.0});
  }
  SECTION("empty 0 x n matrix yields an empty vector") {
    SparseMatrix m(0, 4);
    m.finalize();
    CHECK(spmv(m, Vector{1.0, 2.0, 3.0, 4.0}).empty());
  }
  SECTION("dimension mismatch is rejected") {
    SparseMatrix m(2, 3);
    m.finalize();
    CHECK_THROWS_AS(spmv(m, Vector{1.0, 2.0}), DimensionMismatchError);
  }
}

TEST_CASE("transpose-mode spmv equals spmv of the explicit transpose", "[sparse]") {
  for (std::uint64_t seed = 70; seed < 75; ++seed) {
    PhiloxStream rng(seed, "spmv");
    const int rows = 3 + static_cast<int>(rng.next_u64() % 6);
    const int cols = 2 + static_cast<int>(rng.next_u64() % 7);
    SparseMatrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i)
        if (rng.next_uniform() < 0.4) m.add(i, j, rng.next_normal());
    m.finalize();
    Vector x(rows);
    for (double& v : x) v = rng.next_normal();
    const Vector via_flag = m.multiply(x, /*transpose=*/true);
    const Vector via_explicit = m.transposed().multiply(x);
    REQUIRE(via_flag.size() == via_explicit.size());
    for (std::size_t i = 0; i < via_flag.size(); ++i)
      CHECK_THAT(via_flag[i], Catch::Matchers::WithinAbs(via_explicit[i], 1e-14));
  }
}

TEST_CASE("block diagonal concatenation", "[sparse]") {
  SparseMatrix a(1, 1, true);
  a.add(0, 0, 1.0);
  a.finalize();
  SparseMatrix b(1, 1, true);
  b.add(0, 0, 2.0);
  b.finalize();

  SECTION("two scalars give diag(1,2)") {
    const SparseMatrix d = block_diag({a, b});
    CHECK(d.rows() == 2);
    CHECK(d.symmetric());
    const DenseMatrix full = d.to_dense();
    CHECK(full(0, 0) == 1.0);
    CHECK(full(1, 1) == 2.0);
    CHECK(full(0, 1) == 0.0);
  }
  SECTION("single block is the identity of the operation") {
    const SparseMatrix d = block_diag({a});
    CHECK(d.rows() == 1);
    CHECK(d.to_dense()(0, 0) == 1.0);
  }
  SECTION("sizes and nnz accumulate") {
    SparseMatrix two(2, 2);
    two.add(0, 1, 5.0);
    two.add(1, 0, 6.0);
    two.finalize();
    SparseMatrix three(3, 3);
    three.add(0, 0, 1.0);
    three.add(2, 1, 2.0);
    three.add(1, 2, 3.0);
    three.finalize();
    const SparseMatrix d = block_diag({two, three});
    CHECK(d.rows() == 5);
    CHECK(d.cols() == 5);
    CHECK(d.nnz() == two.nnz() + three.nnz());
    CHECK_FALSE(d.symmetric());
    CHECK(d.to_dense()(3, 1) == 0.0);
    CHECK(d.to_dense()(4, 3) == 2.0);
  }
  SECTION("rectangular blocks offset rows and cols independently") {
    SparseMatrix wide(1, 3);
    wide.add(0, 2, 4.0);
    wide.finalize();
    const SparseMatrix d = block_diag({wide, wide});
    CHECK(d.rows() == 2);
    CHECK(d.cols() == 6);
    CHECK(d.to_dense()(1, 5) == 4.0);
  }
}

TEST_CASE("duplicate triplets are combined at finalize", "[sparse]") {
  SparseMatrix m(2, 2);
  m.add(0, 0, 1.5);
  m.add(0, 0, 2.5);
  m.add(1, 1, 1.0);
  m.finalize();
  CHECK(m.nnz() == 2);
  CHECK(m.to_dense()(0, 0) == 4.0);
}

TEST_CASE("matrix market round trip is exact", "[sparse]") {
  PhiloxStream rng(123, "mm");
  SparseMatrix m(5, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 5; ++i)
      if (rng.next_uniform() < 0.5) m.add(i, j, rng.next_normal());
  m.finalize();
  std::stringstream buffer;
  write_matrix_market(m, buffer);
  const SparseMatrix back = read_matrix_market(buffer);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  REQUIRE(back.nnz() == m.nnz());
  for (int j = 0; j < 4; ++j)
    for (std::size_t k = 0; k < m.col_rows(j).size(); ++k) {
      CHECK(back.col_rows(j)[k] == m.col_rows(j)[k]);
      CHECK(back.col_values(j)[k] == m.col_values(j)[k]);
    }

  SparseMatrix sym = sym2x2(2.0, -1.0, 3.0);
  std::stringstream sbuf;
  write_matrix_market(sym, sbuf);
  const SparseMatrix sym_back = read_matrix_market(sbuf);
  CHECK(sym_back.symmetric());
  CHECK(sym_back.to_dense()(0, 1) == -1.0);
}

TEST_CASE("symmetric storage keeps the lower triangle only", "[sparse]") {
  SparseMatrix m(3, 3, true);
  CHECK_THROWS_AS(m.add(0, 2, 1.0), Error);
  m.add(2, 0, 1.0);
  m.add(1, 1, 2.0);
  m.finalize();
  const DenseMatrix full = m.to_dense();
  CHECK(full(0, 2) == 1.0);
  CHECK(full(2, 0) == 1.0);
  const Vector y = m.multiply(Vector{1.0, 0.0, 0.0});
  CHECK(y == Vector{0.0, 0.0, 1.0});
}
