#include <doctest.h>

#include <sstream>

#include "polytoep/errors.hpp"
#include "polytoep/linalg.hpp"
#include "polytoep/sampling.hpp"

using namespace polytoep;

TEST_CASE("psd_check") {
  auto r = psd_check(DenseMatrix(DenseMatrix::Identity(3, 3)), 1e-9);
  CHECK(r.psd);
  CHECK(r.min_eigenvalue == doctest::Approx(1.0));

  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  r = psd_check(d, 1e-9);
  CHECK_FALSE(r.psd);
  CHECK(r.min_eigenvalue == doctest::Approx(-1.0));

  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    DenseMatrix b = random_matrix(rng, 5, 4);
    CHECK(psd_check(DenseMatrix(b.adjoint() * b), 1e-9).psd);
    CHECK(psd_check(to_sparse(b.adjoint() * b), 1e-9).psd);
  }
}

TEST_CASE("operator norm") {
  CHECK(op_norm(DenseMatrix(DenseMatrix::Zero(3, 3))) == 0.0);
  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  CHECK(op_norm(d) == doctest::Approx(3.0));
  CHECK(op_norm(to_sparse(d)) == doctest::Approx(3.0));

  Rng rng(5);
  DenseMatrix q = random_matrix(rng, 4, 4).householderQr().householderQ();
  CHECK(op_norm(q) == doctest::Approx(1.0).epsilon(1e-12));
  for (int t = 0; t < 10; ++t) {
    DenseMatrix a = random_matrix(rng, 4, 6), b = random_matrix(rng, 6, 3);
    CHECK(op_norm(DenseMatrix(a * b)) <= op_norm(a) * op_norm(b) * (1 + 1e-12));
    CHECK(op_norm(to_sparse(a)) == doctest::Approx(op_norm(a)).epsilon(1e-12));
    CHECK(op_norm_bound(to_sparse(a)) >= op_norm(a) * (1 - 1e-12));
    CHECK(max_abs(DenseMatrix((a * b).adjoint() - b.adjoint() * a.adjoint())) < 1e-12);
    CHECK(max_abs(DenseMatrix(a.adjoint().adjoint() - a)) == 0.0);
  }
}

TEST_CASE("hermitian square root") {
  DenseMatrix id = DenseMatrix::Identity(3, 3);
  CHECK(max_abs(DenseMatrix(herm_sqrt(id, 1e-12) - id)) < 1e-14);
  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  DenseMatrix s = herm_sqrt(d, 1e-12);
  CHECK(s(0, 0).real() == doctest::Approx(2.0));
  CHECK(s(1, 1).real() == doctest::Approx(3.0));

  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    DenseMatrix b = random_matrix(rng, 5, 5);
    DenseMatrix p = b.adjoint() * b;
    DenseMatrix r = herm_sqrt(p, 1e-12);
    CHECK(max_abs(DenseMatrix(r * r - p)) < 1e-10 * std::max(1.0, max_abs(p)));
  }
  d(1, 1) = -1e-14;
  CHECK_NOTHROW(herm_sqrt(d, 1e-12));
  d(1, 1) = -1.0;
  CHECK_THROWS_AS(herm_sqrt(d, 1e-12), NotPositiveError);
}

TEST_CASE("pseudo-inverse on the range") {
  Rng rng(13);
  DenseMatrix b = random_matrix(rng, 4, 4);
  DenseMatrix m = b.adjoint() * b;
  CHECK(max_abs(DenseMatrix(pinv_on_range(m).pinv - m.inverse())) < 1e-8 * max_abs(DenseMatrix(m.inverse())));

  DenseMatrix v = random_matrix(rng, 5, 2).householderQr().householderQ() * DenseMatrix::Identity(5, 2);
  DenseMatrix proj = v * v.adjoint();
  auto r = pinv_on_range(proj);
  CHECK(max_abs(DenseMatrix(r.pinv - proj)) < 1e-12);
  CHECK(r.range_basis.cols() == 2);

  for (int t = 0; t < 10; ++t) {
    DenseMatrix c = random_matrix(rng, 6, 3);
    DenseMatrix g = c * c.adjoint();  // rank 3
    auto ri = pinv_on_range(g);
    CHECK(ri.range_basis.cols() == 3);
    CHECK(max_abs(DenseMatrix(g * ri.pinv * g - g)) < 1e-10 * max_abs(g));
  }

  DenseMatrix amb = DenseMatrix::Zero(2, 2);
  amb(0, 0) = 1.0;
  amb(1, 1) = 2e-10;
  CHECK_THROWS_AS(pinv_on_range(amb, -1.0, true), NumericalRankError);
  CHECK_NOTHROW(pinv_on_range(amb, -1.0, false));
}

TEST_CASE("block eigendecomposition of sparse hermitian matrices") {
  std::vector<Triplet> t = {{0, 0, 2.0}, {3, 3, 5.0}, {1, 2, cplx(0, 1)}, {2, 1, cplx(0, -1)}, {1, 1, 1.0}};
  SparseMatrix m(5, 5);
  m.setFromTriplets(t.begin(), t.end());
  auto hb = hermitian_blocks(m);
  CHECK(hb.blocks.size() == 3);
  CHECK(hb.largest_block() == 2);
  CHECK(hb.lambda_max() == doctest::Approx(5.0));
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es{DenseMatrix(m)};
  CHECK(hb.lambda_min() == doctest::Approx(es.eigenvalues().minCoeff()));
}

TEST_CASE("coordinate file round trip is lossless") {
  Rng rng(17);
  DenseMatrix a = random_matrix(rng, 4, 3) / 3.0;
  a(1, 1) = 0.0;
  SparseMatrix s = to_sparse(a);
  std::stringstream ss;
  write_coo(ss, s);
  SparseMatrix back = read_coo(ss);
  CHECK(back.nonZeros() == s.nonZeros());
  CHECK(max_abs(SparseMatrix(back - s)) == 0.0);

  std::stringstream bad("2 2 1\n5 0 1 0\n");
  CHECK_THROWS_AS(read_coo(bad), FormatError);
  std::stringstream trunc("2 2 2\n0 0 1 0\n");
  CHECK_THROWS_AS(read_coo(trunc), FormatError);
}

TEST_CASE("kronecker product ordering") {
  DenseMatrix a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  SparseMatrix b = sparse_identity(2);
  DenseMatrix k = DenseMatrix(kron(a, b));
  CHECK(k(0, 2) == cplx(2.0));
  CHECK(k(1, 3) == cplx(2.0));
  CHECK(k(2, 0) == cplx(3.0));
}

TEST_CASE("explicit zeros do not join blocks") {
  std::vector<Triplet> t = {{0, 0, 1.0}, {1, 1, 2.0}, {2, 0, 0.0}, {0, 2, 0.0}, {2, 2, 3.0}};
  SparseMatrix m(3, 3);
  m.setFromTriplets(t.begin(), t.end());
  const auto hb = hermitian_blocks(m);
  CHECK(hb.blocks.size() == 3);
  CHECK(hb.lambda_max() == doctest::Approx(3.0));
  CHECK(op_norm(m) == doctest::Approx(3.0));
}
