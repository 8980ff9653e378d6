#pragma once

// Numerical kernels shared by the operator modules. Dense work goes through
// Eigen's deterministic Hermitian eigensolver; sparse Hermitian matrices are
// split into connected components first so block-diagonal operators stay cheap.

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace polytoep {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

struct PsdResult {
  bool psd = true;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

// Hermitizes, then lambda_min >= -tol * max(1, lambda_max).
PsdResult psd_check(const DenseMatrix& m, double tol);
PsdResult psd_check(const SparseMatrix& m, double tol);

double op_norm(const DenseMatrix& m);
double op_norm(const SparseMatrix& m);
// sqrt(||M||_1 ||M||_inf) >= ||M||; cheap for large sparse matrices.
double op_norm_bound(const SparseMatrix& m);
double max_abs(const SparseMatrix& m);
double max_abs(const DenseMatrix& m);

// Eigenvalues in [-tol, 0) are clamped, anything lower throws NotPositiveError.
DenseMatrix herm_sqrt(const DenseMatrix& m, double tol);

struct RangeInverse {
  DenseMatrix pinv;         // pseudo-inverse, zero on the kernel
  DenseMatrix range_basis;  // orthonormal columns spanning the range
  double lambda_max = 0.0;
  double rank_tol = 0.0;
};

// Hermitian pseudo-inverse restricted to the range. Eigenvalues <= rank_tol
// count as kernel; rank_tol < 0 selects 1e-10 * lambda_max. When
// strict, an eigenvalue within a factor 10 of rank_tol throws NumericalRankError.
RangeInverse pinv_on_range(const DenseMatrix& m, double rank_tol = -1.0, bool strict = false);

// Eigendecomposition of a sparse Hermitian matrix block by block, where the
// blocks are the connected components of its sparsity graph.
struct HermitianBlocks {
  struct Block {
    std::vector<Eigen::Index> support;
    Eigen::VectorXd values;
    DenseMatrix vectors;
  };
  std::vector<Block> blocks;
  Eigen::Index dim = 0;

  double lambda_min() const;
  double lambda_max() const;
  std::size_t largest_block() const;
};
HermitianBlocks hermitian_blocks(const SparseMatrix& m);

SparseMatrix sparse_identity(Eigen::Index n);
SparseMatrix to_sparse(const DenseMatrix& m, double drop = 0.0);
// A (x) B with the first factor most significant.
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix kron(const DenseMatrix& a, const SparseMatrix& b);
SparseMatrix hermitian_part(const SparseMatrix& m);

// Text format: "rows cols nnz" then "row col re im" per entry, 0-based, 17 digits.
void write_coo(std::ostream& os, const SparseMatrix& m);
void write_coo(const std::string& path, const SparseMatrix& m);
SparseMatrix read_coo(std::istream& is);
SparseMatrix read_coo(const std::string& path);

}  // namespace polytoep
