#pragma once

// Row operator C = [sqrt(a_{i,reverse(alpha)}) (I (x) Lambda_{i,alpha})]_alpha, its Cauchy dual
// C' = C (C^*C)^+ and the Brown-Halmos residual.
//
// The domain of C is the direct sum over columns alpha of copies of K (x) F^2_L;
// copy alpha keeps only the basis vectors whose factor-i degree is at most
// L_i - |alpha|, i.e. exactly those C sends inside the truncation. On this
// graded domain every identity used below is exact at finite truncation.

#include <string>
#include <vector>

#include <json.hpp>

#include "polytoep/linalg.hpp"
#include "polytoep/model.hpp"

namespace polytoep {

class RowOperator {
 public:
  RowOperator(SpacePtr space, int factor);

  const FockSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  int factor() const { return factor_; }
  // columns alpha with a_{i,reverse(alpha)} > 0, graded-lexicographic
  const std::vector<Word>& columns() const { return columns_; }
  const std::vector<double>& column_weights() const { return weights_; }  // sqrt(a)
  int N() const { return static_cast<int>(columns_.size()); }
  Index domain_dim() const { return offsets_.back(); }

  // sqrt(a_{i,reverse(alpha)}) (I (x) Lambda_{i,alpha}) on the whole truncated space
  FockOperator column_operator(int c) const;
  // the row matrix, total_dim x domain_dim
  const SparseMatrix& matrix() const { return matrix_; }
  // inclusion of copy c into K (x) F^2_L
  SparseMatrix embedding(int c) const;
  // diag_N(Y) compressed to the graded domain
  SparseMatrix diag(const SparseMatrix& Y) const;
  // copy index and Fock index of a domain vector
  std::pair<int, Index> locate(Index domain_index) const;

 private:
  SpacePtr space_;
  int factor_;
  std::vector<Word> columns_;
  std::vector<double> weights_;
  std::vector<std::vector<Index>> kept_;  // Fock indices kept in each copy
  std::vector<Index> offsets_;
  SparseMatrix matrix_;
  std::vector<SparseMatrix> lambda_;
};

RowOperator build_row(const SpacePtr& space, int i);

// ||C C^*||; C C^* equals Phi_{reversed f_i, Lambda_i}(I)
double row_contraction_norm(const RowOperator& C);

struct CauchyDual {
  SparseMatrix dual;         // C' = C (C^*C)^+
  SparseMatrix gram_pinv;    // (C^*C)^+
  SparseMatrix range_basis;  // orthonormal basis of range C^* (domain x rank)
  double rank_tol = 0.0;
  double lambda_max = 0.0;
  Index rank = 0;
};

// rank_tol < 0 selects 1e-10 lambda_max(C^*C); an eigenvalue within a factor
// 10 of rank_tol throws NumericalRankError.
CauchyDual cauchy_dual(const RowOperator& C, double rank_tol = -1.0);

// Phi(T) = sum_alpha a_{reverse(alpha)} (I (x) Lambda_alpha) T (I (x) Lambda_alpha)^*
SparseMatrix phi_right(const RowOperator& C, const SparseMatrix& T);
// sum_{j<m_i} (-1)^j binom(m_i, j+1) Phi^j(T)
SparseMatrix psi_map(const RowOperator& C, const SparseMatrix& T);

struct DualIdentities {
  double projection_residual = 0.0;  // ||C (C^*C)^+ C^* - P_{range C}||, P from the basis description
  double idempotency = 0.0;          // ||P^2 - P||
  double hermiticity = 0.0;          // ||P - P^*||
  double psi_identity = 0.0;         // ||(C' - C diag(Psi(I))) V|| on range C^*
};
DualIdentities dual_identities(const RowOperator& C, const CauchyDual& dual);

struct BHResidual {
  int factor = 0;
  double residual = 0.0;
  bool exact_norm = true;  // false: residual is the Schur upper bound
  Index range_dim = 0;
  int headroom = 0;
};

// ||V^*(C'^* T C' - diag(Psi(T)))V|| with V an orthonormal basis of
// range C^* restricted to output degree <= L_i - headroom in factor i.
BHResidual bh_residual(const FockOperator& T, int i, double rank_tol = -1.0, int headroom = 0);

struct BHScan {
  std::vector<BHResidual> factors;
  bool satisfied = true;
  std::string classification;  // "multi-Toeplitz", "BH-consistent" or "BH-violated"
  nlohmann::json to_json() const;
};
BHScan bh_scan(const FockOperator& T, double tol);

// q C - C diag(q) for s_i >= 0, or C^* q - diag(q) C^* for s_i < 0, where q is
// s-homogeneous. Checked on the domain vectors (resp. all vectors) on which
// both sides stay inside the truncation; safe_count receives their number.
double homogeneous_commutation_residual(const RowOperator& C, const FockOperator& q, const std::vector<int>& s,
                                        Index* safe_count = nullptr);

}  // namespace polytoep
