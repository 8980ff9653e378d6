#pragma once

// Truncated tensor Fock space K (x) F^2_L and the operators living on it.
// Truncated operators follow the compression convention P_L T P_L: a creation
// that would leave the truncation maps to zero.

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "polytoep/freemonoid.hpp"
#include "polytoep/linalg.hpp"
#include "polytoep/weights.hpp"

namespace polytoep {

class FockSpace {
 public:
  FockSpace(PolydomainSpec spec, std::vector<int> trunc, int coeff_dim = 1);

  const PolydomainSpec& spec() const { return spec_; }
  const std::vector<int>& trunc() const { return trunc_; }
  int factors() const { return spec_.k; }
  const TruncatedBasis& basis() const { return basis_; }
  const WeightTable& weights() const { return weights_; }
  Index dim() const { return basis_.size(); }
  int coeff_dim() const { return coeff_dim_; }
  Index total_dim() const { return dim() * coeff_dim_; }

  // prod_i b_{i, alpha_i} for basis vector idx
  double weight_product(Index idx) const { return weight_product_[static_cast<std::size_t>(idx)]; }
  // sqrt(b_min / b_max) in factor i between two word indices, assuming comparable
  double tau_factor(int i, Index u, Index v) const;

 private:
  PolydomainSpec spec_;
  std::vector<int> trunc_;
  int coeff_dim_;
  TruncatedBasis basis_;
  WeightTable weights_;
  std::vector<double> weight_product_;
};

using SpacePtr = std::shared_ptr<const FockSpace>;
SpacePtr make_space(const PolydomainSpec& spec, const std::vector<int>& trunc, int coeff_dim = 1);
// same spec and truncation, different coefficient space
SpacePtr with_coeff_dim(const SpacePtr& space, int coeff_dim);

// Matrix on K (x) F^2_L; the coefficient index is the most significant one.
class FockOperator {
 public:
  FockOperator(SpacePtr space, SparseMatrix matrix, std::string label = "");

  const FockSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const SparseMatrix& matrix() const { return matrix_; }
  const std::string& label() const { return label_; }
  DenseMatrix dense() const { return DenseMatrix(matrix_); }

  FockOperator adjoint() const;
  FockOperator operator+(const FockOperator& o) const;
  FockOperator operator-(const FockOperator& o) const;
  FockOperator operator*(const FockOperator& o) const;
  FockOperator scaled(cplx c) const;

 private:
  SpacePtr space_;
  SparseMatrix matrix_;
  std::string label_;
};

// W_{i,j} and Lambda_{i,j}; i and j are 0- and 1-based respectively, matching
// the letter convention of Word.
FockOperator weighted_left_creation(const SpacePtr& space, int i, int j);
FockOperator weighted_right_creation(const SpacePtr& space, int i, int j);
// Products W_{i,alpha} = W_{i,a_1}...W_{i,a_p} and Lambda_{i,alpha} built from single creations.
FockOperator left_word(const SpacePtr& space, int i, const Word& alpha);
FockOperator right_word(const SpacePtr& space, int i, const Word& alpha);
// A (x) W_alpha W_beta^* with W_alpha = W_{1,alpha_1}...W_{k,alpha_k}
FockOperator monomial(const SpacePtr& space, const IndexPair& pair, const DenseMatrix& coefficient);

FockOperator identity(const SpacePtr& space);
// I_K (x) projection onto span{e_alpha : |alpha_i| = p_i}
FockOperator graded_projection(const SpacePtr& space, const std::vector<int>& p);

enum class Direction { Forward, Inverse };
// diagonal sqrt(prod_i b_{i,alpha_i}) or its inverse
FockOperator weighted_fock_unitary(const SpacePtr& space, Direction direction);
// unweighted left creation e_alpha -> e_{g_j alpha}
FockOperator unweighted_left_creation(const SpacePtr& space, int i, int j);

// prod_i (1 - sum_p a_{i,p} conj(z_i)^p w_i^p)^{-m_i}; needs every n_i = 1.
cplx scalar_kernel(const PolydomainSpec& spec, const std::vector<cplx>& z, const std::vector<cplx>& w);

struct GramSum {
  cplx value;
  double tail_bound;  // rigorous bound on |kernel - value|; infinity when the series may diverge
};
// sum over |alpha_i| <= L of prod_i b_{i,alpha_i} (conj(z_i) w_i)^{alpha_i}
GramSum truncated_gram_sum(const PolydomainSpec& spec, const std::vector<cplx>& z, const std::vector<cplx>& w, int L);

}  // namespace polytoep
