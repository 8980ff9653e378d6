#pragma once

// Weighted multi-Toeplitz operators: classification, multi-homogeneous parts,
// Fourier symbols and their evaluation, Fejer means, and the kernel Gamma_{rG}.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polytoep/cpmaps.hpp"
#include "polytoep/model.hpp"

namespace polytoep {

// Coefficients A_{(alpha,beta)} on K, keyed by pairs in J.
class FourierSymbol {
 public:
  explicit FourierSymbol(SpacePtr space) : space_(std::move(space)) {}

  const FockSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const std::map<IndexPair, DenseMatrix>& coefficients() const { return coeffs_; }
  // adds to an existing coefficient; throws for pairs outside J or the truncation
  void add(const IndexPair& pair, const DenseMatrix& a);
  const DenseMatrix* find(const IndexPair& pair) const;
  std::size_t size() const { return coeffs_.size(); }

  nlohmann::json to_json() const;
  static FourierSymbol from_json(SpacePtr space, const nlohmann::json& j);

 private:
  SpacePtr space_;
  std::map<IndexPair, DenseMatrix> coeffs_;
};

struct ToeplitzReport {
  bool verdict = true;
  double tolerance = 0.0;
  double max_violation = 0.0;
  double structural_violation = 0.0;  // largest |entry| at a non-comparable pair
  double scaling_violation = 0.0;     // largest relative mismatch along comparable pairs
  std::optional<std::pair<MultiWord, MultiWord>> worst_pair;  // (omega, gamma)
  std::optional<std::pair<int, int>> worst_coefficients;     // (y, x) in K
  Index checked_pairs = 0;
  Index skipped_pairs = 0;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

// Entries at non-comparable pairs must vanish (absolute test) and entries at
// comparable pairs must equal tau(omega,gamma)/tau(s(omega,gamma)) times the
// entry at the simplified pair (relative to max(1, ||T||)).
ToeplitzReport is_multi_toeplitz(const FockOperator& T, double tol = 1e-10);

struct NotToeplitzError : std::runtime_error {
  explicit NotToeplitzError(ToeplitzReport r);
  ToeplitzReport report;
};

// sum_p (I (x) P_{s+p}) T (I (x) P_p), by direct degree bookkeeping
FockOperator homogeneous_part(const FockOperator& T, const std::vector<int>& s);
// all nonzero parts, keyed by s
std::map<std::vector<int>, FockOperator> homogeneous_decomposition(const FockOperator& T);

// Throws NotToeplitzError when the classification fails. Coefficients whose
// entries are all within drop_tol of zero are omitted.
FourierSymbol extract_fourier(const FockOperator& T, double tol = 1e-10, double drop_tol = 0.0);

// sum r^{|alpha|+|beta|} A (x) W_alpha W_beta^* on the truncation
FockOperator evaluate_symbol(const FourierSymbol& sym, double r = 1.0);
// sum A (x) X_alpha X_beta^*, coefficient index most significant
DenseMatrix evaluate_symbol(const FourierSymbol& sym, const DenseTuple& X);

// sum over |s_i| <= N_i of prod_i (1 - |s_i|/(N_i+1)) T_s
FockOperator cesaro_reconstruct(const FockOperator& T, const std::vector<int>& N);
// unweighted sum over |s_i| <= N_i of T_s
FockOperator partial_sum_reconstruct(const FockOperator& T, const std::vector<int>& N);

// Block (omega,gamma) = tau(omega,gamma) r^{|s(omega,gamma)|} A_{s(omega,gamma)}, zero when
// the pair is not comparable or the coefficient is absent. Same layout as FockOperator.
FockOperator pluriharmonic_kernel(const FourierSymbol& sym, double r);

// Pairs (u, v) of word indices with u >=_r v or v >=_r u.
std::vector<std::pair<Index, Index>> comparable_word_pairs(const WordIndexer& ix);

}  // namespace polytoep
