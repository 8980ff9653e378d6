#pragma once

// Polydomain data (k, n, m, coefficients of f_i) and the weights b_{i,alpha},
// i.e. the coefficients of (1 - f_i)^{-m_i}, together with tau and mu.

#include <map>
#include <string>
#include <vector>

#include "polytoep/freemonoid.hpp"

namespace polytoep {

// Factors are 0-based in the C++ API and 1-based in JSON.
struct PolydomainSpec {
  int k = 0;
  std::vector<int> n;
  std::vector<int> m;
  std::vector<std::map<Word, double>> coeffs;

  // throws SpecError
  void validate() const;
  int degree(int i) const;
  double coeff(int i, const Word& w) const;

  static PolydomainSpec from_json_text(const std::string& text);
  static PolydomainSpec load(const std::string& path);
  std::string to_json_text() const;
};

// f_i with every word reversed.
PolydomainSpec reversed_spec(const PolydomainSpec& spec);

class WeightTable {
 public:
  WeightTable() = default;
  WeightTable(std::vector<WordIndexer> indexers, std::vector<std::vector<double>> values);

  int factors() const { return static_cast<int>(values_.size()); }
  int truncation(int i) const { return indexer(i).max_len(); }
  const WordIndexer& indexer(int i) const { return indexers_[static_cast<std::size_t>(i)]; }
  double at(int i, Index word) const { return values_[static_cast<std::size_t>(i)][static_cast<std::size_t>(word)]; }
  double operator()(int i, const Word& w) const { return at(i, indexer(i).index(w)); }
  const std::vector<double>& factor_values(int i) const { return values_[static_cast<std::size_t>(i)]; }

  // rows "factor,word,b" with 1-based factors and 17 significant digits
  std::string to_csv() const;

 private:
  std::vector<WordIndexer> indexers_;
  std::vector<std::vector<double>> values_;
};

WeightTable build_weight_table(const PolydomainSpec& spec, const std::vector<int>& trunc);

// Literal sum over ordered factorizations alpha = gamma_1...gamma_j of
// a_{gamma_1}...a_{gamma_j} * C(j+m-1, m-1). Requires |alpha| <= 20.
double brute_force_weight(const PolydomainSpec& spec, int i, const Word& alpha);

// prod_i sqrt(b_min / b_max) along right divisibility; throws NotComparable.
double tau(const WeightTable& table, const MultiWord& omega, const MultiWord& gamma);
// prod_i 1 / b_max
double mu(const WeightTable& table, const MultiWord& omega, const MultiWord& gamma);

struct CompactnessReport {
  struct Entry {
    int generator;  // 1-based j
    Word alpha;
    double ratio;   // b_{g_j alpha} / b_alpha
  };
  struct DegreeTrend {
    int degree;     // |g_j alpha|
    double min_ratio;
    double max_ratio;
  };
  int factor = 0;
  std::vector<Entry> entries;
  std::vector<DegreeTrend> trend;
  double supremum = 0.0;
};

CompactnessReport compactness_ratios(const WeightTable& table, int i);

double binomial(int n, int r);

}  // namespace polytoep
