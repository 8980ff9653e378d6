#include "polytoep/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "polytoep/errors.hpp"

namespace polytoep {

using nlohmann::json;

double binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  r = std::min(r, n - r);
  double out = 1.0;
  for (int t = 1; t <= r; ++t) out = out * (n - r + t) / t;
  return std::round(out);
}

void PolydomainSpec::validate() const {
  if (k < 1) throw SpecError("k must be positive");
  if (static_cast<int>(n.size()) != k || static_cast<int>(m.size()) != k || static_cast<int>(coeffs.size()) != k)
    throw SpecError("n, m and coeffs must each have k entries");
  for (int i = 0; i < k; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    if (n[iu] < 1) throw SpecError("n_" + std::to_string(i + 1) + " must be positive");
    if (m[iu] < 1) throw SpecError("m_" + std::to_string(i + 1) + " must be positive");
    for (const auto& [w, a] : coeffs[iu]) {
      if (w.alphabet_size() != n[iu]) throw SpecError("coefficient word over the wrong alphabet in factor " + std::to_string(i + 1));
      if (w.empty()) throw SpecError("f_" + std::to_string(i + 1) + " has a constant term");
      if (!std::isfinite(a) || a < 0.0)
        throw SpecError("coefficient of " + w.str() + " in f_" + std::to_string(i + 1) + " is negative or not finite");
    }
    for (int j = 1; j <= n[iu]; ++j)
      if (coeff(i, generator(n[iu], j)) <= 0.0)
        throw SpecError("f_" + std::to_string(i + 1) + " needs a positive coefficient on g" + std::to_string(j));
  }
}

int PolydomainSpec::degree(int i) const {
  int d = 0;
  for (const auto& [w, a] : coeffs[static_cast<std::size_t>(i)])
    if (a > 0.0) d = std::max(d, w.length());
  return d;
}

double PolydomainSpec::coeff(int i, const Word& w) const {
  const auto& c = coeffs[static_cast<std::size_t>(i)];
  auto it = c.find(w);
  return it == c.end() ? 0.0 : it->second;
}

PolydomainSpec PolydomainSpec::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec is not valid JSON: ") + e.what());
  }
  PolydomainSpec s;
  try {
    s.k = j.at("k").get<int>();
    s.n = j.at("n").get<std::vector<int>>();
    s.m = j.at("m").get<std::vector<int>>();
    if (s.k < 1 || static_cast<int>(s.n.size()) != s.k || static_cast<int>(s.m.size()) != s.k)
      throw SpecError("n and m must have k entries");
    for (int ni : s.n)
      if (ni < 1) throw SpecError("alphabet sizes must be positive");
    s.coeffs.resize(static_cast<std::size_t>(s.k));
    for (const auto& c : j.at("coeffs")) {
      const int i = c.at("i").get<int>();
      if (i < 1 || i > s.k) throw SpecError("coefficient factor index " + std::to_string(i) + " out of range");
      const auto iu = static_cast<std::size_t>(i - 1);
      Word w;
      try {
        w = Word(s.n[iu], c.at("word").get<std::vector<int>>());
      } catch (const DimensionMismatch& e) {
        throw SpecError(e.what());
      }
      if (s.coeffs[iu].count(w)) throw SpecError("duplicate coefficient for " + w.str() + " in factor " + std::to_string(i));
      s.coeffs[iu][w] = c.at("a").get<double>();
    }
  } catch (const json::exception& e) {
    throw SpecError(std::string("spec JSON has missing or mistyped fields: ") + e.what());
  }
  s.validate();
  return s;
}

PolydomainSpec PolydomainSpec::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw SpecError("cannot open spec file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json_text(ss.str());
}

std::string PolydomainSpec::to_json_text() const {
  json j;
  j["k"] = k;
  j["n"] = n;
  j["m"] = m;
  j["coeffs"] = json::array();
  for (int i = 0; i < k; ++i)
    for (const auto& [w, a] : coeffs[static_cast<std::size_t>(i)])
      j["coeffs"].push_back({{"i", i + 1}, {"word", w.letters()}, {"a", a}});
  return j.dump(2);
}

PolydomainSpec reversed_spec(const PolydomainSpec& spec) {
  PolydomainSpec out = spec;
  for (int i = 0; i < spec.k; ++i) {
    auto& c = out.coeffs[static_cast<std::size_t>(i)];
    c.clear();
    for (const auto& [w, a] : spec.coeffs[static_cast<std::size_t>(i)]) c[reverse(w)] = a;
  }
  return out;
}

WeightTable::WeightTable(std::vector<WordIndexer> indexers, std::vector<std::vector<double>> values)
    : indexers_(std::move(indexers)), values_(std::move(values)) {
  if (indexers_.size() != values_.size()) throw DimensionMismatch("WeightTable: factor count mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (static_cast<Index>(values_[i].size()) != indexers_[i].count())
      throw DimensionMismatch("WeightTable: value count does not match the word count");
}

std::string WeightTable::to_csv() const {
  std::string out = "factor,word,b\n";
  char buf[64];
  for (int i = 0; i < factors(); ++i)
    for (Index w = 0; w < indexer(i).count(); ++w) {
      std::snprintf(buf, sizeof buf, "%.17g", at(i, w));
      out += std::to_string(i + 1) + "," + indexer(i).word(w).str() + "," + buf + "\n";
    }
  return out;
}

WeightTable build_weight_table(const PolydomainSpec& spec, const std::vector<int>& trunc) {
  spec.validate();
  if (static_cast<int>(trunc.size()) != spec.k) throw DimensionMismatch("truncation must have k entries");
  std::vector<WordIndexer> indexers;
  std::vector<std::vector<double>> values;
  for (int i = 0; i < spec.k; ++i) {
    const int L = trunc[static_cast<std::size_t>(i)];
    if (L < 0) throw TruncationError("negative truncation degree");
    WordIndexer ix(spec.n[static_cast<std::size_t>(i)], L);
    const auto cnt = static_cast<std::size_t>(ix.count());

    // coefficients of f_i laid out on the same index table
    std::vector<double> a(cnt, 0.0);
    for (const auto& [w, c] : spec.coeffs[static_cast<std::size_t>(i)])
      if (w.length() <= L) a[static_cast<std::size_t>(ix.index(w))] = c;

    // (1 - f)^{-1}: b_alpha = sum over splittings alpha = alpha' gamma, |gamma| >= 1
    std::vector<double> b1(cnt, 0.0);
    b1[0] = 1.0;
    for (Index w = 1; w < ix.count(); ++w) {
      double s = 0.0;
      for (int t = 1; t <= ix.length(w); ++t) {
        const double c = a[static_cast<std::size_t>(ix.suffix(w, t))];
        if (c != 0.0) s += b1[static_cast<std::size_t>(ix.prefix(w, t))] * c;
      }
      b1[static_cast<std::size_t>(w)] = s;
    }

    // (1 - f)^{-m} = (1 - f)^{-1} * (1 - f)^{-(m-1)} as word convolution
    std::vector<double> b = b1;
    for (int p = 2; p <= spec.m[static_cast<std::size_t>(i)]; ++p) {
      std::vector<double> next(cnt, 0.0);
      for (Index w = 0; w < ix.count(); ++w) {
        double s = 0.0;
        for (int t = 0; t <= ix.length(w); ++t)
          s += b1[static_cast<std::size_t>(ix.prefix(w, t))] * b[static_cast<std::size_t>(ix.suffix(w, t))];
        next[static_cast<std::size_t>(w)] = s;
      }
      b = std::move(next);
    }
    indexers.push_back(ix);
    values.push_back(std::move(b));
  }
  return WeightTable(std::move(indexers), std::move(values));
}

double brute_force_weight(const PolydomainSpec& spec, int i, const Word& alpha) {
  if (i < 0 || i >= spec.k) throw DimensionMismatch("factor index out of range");
  const int d = alpha.length();
  if (d == 0) return 1.0;
  if (d > 20) throw TruncationError("brute_force_weight: word too long for enumeration");
  const int m = spec.m[static_cast<std::size_t>(i)];
  const auto& L = alpha.letters();
  double total = 0.0;
  // bit p set: a cut after position p
  for (unsigned long mask = 0; mask < (1UL << (d - 1)); ++mask) {
    double prod = 1.0;
    int parts = 0, start = 0;
    for (int p = 0; p < d && prod != 0.0; ++p) {
      if (p == d - 1 || (mask >> p) & 1UL) {
        Word piece(alpha.alphabet_size(), std::vector<int>(L.begin() + start, L.begin() + p + 1));
        prod *= spec.coeff(i, piece);
        ++parts;
        start = p + 1;
      }
    }
    if (prod != 0.0) total += prod * binomial(parts + m - 1, m - 1);
  }
  return total;
}

namespace {

struct MinMax {
  Word min, max;
};

MinMax order_pair(const Word& a, const Word& b) {
  if (right_divides(b, a)) return {b, a};
  if (right_divides(a, b)) return {a, b};
  throw NotComparable(a.str() + " and " + b.str() + " are not comparable");
}

void check_pair(const WeightTable& table, const MultiWord& omega, const MultiWord& gamma) {
  if (omega.factors() != table.factors() || gamma.factors() != table.factors())
    throw DimensionMismatch("multi-word factor count does not match weight table");
}

}  // namespace

double tau(const WeightTable& table, const MultiWord& omega, const MultiWord& gamma) {
  check_pair(table, omega, gamma);
  double out = 1.0;
  for (int i = 0; i < table.factors(); ++i) {
    auto [lo, hi] = order_pair(omega[i], gamma[i]);
    out *= std::sqrt(table(i, lo) / table(i, hi));
  }
  return out;
}

double mu(const WeightTable& table, const MultiWord& omega, const MultiWord& gamma) {
  check_pair(table, omega, gamma);
  double out = 1.0;
  for (int i = 0; i < table.factors(); ++i) out /= table(i, order_pair(omega[i], gamma[i]).max);
  return out;
}

CompactnessReport compactness_ratios(const WeightTable& table, int i) {
  const WordIndexer& ix = table.indexer(i);
  CompactnessReport r;
  r.factor = i;
  const int L = ix.max_len();
  for (int d = 1; d <= L; ++d)
    r.trend.push_back({d, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (Index w = 0; w < ix.count(); ++w) {
    if (ix.length(w) >= L) continue;
    for (int j = 1; j <= ix.alphabet_size(); ++j) {
      const Index gw = ix.concat(ix.from_rank(1, j - 1), w);
      const double ratio = table.at(i, gw) / table.at(i, w);
      r.entries.push_back({j, ix.word(w), ratio});
      r.supremum = std::max(r.supremum, ratio);
      auto& t = r.trend[static_cast<std::size_t>(ix.length(w))];
      t.min_ratio = std::min(t.min_ratio, ratio);
      t.max_ratio = std::max(t.max_ratio, ratio);
    }
  }
  return r;
}

}  // namespace polytoep
