#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polytoep/errors.hpp"
#include "polytoep/sampling.hpp"
#include "polytoep/toeplitz.hpp"

using namespace polytoep;

namespace {

PolydomainSpec univariate_z(int m) {
  PolydomainSpec s;
  s.k = 1;
  s.n = {1};
  s.m = {m};
  s.coeffs = {{{Word(1, {1}), 1.0}}};
  return s;
}

PolydomainSpec two_factor() {
  PolydomainSpec s;
  s.k = 2;
  s.n = {2, 1};
  s.m = {2, 1};
  s.coeffs = {{{Word(2, {1}), 1.0}, {Word(2, {2}), 1.0}, {Word(2, {1, 2}), 0.5}}, {{Word(1, {1}), 1.0}, {Word(1, {1, 1}), 0.3}}};
  return s;
}

double symbol_distance(const FourierSymbol& a, const FourierSymbol& b) {
  double worst = 0.0;
  for (const auto& [p, A] : a.coefficients()) {
    const DenseMatrix* B = b.find(p);
    worst = std::max(worst, B ? max_abs(DenseMatrix(A - *B)) : max_abs(A));
  }
  for (const auto& [p, B] : b.coefficients())
    if (!a.find(p)) worst = std::max(worst, max_abs(B));
  return worst;
}

}  // namespace

TEST_CASE("identity is multi-Toeplitz with the trivial symbol") {
  const auto s = make_space(two_factor(), {2, 2}, 2);
  const FockOperator I = identity(s);
  const ToeplitzReport r = is_multi_toeplitz(I);
  CHECK(r.verdict);
  CHECK(r.max_violation == 0.0);
  CHECK(r.skipped_pairs == 0);
  const FourierSymbol sym = extract_fourier(I, 1e-10, 1e-14);
  REQUIRE(sym.size() == 1);
  const auto& [pair, A] = *sym.coefficients().begin();
  CHECK(pair.left.total_degree() == 0);
  CHECK(pair.right.total_degree() == 0);
  CHECK(max_abs(DenseMatrix(A - DenseMatrix::Identity(2, 2))) < 1e-15);
}

TEST_CASE("monomials round trip through extraction") {
  const auto s = make_space(two_factor(), {3, 2}, 2);
  Rng rng(71);
  const MultiWord e = MultiWord::empty({2, 1});
  const std::vector<IndexPair> pairs = {
      {MultiWord({Word(2, {1, 2}), Word(1)}), e},
      {MultiWord({Word(2, {2}), Word(1)}), MultiWord({Word(2), Word(1, {1})})},
      {MultiWord({Word(2), Word(1, {1, 1})}), MultiWord({Word(2, {2, 1, 1}), Word(1)})},
  };
  for (const auto& p : pairs) {
    const DenseMatrix A = random_matrix(rng, 2, 2);
    const FockOperator T = monomial(s, p, A);
    const ToeplitzReport r = is_multi_toeplitz(T);
    CHECK(r.verdict);
    CHECK(oracle::toeplitz_violation(T) < 1e-12);
    const FourierSymbol sym = extract_fourier(T, 1e-10, 1e-13);
    REQUIRE(sym.size() == 1);
    REQUIRE(sym.find(p) != nullptr);
    CHECK(max_abs(DenseMatrix(*sym.find(p) - A)) < 1e-12);
  }
}

TEST_CASE("random symbols round trip and the brute-force classifier agrees") {
  Rng rng(81);
  SpecLimits lim;
  for (int t = 0; t < 12; ++t) {
    const PolydomainSpec spec = random_spec(rng, lim);
    const std::vector<int> trunc(static_cast<std::size_t>(spec.k), spec.k == 1 ? 4 : 2);
    const auto s = make_space(spec, trunc, 1 + t % 2);
    const FourierSymbol sym = random_symbol(s, rng, 10);
    const FockOperator T = evaluate_symbol(sym, 1.0);
    const ToeplitzReport r = is_multi_toeplitz(T);
    CHECK(r.verdict);
    CHECK(r.max_violation <= 1e-10);
    CHECK(oracle::toeplitz_violation(T) <= 1e-12 * std::max(1.0, max_abs(T.matrix())));
    CHECK(symbol_distance(extract_fourier(T, 1e-10, 1e-14), sym) < 1e-12);

    // closure under sums and scalar multiples
    const FockOperator T2 = evaluate_symbol(random_symbol(s, rng, 5), 1.0);
    CHECK(is_multi_toeplitz(T + T2.scaled(cplx(0.3, -1.2))).verdict);
  }
}

TEST_CASE("an injected entry at a non-comparable pair is reported") {
  const auto s = make_space(two_factor(), {2, 2});
  const auto& B = s->basis();
  const MultiWord omega({Word(2, {1}), Word(1)}), gamma({Word(2, {2}), Word(1)});
  REQUIRE_FALSE(comparable(omega, gamma));
  std::vector<Triplet> t = {{B.index(omega), B.index(gamma), cplx(1e-3)}};
  SparseMatrix bump(s->dim(), s->dim());
  bump.setFromTriplets(t.begin(), t.end());
  const FockOperator T = identity(s) + FockOperator(s, bump);
  const ToeplitzReport r = is_multi_toeplitz(T);
  CHECK_FALSE(r.verdict);
  CHECK(r.structural_violation == doctest::Approx(1e-3));
  REQUIRE(r.worst_pair.has_value());
  CHECK(r.worst_pair->first == omega);
  CHECK(r.worst_pair->second == gamma);
  CHECK(r.to_json()["verdict"] == false);
  CHECK_THROWS_AS(extract_fourier(T), NotToeplitzError);
}

TEST_CASE("a scaling violation along a comparable pair is reported") {
  const auto s = make_space(univariate_z(2), {4});
  std::vector<Triplet> t = {{2, 1, cplx(0.5)}};
  SparseMatrix m(s->dim(), s->dim());
  m.setFromTriplets(t.begin(), t.end());  // only one entry of the first diagonal
  const ToeplitzReport r = is_multi_toeplitz(FockOperator(s, m));
  CHECK_FALSE(r.verdict);
  CHECK(r.scaling_violation > 0.1);
}

TEST_CASE("homogeneous decomposition") {
  Rng rng(91);
  const auto s = make_space(two_factor(), {2, 2}, 2);
  for (int t = 0; t < 5; ++t) {
    const DenseMatrix d = random_matrix(rng, s->total_dim(), s->total_dim());
    const FockOperator T(s, to_sparse(d));
    const auto parts = homogeneous_decomposition(T);
    DenseMatrix sum = DenseMatrix::Zero(s->total_dim(), s->total_dim());
    const double tn = op_norm(d);
    for (const auto& [deg, part] : parts) {
      sum += part.dense();
      std::vector<int> neg = deg;
      for (auto& x : neg) x = -x;
      CHECK(max_abs(DenseMatrix(homogeneous_part(T.adjoint(), deg).dense() - homogeneous_part(T, neg).adjoint().dense())) == 0.0);
      CHECK(op_norm(part.matrix()) <= tn * (1 + 1e-12));
    }
    CHECK(max_abs(DenseMatrix(sum - d)) == 0.0);
    CHECK(max_abs(DenseMatrix(partial_sum_reconstruct(T, {2, 2}).dense() - d)) < 1e-14);
    CHECK(max_abs(DenseMatrix(cesaro_reconstruct(T, {0, 0}).dense() - homogeneous_part(T, {0, 0}).dense())) == 0.0);
    CHECK(homogeneous_part(T, {3, 0}).matrix().nonZeros() == 0);
  }

  // a single-degree symbol is its own part
  FourierSymbol q(s);
  q.add({MultiWord({Word(2, {1}), Word(1)}), MultiWord({Word(2), Word(1, {1})})}, random_matrix(rng, 2, 2));
  q.add({MultiWord({Word(2, {2}), Word(1)}), MultiWord({Word(2), Word(1, {1})})}, random_matrix(rng, 2, 2));
  const FockOperator Q = evaluate_symbol(q, 1.0);
  const auto parts = homogeneous_decomposition(Q);
  REQUIRE(parts.size() == 1);
  CHECK(parts.begin()->first == std::vector<int>{1, -1});
  CHECK(max_abs(DenseMatrix(parts.begin()->second.dense() - Q.dense())) == 0.0);
}

TEST_CASE("symbol evaluation") {
  const auto s = make_space(two_factor(), {2, 2}, 2);
  Rng rng(101);
  FourierSymbol one(s);
  const MultiWord e = MultiWord::empty({2, 1});
  one.add({e, e}, DenseMatrix::Identity(2, 2));
  const DenseTuple X = random_pure_tuple(s->spec(), {2, 2}, rng, 0.8).tuple;
  CHECK(max_abs(DenseMatrix(evaluate_symbol(one, X) - DenseMatrix::Identity(8, 8))) == 0.0);

  const FourierSymbol sym = random_symbol(s, rng, 6);
  const FockOperator at0 = evaluate_symbol(sym, 0.0);
  const DenseMatrix* a0 = sym.find({e, e});
  const DenseMatrix ref = a0 ? DenseMatrix(kron(*a0, sparse_identity(s->dim()))) : DenseMatrix::Zero(s->total_dim(), s->total_dim());
  CHECK(max_abs(DenseMatrix(at0.dense() - ref)) < 1e-15);

  // the universal model as a tuple reproduces the Fock-space evaluation
  const SparseTuple W = universal_model(s);
  std::vector<std::vector<DenseMatrix>> wd(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 1; j <= s->spec().n[static_cast<std::size_t>(i)]; ++j) wd[static_cast<std::size_t>(i)].push_back(DenseMatrix(W.at(i, j)));
  const DenseTuple Wd(s->spec(), wd);
  CHECK(max_abs(DenseMatrix(evaluate_symbol(sym, Wd.scaled(0.7)) - evaluate_symbol(sym, 0.7).dense())) < 1e-13);

  const nlohmann::json js = sym.to_json();
  CHECK(symbol_distance(FourierSymbol::from_json(s, js), sym) == 0.0);
  CHECK_THROWS(one.add({MultiWord({Word(2, {1}), Word(1)}), MultiWord({Word(2, {1}), Word(1)})}, DenseMatrix::Identity(2, 2)));
}

TEST_CASE("radial norms are non-decreasing") {
  Rng rng(111);
  SpecLimits lim;
  for (int t = 0; t < 6; ++t) {
    const PolydomainSpec spec = random_spec(rng, lim);
    const std::vector<int> trunc(static_cast<std::size_t>(spec.k), spec.k == 1 ? 4 : 2);
    const auto s = make_space(spec, trunc, 1 + t % 2);
    const FourierSymbol sym = random_symbol(s, rng, 8);
    double prev = 0.0;
    for (double r : {0.0, 0.2, 0.5, 0.8, 0.95, 1.0}) {
      const double n = op_norm(evaluate_symbol(sym, r).matrix());
      CHECK(prev <= n + 1e-10);
      prev = n;
    }
  }
}

TEST_CASE("pluriharmonic kernel positivity") {
  const auto s = make_space(two_factor(), {2, 1}, 2);
  FourierSymbol one(s);
  const MultiWord e = MultiWord::empty({2, 1});
  one.add({e, e}, DenseMatrix::Identity(2, 2));
  const FockOperator g = pluriharmonic_kernel(one, 0.5);
  CHECK(max_abs(DenseMatrix(g.dense() - DenseMatrix::Identity(s->total_dim(), s->total_dim()))) == 0.0);

  Rng rng(121);
  int agree = 0, psd_cases = 0;
  for (int t = 0; t < 20; ++t) {
    const FourierSymbol sym = random_hermitian_symbol(s, rng, 4, 0.5 + 0.25 * (t % 8));
    for (double r : {0.3, 0.7}) {
      const bool k = psd_check(pluriharmonic_kernel(sym, r).matrix(), 1e-9).psd;
      const bool f = psd_check(evaluate_symbol(sym, r).matrix(), 1e-9).psd;
      agree += (k == f);
      psd_cases += f;
    }
  }
  CHECK(agree == 40);
  CHECK(psd_cases > 0);
  CHECK(psd_cases < 40);
}

TEST_CASE("explicit one-variable threshold") {
  const int L = 6;
  const double r = 0.7;
  const auto s = make_space(univariate_z(1), {L});
  const MultiWord e = MultiWord::empty({1}), g({Word(1, {1})});
  auto symbol = [&](double c) {
    FourierSymbol sym(s);
    sym.add({e, e}, DenseMatrix::Identity(1, 1));
    sym.add({g, e}, DenseMatrix::Constant(1, 1, cplx(c)));
    sym.add({e, g}, DenseMatrix::Constant(1, 1, cplx(c)));
    return sym;
  };
  double lo = 0.0, hi = 5.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (psd_check(pluriharmonic_kernel(symbol(mid), r).matrix(), 0.0).psd ? lo : hi) = mid;
  }
  CHECK(lo == doctest::Approx(oracle::shift_threshold(r, L)).epsilon(1e-9));
  const double lam = psd_check(evaluate_symbol(symbol(lo), r).matrix(), 0.0).min_eigenvalue;
  CHECK(std::abs(lam) < 1e-9);
}

TEST_CASE("comparable word pairs") {
  const WordIndexer ix(2, 3);
  const auto pairs = comparable_word_pairs(ix);
  Index brute = 0;
  for (Index u = 0; u < ix.count(); ++u)
    for (Index v = 0; v < ix.count(); ++v) brute += (ix.has_suffix(u, v) || ix.has_suffix(v, u));
  CHECK(static_cast<Index>(pairs.size()) == brute);
}
