#include <doctest.h>

#include <cmath>

#include "polytoep/cpmaps.hpp"
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

DenseTuple scalar_tuple(const PolydomainSpec& spec, cplx x) {
  DenseMatrix m(1, 1);
  m(0, 0) = x;
  return DenseTuple(spec, {{m}});
}

double vacuum_defect_error(const SpacePtr& s, const SparseTuple& W, const std::vector<int>& headroom) {
  const DenseMatrix D = DenseMatrix(defect(W, W.spec().m));
  const auto& B = s->basis();
  double worst = 0.0;
  for (Index r = 0; r < s->dim(); ++r)
    for (Index c = 0; c < s->dim(); ++c) {
      bool safe = true;
      for (int i = 0; i < s->factors(); ++i) {
        const int lim = s->trunc()[static_cast<std::size_t>(i)] - headroom[static_cast<std::size_t>(i)];
        safe = safe && B.degree(r, i) <= lim && B.degree(c, i) <= lim;
      }
      if (!safe) continue;
      const cplx ref = (r == 0 && c == 0) ? cplx(1.0) : cplx(0.0);
      worst = std::max(worst, std::abs(D(r, c) - ref));
    }
  return worst;
}

}  // namespace

TEST_CASE("phi map basics") {
  const PolydomainSpec z = univariate_z(1);
  const DenseTuple x = scalar_tuple(z, cplx(0.6, 0.8) * 0.5);
  const DenseMatrix one = DenseMatrix::Identity(1, 1);
  CHECK(std::abs(phi_map(x, 0, one)(0, 0) - 0.25) < 1e-15);
  CHECK(phi_map(x, 0, DenseMatrix(DenseMatrix::Zero(1, 1)))(0, 0) == cplx(0.0));
  CHECK(phi_map(scalar_tuple(z, 0.0), 0, one)(0, 0) == cplx(0.0));
  CHECK_THROWS_AS(phi_map(x, 0, DenseMatrix(DenseMatrix::Identity(2, 2))), DimensionMismatch);

  Rng rng(31);
  const PolydomainSpec spec = random_spec(rng);
  std::vector<int> dims(static_cast<std::size_t>(spec.k), 2);
  const DenseTuple X = random_pure_tuple(spec, dims, rng, 0.9).tuple;
  const DenseMatrix b = random_matrix(rng, X.dim(), X.dim());
  for (int i = 0; i < spec.k; ++i) CHECK(psd_check(phi_map(X, i, DenseMatrix(b * b.adjoint())), 1e-12).psd);
}

TEST_CASE("defect of zero tuple and membership witnesses") {
  const PolydomainSpec z = univariate_z(1);
  CHECK(max_abs(DenseMatrix(defect(scalar_tuple(z, 0.0), {1}) - DenseMatrix::Identity(1, 1))) == 0.0);
  CHECK(is_member(scalar_tuple(z, 0.0), 1e-12).member);
  const auto out = is_member(scalar_tuple(z, 2.0), 1e-12);
  CHECK_FALSE(out.member);
  CHECK(out.witness_eigenvalue == doctest::Approx(-3.0));
  CHECK(out.witness_p == std::vector<int>{1});

  CHECK(is_pure(scalar_tuple(z, 0.0), 10, 1e-12).pure);
  const auto unitary = is_pure(scalar_tuple(z, 1.0), 50, 1e-12);
  CHECK_FALSE(unitary.pure);
  CHECK(unitary.decay_rate[0] == doctest::Approx(1.0));
}

TEST_CASE("commutation is enforced across factors") {
  PolydomainSpec s;
  s.k = 2;
  s.n = {1, 1};
  s.m = {1, 1};
  s.coeffs = {{{Word(1, {1}), 1.0}}, {{Word(1, {1}), 1.0}}};
  DenseMatrix a = DenseMatrix::Zero(2, 2), b = DenseMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  b(1, 0) = 1.0;
  CHECK_THROWS_AS(DenseTuple(s, {{a}, {b}}), DimensionMismatch);
  CHECK_NOTHROW(DenseTuple(s, {{a}, {a}}));
}

TEST_CASE("universal model defect is the vacuum projection") {
  Rng rng(41);
  SpecLimits lim;
  for (int t = 0; t < 10; ++t) {
    const PolydomainSpec spec = random_spec(rng, lim);
    const std::vector<int> trunc(static_cast<std::size_t>(spec.k), spec.k == 1 ? 5 : 3);
    const auto s = make_space(spec, trunc);
    const std::vector<int> none(static_cast<std::size_t>(spec.k), 0);
    CHECK(vacuum_defect_error(s, universal_model(s), none) <= 1e-10);
    CHECK(vacuum_defect_error(s, right_universal_model(s), none) <= 1e-10);
    CHECK(is_member(universal_model(s), 1e-10).member);
    const auto pure = is_pure(universal_model(s), 20, 1e-12);
    CHECK(pure.pure);
    for (int i = 0; i < spec.k; ++i) CHECK(pure.power_reached[static_cast<std::size_t>(i)] <= trunc[static_cast<std::size_t>(i)] + 1);
  }
}

TEST_CASE("Berezin kernel of the zero tuple") {
  const PolydomainSpec z = univariate_z(2);
  const auto s = make_space(z, {4});
  DenseTuple zero(z, {{DenseMatrix(DenseMatrix::Zero(2, 2))}});
  const BerezinKernel K = berezin_kernel(s, zero);
  CHECK(kernel_isometry_defect(K) == 0.0);
  CHECK(max_abs(DenseMatrix(K.block(0) - DenseMatrix::Identity(2, 2))) == 0.0);
  for (Index b = 1; b < s->dim(); ++b) CHECK(K.block(b).norm() == 0.0);
  CHECK(K.tail_bound <= 1e-12);
}

TEST_CASE("Berezin kernel of random pure tuples") {
  Rng rng(51);
  SpecLimits lim;
  for (int t = 0; t < 10; ++t) {
    const PolydomainSpec spec = random_spec(rng, lim);
    const std::vector<int> trunc(static_cast<std::size_t>(spec.k), spec.k == 1 ? 8 : 5);
    const std::vector<int> dims(static_cast<std::size_t>(spec.k), spec.k == 1 ? 3 : 2);
    const auto s = make_space(spec, trunc);
    const DenseTuple X = random_pure_tuple(spec, dims, rng, 0.5).tuple;
    const BerezinKernel K = berezin_kernel(s, X);
    const double defect_norm = kernel_isometry_defect(K);
    CHECK(defect_norm <= std::max(1e-8, K.tail_bound));
    CHECK(op_norm(K.K) <= 1.0 + 1e-10);
    CHECK(intertwining_residual(K, X).residual <= 1e-9);

    // identity goes to (approximately) the identity, positives to positives
    const DenseMatrix bi = berezin_transform(identity(s), K);
    CHECK(op_norm(DenseMatrix(bi - DenseMatrix::Identity(X.dim(), X.dim()))) <= std::max(1e-8, K.tail_bound));
    const FockOperator w = weighted_left_creation(s, 0, 1);
    CHECK(psd_check(berezin_transform(w * w.adjoint(), K), 1e-12).psd);
  }
}

TEST_CASE("mean value property for monomials") {
  Rng rng(61);
  PolydomainSpec spec;
  spec.k = 1;
  spec.n = {2};
  spec.m = {2};
  spec.coeffs = {{{Word(2, {1}), 0.7}, {Word(2, {2}), 0.4}, {Word(2, {1, 2}), 0.3}}};
  const auto s = make_space(spec, {8});
  const DenseTuple X = random_pure_tuple(spec, {3}, rng, 0.4).tuple;
  const BerezinKernel K = berezin_kernel(s, X);
  const double r = 0.8;
  const MultiWord e = MultiWord::empty({2});
  FourierSymbol sym(s);
  sym.add(IndexPair{MultiWord({Word(2, {1, 2})}), e}, DenseMatrix::Identity(1, 1));
  sym.add(IndexPair{e, MultiWord({Word(2, {2})})}, DenseMatrix::Constant(1, 1, cplx(0.0, 0.5)));
  const DenseMatrix lhs = evaluate_symbol(sym, X.scaled(r));
  const DenseMatrix rhs = berezin_transform(evaluate_symbol(sym, r), K);
  const double gnorm = op_norm(evaluate_symbol(sym, r).matrix());
  const double bound = gnorm * (2.0 * std::sqrt(K.tail_bound) + K.tail_bound);
  CHECK(op_norm(DenseMatrix(lhs - rhs)) <= std::max(1e-10, bound));
}
