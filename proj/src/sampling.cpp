#include "polytoep/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polytoep {

namespace {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Word random_word(Rng& rng, int n, int len) {
  std::vector<int> l(static_cast<std::size_t>(len));
  for (auto& x : l) x = uniform_int(rng, 1, n);
  return Word(n, std::move(l));
}

}  // namespace

PolydomainSpec random_spec(Rng& rng, const SpecLimits& lim) {
  PolydomainSpec s;
  s.k = uniform_int(rng, 1, lim.max_k);
  s.coeffs.resize(static_cast<std::size_t>(s.k));
  for (int i = 0; i < s.k; ++i) {
    const int n = uniform_int(rng, 1, lim.max_n);
    s.n.push_back(n);
    s.m.push_back(uniform_int(rng, 1, lim.max_m));
    auto& c = s.coeffs[static_cast<std::size_t>(i)];
    // (0, max]: flip the half-open interval [0, max)
    for (int j = 1; j <= n; ++j) c[generator(n, j)] = lim.max_coeff - uniform(rng, 0.0, lim.max_coeff);
    if (lim.max_degree >= 2) {
      const int extra = uniform_int(rng, 0, lim.max_extra_words);
      for (int e = 0; e < extra; ++e)
        c[random_word(rng, n, uniform_int(rng, 2, lim.max_degree))] = lim.max_coeff - uniform(rng, 0.0, lim.max_coeff);
    }
  }
  return s;
}

PolydomainSpec phi_spec(int n, int m, int max_degree) {
  PolydomainSpec s;
  s.k = 1;
  s.n = {n};
  s.m = {m};
  s.coeffs.resize(1);
  for (const Word& w : enumerate_words(n, max_degree))
    if (!w.empty()) s.coeffs[0][w] = 1.0;
  return s;
}

DenseMatrix random_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      const double re = g(rng);
      const double im = g(rng);
      m(r, c) = cplx(re, im);
    }
  return m;
}

namespace {

IndexPair random_pair(const FockSpace& s, Rng& rng) {
  IndexPair p;
  for (int i = 0; i < s.factors(); ++i) {
    const int n = s.spec().n[static_cast<std::size_t>(i)];
    const int L = s.trunc()[static_cast<std::size_t>(i)];
    const int deg = uniform_int(rng, -L, L);
    p.left.parts.push_back(random_word(rng, n, std::max(deg, 0)));
    p.right.parts.push_back(random_word(rng, n, std::max(-deg, 0)));
  }
  return p;
}

DenseMatrix bounded_coefficient(Rng& rng, int cd) {
  DenseMatrix a(cd, cd);
  for (Index c = 0; c < cd; ++c)
    for (Index r = 0; r < cd; ++r) {
      const double mod = uniform(rng, 0.0, 1.0);
      const double arg = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      a(r, c) = std::polar(mod, arg);
    }
  return a;
}

}  // namespace

FourierSymbol random_symbol(const SpacePtr& space, Rng& rng, int max_terms) {
  FourierSymbol sym(space);
  const int terms = uniform_int(rng, 1, max_terms);
  for (int t = 0; t < terms; ++t) sym.add(random_pair(*space, rng), bounded_coefficient(rng, space->coeff_dim()));
  return sym;
}

FourierSymbol random_hermitian_symbol(const SpacePtr& space, Rng& rng, int max_terms, double diagonal_shift) {
  FourierSymbol sym(space);
  const int cd = space->coeff_dim();
  const IndexPair origin{MultiWord::empty(space->spec().n), MultiWord::empty(space->spec().n)};
  DenseMatrix h = bounded_coefficient(rng, cd);
  h = 0.5 * (h + h.adjoint());
  sym.add(origin, h + diagonal_shift * DenseMatrix::Identity(cd, cd));
  const int terms = uniform_int(rng, 1, max_terms);
  for (int t = 0; t < terms; ++t) {
    IndexPair p = random_pair(*space, rng);
    if (p == origin) continue;
    const DenseMatrix a = bounded_coefficient(rng, cd);
    sym.add(p, a);
    sym.add(IndexPair{p.right, p.left}, a.adjoint());
  }
  return sym;
}

PureTupleSample random_pure_tuple(const PolydomainSpec& spec, const std::vector<int>& factor_dims, Rng& rng,
                                  double fraction) {
  if (static_cast<int>(factor_dims.size()) != spec.k) throw DimensionMismatch("need one Hilbert space dimension per factor");
  Index dh = 1;
  for (int d : factor_dims) dh *= d;
  std::vector<std::vector<DenseMatrix>> e(static_cast<std::size_t>(spec.k));
  for (int i = 0; i < spec.k; ++i) {
    const int di = factor_dims[static_cast<std::size_t>(i)];
    Index before = 1, after = 1;
    for (int l = 0; l < i; ++l) before *= factor_dims[static_cast<std::size_t>(l)];
    for (int l = i + 1; l < spec.k; ++l) after *= factor_dims[static_cast<std::size_t>(l)];
    for (int j = 0; j < spec.n[static_cast<std::size_t>(i)]; ++j) {
      const DenseMatrix y = random_matrix(rng, di, di);
      DenseMatrix x = DenseMatrix::Zero(dh, dh);
      // I_before (x) y (x) I_after
      for (Index b = 0; b < before; ++b)
        for (Index a = 0; a < after; ++a)
          for (Index r = 0; r < di; ++r)
            for (Index c = 0; c < di; ++c) x((b * di + r) * after + a, (b * di + c) * after + a) = y(r, c);
      e[static_cast<std::size_t>(i)].push_back(x);
    }
  }
  const DenseTuple base(spec, std::move(e));
  auto inside = [&](double r) { return is_member(base.scaled(r), 1e-12).member; };
  double lo = 0.0, hi = 1.0;
  while (inside(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return PureTupleSample{base.scaled(fraction * lo), lo, fraction * lo};
}

}  // namespace polytoep
