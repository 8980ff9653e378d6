#include "polytoep/model.hpp"

#include <cmath>
#include <limits>

#include "polytoep/errors.hpp"

namespace polytoep {

FockSpace::FockSpace(PolydomainSpec spec, std::vector<int> trunc, int coeff_dim)
    : spec_(std::move(spec)), trunc_(std::move(trunc)), coeff_dim_(coeff_dim) {
  spec_.validate();
  if (static_cast<int>(trunc_.size()) != spec_.k) throw DimensionMismatch("truncation must have k entries");
  if (coeff_dim_ < 1) throw DimensionMismatch("coefficient dimension must be positive");
  for (int L : trunc_)
    if (L < 0) throw TruncationError("negative truncation degree");
  basis_ = TruncatedBasis(spec_.n, trunc_);
  weights_ = build_weight_table(spec_, trunc_);
  weight_product_.resize(static_cast<std::size_t>(dim()));
  for (Index idx = 0; idx < dim(); ++idx) {
    double p = 1.0;
    for (int i = 0; i < factors(); ++i) p *= weights_.at(i, basis_.part(idx, i));
    weight_product_[static_cast<std::size_t>(idx)] = p;
  }
}

double FockSpace::tau_factor(int i, Index u, Index v) const {
  const double bu = weights_.at(i, u), bv = weights_.at(i, v);
  return basis_.indexer(i).length(u) >= basis_.indexer(i).length(v) ? std::sqrt(bv / bu) : std::sqrt(bu / bv);
}

SpacePtr make_space(const PolydomainSpec& spec, const std::vector<int>& trunc, int coeff_dim) {
  return std::make_shared<const FockSpace>(spec, trunc, coeff_dim);
}

SpacePtr with_coeff_dim(const SpacePtr& space, int coeff_dim) {
  if (space->coeff_dim() == coeff_dim) return space;
  return make_space(space->spec(), space->trunc(), coeff_dim);
}

FockOperator::FockOperator(SpacePtr space, SparseMatrix matrix, std::string label)
    : space_(std::move(space)), matrix_(std::move(matrix)), label_(std::move(label)) {
  if (!space_) throw DimensionMismatch("FockOperator without a space");
  if (matrix_.rows() != space_->total_dim() || matrix_.cols() != space_->total_dim())
    throw DimensionMismatch("operator of size " + std::to_string(matrix_.rows()) + "x" + std::to_string(matrix_.cols()) +
                            " on a space of dimension " + std::to_string(space_->total_dim()));
  matrix_.makeCompressed();
}

FockOperator FockOperator::adjoint() const {
  return FockOperator(space_, SparseMatrix(matrix_.adjoint()), label_.empty() ? "" : "(" + label_ + ")*");
}

static void require_same_space(const FockOperator& a, const FockOperator& b) {
  if (a.space().total_dim() != b.space().total_dim() || a.space().trunc() != b.space().trunc() ||
      a.space().spec().n != b.space().spec().n)
    throw DimensionMismatch("operators live on different Fock spaces");
}

FockOperator FockOperator::operator+(const FockOperator& o) const {
  require_same_space(*this, o);
  return FockOperator(space_, SparseMatrix(matrix_ + o.matrix_), label_ + "+" + o.label_);
}

FockOperator FockOperator::operator-(const FockOperator& o) const {
  require_same_space(*this, o);
  return FockOperator(space_, SparseMatrix(matrix_ - o.matrix_), label_ + "-" + o.label_);
}

FockOperator FockOperator::operator*(const FockOperator& o) const {
  require_same_space(*this, o);
  return FockOperator(space_, SparseMatrix(matrix_ * o.matrix_), label_ + "." + o.label_);
}

FockOperator FockOperator::scaled(cplx c) const { return FockOperator(space_, SparseMatrix(c * matrix_), label_); }

namespace {

void check_generator(const FockSpace& s, int i, int j) {
  if (i < 0 || i >= s.factors()) throw DimensionMismatch("factor index out of range");
  if (j < 1 || j > s.spec().n[static_cast<std::size_t>(i)]) throw DimensionMismatch("generator index out of range");
}

// creation on the scalar Fock space; left = true multiplies on the left
SparseMatrix scalar_creation(const FockSpace& s, int i, int j, bool left) {
  check_generator(s, i, j);
  const TruncatedBasis& B = s.basis();
  const WordIndexer& ix = B.indexer(i);
  const Index g = ix.from_rank(1, j - 1);
  std::vector<Triplet> t;
  for (Index idx = 0; idx < B.size(); ++idx) {
    const Index u = B.part(idx, i);
    const Index v = left ? ix.concat(g, u) : ix.concat(u, g);
    if (v < 0) continue;
    t.emplace_back(B.with_part(idx, i, v), idx, std::sqrt(s.weights().at(i, u) / s.weights().at(i, v)));
  }
  SparseMatrix m(B.size(), B.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix ampliate(const SparseMatrix& m, int coeff_dim) {
  if (coeff_dim == 1) return m;
  return kron(sparse_identity(coeff_dim), m);
}

SparseMatrix scalar_word(const FockSpace& s, int i, const Word& alpha, bool left) {
  if (alpha.alphabet_size() != s.spec().n[static_cast<std::size_t>(i)]) throw DimensionMismatch("word over the wrong alphabet");
  SparseMatrix out = sparse_identity(s.dim());
  for (int l : alpha.letters()) out = SparseMatrix(out * scalar_creation(s, i, l, left));
  return out;
}

SparseMatrix scalar_multi(const FockSpace& s, const MultiWord& w) {
  if (w.factors() != s.factors()) throw DimensionMismatch("multi-word has wrong number of factors");
  SparseMatrix out = sparse_identity(s.dim());
  for (int i = 0; i < s.factors(); ++i)
    if (!w[i].empty()) out = SparseMatrix(out * scalar_word(s, i, w[i], true));
  return out;
}

}  // namespace

FockOperator weighted_left_creation(const SpacePtr& space, int i, int j) {
  return FockOperator(space, ampliate(scalar_creation(*space, i, j, true), space->coeff_dim()),
                      "W" + std::to_string(i + 1) + "," + std::to_string(j));
}

FockOperator weighted_right_creation(const SpacePtr& space, int i, int j) {
  return FockOperator(space, ampliate(scalar_creation(*space, i, j, false), space->coeff_dim()),
                      "Lambda" + std::to_string(i + 1) + "," + std::to_string(j));
}

FockOperator left_word(const SpacePtr& space, int i, const Word& alpha) {
  return FockOperator(space, ampliate(scalar_word(*space, i, alpha, true), space->coeff_dim()),
                      "W" + std::to_string(i + 1) + "[" + alpha.str() + "]");
}

FockOperator right_word(const SpacePtr& space, int i, const Word& alpha) {
  return FockOperator(space, ampliate(scalar_word(*space, i, alpha, false), space->coeff_dim()),
                      "Lambda" + std::to_string(i + 1) + "[" + alpha.str() + "]");
}

FockOperator monomial(const SpacePtr& space, const IndexPair& pair, const DenseMatrix& coefficient) {
  if (!pair.in_J()) throw NotComparable("monomial: pair " + pair.str() + " is not in J");
  if (coefficient.rows() != space->coeff_dim() || coefficient.cols() != space->coeff_dim())
    throw DimensionMismatch("monomial coefficient does not match the coefficient space");
  SparseMatrix wa = scalar_multi(*space, pair.left);
  SparseMatrix wb = scalar_multi(*space, pair.right);
  SparseMatrix prod = wa * SparseMatrix(wb.adjoint());
  return FockOperator(space, kron(coefficient, prod), "A(x)W[" + pair.str() + "]");
}

FockOperator identity(const SpacePtr& space) {
  return FockOperator(space, sparse_identity(space->total_dim()), "I");
}

FockOperator graded_projection(const SpacePtr& space, const std::vector<int>& p) {
  const TruncatedBasis& B = space->basis();
  if (static_cast<int>(p.size()) != B.factors()) throw DimensionMismatch("multidegree has wrong length");
  std::vector<Triplet> t;
  for (Index idx = 0; idx < B.size(); ++idx) {
    bool hit = true;
    for (int i = 0; i < B.factors() && hit; ++i) hit = B.degree(idx, i) == p[static_cast<std::size_t>(i)];
    if (hit)
      for (int c = 0; c < space->coeff_dim(); ++c) t.emplace_back(c * B.size() + idx, c * B.size() + idx, 1.0);
  }
  SparseMatrix m(space->total_dim(), space->total_dim());
  m.setFromTriplets(t.begin(), t.end());
  return FockOperator(space, m, "P");
}

FockOperator weighted_fock_unitary(const SpacePtr& space, Direction direction) {
  std::vector<Triplet> t;
  const Index d = space->dim();
  for (int c = 0; c < space->coeff_dim(); ++c)
    for (Index idx = 0; idx < d; ++idx) {
      const double v = std::sqrt(space->weight_product(idx));
      t.emplace_back(c * d + idx, c * d + idx, direction == Direction::Forward ? v : 1.0 / v);
    }
  SparseMatrix m(space->total_dim(), space->total_dim());
  m.setFromTriplets(t.begin(), t.end());
  return FockOperator(space, m, direction == Direction::Forward ? "U" : "U^-1");
}

FockOperator unweighted_left_creation(const SpacePtr& space, int i, int j) {
  check_generator(*space, i, j);
  const TruncatedBasis& B = space->basis();
  const WordIndexer& ix = B.indexer(i);
  const Index g = ix.from_rank(1, j - 1);
  std::vector<Triplet> t;
  for (Index idx = 0; idx < B.size(); ++idx) {
    const Index v = ix.concat(g, B.part(idx, i));
    if (v >= 0) t.emplace_back(B.with_part(idx, i, v), idx, 1.0);
  }
  SparseMatrix m(B.size(), B.size());
  m.setFromTriplets(t.begin(), t.end());
  return FockOperator(space, ampliate(m, space->coeff_dim()), "L" + std::to_string(i + 1) + "," + std::to_string(j));
}

namespace {

void require_univariate(const PolydomainSpec& spec, std::size_t zs, std::size_t ws) {
  spec.validate();
  for (int ni : spec.n)
    if (ni != 1) throw DimensionMismatch("scalar kernel needs n_i = 1 in every factor");
  if (zs != static_cast<std::size_t>(spec.k) || ws != static_cast<std::size_t>(spec.k))
    throw DimensionMismatch("scalar kernel needs k-tuples z and w");
}

// f_i evaluated at a complex point
cplx eval_f(const PolydomainSpec& spec, int i, cplx x) {
  cplx s = 0.0;
  for (const auto& [w, a] : spec.coeffs[static_cast<std::size_t>(i)]) s += a * std::pow(x, w.length());
  return s;
}

}  // namespace

cplx scalar_kernel(const PolydomainSpec& spec, const std::vector<cplx>& z, const std::vector<cplx>& w) {
  require_univariate(spec, z.size(), w.size());
  cplx out = 1.0;
  for (int i = 0; i < spec.k; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const cplx s = eval_f(spec, i, std::conj(z[iu]) * w[iu]);
    if (std::abs(s) >= 1.0) throw SpecError("scalar kernel diverges: |f_" + std::to_string(i + 1) + "(conj(z) w)| >= 1");
    out *= std::pow(1.0 - s, -spec.m[iu]);
  }
  return out;
}

GramSum truncated_gram_sum(const PolydomainSpec& spec, const std::vector<cplx>& z, const std::vector<cplx>& w, int L) {
  require_univariate(spec, z.size(), w.size());
  if (L < 0) throw TruncationError("negative truncation degree");
  const WeightTable table = build_weight_table(spec, std::vector<int>(static_cast<std::size_t>(spec.k), L));
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<cplx> partial;
  std::vector<double> tail, envelope;
  for (int i = 0; i < spec.k; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const cplx t = std::conj(z[iu]) * w[iu];
    cplx s = 0.0, tp = 1.0;
    for (int p = 0; p <= L; ++p, tp *= t) s += table.at(i, p) * tp;
    partial.push_back(s);

    // b_p <= G(r) / r^p for every r with f(r) < 1, where G = (1 - f)^{-m}
    const int m = spec.m[iu];
    auto f_real = [&](double x) { return eval_f(spec, i, x).real(); };
    auto G = [&](double x) { return std::pow(1.0 - f_real(x), -m); };
    double lo = 0.0, hi = 1.0;
    while (f_real(hi) < 1.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f_real(mid) < 1.0 ? lo : hi) = mid;
    }
    const double R = lo;  // f(R) < 1 <= f(hi)
    const double rho = std::abs(t);
    if (rho >= R) {
      tail.push_back(inf);
      envelope.push_back(inf);
      continue;
    }
    double best = inf;
    for (int q = 1; q < 400; ++q) {
      const double r = rho + (R - rho) * q / 400.0;
      if (r <= 0.0) continue;
      const double x = rho / r;
      best = std::min(best, G(r) * std::pow(x, L + 1) / (1.0 - x));
    }
    tail.push_back(rho == 0.0 ? 0.0 : best);
    envelope.push_back(G(rho));
  }

  GramSum out{1.0, 0.0};
  for (const cplx& s : partial) out.value *= s;
  // telescoping: |prod S - prod P| <= sum_i tail_i prod_{j != i} G_j(|t_j|)
  for (std::size_t i = 0; i < tail.size(); ++i) {
    double term = tail[i];
    for (std::size_t j = 0; j < tail.size(); ++j)
      if (j != i) term *= envelope[j];
    if (tail[i] == 0.0) term = 0.0;
    out.tail_bound += term;
  }
  // floating-point error of the partial sums and the product
  double scale = 1.0;
  for (double g : envelope) scale *= g;
  out.tail_bound += 8.0 * (L + spec.k + 1) * std::numeric_limits<double>::epsilon() * scale;
  return out;
}

}  // namespace polytoep
