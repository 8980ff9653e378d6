#include "polytoep/brownhalmos.hpp"

#include <cmath>
#include <sstream>

#include "polytoep/errors.hpp"
#include "polytoep/toeplitz.hpp"
#include "polytoep/weights.hpp"

namespace polytoep {

RowOperator::RowOperator(SpacePtr space, int factor) : space_(std::move(space)), factor_(factor) {
  if (factor_ < 0 || factor_ >= space_->factors()) throw DimensionMismatch("row operator: factor out of range");
  const PolydomainSpec& spec = space_->spec();
  std::map<Word, double> cols;  // ordered graded-lexicographically
  for (const auto& [w, a] : spec.coeffs[static_cast<std::size_t>(factor_)])
    if (a > 0.0) cols[reverse(w)] = a;

  const TruncatedBasis& B = space_->basis();
  const Index d = space_->dim();
  const int cd = space_->coeff_dim();
  const int L = space_->trunc()[static_cast<std::size_t>(factor_)];
  offsets_.push_back(0);
  std::vector<Triplet> t;
  for (const auto& [alpha, a] : cols) {
    columns_.push_back(alpha);
    weights_.push_back(std::sqrt(a));
    std::vector<Index> kept;
    for (int y = 0; y < cd; ++y)
      for (Index u = 0; u < d; ++u)
        if (B.degree(u, factor_) + alpha.length() <= L) kept.push_back(y * d + u);
    // Lambda_alpha on the whole space, scaled
    SparseMatrix lam = alpha.length() <= L ? SparseMatrix(std::sqrt(a) * right_word(space_, factor_, alpha).matrix())
                                           : SparseMatrix(space_->total_dim(), space_->total_dim());
    const Index off = offsets_.back();
    for (std::size_t p = 0; p < kept.size(); ++p)
      for (SparseMatrix::InnerIterator it(lam, kept[p]); it; ++it)
        t.emplace_back(it.row(), off + static_cast<Index>(p), it.value());
    offsets_.push_back(off + static_cast<Index>(kept.size()));
    kept_.push_back(std::move(kept));
    lambda_.push_back(std::move(lam));
  }
  matrix_ = SparseMatrix(space_->total_dim(), domain_dim());
  matrix_.setFromTriplets(t.begin(), t.end());
}

FockOperator RowOperator::column_operator(int c) const {
  return FockOperator(space_, lambda_[static_cast<std::size_t>(c)], "C[" + columns_[static_cast<std::size_t>(c)].str() + "]");
}

SparseMatrix RowOperator::embedding(int c) const {
  const auto& kept = kept_[static_cast<std::size_t>(c)];
  std::vector<Triplet> t;
  for (std::size_t p = 0; p < kept.size(); ++p) t.emplace_back(kept[p], offsets_[static_cast<std::size_t>(c)] + static_cast<Index>(p), 1.0);
  SparseMatrix e(space_->total_dim(), domain_dim());
  e.setFromTriplets(t.begin(), t.end());
  return e;
}

SparseMatrix RowOperator::diag(const SparseMatrix& Y) const {
  if (Y.rows() != space_->total_dim() || Y.cols() != space_->total_dim()) throw DimensionMismatch("diag: operator size");
  SparseMatrix out(domain_dim(), domain_dim());
  for (int c = 0; c < N(); ++c) {
    const SparseMatrix e = embedding(c);
    out += SparseMatrix(e.adjoint()) * Y * e;
  }
  return out;
}

std::pair<int, Index> RowOperator::locate(Index domain_index) const {
  for (int c = 0; c < N(); ++c)
    if (domain_index < offsets_[static_cast<std::size_t>(c) + 1])
      return {c, kept_[static_cast<std::size_t>(c)][static_cast<std::size_t>(domain_index - offsets_[static_cast<std::size_t>(c)])]};
  throw DimensionMismatch("domain index out of range");
}

RowOperator build_row(const SpacePtr& space, int i) { return RowOperator(space, i); }

double row_contraction_norm(const RowOperator& C) {
  return op_norm(SparseMatrix(C.matrix() * SparseMatrix(C.matrix().adjoint())));
}

CauchyDual cauchy_dual(const RowOperator& C, double rank_tol) {
  const SparseMatrix gram = SparseMatrix(C.matrix().adjoint()) * C.matrix();
  const HermitianBlocks hb = hermitian_blocks(gram);
  CauchyDual out;
  out.lambda_max = std::max(0.0, hb.lambda_max());
  out.rank_tol = rank_tol >= 0.0 ? rank_tol : 1e-10 * out.lambda_max;
  std::vector<Triplet> pinv, basis;
  Index col = 0;
  for (const auto& b : hb.blocks)
    for (Index e = 0; e < b.values.size(); ++e) {
      const double lam = b.values[e];
      if (lam > out.rank_tol / 10.0 && lam <= out.rank_tol * 10.0) {
        std::ostringstream os;
        os << "C^*C has eigenvalue " << lam << " within a factor 10 of the rank tolerance " << out.rank_tol;
        throw NumericalRankError(os.str());
      }
      if (lam <= out.rank_tol) continue;
      const auto v = b.vectors.col(e);
      for (std::size_t p = 0; p < b.support.size(); ++p) {
        if (v[static_cast<Index>(p)] != cplx(0.0)) basis.emplace_back(b.support[p], col, v[static_cast<Index>(p)]);
        for (std::size_t q = 0; q < b.support.size(); ++q) {
          const cplx val = v[static_cast<Index>(p)] * std::conj(v[static_cast<Index>(q)]) / lam;
          if (val != cplx(0.0)) pinv.emplace_back(b.support[p], b.support[q], val);
        }
      }
      ++col;
    }
  out.rank = col;
  out.gram_pinv = SparseMatrix(C.domain_dim(), C.domain_dim());
  out.gram_pinv.setFromTriplets(pinv.begin(), pinv.end());
  out.range_basis = SparseMatrix(C.domain_dim(), col);
  out.range_basis.setFromTriplets(basis.begin(), basis.end());
  out.dual = C.matrix() * out.gram_pinv;
  return out;
}

SparseMatrix phi_right(const RowOperator& C, const SparseMatrix& T) {
  SparseMatrix out(T.rows(), T.cols());
  for (int c = 0; c < C.N(); ++c) {
    const SparseMatrix lam = C.column_operator(c).matrix();  // already carries sqrt(a)
    out += lam * T * SparseMatrix(lam.adjoint());
  }
  return out;
}

SparseMatrix psi_map(const RowOperator& C, const SparseMatrix& T) {
  const int m = C.space().spec().m[static_cast<std::size_t>(C.factor())];
  SparseMatrix out(T.rows(), T.cols());
  SparseMatrix iter = T;
  for (int j = 0; j < m; ++j) {
    out += ((j % 2 == 0) ? 1.0 : -1.0) * binomial(m, j + 1) * iter;
    if (j + 1 < m) iter = phi_right(C, iter);
  }
  return out;
}

DualIdentities dual_identities(const RowOperator& C, const CauchyDual& dual) {
  DualIdentities r;
  const SparseMatrix P = dual.dual * SparseMatrix(C.matrix().adjoint());
  const FockSpace& s = C.space();
  const Index d = s.dim();
  std::vector<Triplet> t;
  for (Index idx = 0; idx < s.total_dim(); ++idx)
    if (s.basis().degree(idx % d, C.factor()) > 0) t.emplace_back(idx, idx, 1.0);
  SparseMatrix expected(s.total_dim(), s.total_dim());
  expected.setFromTriplets(t.begin(), t.end());
  r.projection_residual = op_norm(SparseMatrix(P - expected));
  r.idempotency = op_norm(SparseMatrix(P * P - P));
  r.hermiticity = op_norm(SparseMatrix(P - SparseMatrix(P.adjoint())));
  const SparseMatrix D = C.diag(psi_map(C, sparse_identity(s.total_dim())));
  const SparseMatrix M = SparseMatrix(dual.dual - C.matrix() * D) * dual.range_basis;
  r.psi_identity = op_norm(M);
  return r;
}

namespace {

// output degree in factor i of a domain vector
int output_degree(const RowOperator& C, Index domain_index) {
  auto [c, fock] = C.locate(domain_index);
  return C.space().basis().degree(fock % C.space().dim(), C.factor()) + C.columns()[static_cast<std::size_t>(c)].length();
}

SparseMatrix select_columns(const SparseMatrix& m, const std::vector<Index>& cols) {
  std::vector<Triplet> t;
  for (std::size_t p = 0; p < cols.size(); ++p)
    for (SparseMatrix::InnerIterator it(m, cols[p]); it; ++it) t.emplace_back(it.row(), static_cast<Index>(p), it.value());
  SparseMatrix out(m.rows(), static_cast<Index>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

BHResidual bh_residual(const FockOperator& T, int i, double rank_tol, int headroom) {
  const SpacePtr& sp = T.space_ptr();
  const RowOperator C(sp, i);
  const CauchyDual dual = cauchy_dual(C, rank_tol);
  const int bound = sp->trunc()[static_cast<std::size_t>(i)] - headroom;

  std::vector<Index> cols;
  const SparseMatrix& V = dual.range_basis;
  for (Index c = 0; c < V.outerSize(); ++c) {
    SparseMatrix::InnerIterator it(V, c);
    if (it && output_degree(C, it.row()) <= bound) cols.push_back(c);
  }
  const SparseMatrix Vs = select_columns(V, cols);
  const SparseMatrix Vt = Vs.adjoint();
  const SparseMatrix Cd = dual.dual * Vs;
  const SparseMatrix lhs = SparseMatrix(Cd.adjoint()) * T.matrix() * Cd;
  const SparseMatrix rhs = Vt * C.diag(psi_map(C, T.matrix())) * Vs;
  const SparseMatrix diff = lhs - rhs;

  BHResidual r;
  r.factor = i;
  r.headroom = headroom;
  r.range_dim = static_cast<Index>(cols.size());
  if (diff.rows() <= 400) {
    r.residual = op_norm(diff);
    r.exact_norm = true;
  } else {
    r.residual = op_norm_bound(diff);
    r.exact_norm = false;
  }
  return r;
}

nlohmann::json BHScan::to_json() const {
  nlohmann::json j;
  j["satisfied"] = satisfied;
  j["classification"] = classification;
  j["factors"] = nlohmann::json::array();
  for (const auto& f : factors)
    j["factors"].push_back({{"factor", f.factor + 1},
                            {"residual", f.residual},
                            {"residual_is_upper_bound", !f.exact_norm},
                            {"range_dim", f.range_dim},
                            {"headroom", f.headroom}});
  return j;
}

BHScan bh_scan(const FockOperator& T, double tol) {
  BHScan s;
  for (int i = 0; i < T.space().factors(); ++i) {
    s.factors.push_back(bh_residual(T, i));
    if (!(s.factors.back().residual <= tol)) s.satisfied = false;
  }
  if (!s.satisfied)
    s.classification = "BH-violated";
  else
    s.classification = is_multi_toeplitz(T).verdict ? "multi-Toeplitz" : "BH-consistent";
  return s;
}

double homogeneous_commutation_residual(const RowOperator& C, const FockOperator& q, const std::vector<int>& s,
                                        Index* safe_count) {
  const int i = C.factor();
  const int si = s[static_cast<std::size_t>(i)];
  const SparseMatrix& Q = q.matrix();
  const SparseMatrix& M = C.matrix();
  if (si >= 0) {
    const SparseMatrix diff = Q * M - M * C.diag(Q);
    const int L = C.space().trunc()[static_cast<std::size_t>(i)];
    std::vector<Index> cols;
    for (Index u = 0; u < C.domain_dim(); ++u)
      if (output_degree(C, u) + si <= L) cols.push_back(u);
    if (safe_count) *safe_count = static_cast<Index>(cols.size());
    return op_norm(select_columns(diff, cols));
  }
  const SparseMatrix Mt = M.adjoint();
  const SparseMatrix diff = Mt * Q - C.diag(Q) * Mt;
  if (safe_count) *safe_count = diff.cols();
  return op_norm(diff);
}

}  // namespace polytoep
