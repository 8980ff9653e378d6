#include "polytoep/cpmaps.hpp"

#include <algorithm>

namespace polytoep {

SparseTuple universal_model(const SpacePtr& space) {
  SpacePtr s = with_coeff_dim(space, 1);
  std::vector<std::vector<SparseMatrix>> e(static_cast<std::size_t>(s->factors()));
  for (int i = 0; i < s->factors(); ++i)
    for (int j = 1; j <= s->spec().n[static_cast<std::size_t>(i)]; ++j)
      e[static_cast<std::size_t>(i)].push_back(weighted_left_creation(s, i, j).matrix());
  return SparseTuple(s->spec(), std::move(e));
}

SparseTuple right_universal_model(const SpacePtr& space) {
  SpacePtr s = with_coeff_dim(space, 1);
  std::vector<std::vector<SparseMatrix>> e(static_cast<std::size_t>(s->factors()));
  for (int i = 0; i < s->factors(); ++i)
    for (int j = 1; j <= s->spec().n[static_cast<std::size_t>(i)]; ++j)
      e[static_cast<std::size_t>(i)].push_back(weighted_right_creation(s, i, j).matrix());
  return SparseTuple(reversed_spec(s->spec()), std::move(e));
}

BerezinKernel berezin_kernel(const SpacePtr& fock, const DenseTuple& X, double tol) {
  SpacePtr s = with_coeff_dim(fock, 1);
  const PolydomainSpec& spec = X.spec();
  if (spec.n != s->spec().n || spec.m != s->spec().m) throw DimensionMismatch("tuple and Fock space use different polydomains");
  const TruncatedBasis& B = s->basis();
  const Index dh = X.dim();

  BerezinKernel out;
  out.fock = s;
  out.dim_h = dh;
  out.delta_sqrt = herm_sqrt(defect(X, spec.m), tol);

  // X_{i,w}^* for every word of factor i, built along w = g_j w'
  std::vector<std::vector<DenseMatrix>> star(static_cast<std::size_t>(spec.k));
  for (int i = 0; i < spec.k; ++i) {
    const WordIndexer& ix = B.indexer(i);
    auto& st = star[static_cast<std::size_t>(i)];
    st.resize(static_cast<std::size_t>(ix.count()));
    st[0] = DenseMatrix::Identity(dh, dh);
    for (Index w = 1; w < ix.count(); ++w) {
      const int len = ix.length(w);
      const Index tail = ix.suffix(w, len - 1);
      const int first = static_cast<int>(ix.rank(ix.prefix(w, len - 1))) + 1;
      st[static_cast<std::size_t>(w)] = st[static_cast<std::size_t>(tail)] * X.at(i, first).adjoint();
    }
  }

  out.K = DenseMatrix::Zero(B.size() * dh, dh);
  for (Index beta = 0; beta < B.size(); ++beta) {
    DenseMatrix row = std::sqrt(s->weight_product(beta)) * out.delta_sqrt;
    for (int i = 0; i < spec.k; ++i) row = row * star[static_cast<std::size_t>(i)][static_cast<std::size_t>(B.part(beta, i))];
    out.K.block(beta * dh, 0, dh, dh) = row;
  }

  // I - K^*K = sum_i T_i with 0 <= T_i = I - sum_{j<J_i} C(j+m_i-1, m_i-1) Phi_i^j((id - Phi_i)^{m_i}(I))
  // for pure tuples: dropped rows need j >= J_i = ceil((L_i+1)/deg f_i) factors of f_i.
  for (int i = 0; i < spec.k; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const int L = s->trunc()[iu];
    const int deg = spec.degree(i);
    const int J = (L + 1 + deg - 1) / deg;
    out.tail_terms.push_back(J);
    std::vector<int> p(static_cast<std::size_t>(spec.k), 0);
    p[iu] = spec.m[iu];
    DenseMatrix term = defect(X, p);
    DenseMatrix partial = DenseMatrix::Zero(dh, dh);
    for (int j = 0; j < J; ++j) {
      partial += binomial(j + spec.m[iu] - 1, spec.m[iu] - 1) * term;
      term = phi_map(X, i, term);
    }
    out.tail_bound += op_norm(DenseMatrix(DenseMatrix::Identity(dh, dh) - partial));
  }
  // slack for rounding in the partial sums; when deg f_i = 1 and k = 1 the bound is attained
  out.tail_bound += 1e-12 * spec.k;
  return out;
}

DenseMatrix berezin_transform(const FockOperator& g, const BerezinKernel& kernel) {
  const Index d = kernel.fock->dim();
  if (g.space().dim() != d) throw DimensionMismatch("Berezin transform: operator and kernel use different Fock spaces");
  const int cd = g.space().coeff_dim();
  const Index dh = kernel.dim_h;
  DenseMatrix out = DenseMatrix::Zero(cd * dh, cd * dh);
  const SparseMatrix& m = g.matrix();
  for (Index col = 0; col < m.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      const Index c = it.row() / d, beta = it.row() % d;
      const Index c2 = it.col() / d, beta2 = it.col() % d;
      out.block(c * dh, c2 * dh, dh, dh) += it.value() * kernel.block(beta).adjoint() * kernel.block(beta2);
    }
  return out;
}

double kernel_isometry_defect(const BerezinKernel& kernel) {
  return op_norm(DenseMatrix(kernel.K.adjoint() * kernel.K - DenseMatrix::Identity(kernel.dim_h, kernel.dim_h)));
}

IntertwiningResult intertwining_residual(const BerezinKernel& kernel, const DenseTuple& X) {
  const SpacePtr& s = kernel.fock;
  const TruncatedBasis& B = s->basis();
  const Index dh = kernel.dim_h;
  IntertwiningResult r;
  r.headroom.assign(static_cast<std::size_t>(s->factors()), 1);
  for (int i = 0; i < s->factors(); ++i) {
    const int L = s->trunc()[static_cast<std::size_t>(i)];
    std::vector<Index> rows;
    for (Index beta = 0; beta < B.size(); ++beta)
      if (B.degree(beta, i) < L) rows.push_back(beta);
    r.safe_rows = std::max<Index>(r.safe_rows, static_cast<Index>(rows.size()));
    for (int j = 1; j <= s->spec().n[static_cast<std::size_t>(i)]; ++j) {
      const SparseMatrix wstar = weighted_left_creation(s, i, j).matrix().adjoint();
      const DenseMatrix lhs = kernel.K * X.at(i, j).adjoint();
      const SparseMatrix rhs_op = kron(wstar, sparse_identity(dh));
      const DenseMatrix rhs = rhs_op * kernel.K;
      DenseMatrix diff(static_cast<Index>(rows.size()) * dh, dh);
      for (std::size_t p = 0; p < rows.size(); ++p)
        diff.block(static_cast<Index>(p) * dh, 0, dh, dh) =
            lhs.block(rows[p] * dh, 0, dh, dh) - rhs.block(rows[p] * dh, 0, dh, dh);
      r.residual = std::max(r.residual, op_norm(diff));
    }
  }
  return r;
}

}  // namespace polytoep
