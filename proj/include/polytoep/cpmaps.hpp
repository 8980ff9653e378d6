#pragma once

// Completely positive maps Phi_{f_i,X_i}, defect operators, membership and
// purity tests, and the Berezin kernel/transform of a pure tuple.
// Tuples are templated on the matrix type so the universal model (sparse,
// on the Fock space) and small test tuples (dense) share the same code.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "polytoep/errors.hpp"
#include "polytoep/linalg.hpp"
#include "polytoep/model.hpp"
#include "polytoep/weights.hpp"

namespace polytoep {

namespace detail {
template <class Matrix>
Matrix identity_like(Index n);
template <>
inline DenseMatrix identity_like<DenseMatrix>(Index n) { return DenseMatrix::Identity(n, n); }
template <>
inline SparseMatrix identity_like<SparseMatrix>(Index n) { return sparse_identity(n); }

inline double min_eigenvalue(const DenseMatrix& m, double& norm) {
  PsdResult r = psd_check(m, 0.0);
  norm = std::max(std::abs(r.min_eigenvalue), std::abs(r.max_eigenvalue));
  return r.min_eigenvalue;
}
inline double min_eigenvalue(const SparseMatrix& m, double& norm) {
  PsdResult r = psd_check(m, 0.0);
  norm = std::max(std::abs(r.min_eigenvalue), std::abs(r.max_eigenvalue));
  return r.min_eigenvalue;
}
}  // namespace detail

template <class Matrix>
class OperatorTuple {
 public:
  // entries[i][j-1] = X_{i,j}
  OperatorTuple(PolydomainSpec spec, std::vector<std::vector<Matrix>> entries, bool check_commutation = true)
      : spec_(std::move(spec)), entries_(std::move(entries)) {
    spec_.validate();
    if (static_cast<int>(entries_.size()) != spec_.k) throw DimensionMismatch("tuple needs one entry list per factor");
    dim_ = -1;
    for (int i = 0; i < spec_.k; ++i) {
      const auto& f = entries_[static_cast<std::size_t>(i)];
      if (static_cast<int>(f.size()) != spec_.n[static_cast<std::size_t>(i)])
        throw DimensionMismatch("factor " + std::to_string(i + 1) + " needs n_i operators");
      for (const auto& x : f) {
        if (x.rows() != x.cols()) throw DimensionMismatch("tuple entries must be square");
        if (dim_ < 0) dim_ = x.rows();
        if (x.rows() != dim_) throw DimensionMismatch("tuple entries act on different spaces");
      }
    }
    if (check_commutation) {
      for (int p = 0; p < spec_.k; ++p)
        for (int q = p + 1; q < spec_.k; ++q)
          for (const auto& a : entries_[static_cast<std::size_t>(p)])
            for (const auto& b : entries_[static_cast<std::size_t>(q)])
              commutator_norm_ = std::max(commutator_norm_, static_cast<double>(Matrix(a * b - b * a).norm()));
      commutation_checked_ = true;
      if (commutator_norm_ > 1e-10) {
        std::ostringstream os;
        os << "entries of different factors do not commute (Frobenius norm " << commutator_norm_ << ")";
        throw DimensionMismatch(os.str());
      }
    }
  }

  const PolydomainSpec& spec() const { return spec_; }
  Index dim() const { return dim_; }
  int factors() const { return spec_.k; }
  const Matrix& at(int i, int j) const { return entries_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)]; }
  bool commutation_checked() const { return commutation_checked_; }
  double commutator_norm() const { return commutator_norm_; }

  // X_{i,alpha} = X_{i,a_1} ... X_{i,a_p}
  Matrix word(int i, const Word& alpha) const {
    Matrix out = detail::identity_like<Matrix>(dim_);
    for (int l : alpha.letters()) out = Matrix(out * at(i, l));
    return out;
  }
  // X_alpha = X_{1,alpha_1} ... X_{k,alpha_k}
  Matrix multi(const MultiWord& w) const {
    Matrix out = detail::identity_like<Matrix>(dim_);
    for (int i = 0; i < factors(); ++i)
      if (!w[i].empty()) out = Matrix(out * word(i, w[i]));
    return out;
  }

  OperatorTuple scaled(double r) const {
    auto e = entries_;
    for (auto& f : e)
      for (auto& x : f) x = Matrix(r * x);
    OperatorTuple out(spec_, std::move(e), false);
    out.commutation_checked_ = commutation_checked_;
    out.commutator_norm_ = r * r * commutator_norm_;
    return out;
  }

 private:
  PolydomainSpec spec_;
  std::vector<std::vector<Matrix>> entries_;
  Index dim_ = 0;
  bool commutation_checked_ = false;
  double commutator_norm_ = 0.0;
};

using DenseTuple = OperatorTuple<DenseMatrix>;
using SparseTuple = OperatorTuple<SparseMatrix>;

// (W_{i,j}) on the truncated Fock space (coefficient space ignored)
SparseTuple universal_model(const SpacePtr& space);
// (Lambda_{i,j}), a tuple for the reversed spec
SparseTuple right_universal_model(const SpacePtr& space);

// sum_alpha a_{i,alpha} X_{i,alpha} Y X_{i,alpha}^*
template <class Matrix>
Matrix phi_map(const OperatorTuple<Matrix>& X, int i, const Matrix& Y) {
  if (Y.rows() != X.dim() || Y.cols() != X.dim()) throw DimensionMismatch("phi_map: Y has the wrong size");
  if (i < 0 || i >= X.factors()) throw DimensionMismatch("phi_map: factor out of range");
  Matrix out(Y.rows(), Y.cols());
  out.setZero();
  for (const auto& [w, a] : X.spec().coeffs[static_cast<std::size_t>(i)]) {
    if (a == 0.0) continue;
    const Matrix xa = X.word(i, w);
    out = Matrix(out + a * Matrix(xa * Y * Matrix(xa.adjoint())));
  }
  return out;
}

template <class Matrix>
Matrix phi_power(const OperatorTuple<Matrix>& X, int i, int p, Matrix Y) {
  for (int t = 0; t < p; ++t) Y = phi_map(X, i, Y);
  return Y;
}

// (id - Phi_1)^{p_1} o ... o (id - Phi_k)^{p_k} applied to Y
template <class Matrix>
Matrix defect_of(const OperatorTuple<Matrix>& X, const std::vector<int>& p, Matrix Y) {
  if (static_cast<int>(p.size()) != X.factors()) throw DimensionMismatch("defect: p needs k entries");
  for (int i = X.factors() - 1; i >= 0; --i) {
    if (p[static_cast<std::size_t>(i)] < 0) throw DimensionMismatch("defect: negative power");
    for (int t = 0; t < p[static_cast<std::size_t>(i)]; ++t) Y = Matrix(Y - phi_map(X, i, Y));
  }
  return Y;
}

template <class Matrix>
Matrix defect(const OperatorTuple<Matrix>& X, const std::vector<int>& p) {
  return defect_of(X, p, detail::identity_like<Matrix>(X.dim()));
}

struct MembershipResult {
  bool member = true;
  std::vector<int> witness_p;  // multi-power with the most negative eigenvalue
  double witness_eigenvalue = 0.0;
};

// every defect with 0 <= p <= m has lambda_min >= -tol (1 + ||defect||)
template <class Matrix>
MembershipResult is_member(const OperatorTuple<Matrix>& X, double tol) {
  MembershipResult r;
  const auto& m = X.spec().m;
  std::vector<int> p(m.size(), 0);
  bool first = true;
  while (true) {
    double norm = 0.0;
    const double lo = detail::min_eigenvalue(defect(X, p), norm);
    if (first || lo < r.witness_eigenvalue) {
      r.witness_eigenvalue = lo;
      r.witness_p = p;
      first = false;
    }
    if (lo < -tol * (1.0 + norm)) r.member = false;
    std::size_t i = 0;
    while (i < p.size() && p[i] == m[i]) p[i++] = 0;
    if (i == p.size()) break;
    ++p[i];
  }
  return r;
}

struct PurityResult {
  bool pure = true;
  std::vector<int> power_reached;   // first p with ||Phi_i^p(I)|| < tol, or -1
  std::vector<double> final_norm;   // ||Phi_i^p(I)|| at that p (or at the cap)
  std::vector<double> decay_rate;   // ||Phi_i^p(I)||^{1/p}, a spectral-radius estimate
};

template <class Matrix>
PurityResult is_pure(const OperatorTuple<Matrix>& X, int power_cap, double tol) {
  PurityResult r;
  for (int i = 0; i < X.factors(); ++i) {
    Matrix Y = detail::identity_like<Matrix>(X.dim());
    int reached = -1;
    double norm = 1.0;
    int p = 0;
    while (p < power_cap) {
      Y = phi_map(X, i, Y);
      ++p;
      norm = op_norm(Y);
      if (norm < tol) {
        reached = p;
        break;
      }
    }
    r.power_reached.push_back(reached);
    r.final_norm.push_back(norm);
    r.decay_rate.push_back(p > 0 ? std::pow(norm, 1.0 / p) : 1.0);
    if (reached < 0) r.pure = false;
  }
  return r;
}

struct BerezinKernel {
  SpacePtr fock;          // scalar Fock space providing basis and weights
  Index dim_h = 0;
  DenseMatrix K;          // rows: basis index * dim_h + h
  DenseMatrix delta_sqrt;
  std::vector<int> tail_terms;  // J_i: number of kept terms of the binomial series per factor
  double tail_bound = 0.0;      // upper bound on ||I - K^* K|| for pure tuples

  // block row beta (dim_h x dim_h)
  DenseMatrix block(Index beta) const { return K.block(beta * dim_h, 0, dim_h, dim_h); }
};

BerezinKernel berezin_kernel(const SpacePtr& fock, const DenseTuple& X, double tol = 1e-10);

// (I (x) K^*)(g (x) I_H)(I (x) K) on K (x) H, coefficient index most significant
DenseMatrix berezin_transform(const FockOperator& g, const BerezinKernel& kernel);

double kernel_isometry_defect(const BerezinKernel& kernel);  // ||K^*K - I||

struct IntertwiningResult {
  double residual = 0.0;       // max over (i,j)
  Index safe_rows = 0;         // basis rows used
  std::vector<int> headroom;   // per factor degree headroom required
};
// ||K X_{i,j}^* - (W_{i,j}^* (x) I) K|| on rows whose degree in factor i is < L_i
IntertwiningResult intertwining_residual(const BerezinKernel& kernel, const DenseTuple& X);

}  // namespace polytoep
