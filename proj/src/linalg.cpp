#include "polytoep/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "polytoep/errors.hpp"

namespace polytoep {

namespace {

Eigen::VectorXd hermitian_eigenvalues(const DenseMatrix& m) {
  if (m.rows() == 0) return Eigen::VectorXd();
  DenseMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void require_square(Eigen::Index r, Eigen::Index c, const char* what) {
  if (r != c) throw DimensionMismatch(std::string(what) + ": matrix is not square");
}

}  // namespace

PsdResult psd_check(const DenseMatrix& m, double tol) {
  require_square(m.rows(), m.cols(), "psd_check");
  PsdResult r;
  if (m.rows() == 0) return r;
  Eigen::VectorXd ev = hermitian_eigenvalues(m);
  r.min_eigenvalue = ev.minCoeff();
  r.max_eigenvalue = ev.maxCoeff();
  r.psd = r.min_eigenvalue >= -tol * std::max(1.0, r.max_eigenvalue);
  return r;
}

PsdResult psd_check(const SparseMatrix& m, double tol) {
  require_square(m.rows(), m.cols(), "psd_check");
  PsdResult r;
  if (m.rows() == 0) return r;
  HermitianBlocks hb = hermitian_blocks(hermitian_part(m));
  r.min_eigenvalue = hb.lambda_min();
  r.max_eigenvalue = hb.lambda_max();
  r.psd = r.min_eigenvalue >= -tol * std::max(1.0, r.max_eigenvalue);
  return r;
}

double op_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  DenseMatrix g = m.rows() >= m.cols() ? DenseMatrix(m.adjoint() * m) : DenseMatrix(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double op_norm(const SparseMatrix& m) {
  if (m.nonZeros() == 0) return 0.0;
  SparseMatrix g = m.rows() >= m.cols() ? SparseMatrix(m.adjoint() * m) : SparseMatrix(m * m.adjoint());
  return std::sqrt(std::max(0.0, hermitian_blocks(g).lambda_max()));
}

double op_norm_bound(const SparseMatrix& m) {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(m.cols());
  Eigen::VectorXd row = Eigen::VectorXd::Zero(m.rows());
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      col[it.col()] += std::abs(it.value());
      row[it.row()] += std::abs(it.value());
    }
  if (m.nonZeros() == 0) return 0.0;
  return std::sqrt(col.maxCoeff() * row.maxCoeff());
}

double max_abs(const SparseMatrix& m) {
  double out = 0.0;
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

double max_abs(const DenseMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

DenseMatrix herm_sqrt(const DenseMatrix& m, double tol) {
  require_square(m.rows(), m.cols(), "herm_sqrt");
  if (m.rows() == 0) return m;
  DenseMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tol) {
      std::ostringstream os;
      os << "herm_sqrt: eigenvalue " << ev[i] << " below -" << tol;
      throw NotPositiveError(os.str());
    }
    ev[i] = std::sqrt(std::max(0.0, ev[i]));
  }
  const DenseMatrix& v = es.eigenvectors();
  return v * ev.cast<cplx>().asDiagonal() * v.adjoint();
}

RangeInverse pinv_on_range(const DenseMatrix& m, double rank_tol, bool strict) {
  require_square(m.rows(), m.cols(), "pinv_on_range");
  RangeInverse out;
  const Eigen::Index n = m.rows();
  out.pinv = DenseMatrix::Zero(n, n);
  if (n == 0) {
    out.range_basis = DenseMatrix(0, 0);
    return out;
  }
  DenseMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  out.lambda_max = std::max(0.0, ev.maxCoeff());
  out.rank_tol = rank_tol >= 0.0 ? rank_tol : 1e-10 * out.lambda_max;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (strict && ev[i] > out.rank_tol / 10.0 && ev[i] <= out.rank_tol * 10.0) {
      std::ostringstream os;
      os << "eigenvalue " << ev[i] << " within a factor 10 of rank tolerance " << out.rank_tol;
      throw NumericalRankError(os.str());
    }
    if (ev[i] > out.rank_tol) keep.push_back(i);
  }
  out.range_basis = DenseMatrix(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    auto v = es.eigenvectors().col(keep[c]);
    out.range_basis.col(static_cast<Eigen::Index>(c)) = v;
    out.pinv += (v * v.adjoint()) / ev[keep[c]];
  }
  return out;
}

double HermitianBlocks::lambda_min() const {
  double out = dim > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  Eigen::Index covered = 0;
  for (const auto& b : blocks) {
    out = std::min(out, b.values.minCoeff());
    covered += static_cast<Eigen::Index>(b.support.size());
  }
  // indices outside every block are zero rows/columns
  if (covered < dim) out = std::min(out, 0.0);
  return out;
}

double HermitianBlocks::lambda_max() const {
  double out = dim > 0 ? -std::numeric_limits<double>::infinity() : 0.0;
  Eigen::Index covered = 0;
  for (const auto& b : blocks) {
    out = std::max(out, b.values.maxCoeff());
    covered += static_cast<Eigen::Index>(b.support.size());
  }
  if (covered < dim) out = std::max(out, 0.0);
  return out;
}

std::size_t HermitianBlocks::largest_block() const {
  std::size_t out = 0;
  for (const auto& b : blocks) out = std::max(out, b.support.size());
  return out;
}

HermitianBlocks hermitian_blocks(const SparseMatrix& m) {
  require_square(m.rows(), m.cols(), "hermitian_blocks");
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<char> touched(static_cast<std::size_t>(n), 0);
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      if (it.value() == cplx(0.0)) continue;
      touched[static_cast<std::size_t>(it.row())] = touched[static_cast<std::size_t>(it.col())] = 1;
      Eigen::Index a = find(it.row()), b = find(it.col());
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }

  HermitianBlocks out;
  out.dim = n;
  std::vector<Eigen::Index> block_of(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!touched[static_cast<std::size_t>(i)]) continue;
    Eigen::Index root = find(i);
    if (block_of[static_cast<std::size_t>(root)] < 0) {
      block_of[static_cast<std::size_t>(root)] = static_cast<Eigen::Index>(out.blocks.size());
      out.blocks.emplace_back();
    }
    out.blocks[static_cast<std::size_t>(block_of[static_cast<std::size_t>(root)])].support.push_back(i);
  }

  std::vector<Eigen::Index> local(static_cast<std::size_t>(n), -1);
  for (auto& b : out.blocks) {
    const auto sz = static_cast<Eigen::Index>(b.support.size());
    for (Eigen::Index p = 0; p < sz; ++p) local[static_cast<std::size_t>(b.support[static_cast<std::size_t>(p)])] = p;
    DenseMatrix d = DenseMatrix::Zero(sz, sz);
    for (Eigen::Index p = 0; p < sz; ++p)
      for (SparseMatrix::InnerIterator it(m, b.support[static_cast<std::size_t>(p)]); it; ++it)
        if (it.value() != cplx(0.0)) d(local[static_cast<std::size_t>(it.row())], p) = it.value();
    d = 0.5 * (d + d.adjoint());
    if (sz == 1) {
      b.values = Eigen::VectorXd::Constant(1, d(0, 0).real());
      b.vectors = DenseMatrix::Identity(1, 1);
    } else {
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es(d);
      b.values = es.eigenvalues();
      b.vectors = es.eigenvectors();
    }
  }
  return out;
}

SparseMatrix sparse_identity(Eigen::Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

SparseMatrix to_sparse(const DenseMatrix& m, double drop) {
  std::vector<Triplet> t;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (std::abs(m(r, c)) > drop) t.emplace_back(r, c, m(r, c));
  SparseMatrix s(m.rows(), m.cols());
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (Eigen::Index ca = 0; ca < a.outerSize(); ++ca)
    for (SparseMatrix::InnerIterator ia(a, ca); ia; ++ia)
      for (Eigen::Index cb = 0; cb < b.outerSize(); ++cb)
        for (SparseMatrix::InnerIterator ib(b, cb); ib; ++ib)
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix kron(const DenseMatrix& a, const SparseMatrix& b) { return kron(to_sparse(a), b); }

SparseMatrix hermitian_part(const SparseMatrix& m) {
  SparseMatrix adj = m.adjoint();
  return SparseMatrix(0.5 * (m + adj));
}

void write_coo(std::ostream& os, const SparseMatrix& m) {
  std::vector<Triplet> t;
  for (Eigen::Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it)
      if (it.value() != cplx(0.0)) t.emplace_back(it.row(), it.col(), it.value());
  std::sort(t.begin(), t.end(), [](const Triplet& x, const Triplet& y) {
    return x.row() != y.row() ? x.row() < y.row() : x.col() < y.col();
  });
  os << m.rows() << ' ' << m.cols() << ' ' << t.size() << '\n';
  char buf[128];
  for (const auto& e : t) {
    std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n", static_cast<long>(e.row()), static_cast<long>(e.col()),
                  e.value().real(), e.value().imag());
    os << buf;
  }
}

void write_coo(const std::string& path, const SparseMatrix& m) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path + " for writing");
  write_coo(os, m);
}

SparseMatrix read_coo(std::istream& is) {
  long rows = -1, cols = -1, nnz = -1;
  if (!(is >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
    throw FormatError("matrix file: bad header, expected 'rows cols nnz'");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    long r, c;
    double re, im;
    if (!(is >> r >> c >> re >> im)) throw FormatError("matrix file: truncated at entry " + std::to_string(k));
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw FormatError("matrix file: entry (" + std::to_string(r) + "," + std::to_string(c) + ") out of range");
    if (!std::isfinite(re) || !std::isfinite(im)) throw FormatError("matrix file: non-finite entry");
    t.emplace_back(r, c, cplx(re, im));
  }
  std::string extra;
  if (is >> extra) throw FormatError("matrix file: trailing data after " + std::to_string(nnz) + " entries");
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix read_coo(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open matrix file " + path);
  return read_coo(is);
}

}  // namespace polytoep
