#include "polytoep/toeplitz.hpp"

#include <cmath>
#include <sstream>

#include "polytoep/errors.hpp"

namespace polytoep {

using nlohmann::json;

namespace {

std::vector<std::vector<int>> words_as_lists(const MultiWord& w) {
  std::vector<std::vector<int>> out;
  for (const auto& p : w.parts) out.push_back(p.letters());
  return out;
}

MultiWord multiword_from_lists(const std::vector<int>& n, const json& j) {
  if (!j.is_array() || j.size() != n.size()) throw FormatError("symbol: multi-word must list one word per factor");
  MultiWord w;
  for (std::size_t i = 0; i < n.size(); ++i) {
    try {
      w.parts.emplace_back(n[i], j[i].get<std::vector<int>>());
    } catch (const DimensionMismatch& e) {
      throw FormatError(std::string("symbol: ") + e.what());
    }
  }
  return w;
}

// per-factor simplified pair of two comparable word indices: (sigma, beta)
std::pair<Index, Index> simplify_words(const WordIndexer& ix, Index u, Index v) {
  if (ix.has_suffix(u, v)) return {ix.prefix(u, ix.length(v)), 0};
  return {0, ix.prefix(v, ix.length(u))};
}

// all comparable (row, col) basis pairs as a cartesian product of per-factor lists
template <class F>
void for_each_comparable(const TruncatedBasis& B, F&& f) {
  std::vector<std::vector<std::pair<Index, Index>>> lists;
  for (int i = 0; i < B.factors(); ++i) lists.push_back(comparable_word_pairs(B.indexer(i)));
  std::vector<std::size_t> pos(lists.size(), 0);
  while (true) {
    Index row = 0, col = 0;
    for (std::size_t i = 0; i < lists.size(); ++i) {
      row += lists[i][pos[i]].first * B.stride(static_cast<int>(i));
      col += lists[i][pos[i]].second * B.stride(static_cast<int>(i));
    }
    f(row, col);
    std::size_t i = lists.size();
    while (i > 0) {
      --i;
      if (++pos[i] < lists[i].size()) break;
      pos[i] = 0;
      if (i == 0) return;
    }
    if (lists.empty()) return;
  }
}

struct Simplified {
  Index row, col;
  double tau_ratio;  // tau(omega,gamma) / tau(s(omega,gamma))
  double tau;        // tau(omega,gamma)
  int length;        // |s(omega,gamma)|
};

Simplified simplify_indices(const FockSpace& s, Index row, Index col) {
  const TruncatedBasis& B = s.basis();
  Simplified out{0, 0, 1.0, 1.0, 0};
  for (int i = 0; i < B.factors(); ++i) {
    const WordIndexer& ix = B.indexer(i);
    const Index u = B.part(row, i), v = B.part(col, i);
    auto [sig, bet] = simplify_words(ix, u, v);
    out.row += sig * B.stride(i);
    out.col += bet * B.stride(i);
    out.length += ix.length(sig) + ix.length(bet);
    const double t = s.tau_factor(i, u, v);
    // tau of a pair in J is 1 / sqrt(b) of its nonempty side
    const double ts = 1.0 / std::sqrt(s.weights().at(i, sig) * s.weights().at(i, bet));
    out.tau *= t;
    out.tau_ratio *= t / ts;
  }
  return out;
}

bool comparable_indices(const TruncatedBasis& B, Index row, Index col) {
  for (int i = 0; i < B.factors(); ++i) {
    const WordIndexer& ix = B.indexer(i);
    const Index u = B.part(row, i), v = B.part(col, i);
    if (!ix.has_suffix(u, v) && !ix.has_suffix(v, u)) return false;
  }
  return true;
}

double norm_scale(const SparseMatrix& m) {
  // exact norm when affordable, otherwise the largest entry, which never exceeds it
  const double n = m.rows() <= 600 ? op_norm(m) : max_abs(m);
  return std::max(1.0, n);
}

}  // namespace

std::vector<std::pair<Index, Index>> comparable_word_pairs(const WordIndexer& ix) {
  std::vector<std::pair<Index, Index>> out;
  for (Index v = 0; v < ix.count(); ++v) {
    // u = sigma v with any sigma that fits
    for (int t = 0; t + ix.length(v) <= ix.max_len(); ++t)
      for (Index r = 0; r < ix.power(t); ++r) out.emplace_back(ix.concat(ix.from_rank(t, r), v), v);
    // u a proper suffix of v
    for (int t = 0; t < ix.length(v); ++t) out.emplace_back(ix.suffix(v, t), v);
  }
  return out;
}

void FourierSymbol::add(const IndexPair& pair, const DenseMatrix& a) {
  if (!pair.in_J()) throw NotComparable("symbol key " + pair.str() + " is not in J");
  if (a.rows() != space_->coeff_dim() || a.cols() != space_->coeff_dim())
    throw DimensionMismatch("symbol coefficient does not match the coefficient space");
  // both sides must fit in the truncation
  space_->basis().index(pair.left);
  space_->basis().index(pair.right);
  auto it = coeffs_.find(pair);
  if (it == coeffs_.end())
    coeffs_.emplace(pair, a);
  else
    it->second += a;
}

const DenseMatrix* FourierSymbol::find(const IndexPair& pair) const {
  auto it = coeffs_.find(pair);
  return it == coeffs_.end() ? nullptr : &it->second;
}

json FourierSymbol::to_json() const {
  json arr = json::array();
  for (const auto& [p, a] : coeffs_) {
    json re = json::array(), im = json::array();
    for (Index r = 0; r < a.rows(); ++r) {
      json rr = json::array(), ri = json::array();
      for (Index c = 0; c < a.cols(); ++c) {
        rr.push_back(a(r, c).real());
        ri.push_back(a(r, c).imag());
      }
      re.push_back(rr);
      im.push_back(ri);
    }
    arr.push_back({{"pair", {{"left", words_as_lists(p.left)}, {"right", words_as_lists(p.right)}}},
                   {"label", p.str()},
                   {"re", re},
                   {"im", im}});
  }
  return arr;
}

FourierSymbol FourierSymbol::from_json(SpacePtr space, const json& j) {
  FourierSymbol sym(space);
  if (!j.is_array()) throw FormatError("symbol: expected a JSON array");
  const auto& n = space->spec().n;
  const int cd = space->coeff_dim();
  try {
    for (const auto& e : j) {
      IndexPair p{multiword_from_lists(n, e.at("pair").at("left")), multiword_from_lists(n, e.at("pair").at("right"))};
      const auto& re = e.at("re");
      const auto& im = e.at("im");
      if (re.size() != static_cast<std::size_t>(cd) || im.size() != static_cast<std::size_t>(cd))
        throw DimensionMismatch("symbol coefficient has " + std::to_string(re.size()) + " rows, coefficient space has " +
                                std::to_string(cd));
      DenseMatrix a(cd, cd);
      for (int r = 0; r < cd; ++r) {
        if (re[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(cd) ||
            im[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(cd))
          throw DimensionMismatch("symbol coefficient is not square of the coefficient dimension");
        for (int c = 0; c < cd; ++c)
          a(r, c) = cplx(re[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>(),
                         im[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>());
      }
      sym.add(p, a);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("symbol: ") + e.what());
  } catch (const TruncationError& e) {
    throw DimensionMismatch(std::string("symbol does not fit the truncation: ") + e.what());
  } catch (const NotComparable& e) {
    throw FormatError(std::string("symbol: ") + e.what());
  }
  return sym;
}

json ToeplitzReport::to_json() const {
  json j;
  j["verdict"] = verdict;
  j["tolerance"] = tolerance;
  j["max_violation"] = max_violation;
  j["structural_violation"] = structural_violation;
  j["scaling_violation"] = scaling_violation;
  j["checked_pairs"] = checked_pairs;
  j["skipped_pairs"] = skipped_pairs;
  if (worst_pair) {
    j["worst_pair"] = {{"omega", worst_pair->first.str()}, {"gamma", worst_pair->second.str()}};
    j["worst_coefficients"] = {worst_coefficients->first, worst_coefficients->second};
  } else {
    j["worst_pair"] = nullptr;
  }
  return j;
}

std::string ToeplitzReport::to_text() const {
  std::ostringstream os;
  os << (verdict ? "multi-Toeplitz" : "NOT multi-Toeplitz") << "\n";
  os << "  max violation        " << max_violation << " (tolerance " << tolerance << ")\n";
  os << "  structural violation " << structural_violation << "\n";
  os << "  scaling violation    " << scaling_violation << "\n";
  os << "  checked entries      " << checked_pairs << ", skipped " << skipped_pairs << "\n";
  if (worst_pair)
    os << "  worst pair           omega=" << worst_pair->first.str() << " gamma=" << worst_pair->second.str()
       << " coefficient (" << worst_coefficients->first << "," << worst_coefficients->second << ")\n";
  return os.str();
}

NotToeplitzError::NotToeplitzError(ToeplitzReport r)
    : std::runtime_error("operator is not weighted multi-Toeplitz (max violation " + std::to_string(r.max_violation) +
                         ")"),
      report(std::move(r)) {}

ToeplitzReport is_multi_toeplitz(const FockOperator& T, double tol) {
  const FockSpace& s = T.space();
  const TruncatedBasis& B = s.basis();
  const Index d = s.dim();
  const int cd = s.coeff_dim();
  const SparseMatrix& m = T.matrix();
  ToeplitzReport r;
  r.tolerance = tol;

  auto note = [&](double v, Index row, Index col) {
    if (v > r.max_violation || (!r.worst_pair && v > 0.0)) {
      r.max_violation = v;
      r.worst_pair = std::make_pair(B.multiword(row % d), B.multiword(col % d));
      r.worst_coefficients = std::make_pair(static_cast<int>(row / d), static_cast<int>(col / d));
    }
  };

  // (a) non-comparable entries vanish
  for (Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      if (comparable_indices(B, it.row() % d, it.col() % d)) continue;
      const double v = std::abs(it.value());
      r.structural_violation = std::max(r.structural_violation, v);
      note(v, it.row(), it.col());
    }

  // (b) scaling along comparable pairs
  const double scale = norm_scale(m);
  Index comparable_count = 0;
  for_each_comparable(B, [&](Index row, Index col) {
    ++comparable_count;
    const Simplified sp = simplify_indices(s, row, col);
    for (int y = 0; y < cd; ++y)
      for (int x = 0; x < cd; ++x) {
        const cplx actual = m.coeff(y * d + row, x * d + col);
        const cplx expected = sp.tau_ratio * m.coeff(y * d + sp.row, x * d + sp.col);
        const double v = std::abs(actual - expected) / scale;
        r.scaling_violation = std::max(r.scaling_violation, v);
        note(v, y * d + row, x * d + col);
      }
  });
  r.checked_pairs = d * d * static_cast<Index>(cd) * cd;
  r.skipped_pairs = 0;
  (void)comparable_count;
  r.verdict = r.max_violation <= tol;
  return r;
}

namespace {

std::vector<int> degree_shift(const TruncatedBasis& B, Index row, Index col) {
  std::vector<int> sv(static_cast<std::size_t>(B.factors()));
  for (int i = 0; i < B.factors(); ++i) sv[static_cast<std::size_t>(i)] = B.degree(row, i) - B.degree(col, i);
  return sv;
}

}  // namespace

FockOperator homogeneous_part(const FockOperator& T, const std::vector<int>& s) {
  const TruncatedBasis& B = T.space().basis();
  if (static_cast<int>(s.size()) != B.factors()) throw DimensionMismatch("degree vector has wrong length");
  const Index d = T.space().dim();
  std::vector<Triplet> t;
  const SparseMatrix& m = T.matrix();
  for (Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it)
      if (degree_shift(B, it.row() % d, it.col() % d) == s) t.emplace_back(it.row(), it.col(), it.value());
  SparseMatrix out(m.rows(), m.cols());
  out.setFromTriplets(t.begin(), t.end());
  return FockOperator(T.space_ptr(), out, "T_s");
}

std::map<std::vector<int>, FockOperator> homogeneous_decomposition(const FockOperator& T) {
  const TruncatedBasis& B = T.space().basis();
  const Index d = T.space().dim();
  std::map<std::vector<int>, std::vector<Triplet>> groups;
  const SparseMatrix& m = T.matrix();
  for (Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it)
      if (it.value() != cplx(0.0)) groups[degree_shift(B, it.row() % d, it.col() % d)].emplace_back(it.row(), it.col(), it.value());
  std::map<std::vector<int>, FockOperator> out;
  for (auto& [sv, t] : groups) {
    SparseMatrix part(m.rows(), m.cols());
    part.setFromTriplets(t.begin(), t.end());
    out.emplace(sv, FockOperator(T.space_ptr(), part, "T_s"));
  }
  return out;
}

FourierSymbol extract_fourier(const FockOperator& T, double tol, double drop_tol) {
  ToeplitzReport rep = is_multi_toeplitz(T, tol);
  if (!rep.verdict) throw NotToeplitzError(rep);
  const FockSpace& s = T.space();
  const TruncatedBasis& B = s.basis();
  const Index d = s.dim();
  const int cd = s.coeff_dim();
  FourierSymbol sym(T.space_ptr());
  for (Index row = 0; row < d; ++row)
    for (Index col = 0; col < d; ++col) {
      bool inJ = true;
      for (int i = 0; i < B.factors() && inJ; ++i) inJ = B.degree(row, i) == 0 || B.degree(col, i) == 0;
      if (!inJ) continue;
      // A = T-block / tau(alpha,beta) with tau = prod 1/sqrt(b_alpha_i b_beta_i)
      const double scale = std::sqrt(s.weight_product(row) * s.weight_product(col));
      DenseMatrix a(cd, cd);
      for (int y = 0; y < cd; ++y)
        for (int x = 0; x < cd; ++x) a(y, x) = scale * T.matrix().coeff(y * d + row, x * d + col);
      if (max_abs(a) <= drop_tol) continue;
      sym.add(IndexPair{B.multiword(row), B.multiword(col)}, a);
    }
  return sym;
}

FockOperator evaluate_symbol(const FourierSymbol& sym, double r) {
  const SpacePtr& sp = sym.space_ptr();
  SparseMatrix acc(sp->total_dim(), sp->total_dim());
  for (const auto& [p, a] : sym.coefficients())
    acc += std::pow(r, p.length()) * monomial(sp, p, a).matrix();
  return FockOperator(sp, acc, "F(rW)");
}

DenseMatrix evaluate_symbol(const FourierSymbol& sym, const DenseTuple& X) {
  const int cd = sym.space().coeff_dim();
  const Index dh = X.dim();
  if (X.spec().n != sym.space().spec().n) throw DimensionMismatch("tuple shape does not match the symbol");
  DenseMatrix out = DenseMatrix::Zero(cd * dh, cd * dh);
  for (const auto& [p, a] : sym.coefficients()) {
    const DenseMatrix xy = X.multi(p.left) * X.multi(p.right).adjoint();
    for (int y = 0; y < cd; ++y)
      for (int x = 0; x < cd; ++x)
        if (a(y, x) != cplx(0.0)) out.block(y * dh, x * dh, dh, dh) += a(y, x) * xy;
  }
  return out;
}

namespace {

template <class Weight>
FockOperator weighted_reconstruct(const FockOperator& T, const std::vector<int>& N, Weight&& w, const char* label) {
  const TruncatedBasis& B = T.space().basis();
  if (static_cast<int>(N.size()) != B.factors()) throw DimensionMismatch("N needs k entries");
  const Index d = T.space().dim();
  std::vector<Triplet> t;
  const SparseMatrix& m = T.matrix();
  for (Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      double weight = 1.0;
      for (int i = 0; i < B.factors(); ++i) {
        const int si = std::abs(B.degree(it.row() % d, i) - B.degree(it.col() % d, i));
        const int Ni = N[static_cast<std::size_t>(i)];
        weight *= si <= Ni ? w(si, Ni) : 0.0;
      }
      if (weight != 0.0) t.emplace_back(it.row(), it.col(), weight * it.value());
    }
  SparseMatrix out(m.rows(), m.cols());
  out.setFromTriplets(t.begin(), t.end());
  return FockOperator(T.space_ptr(), out, label);
}

}  // namespace

FockOperator cesaro_reconstruct(const FockOperator& T, const std::vector<int>& N) {
  return weighted_reconstruct(T, N, [](int s, int n) { return 1.0 - static_cast<double>(s) / (n + 1); }, "Fejer");
}

FockOperator partial_sum_reconstruct(const FockOperator& T, const std::vector<int>& N) {
  return weighted_reconstruct(T, N, [](int, int) { return 1.0; }, "partial sum");
}

FockOperator pluriharmonic_kernel(const FourierSymbol& sym, double r) {
  const FockSpace& s = sym.space();
  const TruncatedBasis& B = s.basis();
  const Index d = s.dim();
  const int cd = s.coeff_dim();
  std::map<std::pair<Index, Index>, const DenseMatrix*> lookup;
  for (const auto& [p, a] : sym.coefficients()) lookup[{B.index(p.left), B.index(p.right)}] = &a;
  std::vector<Triplet> t;
  for_each_comparable(B, [&](Index row, Index col) {
    const Simplified sp = simplify_indices(s, row, col);
    auto it = lookup.find({sp.row, sp.col});
    if (it == lookup.end()) return;
    const double f = sp.tau * std::pow(r, sp.length);
    const DenseMatrix& a = *it->second;
    for (int y = 0; y < cd; ++y)
      for (int x = 0; x < cd; ++x)
        if (a(y, x) != cplx(0.0)) t.emplace_back(y * d + row, x * d + col, f * a(y, x));
  });
  SparseMatrix out(s.total_dim(), s.total_dim());
  out.setFromTriplets(t.begin(), t.end());
  return FockOperator(sym.space_ptr(), out, "Gamma_rG");
}

}  // namespace polytoep
