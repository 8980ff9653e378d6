#include "polytoep/freemonoid.hpp"

#include <algorithm>
#include <sstream>

#include "polytoep/errors.hpp"

namespace polytoep {

Word::Word(int alphabet_size, std::vector<int> letters) : n_(alphabet_size), letters_(std::move(letters)) {
  if (n_ < 1) throw DimensionMismatch("alphabet size must be positive");
  for (int l : letters_)
    if (l < 1 || l > n_)
      throw DimensionMismatch("letter " + std::to_string(l) + " outside alphabet of size " + std::to_string(n_));
}

Word Word::concat(const Word& tail) const {
  if (tail.n_ != n_) throw DimensionMismatch("concatenating words over different alphabets");
  Word out = *this;
  out.letters_.insert(out.letters_.end(), tail.letters_.begin(), tail.letters_.end());
  return out;
}

std::string Word::str() const {
  if (letters_.empty()) return "e";
  std::string s;
  for (std::size_t p = 0; p < letters_.size(); ++p) {
    if (p) s += '.';
    s += 'g' + std::to_string(letters_[p]);
  }
  return s;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.n_ <=> b.n_; c != 0) return c;
  if (auto c = a.letters_.size() <=> b.letters_.size(); c != 0) return c;
  return a.letters_ <=> b.letters_;
}

Word generator(int alphabet_size, int j) { return Word(alphabet_size, {j}); }

Word reverse(const Word& w) {
  std::vector<int> l(w.letters().rbegin(), w.letters().rend());
  return Word(w.alphabet_size(), std::move(l));
}

std::optional<Word> right_divides(const Word& gamma, const Word& omega) {
  if (gamma.alphabet_size() != omega.alphabet_size())
    throw DimensionMismatch("right_divides: alphabet mismatch");
  const auto& g = gamma.letters();
  const auto& o = omega.letters();
  if (g.size() > o.size()) return std::nullopt;
  if (!std::equal(g.begin(), g.end(), o.end() - static_cast<std::ptrdiff_t>(g.size()))) return std::nullopt;
  return Word(omega.alphabet_size(), std::vector<int>(o.begin(), o.end() - static_cast<std::ptrdiff_t>(g.size())));
}

MultiWord MultiWord::empty(const std::vector<int>& n) {
  MultiWord w;
  for (int ni : n) w.parts.emplace_back(ni);
  return w;
}

int MultiWord::total_degree() const {
  int d = 0;
  for (const auto& p : parts) d += p.length();
  return d;
}

std::vector<int> MultiWord::degrees() const {
  std::vector<int> d;
  for (const auto& p : parts) d.push_back(p.length());
  return d;
}

std::string MultiWord::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ", ";
    s += parts[i].str();
  }
  return s + ")";
}

std::vector<int> IndexPair::degree_vector() const {
  std::vector<int> s;
  for (int i = 0; i < left.factors(); ++i) s.push_back(left[i].length() - right[i].length());
  return s;
}

bool IndexPair::in_J() const {
  if (left.factors() != right.factors()) return false;
  for (int i = 0; i < left.factors(); ++i)
    if (!left[i].empty() && !right[i].empty()) return false;
  return true;
}

std::string IndexPair::str() const { return left.str() + " ; " + right.str(); }

static void check_shapes(const MultiWord& a, const MultiWord& b) {
  if (a.factors() != b.factors()) throw DimensionMismatch("multi-words with different factor counts");
  for (int i = 0; i < a.factors(); ++i)
    if (a[i].alphabet_size() != b[i].alphabet_size()) throw DimensionMismatch("multi-word alphabet mismatch");
}

bool comparable(const MultiWord& omega, const MultiWord& gamma) {
  check_shapes(omega, gamma);
  for (int i = 0; i < omega.factors(); ++i)
    if (!right_divides(gamma[i], omega[i]) && !right_divides(omega[i], gamma[i])) return false;
  return true;
}

IndexPair simplify(const MultiWord& omega, const MultiWord& gamma) {
  check_shapes(omega, gamma);
  IndexPair out;
  for (int i = 0; i < omega.factors(); ++i) {
    const int n = omega[i].alphabet_size();
    if (auto sigma = right_divides(gamma[i], omega[i])) {
      out.left.parts.push_back(*sigma);
      out.right.parts.emplace_back(n);
    } else if (auto beta = right_divides(omega[i], gamma[i])) {
      out.left.parts.emplace_back(n);
      out.right.parts.push_back(*beta);
    } else {
      throw NotComparable("simplify: " + omega.str() + " and " + gamma.str() + " are not comparable");
    }
  }
  return out;
}

std::vector<Word> enumerate_words(int n, int max_len) {
  if (n < 1 || max_len < 0) throw DimensionMismatch("enumerate_words: need n >= 1, max_len >= 0");
  WordIndexer ix(n, max_len);
  std::vector<Word> out;
  out.reserve(static_cast<std::size_t>(ix.count()));
  for (Index i = 0; i < ix.count(); ++i) out.push_back(ix.word(i));
  return out;
}

WordIndexer::WordIndexer(int n, int max_len) : n_(n), max_len_(max_len) {
  if (n < 1 || max_len < 0) throw DimensionMismatch("WordIndexer: need n >= 1, max_len >= 0");
  pow_.push_back(1);
  offset_.push_back(0);
  for (int d = 0; d <= max_len; ++d) {
    offset_.push_back(offset_.back() + pow_.back());
    pow_.push_back(pow_.back() * n);
  }
  length_.resize(static_cast<std::size_t>(count()));
  for (int d = 0; d <= max_len; ++d)
    std::fill(length_.begin() + offset_[static_cast<std::size_t>(d)],
              length_.begin() + offset_[static_cast<std::size_t>(d) + 1], d);
}

Index WordIndexer::index(const Word& w) const {
  if (w.alphabet_size() != n_) throw DimensionMismatch("word alphabet does not match indexer");
  if (w.length() > max_len_)
    throw TruncationError("word " + w.str() + " longer than truncation " + std::to_string(max_len_));
  Index r = 0;
  for (int l : w.letters()) r = r * n_ + (l - 1);
  return from_rank(w.length(), r);
}

Word WordIndexer::word(Index idx) const {
  if (idx < 0 || idx >= count()) throw TruncationError("word index out of range");
  const int len = length(idx);
  Index r = rank(idx);
  std::vector<int> l(static_cast<std::size_t>(len));
  for (int p = len - 1; p >= 0; --p) {
    l[static_cast<std::size_t>(p)] = static_cast<int>(r % n_) + 1;
    r /= n_;
  }
  return Word(n_, std::move(l));
}

Index WordIndexer::concat(Index u, Index v) const {
  const int len = length(u) + length(v);
  if (len > max_len_) return -1;
  return from_rank(len, rank(u) * power(length(v)) + rank(v));
}

Index WordIndexer::reverse(Index idx) const {
  const int len = length(idx);
  Index r = rank(idx), out = 0;
  for (int p = 0; p < len; ++p) {
    out = out * n_ + r % n_;
    r /= n_;
  }
  return from_rank(len, out);
}

TruncatedBasis::TruncatedBasis(std::vector<int> n, std::vector<int> trunc) : n_(std::move(n)), trunc_(std::move(trunc)) {
  if (n_.empty() || n_.size() != trunc_.size())
    throw DimensionMismatch("TruncatedBasis: n and trunc must be nonempty and of equal length");
  for (std::size_t i = 0; i < n_.size(); ++i) idx_.emplace_back(n_[i], trunc_[i]);
  stride_.assign(n_.size(), 1);
  for (std::size_t i = n_.size() - 1; i > 0; --i) stride_[i - 1] = stride_[i] * idx_[i].count();
  size_ = stride_[0] * idx_[0].count();
}

Index TruncatedBasis::index(const MultiWord& w) const {
  if (w.factors() != factors()) throw DimensionMismatch("multi-word has wrong number of factors");
  Index out = 0;
  for (int i = 0; i < factors(); ++i) out += indexer(i).index(w[i]) * stride(i);
  return out;
}

MultiWord TruncatedBasis::multiword(Index idx) const {
  if (idx < 0 || idx >= size_) throw TruncationError("basis index out of range");
  MultiWord w;
  for (int i = 0; i < factors(); ++i) w.parts.push_back(indexer(i).word(part(idx, i)));
  return w;
}

int TruncatedBasis::total_degree(Index idx) const {
  int d = 0;
  for (int i = 0; i < factors(); ++i) d += degree(idx, i);
  return d;
}

Index multiword_index(const MultiWord& w, const std::vector<int>& trunc) {
  std::vector<int> n;
  for (const auto& p : w.parts) n.push_back(p.alphabet_size());
  return TruncatedBasis(n, trunc).index(w);
}

MultiWord multiword_from_index(Index idx, const std::vector<int>& n, const std::vector<int>& trunc) {
  return TruncatedBasis(n, trunc).multiword(idx);
}

}  // namespace polytoep
