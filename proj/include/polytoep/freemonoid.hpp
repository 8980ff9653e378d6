#pragma once

// Words over free semigroups, multi-words and the right-divisibility order,
// plus graded-lexicographic indexing of truncated bases.

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace polytoep {

using Index = std::ptrdiff_t;

// Word over generators g_1..g_n. Letters are 1-based; the empty word is g_0.
class Word {
 public:
  Word() = default;
  explicit Word(int alphabet_size, std::vector<int> letters = {});

  int alphabet_size() const { return n_; }
  int length() const { return static_cast<int>(letters_.size()); }
  bool empty() const { return letters_.empty(); }
  const std::vector<int>& letters() const { return letters_; }
  int operator[](int pos) const { return letters_[static_cast<std::size_t>(pos)]; }

  // this followed by tail
  Word concat(const Word& tail) const;
  // "g1.g2", or "e" for the empty word
  std::string str() const;

  // graded-lexicographic: shorter words first
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);
  friend bool operator==(const Word& a, const Word& b) = default;

 private:
  int n_ = 1;
  std::vector<int> letters_;
};

Word generator(int alphabet_size, int j);
Word reverse(const Word& w);

// sigma with omega = sigma * gamma, if gamma is a suffix of omega.
std::optional<Word> right_divides(const Word& gamma, const Word& omega);

struct MultiWord {
  std::vector<Word> parts;

  MultiWord() = default;
  explicit MultiWord(std::vector<Word> p) : parts(std::move(p)) {}
  static MultiWord empty(const std::vector<int>& n);

  int factors() const { return static_cast<int>(parts.size()); }
  int total_degree() const;
  std::vector<int> degrees() const;
  const Word& operator[](int i) const { return parts[static_cast<std::size_t>(i)]; }
  Word& operator[](int i) { return parts[static_cast<std::size_t>(i)]; }
  std::string str() const;

  friend auto operator<=>(const MultiWord&, const MultiWord&) = default;
  friend bool operator==(const MultiWord&, const MultiWord&) = default;
};

// (alpha, beta) pair. Elements of J have at most one nonempty side per factor.
struct IndexPair {
  MultiWord left;
  MultiWord right;

  std::vector<int> degree_vector() const;  // |left_i| - |right_i|
  int length() const { return left.total_degree() + right.total_degree(); }
  bool in_J() const;
  std::string str() const;

  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

bool comparable(const MultiWord& omega, const MultiWord& gamma);
// Throws NotComparable.
IndexPair simplify(const MultiWord& omega, const MultiWord& gamma);

// All words of length <= max_len in graded-lexicographic order.
std::vector<Word> enumerate_words(int n, int max_len);

// Index arithmetic on the words of length <= max_len over n letters.
// index = (number of shorter words) + rank, rank = base-n value of (letters - 1).
class WordIndexer {
 public:
  WordIndexer() = default;
  WordIndexer(int n, int max_len);

  int alphabet_size() const { return n_; }
  int max_len() const { return max_len_; }
  Index count() const { return offset_.back(); }

  Index index(const Word& w) const;  // throws TruncationError
  Word word(Index idx) const;
  int length(Index idx) const { return length_[static_cast<std::size_t>(idx)]; }
  Index rank(Index idx) const { return idx - offset_[static_cast<std::size_t>(length(idx))]; }
  Index from_rank(int len, Index rank) const { return offset_[static_cast<std::size_t>(len)] + rank; }
  Index power(int t) const { return pow_[static_cast<std::size_t>(t)]; }

  // last t letters of the word at idx
  Index suffix(Index idx, int t) const { return from_rank(t, rank(idx) % power(t)); }
  // word with the last t letters removed
  Index prefix(Index idx, int t) const { return from_rank(length(idx) - t, rank(idx) / power(t)); }
  // true when v is a suffix of u (u >=_r v)
  bool has_suffix(Index u, Index v) const {
    const int t = length(v);
    return t <= length(u) && rank(u) % power(t) == rank(v);
  }
  // u followed by v; -1 when the result leaves the table
  Index concat(Index u, Index v) const;
  Index reverse(Index idx) const;

 private:
  int n_ = 1;
  int max_len_ = 0;
  std::vector<Index> offset_;  // offset_[d] = number of words shorter than d; offset_[max_len+1] = count
  std::vector<Index> pow_;     // n^t
  std::vector<int> length_;
};

// Tensor basis of the truncated Fock space: the index is mixed-radix with the
// last factor varying fastest, so operators on one factor ampliate as Kronecker
// products I x .. x A x .. x I.
class TruncatedBasis {
 public:
  TruncatedBasis() = default;
  TruncatedBasis(std::vector<int> n, std::vector<int> trunc);

  int factors() const { return static_cast<int>(n_.size()); }
  const std::vector<int>& alphabet_sizes() const { return n_; }
  const std::vector<int>& trunc() const { return trunc_; }
  Index size() const { return size_; }
  const WordIndexer& indexer(int i) const { return idx_[static_cast<std::size_t>(i)]; }
  Index stride(int i) const { return stride_[static_cast<std::size_t>(i)]; }

  Index index(const MultiWord& w) const;  // throws TruncationError / DimensionMismatch
  MultiWord multiword(Index idx) const;

  // word index of factor i for basis vector idx
  Index part(Index idx, int i) const { return (idx / stride(i)) % indexer(i).count(); }
  int degree(Index idx, int i) const { return indexer(i).length(part(idx, i)); }
  int total_degree(Index idx) const;
  // replace factor i's word
  Index with_part(Index idx, int i, Index word) const {
    return idx + (word - part(idx, i)) * stride(i);
  }

 private:
  std::vector<int> n_;
  std::vector<int> trunc_;
  std::vector<WordIndexer> idx_;
  std::vector<Index> stride_;
  Index size_ = 0;
};

Index multiword_index(const MultiWord& w, const std::vector<int>& trunc);
MultiWord multiword_from_index(Index idx, const std::vector<int>& n, const std::vector<int>& trunc);

}  // namespace polytoep
