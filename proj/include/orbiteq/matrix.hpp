#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbiteq {

/// Alphabet symbols are 1-based, matching the usual row/column labels of a
/// transition matrix.
using Symbol = int;

/// A finite word over the alphabet {1..n}. Admissibility is relative to a
/// TransitionMatrix and is checked by the operations that need it.
using Word = std::vector<Symbol>;

enum class MatrixViolation { Malformed, NotSquare, NotBinary, ZeroRowOrColumn, IsPermutation, NotIrreducible };

inline char const *to_string(MatrixViolation v) {
  switch (v) {
  case MatrixViolation::Malformed: return "Malformed";
  case MatrixViolation::NotSquare: return "NotSquare";
  case MatrixViolation::NotBinary: return "NotBinary";
  case MatrixViolation::ZeroRowOrColumn: return "ZeroRowOrColumn";
  case MatrixViolation::IsPermutation: return "IsPermutation";
  case MatrixViolation::NotIrreducible: return "NotIrreducible";
  }
  return "Unknown";
}

class MatrixError : public std::runtime_error {
public:
  MatrixError(MatrixViolation violation, std::string const &detail)
      : std::runtime_error(std::string(to_string(violation)) + ": " + detail), violation_(violation) {}

  MatrixViolation violation() const { return violation_; }

private:
  MatrixViolation violation_;
};

/// Irreducible, non-permutation square 0/1 matrix defining a one-sided
/// topological Markov shift. Instances are only obtainable through
/// validate(), so every TransitionMatrix satisfies the invariants.
class TransitionMatrix {
public:
  static TransitionMatrix validate(std::vector<std::vector<int>> const &raw) {
    int const n = static_cast<int>(raw.size());
    if (n == 0) throw MatrixError(MatrixViolation::NotSquare, "empty matrix");
    for (auto const &row : raw)
      if (static_cast<int>(row.size()) != n)
        throw MatrixError(MatrixViolation::NotSquare, "row length differs from row count");
    TransitionMatrix m;
    m.n_ = n;
    m.bits_.assign(static_cast<std::size_t>(n * n), 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        int v = raw[i][j];
        if (v != 0 && v != 1)
          throw MatrixError(MatrixViolation::NotBinary,
                            "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is not 0/1");
        m.bits_[static_cast<std::size_t>(i * n + j)] = static_cast<std::uint8_t>(v);
      }

    for (int i = 1; i <= n; ++i) {
      bool row_hit = false, col_hit = false;
      for (int j = 1; j <= n; ++j) {
        row_hit = row_hit || m(i, j);
        col_hit = col_hit || m(j, i);
      }
      if (!row_hit) throw MatrixError(MatrixViolation::ZeroRowOrColumn, "row " + std::to_string(i) + " is zero");
      if (!col_hit) throw MatrixError(MatrixViolation::ZeroRowOrColumn, "column " + std::to_string(i) + " is zero");
    }

    bool permutation = true;
    for (int i = 1; i <= n && permutation; ++i) {
      int row_sum = 0, col_sum = 0;
      for (int j = 1; j <= n; ++j) {
        row_sum += m(i, j);
        col_sum += m(j, i);
      }
      permutation = row_sum == 1 && col_sum == 1;
    }
    if (permutation) throw MatrixError(MatrixViolation::IsPermutation, "matrix is a permutation matrix");

    for (int start = 1; start <= n; ++start) {
      std::vector<bool> seen(static_cast<std::size_t>(n + 1), false);
      std::vector<int> stack{start};
      seen[static_cast<std::size_t>(start)] = true;
      while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        for (int j = 1; j <= n; ++j)
          if (m(i, j) && !seen[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = true;
            stack.push_back(j);
          }
      }
      for (int j = 1; j <= n; ++j)
        if (!seen[static_cast<std::size_t>(j)])
          throw MatrixError(MatrixViolation::NotIrreducible,
                            "state " + std::to_string(j) + " unreachable from " + std::to_string(start));
    }
    return m;
  }

  int size() const { return n_; }

  bool operator()(Symbol i, Symbol j) const { return bits_[static_cast<std::size_t>((i - 1) * n_ + (j - 1))] != 0; }

  /// Symbols that may follow i, ascending.
  std::vector<Symbol> followers(Symbol i) const {
    std::vector<Symbol> out;
    for (int j = 1; j <= n_; ++j)
      if ((*this)(i, j)) out.push_back(j);
    return out;
  }

  bool same_row(Symbol i, Symbol j) const {
    for (int k = 1; k <= n_; ++k)
      if ((*this)(i, k) != (*this)(j, k)) return false;
    return true;
  }

  std::vector<std::vector<int>> rows() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n_), std::vector<int>(static_cast<std::size_t>(n_)));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out[i][j] = bits_[static_cast<std::size_t>(i * n_ + j)];
    return out;
  }

  friend bool operator==(TransitionMatrix const &, TransitionMatrix const &) = default;

private:
  TransitionMatrix() = default;
  int n_ = 0;
  std::vector<std::uint8_t> bits_;
};

// ---------------------------------------------------------------------------
// Matrix text format: first line n, then n lines of n characters from {0,1}.

inline std::vector<std::vector<int>> parse_matrix_rows(std::istream &in) {
  std::string line;
  auto next_line = [&](std::string &out) {
    while (std::getline(in, out)) {
      while (!out.empty() && (out.back() == '\r' || out.back() == ' ' || out.back() == '\t')) out.pop_back();
      if (!out.empty()) return true;
    }
    return false;
  };
  if (!next_line(line)) throw MatrixError(MatrixViolation::Malformed, "missing size line");
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(line, &used);
    if (used != line.size()) throw std::invalid_argument("trailing");
  } catch (std::exception const &) {
    throw MatrixError(MatrixViolation::Malformed, "size line is not an integer: '" + line + "'");
  }
  if (n <= 0) throw MatrixError(MatrixViolation::Malformed, "size must be positive");
  std::vector<std::vector<int>> rows;
  for (int i = 0; i < n; ++i) {
    if (!next_line(line)) throw MatrixError(MatrixViolation::Malformed, "expected " + std::to_string(n) + " rows");
    if (static_cast<int>(line.size()) != n)
      throw MatrixError(MatrixViolation::Malformed, "row " + std::to_string(i + 1) + " has wrong length");
    std::vector<int> row;
    for (char c : line) {
      if (c != '0' && c != '1')
        throw MatrixError(MatrixViolation::Malformed, "row " + std::to_string(i + 1) + " has a non-0/1 character");
      row.push_back(c - '0');
    }
    rows.push_back(std::move(row));
  }
  if (next_line(line)) throw MatrixError(MatrixViolation::Malformed, "trailing content after matrix rows");
  return rows;
}

inline TransitionMatrix parse_matrix(std::string const &text) {
  std::istringstream in(text);
  return TransitionMatrix::validate(parse_matrix_rows(in));
}

inline TransitionMatrix load_matrix(std::string const &path) {
  std::ifstream in(path);
  if (!in) throw MatrixError(MatrixViolation::Malformed, "cannot open " + path);
  return TransitionMatrix::validate(parse_matrix_rows(in));
}

inline std::string format_matrix(TransitionMatrix const &a) {
  std::string out = std::to_string(a.size()) + "\n";
  for (auto const &row : a.rows()) {
    for (int v : row) out += static_cast<char>('0' + v);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Words

/// Digit string when the alphabet has at most 9 symbols, comma-separated
/// otherwise. The empty word is written as "-".
inline std::string format_word(Word const &w, int alphabet) {
  if (w.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (alphabet > 9 && i > 0) out += ',';
    out += std::to_string(w[i]);
  }
  return out;
}

inline Word parse_word(std::string const &s, int alphabet) {
  Word w;
  if (s == "-" || s.empty()) return w;
  auto check = [&](Symbol v) {
    if (v < 1 || v > alphabet) throw std::invalid_argument("symbol out of range in word '" + s + "'");
    w.push_back(v);
  };
  if (alphabet <= 9) {
    for (char c : s) {
      if (c < '0' || c > '9') throw std::invalid_argument("bad character in word '" + s + "'");
      check(c - '0');
    }
  } else {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        check(std::stoi(item));
      } catch (std::logic_error const &) {
        throw std::invalid_argument("bad symbol in word '" + s + "'");
      }
    }
  }
  return w;
}

inline bool is_admissible(TransitionMatrix const &a, Word const &w) {
  for (Symbol s : w)
    if (s < 1 || s > a.size()) return false;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (!a(w[i], w[i + 1])) return false;
  return true;
}

/// May `next` follow a history whose last symbol is `last` (0 = no history)?
inline bool may_follow(TransitionMatrix const &a, Symbol last, Symbol next) { return last == 0 || a(last, next); }

inline Word concat(Word a, Word const &b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline bool is_prefix(Word const &prefix, Word const &w) {
  return prefix.size() <= w.size() && std::equal(prefix.begin(), prefix.end(), w.begin());
}

/// All admissible words of length `len`, in lexicographic order.
inline std::vector<Word> admissible_words(TransitionMatrix const &a, int len) {
  std::vector<Word> out;
  if (len < 0) return out;
  if (len == 0) {
    out.emplace_back();
    return out;
  }
  Word cur;
  auto rec = [&](auto &&self) -> void {
    if (static_cast<int>(cur.size()) == len) {
      out.push_back(cur);
      return;
    }
    for (Symbol s = 1; s <= a.size(); ++s) {
      if (!cur.empty() && !a(cur.back(), s)) continue;
      cur.push_back(s);
      self(self);
      cur.pop_back();
    }
  };
  rec(rec);
  return out;
}

/// Admissible extensions of `w` by exactly `extra` symbols (w itself is
/// assumed admissible), lexicographic.
inline std::vector<Word> extensions(TransitionMatrix const &a, Word const &w, int extra) {
  std::vector<Word> out;
  Word cur = w;
  auto rec = [&](auto &&self, int left) -> void {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (Symbol s = 1; s <= a.size(); ++s) {
      if (!cur.empty() && !a(cur.back(), s)) continue;
      cur.push_back(s);
      self(self, left - 1);
      cur.pop_back();
    }
  };
  rec(rec, extra);
  return out;
}

} // namespace orbiteq
