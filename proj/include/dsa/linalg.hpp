#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsa/common.hpp"
#include "dsa/field.hpp"

namespace dsa {

/// Dense row-major matrix over F_q. Construction fixes the shape; elimination
/// routines work on copies so shared instances stay immutable.
class FpMat {
 public:
  FpMat(std::size_t rows, std::size_t cols, std::uint64_t q)
      : rows_(rows), cols_(cols), q_(checked_modulus(q)), a_(rows * cols, 0) {}

  static FpMat identity(std::size_t n, std::uint64_t q) {
    FpMat m(n, n, q);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  static FpMat from_rows(std::uint64_t q, const std::vector<std::vector<std::uint64_t>>& rows) {
    if (rows.empty()) throw UsageError("FpMat::from_rows: need at least one row");
    FpMat m(rows.size(), rows[0].size(), q);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size()) {
        throw UsageError("FpMat::from_rows: ragged rows");
      }
      for (std::size_t c = 0; c < rows[r].size(); ++c) m.set(r, c, rows[r][c]);
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t modulus() const { return q_; }

  std::uint64_t at(std::size_t r, std::size_t c) const {
    check_index(r, c);
    return a_[r * cols_ + c];
  }

  void set(std::size_t r, std::size_t c, std::uint64_t v) {
    check_index(r, c);
    a_[r * cols_ + c] = v % q_;
  }

  void set(std::size_t r, std::size_t c, const Fp& x) {
    if (x.modulus() != q_) throw UsageError("FpMat::set: modulus mismatch");
    set(r, c, x.value());
  }

  FpVec row(std::size_t r) const {
    FpVec out(q_, cols_);
    for (std::size_t c = 0; c < cols_; ++c) out.set(c, at(r, c));
    return out;
  }

  FpVec col(std::size_t c) const {
    FpVec out(q_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) out.set(r, at(r, c));
    return out;
  }

  void swap_rows(std::size_t r, std::size_t s) {
    check_index(r, 0);
    check_index(s, 0);
    if (r == s) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap(a_[r * cols_ + c], a_[s * cols_ + c]);
  }

  void scale_row(std::size_t r, std::uint64_t factor) {
    check_index(r, 0);
    factor %= q_;
    for (std::size_t c = 0; c < cols_; ++c) a_[r * cols_ + c] = a_[r * cols_ + c] * factor % q_;
  }

  /// row[dst] += factor * row[src]
  void add_scaled_row(std::size_t dst, std::size_t src, std::uint64_t factor) {
    check_index(dst, 0);
    check_index(src, 0);
    factor %= q_;
    for (std::size_t c = 0; c < cols_; ++c) {
      a_[dst * cols_ + c] = (a_[dst * cols_ + c] + factor * a_[src * cols_ + c]) % q_;
    }
  }

  bool operator==(const FpMat& o) const = default;

  const std::vector<std::uint64_t>& raw() const { return a_; }

 private:
  void check_index(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) {
      throw UsageError("FpMat: index (" + std::to_string(r) + "," + std::to_string(c) +
                       ") out of range for " + std::to_string(rows_) + "x" +
                       std::to_string(cols_));
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  std::uint64_t q_;
  std::vector<std::uint64_t> a_;
};

/// Row rank by Gaussian elimination with first-nonzero pivoting. Exact; no
/// pivot-magnitude concerns over a field.
inline std::size_t rank(FpMat m) {
  const std::uint64_t q = m.modulus();
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m.at(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(r, p);
    const std::uint64_t inv = Fp(m.at(r, c), q).inv().value();
    m.scale_row(r, inv);
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      if (m.at(i, c) != 0) m.add_scaled_row(i, r, q - m.at(i, c));
    }
    ++r;
  }
  return r;
}

inline bool is_nonsingular(const FpMat& m) {
  if (m.rows() != m.cols()) throw UsageError("is_nonsingular: matrix must be square");
  return rank(m) == m.rows();
}

/// Solves A x = b for square nonsingular A.
inline FpVec solve(const FpMat& a, const FpVec& b) {
  if (a.rows() != a.cols()) throw UsageError("solve: matrix must be square");
  if (a.modulus() != b.modulus()) throw UsageError("solve: modulus mismatch");
  if (b.size() != a.rows()) throw UsageError("solve: dimension mismatch");
  const std::size_t n = a.rows();
  const std::uint64_t q = a.modulus();

  FpMat m(n, n + 1, q);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m.set(r, c, a.at(r, c));
    m.set(r, n, b[r].value());
  }

  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m.at(p, c) == 0) ++p;
    if (p == n) throw SingularMatrixError("solve: matrix is singular");
    m.swap_rows(c, p);
    m.scale_row(c, Fp(m.at(c, c), q).inv().value());
    for (std::size_t i = 0; i < n; ++i) {
      if (i != c && m.at(i, c) != 0) m.add_scaled_row(i, c, q - m.at(i, c));
    }
  }

  FpVec x(q, n);
  for (std::size_t r = 0; r < n; ++r) x.set(r, m.at(r, n));
  return x;
}

/// Minor selection; both index lists must be strictly increasing and in range.
inline FpMat submatrix(const FpMat& m, std::span<const std::size_t> row_idx,
                       std::span<const std::size_t> col_idx) {
  auto check = [&](std::span<const std::size_t> idx, std::size_t bound, const char* what) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= bound) throw UsageError(std::string("submatrix: ") + what + " index out of range");
      if (i > 0 && idx[i - 1] >= idx[i]) {
        throw UsageError(std::string("submatrix: ") + what + " indices must be strictly increasing");
      }
    }
  };
  check(row_idx, m.rows(), "row");
  check(col_idx, m.cols(), "col");
  FpMat out(row_idx.size(), col_idx.size(), m.modulus());
  for (std::size_t r = 0; r < row_idx.size(); ++r) {
    for (std::size_t c = 0; c < col_idx.size(); ++c) out.set(r, c, m.at(row_idx[r], col_idx[c]));
  }
  return out;
}

inline FpMat submatrix(const FpMat& m, const std::vector<std::size_t>& row_idx,
                       const std::vector<std::size_t>& col_idx) {
  return submatrix(m, std::span<const std::size_t>(row_idx), std::span<const std::size_t>(col_idx));
}

inline FpMat transpose(const FpMat& m) {
  FpMat out(m.cols(), m.rows(), m.modulus());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out.set(c, r, m.at(r, c));
  }
  return out;
}

inline FpMat matmul(const FpMat& a, const FpMat& b) {
  if (a.modulus() != b.modulus()) throw UsageError("matmul: modulus mismatch");
  if (a.cols() != b.rows()) throw UsageError("matmul: dimension mismatch");
  const std::uint64_t q = a.modulus();
  FpMat out(a.rows(), b.cols(), q);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc = (acc + a.at(r, k) * b.at(k, c)) % q;
      out.set(r, c, acc);
    }
  }
  return out;
}

inline FpVec matvec(const FpMat& a, const FpVec& x) {
  if (a.modulus() != x.modulus()) throw UsageError("matvec: modulus mismatch");
  if (a.cols() != x.size()) throw UsageError("matvec: dimension mismatch");
  const std::uint64_t q = a.modulus();
  FpVec out(q, a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::uint64_t acc = 0;
    for (std::size_t c = 0; c < a.cols(); ++c) acc = (acc + a.at(r, c) * x[c].value()) % q;
    out.set(r, acc);
  }
  return out;
}

inline FpMat vstack(const FpMat& a, const FpMat& b) {
  if (a.modulus() != b.modulus()) throw UsageError("vstack: modulus mismatch");
  if (a.cols() != b.cols()) throw UsageError("vstack: column count mismatch");
  FpMat out(a.rows() + b.rows(), a.cols(), a.modulus());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out.set(r, c, a.at(r, c));
  }
  for (std::size_t r = 0; r < b.rows(); ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) out.set(a.rows() + r, c, b.at(r, c));
  }
  return out;
}

}  // namespace dsa
