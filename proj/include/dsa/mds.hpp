#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "dsa/common.hpp"
#include "dsa/field.hpp"
#include "dsa/linalg.hpp"

namespace dsa {

/// Exhaustive minor enumeration is capped at this many column subsets; larger
/// parameter sets are rejected at configuration time.
inline constexpr std::uint64_t kMinorEnumerationLimit = 1000000;

inline constexpr int kMdsSearchAttempts = 1000;

/// A certified key-projection code: alpha is U x K, every U x U minor is
/// nonsingular, and the last t_privacy rows form an MDS matrix on their own.
struct PrivateMdsMatrix {
  FpMat alpha;
  FpVec eval_points;      // the K distinct nonzero points the columns evaluate
  std::size_t t_privacy;  // T + 1
};

/// Column k is (1, b_k, b_k^2, ..., b_k^{u_rows-1}); points must be distinct
/// and nonzero.
inline FpMat build_vandermonde(std::size_t u_rows, const FpVec& betas) {
  const std::size_t k_cols = betas.size();
  if (u_rows == 0) throw UsageError("build_vandermonde: need at least one row");
  if (u_rows > k_cols) throw UsageError("build_vandermonde: more rows than evaluation points");
  for (std::size_t i = 0; i < k_cols; ++i) {
    if (betas[i].is_zero()) throw UsageError("build_vandermonde: evaluation points must be nonzero");
    for (std::size_t j = i + 1; j < k_cols; ++j) {
      if (betas[i] == betas[j]) {
        throw UsageError("build_vandermonde: evaluation points must be distinct");
      }
    }
  }
  FpMat m(u_rows, k_cols, betas.modulus());
  for (std::size_t c = 0; c < k_cols; ++c) {
    Fp p(1, betas.modulus());
    for (std::size_t r = 0; r < u_rows; ++r) {
      m.set(r, c, p);
      p = p * betas[c];
    }
  }
  return m;
}

namespace detail {

/// Calls fn(idx) for every size-r subset of {0..n-1}, in lexicographic order,
/// until fn returns false. Returns false iff some call did.
template <typename Fn>
inline bool for_each_combination(std::size_t n, std::size_t r, Fn&& fn) {
  if (r > n) return true;
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  if (r == 0) return fn(idx);
  for (;;) {
    if (!fn(idx)) return false;
    std::size_t i = r;
    for (;;) {
      if (i == 0) return true;
      --i;
      if (idx[i] != i + n - r) break;
    }
    ++idx[i];
    for (std::size_t j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Exhaustive check that every rows x rows column minor is nonsingular.
inline bool is_mds(const FpMat& m) {
  if (m.rows() > m.cols()) throw UsageError("is_mds: matrix must have rows <= cols");
  if (binomial_capped(m.cols(), m.rows(), kMinorEnumerationLimit) > kMinorEnumerationLimit) {
    throw UsageError("is_mds: minor enumeration exceeds limit of " +
                     std::to_string(kMinorEnumerationLimit) + " subsets");
  }
  std::vector<std::size_t> all_rows(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) all_rows[i] = i;
  return detail::for_each_combination(m.cols(), m.rows(), [&](const std::vector<std::size_t>& cols) {
    return is_nonsingular(submatrix(m, all_rows, cols));
  });
}

/// True iff the bottom t_plus_1 rows form an MDS matrix themselves.
inline bool is_t_private(const FpMat& m, std::size_t t_plus_1) {
  if (t_plus_1 == 0 || t_plus_1 > m.rows()) {
    throw UsageError("is_t_private: t_plus_1 must lie in [1, rows]");
  }
  std::vector<std::size_t> bottom(t_plus_1);
  for (std::size_t i = 0; i < t_plus_1; ++i) bottom[i] = m.rows() - t_plus_1 + i;
  std::vector<std::size_t> all_cols(m.cols());
  for (std::size_t i = 0; i < m.cols(); ++i) all_cols[i] = i;
  return is_mds(submatrix(m, bottom, all_cols));
}

/// Full re-check of the certification invariants. Never fails for a matrix
/// returned by find_private_mds; used on import and in acceptance runs.
inline bool recertify(const PrivateMdsMatrix& m) {
  const std::size_t u = m.alpha.rows();
  const std::size_t k = m.alpha.cols();
  if (m.eval_points.size() != k) return false;
  if (m.eval_points.modulus() != m.alpha.modulus()) return false;
  if (m.t_privacy == 0 || m.t_privacy > u) return false;
  for (std::size_t i = 0; i < k; ++i) {
    if (m.eval_points[i].is_zero()) return false;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (m.eval_points[i] == m.eval_points[j]) return false;
    }
  }
  return is_mds(m.alpha) && is_t_private(m.alpha, m.t_privacy);
}

/// Searches for a (T+1)-private MDS matrix over F_q by drawing random distinct
/// nonzero evaluation-point sets and certifying each candidate exhaustively.
inline PrivateMdsMatrix find_private_mds(int k_users, int u_threshold, int t_collusion,
                                         std::uint64_t q, Rng& rng) {
  checked_modulus(q);
  if (k_users < 2) throw UsageError("find_private_mds: need at least 2 users");
  if (t_collusion < 0) throw UsageError("find_private_mds: T must be nonnegative");
  if (u_threshold <= t_collusion + 1) {
    throw InfeasibleError("find_private_mds: infeasible, U <= T+1 (U=" +
                          std::to_string(u_threshold) + ", T=" + std::to_string(t_collusion) +
                          "); aggregation requires U > T+1");
  }
  if (u_threshold >= k_users) throw UsageError("find_private_mds: requires K > U");
  const auto k = static_cast<std::uint64_t>(k_users);
  const auto u = static_cast<std::uint64_t>(u_threshold);
  if (q - 1 < k) {
    throw FieldTooSmallError(
        "find_private_mds: F_" + std::to_string(q) + " has only " + std::to_string(q - 1) +
        " distinct nonzero evaluation points but K=" + std::to_string(k_users) +
        " are required (K=" + std::to_string(k_users) + ", U=" + std::to_string(u_threshold) +
        ", T=" + std::to_string(t_collusion) + ", q=" + std::to_string(q) + ")");
  }
  if (binomial_capped(k, u, kMinorEnumerationLimit) > kMinorEnumerationLimit) {
    throw UsageError("find_private_mds: C(K,U) exceeds the certification limit of " +
                     std::to_string(kMinorEnumerationLimit));
  }

  for (int attempt = 0; attempt < kMdsSearchAttempts; ++attempt) {
    // K distinct nonzero points, uniform over the field.
    FpVec points(q, 0);
    std::vector<std::uint64_t> chosen;
    while (chosen.size() < k) {
      const std::uint64_t p = 1 + rng.below(q - 1);
      if (std::find(chosen.begin(), chosen.end(), p) == chosen.end()) chosen.push_back(p);
    }
    for (std::uint64_t p : chosen) points.append(Fp(p, q));

    FpMat alpha = build_vandermonde(u, points);
    const auto t_plus_1 = static_cast<std::size_t>(t_collusion + 1);
    if (is_mds(alpha) && is_t_private(alpha, t_plus_1)) {
      return PrivateMdsMatrix{std::move(alpha), std::move(points), t_plus_1};
    }
  }
  throw FieldTooSmallError("find_private_mds: no certified matrix after " +
                           std::to_string(kMdsSearchAttempts) + " attempts (K=" +
                           std::to_string(k_users) + ", U=" + std::to_string(u_threshold) +
                           ", T=" + std::to_string(t_collusion) + ", q=" + std::to_string(q) +
                           "); try a larger field");
}

inline std::uint64_t fnv1a64_push(std::uint64_t hash, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    hash ^= (word >> (8 * i)) & 0xFF;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

/// Stable identifier used to pin a transcript to the matrix that produced it.
inline std::string matrix_fingerprint(const PrivateMdsMatrix& m) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  h = fnv1a64_push(h, m.alpha.modulus());
  h = fnv1a64_push(h, m.alpha.rows());
  h = fnv1a64_push(h, m.alpha.cols());
  h = fnv1a64_push(h, m.t_privacy);
  for (std::size_t i = 0; i < m.eval_points.size(); ++i) {
    h = fnv1a64_push(h, m.eval_points[i].value());
  }
  for (std::uint64_t v : m.alpha.raw()) h = fnv1a64_push(h, v);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dsa
