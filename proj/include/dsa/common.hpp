#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dsa {

/// Users are numbered 1..K, matching the protocol transcripts and reports.
using UserId = int;

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

/// A caller violated a documented precondition (sizes, ranges, mismatched moduli).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& msg) : std::invalid_argument(msg) {}
};

class DivisionByZeroError : public std::domain_error {
 public:
  explicit DivisionByZeroError(const std::string& msg) : std::domain_error(msg) {}
};

class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The field does not admit the requested construction (e.g. fewer than K
/// distinct nonzero evaluation points).
class FieldTooSmallError : public std::runtime_error {
 public:
  explicit FieldTooSmallError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Aggregation is impossible for the requested (K, U, T).
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

class InsufficientSurvivorsError : public std::runtime_error {
 public:
  explicit InsufficientSurvivorsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A matrix that was certified (or claims to be) failed a re-check.
class CertificationError : public std::runtime_error {
 public:
  explicit CertificationError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Small helpers shared across modules
// ---------------------------------------------------------------------------

/// C(n, k), clamped to cap+1 once it exceeds `cap` so callers can bound
/// enumeration work without overflow. Intermediate values stay exact: after
/// step i the accumulator holds C(n-k+i, i), which is increasing in i.
inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t factor = n - k + i;
    if (c > cap || c > std::numeric_limits<std::uint64_t>::max() / factor) return cap + 1;
    c = c * factor / i;
  }
  return c > cap ? cap + 1 : c;
}

inline bool is_sorted_unique(const std::vector<UserId>& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1] >= s[i]) return false;
  }
  return true;
}

inline bool set_contains(const std::vector<UserId>& s, UserId x) {
  return std::binary_search(s.begin(), s.end(), x);
}

/// a subset of b; both sorted unique.
inline bool is_subset(const std::vector<UserId>& a, const std::vector<UserId>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// Checks that `s` is a sorted duplicate-free subset of {1..k_users}.
inline void require_user_set(const std::vector<UserId>& s, int k_users, const std::string& what) {
  if (!is_sorted_unique(s)) {
    throw UsageError(what + ": user set must be sorted and duplicate-free");
  }
  if (!s.empty() && (s.front() < 1 || s.back() > k_users)) {
    throw UsageError(what + ": user ids must lie in [1, " + std::to_string(k_users) + "]");
  }
}

inline std::vector<UserId> set_union(std::vector<UserId> a, const std::vector<UserId>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

inline std::vector<UserId> set_minus(const std::vector<UserId>& a, const std::vector<UserId>& b) {
  std::vector<UserId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::string join_ids(const std::vector<UserId>& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out;
}

/// Runs fn(begin, end) over disjoint chunks of [0, count), on `threads` workers.
/// Workers must not share mutable state; merge results after the join. The
/// first worker exception, if any, is rethrown on the calling thread.
template <typename Fn>
inline void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  const std::size_t chunk = (count + n_workers - 1) / n_workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_workers);
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, &errors, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace dsa
