#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "dsa/common.hpp"

namespace dsa {

/// Largest supported modulus; keeps every product of two reduced values inside
/// 64 bits.
inline constexpr std::uint64_t kMaxModulus = 0xFFFFFFFFULL;

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

/// Validates a modulus for field arithmetic and returns it. Protocol-level
/// instantiation additionally requires q odd (see protocol.hpp); q = 2 is
/// accepted here so the entropy oracle can run over tiny fields.
inline std::uint64_t checked_modulus(std::uint64_t q) {
  if (q > kMaxModulus) {
    throw UsageError("modulus " + std::to_string(q) + " exceeds supported maximum " +
                     std::to_string(kMaxModulus));
  }
  if (!is_prime(q)) {
    throw UsageError("modulus " + std::to_string(q) + " is not prime");
  }
  return q;
}

/// An element of the prime field F_q. Value and modulus travel together;
/// mixing moduli in any operation is a usage error.
class Fp {
 public:
  Fp(std::uint64_t value, std::uint64_t q) : q_(q), v_(value % q) {
    if (q < 2) throw UsageError("Fp: modulus must be >= 2");
  }

  std::uint64_t value() const { return v_; }
  std::uint64_t modulus() const { return q_; }
  bool is_zero() const { return v_ == 0; }

  Fp operator+(const Fp& o) const {
    check_same(o, "add");
    std::uint64_t s = v_ + o.v_;
    if (s >= q_) s -= q_;
    return Fp(s, q_, Raw{});
  }

  Fp operator-(const Fp& o) const {
    check_same(o, "sub");
    return Fp(v_ >= o.v_ ? v_ - o.v_ : v_ + q_ - o.v_, q_, Raw{});
  }

  Fp operator-() const { return Fp(v_ == 0 ? 0 : q_ - v_, q_, Raw{}); }

  Fp operator*(const Fp& o) const {
    check_same(o, "mul");
    return Fp((v_ * o.v_) % q_, q_, Raw{});
  }

  Fp operator/(const Fp& o) const { return *this * o.inv(); }

  /// Multiplicative inverse via the extended Euclidean algorithm.
  Fp inv() const {
    if (v_ == 0) {
      throw DivisionByZeroError("Fp::inv: zero has no inverse in F_" + std::to_string(q_));
    }
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(q_);
    std::int64_t new_r = static_cast<std::int64_t>(v_);
    while (new_r != 0) {
      const std::int64_t quot = r / new_r;
      std::int64_t tmp = t - quot * new_t;
      t = new_t;
      new_t = tmp;
      tmp = r - quot * new_r;
      r = new_r;
      new_r = tmp;
    }
    if (t < 0) t += static_cast<std::int64_t>(q_);
    return Fp(static_cast<std::uint64_t>(t), q_, Raw{});
  }

  Fp pow(std::uint64_t e) const {
    Fp base = *this;
    Fp acc(1 % q_, q_, Raw{});
    while (e > 0) {
      if (e & 1) acc = acc * base;
      base = base * base;
      e >>= 1;
    }
    return acc;
  }

  bool operator==(const Fp& o) const { return v_ == o.v_ && q_ == o.q_; }
  bool operator!=(const Fp& o) const { return !(*this == o); }

 private:
  struct Raw {};
  Fp(std::uint64_t v, std::uint64_t q, Raw) : q_(q), v_(v) {}

  void check_same(const Fp& o, const char* op) const {
    if (q_ != o.q_) {
      throw UsageError(std::string("Fp::") + op + ": modulus mismatch (" + std::to_string(q_) +
                       " vs " + std::to_string(o.q_) + ")");
    }
  }

  std::uint64_t q_;
  std::uint64_t v_;
};

/// A vector over one prime field. Stored as raw residues plus the shared
/// modulus; immutable in protocol use (encode/decode build fresh vectors).
class FpVec {
 public:
  explicit FpVec(std::uint64_t q, std::size_t n = 0) : q_(checked_modulus(q)), v_(n, 0) {}

  static FpVec of(std::uint64_t q, std::initializer_list<std::uint64_t> xs) {
    FpVec out(q, xs.size());
    std::size_t i = 0;
    for (std::uint64_t x : xs) out.v_[i++] = x % q;
    return out;
  }

  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  std::uint64_t modulus() const { return q_; }

  Fp operator[](std::size_t i) const {
    check_index(i);
    return Fp(v_[i], q_);
  }

  void set(std::size_t i, std::uint64_t value) {
    check_index(i);
    v_[i] = value % q_;
  }

  void set(std::size_t i, const Fp& x) {
    if (x.modulus() != q_) throw UsageError("FpVec::set: modulus mismatch");
    check_index(i);
    v_[i] = x.value();
  }

  void append(const Fp& x) {
    if (x.modulus() != q_) throw UsageError("FpVec::append: modulus mismatch");
    v_.push_back(x.value());
  }

  FpVec operator+(const FpVec& o) const {
    check_compatible(o, "add");
    FpVec out(q_, size());
    for (std::size_t i = 0; i < size(); ++i) {
      std::uint64_t s = v_[i] + o.v_[i];
      if (s >= q_) s -= q_;
      out.v_[i] = s;
    }
    return out;
  }

  FpVec operator-(const FpVec& o) const {
    check_compatible(o, "sub");
    FpVec out(q_, size());
    for (std::size_t i = 0; i < size(); ++i) {
      out.v_[i] = v_[i] >= o.v_[i] ? v_[i] - o.v_[i] : v_[i] + q_ - o.v_[i];
    }
    return out;
  }

  Fp dot(const FpVec& o) const {
    check_compatible(o, "dot");
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      acc = (acc + v_[i] * o.v_[i]) % q_;
    }
    return Fp(acc, q_);
  }

  bool operator==(const FpVec& o) const { return q_ == o.q_ && v_ == o.v_; }
  bool operator!=(const FpVec& o) const { return !(*this == o); }

  const std::vector<std::uint64_t>& raw() const { return v_; }

 private:
  void check_index(std::size_t i) const {
    if (i >= v_.size()) {
      throw UsageError("FpVec: index " + std::to_string(i) + " out of range (size " +
                       std::to_string(v_.size()) + ")");
    }
  }

  void check_compatible(const FpVec& o, const char* op) const {
    if (q_ != o.q_) throw UsageError(std::string("FpVec::") + op + ": modulus mismatch");
    if (size() != o.size()) throw UsageError(std::string("FpVec::") + op + ": length mismatch");
  }

  std::uint64_t q_;
  std::vector<std::uint64_t> v_;
};

inline FpVec concat(const FpVec& a, const FpVec& b) {
  if (a.modulus() != b.modulus()) throw UsageError("concat: modulus mismatch");
  FpVec out(a.modulus(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) out.append(a[i]);
  for (std::size_t i = 0; i < b.size(); ++i) out.append(b[i]);
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic generator, replayable from a 64-bit seed. Child streams are
/// derived from the original seed, so spawning order never affects them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform value in [0, n). Draws above the largest multiple of n are
  /// rejected, so no residue is favored.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw UsageError("Rng::below: n must be positive");
    const std::uint64_t rem = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = gen_();
      if (rem == 0 || r < 0 - rem) return r % n;
    }
  }

  Fp field_element(std::uint64_t q) { return Fp(below(checked_modulus(q)), q); }

  FpVec field_vector(std::uint64_t q, std::size_t count) {
    FpVec out(q, count);
    for (std::size_t i = 0; i < count; ++i) out.set(i, below(q));
    return out;
  }

  /// Independent child stream; children of the same Rng never collide for
  /// distinct stream ids.
  Rng child(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ + 0x9E3779B97F4A7C15ULL * (stream + 1)));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace dsa
