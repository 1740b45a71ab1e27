#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsa/common.hpp"
#include "dsa/entropy.hpp"
#include "dsa/field.hpp"
#include "dsa/keys.hpp"
#include "dsa/mds.hpp"
#include "dsa/protocol.hpp"

namespace dsa {

/// Which users survive each round. u2 is a subset of u1 and both must reach
/// the survivor threshold.
struct DropoutSchedule {
  std::vector<UserId> u1;
  std::vector<UserId> u2;

  bool operator==(const DropoutSchedule&) const = default;
};

inline void validate_schedule(int k_users, int u_threshold, const DropoutSchedule& s) {
  require_user_set(s.u1, k_users, "schedule: u1");
  require_user_set(s.u2, k_users, "schedule: u2");
  if (!is_subset(s.u2, s.u1)) throw UsageError("schedule: u2 must be a subset of u1");
  if (static_cast<int>(s.u2.size()) < u_threshold) {
    throw UsageError("schedule: |u2| = " + std::to_string(s.u2.size()) +
                     " is below the survivor threshold U = " + std::to_string(u_threshold));
  }
}

namespace detail {

inline std::vector<UserId> users_of_mask(std::uint32_t mask, int k_users) {
  std::vector<UserId> out;
  for (int k = 1; k <= k_users; ++k) {
    if (mask & (1u << (k - 1))) out.push_back(k);
  }
  return out;
}

}  // namespace detail

/// All survivor sets of size >= u_threshold, ascending by bitmask.
inline std::vector<std::vector<UserId>> enumerate_survivor_sets(int k_users, int u_threshold) {
  if (k_users < 1 || k_users > 12) {
    throw UsageError("enumerate_survivor_sets: exhaustive enumeration supports K in [1, 12]");
  }
  std::vector<std::vector<UserId>> out;
  for (std::uint32_t mask = 0; mask < (1u << k_users); ++mask) {
    if (__builtin_popcount(mask) >= u_threshold) {
      out.push_back(detail::users_of_mask(mask, k_users));
    }
  }
  return out;
}

/// Every valid (u1, u2) pair for the given threshold.
inline std::vector<DropoutSchedule> enumerate_schedules(int k_users, int u_threshold) {
  if (u_threshold < 1) throw UsageError("enumerate_schedules: U must be positive");
  std::vector<DropoutSchedule> out;
  for (const auto& u1 : enumerate_survivor_sets(k_users, u_threshold)) {
    std::uint32_t u1_mask = 0;
    for (UserId k : u1) u1_mask |= 1u << (k - 1);
    // Walk the subsets of u1_mask.
    for (std::uint32_t sub = u1_mask;; sub = (sub - 1) & u1_mask) {
      if (__builtin_popcount(sub) >= u_threshold) {
        out.push_back(DropoutSchedule{u1, detail::users_of_mask(sub, k_users)});
      }
      if (sub == 0) break;
    }
  }
  return out;
}

inline std::vector<DropoutSchedule> enumerate_schedules(const ProtocolParams& p) {
  return enumerate_schedules(p.k_users, p.u_threshold);
}

namespace detail {

inline std::vector<UserId> random_subset(const std::vector<UserId>& pool, std::size_t size,
                                         Rng& rng) {
  std::vector<UserId> shuffled = pool;
  for (std::size_t i = 0; i < size; ++i) {
    std::swap(shuffled[i], shuffled[i + rng.below(shuffled.size() - i)]);
  }
  std::vector<UserId> out(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(size));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// A uniformly sized random valid schedule; used when exhaustive enumeration
/// is too large.
inline DropoutSchedule random_schedule(int k_users, int u_threshold, Rng& rng) {
  if (u_threshold < 1 || u_threshold > k_users) {
    throw UsageError("random_schedule: U must lie in [1, K]");
  }
  std::vector<UserId> all(static_cast<std::size_t>(k_users));
  for (int k = 1; k <= k_users; ++k) all[k - 1] = k;
  const std::size_t size1 =
      static_cast<std::size_t>(u_threshold) +
      rng.below(static_cast<std::uint64_t>(k_users - u_threshold + 1));
  const std::vector<UserId> u1 = detail::random_subset(all, size1, rng);
  const std::size_t size2 =
      static_cast<std::size_t>(u_threshold) +
      rng.below(static_cast<std::uint64_t>(size1) - u_threshold + 1);
  return DropoutSchedule{u1, detail::random_subset(u1, size2, rng)};
}

struct RunOptions {
  bool verify_decode_subsets = false;
  bool reveal_keys = false;
  DealOptions deal;
};

/// Round-1 broadcast of one user, blocks concatenated.
struct XRecord {
  UserId sender = 0;
  FpVec x;
};

/// Round-2 broadcast of one surviving user: one symbol per block.
struct YRecord {
  UserId sender = 0;
  std::vector<UserId> survivor_set;
  FpVec y;
};

/// Per-block dealer output; serialized only on explicit request since it
/// reveals every secret of the run.
struct KeySecrets {
  std::vector<KeyMaterial> blocks;
};

struct Transcript {
  ProtocolParams params;
  DropoutSchedule schedule;
  std::uint64_t seed = 0;
  std::vector<XRecord> x_messages;                 // all K users (delayed availability)
  std::vector<YRecord> y_messages;                 // every k in u1
  std::vector<std::pair<UserId, FpVec>> decoded;   // every u in u2, ascending
  FpVec plaintext_sum;                             // oracle: sum of W_k over u1
  std::string matrix_ref;
  std::optional<KeySecrets> keys;

  Transcript() : plaintext_sum(2, 0) {}
};

namespace detail {

inline FpVec slice(const FpVec& v, std::size_t begin, std::size_t len) {
  FpVec out(v.modulus(), len);
  for (std::size_t i = 0; i < len; ++i) out.set(i, v[begin + i]);
  return out;
}

}  // namespace detail

/// Runs one full two-round instance under the given dropout schedule. The
/// master seed splits into an input stream and a key stream; every block uses
/// fresh key material. Deterministic: identical arguments give a bit-identical
/// transcript.
inline Transcript run_instance(const ProtocolParams& params, const PrivateMdsMatrix& alpha,
                               const DropoutSchedule& schedule, std::uint64_t seed,
                               const RunOptions& opts = {}) {
  check_matrix_for_params(params, alpha);
  validate_schedule(params.k_users, params.u_threshold, schedule);

  const std::uint64_t q = params.q;
  const auto block_len = static_cast<std::size_t>(params.block_len);
  const auto blocks = static_cast<std::size_t>(params.blocks);
  const std::size_t total_len = block_len * blocks;

  Rng master(seed);
  Rng input_rng = master.child(0);
  Rng key_rng = master.child(1);

  std::vector<FpVec> inputs;
  inputs.reserve(static_cast<std::size_t>(params.k_users));
  for (int k = 1; k <= params.k_users; ++k) {
    inputs.push_back(input_rng.field_vector(q, total_len));
  }

  std::vector<KeyMaterial> material;
  material.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) material.push_back(deal_keys(alpha, key_rng, opts.deal));

  Transcript t;
  t.params = params;
  t.schedule = schedule;
  t.seed = seed;
  t.matrix_ref = matrix_fingerprint(alpha);

  // First round: every user broadcasts; dropouts only affect delivery.
  for (int k = 1; k <= params.k_users; ++k) {
    FpVec x(q, 0);
    for (std::size_t b = 0; b < blocks; ++b) {
      const KeyBundle bundle = bundle_for(material[b], k);
      const Round1Message m =
          round1_encode(detail::slice(inputs[k - 1], b * block_len, block_len), bundle);
      x = concat(x, m.x);
    }
    t.x_messages.push_back(XRecord{k, std::move(x)});
  }

  // Second round: only round-1 survivors transmit.
  for (UserId k : schedule.u1) {
    FpVec y(q, 0);
    for (std::size_t b = 0; b < blocks; ++b) {
      const Round2Message m = round2_encode(params, bundle_for(material[b], k), schedule.u1);
      y.append(m.y);
    }
    t.y_messages.push_back(YRecord{k, schedule.u1, std::move(y)});
  }

  // Plaintext oracle, computed outside the protocol path.
  FpVec oracle(q, total_len);
  for (UserId k : schedule.u1) oracle = oracle + inputs[k - 1];
  t.plaintext_sum = oracle;

  // Every round-2 survivor decodes from what it actually received.
  for (UserId u : schedule.u2) {
    FpVec out(q, 0);
    for (std::size_t b = 0; b < blocks; ++b) {
      std::vector<Round1Message> r1;
      for (UserId k : schedule.u1) {
        if (k == u) continue;
        r1.push_back(Round1Message{
            k, detail::slice(t.x_messages[k - 1].x, b * block_len, block_len)});
      }
      std::vector<Round2Message> r2;
      for (const YRecord& rec : t.y_messages) {
        if (rec.sender == u || !set_contains(schedule.u2, rec.sender)) continue;
        r2.push_back(Round2Message{rec.sender, rec.survivor_set, rec.y[b]});
      }
      const FpVec w_block = detail::slice(inputs[u - 1], b * block_len, block_len);
      out = concat(out, decode(params, alpha, u, w_block, bundle_for(material[b], u), r1, r2,
                               schedule.u1, schedule.u2, opts.verify_decode_subsets));
    }
    t.decoded.emplace_back(u, std::move(out));
  }

  if (opts.reveal_keys) t.keys = KeySecrets{std::move(material)};
  return t;
}

enum class SweepMode { correctness, security, both };

inline std::string to_string(SweepMode m) {
  switch (m) {
    case SweepMode::correctness: return "correctness";
    case SweepMode::security: return "security";
    case SweepMode::both: return "both";
  }
  return "both";
}

struct SweepConfig {
  SweepMode mode = SweepMode::both;
  std::vector<DropoutSchedule> schedules;  // instances to run in correctness mode
  bool security_all_u1 = true;             // enumerate all |u1| >= U; else reuse schedule u1 sets
  std::size_t num_seeds = 1;
  std::uint64_t master_seed = 0;
  RunOptions run;
  int threads = 1;
  bool capture_first_transcript = false;
};

inline constexpr std::size_t kMaxStoredViolations = 100;
inline constexpr std::size_t kSecuritySampleBudget = 1000;  // for K > 6

struct SweepReport {
  ProtocolParams params;
  SweepMode mode = SweepMode::both;
  std::size_t schedules_tested = 0;
  std::uint64_t master_seed = 0;
  std::size_t num_seeds = 0;
  std::size_t runs = 0;
  std::size_t correctness_failures = 0;
  std::size_t security_checks = 0;
  std::size_t security_violations = 0;
  long long max_mi = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  double wall_time_ms = 0.0;
  bool break_pads = false;
  std::vector<SecurityReport> violations;  // first kMaxStoredViolations only
  std::optional<Transcript> first_transcript;

  bool ok() const { return correctness_failures == 0 && security_violations == 0; }
};

namespace detail {

struct SecurityTuple {
  UserId u;
  std::vector<UserId> collusion;
  std::vector<UserId> u1;
};

inline std::vector<SecurityTuple> security_tuples(const ProtocolParams& p,
                                                  const std::vector<std::vector<UserId>>& u1_sets,
                                                  std::uint64_t seed) {
  std::vector<SecurityTuple> tuples;
  if (p.k_users <= 6) {
    for (const auto& u1 : u1_sets) {
      for (UserId u = 1; u <= p.k_users; ++u) {
        std::vector<UserId> others;
        for (UserId k = 1; k <= p.k_users; ++k) {
          if (k != u) others.push_back(k);
        }
        for (int size = 0; size <= p.t_collusion; ++size) {
          for_each_combination(others.size(), static_cast<std::size_t>(size),
                               [&](const std::vector<std::size_t>& pick) {
                                 std::vector<UserId> collusion;
                                 for (std::size_t i : pick) collusion.push_back(others[i]);
                                 tuples.push_back(SecurityTuple{u, std::move(collusion), u1});
                                 return true;
                               });
        }
      }
    }
    return tuples;
  }
  // Beyond desk scale: sample random triples instead of enumerating.
  Rng rng = Rng(seed).child(2);
  for (std::size_t i = 0; i < kSecuritySampleBudget; ++i) {
    const auto u = static_cast<UserId>(1 + rng.below(static_cast<std::uint64_t>(p.k_users)));
    const auto& u1 = u1_sets[rng.below(u1_sets.size())];
    const auto t_size = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(p.t_collusion + 1)));
    std::vector<UserId> collusion;
    while (collusion.size() < t_size) {
      const auto c = static_cast<UserId>(1 + rng.below(static_cast<std::uint64_t>(p.k_users)));
      if (c != u && std::find(collusion.begin(), collusion.end(), c) == collusion.end()) {
        collusion.push_back(c);
      }
    }
    std::sort(collusion.begin(), collusion.end());
    tuples.push_back(SecurityTuple{u, std::move(collusion), u1});
  }
  return tuples;
}

}  // namespace detail

/// Drives correctness runs and exact security checks over dropout patterns.
/// Randomness flows from the master seed alone; every instance derives its
/// own child seed, so thread count never changes results.
inline SweepReport sweep(const ProtocolParams& params, const PrivateMdsMatrix& alpha,
                         const SweepConfig& cfg) {
  check_matrix_for_params(params, alpha);
  const auto start = std::chrono::steady_clock::now();

  SweepReport rep;
  rep.params = params;
  rep.mode = cfg.mode;
  rep.master_seed = cfg.master_seed;
  rep.num_seeds = cfg.num_seeds;
  rep.break_pads = cfg.run.deal.zero_pads;
  rep.schedules_tested = cfg.schedules.size();
  rep.r1 = 1.0;
  rep.r2 = 1.0 / params.block_len;

  const Rng master(cfg.master_seed);

  if (cfg.mode != SweepMode::security) {
    if (cfg.schedules.empty()) throw UsageError("sweep: no schedules to run");
    if (cfg.num_seeds == 0) throw UsageError("sweep: num_seeds must be >= 1");
    for (const auto& s : cfg.schedules) validate_schedule(params.k_users, params.u_threshold, s);

    const std::size_t total = cfg.schedules.size() * cfg.num_seeds;
    std::vector<std::size_t> failures(total, 0);
    std::vector<Transcript> first_slot(cfg.capture_first_transcript ? 1 : 0);

    parallel_for(total, cfg.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t idx = begin; idx < end; ++idx) {
        const auto& schedule = cfg.schedules[idx / cfg.num_seeds];
        const std::uint64_t inst_seed = master.child(idx).seed();
        const Transcript t = run_instance(params, alpha, schedule, inst_seed, cfg.run);
        std::size_t bad = 0;
        for (const auto& [user, sum] : t.decoded) {
          if (sum != t.plaintext_sum) ++bad;
        }
        const auto expected_x = static_cast<std::size_t>(params.block_len * params.blocks);
        for (const auto& x : t.x_messages) {
          if (x.x.size() != expected_x) ++bad;
        }
        for (const auto& y : t.y_messages) {
          if (y.y.size() != static_cast<std::size_t>(params.blocks)) ++bad;
        }
        failures[idx] = bad;
        if (idx == 0 && cfg.capture_first_transcript) first_slot[0] = t;
      }
    });

    rep.runs = total;
    for (std::size_t f : failures) rep.correctness_failures += f;
    if (cfg.capture_first_transcript && !first_slot.empty()) {
      rep.first_transcript = std::move(first_slot[0]);
    }
  }

  if (cfg.mode != SweepMode::correctness) {
    std::vector<std::vector<UserId>> u1_sets;
    if (cfg.security_all_u1) {
      u1_sets = enumerate_survivor_sets(params.k_users, params.u_threshold);
    } else {
      for (const auto& s : cfg.schedules) {
        if (std::find(u1_sets.begin(), u1_sets.end(), s.u1) == u1_sets.end()) {
          u1_sets.push_back(s.u1);
        }
      }
    }
    if (u1_sets.empty()) throw UsageError("sweep: no survivor sets for the security sweep");

    const ObservableFactory factory(params, alpha.alpha, cfg.run.deal.zero_pads);
    const auto tuples = detail::security_tuples(params, u1_sets, cfg.master_seed);
    std::vector<SecurityReport> results(tuples.size());
    parallel_for(tuples.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        results[i] = check_security(factory, tuples[i].u, tuples[i].collusion, tuples[i].u1);
      }
    });

    rep.security_checks = results.size();
    for (const auto& r : results) {
      if (r.mi > rep.max_mi) rep.max_mi = r.mi;
      if (!r.pass()) {
        ++rep.security_violations;
        if (rep.violations.size() < kMaxStoredViolations) rep.violations.push_back(r);
      }
    }
  }

  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// Transcript replay
// ---------------------------------------------------------------------------

struct ReplayResult {
  bool ok = true;
  std::vector<std::string> issues;

  void fail(std::string what) {
    ok = false;
    issues.push_back(std::move(what));
  }
};

/// Re-verifies a stored transcript against the pinned matrix: recomputes every
/// decoder's output from the recorded messages alone and checks it against
/// both the stored decode results and the plaintext oracle sum. Throws
/// UsageError if the transcript was produced under a different matrix.
inline ReplayResult replay_transcript(const Transcript& t, const PrivateMdsMatrix& alpha) {
  if (matrix_fingerprint(alpha) != t.matrix_ref) {
    throw UsageError("replay: transcript is pinned to matrix " + t.matrix_ref +
                     " but the supplied matrix has fingerprint " + matrix_fingerprint(alpha) +
                     "; refusing to verify");
  }
  check_matrix_for_params(t.params, alpha);
  validate_schedule(t.params.k_users, t.params.u_threshold, t.schedule);

  ReplayResult res;
  const auto block_len = static_cast<std::size_t>(t.params.block_len);
  const auto blocks = static_cast<std::size_t>(t.params.blocks);

  if (t.x_messages.size() != static_cast<std::size_t>(t.params.k_users)) {
    res.fail("expected one round-1 record per user");
    return res;
  }
  for (int k = 1; k <= t.params.k_users; ++k) {
    const auto& x = t.x_messages[k - 1];
    if (x.sender != k) res.fail("round-1 records out of order at user " + std::to_string(k));
    if (x.x.size() != block_len * blocks) {
      res.fail("round-1 message of user " + std::to_string(k) + " has wrong length");
    }
  }
  std::vector<UserId> y_senders;
  for (const auto& y : t.y_messages) {
    y_senders.push_back(y.sender);
    if (y.survivor_set != t.schedule.u1) {
      res.fail("round-2 message of user " + std::to_string(y.sender) +
               " carries a survivor set different from u1");
    }
    if (y.y.size() != blocks) {
      res.fail("round-2 message of user " + std::to_string(y.sender) + " has wrong length");
    }
  }
  if (y_senders != t.schedule.u1) res.fail("round-2 senders must be exactly u1");
  if (t.plaintext_sum.size() != block_len * blocks) res.fail("plaintext sum has wrong length");
  if (!res.ok) return res;

  std::vector<UserId> decoded_users;
  for (const auto& [user, sum] : t.decoded) decoded_users.push_back(user);
  if (decoded_users != t.schedule.u2) {
    res.fail("decode results must cover exactly u2");
    return res;
  }

  // Recompute the decode from messages only: any U round-2 equations from u2
  // determine (sum N, sum S) -- the same solution every decoder obtains -- and
  // every remaining round-2 message must be consistent with it, which pins
  // each transmitted Y value individually. Subtracting sum N from the summed
  // broadcasts must then reproduce the stored results and the oracle sum.
  FpVec recomputed(t.params.q, 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<UserId> ids;
    std::vector<Fp> ys;
    for (const auto& y : t.y_messages) {
      if (!set_contains(t.schedule.u2, y.sender)) continue;
      if (ids.size() == static_cast<std::size_t>(t.params.u_threshold)) break;
      ids.push_back(y.sender);
      ys.push_back(y.y[b]);
    }
    FpVec aggregated(t.params.q, 0);
    try {
      aggregated = detail::solve_aggregated_keys(alpha, ids, ys);
    } catch (const CertificationError& e) {
      res.fail(e.what());
      return res;
    }
    for (const auto& y : t.y_messages) {
      if (y.y[b] != aggregated.dot(alpha.alpha.col(static_cast<std::size_t>(y.sender - 1)))) {
        res.fail("round-2 message of user " + std::to_string(y.sender) + " in block " +
                 std::to_string(b) + " is inconsistent with the aggregated keys");
      }
    }
    FpVec sum_x(t.params.q, block_len);
    for (UserId k : t.schedule.u1) {
      sum_x = sum_x + detail::slice(t.x_messages[k - 1].x, b * block_len, block_len);
    }
    FpVec sum_n(t.params.q, block_len);
    for (std::size_t j = 0; j < block_len; ++j) sum_n.set(j, aggregated[j]);
    recomputed = concat(recomputed, sum_x - sum_n);
  }
  for (const auto& [user, stored] : t.decoded) {
    if (recomputed != stored) {
      res.fail("decode mismatch at user " + std::to_string(user) +
               ": recomputed output differs from the stored result");
    }
  }
  if (recomputed != t.plaintext_sum) {
    res.fail("decode mismatch: recomputed output differs from the plaintext sum");
  }
  return res;
}

}  // namespace dsa
