#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsa/common.hpp"
#include "dsa/field.hpp"
#include "dsa/keys.hpp"
#include "dsa/linalg.hpp"
#include "dsa/mds.hpp"

namespace dsa {

/// Validated configuration of one aggregation instance. block_len is the
/// per-block input length L = U - T - 1; longer inputs run as independent
/// blocks with fresh keys.
struct ProtocolParams {
  int k_users = 0;
  int u_threshold = 0;
  int t_collusion = 0;
  std::uint64_t q = 0;
  int block_len = 0;
  int blocks = 1;

  bool operator==(const ProtocolParams&) const = default;
};

struct Feasibility {
  bool ok = false;
  std::string reason;
};

/// The feasibility gate: aggregation exists iff U > T+1. Parameters outside
/// the model (K < 3, U outside [1, K-1], negative T) are usage errors, not
/// infeasibility results. A feasible configuration with U <= K-1 always has
/// T <= K-3, so no separate bound on T is needed.
inline Feasibility check_feasibility(int k_users, int u_threshold, int t_collusion) {
  if (k_users < 3) throw UsageError("check_feasibility: K must be >= 3");
  if (u_threshold < 1 || u_threshold > k_users - 1) {
    throw UsageError("check_feasibility: U must lie in [1, K-1]");
  }
  if (t_collusion < 0) throw UsageError("check_feasibility: T must be nonnegative");
  if (u_threshold <= t_collusion + 1) {
    return {false, "infeasible: U <= T+1 (U=" + std::to_string(u_threshold) +
                       ", T=" + std::to_string(t_collusion) +
                       "); secure aggregation requires U > T+1"};
  }
  return {true, ""};
}

inline ProtocolParams make_params(int k_users, int u_threshold, int t_collusion, std::uint64_t q,
                                  int blocks = 1) {
  const Feasibility f = check_feasibility(k_users, u_threshold, t_collusion);
  if (!f.ok) throw InfeasibleError(f.reason);
  checked_modulus(q);
  if (q == 2) throw UsageError("make_params: protocol modulus must be an odd prime");
  if (blocks < 1) throw UsageError("make_params: blocks must be >= 1");
  if (binomial_capped(static_cast<std::uint64_t>(k_users), static_cast<std::uint64_t>(u_threshold),
                      kMinorEnumerationLimit) > kMinorEnumerationLimit) {
    throw UsageError("make_params: C(K,U) exceeds the certification limit");
  }
  return ProtocolParams{k_users, u_threshold, t_collusion, q, u_threshold - t_collusion - 1,
                        blocks};
}

inline void check_matrix_for_params(const ProtocolParams& p, const PrivateMdsMatrix& m) {
  if (m.alpha.rows() != static_cast<std::size_t>(p.u_threshold) ||
      m.alpha.cols() != static_cast<std::size_t>(p.k_users) ||
      m.t_privacy != static_cast<std::size_t>(p.t_collusion + 1) ||
      m.alpha.modulus() != p.q) {
    throw UsageError("matrix does not match params: need " + std::to_string(p.u_threshold) + "x" +
                     std::to_string(p.k_users) + " over F_" + std::to_string(p.q) +
                     " with t_privacy " + std::to_string(p.t_collusion + 1));
  }
}

/// One block of a user's first-round broadcast: x = W_k + N_k.
struct Round1Message {
  UserId sender = 0;
  FpVec x;
};

/// One block of a surviving user's second-round broadcast: the scalar
/// y = sum_{i in u1} [Q_i]_sender.
struct Round2Message {
  UserId sender = 0;
  std::vector<UserId> survivor_set;
  Fp y;
};

inline Round1Message round1_encode(const FpVec& w_k, const KeyBundle& bundle) {
  if (w_k.size() != bundle.n_k.size()) {
    throw UsageError("round1_encode: input length " + std::to_string(w_k.size()) +
                     " does not match mask length " + std::to_string(bundle.n_k.size()));
  }
  return Round1Message{bundle.owner, w_k + bundle.n_k};
}

inline Round2Message round2_encode(const ProtocolParams& params, const KeyBundle& bundle,
                                   const std::vector<UserId>& u1) {
  require_user_set(u1, params.k_users, "round2_encode: u1");
  if (static_cast<int>(u1.size()) < params.u_threshold) {
    throw UsageError("round2_encode: |u1| = " + std::to_string(u1.size()) +
                     " is below the survivor threshold U = " + std::to_string(params.u_threshold));
  }
  if (!set_contains(u1, bundle.owner)) {
    throw UsageError("round2_encode: sender " + std::to_string(bundle.owner) +
                     " dropped out of u1 and must stay silent");
  }
  Fp acc(0, bundle.proj_row.modulus());
  for (UserId i : u1) acc = acc + bundle.proj_row[static_cast<std::size_t>(i - 1)];
  return Round2Message{bundle.owner, u1, acc};
}

namespace detail {

/// Solves for (sum N, sum S) over u1 from the round-2 values of `ids`
/// (one equation per id, |ids| = U).
inline FpVec solve_aggregated_keys(const PrivateMdsMatrix& alpha,
                                   const std::vector<UserId>& ids, const std::vector<Fp>& ys) {
  const std::size_t u = alpha.alpha.rows();
  FpMat system(u, u, alpha.alpha.modulus());
  FpVec rhs(alpha.alpha.modulus(), u);
  for (std::size_t r = 0; r < u; ++r) {
    for (std::size_t c = 0; c < u; ++c) {
      system.set(r, c, alpha.alpha.at(c, static_cast<std::size_t>(ids[r] - 1)));
    }
    rhs.set(r, ys[r]);
  }
  try {
    return solve(system, rhs);
  } catch (const SingularMatrixError&) {
    throw CertificationError(
        "decode: singular system for survivor columns {" + join_ids(ids) +
        "}; the matrix violates its MDS certification");
  }
}

}  // namespace detail

/// Decodes sum_{k in u1} W_k at user u from one block of received messages.
///
/// The decoder always contributes its own round-2 equation (computable from
/// its bundle), so only U-1 received equations are required; its own missing
/// first-round broadcast is replaced by the locally known W_u + N_u. With
/// verify_all_subsets set, every U-subset of the available equations is
/// solved and compared, which must agree for a certified matrix.
inline FpVec decode(const ProtocolParams& params, const PrivateMdsMatrix& alpha, UserId u,
                    const FpVec& w_u, const KeyBundle& bundle_u,
                    const std::vector<Round1Message>& received_r1,
                    const std::vector<Round2Message>& received_r2,
                    const std::vector<UserId>& u1, const std::vector<UserId>& u2,
                    bool verify_all_subsets = false) {
  check_matrix_for_params(params, alpha);
  require_user_set(u1, params.k_users, "decode: u1");
  require_user_set(u2, params.k_users, "decode: u2");
  if (!is_subset(u2, u1)) throw UsageError("decode: u2 must be a subset of u1");
  if (static_cast<int>(u2.size()) < params.u_threshold) {
    throw InsufficientSurvivorsError("decode: |u2| = " + std::to_string(u2.size()) +
                                     " is below the survivor threshold U = " +
                                     std::to_string(params.u_threshold));
  }
  if (!set_contains(u2, u)) throw UsageError("decode: decoder must belong to u2");
  if (bundle_u.owner != u) throw UsageError("decode: bundle owner mismatch");
  if (w_u.size() != static_cast<std::size_t>(params.block_len)) {
    throw UsageError("decode: input block must have length L = " +
                     std::to_string(params.block_len));
  }

  // Round-1 coverage: one message from every other survivor of round 1.
  std::vector<UserId> r1_senders;
  for (const auto& m : received_r1) r1_senders.push_back(m.sender);
  std::sort(r1_senders.begin(), r1_senders.end());
  if (r1_senders != set_minus(u1, {u})) {
    throw UsageError("decode: round-1 messages must cover exactly u1 \\ {u}");
  }

  // Round-2 equations: own value plus distinct received senders from u2.
  std::vector<UserId> eq_ids{u};
  std::vector<Fp> eq_ys{round2_encode(params, bundle_u, u1).y};
  for (const auto& m : received_r2) {
    if (m.sender == u) continue;
    if (!set_contains(u2, m.sender)) {
      throw UsageError("decode: round-2 message from user " + std::to_string(m.sender) +
                       " outside u2");
    }
    if (m.survivor_set != u1) {
      throw UsageError("decode: round-2 message from user " + std::to_string(m.sender) +
                       " was encoded for a different survivor set");
    }
    if (std::find(eq_ids.begin(), eq_ids.end(), m.sender) != eq_ids.end()) {
      throw UsageError("decode: duplicate round-2 message from user " + std::to_string(m.sender));
    }
    eq_ids.push_back(m.sender);
    eq_ys.push_back(m.y);
  }
  const auto u_threshold = static_cast<std::size_t>(params.u_threshold);
  if (eq_ids.size() < u_threshold) {
    throw InsufficientSurvivorsError(
        "decode: only " + std::to_string(eq_ids.size()) + " round-2 equations available, need " +
        std::to_string(params.u_threshold));
  }

  // Lowest sender ids feed the solver; sort value pairs together.
  std::vector<std::size_t> order(eq_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return eq_ids[a] < eq_ids[b]; });
  std::vector<UserId> ids;
  std::vector<Fp> ys;
  for (std::size_t i = 0; i < u_threshold; ++i) {
    ids.push_back(eq_ids[order[i]]);
    ys.push_back(eq_ys[order[i]]);
  }
  const FpVec aggregated = detail::solve_aggregated_keys(alpha, ids, ys);

  if (verify_all_subsets) {
    detail::for_each_combination(eq_ids.size(), u_threshold, [&](const std::vector<std::size_t>& pick) {
      std::vector<UserId> sub_ids;
      std::vector<Fp> sub_ys;
      for (std::size_t i : pick) {
        sub_ids.push_back(eq_ids[order[i]]);
        sub_ys.push_back(eq_ys[order[i]]);
      }
      if (detail::solve_aggregated_keys(alpha, sub_ids, sub_ys) != aggregated) {
        throw CertificationError("decode: equation subsets disagree on the aggregated keys");
      }
      return true;
    });
  }

  // sum over u1 of X_k, with the decoder's own broadcast reconstructed locally.
  FpVec sum_x = w_u + bundle_u.n_k;
  for (const auto& m : received_r1) {
    if (m.x.size() != static_cast<std::size_t>(params.block_len)) {
      throw UsageError("decode: round-1 message has wrong block length");
    }
    sum_x = sum_x + m.x;
  }

  FpVec sum_n(params.q, static_cast<std::size_t>(params.block_len));
  for (int j = 0; j < params.block_len; ++j) sum_n.set(static_cast<std::size_t>(j), aggregated[static_cast<std::size_t>(j)]);
  return sum_x - sum_n;
}

}  // namespace dsa
