#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsa/common.hpp"
#include "dsa/field.hpp"
#include "dsa/linalg.hpp"
#include "dsa/mds.hpp"

namespace dsa {

/// Fault-injection switches for negative tests; production dealing leaves both
/// off.
struct DealOptions {
  bool zero_masks = false;  // N_k = 0 (debug)
  bool zero_pads = false;   // S_k = 0 (breaks collusion resistance for T >= 1)
};

/// Everything the trusted dealer produced for one protocol instance: raw masks
/// and pads plus the full projection grid derived from them.
struct KeyMaterial {
  int k_users = 0;
  int u_threshold = 0;
  int t_collusion = 0;
  std::vector<FpVec> n;  // n[i-1]: mask of user i, length U-T-1
  std::vector<FpVec> s;  // s[i-1]: pad of user i, length T+1
  FpMat proj;            // proj(i-1, k-1) = [Q_i]_k = (N_i || S_i) . alpha_k

  std::uint64_t modulus() const { return proj.modulus(); }
};

/// The key bundle handed to one user: its own mask plus its row of every
/// user's projection.
struct KeyBundle {
  UserId owner = 0;
  FpVec n_k;       // mask N_owner
  FpVec proj_row;  // proj_row[i-1] = [Q_i]_owner for i in [K]
};

inline FpMat recompute_projections(const KeyMaterial& km, const PrivateMdsMatrix& alpha) {
  const int k_users = km.k_users;
  FpMat proj(k_users, k_users, alpha.alpha.modulus());
  for (int i = 1; i <= k_users; ++i) {
    const FpVec key_row = concat(km.n[i - 1], km.s[i - 1]);
    for (int k = 1; k <= k_users; ++k) {
      proj.set(i - 1, k - 1, key_row.dot(alpha.alpha.col(k - 1)));
    }
  }
  return proj;
}

/// Deals fresh uniform masks and pads for all K users and derives every
/// projection [Q_i]_k through the certified matrix.
inline KeyMaterial deal_keys(const PrivateMdsMatrix& alpha, Rng& rng, DealOptions opts = {}) {
  const std::uint64_t q = alpha.alpha.modulus();
  const auto u_threshold = static_cast<int>(alpha.alpha.rows());
  const auto k_users = static_cast<int>(alpha.alpha.cols());
  const auto t_collusion = static_cast<int>(alpha.t_privacy) - 1;
  const std::size_t mask_len = alpha.alpha.rows() - alpha.t_privacy;  // U - T - 1
  if (mask_len == 0) {
    throw UsageError("deal_keys: matrix admits no mask block (U <= T+1)");
  }

  KeyMaterial km{k_users, u_threshold, t_collusion, {}, {}, FpMat(k_users, k_users, q)};
  for (int i = 0; i < k_users; ++i) {
    km.n.push_back(opts.zero_masks ? FpVec(q, mask_len) : rng.field_vector(q, mask_len));
    km.s.push_back(opts.zero_pads ? FpVec(q, alpha.t_privacy)
                                  : rng.field_vector(q, alpha.t_privacy));
  }
  km.proj = recompute_projections(km, alpha);
  return km;
}

inline KeyBundle bundle_for(const KeyMaterial& km, UserId k) {
  if (k < 1 || k > km.k_users) {
    throw UsageError("bundle_for: user id " + std::to_string(k) + " out of range [1, " +
                     std::to_string(km.k_users) + "]");
  }
  return KeyBundle{k, km.n[k - 1], km.proj.col(k - 1)};
}

}  // namespace dsa
