#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsa/common.hpp"
#include "dsa/field.hpp"
#include "dsa/linalg.hpp"
#include "dsa/mds.hpp"
#include "dsa/protocol.hpp"

namespace dsa {

/// Coordinate layout of the global uniform seed: all W symbols, then all N
/// symbols, then all S symbols. Every protocol observable is a linear map
/// from this seed, so entropies in q-ary units are coefficient-matrix ranks.
class SeedLayout {
 public:
  SeedLayout(int k_users, int u_threshold, int t_collusion)
      : k_(k_users),
        u_(u_threshold),
        t_(t_collusion),
        l_(u_threshold - t_collusion - 1) {
    if (k_ < 1) throw UsageError("SeedLayout: K must be positive");
    if (t_ < 0) throw UsageError("SeedLayout: T must be nonnegative");
    if (l_ < 1) throw UsageError("SeedLayout: requires U > T+1");
  }

  int k_users() const { return k_; }
  int input_len() const { return l_; }    // L = U - T - 1
  int mask_len() const { return l_; }     // |N_k|
  int pad_len() const { return t_ + 1; }  // |S_k|

  std::size_t dim() const {
    return static_cast<std::size_t>(k_) * static_cast<std::size_t>(l_ + u_);
  }

  std::size_t w_index(UserId k, std::size_t j) const {
    check(k, j, static_cast<std::size_t>(l_), "w");
    return static_cast<std::size_t>(k - 1) * l_ + j;
  }

  std::size_t n_index(UserId k, std::size_t j) const {
    check(k, j, static_cast<std::size_t>(l_), "n");
    return static_cast<std::size_t>(k_) * l_ + static_cast<std::size_t>(k - 1) * l_ + j;
  }

  std::size_t s_index(UserId k, std::size_t j) const {
    check(k, j, static_cast<std::size_t>(t_ + 1), "s");
    return static_cast<std::size_t>(k_) * l_ * 2 + static_cast<std::size_t>(k - 1) * (t_ + 1) + j;
  }

  bool operator==(const SeedLayout&) const = default;

 private:
  void check(UserId k, std::size_t j, std::size_t len, const char* what) const {
    if (k < 1 || k > k_) {
      throw UsageError(std::string("SeedLayout::") + what + "_index: user id out of range");
    }
    if (j >= len) {
      throw UsageError(std::string("SeedLayout::") + what + "_index: coordinate out of range");
    }
  }

  int k_;
  int u_;
  int t_;
  int l_;
};

/// A labelled linear map from the seed; value = coeffs . seed.
struct LinearObservable {
  std::string label;
  FpMat coeffs;  // (observable dimension) x (seed dimension)
};

using ObservableList = std::vector<LinearObservable>;

/// Builds the observables of one protocol instance over a fixed matrix. With
/// zero_pads set it describes the broken scheme whose projections ignore the
/// S block, which is what the pad-zeroing fault injection actually transmits.
class ObservableFactory {
 public:
  ObservableFactory(const ProtocolParams& params, const FpMat& alpha, bool zero_pads = false)
      : params_(params),
        layout_(params.k_users, params.u_threshold, params.t_collusion),
        alpha_(alpha),
        zero_pads_(zero_pads) {
    if (alpha_.rows() != static_cast<std::size_t>(params.u_threshold) ||
        alpha_.cols() != static_cast<std::size_t>(params.k_users)) {
      throw UsageError("ObservableFactory: alpha must be U x K");
    }
    if (alpha_.modulus() != params.q) throw UsageError("ObservableFactory: modulus mismatch");
  }

  const SeedLayout& layout() const { return layout_; }
  const ProtocolParams& params() const { return params_; }

  LinearObservable w(UserId k) const {
    FpMat m = zero(layout_.input_len());
    for (int j = 0; j < layout_.input_len(); ++j) m.set(j, layout_.w_index(k, j), 1);
    return {"W_" + std::to_string(k), std::move(m)};
  }

  LinearObservable n(UserId k) const {
    FpMat m = zero(layout_.mask_len());
    for (int j = 0; j < layout_.mask_len(); ++j) m.set(j, layout_.n_index(k, j), 1);
    return {"N_" + std::to_string(k), std::move(m)};
  }

  LinearObservable s(UserId k) const {
    FpMat m = zero(layout_.pad_len());
    for (int j = 0; j < layout_.pad_len(); ++j) m.set(j, layout_.s_index(k, j), 1);
    return {"S_" + std::to_string(k), std::move(m)};
  }

  /// X_k = W_k + N_k, componentwise.
  LinearObservable x(UserId k) const {
    FpMat m = zero(layout_.input_len());
    for (int j = 0; j < layout_.input_len(); ++j) {
      m.set(j, layout_.w_index(k, j), 1);
      m.set(j, layout_.n_index(k, j), 1);
    }
    return {"X_" + std::to_string(k), std::move(m)};
  }

  /// One projection [Q_i]_k.
  LinearObservable proj(UserId i, UserId k) const {
    FpMat m = zero(1);
    add_projection_row(m, 0, i, k);
    return {"Q_" + std::to_string(i) + "_" + std::to_string(k), std::move(m)};
  }

  /// Y_k over survivor set u1: sum of [Q_i]_k for i in u1.
  LinearObservable y(UserId k, const std::vector<UserId>& u1) const {
    require_user_set(u1, params_.k_users, "ObservableFactory::y: u1");
    FpMat m = zero(1);
    for (UserId i : u1) add_projection_row(m, 0, i, k);
    return {"Y_" + std::to_string(k) + "{" + join_ids(u1) + "}", std::move(m)};
  }

  /// The full key bundle Z_k = (N_k, {[Q_i]_k}_i).
  LinearObservable z(UserId k) const {
    FpMat m = zero(layout_.mask_len() + layout_.k_users());
    for (int j = 0; j < layout_.mask_len(); ++j) m.set(j, layout_.n_index(k, j), 1);
    for (int i = 1; i <= layout_.k_users(); ++i) {
      add_projection_row(m, static_cast<std::size_t>(layout_.mask_len() + i - 1), i, k);
    }
    return {"Z_" + std::to_string(k), std::move(m)};
  }

  LinearObservable sum_w(const std::vector<UserId>& u1) const {
    require_user_set(u1, params_.k_users, "ObservableFactory::sum_w: u1");
    FpMat m = zero(layout_.input_len());
    for (UserId k : u1) {
      for (int j = 0; j < layout_.input_len(); ++j) m.set(j, layout_.w_index(k, j), 1);
    }
    return {"sum W{" + join_ids(u1) + "}", std::move(m)};
  }

  ObservableList all_w() const {
    ObservableList out;
    for (int k = 1; k <= layout_.k_users(); ++k) out.push_back(w(k));
    return out;
  }

  ObservableList all_n() const {
    ObservableList out;
    for (int k = 1; k <= layout_.k_users(); ++k) out.push_back(n(k));
    return out;
  }

  /// All raw key symbols (N and S of every user), jointly of entropy K*U.
  ObservableList all_keys() const {
    ObservableList out;
    for (int k = 1; k <= layout_.k_users(); ++k) out.push_back(n(k));
    for (int k = 1; k <= layout_.k_users(); ++k) out.push_back(s(k));
    return out;
  }

 private:
  FpMat zero(std::size_t rows) const { return FpMat(rows, layout_.dim(), params_.q); }

  void add_projection_row(FpMat& m, std::size_t row, UserId i, UserId k) const {
    const auto col = static_cast<std::size_t>(k - 1);
    for (int j = 0; j < layout_.mask_len(); ++j) {
      const std::uint64_t c = alpha_.at(static_cast<std::size_t>(j), col);
      m.set(row, layout_.n_index(i, static_cast<std::size_t>(j)),
            (m.at(row, layout_.n_index(i, static_cast<std::size_t>(j))) + c) % params_.q);
    }
    if (zero_pads_) return;
    for (int j = 0; j < layout_.pad_len(); ++j) {
      const std::uint64_t c = alpha_.at(static_cast<std::size_t>(layout_.mask_len() + j), col);
      m.set(row, layout_.s_index(i, static_cast<std::size_t>(j)),
            (m.at(row, layout_.s_index(i, static_cast<std::size_t>(j))) + c) % params_.q);
    }
  }

  ProtocolParams params_;
  SeedLayout layout_;
  FpMat alpha_;
  bool zero_pads_;
};

namespace detail {

inline FpMat stack_observables(const ObservableList& obs) {
  if (obs.empty()) throw UsageError("stack_observables: empty list");
  FpMat out = obs[0].coeffs;
  for (std::size_t i = 1; i < obs.size(); ++i) {
    if (obs[i].coeffs.cols() != out.cols() || obs[i].coeffs.modulus() != out.modulus()) {
      throw UsageError("observable layout mismatch between '" + obs[0].label + "' and '" +
                       obs[i].label + "'");
    }
    out = vstack(out, obs[i].coeffs);
  }
  return out;
}

inline ObservableList concat_lists(const ObservableList& a, const ObservableList& b) {
  ObservableList out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace detail

/// H(obs) in q-ary units: the rank of the stacked coefficient matrices.
inline std::size_t entropy(const ObservableList& obs) {
  if (obs.empty()) return 0;
  return rank(detail::stack_observables(obs));
}

/// H(a | b) = H(a, b) - H(b).
inline std::size_t cond_entropy(const ObservableList& a, const ObservableList& b) {
  return entropy(detail::concat_lists(a, b)) - entropy(b);
}

/// I(a ; b | c) = H(a|c) + H(b|c) - H(a,b|c); nonnegative by rank submodularity.
inline long long mutual_info(const ObservableList& a, const ObservableList& b,
                             const ObservableList& c = {}) {
  const auto rank_ac = static_cast<long long>(entropy(detail::concat_lists(a, c)));
  const auto rank_bc = static_cast<long long>(entropy(detail::concat_lists(b, c)));
  const auto rank_abc =
      static_cast<long long>(entropy(detail::concat_lists(detail::concat_lists(a, b), c)));
  const auto rank_c = static_cast<long long>(entropy(c));
  return rank_ac + rank_bc - rank_abc - rank_c;
}

/// Result of one exact security evaluation; mi == 0 means no leakage.
struct SecurityReport {
  UserId adversary = 0;
  std::vector<UserId> collusion;
  std::vector<UserId> u1;
  long long mi = 0;
  long long rank_view_given = 0;    // H(view | conditioning)
  long long rank_inputs_given = 0;  // H(inputs | conditioning)
  long long rank_joint_given = 0;   // H(view, inputs | conditioning)

  bool pass() const { return mi == 0; }
};

/// Evaluates the security constraint exactly: the adversary u sees every
/// first-round message (delayed availability, dropped users included) and all
/// second-round messages of u1, conditioned on the target sum and the joint
/// view of the colluding set.
inline SecurityReport check_security(const ObservableFactory& f, UserId u,
                                     const std::vector<UserId>& collusion,
                                     const std::vector<UserId>& u1) {
  const ProtocolParams& p = f.params();
  if (u < 1 || u > p.k_users) throw UsageError("check_security: adversary id out of range");
  require_user_set(collusion, p.k_users, "check_security: collusion");
  require_user_set(u1, p.k_users, "check_security: u1");
  if (set_contains(collusion, u)) {
    throw UsageError("check_security: adversary must not appear in the collusion set");
  }
  if (static_cast<int>(collusion.size()) > p.t_collusion) {
    throw UsageError("check_security: collusion set exceeds T = " +
                     std::to_string(p.t_collusion));
  }
  if (static_cast<int>(u1.size()) < p.u_threshold) {
    throw UsageError("check_security: |u1| below the survivor threshold");
  }

  ObservableList inputs = f.all_w();

  ObservableList view;
  for (int k = 1; k <= p.k_users; ++k) {
    if (k != u) view.push_back(f.x(k));
  }
  for (UserId k : u1) {
    if (k != u) view.push_back(f.y(k, u1));
  }

  ObservableList given;
  given.push_back(f.sum_w(u1));
  for (UserId k : set_union(collusion, {u})) {
    given.push_back(f.w(k));
    given.push_back(f.z(k));
  }

  SecurityReport rep;
  rep.adversary = u;
  rep.collusion = collusion;
  rep.u1 = u1;
  rep.rank_inputs_given = static_cast<long long>(cond_entropy(inputs, given));
  rep.rank_view_given = static_cast<long long>(cond_entropy(view, given));
  rep.rank_joint_given =
      static_cast<long long>(cond_entropy(detail::concat_lists(inputs, view), given));
  rep.mi = rep.rank_inputs_given + rep.rank_view_given - rep.rank_joint_given;
  return rep;
}

struct CorrectnessRankReport {
  UserId decoder = 0;
  std::vector<UserId> u1;
  std::vector<UserId> u2;
  std::size_t residual_entropy = 0;  // H(target sum | decoder view); 0 = decodable

  bool pass() const { return residual_entropy == 0; }
};

/// Rank-level counterpart of decoding: the target sum must be a deterministic
/// function of what user u receives plus its own input and keys.
inline CorrectnessRankReport check_correctness_rank(const ObservableFactory& f, UserId u,
                                                    const std::vector<UserId>& u1,
                                                    const std::vector<UserId>& u2) {
  const ProtocolParams& p = f.params();
  require_user_set(u1, p.k_users, "check_correctness_rank: u1");
  require_user_set(u2, p.k_users, "check_correctness_rank: u2");
  if (!is_subset(u2, u1)) throw UsageError("check_correctness_rank: u2 must be a subset of u1");
  if (!set_contains(u2, u)) throw UsageError("check_correctness_rank: decoder must belong to u2");

  ObservableList target{f.sum_w(u1)};
  ObservableList given;
  for (UserId k : u1) {
    if (k != u) given.push_back(f.x(k));
  }
  for (UserId k : u2) {
    if (k != u) given.push_back(f.y(k, u1));
  }
  given.push_back(f.w(u));
  given.push_back(f.z(u));

  CorrectnessRankReport rep;
  rep.decoder = u;
  rep.u1 = u1;
  rep.u2 = u2;
  rep.residual_entropy = cond_entropy(target, given);
  return rep;
}

}  // namespace dsa
