#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsa/common.hpp"
#include "dsa/field.hpp"
#include "dsa/keys.hpp"
#include "dsa/mds.hpp"
#include "dsa/protocol.hpp"
#include "dsa/sim.hpp"

namespace dsa {

inline constexpr const char* kMatrixSchema = "dsa.matrix/1";
inline constexpr const char* kTranscriptSchema = "dsa.transcript/1";
inline constexpr const char* kReportSchema = "dsa.report/1";

namespace detail {

inline nlohmann::json vec_to_json(const FpVec& v) {
  return nlohmann::json(v.raw());
}

inline FpVec vec_from_json(const nlohmann::json& j, std::uint64_t q) {
  FpVec out(q, 0);
  for (const auto& x : j) out.append(Fp(x.get<std::uint64_t>(), q));
  return out;
}

inline std::vector<UserId> ids_from_json(const nlohmann::json& j) {
  return j.get<std::vector<UserId>>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrix files
// ---------------------------------------------------------------------------

inline nlohmann::json matrix_to_json(const PrivateMdsMatrix& m) {
  nlohmann::json j;
  j["schema"] = kMatrixSchema;
  j["q"] = m.alpha.modulus();
  j["k"] = m.alpha.cols();
  j["u"] = m.alpha.rows();
  j["t"] = m.t_privacy - 1;
  j["eval_points"] = detail::vec_to_json(m.eval_points);
  j["entries"] = m.alpha.raw();
  j["fingerprint"] = matrix_fingerprint(m);
  return j;
}

/// Parses and re-certifies a pinned matrix. Anything that fails the exhaustive
/// minor re-check, or whose entries do not match its own evaluation points, is
/// rejected.
inline PrivateMdsMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.contains("schema") || j["schema"] != kMatrixSchema) {
    throw UsageError("matrix file: missing or unsupported schema (want " +
                     std::string(kMatrixSchema) + ")");
  }
  const auto q = j.at("q").get<std::uint64_t>();
  const auto k_cols = j.at("k").get<std::size_t>();
  const auto u_rows = j.at("u").get<std::size_t>();
  const auto t_collusion = j.at("t").get<std::size_t>();
  const FpVec points = detail::vec_from_json(j.at("eval_points"), q);
  if (points.size() != k_cols) throw CertificationError("matrix file: eval point count != K");

  const FpMat alpha = build_vandermonde(u_rows, points);
  const auto& entries = j.at("entries");
  if (entries.size() != u_rows * k_cols) {
    throw CertificationError("matrix file: entry count does not match dimensions");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].get<std::uint64_t>() != alpha.raw()[i]) {
      throw CertificationError(
          "matrix file: entries are not the Vandermonde expansion of the eval points");
    }
  }
  PrivateMdsMatrix m{alpha, points, t_collusion + 1};
  if (!recertify(m)) throw CertificationError("matrix file: failed MDS/privacy re-certification");
  return m;
}

// ---------------------------------------------------------------------------
// Params
// ---------------------------------------------------------------------------

inline nlohmann::json params_to_json(const ProtocolParams& p) {
  return nlohmann::json{{"k", p.k_users},   {"u", p.u_threshold}, {"t", p.t_collusion},
                        {"q", p.q},         {"l", p.block_len},   {"blocks", p.blocks}};
}

inline ProtocolParams params_from_json(const nlohmann::json& j) {
  const ProtocolParams p =
      make_params(j.at("k").get<int>(), j.at("u").get<int>(), j.at("t").get<int>(),
                  j.at("q").get<std::uint64_t>(), j.at("blocks").get<int>());
  if (j.contains("l") && j.at("l").get<int>() != p.block_len) {
    throw UsageError("params: stored block length disagrees with U - T - 1");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Transcripts
// ---------------------------------------------------------------------------

inline nlohmann::json transcript_to_json(const Transcript& t) {
  nlohmann::json j;
  j["schema"] = kTranscriptSchema;
  j["params"] = params_to_json(t.params);
  j["seed"] = t.seed;
  j["u1"] = t.schedule.u1;
  j["u2"] = t.schedule.u2;
  j["x_messages"] = nlohmann::json::array();
  for (const auto& x : t.x_messages) {
    j["x_messages"].push_back({{"sender", x.sender}, {"x", detail::vec_to_json(x.x)}});
  }
  j["y_messages"] = nlohmann::json::array();
  for (const auto& y : t.y_messages) {
    j["y_messages"].push_back({{"sender", y.sender},
                               {"survivor_set", y.survivor_set},
                               {"y", detail::vec_to_json(y.y)}});
  }
  j["decoded"] = nlohmann::json::array();
  for (const auto& [user, sum] : t.decoded) {
    j["decoded"].push_back({{"user", user}, {"sum", detail::vec_to_json(sum)}});
  }
  j["plaintext_sum"] = detail::vec_to_json(t.plaintext_sum);
  j["matrix_ref"] = t.matrix_ref;
  if (t.keys) {
    nlohmann::json keys;
    keys["secret_revealing"] = true;
    keys["blocks"] = nlohmann::json::array();
    for (const auto& km : t.keys->blocks) {
      nlohmann::json block;
      block["n"] = nlohmann::json::array();
      block["s"] = nlohmann::json::array();
      for (const auto& v : km.n) block["n"].push_back(detail::vec_to_json(v));
      for (const auto& v : km.s) block["s"].push_back(detail::vec_to_json(v));
      block["proj"] = km.proj.raw();
      keys["blocks"].push_back(std::move(block));
    }
    j["keys"] = std::move(keys);
  }
  return j;
}

inline Transcript transcript_from_json(const nlohmann::json& j) {
  if (!j.contains("schema") || j["schema"] != kTranscriptSchema) {
    throw UsageError("transcript file: missing or unsupported schema (want " +
                     std::string(kTranscriptSchema) + ")");
  }
  Transcript t;
  t.params = params_from_json(j.at("params"));
  const std::uint64_t q = t.params.q;
  t.seed = j.at("seed").get<std::uint64_t>();
  t.schedule.u1 = detail::ids_from_json(j.at("u1"));
  t.schedule.u2 = detail::ids_from_json(j.at("u2"));
  for (const auto& x : j.at("x_messages")) {
    t.x_messages.push_back(
        XRecord{x.at("sender").get<UserId>(), detail::vec_from_json(x.at("x"), q)});
  }
  for (const auto& y : j.at("y_messages")) {
    t.y_messages.push_back(YRecord{y.at("sender").get<UserId>(),
                                   detail::ids_from_json(y.at("survivor_set")),
                                   detail::vec_from_json(y.at("y"), q)});
  }
  for (const auto& d : j.at("decoded")) {
    t.decoded.emplace_back(d.at("user").get<UserId>(), detail::vec_from_json(d.at("sum"), q));
  }
  t.plaintext_sum = detail::vec_from_json(j.at("plaintext_sum"), q);
  t.matrix_ref = j.at("matrix_ref").get<std::string>();
  if (j.contains("keys")) {
    KeySecrets secrets;
    for (const auto& block : j.at("keys").at("blocks")) {
      KeyMaterial km{t.params.k_users,
                     t.params.u_threshold,
                     t.params.t_collusion,
                     {},
                     {},
                     FpMat(static_cast<std::size_t>(t.params.k_users),
                           static_cast<std::size_t>(t.params.k_users), q)};
      for (const auto& v : block.at("n")) km.n.push_back(detail::vec_from_json(v, q));
      for (const auto& v : block.at("s")) km.s.push_back(detail::vec_from_json(v, q));
      const auto& proj = block.at("proj");
      for (std::size_t i = 0; i < proj.size(); ++i) {
        km.proj.set(i / t.params.k_users, i % t.params.k_users, proj[i].get<std::uint64_t>());
      }
      secrets.blocks.push_back(std::move(km));
    }
    t.keys = std::move(secrets);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Sweep reports and violation records
// ---------------------------------------------------------------------------

inline nlohmann::json violation_to_json(const SecurityReport& r, const ProtocolParams& p) {
  nlohmann::json j;
  j["check"] = "security";
  j["params"] = params_to_json(p);
  j["u"] = r.adversary;
  j["collusion"] = r.collusion;
  j["u1"] = r.u1;
  j["u2"] = nullptr;
  j["mi_value"] = r.mi;
  j["rank_terms"] = {{"view_given", r.rank_view_given},
                     {"inputs_given", r.rank_inputs_given},
                     {"joint_given", r.rank_joint_given}};
  return j;
}

inline nlohmann::json report_to_json(const SweepReport& r) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["params"] = params_to_json(r.params);
  j["params"]["break_pads"] = r.break_pads;
  j["mode"] = to_string(r.mode);
  j["schedules_tested"] = r.schedules_tested;
  j["seed"] = r.master_seed;
  j["num_seeds"] = r.num_seeds;
  j["runs"] = r.runs;
  j["correctness_failures"] = r.correctness_failures;
  j["security_checks"] = r.security_checks;
  j["security_violations"] = r.security_violations;
  j["max_mi"] = r.max_mi;
  j["r1"] = r.r1;
  j["r2"] = r.r2;
  j["wall_time_ms"] = r.wall_time_ms;
  j["violations"] = nlohmann::json::array();
  for (const auto& v : r.violations) j["violations"].push_back(violation_to_json(v, r.params));
  return j;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path + " for reading");
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace dsa
