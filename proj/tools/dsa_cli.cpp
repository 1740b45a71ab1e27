// Command-line driver: pin key-projection matrices, sweep dropout schedules
// for correctness and exact security, and replay stored transcripts.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dsa/dsa.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitConfigError = 2;

int threads_from_env() {
  if (const char* v = std::getenv("DSA_THREADS")) {
    const int n = std::atoi(v);
    if (n > 1) return n;
  }
  return 1;
}

std::vector<dsa::UserId> parse_id_list(const std::string& spec) {
  std::vector<dsa::UserId> out;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t next = spec.find(',', pos);
    if (next == std::string::npos) next = spec.size();
    out.push_back(std::stoi(spec.substr(pos, next - pos)));
    pos = next + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// --schedules accepts: all | random:N | u1=1,2,4;u2=1,2
std::vector<dsa::DropoutSchedule> resolve_schedules(const std::string& spec,
                                                    const dsa::ProtocolParams& params,
                                                    dsa::Rng& rng) {
  if (spec == "all") return dsa::enumerate_schedules(params);
  if (spec.rfind("random:", 0) == 0) {
    const int n = std::stoi(spec.substr(7));
    if (n < 1) throw dsa::UsageError("--schedules random:N requires N >= 1");
    std::vector<dsa::DropoutSchedule> out;
    for (int i = 0; i < n; ++i) {
      out.push_back(dsa::random_schedule(params.k_users, params.u_threshold, rng));
    }
    return out;
  }
  const std::size_t sep = spec.find(';');
  if (spec.rfind("u1=", 0) == 0 && sep != std::string::npos && spec.find("u2=", sep) == sep + 1) {
    dsa::DropoutSchedule s{parse_id_list(spec.substr(3, sep - 3)),
                           parse_id_list(spec.substr(sep + 4))};
    dsa::validate_schedule(params.k_users, params.u_threshold, s);
    return {s};
  }
  throw dsa::UsageError("--schedules must be 'all', 'random:N' or 'u1=...;u2=...'");
}

dsa::SweepMode parse_mode(const std::string& mode) {
  if (mode == "correctness") return dsa::SweepMode::correctness;
  if (mode == "security") return dsa::SweepMode::security;
  if (mode == "both") return dsa::SweepMode::both;
  throw dsa::UsageError("--mode must be correctness, security or both");
}

struct FindMatrixArgs {
  int k = 0, u = 0, t = 0;
  std::uint64_t q = 65537;
  std::uint64_t seed = 0;
  std::string out = "matrix.json";
};

int cmd_find_matrix(const FindMatrixArgs& a) {
  dsa::Rng rng(a.seed);
  const dsa::PrivateMdsMatrix m = dsa::find_private_mds(a.k, a.u, a.t, a.q, rng);
  dsa::save_json(a.out, dsa::matrix_to_json(m));
  std::cout << "certified " << m.alpha.rows() << "x" << m.alpha.cols() << " matrix over F_" << a.q
            << " (" << dsa::matrix_fingerprint(m) << ") -> " << a.out << "\n";
  return kExitOk;
}

struct SweepArgs {
  int k = 0, u = 0, t = 0;
  std::uint64_t q = 65537;
  int blocks = 1;
  std::uint64_t seed = 0;
  std::size_t num_seeds = 1;
  std::string schedules = "all";
  std::string mode = "both";
  std::string out;
  std::string matrix_path;
  std::string transcript_path;
  bool break_pads = false;
  bool reveal_keys = false;
  bool verify_subsets = false;
};

int cmd_sweep(const SweepArgs& a) {
  const dsa::ProtocolParams params = dsa::make_params(a.k, a.u, a.t, a.q, a.blocks);

  dsa::Rng rng(a.seed);
  dsa::Rng matrix_rng = rng.child(100);
  dsa::Rng schedule_rng = rng.child(101);

  dsa::PrivateMdsMatrix matrix =
      a.matrix_path.empty() ? dsa::find_private_mds(a.k, a.u, a.t, a.q, matrix_rng)
                            : dsa::matrix_from_json(dsa::load_json(a.matrix_path));
  dsa::check_matrix_for_params(params, matrix);

  dsa::SweepConfig cfg;
  cfg.mode = parse_mode(a.mode);
  cfg.schedules = resolve_schedules(a.schedules, params, schedule_rng);
  cfg.security_all_u1 = (a.schedules == "all");
  cfg.num_seeds = a.num_seeds;
  cfg.master_seed = a.seed;
  cfg.run.deal.zero_pads = a.break_pads;
  cfg.run.reveal_keys = a.reveal_keys;
  cfg.run.verify_decode_subsets = a.verify_subsets;
  cfg.threads = threads_from_env();
  cfg.capture_first_transcript = !a.transcript_path.empty();

  const dsa::SweepReport report = dsa::sweep(params, matrix, cfg);

  if (!a.out.empty()) dsa::save_json(a.out, dsa::report_to_json(report));
  if (!a.transcript_path.empty() && report.first_transcript) {
    dsa::save_json(a.transcript_path, dsa::transcript_to_json(*report.first_transcript));
  }

  std::cout << "schedules=" << report.schedules_tested << " runs=" << report.runs
            << " correctness_failures=" << report.correctness_failures
            << " security_checks=" << report.security_checks
            << " violations=" << report.security_violations << " max_mi=" << report.max_mi
            << " r1=" << report.r1 << " r2=" << report.r2 << "\n";
  if (!report.ok()) {
    std::cerr << "sweep: verification failed\n";
    return kExitVerificationFailed;
  }
  return kExitOk;
}

struct ReplayArgs {
  std::string transcript_path;
  std::string matrix_path;
};

int cmd_replay(const ReplayArgs& a) {
  const dsa::Transcript t = dsa::transcript_from_json(dsa::load_json(a.transcript_path));
  const dsa::PrivateMdsMatrix matrix = dsa::matrix_from_json(dsa::load_json(a.matrix_path));
  const dsa::ReplayResult res = dsa::replay_transcript(t, matrix);
  if (!res.ok) {
    for (const auto& issue : res.issues) std::cerr << "replay: " << issue << "\n";
    return kExitVerificationFailed;
  }
  std::cout << "replay: " << t.decoded.size() << " decoders re-verified against "
            << t.matrix_ref << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-round decentralized secure aggregation: simulate, verify, replay"};
  app.require_subcommand(1);

  FindMatrixArgs fm;
  CLI::App* find = app.add_subcommand("find-matrix", "search and certify a key-projection matrix");
  find->add_option("--k", fm.k, "number of users K")->required();
  find->add_option("--u", fm.u, "survivor threshold U")->required();
  find->add_option("--t", fm.t, "collusion bound T")->required();
  find->add_option("--q", fm.q, "prime field modulus");
  find->add_option("--seed", fm.seed, "search seed");
  find->add_option("--out", fm.out, "output matrix file");

  SweepArgs sw;
  CLI::App* swp = app.add_subcommand("sweep", "run dropout schedules and exact security checks");
  swp->add_option("--k", sw.k, "number of users K")->required();
  swp->add_option("--u", sw.u, "survivor threshold U")->required();
  swp->add_option("--t", sw.t, "collusion bound T")->required();
  swp->add_option("--q", sw.q, "prime field modulus (odd)");
  swp->add_option("--blocks", sw.blocks, "input blocks per run");
  swp->add_option("--seed", sw.seed, "master seed; all randomness derives from it");
  swp->add_option("--num-seeds", sw.num_seeds, "instances per schedule");
  swp->add_option("--schedules", sw.schedules, "all | random:N | u1=...;u2=...");
  swp->add_option("--mode", sw.mode, "correctness | security | both");
  swp->add_option("--out", sw.out, "report file");
  swp->add_option("--matrix", sw.matrix_path, "pinned matrix file (default: search)");
  swp->add_option("--transcript", sw.transcript_path, "store the first run's transcript");
  swp->add_flag("--break-pads", sw.break_pads, "fault injection: zero the S pads");
  swp->add_flag("--reveal-keys", sw.reveal_keys, "embed dealt keys in the transcript (secret-revealing)");
  swp->add_flag("--verify-subsets", sw.verify_subsets, "cross-check every decode equation subset");

  ReplayArgs rp;
  CLI::App* rep = app.add_subcommand("replay", "re-verify a stored transcript");
  rep->add_option("--transcript", rp.transcript_path, "transcript file")->required();
  rep->add_option("--matrix", rp.matrix_path, "matrix file the transcript is pinned to")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (find->parsed()) return cmd_find_matrix(fm);
    if (swp->parsed()) return cmd_sweep(sw);
    if (rep->parsed()) return cmd_replay(rp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
