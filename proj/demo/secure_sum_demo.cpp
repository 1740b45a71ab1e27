// Minimal end-to-end walkthrough: five users aggregate their inputs, one user
// drops out mid-protocol, and the survivors still recover the sum of the
// round-1 survivors' inputs -- while an exact rank check confirms that a
// colluding pair learns nothing beyond that sum.

#include <iostream>

#include "dsa/dsa.hpp"

int main() {
  using namespace dsa;

  const auto params = make_params(/*k_users=*/5, /*u_threshold=*/3, /*t_collusion=*/1,
                                  /*q=*/65537);
  Rng rng(2024);
  const PrivateMdsMatrix matrix =
      find_private_mds(params.k_users, params.u_threshold, params.t_collusion, params.q, rng);
  std::cout << "matrix: " << matrix.alpha.rows() << "x" << matrix.alpha.cols() << " over F_"
            << params.q << ", " << matrix_fingerprint(matrix) << "\n";

  // User 4 drops in round 1, user 2 additionally drops in round 2.
  const DropoutSchedule schedule{{1, 2, 3, 5}, {1, 3, 5}};
  const Transcript t = run_instance(params, matrix, schedule, /*seed=*/7);

  std::cout << "u1={" << join_ids(schedule.u1) << "} u2={" << join_ids(schedule.u2) << "}\n";
  for (const auto& [user, sum] : t.decoded) {
    std::cout << "user " << user << " decoded [";
    for (std::size_t i = 0; i < sum.size(); ++i) {
      std::cout << (i ? "," : "") << sum[i].value();
    }
    std::cout << "] " << (sum == t.plaintext_sum ? "== plaintext sum" : "MISMATCH") << "\n";
  }

  const ObservableFactory factory(params, matrix.alpha);
  const SecurityReport sec = check_security(factory, /*u=*/1, /*collusion=*/{3}, schedule.u1);
  std::cout << "leakage beyond the sum for adversary 1 colluding with 3: " << sec.mi
            << " q-ary units\n";
  return sec.pass() && t.decoded.size() == schedule.u2.size() ? 0 : 1;
}
