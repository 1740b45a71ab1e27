#include "dsa/entropy.hpp"

#include <gtest/gtest.h>

#include "dsa/sim.hpp"
#include "test_support.hpp"

namespace dsa {
namespace {

ProtocolParams example1_params() { return make_params(4, 3, 0, 13); }
ProtocolParams example2_params() { return make_params(4, 3, 1, 13); }

TEST(SeedLayoutTest, DimensionsAndIndexing) {
  const SeedLayout layout(4, 3, 0);  // L = 2
  EXPECT_EQ(layout.dim(), 4u * 2 + 4u * 3);
  EXPECT_EQ(layout.w_index(1, 0), 0u);
  EXPECT_EQ(layout.w_index(4, 1), 7u);
  EXPECT_EQ(layout.n_index(1, 0), 8u);
  EXPECT_EQ(layout.s_index(1, 0), 16u);
  EXPECT_EQ(layout.s_index(4, 0), 19u);
  EXPECT_THROW(layout.w_index(5, 0), UsageError);
  EXPECT_THROW(layout.s_index(1, 1), UsageError);
  EXPECT_THROW(SeedLayout(4, 2, 1), UsageError);  // U <= T+1 has no mask block
}

TEST(EntropyTest, BasicValues) {
  const ObservableFactory f(example1_params(), dsa_test::example_alpha(13));
  EXPECT_EQ(entropy({f.w(1)}), 2u);  // H(W_k) = L
  EXPECT_EQ(entropy({}), 0u);
  EXPECT_EQ(entropy({f.z(1)}), 6u);
  EXPECT_EQ(entropy(f.all_keys()), 12u);
}

TEST(EntropyTest, LayoutMismatchRejected) {
  const ObservableFactory f1(example1_params(), dsa_test::example_alpha(13));
  const ObservableFactory f2(example2_params(), dsa_test::example_alpha(13));
  EXPECT_THROW(entropy({f1.w(1), f2.w(1)}), UsageError);  // different seed dims
}

TEST(CondEntropyTest, SelfConditioningIsZero) {
  const ObservableFactory f(example1_params(), dsa_test::example_alpha(13));
  EXPECT_EQ(cond_entropy({f.z(2)}, {f.z(2)}), 0u);
}

TEST(CondEntropyTest, MessagesAreDeterministicGivenLocalState) {
  // H(X_1 | W_1, Z_1) = 0 and H(Y_1 | W_1, Z_1) = 0.
  const ObservableFactory f(example1_params(), dsa_test::example_alpha(13));
  EXPECT_EQ(cond_entropy({f.x(1)}, {f.w(1), f.z(1)}), 0u);
  EXPECT_EQ(cond_entropy({f.y(1, {1, 2, 4})}, {f.w(1), f.z(1)}), 0u);
}

TEST(CondEntropyTest, WorkedExampleDecodeIsDeterministic) {
  // H(sum W | view of user 1) = 0 for U1 = U2 = {1,2,4}.
  const ObservableFactory f(example1_params(), dsa_test::example_alpha(13));
  const std::vector<UserId> u1{1, 2, 4};
  ObservableList view{f.x(2), f.x(4), f.y(2, u1), f.y(4, u1), f.w(1), f.z(1)};
  EXPECT_EQ(cond_entropy({f.sum_w(u1)}, view), 0u);
}

TEST(MutualInfoTest, ZeroWhenFullyConditioned) {
  const ObservableFactory f(example1_params(), dsa_test::example_alpha(13));
  const ObservableList a{f.w(1)};
  const ObservableList b{f.x(1)};
  EXPECT_EQ(mutual_info(a, b, detail::concat_lists(a, b)), 0);
}

TEST(MutualInfoTest, WorkedExample1SecurityArithmetic) {
  // The four entropy terms of the example-1 security computation evaluate to
  // 16, 10, 12 and 6; their combination 16 - 10 - (12 - 6) vanishes.
  const ObservableFactory f(example1_params(), dsa_test::example_alpha(13));
  const std::vector<UserId> u1{1, 2, 4};
  const std::size_t t1 =
      entropy({f.x(2), f.x(3), f.x(4), f.y(2, u1), f.y(4, u1), f.w(1), f.z(1)});
  const std::size_t t2 = entropy({f.sum_w(u1), f.w(1), f.z(1)});
  const std::size_t t3 = entropy(f.all_keys());
  const std::size_t t4 = entropy({f.z(1)});
  EXPECT_EQ(t1, 16u);
  EXPECT_EQ(t2, 10u);
  EXPECT_EQ(t3, 12u);
  EXPECT_EQ(t4, 6u);
  EXPECT_EQ(static_cast<long long>(t1) - static_cast<long long>(t2) -
                (static_cast<long long>(t3) - static_cast<long long>(t4)),
            0);
  EXPECT_EQ(check_security(f, 1, {}, u1).mi, 0);
}

TEST(MutualInfoTest, WorkedExample2SecurityArithmetic) {
  // With T = 1 and user 1 colluding with user 3: 15 - 13 - (12 - 10) = 0.
  const ObservableFactory f(example2_params(), dsa_test::example_alpha(13));
  const std::vector<UserId> u1{1, 2, 4};
  const std::size_t t1 =
      entropy({f.x(2), f.x(4), f.y(2, u1), f.w(1), f.z(1), f.w(3), f.z(3)});
  const std::size_t t2 = entropy({f.sum_w(u1), f.w(1), f.z(1), f.w(3), f.z(3)});
  const std::size_t t3 = entropy(f.all_keys());
  const std::size_t t4 = entropy({f.z(1), f.z(3)});
  EXPECT_EQ(t1, 15u);
  EXPECT_EQ(t2, 13u);
  EXPECT_EQ(t3, 12u);
  EXPECT_EQ(t4, 10u);
  EXPECT_EQ(check_security(f, 1, {3}, u1).mi, 0);
}

LinearObservable random_observable(Rng& rng, std::size_t dim, std::uint64_t q) {
  FpMat m(1 + rng.below(4), dim, q);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < dim; ++c) m.set(r, c, rng.below(q));
  }
  return {"random", std::move(m)};
}

TEST(MutualInfoTest, SymmetricAndNonnegativeOnRandomObservables) {
  Rng rng(17);
  for (int i = 0; i < 300; ++i) {
    const std::size_t dim = 3 + rng.below(6);
    const ObservableList a{random_observable(rng, dim, 11)};
    const ObservableList b{random_observable(rng, dim, 11)};
    const ObservableList c{random_observable(rng, dim, 11)};
    const long long ab = mutual_info(a, b, c);
    ASSERT_EQ(ab, mutual_info(b, a, c));
    ASSERT_GE(ab, 0);
  }
}

TEST(CondEntropyTest, ConditioningNeverIncreasesEntropy) {
  Rng rng(18);
  for (int i = 0; i < 300; ++i) {
    const std::size_t dim = 3 + rng.below(6);
    const ObservableList a{random_observable(rng, dim, 11)};
    const ObservableList b{random_observable(rng, dim, 11)};
    const ObservableList c{random_observable(rng, dim, 11)};
    ASSERT_LE(cond_entropy(a, detail::concat_lists(b, c)), cond_entropy(a, b));
  }
}

TEST(PrefixSumIndependenceTest, PrefixSumsAreIndependentOfSmallerViews) {
  // For V0 < V1, V0 < V2, V1 != V2: the sum over [V1] is independent of the
  // sum over [V2] jointly with the first V0 users' inputs and keys.
  Rng rng(19);
  const auto params = make_params(5, 4, 1, 65537);
  const PrivateMdsMatrix alpha = find_private_mds(5, 4, 1, 65537, rng);
  const ObservableFactory f(params, alpha.alpha);
  auto prefix = [](int n) {
    std::vector<UserId> out;
    for (int k = 1; k <= n; ++k) out.push_back(k);
    return out;
  };
  for (int v0 = 0; v0 <= 5; ++v0) {
    for (int v1 = 1; v1 <= 5; ++v1) {
      for (int v2 = 1; v2 <= 5; ++v2) {
        if (!(v0 < v1 && v0 < v2 && v1 != v2)) continue;
        ObservableList a{f.sum_w(prefix(v1))};
        ObservableList b{f.sum_w(prefix(v2))};
        for (int k = 1; k <= v0; ++k) {
          b.push_back(f.w(k));
          b.push_back(f.z(k));
        }
        ASSERT_EQ(mutual_info(a, b), 0) << "V0=" << v0 << " V1=" << v1 << " V2=" << v2;
      }
    }
  }
}

TEST(OracleSoundnessTest, RankMatchesExhaustiveEnumeration) {
  // Rank-based entropy equals brute-force Shannon entropy for random linear
  // observables over tiny fields.
  Rng rng(20);
  const struct {
    std::uint64_t q;
    std::size_t dim;
  } cases[] = {{2, 10}, {3, 7}, {5, 6}};
  for (const auto& c : cases) {
    for (int i = 0; i < 10; ++i) {
      FpMat m(1 + rng.below(5), c.dim, c.q);
      for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t col = 0; col < c.dim; ++col) m.set(r, col, rng.below(c.q));
      }
      const auto h = dsa_test::brute_force_entropy(m);
      ASSERT_TRUE(h.has_value()) << "distribution not uniform?!";
      ASSERT_EQ(*h, rank(m)) << "q=" << c.q;
    }
  }
}

TEST(OracleSoundnessTest, ConditionalRankMatchesExhaustiveEnumeration) {
  Rng rng(21);
  for (int i = 0; i < 10; ++i) {
    const std::uint64_t q = 3;
    const std::size_t dim = 6;
    FpMat a(1 + rng.below(3), dim, q);
    FpMat b(1 + rng.below(3), dim, q);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      for (std::size_t c = 0; c < dim; ++c) a.set(r, c, rng.below(q));
    }
    for (std::size_t r = 0; r < b.rows(); ++r) {
      for (std::size_t c = 0; c < dim; ++c) b.set(r, c, rng.below(q));
    }
    const auto h = dsa_test::brute_force_cond_entropy(a, b);
    ASSERT_TRUE(h.has_value());
    ASSERT_EQ(*h, cond_entropy({LinearObservable{"a", a}}, {LinearObservable{"b", b}}));
  }
}

TEST(SecurityCheckTest, SchemePassesEverywhereOnExample1) {
  const ObservableFactory f(example1_params(), dsa_test::example_alpha(13));
  for (UserId u = 1; u <= 4; ++u) {
    for (const auto& u1 : enumerate_survivor_sets(4, 3)) {
      const SecurityReport rep = check_security(f, u, {}, u1);
      ASSERT_TRUE(rep.pass()) << "u=" << u << " u1={" << join_ids(u1) << "} mi=" << rep.mi;
    }
  }
}

TEST(SecurityCheckTest, ZeroedPadsLeakForPositiveT) {
  // Negative control: with the pads stripped, a colluding pair learns masks
  // and hence inputs; the oracle must report strictly positive leakage.
  const ObservableFactory broken(example2_params(), dsa_test::example_alpha(13),
                                 /*zero_pads=*/true);
  const SecurityReport rep = check_security(broken, 1, {3}, {1, 2, 4});
  EXPECT_GT(rep.mi, 0);
}

TEST(SecurityCheckTest, InputValidation) {
  const ObservableFactory f(example2_params(), dsa_test::example_alpha(13));
  EXPECT_THROW(check_security(f, 1, {1}, {1, 2, 4}), UsageError);     // u in collusion
  EXPECT_THROW(check_security(f, 1, {2, 3}, {1, 2, 4}), UsageError);  // |T-set| > T
  EXPECT_THROW(check_security(f, 1, {2}, {1, 2}), UsageError);        // |u1| < U
  EXPECT_THROW(check_security(f, 9, {2}, {1, 2, 4}), UsageError);     // bad id
}

TEST(CorrectnessRankTest, PassesOnValidPatternsAndDetectsUnderdeterminedSystems) {
  const ObservableFactory f(example1_params(), dsa_test::example_alpha(13));
  EXPECT_TRUE(check_correctness_rank(f, 1, {1, 2, 4}, {1, 2, 4}).pass());
  EXPECT_TRUE(check_correctness_rank(f, 2, {1, 2, 3, 4}, {1, 2, 4}).pass());
  // |u2| = U - 1 leaves the key system underdetermined: residual entropy > 0.
  const CorrectnessRankReport deficient = check_correctness_rank(f, 1, {1, 2, 3, 4}, {1, 2});
  EXPECT_FALSE(deficient.pass());
  EXPECT_GT(deficient.residual_entropy, 0u);
}

}  // namespace
}  // namespace dsa
