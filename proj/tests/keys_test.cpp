#include "dsa/keys.hpp"

#include <gtest/gtest.h>

#include "dsa/entropy.hpp"
#include "test_support.hpp"

namespace dsa {
namespace {

PrivateMdsMatrix example_matrix(std::uint64_t q, std::size_t t_plus_1) {
  // The worked-example instantiation with columns (1, 2^{k-1}, 3^{k-1}).
  return PrivateMdsMatrix{dsa_test::example_alpha(q), FpVec::of(q, {1, 2, 3, 4}), t_plus_1};
}

TEST(DealKeysTest, DimensionsMatchParameters) {
  Rng rng(1);
  const PrivateMdsMatrix alpha = find_private_mds(5, 4, 1, 65537, rng);
  const KeyMaterial km = deal_keys(alpha, rng);
  EXPECT_EQ(km.k_users, 5);
  ASSERT_EQ(km.n.size(), 5u);
  ASSERT_EQ(km.s.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(km.n[i].size(), 2u);  // U - T - 1
    EXPECT_EQ(km.s[i].size(), 2u);  // T + 1
  }
  EXPECT_EQ(km.proj.rows(), 5u);
  EXPECT_EQ(km.proj.cols(), 5u);
}

TEST(DealKeysTest, ProjectionsMatchExampleFormulas) {
  // With the worked-example matrix and T=0, user 2's share of user i's keys is
  // N_i(1) + 2 N_i(2) + 3 S_i, and user 1's is N_i(1) + N_i(2) + S_i.
  const std::uint64_t q = 13;
  Rng rng(2);
  const KeyMaterial km = deal_keys(example_matrix(q, 1), rng);
  const KeyBundle z1 = bundle_for(km, 1);
  const KeyBundle z2 = bundle_for(km, 2);
  for (int i = 1; i <= 4; ++i) {
    const Fp n1 = km.n[i - 1][0];
    const Fp n2 = km.n[i - 1][1];
    const Fp s = km.s[i - 1][0];
    ASSERT_EQ(z1.proj_row[i - 1], n1 + n2 + s);
    ASSERT_EQ(z2.proj_row[i - 1], n1 + Fp(2, q) * n2 + Fp(3, q) * s);
  }
}

TEST(DealKeysTest, ZeroRandomnessDebugMode) {
  Rng rng(3);
  const KeyMaterial km =
      deal_keys(example_matrix(13, 1), rng, DealOptions{/*zero_masks=*/true, /*zero_pads=*/true});
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) EXPECT_EQ(km.proj.at(i, k), 0u);
  }
}

TEST(DealKeysTest, StoredProjectionsMatchRecomputation) {
  Rng rng(4);
  const PrivateMdsMatrix alpha = find_private_mds(6, 4, 2, 65537, rng);
  const KeyMaterial km = deal_keys(alpha, rng);
  EXPECT_EQ(recompute_projections(km, alpha), km.proj);
}

TEST(DealKeysTest, RejectsMatrixWithoutMaskBlock) {
  // t_privacy == U leaves no mask coordinates; dealing must refuse.
  const FpVec points = FpVec::of(11, {1, 2, 3, 4});
  const PrivateMdsMatrix degenerate{build_vandermonde(2, points), points, 2};
  Rng rng(5);
  EXPECT_THROW(deal_keys(degenerate, rng), UsageError);
}

TEST(BundleTest, ComponentsAndRecombination) {
  Rng rng(6);
  const PrivateMdsMatrix alpha = find_private_mds(4, 3, 1, 65537, rng);
  const KeyMaterial km = deal_keys(alpha, rng);
  FpMat rebuilt(4, 4, 65537);
  for (UserId k = 1; k <= 4; ++k) {
    const KeyBundle b = bundle_for(km, k);
    EXPECT_EQ(b.owner, k);
    EXPECT_EQ(b.n_k, km.n[k - 1]);  // own mask only; no other user's N appears
    ASSERT_EQ(b.proj_row.size(), 4u);
    for (int i = 0; i < 4; ++i) rebuilt.set(i, k - 1, b.proj_row[i]);
  }
  EXPECT_EQ(rebuilt, km.proj);
  EXPECT_THROW(bundle_for(km, 0), UsageError);
  EXPECT_THROW(bundle_for(km, 5), UsageError);
}

TEST(KeyEntropyTest, AccountingMatchesDesign) {
  // H(N_k) = U-T-1, H(S_k) = T+1, and all key symbols are jointly uniform:
  // H(keys) = K*U. For the worked example that joint entropy is 12.
  const auto params = make_params(4, 3, 0, 13);
  const ObservableFactory f(params, dsa_test::example_alpha(13));
  EXPECT_EQ(entropy({f.n(1)}), 2u);
  EXPECT_EQ(entropy({f.s(1)}), 1u);
  EXPECT_EQ(entropy(f.all_keys()), 12u);
  EXPECT_EQ(entropy({f.z(1)}), 6u);
}

TEST(KeyEntropyTest, ProjectionsIndependentOfMasksForSmallSubsets) {
  // (T+1)-privacy: up to T+1 users' projection rows say nothing about any
  // mask, exactly.
  const auto params = make_params(4, 3, 1, 65537);
  Rng rng(7);
  const PrivateMdsMatrix alpha = find_private_mds(4, 3, 1, 65537, rng);
  const ObservableFactory f(params, alpha.alpha);
  for (const auto& subset : std::vector<std::vector<UserId>>{
           {1}, {2}, {3}, {4}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}) {
    ObservableList projections;
    for (UserId k : subset) {
      for (UserId i = 1; i <= 4; ++i) projections.push_back(f.proj(i, k));
    }
    ASSERT_EQ(mutual_info(projections, f.all_n()), 0) << "subset {" << join_ids(subset) << "}";
  }
}

TEST(KeyEntropyTest, BundlesRevealNothingAboutOutsideMasks) {
  // The joint view (N_k, all projections) of any subset of
  // size <= T+1 is independent of every other user's mask.
  const auto params = make_params(4, 3, 1, 65537);
  Rng rng(8);
  const PrivateMdsMatrix alpha = find_private_mds(4, 3, 1, 65537, rng);
  const ObservableFactory f(params, alpha.alpha);
  for (const auto& subset : std::vector<std::vector<UserId>>{
           {1}, {4}, {1, 2}, {1, 4}, {2, 3}, {3, 4}}) {
    ObservableList bundle_view;
    for (UserId k : subset) bundle_view.push_back(f.z(k));
    ObservableList outside_masks;
    for (UserId i = 1; i <= 4; ++i) {
      if (!set_contains(subset, i)) outside_masks.push_back(f.n(i));
    }
    ASSERT_EQ(mutual_info(outside_masks, bundle_view), 0)
        << "subset {" << join_ids(subset) << "}";
  }
}

}  // namespace
}  // namespace dsa
