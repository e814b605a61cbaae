/*
 * Copyright 2026 The cram Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include "cram/evaluate.hpp"
#include "cram/exact.hpp"
#include "cram/heuristic.hpp"
#include "cram/io.hpp"
#include "cram/validate.hpp"
#include "support.hpp"

namespace cram {
namespace {

using testing::colocated_instance;
using testing::two_site_instance;

AllocationState prepared(const Instance& in, int min_mixer, int max_user, std::vector<std::size_t> order) {
  AllocationState s(in);
  s.min_mixer = min_mixer;
  s.max_user = max_user;
  s.order = std::move(order);
  return s;
}

TEST(MinMixers, EightUsersDefaultBound) {
  const MinMixers m = min_mixers(colocated_instance(8));
  EXPECT_EQ(m.min_mixer, 1);
  EXPECT_EQ(m.max_user, 8);
  EXPECT_NEAR(m.handling_time_ms, 54.0, 1e-12);
}

TEST(MinMixers, EightUsersFiftyMs) {
  const MinMixers m = min_mixers(colocated_instance(8, 50.0));
  EXPECT_EQ(m.min_mixer, 2);
  EXPECT_EQ(m.max_user, 4);
  EXPECT_NEAR(m.handling_time_ms, 36.0, 1e-12);
}

TEST(MinMixers, RisingHandlingTimeIsInfeasible) {
  try {
    min_mixers(colocated_instance(8, 10.0));
    FAIL() << "expected infeasibility";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.phase(), "min_mixers");
    EXPECT_NE(e.reason().find("36.000 to 42.000 ms at 5 mixers"), std::string::npos) << e.reason();
    ASSERT_TRUE(e.last_handling_time_ms());
    EXPECT_NEAR(*e.last_handling_time_ms(), 36.0, 1e-12);
  }
}

TEST(MinMixers, AgreesWithScan) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> users(2, 400);
  std::uniform_real_distribution<double> bound(5.0, 300.0);
  for (int i = 0; i < 200; ++i) {
    const int n = users(rng);
    const Instance in = colocated_instance(static_cast<std::size_t>(n), bound(rng));
    const auto want = testing::scan_min_mixers(n, in.qos().max_delay_ms, in.media(), 10240.0);
    try {
      const MinMixers got = min_mixers(in);
      EXPECT_TRUE(want.feasible);
      EXPECT_EQ(got.min_mixer, want.min_mixer);
      EXPECT_EQ(got.max_user, want.max_user);
    } catch (const InfeasibleError&) {
      EXPECT_FALSE(want.feasible);
    }
  }
}

TEST(Dsort, ColocatedServerFirst) {
  const Instance in = two_site_instance(20.0, {1, 1, 1});
  EXPECT_EQ(dsort(in.servers(), in.participants(), in.network()), (std::vector<std::size_t>{1, 0}));
}

TEST(Dsort, TiesKeepInputOrder) {
  const Instance in = two_site_instance(20.0, {0, 1});
  EXPECT_EQ(dsort(in.servers(), in.participants(), in.network()), (std::vector<std::size_t>{0, 1}));
}

TEST(Dsort, MatchesSortBySum) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance in = testing::random_instance(rng, 10, 5, 3, 100.0);
    const auto order = dsort(in.servers(), in.participants(), in.network());
    std::vector<std::pair<double, std::size_t>> keyed;
    for (std::size_t s = 0; s < 5; ++s) {
      double sum = 0.0;
      for (std::size_t u = 0; u < 10; ++u) sum += in.network().time(s, in.participant_site(u));
      keyed.push_back({sum, s});
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(order[i], keyed[i].second);
  }
}

TEST(PlaceMixers, OneMixerLeavesRemainder) {
  const Instance in = colocated_instance(8);
  AllocationState s = prepared(in, 1, 8, {0});
  place_mixers(s, in);
  EXPECT_EQ(s.mixers_per_server[0].size(), 1u);
  EXPECT_NEAR(s.remaining_capacity[0], 9680.0, 1e-9);
  EXPECT_EQ(s.used_servers, (std::vector<std::size_t>{0}));
}

TEST(PlaceMixers, OnePerServerInVisitingOrder) {
  std::vector<ServerSpec> sv(4, ServerSpec{0, 600.0, 0.01});
  std::vector<Participant> ps;
  for (int u = 0; u < 9; ++u) ps.push_back({"u" + std::to_string(u), 0});
  const Instance in(sv, ps, NetworkMatrix::with_linear_cost(testing::named_sites(1), Eigen::MatrixXd::Zero(1, 1), 0.01));
  AllocationState s = prepared(in, 3, 3, {2, 0, 3, 1});
  place_mixers(s, in);
  EXPECT_EQ(s.used_servers, (std::vector<std::size_t>{2, 0, 3}));
  EXPECT_TRUE(s.mixers_per_server[1].empty());
}

TEST(PlaceMixers, NoFreeCapacityIsInfeasible) {
  const Instance in = colocated_instance(8);
  AllocationState s = prepared(in, 1, 8, {0});
  s.remaining_capacity[0] = 0.0;
  try {
    place_mixers(s, in);
    FAIL() << "expected infeasibility";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.phase(), "place_mixers");
  }
}

TEST(InterMixer, SingleServerMixTime) {
  const Instance in = colocated_instance(8);
  AllocationState s = prepared(in, 1, 8, {0});
  place_mixers(s, in);
  inter_mixer_compress(s, in);
  EXPECT_NEAR(s.mix_time_per_server[0], 48.0 + 6.0 + 6.0, 1e-12);
  EXPECT_EQ(s.vms.size(), 1u);
}

TEST(InterMixer, DistantServersGetCompressorsAndCap) {
  // Server 0 fits one mixer, its join stream and one compressor.
  const Instance in = two_site_instance(500.0, {0, 0, 0, 0, 1, 1, 1, 1}, {920.0, 10240.0});
  AllocationState s = prepared(in, 2, 4, {0, 1});
  place_mixers(s, in);
  ASSERT_EQ(s.used_servers.size(), 2u);
  inter_mixer_compress(s, in);
  int compressors = 0;
  for (const auto& v : s.vms) compressors += v.is_compressor();
  EXPECT_EQ(compressors, 2);
  EXPECT_NEAR(s.mix_time_per_server[0], 400.0, 1e-12);
  EXPECT_NEAR(s.mix_time_per_server[1], 400.0, 1e-12);
}

TEST(InterMixer, NearbyServersNeedNoCompressor) {
  const Instance in = two_site_instance(1.0, {0, 0, 0, 0, 1, 1, 1, 1}, {500.0, 10240.0});
  AllocationState s = prepared(in, 2, 4, {0, 1});
  place_mixers(s, in);
  inter_mixer_compress(s, in);
  for (const auto& v : s.vms) EXPECT_TRUE(v.is_mixer());
  EXPECT_NEAR(s.mix_time_per_server[0], 24.0 + 6.0 + 12.0 + 1.0, 1e-12);
}

TEST(Compress, PicksColocatedServerWithMinimalRate) {
  const Instance in = two_site_instance(300.0, {0, 1});
  AllocationState s = prepared(in, 1, 2, {1, 0});
  place_mixers(s, in);
  const CompressOutcome out = compress({SenderKind::kParticipant, 0}, 1, 0, 50.0, s, in);
  EXPECT_EQ(out.chosen_server, 0u);
  EXPECT_TRUE(out.new_vm_created);
  // 300 ms hop must shrink by 50 plus the compressor's 6 ms.
  EXPECT_NEAR(out.real_rate, 56.0 / 300.0, 1e-12);
  EXPECT_LE(out.real_rate, 0.95);
}

TEST(Compress, ReusesPooledCompressorWithoutOverhead) {
  const Instance in = two_site_instance(300.0, {0, 0, 1});
  AllocationState s = prepared(in, 1, 3, {1, 0});
  place_mixers(s, in);
  const CompressOutcome first = compress({SenderKind::kParticipant, 0}, 1, 0, 50.0, s, in);
  const double before = s.remaining_capacity[0];
  const CompressOutcome second = compress({SenderKind::kParticipant, 1}, 1, 0, 50.0, s, in);
  EXPECT_FALSE(second.new_vm_created);
  EXPECT_EQ(second.compressor_vm, first.compressor_vm);
  EXPECT_NEAR(before - s.remaining_capacity[0], 20.0, 1e-12);
}

TEST(Compress, BeyondRateCapIsInfeasible) {
  const Instance in = two_site_instance(300.0, {0, 1});
  AllocationState s = prepared(in, 1, 2, {1, 0});
  place_mixers(s, in);
  EXPECT_THROW(compress({SenderKind::kParticipant, 0}, 1, 0, 290.0, s, in), InfeasibleError);
}

TEST(Acs, NearestServerWithRoom) {
  const Instance in = two_site_instance(10.0, {0, 1, 1});
  AllocationState s = prepared(in, 2, 2, {0, 1});
  s.remaining_capacity[0] = 460.0;
  place_mixers(s, in);
  EXPECT_EQ(acs(1, s, in).server, 1u);
  EXPECT_EQ(acs(2, s, in).server, 1u);
  // Server 1's mixer is now full.
  EXPECT_EQ(acs(0, s, in).server, 0u);
}

TEST(Acs, LeastLoadedMixerOnServer) {
  const Instance in = colocated_instance(6);
  AllocationState s = prepared(in, 2, 4, {0});
  place_mixers(s, in);
  auto& mixers = s.mixers_per_server[0];
  mixers[0].participants = 3;
  mixers[1].participants = 1;
  const AcsChoice c = acs(0, s, in);
  EXPECT_EQ(c.mixer_vm, mixers[1].vm);
  EXPECT_EQ(mixers[1].participants, 2);
}

TEST(Assign, ColocatedDelayIsMixTime) {
  const Instance in = colocated_instance(5);
  AllocationState s = prepared(in, 1, 5, {0});
  place_mixers(s, in);
  inter_mixer_compress(s, in);
  const Plan p = assign_participants(s, in);
  for (double d : p.per_participant_delay) EXPECT_NEAR(d, s.mix_time_per_server[0], 1e-12);
}

TEST(Assign, DistantParticipantIsCompressedToTheBound) {
  // Participant 2 sits 200 ms from the mixer server; its own site hosts the compressor.
  const Instance in = two_site_instance(200.0, {0, 0, 1});
  const Plan p = cram_allocate(in);
  EXPECT_EQ(p.compressor_count(), 1u);
  EXPECT_NEAR(p.per_participant_delay[2], 400.0, 1e-9);
  EXPECT_TRUE(validate_plan(p, in, DelayModel::kForkJoin).empty());
}

TEST(CramAllocate, EightColocatedUsers) {
  const Instance in = colocated_instance(8);
  const Plan p = cram_allocate(in);
  EXPECT_EQ(p.mixer_count(), 1u);
  EXPECT_EQ(p.compressor_count(), 0u);
  const PlanMetrics m = metrics(p, in);
  EXPECT_NEAR(m.max_delay, 60.0, 1e-12);
  EXPECT_NEAR(m.server_cost, 5.60, 1e-12);
  // The exact search finds the same plan feasible.
  EXPECT_TRUE(validate_plan(p, in, DelayModel::kIlp).empty());
}

TEST(CramAllocate, SeattleMixerForTwoCityCase) {
  const Instance in = load_instance(std::string(CRAM_DATA_DIR) + "/instances/seattle_toronto.json");
  const Plan p = cram_allocate(in);
  ASSERT_EQ(p.mixer_count(), 1u);
  for (const auto& v : p.vms)
    if (v.is_mixer()) {
      EXPECT_EQ(in.network().sites()[in.server_site(v.server)].name, "Seattle");
    }
  SearchBounds b;
  b.max_participants = 8;
  const Plan opt = brute_force_optimal(in, b);
  EXPECT_EQ(p.compressor_count(), opt.compressor_count());
}

TEST(CramAllocate, Deterministic) {
  std::mt19937_64 rng(3);
  const Instance in = testing::planar_instance(rng, 120, 8, 30.0);
  const Plan a = cram_allocate(in);
  const Plan b = cram_allocate(in);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(plan_to_json(a, in).dump(), plan_to_json(b, in).dump());
}

TEST(CramAllocate, PlansAreStructurallyValidAndOnTime) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> users(2, 150), servers(1, 10);
  int feasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const Instance in = testing::planar_instance(rng, users(rng), servers(rng), 120.0);
    try {
      const Plan p = cram_allocate(in);
      ++feasible;
      for (const auto& v : validate_plan(p, in, DelayModel::kForkJoin)) ADD_FAILURE() << v.message;
    } catch (const InfeasibleError&) {
    }
  }
  EXPECT_GT(feasible, 50);
}

TEST(CramAllocate, NeverCheaperThanExact) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance in = testing::random_instance(rng, 2 + trial % 3, 1 + trial % 3, 1, 120.0);
    Plan h;
    try {
      h = cram_allocate(in);
    } catch (const InfeasibleError&) {
      continue;
    }
    // A heuristic plan that is also valid under the exact semantics bounds the optimum.
    if (!validate_plan(h, in, DelayModel::kIlp).empty()) continue;
    const Plan opt = brute_force_optimal(in);
    EXPECT_LE(metrics(opt, in, DelayModel::kIlp).total_cost, metrics(h, in).total_cost + 1e-9);
  }
}

}  // namespace
}  // namespace cram
