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

#include <deque>

#include "cram/evaluate.hpp"
#include "cram/graph.hpp"
#include "cram/heuristic.hpp"
#include "cram/validate.hpp"
#include "support.hpp"

namespace cram {
namespace {

using testing::colocated_instance;
using testing::single_mixer_plan;

bool has(const std::vector<Violation>& vs, Constraint c) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.constraint == c; });
}

TEST(NetworkMatrix, RejectsAsymmetricTime) {
  Eigen::MatrixXd t(2, 2);
  t << 0, 1, 2, 0;
  EXPECT_THROW(NetworkMatrix::with_linear_cost(testing::named_sites(2), t, 0.01), InstanceError);
}

TEST(NetworkMatrix, RejectsNonZeroDiagonalAndNegatives) {
  Eigen::MatrixXd t(2, 2);
  t << 1, 1, 1, 0;
  EXPECT_THROW(NetworkMatrix::with_linear_cost(testing::named_sites(2), t, 0.01), InstanceError);
  t << 0, -1, -1, 0;
  EXPECT_THROW(NetworkMatrix::with_linear_cost(testing::named_sites(2), t, 0.01), InstanceError);
}

TEST(Instance, RequiresTwoParticipantsAndAServer) {
  EXPECT_THROW(colocated_instance(1), InstanceError);
  EXPECT_THROW(colocated_instance(2, 400.0, 0), InstanceError);
}

TEST(MediaCostModel, OverheadMustDominatePerStreamResources) {
  MediaCostModel m;
  m.vm_overhead_mb = 100.0;
  EXPECT_THROW(m.validate(), InstanceError);
}

TEST(ServerCost, OneMixerEightInputs) {
  const Instance in = colocated_instance(8);
  EXPECT_NEAR(eval_server_cost(single_mixer_plan(8), in), 5.60, 1e-12);
}

TEST(ServerCost, EmptyPlanIsFree) { EXPECT_EQ(eval_server_cost(Plan{}, colocated_instance(2)), 0.0); }

TEST(ServerCost, TwoMixersFourInputsEach) {
  Plan p;
  p.vms = {{VmKind::kMixer, 0, 4}, {VmKind::kMixer, 0, 4}};
  EXPECT_NEAR(eval_server_cost(p, colocated_instance(8)), 9.60, 1e-12);
}

TEST(ServerCost, PerVmModeChargesFlatPrice) {
  Plan p;
  p.vms = {{VmKind::kMixer, 0, 4}, {VmKind::kCompressor, 0, 1}};
  EXPECT_NEAR(eval_server_cost(p, colocated_instance(8).with_cost_mode(CostMode::kPerVm)), 0.02, 1e-12);
}

TEST(ServerCost, DanglingServerIsStructural) {
  Plan p;
  p.vms = {{VmKind::kMixer, 3, 2}};
  EXPECT_THROW(eval_server_cost(p, colocated_instance(2)), StructuralError);
}

TEST(NetworkCost, SameSiteEdgeIsFree) {
  Plan p = single_mixer_plan(2);
  EXPECT_EQ(eval_network_cost(p, colocated_instance(2)), 0.0);
}

TEST(NetworkCost, CompressedEdgeScalesByKeptFraction) {
  // 100 ms at 0.01 $/ms is a $1.00 base cost.
  const Instance in = testing::two_site_instance(100.0, {0, 1});
  Plan p;
  p.vms = {{VmKind::kCompressor, 0, 1}, {VmKind::kMixer, 1, 1}};
  p.edges = {{Endpoint::vm(0), Endpoint::vm(1), 0.95}};
  EXPECT_NEAR(eval_network_cost(p, in), 0.05, 1e-12);
}

TEST(NetworkCost, UncompressedEdgesAdd) {
  const Instance in = testing::two_site_instance(30.0, {0, 1});
  Plan p;
  p.vms = {{VmKind::kMixer, 1, 1}};
  p.edges = {{Endpoint::participant(0), Endpoint::vm(0), 0.0}, {Endpoint::vm(0), Endpoint::participant(0), 0.0}};
  EXPECT_NEAR(eval_network_cost(p, in), 0.60, 1e-12);
}

TEST(Delays, ForkJoinSingleMixerEightUsers) {
  const Instance in = colocated_instance(8);
  for (double d : eval_delays(single_mixer_plan(8), in, DelayModel::kForkJoin)) EXPECT_NEAR(d, 60.0, 1e-12);
}

TEST(Delays, IlpSingleMixerTwoUsers) {
  const Instance in = colocated_instance(2);
  for (double d : eval_delays(single_mixer_plan(2), in, DelayModel::kIlp)) EXPECT_NEAR(d, 12.0, 1e-12);
}

TEST(Delays, IlpLongestPathThroughCompressor) {
  // u0 at site 0 goes through a compressor on site 0 to a mixer on site 1.
  const Instance in = testing::two_site_instance(100.0, {0, 1});
  Plan p;
  p.vms = {{VmKind::kCompressor, 0, 1}, {VmKind::kMixer, 1, 2}};
  p.edges = {{Endpoint::participant(0), Endpoint::vm(0), 0.0},
             {Endpoint::vm(0), Endpoint::vm(1), 0.5},
             {Endpoint::participant(1), Endpoint::vm(1), 0.0},
             {Endpoint::vm(1), Endpoint::participant(0), 0.0},
             {Endpoint::vm(1), Endpoint::participant(1), 0.0}};
  const auto d = eval_delays(p, in, DelayModel::kIlp);
  // Own stream: T_m(1) + 50 + T_m(2), then 100 back.
  EXPECT_NEAR(d[0], 6.0 + 50.0 + 12.0 + 100.0, 1e-12);
  EXPECT_NEAR(d[1], 12.0, 1e-12);
}

TEST(Delays, CycleIsStructural) {
  const Instance in = colocated_instance(2);
  Plan p = single_mixer_plan(2);
  p.vms.push_back({VmKind::kMixer, 0, 1});
  p.edges.push_back({Endpoint::vm(0), Endpoint::vm(1), 0.0});
  p.edges.push_back({Endpoint::vm(1), Endpoint::vm(0), 0.0});
  EXPECT_THROW(eval_delays(p, in, DelayModel::kIlp), StructuralError);
}

TEST(Delays, DisconnectedParticipantIsStructural) {
  const Instance in = colocated_instance(3);
  Plan p = single_mixer_plan(2);
  EXPECT_THROW(eval_delays(p, in, DelayModel::kIlp), StructuralError);
}

TEST(Validate, SingleMixerIsValid) {
  const Instance in = colocated_instance(8);
  EXPECT_TRUE(validate_plan(single_mixer_plan(8), in, DelayModel::kForkJoin).empty());
  EXPECT_TRUE(validate_plan(single_mixer_plan(8), in, DelayModel::kIlp).empty());
}

TEST(Validate, ParticipantToParticipantEdge) {
  const Instance in = colocated_instance(2);
  Plan p = single_mixer_plan(2);
  p.edges.push_back({Endpoint::participant(0), Endpoint::participant(1), 0.0});
  EXPECT_TRUE(has(validate_plan(p, in), Constraint::kParticipantToParticipant));
}

TEST(Validate, CapacityOverrun) {
  // 400 + 20 * 502 = 10440 MB on a 10240 MB server.
  const Instance in = colocated_instance(502, 1e6);
  const auto vs = validate_plan(single_mixer_plan(502), in);
  EXPECT_TRUE(has(vs, Constraint::kCapacity));
  EXPECT_NEAR(allocated_memory(single_mixer_plan(502), in), 10440.0, 1e-9);
}

TEST(Validate, DelayOverrun) {
  const Instance in = colocated_instance(8, 50.0);
  EXPECT_TRUE(has(validate_plan(single_mixer_plan(8), in, DelayModel::kForkJoin), Constraint::kDelay));
}

TEST(Validate, CompressorChainAndImbalance) {
  const Instance in = colocated_instance(2);
  Plan p = single_mixer_plan(2);
  p.edges.erase(p.edges.begin());
  p.vms.push_back({VmKind::kCompressor, 0, 1});
  p.vms.push_back({VmKind::kCompressor, 0, 1});
  p.edges.push_back({Endpoint::participant(0), Endpoint::vm(1), 0.0});
  p.edges.push_back({Endpoint::vm(1), Endpoint::vm(2), 0.5});
  p.edges.push_back({Endpoint::vm(2), Endpoint::vm(0), 0.5});
  p.edges.push_back({Endpoint::vm(2), Endpoint::vm(0), 0.5});
  const auto vs = validate_plan(p, in, DelayModel::kIlp);
  EXPECT_TRUE(has(vs, Constraint::kCompressorToCompressor));
  EXPECT_TRUE(has(vs, Constraint::kCompressorBalance));
}

TEST(Validate, RateAboveCap) {
  const Instance in = testing::two_site_instance(100.0, {0, 1});
  Plan p;
  p.vms = {{VmKind::kCompressor, 0, 1}, {VmKind::kMixer, 1, 2}};
  p.edges = {{Endpoint::participant(0), Endpoint::vm(0), 0.0},
             {Endpoint::vm(0), Endpoint::vm(1), 0.97},
             {Endpoint::participant(1), Endpoint::vm(1), 0.0},
             {Endpoint::vm(1), Endpoint::participant(0), 0.0},
             {Endpoint::vm(1), Endpoint::participant(1), 0.0}};
  EXPECT_TRUE(has(validate_plan(p, in, DelayModel::kIlp), Constraint::kCompressionRate));
}

TEST(Validate, NoCompleteMixer) {
  const Instance in = colocated_instance(2);
  Plan p;
  p.vms = {{VmKind::kMixer, 0, 1}, {VmKind::kMixer, 0, 1}};
  p.edges = {{Endpoint::participant(0), Endpoint::vm(0), 0.0},
             {Endpoint::participant(1), Endpoint::vm(1), 0.0},
             {Endpoint::vm(0), Endpoint::participant(0), 0.0},
             {Endpoint::vm(1), Endpoint::participant(1), 0.0}};
  const auto vs = validate_plan(p, in, DelayModel::kIlp);
  EXPECT_TRUE(has(vs, Constraint::kNoCompleteMixer));
  EXPECT_TRUE(has(vs, Constraint::kIncompleteFinalStream));
}

TEST(Validate, IsPureAndOrderStable) {
  const Instance in = colocated_instance(3, 10.0);
  Plan p = single_mixer_plan(3);
  p.vms[0].input_count = 7;
  const auto a = validate_plan(p, in);
  const auto b = validate_plan(p, in);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].constraint, b[i].constraint);
    EXPECT_EQ(a[i].message, b[i].message);
  }
}

TEST(Metrics, EmptyPlanIsAllZero) {
  const PlanMetrics m = metrics(Plan{}, colocated_instance(2));
  EXPECT_EQ(m.total_cost, 0.0);
  EXPECT_EQ(m.max_delay, 0.0);
  EXPECT_EQ(m.vm_count, 0);
  EXPECT_EQ(m.allocated_memory, 0.0);
}

TEST(Metrics, SingleMixerEightUsers) {
  const PlanMetrics m = metrics(single_mixer_plan(8), colocated_instance(8), DelayModel::kForkJoin);
  EXPECT_NEAR(m.server_cost, 5.60, 1e-12);
  EXPECT_EQ(m.network_cost, 0.0);
  EXPECT_NEAR(m.max_delay, 60.0, 1e-12);
  EXPECT_EQ(m.total_cost, m.server_cost + m.network_cost);
}

TEST(Artifacts, DimensionsFollowParticipantCount) {
  const Instance in = colocated_instance(3);
  const IlpArtifacts a = build_ilp_artifacts(single_mixer_plan(3), in);
  EXPECT_EQ(a.D.rows(), 10);
  EXPECT_EQ(a.E.rows(), 3);
  EXPECT_EQ(a.E.cols(), 7);
  EXPECT_EQ(a.F.size(), 3u);
  EXPECT_EQ(a.X.cols(), 7);
  EXPECT_EQ(a.G.size(), 7);
  EXPECT_EQ(a.beta, 3 + 7 + 1);
  EXPECT_LE(a.X.colwise().sum().maxCoeff(), 1);
}

// Reachability by breadth-first search from every participant.
Eigen::MatrixXi bfs_reach(const Eigen::MatrixXi& d_uv, const Eigen::MatrixXi& d_vv) {
  Eigen::MatrixXi out = Eigen::MatrixXi::Zero(d_uv.rows(), d_uv.cols());
  for (Eigen::Index u = 0; u < d_uv.rows(); ++u) {
    std::deque<Eigen::Index> queue;
    for (Eigen::Index v = 0; v < d_uv.cols(); ++v)
      if (d_uv(u, v)) {
        out(u, v) = 1;
        queue.push_back(v);
      }
    while (!queue.empty()) {
      const Eigen::Index v = queue.front();
      queue.pop_front();
      for (Eigen::Index w = 0; w < d_vv.cols(); ++w)
        if (d_vv(v, w) && !out(u, w)) {
          out(u, w) = 1;
          queue.push_back(w);
        }
    }
  }
  return out;
}

TEST(Closure, MatchesBreadthFirstSearch) {
  std::mt19937_64 rng(31);
  std::bernoulli_distribution edge(0.25);
  for (int trial = 0; trial < 300; ++trial) {
    const int users = 2 + trial % 4;
    const int vms = 1 + trial % 7;
    Eigen::MatrixXi d_uv = Eigen::MatrixXi::Zero(users, vms);
    Eigen::MatrixXi d_vv = Eigen::MatrixXi::Zero(vms, vms);
    for (int u = 0; u < users; ++u)
      for (int v = 0; v < vms; ++v) d_uv(u, v) = edge(rng);
    for (int a = 0; a < vms; ++a)
      for (int b = 0; b < vms; ++b)
        if (a != b) d_vv(a, b) = edge(rng);
    const Eigen::SparseMatrix<int> sparse = d_vv.sparseView();
    EXPECT_EQ(reachability_closure(d_uv, sparse), bfs_reach(d_uv, d_vv)) << "trial " << trial;
  }
}

TEST(Compression, HigherRateNeverCostsOrDelaysMore) {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int trial = 0; trial < 60 && checked < 20; ++trial) {
    const Instance in = testing::planar_instance(rng, 40, 6, 140.0);
    Plan p;
    try {
      p = cram_allocate(in);
    } catch (const InfeasibleError&) {
      continue;
    }
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
      if (p.edges[i].compression_rate <= 0.0) continue;
      ++checked;
      Plan q = p;
      q.edges[i].compression_rate = std::min(0.95, q.edges[i].compression_rate + 0.02);
      EXPECT_LE(eval_network_cost(q, in), eval_network_cost(p, in) + 1e-12);
      for (auto model : {DelayModel::kForkJoin, DelayModel::kIlp}) {
        const auto before = eval_delays(p, in, model);
        const auto after = eval_delays(q, in, model);
        for (std::size_t u = 0; u < before.size(); ++u) EXPECT_LE(after[u], before[u] + 1e-9);
      }
    }
  }
  EXPECT_GT(checked, 0);
}

}  // namespace
}  // namespace cram
