// Copyright 2026 The simask Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "simask/error.h"
#include "simask/prototype_bank.h"
#include "simask/rng.h"
#include "simask/sinkhorn.h"
#include "simask_checks/oracles.h"
#include "test_util.h"

namespace simask {
namespace {

using testing::TempDir;

Matrix MakeMatrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  Matrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.values().begin());
  return m;
}

FeatureRows Rows(std::size_t cols, std::vector<float> values) {
  FeatureRows rows(values.size() / cols, cols);
  std::copy(values.begin(), values.end(), rows.values().begin());
  return rows;
}

// ---- Sinkhorn ----

TEST(SinkhornTest, ConstantScoresGiveTheIndependentCoupling) {
  const TransportPlan plan = SinkhornAssign(Matrix(2, 3, 0.37));
  for (double q : plan.q.values()) EXPECT_NEAR(q, 1.0 / 6.0, 1e-12);
  EXPECT_TRUE(plan.converged);
}

TEST(SinkhornTest, SingleRowCarriesTheColumnMarginal) {
  Rng rng(1);
  Matrix scores(1, 7);
  for (double& v : scores.values()) v = rng.Uniform(-1, 1);
  const TransportPlan plan = SinkhornAssign(scores);
  for (double q : plan.q.values()) EXPECT_NEAR(q, 1.0 / 7.0, 1e-12);
}

TEST(SinkhornTest, MatchesNaiveOracleOnSmallProblem) {
  Rng rng(2);
  Matrix scores(3, 5);
  for (double& v : scores.values()) v = rng.Uniform(-1, 1);
  const SinkhornOptions options{0.05, 100000, 1e-13};
  const TransportPlan plan = SinkhornAssign(scores, options);
  const Matrix oracle = checks::NaiveSinkhorn(scores, 0.05, plan.iterations, 0.0);
  for (std::size_t i = 0; i < oracle.values().size(); ++i) {
    EXPECT_NEAR(plan.q.values()[i], oracle.values()[i], 1e-6);
  }
}

TEST(SinkhornTest, PlanIsNonNegativeWithUnitMass) {
  Rng rng(3);
  Matrix scores(10, 200);
  for (double& v : scores.values()) v = rng.Uniform(-1, 1);
  const TransportPlan plan = SinkhornAssign(scores);
  double total = 0.0;
  for (double q : plan.q.values()) {
    EXPECT_GE(q, 0.0);
    total += q;
  }
  EXPECT_NEAR(total, 1.0, 1e-6);
  EXPECT_LE(MaxMarginalViolation(plan), 1e-6);
}

TEST(SinkhornTest, StaysFiniteForLargeScoreRanges) {
  // Scores of +-1 at epsilon 0.001 overflow a linear-domain kernel.
  Matrix scores(4, 30);
  Rng rng(4);
  for (double& v : scores.values()) v = rng.Uniform(-1, 1);
  const TransportPlan plan = SinkhornAssign(scores, {0.001, 2000, 1e-9});
  for (double q : plan.q.values()) EXPECT_TRUE(std::isfinite(q));
}

TEST(SinkhornTest, ReportsNonConvergenceAtIterationCap) {
  Rng rng(5);
  Matrix scores(5, 40);
  for (double& v : scores.values()) v = rng.Uniform(-1, 1);
  const TransportPlan plan = SinkhornAssign(scores, {0.01, 1, 0.0});
  EXPECT_FALSE(plan.converged);
  EXPECT_EQ(plan.iterations, 1);
}

TEST(SinkhornTest, RejectsBadInput) {
  EXPECT_THROW(SinkhornAssign(Matrix()), Error);
  EXPECT_THROW(SinkhornAssign(Matrix(2, 2, 0.0), {0.0, 10, 1e-6}), Error);
  EXPECT_THROW(SinkhornAssign(Matrix(2, 2, 0.0), {0.1, 10, -1.0}), Error);
  EXPECT_THROW(SinkhornAssign(MakeMatrix(1, 2, {0.0, NAN})), Error);
}

TEST(HardenTest, StrictArgmaxAndLowestIndexOnTies) {
  TransportPlan plan;
  plan.q = MakeMatrix(2, 2, {0.7, 0.5, 0.3, 0.5});
  const auto idx = HardenAssignments(plan);
  EXPECT_EQ(idx[0], 0u);
  EXPECT_EQ(idx[1], 0u);
}

TEST(HardenTest, MatchesColumnScanOnRandomPlans) {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    TransportPlan plan;
    plan.q = checks::RandomFeasiblePlan(4, 9, rng);
    const auto idx = HardenAssignments(plan);
    for (std::size_t j = 0; j < 9; ++j) {
      for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_LE(plan.q(i, j), plan.q(idx[j], j));
        if (i < idx[j]) EXPECT_LT(plan.q(i, j), plan.q(idx[j], j));
      }
    }
  }
}

// ---- Sub-centers and EMA ----

TEST(SubcentersTest, IdenticalFeaturesGiveTheirDirection) {
  const FeatureRows features = Rows(2, {2, 0, 2, 0, 2, 0});
  const std::vector<std::size_t> assignment = {0, 0, 0};
  const Subcenters s = ComputeSubcenters(features, assignment, 3);
  EXPECT_FLOAT_EQ(s.centroids(0, 0), 1.0f);
  EXPECT_FLOAT_EQ(s.centroids(0, 1), 0.0f);
  EXPECT_EQ(s.counts, (std::vector<std::size_t>{3, 0, 0}));
}

TEST(SubcentersTest, MeanThenNormalize) {
  const FeatureRows features = Rows(2, {1, 0, 0, 1});
  const std::vector<std::size_t> assignment = {1, 1};
  const Subcenters s = ComputeSubcenters(features, assignment, 3);
  EXPECT_NEAR(s.centroids(1, 0), 0.7071, 1e-4);
  EXPECT_NEAR(s.centroids(1, 1), 0.7071, 1e-4);
  EXPECT_EQ(s.counts[2], 0u);
}

TEST(EmaTest, OneStepFormula) {
  const std::vector<float> p = {1, 0};
  const std::vector<float> c = {0, 1};
  const auto blended = EmaStep(p, c, 0.999);
  EXPECT_NEAR(blended[0], 0.999, 1e-15);
  EXPECT_NEAR(blended[1], 0.001, 1e-15);

  PrototypeBank bank(1, 1, 2, 0.999);
  const std::vector<std::size_t> one = {1};
  bank.EmaUpdate(0, Rows(2, {1, 0}), one);  // first write copies
  bank.EmaUpdate(0, Rows(2, {0, 1}), one);
  const double norm = std::hypot(0.999, 0.001);
  EXPECT_NEAR(bank.prototype(0, 0)[0], 0.999 / norm, 1e-7);
  EXPECT_NEAR(bank.prototype(0, 0)[1], 0.001 / norm, 1e-7);
}

TEST(EmaTest, FixedPointAndSkippedRows) {
  PrototypeBank bank(1, 2, 2, 0.9);
  const std::vector<std::size_t> counts = {1, 1};
  bank.EmaUpdate(0, Rows(2, {0.6f, 0.8f, 1, 0}), counts);
  const std::vector<float> before(bank.prototype(0, 0).begin(), bank.prototype(0, 0).end());
  const std::vector<std::size_t> only_first = {1, 0};
  bank.EmaUpdate(0, Rows(2, {0.6f, 0.8f, 0, 1}), only_first);
  EXPECT_NEAR(bank.prototype(0, 0)[0], before[0], 1e-7);
  EXPECT_NEAR(bank.prototype(0, 0)[1], before[1], 1e-7);
  EXPECT_EQ(bank.prototype(0, 1)[0], 1.0f);  // count 0: untouched
}

TEST(EmaTest, InitializationIsPerClassAndPerRow) {
  PrototypeBank bank(2, 2, 2, 0.999);
  EXPECT_FALSE(bank.initialized(0));
  const std::vector<std::size_t> half = {1, 0};
  bank.EmaUpdate(0, Rows(2, {1, 0, 0, 0}), half);
  EXPECT_TRUE(bank.row_set(0, 0));
  EXPECT_FALSE(bank.initialized(0));
  const std::vector<std::size_t> rest = {0, 1};
  bank.EmaUpdate(0, Rows(2, {0, 0, 0, 1}), rest);
  EXPECT_TRUE(bank.initialized(0));
  EXPECT_FALSE(bank.initialized(1));
}

TEST(EmaTest, RejectsShapeMismatch) {
  PrototypeBank bank(1, 2, 2, 0.999);
  const std::vector<std::size_t> counts = {1};
  EXPECT_THROW(bank.EmaUpdate(0, Rows(2, {1, 0}), counts), Error);
  const std::vector<std::size_t> two = {1, 1};
  EXPECT_THROW(bank.EmaUpdate(3, Rows(2, {1, 0, 0, 1}), two), Error);
}

// ---- Gathering ----

FeatureMap GridFeatures(std::size_t height, std::size_t width) {
  Tensor t = Tensor::Zeros({height, width, 2});
  for (std::size_t i = 0; i < height * width; ++i) {
    t[2 * i] = static_cast<float>(i + 1);
    t[2 * i + 1] = 1.0f;
  }
  return L2Normalize(FeatureMap(std::move(t)));
}

TEST(GatherTest, FullBoxAndEmptyMask) {
  const FeatureMap fm = GridFeatures(4, 4);
  const std::vector<Instance> inst = {{0, Box{1, 1, 3, 3}}};
  const std::vector<Tensor> full = {Tensor::Filled({4, 4}, 1.0f)};
  EXPECT_EQ(GatherClassPixels(fm, inst, full, 0).rows(), 4u);
  const std::vector<Tensor> empty = {Tensor::Zeros({4, 4})};
  EXPECT_EQ(GatherClassPixels(fm, inst, empty, 0).rows(), 0u);
  EXPECT_EQ(GatherClassPixels(fm, inst, full, 1).rows(), 0u);
}

TEST(GatherTest, OverlappingBoxesCountSharedPixelsOnce) {
  const FeatureMap fm = GridFeatures(4, 4);
  // Boxes overlap in a 1 x 3 strip.
  const std::vector<Instance> inst = {{0, Box{0, 0, 2, 3}}, {0, Box{1, 0, 3, 3}}};
  const std::vector<Tensor> masks = {Tensor::Filled({4, 4}, 1.0f),
                                     Tensor::Filled({4, 4}, 1.0f)};
  EXPECT_EQ(GatherClassPixels(fm, inst, masks, 0).rows(), 9u);
}

TEST(GatherTest, MatchesSetUnionOracleOnRandomLayouts) {
  Rng rng(7);
  const std::size_t side = 12;
  const FeatureMap fm = GridFeatures(side, side);
  for (int t = 0; t < 50; ++t) {
    std::vector<Instance> inst;
    std::vector<Tensor> masks;
    std::vector<int> classes;
    std::vector<Box> boxes;
    for (int k = 0; k < 4; ++k) {
      const double x0 = static_cast<double>(rng.UniformInt(8));
      const double y0 = static_cast<double>(rng.UniformInt(8));
      const Box box{x0, y0, x0 + 1 + static_cast<double>(rng.UniformInt(5)),
                    y0 + 1 + static_cast<double>(rng.UniformInt(5))};
      Tensor mask = Tensor::Zeros({side, side});
      for (float& v : mask.mutable_data()) v = rng.UniformDouble() < 0.6 ? 1.0f : 0.0f;
      const int c = static_cast<int>(rng.UniformInt(2));
      inst.push_back({c, box});
      classes.push_back(c);
      boxes.push_back(box);
      masks.push_back(std::move(mask));
    }
    for (int c = 0; c < 2; ++c) {
      const FeatureRows rows = GatherClassPixels(fm, inst, masks, c);
      const auto expected = checks::GatherOracle(side, side, classes, boxes, masks, c);
      ASSERT_EQ(rows.rows(), expected.size());
      std::size_t r = 0;
      for (std::size_t p : expected) {
        EXPECT_EQ(rows(r, 0), fm.pixel(p)[0]);
        ++r;
      }
    }
  }
}

// ---- Class update and persistence ----

TEST(ClassUpdateTest, ColdStartInitializesEveryRow) {
  Rng rng(8);
  FeatureRows features(0, 4);
  for (int i = 0; i < 200; ++i) {
    std::vector<float> v(4);
    double n = 0.0;
    for (float& x : v) {
      x = static_cast<float>(rng.Normal());
      n += x * x;
    }
    for (float& x : v) x = static_cast<float>(x / std::sqrt(n));
    features.AppendRow(v);
  }
  PrototypeBank bank(1, 5, 4, 0.999);
  const ClassUpdate update = ComputeClassUpdate(bank, 0, features, {});
  EXPECT_EQ(update.num_pixels, 200u);
  bank.EmaUpdate(0, update.subcenters.centroids, update.subcenters.counts);
  EXPECT_TRUE(bank.initialized(0));
  for (std::size_t l = 0; l < 5; ++l) {
    double n = 0.0;
    for (float x : bank.prototype(0, l)) n += static_cast<double>(x) * x;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-5);
  }
}

TEST(ClassUpdateTest, NoPixelsMeansNoChange) {
  PrototypeBank bank(1, 3, 2, 0.999);
  const ClassUpdate update = ComputeClassUpdate(bank, 0, FeatureRows(0, 2), {});
  EXPECT_EQ(update.subcenters.counts, (std::vector<std::size_t>{0, 0, 0}));
}

TEST(BankIoTest, RoundTripIsBitExact) {
  TempDir dir;
  PrototypeBank bank(2, 2, 3, 0.99);
  const std::vector<std::size_t> counts = {1, 0};
  bank.EmaUpdate(1, Rows(3, {0.6f, 0.8f, 0, 0, 0, 0}), counts);
  bank.set_update_count(7);
  SavePrototypeBank(bank, dir.path());
  const PrototypeBank back = LoadPrototypeBank(dir.path());
  EXPECT_TRUE(BitIdentical(back.prototypes(), bank.prototypes()));
  EXPECT_EQ(back.rows_set(), bank.rows_set());
  EXPECT_EQ(back.update_count(), 7u);
  EXPECT_EQ(back.gamma(), 0.99);
}

TEST(BankIoTest, RejectsNonUnitPrototypes) {
  Tensor protos = Tensor::Zeros({1, 1, 2});
  protos[0] = 2.0f;
  EXPECT_THROW(PrototypeBank::FromState(protos, {true}, 0.999, 0), Error);
  EXPECT_NO_THROW(PrototypeBank::FromState(protos, {false}, 0.999, 0));
}

}  // namespace
}  // namespace simask
