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

#include <gtest/gtest.h>

#include "simask/box.h"
#include "simask/error.h"
#include "simask/instance_fusion.h"
#include "simask/rng.h"
#include "test_util.h"

namespace simask {
namespace {

using testing::Map2d;

PositiveSample Sample(Tensor mask, std::optional<Box> box = std::nullopt) {
  PositiveSample s;
  s.pred_mask = std::move(mask);
  s.pred_box = box;
  return s;
}

TEST(BoxTest, IouReferenceValues) {
  EXPECT_NEAR(BoxIou(Box{0, 0, 2, 2}, Box{1, 1, 3, 3}), 1.0 / 7.0, 1e-12);
  EXPECT_DOUBLE_EQ(BoxIou(Box{0, 0, 2, 2}, Box{0, 0, 2, 2}), 1.0);
  EXPECT_DOUBLE_EQ(BoxIou(Box{0, 0, 1, 1}, Box{2, 2, 3, 3}), 0.0);
}

TEST(BoxTest, TightBoxAndIndicator) {
  const Tensor mask = Map2d(3, 4, {0, 0, 0, 0,
                                   0, 1, 1, 0,
                                   0, 0, 1, 0});
  const auto box = TightBox(mask);
  ASSERT_TRUE(box.has_value());
  EXPECT_EQ(*box, (Box{1, 1, 3, 3}));
  EXPECT_FALSE(TightBox(Tensor::Zeros({3, 4})).has_value());
  const Tensor ind = BoxIndicator(*box, 3, 4);
  float total = 0.0f;
  for (float v : ind.data()) total += v;
  EXPECT_EQ(total, 4.0f);
  EXPECT_EQ(ind.at(1, 1), 1.0f);
  EXPECT_EQ(ind.at(0, 1), 0.0f);
}

TEST(BoxTest, ValidateRejectsInvertedAndNonFinite) {
  EXPECT_THROW(ValidateBox(Box{2, 0, 1, 1}), Error);
  EXPECT_THROW(ValidateBox(Box{0, 0, NAN, 1}), Error);
  EXPECT_NO_THROW(ValidateBox(Box{0, 0, 1, 1}));
}

TEST(PositiveWeightsTest, EqualIousGiveUniformWeights) {
  const std::vector<double> ious = {0.4, 0.4, 0.4};
  for (double w : PositiveWeights(ious, 5.0)) EXPECT_NEAR(w, 1.0 / 3.0, 1e-12);
}

TEST(PositiveWeightsTest, ZeroTemperatureIsUniform) {
  const std::vector<double> ious = {0.1, 0.9};
  for (double w : PositiveWeights(ious, 0.0)) EXPECT_NEAR(w, 0.5, 1e-12);
}

TEST(PositiveWeightsTest, SoftmaxOfScaledIous) {
  const std::vector<double> ious = {0.2, 0.8};
  const auto w = PositiveWeights(ious, 5.0);
  const double e = std::exp(5.0 * 0.6);
  EXPECT_NEAR(w[1], e / (1.0 + e), 1e-12);
  EXPECT_NEAR(w[0] + w[1], 1.0, 1e-15);
}

TEST(PositiveWeightsTest, ReferenceValues) {
  const std::vector<double> ious = {0.9, 0.6};
  const auto w = PositiveWeights(ious, 5.0);
  EXPECT_NEAR(w[0], 0.8176, 1e-4);
  EXPECT_NEAR(w[1], 0.1824, 1e-4);
}

TEST(PositiveWeightsTest, LargeTemperatureDoesNotOverflow) {
  const std::vector<double> ious = {1.0, 0.0};
  const auto w = PositiveWeights(ious, 2000.0);
  EXPECT_NEAR(w[0], 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(w[1]));
  EXPECT_THROW(PositiveWeights({}, 5.0), Error);
}

TEST(SampleIousTest, MaskDerivedBoxesAndEmptyMasks) {
  std::vector<PositiveSample> samples;
  samples.push_back(Sample(Map2d(2, 2, {1, 1, 1, 1})));
  samples.push_back(Sample(Tensor::Zeros({2, 2})));
  samples.push_back(Sample(Tensor::Zeros({2, 2}), Box{0, 0, 1, 2}));
  const auto ious = SampleIous(samples, Box{0, 0, 2, 2});
  EXPECT_DOUBLE_EQ(ious[0], 1.0);
  EXPECT_DOUBLE_EQ(ious[1], 0.0);
  EXPECT_DOUBLE_EQ(ious[2], 0.5);
}

TEST(InstanceProbMapTest, WeightedSumOfMasks) {
  std::vector<PositiveSample> samples;
  samples.push_back(Sample(Map2d(1, 2, {0.9f, 0.1f})));
  samples.push_back(Sample(Map2d(1, 2, {0.2f, 0.3f})));
  const double e = std::exp(5.0 * 0.5);
  const std::vector<double> w = {e / (1.0 + e), 1.0 / (1.0 + e)};
  const Tensor m = InstanceProbMap(samples, w);
  EXPECT_NEAR(m[0], w[0] * 0.9 + w[1] * 0.2, 1e-6);
  EXPECT_NEAR(m[0], 0.8469, 1e-4);
  EXPECT_NEAR(m[1], w[0] * 0.1 + w[1] * 0.3, 1e-6);
}

TEST(InstanceProbMapTest, SingleAndIdenticalMasks) {
  const Tensor mask = Map2d(1, 3, {0.1f, 0.5f, 0.9f});
  std::vector<PositiveSample> one;
  one.push_back(Sample(mask));
  EXPECT_TRUE(BitIdentical(InstanceProbMap(one, std::vector<double>{1.0}), mask));
  std::vector<PositiveSample> two;
  two.push_back(Sample(mask));
  two.push_back(Sample(mask));
  const Tensor m = InstanceProbMap(two, std::vector<double>{0.3, 0.7});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(m[i], mask[i], 1e-6);
}

TEST(InstanceProbMapTest, WeightedPixelReference) {
  std::vector<PositiveSample> samples;
  samples.push_back(Sample(Map2d(1, 1, {0.8f})));
  samples.push_back(Sample(Map2d(1, 1, {0.2f})));
  const Tensor m = InstanceProbMap(samples, std::vector<double>{0.8176, 0.1824});
  EXPECT_NEAR(m[0], 0.6906, 1e-4);
  std::vector<PositiveSample> mismatched;
  mismatched.push_back(Sample(Map2d(1, 1, {0.8f})));
  mismatched.push_back(Sample(Map2d(1, 2, {0.2f, 0.2f})));
  EXPECT_THROW(InstanceProbMap(mismatched, std::vector<double>{0.5, 0.5}), Error);
}

TEST(InstanceProbMapTest, ReferenceValue) {
  // IoUs 0.5 and 0.3 with mu 5 on masks 0.8 and 0.4.
  std::vector<PositiveSample> samples;
  samples.push_back(Sample(Map2d(1, 1, {0.8f})));
  samples.push_back(Sample(Map2d(1, 1, {0.4f})));
  const std::vector<double> ious = {0.5, 0.3};
  const Tensor m = InstanceProbMap(samples, PositiveWeights(ious, 5.0));
  EXPECT_NEAR(m[0], 0.6924, 1e-4);
}

TEST(FuseTest, LinearBlendAndMissingSemanticMap) {
  SemanticMap sem;
  sem.probs = Map2d(1, 2, {0.8f, 0.2f});
  const Tensor inst = Map2d(1, 2, {0.4f, 0.6f});
  const Tensor fused = Fuse(&sem, inst, 0.5);
  EXPECT_NEAR(fused[0], 0.6, 1e-6);
  EXPECT_NEAR(fused[1], 0.4, 1e-6);
  const Tensor only_sem = Fuse(&sem, inst, 0.0);
  EXPECT_NEAR(only_sem[0], 0.8, 1e-6);
  EXPECT_TRUE(BitIdentical(Fuse(nullptr, inst, 0.5), inst));
  EXPECT_THROW(Fuse(&sem, inst, 1.5), Error);
  EXPECT_THROW(Fuse(&sem, Tensor::Zeros({2, 2}), 0.5), Error);
}

TEST(RestrictToBoxTest, ZeroesOutsidePixels) {
  const Tensor map = Tensor::Filled({3, 3}, 0.9f);
  const Tensor r = RestrictToBox(map, Box{1, 0, 3, 2});
  EXPECT_EQ(r.at(0, 0), 0.0f);
  EXPECT_EQ(r.at(0, 1), 0.9f);
  EXPECT_EQ(r.at(1, 2), 0.9f);
  EXPECT_EQ(r.at(2, 1), 0.0f);
}

TEST(ThresholdSelectTest, ThreeBands) {
  // Thresholds chosen to be exact in float so that the boundaries are hit.
  const Tensor prob = Map2d(1, 5, {0.125f, 0.25f, 0.5f, 0.75f, 0.875f});
  const PseudoLabel l = ThresholdSelect(prob, 0.25, 0.75);
  EXPECT_EQ(l.hard, Map2d(1, 5, {0, 0, 0, 1, 1}));
  EXPECT_EQ(l.weight, Map2d(1, 5, {1, 1, 0, 1, 1}));
  EXPECT_TRUE(BitIdentical(l.prob, prob));
}

TEST(ThresholdSelectTest, EqualThresholdsIgnoreNothing) {
  const Tensor prob = Map2d(1, 3, {0.2f, 0.5f, 0.8f});
  const PseudoLabel l = ThresholdSelect(prob, 0.5, 0.5);
  EXPECT_EQ(l.hard, Map2d(1, 3, {0, 1, 1}));
  EXPECT_EQ(l.weight, Map2d(1, 3, {1, 1, 1}));
}

TEST(ThresholdSelectTest, RejectsBadThresholds) {
  const Tensor prob = Map2d(1, 1, {0.5f});
  EXPECT_THROW(ThresholdSelect(prob, 0.8, 0.2), Error);
  EXPECT_THROW(ThresholdSelect(prob, -0.1, 0.2), Error);
  EXPECT_THROW(ThresholdSelect(prob, 0.1, 1.2), Error);
}

TEST(ThresholdSelectTest, BandInvariantsOnRandomMaps) {
  Rng rng(12);
  Tensor prob = Tensor::Zeros({16, 16});
  for (float& v : prob.mutable_data()) v = static_cast<float>(rng.UniformDouble());
  const PseudoLabel l = ThresholdSelect(prob, 0.3, 0.7);
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const bool ignored = prob[i] > 0.3f && prob[i] < 0.7f;
    EXPECT_EQ(l.weight[i], ignored ? 0.0f : 1.0f);
    EXPECT_EQ(l.hard[i], prob[i] >= 0.7f ? 1.0f : 0.0f);
  }
}

}  // namespace
}  // namespace simask
