#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "guae/grpo_sim.hpp"

namespace guae {
namespace {

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  auto a = stream_rng(1, 2, 3), b = stream_rng(1, 2, 3), c = stream_rng(1, 2, 4), d = stream_rng(1, 3, 3);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(Rng, Uniform01Range) {
  auto g = stream_rng(0, 0, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(g);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Sampling, CategoricalBoundaries) {
  const std::vector<double> p = {0.25, 0.0, 0.75};
  EXPECT_EQ(sample_categorical(p, 0.0), 0u);
  EXPECT_EQ(sample_categorical(p, 0.2499), 0u);
  EXPECT_EQ(sample_categorical(p, 0.25), 2u);
  EXPECT_EQ(sample_categorical(p, 0.99999999), 2u);
  // Cumulative rounding gap: falls back to the last action with mass.
  const std::vector<double> q = {0.5, 0.4999999, 0.0};
  EXPECT_EQ(sample_categorical(q, 0.99999995), 1u);
}

TEST(Rollout, DeterministicAndRewardsConsistent) {
  const auto env = BanditEnv::make(3, 4);
  const PolicyState pol(make_initial_logits(env, InitKind::Uniform), 99);
  const auto a = rollout(env, pol, 2, 16), b = rollout(env, pol, 2, 16);
  EXPECT_EQ(a.actions, b.actions);
  ASSERT_EQ(a.group.rewards.size(), 16u);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(a.group.rewards[i], env.reward(2, a.actions[i]));
  EXPECT_THROW(rollout(env, pol, 3, 4), Error);
}

TEST(InitialLogits, MassPlacement) {
  const auto env = BanditEnv::make(2, 5);
  const PolicyState pol(make_initial_logits(env, InitKind::Wrong, 0.99), 0);
  for (std::size_t s = 0; s < 2; ++s) {
    const auto p = pol.probs(s);
    EXPECT_NEAR(p[(env.target[s] + 1) % 5], 0.99, 1e-12);
    EXPECT_NEAR(p[env.target[s]], 0.0025, 1e-12);
  }
}

TEST(Train, ZeroStepsIsEmpty) {
  const auto env = BanditEnv::make(1, 3);
  TrainConfig cfg;
  cfg.steps = 0;
  const PolicyState pol(make_initial_logits(env, InitKind::Uniform), 1);
  const auto t = train(env, cfg, pol);
  EXPECT_TRUE(t.rows.empty());
  EXPECT_EQ(t.final_policy.logits(), pol.logits());
}

TEST(Train, SameSeedSameTrace) {
  const auto env = BanditEnv::make(2, 4);
  TrainConfig cfg;
  cfg.steps = 50;
  const PolicyState pol(make_initial_logits(env, InitKind::Uniform), 5);
  const auto a = train(env, cfg, pol), b = train(env, cfg, pol);
  EXPECT_EQ(a.final_policy.logits(), b.final_policy.logits());
  ASSERT_EQ(a.rows.size(), 100u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].grad_norm, b.rows[i].grad_norm);
}

TEST(Train, LearnsFromUniformStart) {
  const auto env = BanditEnv::make(1, 5);
  TrainConfig cfg;
  cfg.steps = 400;
  cfg.learning_rate = 0.5;
  for (auto v : {EstimatorVariant::BaseGrpo, EstimatorVariant::GuAE}) {
    cfg.estimator.variant = v;
    const auto t = train(env, cfg, PolicyState(make_initial_logits(env, InitKind::Uniform), 3));
    EXPECT_GT(t.final_policy.probs(0)[0], 0.9) << to_string(v);
  }
}

TEST(Train, CommonRandomNumbersAcrossVariants) {
  // With identical logits, both variants draw identical actions at step 0.
  const auto env = BanditEnv::make(2, 3);
  TrainConfig cfg;
  cfg.steps = 1;
  std::vector<std::vector<std::size_t>> seen;
  for (auto v : {EstimatorVariant::BaseGrpo, EstimatorVariant::GuAE}) {
    cfg.estimator.variant = v;
    train(env, cfg, PolicyState(make_initial_logits(env, InitKind::Uniform), 8),
          [&](const StepRecord& r) { seen.push_back(r.rollout->actions); });
  }
  ASSERT_EQ(seen.size(), 4u);
  EXPECT_EQ(seen[0], seen[2]);
  EXPECT_EQ(seen[1], seen[3]);
}

TEST(Train, CollapsedBaseUpdateIsPureKl) {
  auto env = BanditEnv::make(1, 4);
  env.reward_correct = env.reward_wrong = 1.0;
  LogitTable z(1, 4, 0.0), ref(1, 4, 0.0);
  z.row(0)[1] = 1.5;
  TrainConfig cfg;
  cfg.steps = 20;
  cfg.estimator.variant = EstimatorVariant::BaseGrpo;
  train(env, cfg, PolicyState(z, ref, 4), [&](const StepRecord& r) {
    for (double a : r.advantage->advantages) EXPECT_EQ(a, 0.0);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(r.grad[j], -cfg.beta * r.kl_grad[j], 1e-18);
  });
}

TEST(Train, ShapeMismatchThrows) {
  const auto env = BanditEnv::make(2, 3);
  EXPECT_THROW(train(env, TrainConfig{}, PolicyState(LogitTable(1, 3), 0)), Error);
  TrainConfig bad;
  bad.K = 0;
  EXPECT_THROW(train(env, bad, PolicyState(LogitTable(2, 3), 0)), Error);
}

TEST(CollapseSchedule, EndpointsAndSeparation) {
  TrainConfig cfg;
  const std::vector<double> sched = {0.0, 1.0};
  const auto pts = collapse_schedule_sim(cfg, sched, 7, 2000);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_LT(pts[0].all_equal_ratio, 0.02);
  EXPECT_EQ(pts[1].all_equal_ratio, 1.0);
  EXPECT_EQ(pts[1].base.p_small_001, 1.0);
  EXPECT_EQ(pts[1].guae.p_small_001, 0.0);
  EXPECT_NEAR(pts[1].guae.mean_abs_adv, 0.38319302456384643, 1e-9);
  EXPECT_THROW(collapse_schedule_sim(cfg, std::vector<double>{1.5}, 0), Error);
}

}  // namespace
}  // namespace guae
