#include <gtest/gtest.h>

#include <algorithm>

#include "restless/cost.hpp"

using namespace restless;

namespace {

using Bits = std::vector<std::uint8_t>;

// Direct transcription of the definitions.
double naive_restless(const Bits& b) {
  int same = 0;
  for (std::size_t n = 1; n < b.size(); ++n) same += b[n] == b[n - 1];
  return static_cast<double>(same) / b.size();
}

Bits random_bits(Rng& rng, std::size_t n, double p_one = 0.5) {
  Bits b(n);
  for (auto& x : b) x = rng.bernoulli(p_one);
  return b;
}

}  // namespace

TEST(Cost, ConventionalExamples) {
  EXPECT_EQ(epsilon_conventional(Bits{0, 0, 0, 0}).epsilon, 0.0);
  EXPECT_EQ(epsilon_conventional(Bits{1, 1, 1, 1}).epsilon, 1.0);
  EXPECT_EQ(epsilon_conventional(Bits{0, 1, 0, 1}).epsilon, 0.5);
  EXPECT_THROW(epsilon_conventional(Bits{}), std::invalid_argument);
}

TEST(Cost, RestlessExamples) {
  EXPECT_EQ(epsilon_restless(Bits{0, 1, 0, 1}).epsilon, 0.0);
  EXPECT_EQ(epsilon_restless(Bits{0, 0, 0, 0}).epsilon, 0.75);
  EXPECT_EQ(epsilon_restless(Bits{0, 0, 1, 1}).epsilon, 0.5);
  EXPECT_EQ(epsilon_restless(Bits{0, 0, 1, 1}).n_errors, 2);
  EXPECT_THROW(epsilon_restless(Bits{1}), std::invalid_argument);
}

TEST(Cost, ModeChecksOnStreams) {
  ShotStream s{{0, 1}, Mode::Restless, 5, 0};
  EXPECT_THROW(epsilon_conventional(s), std::invalid_argument);
  EXPECT_EQ(epsilon(s).mode, Mode::Restless);
  EXPECT_EQ(epsilon(s).n_cliffords, 5);
  s.mode = Mode::Conventional;
  EXPECT_THROW(epsilon_restless(s), std::invalid_argument);
  EXPECT_EQ(epsilon(s).epsilon, 0.5);
}

TEST(Cost, AllSameStreamGivesNMinusOneOverN) {
  for (std::size_t n : {2u, 3u, 10u, 8000u}) {
    const Bits zeros(n, 0), ones(n, 1);
    EXPECT_DOUBLE_EQ(epsilon_restless(zeros).epsilon, (n - 1.0) / n);
    EXPECT_DOUBLE_EQ(epsilon_restless(ones).epsilon, (n - 1.0) / n);
  }
}

TEST(Cost, RandomStreamsMatchNaiveAndBounds) {
  Rng rng(1);
  for (int t = 0; t < 500; ++t) {
    const auto b = random_bits(rng, 2 + rng.below(200), rng.uniform());
    const auto r = epsilon_restless(b);
    EXPECT_DOUBLE_EQ(r.epsilon, naive_restless(b));
    EXPECT_LE(r.epsilon, (b.size() - 1.0) / b.size());
    EXPECT_GE(r.epsilon, 0.0);
    EXPECT_EQ(r.epsilon, static_cast<double>(r.n_errors) / static_cast<double>(r.n_shots));
  }
}

TEST(Cost, ComplementInvariance) {
  Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    auto b = random_bits(rng, 2 + rng.below(100));
    const double e = epsilon_restless(b).epsilon;
    for (auto& x : b) x ^= 1;
    EXPECT_EQ(epsilon_restless(b).epsilon, e);
  }
}

TEST(Cost, PermutationWitness) {
  const Bits alt{0, 1, 0, 1, 0, 1};
  Bits sorted = alt;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(epsilon_conventional(alt).epsilon, epsilon_conventional(sorted).epsilon);
  EXPECT_NE(epsilon_restless(alt).epsilon, epsilon_restless(sorted).epsilon);

  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    auto b = random_bits(rng, 50);
    const double c = epsilon_conventional(b).epsilon;
    for (std::size_t i = b.size() - 1; i > 0; --i) std::swap(b[i], b[rng.below(i + 1)]);
    EXPECT_EQ(epsilon_conventional(b).epsilon, c);
  }
}

TEST(Streaming, SingleBitChunks) {
  RestlessAccumulator acc;
  const Bits b{0, 0, 1, 1};
  for (std::size_t i = 0; i < b.size(); ++i) acc.push(i, std::span(b).subspan(i, 1));
  EXPECT_EQ(acc.result().epsilon, 0.5);
}

TEST(Streaming, EveryTwoWaySplitMatchesBatch) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto b = random_bits(rng, 2 + rng.below(60));
    const auto batch = epsilon_restless(b);
    for (std::size_t k = 0; k <= b.size(); ++k) {
      RestlessAccumulator acc;
      acc.push(0, std::span(b).first(k));
      acc.push(1, std::span(b).subspan(k));
      EXPECT_EQ(acc.result().n_errors, batch.n_errors);
      EXPECT_EQ(acc.result().epsilon, batch.epsilon);

      RestlessAccumulator left, right;
      left.push(0, std::span(b).first(k));
      right.push(0, std::span(b).subspan(k));
      left.merge(right);
      EXPECT_EQ(left.result().epsilon, batch.epsilon);
    }
  }
}

TEST(Streaming, RandomChunkingWithEmptyChunks) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto b = random_bits(rng, 2 + rng.below(300));
    for (Mode mode : {Mode::Restless, Mode::Conventional}) {
      RestlessAccumulator acc(mode, 7);
      std::size_t pos = 0;
      std::uint64_t seq = 0;
      while (pos < b.size()) {
        if (rng.bernoulli(0.2)) acc.push(seq++, {});
        const std::size_t len = std::min<std::size_t>(rng.below(9), b.size() - pos);
        acc.push(seq++, std::span(b).subspan(pos, len));
        pos += len;
      }
      const auto batch = mode == Mode::Restless ? epsilon_restless(b) : epsilon_conventional(b);
      EXPECT_EQ(acc.result().epsilon, batch.epsilon);
      EXPECT_EQ(acc.result().n_cliffords, 7);
    }
  }
}

TEST(Streaming, OutOfOrderDetected) {
  RestlessAccumulator acc;
  const Bits b{0, 1};
  acc.push(0, b);
  EXPECT_THROW(acc.push(2, b), std::runtime_error);
  EXPECT_NO_THROW(acc.push(1, b));
}

TEST(Streaming, MergeRules) {
  RestlessAccumulator a(Mode::Restless), c(Mode::Conventional), empty;
  const Bits b{1, 1, 0};
  a.push(0, b);
  EXPECT_THROW(a.merge(c), std::invalid_argument);
  a.merge(empty);
  EXPECT_EQ(a.result().epsilon, epsilon_restless(b).epsilon);
  RestlessAccumulator none;
  EXPECT_THROW(none.result(), std::invalid_argument);
}
