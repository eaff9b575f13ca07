// Copyright 2026 The Authors.
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

#include "s2l/trajectory.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "s2l/error.hpp"
#include "test_util.hpp"

namespace s2l {
namespace {

using testing::random_store;
using testing::TempDir;

TrajectoryStore parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return read_trajectories_jsonl(in);
}

std::string error_of(const std::string& text) {
  try {
    parse_jsonl(text);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

// Distance in units in the last place between two non-negative floats.
std::uint32_t ulp_distance(float a, float b) {
  const auto ua = std::bit_cast<std::uint32_t>(a);
  const auto ub = std::bit_cast<std::uint32_t>(b);
  return ua > ub ? ua - ub : ub - ua;
}

TEST(TrajectoryJsonl, LoadsRowsInFileOrder) {
  const auto store = parse_jsonl(
      R"({"id":"a","source":"s1","losses":[4,3,2,1]})"
      "\n"
      R"({"id":"b","source":"s2","losses":[1.5,1.25,1,0.5]})"
      "\n"
      R"({"id":"c","source":"s1","losses":[0,0,0,0]})"
      "\n");
  EXPECT_EQ(store.size(), 3u);
  EXPECT_EQ(store.length(), 4u);
  EXPECT_EQ(store.ids(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(store.sources(), (std::vector<std::string>{"s1", "s2", "s1"}));
  EXPECT_EQ(store.at(1, 1), 1.25f);
  // No header: one checkpoint every 500 iterations.
  EXPECT_EQ(store.checkpoint_steps(), (std::vector<std::uint64_t>{500, 1000, 1500, 2000}));
}

TEST(TrajectoryJsonl, HeaderSetsStepsAndUnknownKeysAreIgnored) {
  const auto store = parse_jsonl(
      R"({"checkpoint_steps":[10,20]})"
      "\n"
      R"({"id":"a","source":"s","losses":[1,2],"note":"extra","n_tokens":17})"
      "\n");
  EXPECT_EQ(store.checkpoint_steps(), (std::vector<std::uint64_t>{10, 20}));
}

TEST(TrajectoryJsonl, RaggedRowNamesOffendingId) {
  const std::string msg = error_of(
      R"({"id":"ex1","source":"s","losses":[1,2,3,4]})"
      "\n"
      R"({"id":"ex2","source":"s","losses":[1,2,3]})"
      "\n"
      R"({"id":"ex3","source":"s","losses":[1,2,3,4]})"
      "\n");
  EXPECT_NE(msg.find("ex2"), std::string::npos) << msg;
}

TEST(TrajectoryJsonl, RejectsInvalidContent) {
  EXPECT_NE(error_of(R"({"id":"a","source":"s","losses":[1]})"
                     "\n"
                     R"({"id":"a","source":"s","losses":[2]})")
                .find("duplicate"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"id":"neg","source":"s","losses":[1,-0.5]})").find("neg"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"id":"big","source":"s","losses":[1e300]})").find("big"),
            std::string::npos);
  EXPECT_FALSE(error_of("").empty());
  EXPECT_FALSE(error_of(R"({"checkpoint_steps":[1,2]})").empty());
  EXPECT_FALSE(error_of(R"({"checkpoint_steps":[2,1]})"
                        "\n"
                        R"({"id":"a","source":"s","losses":[1,2]})")
                   .empty());
  EXPECT_FALSE(error_of(R"({"checkpoint_steps":[1,2,3]})"
                        "\n"
                        R"({"id":"a","source":"s","losses":[1,2]})")
                   .empty());
  EXPECT_FALSE(error_of("not json").empty());
  EXPECT_FALSE(error_of(R"({"id":"a","losses":[1]})").empty());
}

TEST(TrajectoryStore, ZeroLossIsLegal) {
  TrajectoryStore s({"x"}, {"s"}, {0.0f}, {500});
  EXPECT_EQ(s.at(0, 0), 0.0f);
}

TEST(TrajectoryStore, ConstructorEnforcesInvariants) {
  EXPECT_THROW(TrajectoryStore({}, {}, {}, {500}), FormatError);
  EXPECT_THROW(TrajectoryStore({"a"}, {"s"}, {}, {}), FormatError);
  EXPECT_THROW(TrajectoryStore({"a"}, {"s"}, {1.0f, 2.0f}, {500}), FormatError);
  EXPECT_THROW(TrajectoryStore({"a"}, {}, {1.0f}, {500}), FormatError);
  EXPECT_THROW(TrajectoryStore({"a"}, {"s"}, {std::numeric_limits<float>::quiet_NaN()}, {500}),
               FormatError);
  EXPECT_THROW(TrajectoryStore({"a", "b"}, {"s", "s"}, {1.0f, 1.0f, 1.0f, 1.0f}, {5, 5}),
               FormatError);
}

TEST(TrajectoryIo, SingleRecordFile) {
  TempDir dir;
  TrajectoryStore s({"only"}, {"s"}, {0.0f}, {500});
  for (auto fmt : {TrajectoryFormat::kJsonl, TrajectoryFormat::kBinary}) {
    const auto path = dir / (fmt == TrajectoryFormat::kBinary ? "one.bin" : "one.jsonl");
    write_trajectories(s, path, fmt);
    EXPECT_EQ(load_trajectories(path, fmt), s);
  }
  std::ifstream in(dir / "one.jsonl");
  std::string header, record, extra;
  std::getline(in, header);
  std::getline(in, record);
  EXPECT_EQ(record, R"({"id":"only","source":"s","losses":[0]})");
  EXPECT_FALSE(std::getline(in, extra));
}

TEST(TrajectoryIo, BinaryLayoutMatchesFormat) {
  TrajectoryStore s({"ab"}, {"c"}, {1.0f, 0.5f}, {500, 1000});
  const std::string bytes = encode_trajectories_binary(s);
  // magic, u32 version, u64 n, u32 T, 2 x u64 steps, u16+2, u16+1, 2 x f32
  ASSERT_EQ(bytes.size(), 4u + 4 + 8 + 4 + 16 + 4 + 3 + 8);
  EXPECT_EQ(bytes.substr(0, 4), "S2LT");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1u);   // n
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 2u);  // T
  EXPECT_EQ(static_cast<unsigned char>(bytes[20]), 0xf4u);  // 500 = 0x01f4
  EXPECT_EQ(static_cast<unsigned char>(bytes[21]), 0x01u);
  EXPECT_EQ(bytes.substr(36, 2), std::string("\x02\x00", 2));
  EXPECT_EQ(bytes.substr(38, 2), "ab");
  // 1.0f little-endian = 00 00 80 3f
  EXPECT_EQ(bytes.substr(43, 4), std::string("\x00\x00\x80\x3f", 4));
}

TEST(TrajectoryIo, BinaryRejectsCorruption) {
  std::mt19937_64 gen(3);
  const auto s = random_store(gen, 5, 3);
  const std::string good = encode_trajectories_binary(s);
  auto parse = [](const std::string& bytes) {
    std::istringstream in(bytes);
    return read_trajectories_binary(in);
  };
  EXPECT_EQ(parse(good), s);
  EXPECT_THROW(parse(good.substr(0, good.size() - 1)), FormatError);
  EXPECT_THROW(parse(good + "x"), FormatError);
  std::string bad_magic = good;
  bad_magic[3] = 'F';
  EXPECT_THROW(parse(bad_magic), FormatError);
  std::string bad_version = good;
  bad_version[4] = 2;
  EXPECT_THROW(parse(bad_version), FormatError);
}

// Property: binary write/load reproduces every random store exactly.
TEST(TrajectoryIo, BinaryRoundTripProperty) {
  TempDir dir;
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = random_store(gen, 1 + gen() % 40, 1 + gen() % 12, 1 + gen() % 4);
    write_trajectories(s, dir / "t.bin", TrajectoryFormat::kBinary);
    const auto back = load_trajectories(dir / "t.bin", TrajectoryFormat::kBinary);
    ASSERT_EQ(back, s);
    for (std::size_t e = 0; e < s.losses().size(); ++e) {
      ASSERT_EQ(std::bit_cast<std::uint32_t>(back.losses()[e]),
                std::bit_cast<std::uint32_t>(s.losses()[e]));
    }
  }
}

// Property: jsonl -> load -> binary -> load stays within one float ulp.
TEST(TrajectoryIo, TwoHopRoundTripWithinOneUlp) {
  TempDir dir;
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = random_store(gen, 1 + gen() % 40, 1 + gen() % 12, 3);
    write_trajectories(s, dir / "t.jsonl", TrajectoryFormat::kJsonl);
    const auto mid = load_trajectories(dir / "t.jsonl", TrajectoryFormat::kJsonl);
    write_trajectories(mid, dir / "t.bin", TrajectoryFormat::kBinary);
    const auto back = load_trajectories(dir / "t.bin", TrajectoryFormat::kBinary);
    ASSERT_EQ(back.ids(), s.ids());
    ASSERT_EQ(back.sources(), s.sources());
    ASSERT_EQ(back.checkpoint_steps(), s.checkpoint_steps());
    for (std::size_t e = 0; e < s.losses().size(); ++e) {
      ASSERT_LE(ulp_distance(back.losses()[e], s.losses()[e]), 1u);
    }
  }
}

TEST(TrajectoryIo, UnwritablePathIsIoError) {
  TrajectoryStore s({"a"}, {"s"}, {1.0f}, {500});
  EXPECT_THROW(write_trajectories(s, "/nonexistent-dir/x.bin", TrajectoryFormat::kBinary),
               IoError);
  EXPECT_THROW(load_trajectories("/nonexistent-dir/x.bin", TrajectoryFormat::kBinary), IoError);
}

TEST(FeatureIo, RoundTripAndValidation) {
  TempDir dir;
  FeatureMatrix f({"a", "b"}, {1.0f, 2.0f, -3.0f, 0.25f}, 2);
  write_features(f, dir / "f.bin");
  EXPECT_EQ(load_features(dir / "f.bin"), f);
  EXPECT_THROW(FeatureMatrix({"a"}, {}, 0), FormatError);
  EXPECT_THROW(FeatureMatrix({"a"}, {1.0f, 2.0f, 3.0f}, 2), FormatError);
  EXPECT_THROW(FeatureMatrix({"a"}, {std::numeric_limits<float>::infinity()}, 1), FormatError);
}

TEST(Subsample, AllColumnsIsIdentity) {
  std::mt19937_64 gen(5);
  const auto s = random_store(gen, 10, 6);
  const std::vector<std::size_t> all = {0, 1, 2, 3, 4, 5};
  EXPECT_EQ(subsample_checkpoints(s, all), s);
}

TEST(Subsample, DenseAndSparseVariants) {
  std::mt19937_64 gen(6);
  const auto s = random_store(gen, 7, 8);
  const std::vector<std::size_t> early = {0, 1, 2, 3};
  const std::vector<std::size_t> sparse = {0, 2, 4, 6};
  for (const auto& keep : {early, sparse}) {
    const auto sub = subsample_checkpoints(s, keep);
    ASSERT_EQ(sub.length(), 4u);
    EXPECT_EQ(sub.ids(), s.ids());
    EXPECT_EQ(sub.sources(), s.sources());
    for (std::size_t j = 0; j < keep.size(); ++j) {
      EXPECT_EQ(sub.checkpoint_steps()[j], s.checkpoint_steps()[keep[j]]);
      for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(sub.at(i, j), s.at(i, keep[j]));
    }
  }
  EXPECT_EQ(window_checkpoints(8, 4, Stage::kEarly), early);
  EXPECT_EQ(uniform_checkpoints(8, 4), sparse);
  EXPECT_EQ(window_checkpoints(8, 4, Stage::kMiddle), (std::vector<std::size_t>{2, 3, 4, 5}));
  EXPECT_EQ(window_checkpoints(8, 4, Stage::kLate), (std::vector<std::size_t>{4, 5, 6, 7}));
}

TEST(Subsample, RejectsBadIndices) {
  std::mt19937_64 gen(7);
  const auto s = random_store(gen, 3, 4);
  EXPECT_THROW(subsample_checkpoints(s, std::vector<std::size_t>{}), ArgumentError);
  EXPECT_THROW(subsample_checkpoints(s, std::vector<std::size_t>{0, 4}), ArgumentError);
  EXPECT_THROW(subsample_checkpoints(s, std::vector<std::size_t>{2, 1}), ArgumentError);
  EXPECT_THROW(subsample_checkpoints(s, std::vector<std::size_t>{1, 1}), ArgumentError);
  EXPECT_THROW(uniform_checkpoints(4, 5), ArgumentError);
  EXPECT_THROW(window_checkpoints(4, 0, Stage::kLate), ArgumentError);
}

TEST(DeriveScalar, ArithmeticExamples) {
  TrajectoryStore s({"a", "b"}, {"s", "s"}, {5.0f, 1.0f, 2.0f, 2.0f}, {500, 1000});
  const auto learn = derive_scalar(s, Stat::kLearnability, 0, 1);
  EXPECT_EQ(learn.scores, (std::vector<double>{4.0, 0.0}));
  EXPECT_EQ(learn.ids, s.ids());
  EXPECT_EQ(derive_scalar(s, Stat::kFinalLoss, 0, 0).scores, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(derive_scalar(s, Stat::kEarlyLoss, 1, 1).scores, (std::vector<double>{5.0, 2.0}));
  EXPECT_THROW(derive_scalar(s, Stat::kLearnability, 0, 2), ArgumentError);
}

TEST(DeriveScalar, PerplexityAndConfidence) {
  TrajectoryStore s({"a"}, {"s"}, {3.0f, 0.6931f}, {500, 1000});
  EXPECT_NEAR(derive_scalar(s, Stat::kPerplexity, 0, 1).scores[0], 2.0, 1e-3);
  EXPECT_NEAR(derive_scalar(s, Stat::kConfidence, 0, 1).scores[0], 0.5, 1e-4);
}

TEST(DeriveScalar, LearnabilityIsAntisymmetric) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_store(gen, 20, 6);
    const std::size_t a = gen() % 6;
    const std::size_t b = gen() % 6;
    const auto fwd = derive_scalar(s, Stat::kLearnability, a, b);
    const auto rev = derive_scalar(s, Stat::kLearnability, b, a);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(fwd.scores[i], -rev.scores[i]);
  }
}

TEST(PartitionBySource, Examples) {
  TrajectoryStore one({"x", "y"}, {"s", "s"}, {1.0f, 2.0f}, {500});
  const auto v1 = partition_by_source(one);
  ASSERT_EQ(v1.size(), 1u);
  EXPECT_EQ(v1[0].rows, (std::vector<std::size_t>{0, 1}));

  TrajectoryStore aba({"x", "y", "z"}, {"a", "b", "a"}, {1.0f, 2.0f, 3.0f}, {500});
  const auto v2 = partition_by_source(aba);
  ASSERT_EQ(v2.size(), 2u);
  EXPECT_EQ(v2[0].source, "a");
  EXPECT_EQ(v2[0].rows, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(v2[1].source, "b");
  EXPECT_EQ(v2[1].rows, (std::vector<std::size_t>{1}));
}

TEST(PartitionBySource, ViewsFormExactPartition) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_store(gen, 50 + gen() % 100, 2, 5);
    const auto views = partition_by_source(s);
    std::vector<int> hits(s.size(), 0);
    std::size_t total = 0;
    for (const auto& v : views) {
      total += v.rows.size();
      EXPECT_TRUE(std::is_sorted(v.rows.begin(), v.rows.end()));
      for (auto r : v.rows) {
        ++hits[r];
        EXPECT_EQ(s.sources()[r], v.source);
      }
    }
    EXPECT_EQ(total, s.size());
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

}  // namespace
}  // namespace s2l
