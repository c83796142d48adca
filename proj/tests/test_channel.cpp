#include <gtest/gtest.h>

#include "burststream/channel.hpp"

using namespace bst;

TEST(Channel, SingleBurst) {
  EXPECT_TRUE(single_burst(3, 0, 10).erased.empty());
  EXPECT_EQ(single_burst(0, 2, 10).erased, (std::set<size_t>{0, 1}));
  EXPECT_THROW(single_burst(9, 2, 10), std::out_of_range);
  for (size_t j = 0; j + 2 <= 12; ++j) {
    const auto p = single_burst(j, 2, 12);
    ASSERT_EQ(p.bursts().size(), 1u);
    EXPECT_EQ(p.bursts()[0], std::make_pair(j, size_t(2)));
  }
}

TEST(Channel, Periodic) {
  EXPECT_TRUE(periodic(3, 0, 9).erased.empty());
  EXPECT_EQ(periodic(3, 1, 9).erased, (std::set<size_t>{0, 3, 6}));
  // B=2, T=1: period 4, two erased then two received
  EXPECT_EQ(periodic(4, 2, 12).erased, (std::set<size_t>{0, 1, 4, 5, 8, 9}));
  EXPECT_THROW(periodic(2, 2, 9), std::out_of_range);
}

TEST(Channel, MultiBurst) {
  EXPECT_EQ(multi_burst({{2, 1}}, 2, 10).erased, single_burst(2, 1, 10).erased);
  EXPECT_EQ(multi_burst({{1, 1}, {4, 1}}, 2, 10).erased, (std::set<size_t>{1, 4}));
  EXPECT_THROW(multi_burst({{1, 1}, {3, 1}}, 2, 10), PatternViolation);
}

TEST(Channel, ApplyKeepsPayloads) {
  const std::vector<int> s{5, 6, 7, 8};
  const auto out = apply_erasures(single_burst(1, 2, 4), s);
  EXPECT_EQ(*out[0], 5);
  EXPECT_FALSE(out[1].has_value());
  EXPECT_FALSE(out[2].has_value());
  EXPECT_EQ(*out[3], 8);
}

TEST(Channel, Json) {
  const auto p = periodic(3, 1, 9);
  EXPECT_EQ(ErasurePattern::from_json(p.to_json()).erased, p.erased);
  EXPECT_THROW(ErasurePattern::from_json(nlohmann::json{{"T", 3}, {"erased", {5}}}), std::out_of_range);
}
