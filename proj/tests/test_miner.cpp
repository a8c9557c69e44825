#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "macroplan/miner.hpp"

using namespace macroplan;

namespace {

SequenceDatabase db_of(const std::vector<std::string>& seqs) {
  SequenceDatabase db;
  for (const auto& s : seqs) {
    std::vector<std::string> items;
    for (char c : s) items.emplace_back(1, c);
    db.add(items);
  }
  return db;
}

MinerConfig absolute(std::size_t sigma, std::size_t min_len = 1, std::optional<std::size_t> max_len = {}) {
  MinerConfig c;
  c.threshold = AbsoluteSupport{sigma};
  c.min_length = min_len;
  c.max_length = max_len;
  return c;
}

// Patterns rendered as "ab:2" for readable comparisons.
std::vector<std::string> render(const SequenceDatabase& db, const std::vector<Pattern>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) {
    std::string s;
    for (const auto& n : db.decode(p.items)) s += n;
    out.push_back(s + ":" + std::to_string(p.support));
  }
  std::sort(out.begin(), out.end());
  return out;
}

SequenceDatabase random_db(std::mt19937& rng, std::size_t max_seqs = 8, std::size_t max_len = 6, std::size_t alphabet = 5) {
  SequenceDatabase db;
  std::size_t n = 1 + rng() % max_seqs;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t len = 1 + rng() % max_len;
    std::vector<std::string> seq;
    for (std::size_t k = 0; k < len; ++k) seq.emplace_back(1, static_cast<char>('a' + rng() % alphabet));
    db.add(seq);
  }
  return db;
}

}  // namespace

TEST(ComputeSupport, Examples) {
  auto db = db_of({"abc", "ac", "bc"});
  EXPECT_EQ(compute_support(db, std::vector<std::string>{"a", "c"}), 2u);
  EXPECT_EQ(compute_support(db, std::vector<std::string>{}), 3u);
  EXPECT_EQ(compute_support(db, std::vector<std::string>{"c", "a"}), 0u);
  EXPECT_EQ(compute_support(db, std::vector<std::string>{"z"}), 0u);
}

TEST(ComputeSupport, RepeatedItemsCountOncePerSequence) {
  auto db = db_of({"aaa", "a"});
  EXPECT_EQ(compute_support(db, std::vector<std::string>{"a"}), 2u);
  EXPECT_EQ(compute_support(db, std::vector<std::string>{"a", "a"}), 1u);
}

TEST(MineClosed, Examples) {
  auto db = db_of({"ab", "ab", "a"});
  EXPECT_EQ(render(db, mine_closed(db, absolute(2))), (std::vector<std::string>{"a:3", "ab:2"}));
  EXPECT_TRUE(mine_closed(db, absolute(4)).empty());
  auto single = db_of({"a"});
  EXPECT_EQ(render(single, mine_closed(single, absolute(1))), (std::vector<std::string>{"a:1"}));
  EXPECT_TRUE(mine_closed(SequenceDatabase{}, absolute(1)).empty());
}

TEST(MineClosed, BackwardExtensionIsNotClosed) {
  // <b> occurs only after a in both sequences, so <a,b> absorbs it.
  auto db = db_of({"xab", "ayb"});
  EXPECT_EQ(render(db, mine_closed(db, absolute(2))), (std::vector<std::string>{"ab:2"}));
}

TEST(MineClosed, LengthBoundsKeepGlobalClosure) {
  auto db = db_of({"abc", "abc", "ab"});
  // <a,b>:3 and <a,b,c>:2 are closed; with max_len 2 only <a,b> is reported
  // and <a,c> (support 2, absorbed by <a,b,c>) must not appear.
  EXPECT_EQ(render(db, mine_closed(db, absolute(2, 1, 2))), (std::vector<std::string>{"ab:3"}));
  EXPECT_EQ(render(db, mine_closed(db, absolute(2, 3))), (std::vector<std::string>{"abc:2"}));
}

TEST(BruteForceClosed, Examples) {
  auto db = db_of({"ab", "ab", "a"});
  EXPECT_EQ(render(db, brute_force_closed(db, absolute(2))), (std::vector<std::string>{"a:3", "ab:2"}));
  EXPECT_TRUE(brute_force_closed(SequenceDatabase{}, absolute(1)).empty());
  auto single = db_of({"a"});
  EXPECT_EQ(render(single, brute_force_closed(single, absolute(1))), (std::vector<std::string>{"a:1"}));
}

TEST(BruteForceClosed, GuardLimit) {
  SequenceDatabase db;
  for (int i = 0; i < 7; ++i) db.add(std::vector<std::string>(9, "a"));  // 63 items
  EXPECT_THROW(brute_force_closed(db, absolute(1)), GuardLimitExceeded);
  SequenceDatabase longseq;
  longseq.add(std::vector<std::string>(25, "a"));
  EXPECT_THROW(brute_force_closed(longseq, absolute(1)), GuardLimitExceeded);
}

TEST(MinerConfig, RelativeThresholdRoundsUp) {
  MinerConfig c;
  c.threshold = RelativeSupport{0.3};
  EXPECT_EQ(c.sigma(10), 3u);
  c.threshold = RelativeSupport{0.25};
  EXPECT_EQ(c.sigma(10), 3u);
  c.threshold = RelativeSupport{0.1};
  EXPECT_EQ(c.sigma(40), 4u);
  EXPECT_EQ(c.sigma(1), 1u);
  c.threshold = RelativeSupport{1.1};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.threshold = RelativeSupport{0.0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(MineClosed, MatchesBruteForceOnRandomDatabases) {
  std::mt19937 rng(20240601);
  for (int trial = 0; trial < 300; ++trial) {
    auto db = random_db(rng);
    std::size_t sigma = 1 + rng() % 4;
    std::size_t min_len = 1 + rng() % 2;
    std::optional<std::size_t> max_len;
    if (rng() % 3 == 0) max_len = min_len + rng() % 3;
    auto cfg = absolute(sigma, min_len, max_len);
    ASSERT_EQ(mine_closed(db, cfg), brute_force_closed(db, cfg)) << "trial " << trial << " sigma " << sigma;
  }
}

TEST(MineClosed, Properties) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto db = random_db(rng, 10, 10, 4);
    std::size_t sigma = 1 + rng() % 3;
    auto result = mine_closed(db, absolute(sigma));
    for (const auto& p : result) {
      ASSERT_FALSE(p.items.empty());
      EXPECT_EQ(p.support, compute_support(db, p.items));
      EXPECT_GE(p.support, sigma);
      // anti-monotone along prefixes
      for (std::size_t k = 1; k < p.items.size(); ++k) {
        std::vector<ItemId> prefix(p.items.begin(), p.items.begin() + k);
        EXPECT_GE(compute_support(db, prefix), p.support);
      }
      // closure within the result
      for (const auto& q : result)
        if (q.items.size() > p.items.size() && is_subsequence(p.items, q.items)) EXPECT_NE(q.support, p.support);
    }
    // raising sigma never adds a pattern
    auto higher = mine_closed(db, absolute(sigma + 1));
    for (const auto& p : higher) EXPECT_NE(std::find(result.begin(), result.end(), p), result.end());
    // determinism
    EXPECT_EQ(mine_closed(db, absolute(sigma)), result);
  }
}

TEST(Spmf, ExportImport) {
  auto db = db_of({"abca", "cb"});
  std::string text = to_spmf(db);
  EXPECT_EQ(text, "1 -1 2 -1 3 -1 1 -1 -2\n3 -1 2 -1 -2\n");
  auto back = from_spmf(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(to_spmf(back), text);
  EXPECT_EQ(back.decode(back.sequences()[1]), (std::vector<std::string>{"3", "2"}));
  EXPECT_EQ(render(db, mine_closed(db, absolute(1))).size(), render(back, mine_closed(back, absolute(1))).size());
}

TEST(Spmf, RejectsItemsetsAndMissingTerminator) {
  EXPECT_THROW(from_spmf("1 2 -1 -2\n"), std::runtime_error);
  EXPECT_THROW(from_spmf("1 -1 2 -1\n"), std::runtime_error);
  EXPECT_EQ(from_spmf("# comment\n\n5 -1 -2\n").size(), 1u);
}
