#include "bellmem/core.hpp"
#include "bellmem/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

using namespace bellmem;

namespace {

constexpr SettingPair kA1B1{AliceSetting::A1, BobSetting::B1};
constexpr SettingPair kA1B2{AliceSetting::A1, BobSetting::B2};
constexpr SettingPair kA2B1{AliceSetting::A2, BobSetting::B1};
constexpr SettingPair kA2B2{AliceSetting::A2, BobSetting::B2};

}  // namespace

TEST_CASE("setting pairs enumerate in canonical order") {
  CHECK(kAllPairs[0] == kA1B1);
  CHECK(kAllPairs[1] == kA1B2);
  CHECK(kAllPairs[2] == kA2B1);
  CHECK(kAllPairs[3] == kA2B2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(SettingPair::from_index(i).index() == i);
  CHECK(kA1B1 < kA2B2);
  CHECK(kA2B2.wants_anticorrelation());
  CHECK_FALSE(kA1B2.wants_anticorrelation());
}

TEST_CASE("outcome negation is an involution") {
  for (Outcome o : {Outcome::Plus, Outcome::Minus}) {
    CHECK(negate(negate(o)) == o);
    CHECK(negate(o) != o);
  }
  CHECK(outcome_from_bit(1) == Outcome::Plus);
  CHECK(outcome_from_bit(0) == Outcome::Minus);
}

TEST_CASE("record_round") {
  Transcript t = record_round(Transcript{}, kA1B1, Outcome::Plus, Outcome::Plus);
  CHECK(t.size() == 1);
  CHECK(t[0].index == 1);
  CHECK(counts(t)[kA1B1.index()] == PairTally{1, 1, 0});

  t = record_round(t, kA2B2, Outcome::Plus, Outcome::Minus);
  CHECK(t.size() == 2);
  CHECK(t[1].index == 2);
  CHECK(counts(t)[kA2B2.index()].anticorrelated == 1);

  Transcript four;
  for (SettingPair p : kAllPairs) four = record_round(four, p, Outcome::Plus, Outcome::Minus);
  std::uint64_t sum = 0;
  for (const PairTally& tally : counts(four)) sum += tally.total;
  CHECK(sum == 4);
}

TEST_CASE("record_round leaves its input untouched") {
  const Transcript original = record_round(Transcript{}, kA1B2, Outcome::Minus, Outcome::Minus);
  const Transcript extended = record_round(original, kA2B1, Outcome::Plus, Outcome::Minus);
  CHECK(original.size() == 1);
  CHECK(extended.size() == 2);
}

TEST_CASE("counts") {
  SUBCASE("single correlated round") {
    Transcript t;
    t.append(kA1B1, Outcome::Plus, Outcome::Plus);
    CHECK(counts(t)[0] == PairTally{1, 1, 0});
    for (std::size_t i = 1; i < 4; ++i) CHECK(counts(t)[i] == PairTally{});
  }
  SUBCASE("mixed (A2,B2) rounds") {
    Transcript t;
    t.append(kA2B2, Outcome::Plus, Outcome::Minus);
    t.append(kA2B2, Outcome::Minus, Outcome::Minus);
    CHECK(counts(t)[kA2B2.index()] == PairTally{2, 1, 1});
  }
  SUBCASE("all +1, two per pair") {
    Transcript t;
    for (SettingPair p : kAllPairs) {
      t.append(p, Outcome::Plus, Outcome::Plus);
      t.append(p, Outcome::Plus, Outcome::Plus);
    }
    for (const PairTally& tally : counts(t)) CHECK(tally == PairTally{2, 2, 0});
  }
}

TEST_CASE("property: count conservation and cached counts equal a recount") {
  RandomSource rng(20260101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.next() % 60;
    const Transcript t = testing::random_transcript(rng, n);
    std::uint64_t total = 0;
    for (const PairTally& tally : t.counts()) {
      total += tally.total;
      CHECK(tally.correlated + tally.anticorrelated == tally.total);
    }
    CHECK(total == n);
    CHECK(t.counts() == count_rounds(t.rounds()));
    for (std::size_t i = 0; i < n; ++i) CHECK(t[i].index == i + 1);
  }
}

TEST_CASE("memory_view examples") {
  Transcript t;
  t.append(kA1B2, Outcome::Plus, Outcome::Minus);
  t.append(kA2B1, Outcome::Minus, Outcome::Minus);
  t.append(kA2B2, Outcome::Plus, Outcome::Plus);

  SUBCASE("class None is empty") {
    const MemoryView v = memory_view(t, MemoryClass::None, Side::Alice, 3);
    CHECK(v.size() == 0);
    CHECK(v.entries().empty());
    CHECK_THROWS_AS(v.alice(0), InvariantViolation);
  }
  SUBCASE("own-side Alice view up to 2") {
    const MemoryView v = memory_view(t, MemoryClass::OwnSide, Side::Alice, 2);
    REQUIRE(v.size() == 2);
    CHECK(v.alice(0).setting == AliceSetting::A1);
    CHECK(v.alice(0).outcome == Outcome::Plus);
    CHECK(v.alice(1).setting == AliceSetting::A2);
    CHECK(v.alice(1).outcome == Outcome::Minus);
    CHECK_THROWS_AS(v.alice(2), InvariantViolation);
    CHECK_THROWS_AS(v.bob(0), InvariantViolation);
    CHECK_THROWS_AS(v.round(0), InvariantViolation);
    CHECK_THROWS_AS(v.pair_counts(), InvariantViolation);
  }
  SUBCASE("full view at upto 0 is empty") {
    const MemoryView v = memory_view(t, MemoryClass::Full, Side::Bob, 0);
    CHECK(v.size() == 0);
    CHECK(v.entries().empty());
  }
  SUBCASE("full view exposes both sides and prefix counts") {
    const MemoryView v = memory_view(t, MemoryClass::Full, Side::Bob, 2);
    CHECK(v.round(1).pair == kA2B1);
    CHECK(v.alice(1).outcome == Outcome::Minus);
    CHECK(v.bob(0).setting == BobSetting::B2);
    CHECK(v.pair_counts()[kA2B2.index()].total == 0);
    CHECK(v.pair_counts()[kA1B2.index()].total == 1);
  }
  SUBCASE("out of range upto") {
    CHECK_THROWS_AS(memory_view(t, MemoryClass::Full, Side::Alice, 4), InputError);
  }
}

TEST_CASE("property: views are prefix-monotone and own-side views hide the other side") {
  RandomSource rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Transcript t = testing::random_transcript(rng, 1 + rng.next() % 20);
    for (MemoryClass cls : {MemoryClass::None, MemoryClass::OwnSide, MemoryClass::Full}) {
      for (Side side : {Side::Alice, Side::Bob}) {
        for (std::size_t k = 0; k < t.size(); ++k) {
          const auto shorter = memory_view(t, cls, side, k).entries();
          const auto longer = memory_view(t, cls, side, k + 1).entries();
          REQUIRE(shorter.size() <= longer.size());
          for (std::size_t i = 0; i < shorter.size(); ++i) {
            CHECK(shorter[i].index == longer[i].index);
            CHECK(shorter[i].alice_setting == longer[i].alice_setting);
            CHECK(shorter[i].a == longer[i].a);
            CHECK(shorter[i].bob_setting == longer[i].bob_setting);
            CHECK(shorter[i].b == longer[i].b);
          }
        }
        if (cls != MemoryClass::OwnSide) continue;
        const MemoryView v = memory_view(t, cls, side, t.size());
        for (const ViewEntry& e : v.entries()) {
          if (side == Side::Alice) {
            CHECK_FALSE(e.bob_setting.has_value());
            CHECK_FALSE(e.b.has_value());
          } else {
            CHECK_FALSE(e.alice_setting.has_value());
            CHECK_FALSE(e.a.has_value());
          }
        }
        const std::string text = v.serialize();
        if (side == Side::Alice) {
          CHECK(text.find('B') == std::string::npos);
        } else {
          CHECK(text.find('A') == std::string::npos);
        }
      }
    }
  }
}

TEST_CASE("transcript CSV") {
  RandomSource rng(99);
  const Transcript t = testing::random_transcript(rng, 25);
  std::stringstream buffer;
  write_transcript_csv(buffer, t);
  CHECK(buffer.str().rfind("round,alice_setting,bob_setting,a,b\n", 0) == 0);
  CHECK(read_transcript_csv(buffer) == t);

  std::stringstream exact("round,alice_setting,bob_setting,a,b\n1,A2,B2,+1,-1\n");
  const Transcript one = read_transcript_csv(exact);
  CHECK(one[0] == Round{1, kA2B2, Outcome::Plus, Outcome::Minus});

  std::stringstream bad_header("r,a\n");
  CHECK_THROWS_AS(read_transcript_csv(bad_header), InputError);
  std::stringstream bad_setting("round,alice_setting,bob_setting,a,b\n1,A3,B1,+1,+1\n");
  CHECK_THROWS_AS(read_transcript_csv(bad_setting), InputError);
  std::stringstream bad_order("round,alice_setting,bob_setting,a,b\n2,A1,B1,+1,+1\n");
  CHECK_THROWS_AS(read_transcript_csv(bad_order), InputError);
}
