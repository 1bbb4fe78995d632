#pragma once

// Domain vocabulary for a sequential two-party CHSH experiment: measurement
// settings, outcomes, rounds, append-only transcripts, and the memory views
// through which a sequential strategy is allowed to look at earlier rounds.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bellmem {

enum class AliceSetting : std::uint8_t { A1 = 0, A2 = 1 };
enum class BobSetting : std::uint8_t { B1 = 0, B2 = 1 };

inline constexpr std::array<AliceSetting, 2> kAliceSettings{AliceSetting::A1, AliceSetting::A2};
inline constexpr std::array<BobSetting, 2> kBobSettings{BobSetting::B1, BobSetting::B2};

enum class Outcome : std::int8_t { Minus = -1, Plus = +1 };

constexpr Outcome negate(Outcome o) { return o == Outcome::Plus ? Outcome::Minus : Outcome::Plus; }
constexpr int value_of(Outcome o) { return static_cast<int>(o); }
/// Maps the 1/0 outcome labels used for collective models onto +1/-1.
constexpr Outcome outcome_from_bit(int bit) { return bit != 0 ? Outcome::Plus : Outcome::Minus; }
constexpr Outcome operator*(Outcome lhs, Outcome rhs) {
  return lhs == rhs ? Outcome::Plus : Outcome::Minus;
}

constexpr AliceSetting toggled(AliceSetting s) {
  return s == AliceSetting::A1 ? AliceSetting::A2 : AliceSetting::A1;
}
constexpr BobSetting toggled(BobSetting s) {
  return s == BobSetting::B1 ? BobSetting::B2 : BobSetting::B1;
}

struct SettingPair {
  AliceSetting alice = AliceSetting::A1;
  BobSetting bob = BobSetting::B1;

  /// Position in the canonical order (A1,B1),(A1,B2),(A2,B1),(A2,B2).
  constexpr std::size_t index() const {
    return 2 * static_cast<std::size_t>(alice) + static_cast<std::size_t>(bob);
  }
  static constexpr SettingPair from_index(std::size_t i) {
    return {static_cast<AliceSetting>(i / 2), static_cast<BobSetting>(i % 2)};
  }
  /// The one pair whose CHSH term asks for anticorrelation.
  constexpr bool wants_anticorrelation() const {
    return alice == AliceSetting::A2 && bob == BobSetting::B2;
  }

  friend constexpr bool operator==(SettingPair, SettingPair) = default;
  friend constexpr auto operator<=>(SettingPair lhs, SettingPair rhs) { return lhs.index() <=> rhs.index(); }
};

inline constexpr std::array<SettingPair, 4> kAllPairs{
    SettingPair::from_index(0), SettingPair::from_index(1), SettingPair::from_index(2),
    SettingPair::from_index(3)};

enum class Side : std::uint8_t { Alice, Bob };
constexpr Side other(Side s) { return s == Side::Alice ? Side::Bob : Side::Alice; }

/// Ordered by how much history is visible: None < OwnSide < Full.
enum class MemoryClass : std::uint8_t { None = 0, OwnSide = 1, Full = 2 };

std::string_view to_string(AliceSetting s);
std::string_view to_string(BobSetting s);
std::string_view to_string(Outcome o);
std::string_view to_string(Side s);
std::string_view to_string(MemoryClass c);
std::string to_string(SettingPair p);

AliceSetting parse_alice_setting(std::string_view text);
BobSetting parse_bob_setting(std::string_view text);
/// Accepts "+1", "1", "-1".
Outcome parse_outcome(std::string_view text);

struct Round {
  std::size_t index = 1;  // 1-based
  SettingPair pair;
  Outcome a = Outcome::Plus;
  Outcome b = Outcome::Plus;

  friend bool operator==(const Round&, const Round&) = default;
};

/// #(A,B), #_c(A,B), #_a(A,B) for one setting pair.
struct PairTally {
  std::uint64_t total = 0;
  std::uint64_t correlated = 0;
  std::uint64_t anticorrelated = 0;

  friend bool operator==(const PairTally&, const PairTally&) = default;
};

/// Indexed by SettingPair::index().
using CountTable = std::array<PairTally, 4>;

CountTable count_rounds(std::span<const Round> rounds);

/// Append-only record of N rounds with incrementally maintained pair counts.
class Transcript {
 public:
  Transcript() = default;

  /// In-place append; the new round receives index size()+1.
  void append(SettingPair pair, Outcome a, Outcome b);

  std::span<const Round> rounds() const { return rounds_; }
  std::size_t size() const { return rounds_.size(); }
  bool empty() const { return rounds_.empty(); }
  const Round& operator[](std::size_t i) const { return rounds_[i]; }
  const CountTable& counts() const { return counts_; }

  void reserve(std::size_t n) { rounds_.reserve(n); }

  friend bool operator==(const Transcript& lhs, const Transcript& rhs) { return lhs.rounds_ == rhs.rounds_; }

 private:
  std::vector<Round> rounds_;
  CountTable counts_{};
};

/// Value-semantics append: returns `transcript` extended by one round.
Transcript record_round(Transcript transcript, SettingPair pair, Outcome a, Outcome b);

/// Per-pair counts; always equal to count_rounds(transcript.rounds()).
const CountTable& counts(const Transcript& transcript);

// CSV with header `round,alice_setting,bob_setting,a,b`.
void write_transcript_csv(std::ostream& out, const Transcript& transcript);
Transcript read_transcript_csv(std::istream& in);

struct AliceRecord {
  AliceSetting setting;
  Outcome outcome;
};
struct BobRecord {
  BobSetting setting;
  Outcome outcome;
};

/// One visible round of a memory view. Fields hidden from the viewer are empty.
struct ViewEntry {
  std::size_t index = 0;
  std::optional<AliceSetting> alice_setting;
  std::optional<Outcome> a;
  std::optional<BobSetting> bob_setting;
  std::optional<Outcome> b;
};

/// Read-only window onto the first `upto` rounds of a transcript, filtered by
/// memory class and viewing side. Any access outside what the class permits
/// throws InvariantViolation. The view borrows the transcript; it must not
/// outlive it.
class MemoryView {
 public:
  /// Empty view of class None.
  MemoryView() = default;
  MemoryView(const Transcript& transcript, MemoryClass memory_class, Side side, std::size_t upto);

  MemoryClass memory_class() const { return class_; }
  Side side() const { return side_; }
  /// Number of visible past rounds (0 for class None).
  std::size_t size() const { return class_ == MemoryClass::None ? 0 : upto_; }

  /// Offset is 0-based into the visible prefix.
  AliceRecord alice(std::size_t offset) const;
  BobRecord bob(std::size_t offset) const;
  /// Full class only.
  const Round& round(std::size_t offset) const;
  /// Pair counts of the visible prefix. Full class only.
  CountTable pair_counts() const;

  std::vector<ViewEntry> entries() const;
  /// One line per visible round; only permitted fields are written.
  std::string serialize() const;

 private:
  void require_visible(std::size_t offset, Side requested) const;

  const Transcript* transcript_ = nullptr;
  MemoryClass class_ = MemoryClass::None;
  Side side_ = Side::Alice;
  std::size_t upto_ = 0;
};

/// Checked constructor: throws InputError unless upto <= transcript.size().
MemoryView memory_view(const Transcript& transcript, MemoryClass memory_class, Side side, std::size_t upto);

}  // namespace bellmem
