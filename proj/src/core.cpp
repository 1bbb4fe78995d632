#include "bellmem/core.hpp"

#include "bellmem/errors.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace bellmem {

std::string_view to_string(AliceSetting s) { return s == AliceSetting::A1 ? "A1" : "A2"; }
std::string_view to_string(BobSetting s) { return s == BobSetting::B1 ? "B1" : "B2"; }
std::string_view to_string(Outcome o) { return o == Outcome::Plus ? "+1" : "-1"; }
std::string_view to_string(Side s) { return s == Side::Alice ? "alice" : "bob"; }

std::string_view to_string(MemoryClass c) {
  switch (c) {
    case MemoryClass::None: return "none";
    case MemoryClass::OwnSide: return "own-side";
    case MemoryClass::Full: return "full";
  }
  return "?";
}

std::string to_string(SettingPair p) {
  return "(" + std::string(to_string(p.alice)) + "," + std::string(to_string(p.bob)) + ")";
}

AliceSetting parse_alice_setting(std::string_view text) {
  if (text == "A1") return AliceSetting::A1;
  if (text == "A2") return AliceSetting::A2;
  throw InputError("invalid Alice setting '" + std::string(text) + "' (expected A1 or A2)");
}

BobSetting parse_bob_setting(std::string_view text) {
  if (text == "B1") return BobSetting::B1;
  if (text == "B2") return BobSetting::B2;
  throw InputError("invalid Bob setting '" + std::string(text) + "' (expected B1 or B2)");
}

Outcome parse_outcome(std::string_view text) {
  if (text == "+1" || text == "1") return Outcome::Plus;
  if (text == "-1") return Outcome::Minus;
  throw InputError("invalid outcome '" + std::string(text) + "' (expected +1 or -1)");
}

namespace {

void tally(PairTally& t, Outcome a, Outcome b) {
  ++t.total;
  if (a == b) {
    ++t.correlated;
  } else {
    ++t.anticorrelated;
  }
}

}  // namespace

CountTable count_rounds(std::span<const Round> rounds) {
  CountTable table{};
  for (const Round& r : rounds) tally(table[r.pair.index()], r.a, r.b);
  return table;
}

void Transcript::append(SettingPair pair, Outcome a, Outcome b) {
  rounds_.push_back(Round{rounds_.size() + 1, pair, a, b});
  tally(counts_[pair.index()], a, b);
}

Transcript record_round(Transcript transcript, SettingPair pair, Outcome a, Outcome b) {
  transcript.append(pair, a, b);
  return transcript;
}

const CountTable& counts(const Transcript& transcript) { return transcript.counts(); }

void write_transcript_csv(std::ostream& out, const Transcript& transcript) {
  out << "round,alice_setting,bob_setting,a,b\n";
  for (const Round& r : transcript.rounds()) {
    out << r.index << ',' << to_string(r.pair.alice) << ',' << to_string(r.pair.bob) << ','
        << to_string(r.a) << ',' << to_string(r.b) << '\n';
  }
}

Transcript read_transcript_csv(std::istream& in) {
  Transcript transcript;
  std::string line;
  if (!std::getline(in, line) || line != "round,alice_setting,bob_setting,a,b") {
    throw InputError("transcript CSV must start with header 'round,alice_setting,bob_setting,a,b'");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 5) throw InputError("transcript row has " + std::to_string(fields.size()) + " fields: " + line);
    if (fields[0] != std::to_string(transcript.size() + 1)) {
      throw InputError("transcript rounds must be numbered 1..N in order; got '" + fields[0] + "'");
    }
    transcript.append({parse_alice_setting(fields[1]), parse_bob_setting(fields[2])}, parse_outcome(fields[3]),
                      parse_outcome(fields[4]));
  }
  return transcript;
}

MemoryView::MemoryView(const Transcript& transcript, MemoryClass memory_class, Side side, std::size_t upto)
    : transcript_(&transcript), class_(memory_class), side_(side), upto_(upto) {
  if (upto > transcript.size()) {
    throw InputError("memory view upto=" + std::to_string(upto) + " exceeds transcript length " +
                     std::to_string(transcript.size()));
  }
}

void MemoryView::require_visible(std::size_t offset, Side requested) const {
  if (class_ == MemoryClass::None) {
    throw InvariantViolation("memoryless strategy attempted to read history");
  }
  if (class_ == MemoryClass::OwnSide && requested != side_) {
    throw InvariantViolation(std::string("own-side view for ") + std::string(to_string(side_)) +
                             " cannot expose the other side's records");
  }
  if (offset >= upto_) {
    throw InvariantViolation("memory view read at offset " + std::to_string(offset) + " beyond visible prefix " +
                             std::to_string(upto_));
  }
}

AliceRecord MemoryView::alice(std::size_t offset) const {
  require_visible(offset, Side::Alice);
  const Round& r = (*transcript_)[offset];
  return {r.pair.alice, r.a};
}

BobRecord MemoryView::bob(std::size_t offset) const {
  require_visible(offset, Side::Bob);
  const Round& r = (*transcript_)[offset];
  return {r.pair.bob, r.b};
}

const Round& MemoryView::round(std::size_t offset) const {
  if (class_ != MemoryClass::Full) {
    throw InvariantViolation("whole-round access requires a full (two-sided) memory view");
  }
  require_visible(offset, side_);
  return (*transcript_)[offset];
}

CountTable MemoryView::pair_counts() const {
  if (class_ != MemoryClass::Full) {
    throw InvariantViolation("pair counts require a full (two-sided) memory view");
  }
  if (upto_ == transcript_->size()) return transcript_->counts();
  return count_rounds(transcript_->rounds().first(upto_));
}

std::vector<ViewEntry> MemoryView::entries() const {
  std::vector<ViewEntry> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const Round& r = (*transcript_)[i];
    ViewEntry e;
    e.index = r.index;
    if (class_ == MemoryClass::Full || side_ == Side::Alice) {
      e.alice_setting = r.pair.alice;
      e.a = r.a;
    }
    if (class_ == MemoryClass::Full || side_ == Side::Bob) {
      e.bob_setting = r.pair.bob;
      e.b = r.b;
    }
    out.push_back(e);
  }
  return out;
}

std::string MemoryView::serialize() const {
  std::ostringstream out;
  for (const ViewEntry& e : entries()) {
    out << e.index;
    if (e.alice_setting) out << ' ' << to_string(*e.alice_setting) << '=' << to_string(*e.a);
    if (e.bob_setting) out << ' ' << to_string(*e.bob_setting) << '=' << to_string(*e.b);
    out << '\n';
  }
  return out.str();
}

MemoryView memory_view(const Transcript& transcript, MemoryClass memory_class, Side side, std::size_t upto) {
  return MemoryView(transcript, memory_class, side, upto);
}

}  // namespace bellmem
