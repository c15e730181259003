#include "gapcert/group.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include "gapcert/errors.hpp"

namespace gapcert {

namespace {

std::string default_name(std::size_t index) {
  // Skip 'e', which is reserved for the identity.
  static constexpr std::string_view kLetters = "abcdfghijklmnopqrstuvwxyz";
  if (index < kLetters.size()) return std::string(1, kLetters[index]);
  return "g" + std::to_string(index);
}

std::int64_t normalize_exponent(std::int64_t exponent, std::uint32_t order) {
  if (order == 0) return exponent;
  const auto m = static_cast<std::int64_t>(order);
  std::int64_t r = exponent % m;
  return r < 0 ? r + m : r;
}

}  // namespace

Presentation::Presentation(std::vector<std::uint32_t> orders, std::vector<std::string> names)
    : orders_(std::move(orders)), names_(std::move(names)) {
  if (orders_.empty()) throw InvalidInput("presentation needs at least one factor");
  for (auto m : orders_) {
    if (m == 1) throw InvalidInput("cyclic factor order must be 0 (infinite) or >= 2");
  }
  if (names_.empty()) {
    for (std::size_t i = 0; i < orders_.size(); ++i) names_.push_back(default_name(i));
  }
  if (names_.size() != orders_.size()) throw InvalidInput("one generator name per factor required");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto& n = names_[i];
    if (n.empty() || n == "e" || n == "1" || n.find_first_of("^ \t") != std::string::npos)
      throw InvalidInput("invalid generator name '" + n + "'");
    if (std::count(names_.begin(), names_.end(), n) > 1)
      throw InvalidInput("duplicate generator name '" + n + "'");
  }
}

Presentation Presentation::free_group(std::size_t rank) {
  return Presentation(std::vector<std::uint32_t>(rank, 0));
}

std::optional<std::size_t> Presentation::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

bool ShortLex::operator()(const Word& lhs, const Word& rhs) const {
  if (lhs.syllables.size() != rhs.syllables.size())
    return lhs.syllables.size() < rhs.syllables.size();
  return lhs.syllables < rhs.syllables;
}

Word reduce_word(std::span<const Syllable> raw, const Presentation& p) {
  Word out;
  for (const auto& s : raw) {
    if (s.factor >= p.rank())
      throw InvalidInput("factor index " + std::to_string(s.factor) + " out of range");
    const auto m = p.order(s.factor);
    std::int64_t e = normalize_exponent(s.exponent, m);
    if (e == 0) continue;
    auto& stack = out.syllables;
    if (!stack.empty() && stack.back().factor == s.factor) {
      const std::int64_t merged = normalize_exponent(stack.back().exponent + e, m);
      if (merged == 0) {
        stack.pop_back();
      } else {
        stack.back().exponent = merged;
      }
    } else {
      stack.push_back({s.factor, e});
    }
  }
  return out;
}

Word multiply(const Word& lhs, const Word& rhs, const Presentation& p) {
  std::vector<Syllable> raw;
  raw.reserve(lhs.syllables.size() + rhs.syllables.size());
  raw.insert(raw.end(), lhs.syllables.begin(), lhs.syllables.end());
  raw.insert(raw.end(), rhs.syllables.begin(), rhs.syllables.end());
  return reduce_word(raw, p);
}

Word inverse(const Word& w, const Presentation& p) {
  std::vector<Syllable> raw(w.syllables.rbegin(), w.syllables.rend());
  for (auto& s : raw) s.exponent = -s.exponent;
  return reduce_word(raw, p);
}

Word generator(std::size_t factor, std::int64_t exponent, const Presentation& p) {
  const Syllable s{static_cast<std::uint32_t>(factor), exponent};
  return reduce_word(std::span<const Syllable>(&s, 1), p);
}

std::int64_t letter_length(const Word& w, const Presentation& p) {
  std::int64_t total = 0;
  for (const auto& s : w.syllables) {
    const auto m = static_cast<std::int64_t>(p.order(s.factor));
    total += m == 0 ? std::abs(s.exponent) : std::min(s.exponent, m - s.exponent);
  }
  return total;
}

std::vector<Word> standard_generators(const Presentation& p) {
  std::vector<Word> gens;
  for (std::size_t i = 0; i < p.rank(); ++i) {
    gens.push_back(generator(i, 1, p));
    if (p.order(i) != 2) gens.push_back(generator(i, -1, p));
  }
  return gens;
}

Word parse_word(std::string_view text, const Presentation& p) {
  std::vector<Syllable> raw;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    if (token == "e" || token == "1") continue;
    const auto caret = token.find('^');
    const std::string name = token.substr(0, caret);
    std::int64_t exponent = 1;
    if (caret != std::string::npos) {
      const std::string digits = token.substr(caret + 1);
      const char* first = digits.data();
      const char* last = digits.data() + digits.size();
      if (first != last && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, exponent);
      if (digits.empty() || ec != std::errc() || ptr != last)
        throw InvalidInput("bad exponent in token '" + token + "'");
    }
    const auto factor = p.find(name);
    if (!factor) throw InvalidInput("unknown generator '" + name + "' in word '" + std::string(text) + "'");
    raw.push_back({static_cast<std::uint32_t>(*factor), exponent});
  }
  return reduce_word(raw, p);
}

std::string format_word(const Word& w, const Presentation& p) {
  if (w.is_identity()) return "e";
  std::string out;
  for (const auto& s : w.syllables) {
    if (!out.empty()) out += ' ';
    out += p.name(s.factor);
    if (s.exponent != 1) out += "^" + std::to_string(s.exponent);
  }
  return out;
}

}  // namespace gapcert
