#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gapcert {

/// One power of a single free factor generator.
struct Syllable {
  std::uint32_t factor = 0;
  std::int64_t exponent = 0;

  friend auto operator<=>(const Syllable&, const Syllable&) = default;
};

/// Free product of cyclic groups. Order 0 stands for Z; any other order must be >= 2.
class Presentation {
 public:
  Presentation() = default;
  explicit Presentation(std::vector<std::uint32_t> orders, std::vector<std::string> names = {});

  /// Free group of the given rank with generators a, b, c, ...
  static Presentation free_group(std::size_t rank);

  std::size_t rank() const { return orders_.size(); }
  std::uint32_t order(std::size_t factor) const { return orders_.at(factor); }
  bool is_finite(std::size_t factor) const { return orders_.at(factor) != 0; }
  const std::vector<std::uint32_t>& orders() const { return orders_; }
  const std::string& name(std::size_t factor) const { return names_.at(factor); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;

  friend bool operator==(const Presentation&, const Presentation&) = default;

 private:
  std::vector<std::uint32_t> orders_;
  std::vector<std::string> names_;
};

/// Element of a free product in normal form. The empty word is the identity.
///
/// Construct through reduce_word (or parse_word) to get the normal-form
/// guarantee: adjacent syllables differ in factor, finite exponents lie in
/// [1, m-1], infinite exponents are nonzero.
struct Word {
  std::vector<Syllable> syllables;

  bool is_identity() const { return syllables.empty(); }
  std::size_t syllable_length() const { return syllables.size(); }

  friend bool operator==(const Word&, const Word&) = default;
};

/// Shortlex on syllables: shorter first, then lexicographic by (factor, exponent).
struct ShortLex {
  bool operator()(const Word& lhs, const Word& rhs) const;
};

Word reduce_word(std::span<const Syllable> raw, const Presentation& p);
Word multiply(const Word& lhs, const Word& rhs, const Presentation& p);
Word inverse(const Word& w, const Presentation& p);
Word generator(std::size_t factor, std::int64_t exponent, const Presentation& p);

/// Word length with respect to the standard symmetric generating set S.
std::int64_t letter_length(const Word& w, const Presentation& p);

/// Elements of S, each once; order-2 generators are self-inverse.
std::vector<Word> standard_generators(const Presentation& p);

/// Parses "a^2 b^-1 a"; "e" or "1" (or an empty string) is the identity.
Word parse_word(std::string_view text, const Presentation& p);
std::string format_word(const Word& w, const Presentation& p);

}  // namespace gapcert
