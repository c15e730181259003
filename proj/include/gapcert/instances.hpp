#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gapcert/action.hpp"
#include "gapcert/group.hpp"
#include "gapcert/measure.hpp"

namespace gapcert {

/// Seeded generators for randomized suites. Every draw depends only on the
/// engine state, so a fixed seed reproduces the same instance stream.
class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);  // inclusive
  bool coin() { return uniform(0, 1) == 1; }

  /// Rank in [1, max_rank], factor orders drawn from {0, 2, 3, 4, 5}.
  Presentation presentation(std::size_t max_rank = 3);
  /// Reduced word with exactly `syllables` syllables.
  Word word(const Presentation& p, std::size_t syllables);
  /// Nonidentity word with 1..max_syllables syllables.
  Word nonidentity_word(const Presentation& p, std::size_t max_syllables);

  /// Valid action: finite factors get permutations whose cycle lengths divide the order.
  FiniteAction action(const Presentation& p, std::size_t points);
  /// Transitive valid action; resamples until transitive, or falls back to a
  /// cyclic shift on an infinite factor when one exists.
  FiniteAction transitive_action(const Presentation& p, std::size_t points);

  /// Symmetric measure on up to max_pairs pairs {w, w^-1} plus an optional atom at e.
  Measure symmetric_measure(const Presentation& p, std::size_t max_pairs, std::size_t max_syllables);
  /// Measure with independent weights on random words, usually not symmetric.
  Measure measure(const Presentation& p, std::size_t max_atoms, std::size_t max_syllables);
  /// Single-syllable symmetric measure, the class the first-passage engines accept.
  Measure step_measure(const Presentation& p);

  /// 1..max_count nonidentity generators for a subgroup.
  std::vector<Word> subgroup_generators(const Presentation& p, std::size_t max_count, std::size_t max_syllables);

  std::mt19937_64& engine() { return rng_; }

 private:
  std::vector<std::uint32_t> cycle_permutation(std::size_t points, std::uint32_t order);
  std::mt19937_64 rng_;
};

}  // namespace gapcert
