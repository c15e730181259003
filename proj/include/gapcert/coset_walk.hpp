#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gapcert/action.hpp"
#include "gapcert/automaton.hpp"
#include "gapcert/measure.hpp"
#include "gapcert/rational.hpp"

namespace gapcert {

inline constexpr std::size_t kDefaultStateCap = 5'000'000;

/// Excursion: single-syllable measures only; pushes onto other factors are
/// folded into first-passage weights. Generic: explicit (coset, suffix) states
/// for any measure. Auto picks Excursion when it applies.
enum class CosetEngine { Auto, Excursion, Generic };

struct CosetOptions {
  CosetEngine engine = CosetEngine::Auto;
  std::size_t state_cap = kDefaultStateCap;
};

/// Step law of a single-syllable measure split by factor.
template <class Scalar>
struct StepLaw {
  Scalar identity{};
  // [factor] -> (normal-form exponent, weight)
  std::vector<std::vector<std::pair<std::int64_t, Scalar>>> steps;
  // Largest |exponent| per factor; only meaningful for Z factors.
  std::vector<std::int64_t> reach;

  static StepLaw from(const Measure& m);
};

/// First-annihilation law of a top syllable under a single-syllable walk.
///
/// at(i, v, t) is the probability that a walk whose normal form ends in the
/// syllable (i, v) first loses that syllable at step t. excursion(i)[t] is the
/// probability that a step off factor i is undone for the first time exactly t
/// steps later. returns()[t] = p_{e,e,t}.
template <class Scalar>
class FirstPassage {
 public:
  FirstPassage(const Presentation& p, const StepLaw<Scalar>& law, std::size_t horizon);

  std::size_t horizon() const { return horizon_; }
  Scalar at(std::uint32_t factor, std::int64_t v, std::size_t t) const;
  const std::vector<Scalar>& excursion(std::uint32_t factor) const { return excursion_[factor]; }
  const std::vector<Scalar>& returns() const { return returns_; }

  /// P(X_n = w) for the walk started at e.
  Scalar word_probability(const Word& w, std::size_t n) const;

 private:
  std::int64_t index(std::uint32_t factor, std::int64_t v) const;

  Presentation p_;
  std::size_t horizon_;
  std::vector<std::int64_t> width_;
  std::vector<std::int64_t> offset_;
  // [factor][t * width + index]
  std::vector<std::vector<Scalar>> table_;
  std::vector<std::vector<Scalar>> excursion_;
  std::vector<Scalar> returns_;
};

/// p_{e,H,t} for t = 0..horizon.
std::vector<Rational> coset_hit_sequence(const SubgroupAutomaton& aut, const Measure& m, std::size_t horizon,
                                         const CosetOptions& opts = {});
std::vector<double> coset_hit_sequence_double(const SubgroupAutomaton& aut, const Measure& m, std::size_t horizon,
                                              const CosetOptions& opts = {});
Rational coset_hit_probability(const SubgroupAutomaton& aut, const Measure& m, std::size_t n,
                               const CosetOptions& opts = {});

/// Entry [x][y] = P(X_n in H and x * X_n = y). Dividing by p_{e,H,n} gives the
/// pushforward of the walk conditioned on ending in H.
std::vector<std::vector<Rational>> coset_transfer(const SubgroupAutomaton& aut, const Measure& m,
                                                  const FiniteAction& act, std::size_t n,
                                                  const CosetOptions& opts = {});

/// Exact P(X_n = w); m must be single-syllable.
Rational word_probability(const Measure& m, const Word& w, std::size_t n);

}  // namespace gapcert
