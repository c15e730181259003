#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "gapcert/group.hpp"
#include "gapcert/rational.hpp"

namespace gapcert {

inline constexpr std::size_t kDefaultSupportCap = 1'000'000;

/// Finitely supported probability measure on a free product, exact weights.
class Measure {
 public:
  using Atoms = std::map<Word, Rational, ShortLex>;

  /// Validates: words reduced, weights > 0, total exactly 1.
  Measure(Presentation p, Atoms atoms);

  const Presentation& presentation() const { return p_; }
  const Atoms& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool symmetric() const { return symmetric_; }
  Rational weight(const Word& w) const;

  /// True when every atom is e or a single syllable.
  bool single_syllable() const;
  /// Largest syllable length among atoms.
  std::size_t max_syllables() const;

  friend bool operator==(const Measure& a, const Measure& b) {
    return a.p_ == b.p_ && a.atoms_ == b.atoms_;
  }

 private:
  Presentation p_;
  Atoms atoms_;
  bool symmetric_ = false;
};

/// Uniform measure on the standard symmetric generating set S.
Measure uniform_generators(const Presentation& p);
Measure dirac(const Presentation& p, const Word& w);

Measure convolve(const Measure& first, const Measure& second,
                 std::size_t support_cap = kDefaultSupportCap);
/// n-fold convolution power; n = 0 gives the identity point mass.
Measure convolution_power(const Measure& m, std::size_t n,
                          std::size_t support_cap = kDefaultSupportCap);

/// Half the measure plus half the point mass at e.
Measure lazify(const Measure& m);

/// Mixture weight * a + (1 - weight) * b over the same presentation.
Measure mix(const Rational& weight, const Measure& a, const Measure& b);

using MembershipOracle = std::function<bool(const Word&)>;

/// kappa * inside + (1 - kappa) * outside. A side with zero mass is absent and
/// the split is flagged degenerate.
struct SplitMeasure {
  Rational kappa;
  std::optional<Measure> inside;
  std::optional<Measure> outside;

  bool degenerate() const { return !inside || !outside; }
};

SplitMeasure split_by_membership(const Measure& m, const MembershipOracle& member);

}  // namespace gapcert
