#pragma once

#include <cstddef>
#include <vector>

#include "gapcert/automaton.hpp"
#include "gapcert/coset_walk.hpp"
#include "gapcert/measure.hpp"
#include "gapcert/rational.hpp"

namespace gapcert {

/// p_{e,e,t} for t = 0..horizon, exact.
std::vector<Rational> return_sequence(const Measure& m, std::size_t horizon, const CosetOptions& opts = {});
Rational return_probability(const Measure& m, std::size_t n, const CosetOptions& opts = {});

/// Lower bounds for the norm of a symmetric walk operator from its return
/// sequence p_t (to e, or to a coset). Every entry of root_bounds,
/// ratio_sequence and rayleigh bounds the norm from below.
struct RadiusEstimate {
  std::size_t n_max = 0;
  std::vector<double> returns;         // p_t, t = 0..n_max
  std::vector<double> root_bounds;     // [k-1] = p_{2k}^{1/2k}
  std::vector<double> ratio_sequence;  // [k-1] = sqrt(p_{2k+2} / p_{2k})
  std::vector<double> rayleigh;        // [k] = p_{2k+1} / p_{2k}
  /// Richardson extrapolation of the last two ratios; removes the 1/k term of
  /// the ratio's polynomial correction. An estimate, not a bound.
  double ratio_estimate = 0.0;
  double lower = 0.0;
  /// root_bounds and ratio_sequence are nondecreasing (relative slack 1e-12).
  bool monotone = true;
};

/// Builds the record from a sequence p_0..p_{n_max}.
RadiusEstimate estimate_from_returns(const std::vector<double>& returns);

RadiusEstimate radius_estimate(const Measure& m, std::size_t n_max, const CosetOptions& opts = {});

struct RelativeRadiusEstimate {
  RadiusEstimate coset;  // from p_{e,H,t}
  RadiusEstimate group;  // from p_{e,e,t}
  /// max of both: the radius of the group never exceeds the relative radius.
  double lower = 0.0;
};

RelativeRadiusEstimate relative_radius_bounds(const SubgroupAutomaton& aut, const Measure& m, std::size_t n_max,
                                              const CosetOptions& opts = {});

}  // namespace gapcert
