#include "gapcert/walk.hpp"

#include <algorithm>
#include <cmath>

#include "gapcert/errors.hpp"

namespace gapcert {

namespace {

void require_radius_input(const Measure& m, std::size_t n_max) {
  if (!m.symmetric()) throw NonSymmetric("radius bounds need a symmetric measure");
  if (n_max < 2 || n_max % 2 != 0) throw InvalidInput("n_max must be even and at least 2");
}

bool nondecreasing(const std::vector<double>& xs) {
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (xs[k] < xs[k - 1] * (1.0 - 1e-12)) return false;
  }
  return true;
}

}  // namespace

std::vector<Rational> return_sequence(const Measure& m, std::size_t horizon, const CosetOptions& opts) {
  return coset_hit_sequence(SubgroupAutomaton::trivial(m.presentation()), m, horizon, opts);
}

Rational return_probability(const Measure& m, std::size_t n, const CosetOptions& opts) {
  return return_sequence(m, n, opts).back();
}

RadiusEstimate estimate_from_returns(const std::vector<double>& returns) {
  RadiusEstimate est;
  est.n_max = returns.size() - 1;
  est.returns = returns;
  const std::size_t half = est.n_max / 2;
  for (std::size_t k = 1; k <= half; ++k) {
    est.root_bounds.push_back(std::pow(returns[2 * k], 1.0 / static_cast<double>(2 * k)));
  }
  for (std::size_t k = 1; k < half; ++k) est.ratio_sequence.push_back(std::sqrt(returns[2 * k + 2] / returns[2 * k]));
  for (std::size_t k = 0; 2 * k + 1 <= est.n_max; ++k) est.rayleigh.push_back(returns[2 * k + 1] / returns[2 * k]);

  est.lower = 0.0;
  for (const auto* seq : {&est.root_bounds, &est.ratio_sequence, &est.rayleigh}) {
    for (double x : *seq) est.lower = std::max(est.lower, x);
  }
  const auto& r = est.ratio_sequence;
  if (r.size() >= 2) {
    const double k = static_cast<double>(r.size());  // index of the last ratio
    est.ratio_estimate = (k + 1.0) * r.back() - k * r[r.size() - 2];
  } else if (!r.empty()) {
    est.ratio_estimate = r.back();
  } else {
    est.ratio_estimate = est.root_bounds.empty() ? 0.0 : est.root_bounds.back();
  }
  est.monotone = nondecreasing(est.root_bounds) && nondecreasing(est.ratio_sequence);
  return est;
}

RadiusEstimate radius_estimate(const Measure& m, std::size_t n_max, const CosetOptions& opts) {
  require_radius_input(m, n_max);
  return estimate_from_returns(
      coset_hit_sequence_double(SubgroupAutomaton::trivial(m.presentation()), m, n_max, opts));
}

RelativeRadiusEstimate relative_radius_bounds(const SubgroupAutomaton& aut, const Measure& m, std::size_t n_max,
                                              const CosetOptions& opts) {
  require_radius_input(m, n_max);
  RelativeRadiusEstimate out;
  out.coset = estimate_from_returns(coset_hit_sequence_double(aut, m, n_max, opts));
  out.group = radius_estimate(m, n_max, opts);
  out.lower = std::max(out.coset.lower, out.group.lower);
  return out;
}

}  // namespace gapcert
