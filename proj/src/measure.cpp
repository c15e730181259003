#include "gapcert/measure.hpp"

#include <algorithm>

#include "gapcert/errors.hpp"

namespace gapcert {

Measure::Measure(Presentation p, Atoms atoms) : p_(std::move(p)), atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw InvalidInput("measure has empty support");
  Rational total = 0;
  for (auto& [w, weight] : atoms_) {
    weight.canonicalize();
    if (reduce_word(w.syllables, p_) != w)
      throw InvalidInput("measure atom '" + format_word(w, p_) + "' is not in normal form");
    if (weight <= 0) throw InvalidInput("measure weights must be strictly positive");
    total += weight;
  }
  if (total != 1) throw InvalidInput("measure weights sum to " + to_string(total) + ", not 1");
  symmetric_ = std::all_of(atoms_.begin(), atoms_.end(), [this](const auto& atom) {
    return weight(inverse(atom.first, p_)) == atom.second;
  });
}

Rational Measure::weight(const Word& w) const {
  auto it = atoms_.find(w);
  return it == atoms_.end() ? Rational(0) : it->second;
}

bool Measure::single_syllable() const { return max_syllables() <= 1; }

std::size_t Measure::max_syllables() const {
  std::size_t best = 0;
  for (const auto& [w, _] : atoms_) best = std::max(best, w.syllable_length());
  return best;
}

Measure uniform_generators(const Presentation& p) {
  const auto gens = standard_generators(p);
  Measure::Atoms atoms;
  const Rational share(1, static_cast<unsigned long>(gens.size()));
  for (const auto& g : gens) atoms[g] += share;
  return Measure(p, std::move(atoms));
}

Measure dirac(const Presentation& p, const Word& w) {
  Measure::Atoms atoms;
  atoms[w] = 1;
  return Measure(p, std::move(atoms));
}

Measure convolve(const Measure& first, const Measure& second, std::size_t support_cap) {
  if (!(first.presentation() == second.presentation()))
    throw InvalidInput("convolution of measures over different presentations");
  const auto& p = first.presentation();
  Measure::Atoms out;
  for (const auto& [x, wx] : first.atoms()) {
    for (const auto& [y, wy] : second.atoms()) {
      out[multiply(x, y, p)] += wx * wy;
      if (out.size() > support_cap)
        throw CostCapExceeded("convolution support exceeds cap of " + std::to_string(support_cap));
    }
  }
  return Measure(p, std::move(out));
}

Measure convolution_power(const Measure& m, std::size_t n, std::size_t support_cap) {
  Measure acc = dirac(m.presentation(), Word{});
  for (std::size_t i = 0; i < n; ++i) acc = convolve(acc, m, support_cap);
  return acc;
}

Measure lazify(const Measure& m) {
  Measure::Atoms atoms;
  for (const auto& [w, weight] : m.atoms()) atoms[w] = weight / 2;
  atoms[Word{}] += Rational(1, 2);
  return Measure(m.presentation(), std::move(atoms));
}

Measure mix(const Rational& weight, const Measure& a, const Measure& b) {
  if (weight < 0 || weight > 1) throw InvalidInput("mixture weight outside [0,1]");
  if (weight == 1) return a;
  if (weight == 0) return b;
  Measure::Atoms atoms;
  for (const auto& [w, x] : a.atoms()) atoms[w] += weight * x;
  for (const auto& [w, x] : b.atoms()) atoms[w] += (1 - weight) * x;
  return Measure(a.presentation(), std::move(atoms));
}

SplitMeasure split_by_membership(const Measure& m, const MembershipOracle& member) {
  Measure::Atoms in, out;
  Rational kappa = 0;
  for (const auto& [w, weight] : m.atoms()) {
    if (member(w)) {
      in[w] = weight;
      kappa += weight;
    } else {
      out[w] = weight;
    }
  }
  SplitMeasure split{kappa, std::nullopt, std::nullopt};
  if (!in.empty()) {
    for (auto& [_, weight] : in) weight /= kappa;
    split.inside.emplace(m.presentation(), std::move(in));
  }
  if (!out.empty()) {
    const Rational rest = 1 - kappa;
    for (auto& [_, weight] : out) weight /= rest;
    split.outside.emplace(m.presentation(), std::move(out));
  }
  return split;
}

}  // namespace gapcert
