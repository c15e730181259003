#include "gapcert/instances.hpp"

#include <algorithm>
#include <numeric>

namespace gapcert {

std::uint64_t InstanceGenerator::uniform(std::uint64_t lo, std::uint64_t hi) {
  // Modulo draw instead of std::uniform_int_distribution: its output is implementation defined.
  return lo + rng_() % (hi - lo + 1);
}

Presentation InstanceGenerator::presentation(std::size_t max_rank) {
  static constexpr std::uint32_t kOrders[] = {0, 0, 2, 3, 4, 5};
  std::vector<std::uint32_t> orders(uniform(1, max_rank));
  for (auto& o : orders) o = kOrders[uniform(0, std::size(kOrders) - 1)];
  return Presentation(std::move(orders));
}

Word InstanceGenerator::word(const Presentation& p, std::size_t syllables) {
  std::vector<Syllable> raw;
  for (std::size_t i = 0; i < syllables; ++i) {
    std::uint32_t f = 0;
    do {
      f = static_cast<std::uint32_t>(uniform(0, p.rank() - 1));
    } while (!raw.empty() && raw.back().factor == f && p.rank() > 1);
    if (!raw.empty() && raw.back().factor == f) break;  // rank 1 holds one syllable at most
    const auto m = p.order(f);
    std::int64_t e = 0;
    if (m == 0) {
      e = static_cast<std::int64_t>(uniform(1, 2));
      if (coin()) e = -e;
    } else {
      e = static_cast<std::int64_t>(uniform(1, m - 1));
    }
    raw.push_back({f, e});
  }
  return reduce_word(raw, p);
}

Word InstanceGenerator::nonidentity_word(const Presentation& p, std::size_t max_syllables) {
  return word(p, uniform(1, std::max<std::size_t>(1, max_syllables)));
}

std::vector<std::uint32_t> InstanceGenerator::cycle_permutation(std::size_t points, std::uint32_t order) {
  std::vector<std::uint32_t> shuffled(points);
  std::iota(shuffled.begin(), shuffled.end(), 0u);
  for (std::size_t i = points; i > 1; --i) std::swap(shuffled[i - 1], shuffled[uniform(0, i - 1)]);
  // Infinite factor: any bijection, x -> shuffled[x].
  if (order == 0) return shuffled;
  std::vector<std::uint32_t> perm(points);
  std::vector<std::uint32_t> divisors;
  for (std::uint32_t d = 1; d <= order; ++d) {
    if (order % d == 0) divisors.push_back(d);
  }
  std::size_t pos = 0;
  while (pos < points) {
    std::uint32_t len = 1;
    for (int tries = 0; tries < 4; ++tries) {
      const auto d = divisors[uniform(0, divisors.size() - 1)];
      if (pos + d <= points) {
        len = d;
        break;
      }
    }
    for (std::uint32_t k = 0; k < len; ++k) perm[shuffled[pos + k]] = shuffled[pos + (k + 1) % len];
    pos += len;
  }
  return perm;
}

FiniteAction InstanceGenerator::action(const Presentation& p, std::size_t points) {
  FiniteAction act{p, points, {}};
  for (std::size_t f = 0; f < p.rank(); ++f) act.perms.push_back(cycle_permutation(points, p.order(f)));
  return act;
}

FiniteAction InstanceGenerator::transitive_action(const Presentation& p, std::size_t points) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto act = action(p, points);
    if (orbits(act, standard_generators(p)).size() == 1) return act;
  }
  auto act = action(p, points);
  for (std::size_t f = 0; f < p.rank(); ++f) {
    if (p.order(f) == 0 || p.order(f) % points == 0) {
      for (std::uint32_t x = 0; x < points; ++x) act.perms[f][x] = static_cast<std::uint32_t>((x + 1) % points);
      return act;
    }
  }
  return act;  // no factor can carry a full cycle; caller checks transitivity
}

Measure InstanceGenerator::symmetric_measure(const Presentation& p, std::size_t max_pairs, std::size_t max_syllables) {
  std::map<Word, long, ShortLex> raw;
  const auto pairs = uniform(1, max_pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto w = nonidentity_word(p, max_syllables);
    const long weight = static_cast<long>(uniform(1, 4));
    raw[w] += weight;
    raw[inverse(w, p)] += weight;
  }
  if (coin()) raw[Word{}] += static_cast<long>(uniform(1, 4));
  long total = 0;
  for (const auto& [w, c] : raw) total += c;
  Measure::Atoms atoms;
  for (const auto& [w, c] : raw) atoms[w] = Rational(c, total);
  for (auto& [w, r] : atoms) r.canonicalize();
  return Measure(p, std::move(atoms));
}

Measure InstanceGenerator::measure(const Presentation& p, std::size_t max_atoms, std::size_t max_syllables) {
  std::map<Word, long, ShortLex> raw;
  const auto count = uniform(1, max_atoms);
  for (std::size_t i = 0; i < count; ++i) raw[word(p, uniform(0, max_syllables))] += static_cast<long>(uniform(1, 5));
  long total = 0;
  for (const auto& [w, c] : raw) total += c;
  Measure::Atoms atoms;
  for (const auto& [w, c] : raw) {
    Rational r(c, total);
    r.canonicalize();
    atoms[w] = r;
  }
  return Measure(p, std::move(atoms));
}

Measure InstanceGenerator::step_measure(const Presentation& p) {
  std::map<Word, long, ShortLex> raw;
  for (std::size_t f = 0; f < p.rank(); ++f) {
    if (coin() && f + 1 < p.rank()) continue;
    const auto m = p.order(f);
    const std::int64_t top = m == 0 ? 2 : static_cast<std::int64_t>(m) / 2;
    const auto e = static_cast<std::int64_t>(uniform(1, static_cast<std::uint64_t>(top)));
    const long weight = static_cast<long>(uniform(1, 3));
    const auto w = generator(f, e, p);
    raw[w] += weight;
    raw[inverse(w, p)] += weight;
  }
  if (coin()) raw[Word{}] += static_cast<long>(uniform(1, 3));
  long total = 0;
  for (const auto& [w, c] : raw) total += c;
  Measure::Atoms atoms;
  for (const auto& [w, c] : raw) {
    Rational r(c, total);
    r.canonicalize();
    atoms[w] = r;
  }
  return Measure(p, std::move(atoms));
}

std::vector<Word> InstanceGenerator::subgroup_generators(const Presentation& p, std::size_t max_count,
                                                         std::size_t max_syllables) {
  std::vector<Word> gens;
  const auto count = uniform(1, max_count);
  for (std::size_t i = 0; i < count; ++i) gens.push_back(nonidentity_word(p, max_syllables));
  return gens;
}

}  // namespace gapcert
