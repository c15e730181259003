#include "gapcert/theorem.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "gapcert/errors.hpp"
#include "gapcert/walk.hpp"

namespace gapcert {

namespace {

MarkovMatrix symmetric_part(const MarkovMatrix& m) {
  const auto t = transpose(m);
  std::vector<MarkovMatrix::Row> rows(m.size());
  for (std::size_t x = 0; x < m.size(); ++x) {
    std::map<std::uint32_t, Rational> acc;
    for (const auto& [y, w] : m.rows()[x]) acc[y] += w / 2;
    for (const auto& [y, w] : t.rows()[x]) acc[y] += w / 2;
    for (auto& [y, w] : acc) rows[x].emplace_back(y, std::move(w));
  }
  return MarkovMatrix(std::move(rows));
}

// Rows of a component, renumbered; components are invariant so no mass leaks.
MarkovMatrix restrict_to(const MarkovMatrix& m, const std::vector<std::uint32_t>& points) {
  std::map<std::uint32_t, std::uint32_t> local;
  for (std::uint32_t i = 0; i < points.size(); ++i) local[points[i]] = i;
  std::vector<MarkovMatrix::Row> rows;
  for (auto x : points) {
    MarkovMatrix::Row row;
    for (const auto& [y, w] : m.rows()[x]) {
      auto it = local.find(y);
      if (it == local.end()) throw std::logic_error("component is not invariant");
      row.emplace_back(it->second, w);
    }
    std::sort(row.begin(), row.end());
    rows.push_back(std::move(row));
  }
  return MarkovMatrix(std::move(rows));
}

// Number of normal-form words of letter length <= n.
mpz_class ball_size(const Presentation& p, std::size_t n) {
  const auto rank = p.rank();
  // by_cost[f][c]: syllables of factor f with letter cost c
  std::vector<std::vector<mpz_class>> by_cost(rank, std::vector<mpz_class>(n + 1, 0));
  for (std::size_t f = 0; f < rank; ++f) {
    const auto m = p.order(f);
    if (m == 0) {
      for (std::size_t c = 1; c <= n; ++c) by_cost[f][c] = 2;
    } else {
      for (std::uint32_t k = 1; k < m; ++k) {
        const std::size_t c = std::min(k, m - k);
        if (c <= n) by_cost[f][c] += 1;
      }
    }
  }
  std::vector<std::vector<mpz_class>> ending(n + 1, std::vector<mpz_class>(rank, 0));
  mpz_class total = 1;
  for (std::size_t len = 1; len <= n; ++len) {
    for (std::size_t f = 0; f < rank; ++f) {
      for (std::size_t c = 1; c <= len; ++c) {
        if (by_cost[f][c] == 0) continue;
        mpz_class before = len == c ? mpz_class(1) : mpz_class(0);
        if (len > c) {
          for (std::size_t g = 0; g < rank; ++g) {
            if (g != f) before += ending[len - c][g];
          }
        }
        ending[len][f] += by_cost[f][c] * before;
      }
      total += ending[len][f];
    }
  }
  return total;
}

// True when the group generated by the action's permutations has exactly N elements.
bool acts_regularly(const FiniteAction& act) {
  const auto n = act.points;
  std::vector<std::vector<std::uint32_t>> gens;
  for (const auto& perm : act.perms) {
    gens.push_back(perm);
    std::vector<std::uint32_t> inv(n);
    for (std::uint32_t x = 0; x < n; ++x) inv[perm[x]] = x;
    gens.push_back(std::move(inv));
  }
  std::vector<std::uint32_t> id(n);
  for (std::uint32_t x = 0; x < n; ++x) id[x] = x;
  std::set<std::vector<std::uint32_t>> seen{id};
  std::deque<std::vector<std::uint32_t>> queue{id};
  while (!queue.empty()) {
    const auto g = queue.front();
    queue.pop_front();
    for (const auto& s : gens) {
      std::vector<std::uint32_t> h(n);
      for (std::uint32_t x = 0; x < n; ++x) h[x] = s[g[x]];
      if (seen.insert(h).second) {
        if (seen.size() > n) return false;
        queue.push_back(std::move(h));
      }
    }
  }
  return seen.size() == n;
}

double action_top(const FiniteAction& act, const Measure& m, const SpectrumOptions& opts) {
  return act.points < 2 ? 0.0 : signed_top(markov_matrix(act, m), opts);
}

void settle_verdict(MertekReport& r) {
  const double kappa = to_double(r.kappa);
  r.vacuous = kappa <= r.rho + kBoundTolerance;  // rho+ of a non-ergodic action can land just under 1
  r.gaps_ok = std::all_of(r.components.begin(), r.components.end(), [](const auto& c) { return c.gap_ok; });
  if (r.vacuous) {
    r.count_bound.reset();
    r.min_mass_bound.reset();
    r.smallset_threshold.reset();
    r.smallset_rate.reset();
    r.count_ok = r.mass_ok = false;
    r.verdict = "bounds vacuous";
    return;
  }
  r.count_bound = (1.0 - r.rho) / (kappa - r.rho);
  r.min_mass_bound = (kappa - r.rho) / (1.0 - r.rho);
  r.smallset_threshold = 0.5 * *r.min_mass_bound;
  r.smallset_rate = 0.5 * (kappa - r.rho) / kappa;
  r.count_ok = static_cast<double>(r.components.size()) <= *r.count_bound + kBoundTolerance;
  r.mass_ok = std::all_of(r.components.begin(), r.components.end(), [&](const auto& c) {
    return to_double(c.mass) >= *r.min_mass_bound - kBoundTolerance;
  });
  const bool ok = r.count_ok && r.mass_ok && r.gaps_ok && r.smallset_violations == 0 && r.exp_violations == 0;
  r.verdict = ok ? "verified" : "violated";
}

// Every nonempty subset, Gray-code order, exact boundary sums.
void exhaustive_expansion(MertekReport& r) {
  const auto& m = r.inside_matrix;
  const auto n = m.size();
  const double kappa = to_double(r.kappa);
  const double rho = r.rho;
  const auto inv_n = Rational(1, static_cast<unsigned long>(n));
  Rational cut = 0;  // sum of M(x, y) over x in Y, y outside
  std::uint64_t mask = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const auto x = static_cast<std::uint32_t>(std::countr_zero(i));
    const bool adding = !(mask >> x & 1);
    if (adding) mask |= std::uint64_t{1} << x;
    else mask &= ~(std::uint64_t{1} << x);
    for (const auto& [y, w] : m.rows()[x]) {
      if (y == x) continue;
      const bool y_in = mask >> y & 1;
      if (adding) {
        if (!y_in) cut += w;
      } else if (!y_in) {
        cut -= w;
      }
    }
    // Edges into x from the rest of Y flip with x as well.
    for (std::uint32_t z = 0; z < n; ++z) {
      if (z == x || !(mask >> z & 1)) continue;
      const auto wz = m.entry(z, x);
      if (wz == 0) continue;
      if (adding) cut -= wz;
      else cut += wz;
    }
    const auto k = static_cast<double>(std::popcount(mask));
    const double y = k / static_cast<double>(n);
    const double ratio = to_double(cut * inv_n) / y;
    const double exp_side = (kappa - rho) / kappa - y * (1.0 - rho) / kappa;
    if (ratio < exp_side - kBoundTolerance) ++r.exp_violations;
    if (y <= *r.smallset_threshold + 1e-12) {
      ++r.smallset_sets;
      if (ratio < *r.smallset_rate - kBoundTolerance) ++r.smallset_violations;
    }
  }
}

MarkovMatrix scaled_rows(const std::vector<std::vector<Rational>>& masses, const Rational& kappa) {
  std::vector<MarkovMatrix::Row> rows(masses.size());
  for (std::size_t x = 0; x < masses.size(); ++x) {
    for (std::uint32_t y = 0; y < masses[x].size(); ++y) {
      if (masses[x][y] != 0) rows[x].emplace_back(y, masses[x][y] / kappa);
    }
  }
  return MarkovMatrix(std::move(rows));
}

}  // namespace

double signed_top(const MarkovMatrix& m, const SpectrumOptions& opts) {
  if (m.size() < 2) return 0.0;
  return rho_plus(m.symmetric() ? m : symmetric_part(m), opts).rho_plus;
}

MertekReport evaluate_mertek_bounds(const MarkovMatrix& inside_matrix, const Rational& kappa, double rho,
                                    const MertekOptions& opts) {
  if (kappa <= 0 || kappa > 1) throw DomainError("kappa must lie in (0, 1]");
  MertekReport r;
  r.kappa = kappa;
  r.rho = rho;
  r.degenerate = kappa == 1;
  r.inside_matrix = inside_matrix;
  const auto n = inside_matrix.size();
  for (auto& points : components(inside_matrix)) {
    ComponentReport c;
    c.mass = Rational(static_cast<long>(points.size()), static_cast<long>(n));
    c.mass.canonicalize();
    if (points.size() >= 2) {
      c.rho_plus = signed_top(restrict_to(inside_matrix, points), opts.spectrum);
      c.gap_ok = *c.rho_plus < 1.0 - kBoundTolerance;
    }
    c.points = std::move(points);
    r.components.push_back(std::move(c));
  }
  settle_verdict(r);
  if (!r.vacuous && n <= opts.exhaustive_limit) {
    r.exhaustive_checked = true;
    exhaustive_expansion(r);
    settle_verdict(r);
  }
  return r;
}

MertekReport mertek_decompose(const FiniteAction& act, const Measure& m, const SubgroupAutomaton& aut,
                              const MertekOptions& opts) {
  require_valid(act);
  if (!(aut.presentation() == m.presentation())) throw InvalidInput("subgroup and measure use different presentations");
  const auto split = split_by_membership(m, [&](const Word& w) { return contains(aut, w); });
  if (!split.inside) throw DomainError("degenerate split: the measure puts no mass on the subgroup");
  const double rho = action_top(act, m, opts.spectrum);
  return evaluate_mertek_bounds(markov_matrix(act, *split.inside), split.kappa, rho, opts);
}

MertekReport rederive_verdicts(const MertekReport& report) {
  MertekReport r = report;
  for (auto& c : r.components) c.gap_ok = !c.rho_plus || *c.rho_plus < 1.0 - kBoundTolerance;
  settle_verdict(r);
  return r;
}

WitnessReport fotetel_witness(const SubgroupAutomaton& aut, const FiniteAction& act, const WitnessOptions& opts) {
  const auto& p = aut.presentation();
  if (!(act.presentation == p)) throw InvalidInput("subgroup and action use different presentations");
  require_valid(act);
  if (opts.n_max < 2 || opts.n_max % 2 != 0) throw InvalidInput("n_max must be even and at least 2");
  const auto standard = uniform_generators(p);
  WitnessReport w;
  w.lazy = lazify(standard);
  const auto& lazy = *w.lazy;
  w.lazy_rho = std::max(0.0, action_top(act, lazy, opts.mertek.spectrum));
  w.standard_rho = action_top(act, standard, opts.mertek.spectrum);
  w.relative_lower = relative_radius_bounds(aut, standard, opts.radius_n_max, opts.coset).lower;
  w.precondition_certified = w.relative_lower > w.standard_rho + kBoundTolerance;

  const auto hits = coset_hit_sequence(aut, lazy, opts.n_max, opts.coset);
  for (std::size_t n = 2; n <= opts.n_max; n += 2) {
    const double power = std::pow(w.lazy_rho, static_cast<double>(n));
    w.search.push_back({n, hits[n], power});
    if (to_double(hits[n]) > power + kBoundTolerance) {
      w.n = n;
      break;
    }
  }
  if (w.n == 0)
    throw NoWitnessFound("no even n <= " + std::to_string(opts.n_max) +
                         " with coset mass above the lazy spectral power");
  w.kappa = hits[w.n];
  w.rho = w.search.back().spectral_power;
  w.support_size = ball_size(p, w.n).get_str();

  const auto inside = scaled_rows(coset_transfer(aut, lazy, act, w.n, opts.coset), w.kappa);
  try {
    w.generators = subgroup_ball(aut, static_cast<std::int64_t>(w.n), opts.ball_cap);
  } catch (const CostCapExceeded&) {
    w.generators.reset();
  }
  bool routes_ok = true;
  if (w.generators) {
    const auto& t = *w.generators;
    w.generator_count = t.size();
    const auto law = StepLaw<Rational>::from(lazy);
    const FirstPassage<Rational> fp(p, law, w.n);
    std::vector<std::map<std::uint32_t, Rational>> acc(act.points);
    w.generators_in_subgroup = true;
    w.generator_mass = 0;
    for (const auto& word : t) {
      if (!contains(aut, word)) w.generators_in_subgroup = false;
      const auto mass = fp.word_probability(word, w.n);
      w.generator_mass += mass;
      for (std::uint32_t x = 0; x < act.points; ++x) acc[x][apply(act, x, word)] += mass / w.kappa;
    }
    w.generator_mass_matches = w.generator_mass == w.kappa;
    std::vector<MarkovMatrix::Row> rows(act.points);
    for (std::size_t x = 0; x < act.points; ++x) {
      for (auto& [y, v] : acc[x]) {
        if (v != 0) rows[x].emplace_back(y, v);
      }
    }
    w.matrix_routes_agree = w.generator_mass_matches && MarkovMatrix(std::move(rows)) == inside &&
                            orbits(act, t) == components(inside);
    routes_ok = w.generators_in_subgroup && w.generator_mass_matches && w.matrix_routes_agree;
  }
  w.mertek = evaluate_mertek_bounds(inside, w.kappa, w.rho, opts.mertek);
  w.verdict = (routes_ok && w.mertek.verdict == "verified") ? "verified" : "violated";
  return w;
}

TauCertificate tau_certificate(const SubgroupAutomaton& aut, const ActionChain& chain, const WitnessOptions& opts) {
  const auto check = validate_chain(chain);
  if (!check.ok()) throw InvalidInput("invalid chain: " + check.violations.front());
  const auto& p = aut.presentation();
  const auto standard = uniform_generators(p);
  const auto gens = standard_generators(p);
  TauCertificate cert;
  for (std::size_t n = 0; n < chain.levels.size(); ++n) {
    const auto& level = chain.levels[n];
    if (!(level.presentation == p)) throw InvalidInput("chain and subgroup use different presentations");
    if (orbits(level, gens).size() != 1) throw InvalidInput("level " + std::to_string(n) + " is not transitive");
    TauLevel lv;
    lv.points = level.points;
    lv.level_rho = action_top(level, standard, opts.mertek.spectrum);
    cert.sup_rho = n == 0 ? lv.level_rho : std::max(cert.sup_rho, lv.level_rho);
    cert.levels.push_back(std::move(lv));
  }
  cert.witness = fotetel_witness(aut, chain.levels.back(), opts);
  if (!cert.witness.generators) throw CostCapExceeded("generating set T exceeds the ball cap; raise ball_cap");
  const auto& t = *cert.witness.generators;
  Measure::Atoms atoms;
  for (const auto& word : t) atoms[word] = Rational(1, static_cast<unsigned long>(t.size()));
  const Measure walk_t(p, std::move(atoms));
  cert.count_bound = cert.witness.mertek.count_bound.value_or(0.0);

  cert.valid = true;
  for (std::size_t n = 0; n < chain.levels.size(); ++n) {
    const auto& level = chain.levels[n];
    auto& lv = cert.levels[n];
    lv.orbits = orbits(level, t);
    const auto mt = markov_matrix(level, walk_t);
    lv.max_orbit_rho = 0.0;
    for (const auto& orbit : lv.orbits) {
      std::optional<double> r;
      if (orbit.size() >= 2) {
        r = signed_top(restrict_to(mt, orbit), opts.mertek.spectrum);
        lv.max_orbit_rho = std::max(lv.max_orbit_rho, *r);
      }
      lv.orbit_rho.push_back(r);
    }
    lv.regular = acts_regularly(level);
    if (lv.regular) lv.index = lv.orbits.size();
    lv.ok = lv.max_orbit_rho < 1.0 - kBoundTolerance &&
            static_cast<double>(lv.orbits.size()) <= cert.count_bound + kBoundTolerance;
    cert.max_orbits = std::max(cert.max_orbits, lv.orbits.size());
    cert.uniform_gap = std::max(cert.uniform_gap, lv.max_orbit_rho);
    cert.valid = cert.valid && lv.ok;
  }
  cert.valid = cert.valid && cert.witness.verdict == "verified";
  cert.verdict = cert.valid ? "valid" : "invalid";
  return cert;
}

RamanujanReport ramanujan_gap(const Measure& m, const FiniteAction& act, std::size_t n_max, double tolerance,
                              const SpectrumOptions& opts) {
  if (!m.symmetric()) throw NonSymmetric("Ramanujan classification needs a symmetric measure");
  require_valid(act);
  RamanujanReport r;
  r.tolerance = tolerance;
  r.lower = radius_estimate(m, n_max).lower;
  if (act.points < 2) {
    r.trivial_action = true;
    r.classification = "trivial action";
    return r;
  }
  r.rho_plus = rho_plus(markov_matrix(act, m), opts).rho_plus;
  r.classification = *r.rho_plus <= r.lower + tolerance ? "ramanujan-or-better" : "gap above rho";
  return r;
}

double corollary_bounds(double value, BoundVariant variant) {
  if (!(value > 0.0) || value > 1.0) throw DomainError("corollary bounds need 0 < value <= 1");
  if (variant == BoundVariant::Application) {
    const double q = value / std::log2(2.0 / value);
    return 1.0 - q * q / 512.0;
  }
  const double q = value / std::log2(4.0 / value);
  return 1.0 - q * q / 2048.0;
}

}  // namespace gapcert
