#include "gapcert/action.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "gapcert/errors.hpp"

namespace gapcert {

namespace {

std::uint32_t find_root(std::vector<std::uint32_t>& parent, std::uint32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

void unite(std::vector<std::uint32_t>& parent, std::uint32_t a, std::uint32_t b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  if (b < a) std::swap(a, b);
  parent[b] = a;
}

Partition collect_classes(std::vector<std::uint32_t>& parent) {
  std::map<std::uint32_t, std::vector<std::uint32_t>> by_root;
  for (std::uint32_t x = 0; x < parent.size(); ++x) by_root[find_root(parent, x)].push_back(x);
  Partition out;
  for (auto& [_, members] : by_root) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

// Image of every point under w.
std::vector<std::uint32_t> word_permutation(const FiniteAction& act, const Word& w) {
  std::vector<std::uint32_t> image(act.points);
  std::iota(image.begin(), image.end(), 0u);
  for (const auto& s : w.syllables) {
    const auto& perm = act.perms[s.factor];
    std::vector<std::uint32_t> step = perm;
    if (s.exponent < 0) {
      for (std::uint32_t x = 0; x < act.points; ++x) step[perm[x]] = x;
    }
    const std::int64_t reps = std::abs(s.exponent);
    for (auto& y : image) {
      for (std::int64_t r = 0; r < reps; ++r) y = step[y];
    }
  }
  return image;
}

}  // namespace

ValidationReport validate_action(const FiniteAction& act) {
  ValidationReport report;
  const auto& p = act.presentation;
  if (act.points == 0) report.violations.push_back("action has no points");
  if (act.perms.size() != p.rank()) {
    report.violations.push_back("expected " + std::to_string(p.rank()) + " generator tables, got " +
                                std::to_string(act.perms.size()));
    return report;
  }
  for (std::size_t f = 0; f < p.rank(); ++f) {
    const auto& perm = act.perms[f];
    const std::string who = "generator '" + p.name(f) + "'";
    if (perm.size() != act.points) {
      report.violations.push_back(who + " table has " + std::to_string(perm.size()) + " entries, expected " +
                                  std::to_string(act.points));
      continue;
    }
    std::vector<bool> hit(act.points, false);
    bool bijective = true;
    for (auto y : perm) {
      if (y >= act.points || hit[y]) {
        bijective = false;
        break;
      }
      hit[y] = true;
    }
    if (!bijective) {
      report.violations.push_back(who + " table is not a bijection");
      continue;
    }
    const auto m = p.order(f);
    if (m == 0) continue;
    for (std::uint32_t x = 0; x < act.points; ++x) {
      std::uint32_t y = x;
      for (std::uint32_t r = 0; r < m; ++r) y = perm[y];
      if (y != x) {
        report.violations.push_back("order of " + who + " image does not divide " + std::to_string(m));
        break;
      }
    }
  }
  return report;
}

void require_valid(const FiniteAction& act) {
  const auto report = validate_action(act);
  if (!report.ok()) throw InvalidInput("invalid action: " + report.violations.front());
}

std::uint32_t apply_power(const FiniteAction& act, std::uint32_t x, std::uint32_t factor, std::int64_t exponent) {
  const auto& perm = act.perms.at(factor);
  if (exponent >= 0) {
    for (std::int64_t r = 0; r < exponent; ++r) x = perm[x];
    return x;
  }
  // Walk the cycle of x once; a negative power is a forward power modulo its length.
  std::int64_t length = 1;
  for (std::uint32_t y = perm[x]; y != x; y = perm[y]) ++length;
  std::int64_t forward = (exponent % length + length) % length;
  for (std::int64_t r = 0; r < forward; ++r) x = perm[x];
  return x;
}

std::uint32_t apply(const FiniteAction& act, std::uint32_t x, const Word& w) {
  for (const auto& s : w.syllables) x = apply_power(act, x, s.factor, s.exponent);
  return x;
}

MarkovMatrix::MarkovMatrix(std::vector<Row> rows) : rows_(std::move(rows)) {
  const auto n = rows_.size();
  for (std::size_t x = 0; x < n; ++x) {
    Rational total = 0;
    for (std::size_t k = 0; k < rows_[x].size(); ++k) {
      const auto& [y, w] = rows_[x][k];
      if (y >= n) throw InvalidInput("matrix column out of range in row " + std::to_string(x));
      if (k > 0 && rows_[x][k - 1].first >= y) throw InvalidInput("matrix row " + std::to_string(x) + " not sorted");
      if (w <= 0) throw InvalidInput("matrix entries must be positive where stored");
      total += w;
    }
    if (total != 1) throw InvalidInput("matrix row " + std::to_string(x) + " sums to " + to_string(total));
  }
}

Rational MarkovMatrix::entry(std::uint32_t x, std::uint32_t y) const {
  const auto& row = rows_.at(x);
  auto it = std::lower_bound(row.begin(), row.end(), y, [](const auto& e, std::uint32_t c) { return e.first < c; });
  return (it != row.end() && it->first == y) ? it->second : Rational(0);
}

bool MarkovMatrix::symmetric() const {
  for (std::uint32_t x = 0; x < rows_.size(); ++x) {
    for (const auto& [y, w] : rows_[x]) {
      if (entry(y, x) != w) return false;
    }
  }
  return true;
}

bool MarkovMatrix::doubly_stochastic() const {
  std::vector<Rational> cols(rows_.size());
  for (const auto& row : rows_) {
    for (const auto& [y, w] : row) cols[y] += w;
  }
  return std::all_of(cols.begin(), cols.end(), [](const Rational& c) { return c == 1; });
}

std::vector<double> MarkovMatrix::dense() const {
  const auto n = rows_.size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    for (const auto& [y, w] : rows_[x]) out[x * n + y] = to_double(w);
  }
  return out;
}

MarkovMatrix identity_matrix(std::size_t n) {
  std::vector<MarkovMatrix::Row> rows(n);
  for (std::uint32_t x = 0; x < n; ++x) rows[x].emplace_back(x, Rational(1));
  return MarkovMatrix(std::move(rows));
}

MarkovMatrix multiply(const MarkovMatrix& a, const MarkovMatrix& b) {
  if (a.size() != b.size()) throw InvalidInput("matrix sizes differ");
  std::vector<MarkovMatrix::Row> rows(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) {
    std::map<std::uint32_t, Rational> acc;
    for (const auto& [k, w] : a.rows()[x]) {
      for (const auto& [y, v] : b.rows()[k]) acc[y] += w * v;
    }
    for (auto& [y, w] : acc) rows[x].emplace_back(y, std::move(w));
  }
  return MarkovMatrix(std::move(rows));
}

MarkovMatrix transpose(const MarkovMatrix& m) {
  if (!m.doubly_stochastic()) throw InvalidInput("transpose of a matrix that is not doubly stochastic");
  std::vector<MarkovMatrix::Row> rows(m.size());
  // Rows of m are visited in increasing x, so each transposed row arrives sorted.
  for (std::uint32_t x = 0; x < m.size(); ++x) {
    for (const auto& [y, w] : m.rows()[x]) rows[y].emplace_back(x, w);
  }
  return MarkovMatrix(std::move(rows));
}

MarkovMatrix markov_matrix(const FiniteAction& act, const Measure& m) {
  require_valid(act);
  if (!(act.presentation == m.presentation())) throw InvalidInput("action and measure use different presentations");
  std::vector<std::map<std::uint32_t, Rational>> acc(act.points);
  for (const auto& [w, weight] : m.atoms()) {
    const auto image = word_permutation(act, w);
    for (std::uint32_t x = 0; x < act.points; ++x) acc[x][image[x]] += weight;
  }
  std::vector<MarkovMatrix::Row> rows(act.points);
  for (std::size_t x = 0; x < act.points; ++x) {
    for (auto& [y, w] : acc[x]) rows[x].emplace_back(y, std::move(w));
  }
  return MarkovMatrix(std::move(rows));
}

Partition orbits(const FiniteAction& act, const std::vector<Word>& support) {
  require_valid(act);
  std::vector<std::uint32_t> parent(act.points);
  std::iota(parent.begin(), parent.end(), 0u);
  for (const auto& w : support) {
    if (reduce_word(w.syllables, act.presentation) != w) throw InvalidInput("orbit support word not reduced");
    const auto image = word_permutation(act, w);
    for (std::uint32_t x = 0; x < act.points; ++x) unite(parent, x, image[x]);
  }
  return collect_classes(parent);
}

Partition components(const MarkovMatrix& m) {
  std::vector<std::uint32_t> parent(m.size());
  std::iota(parent.begin(), parent.end(), 0u);
  for (std::uint32_t x = 0; x < m.size(); ++x) {
    for (const auto& [y, _] : m.rows()[x]) unite(parent, x, y);
  }
  return collect_classes(parent);
}

FiniteAction schreier_from_subgroup(const SubgroupAutomaton& aut) {
  const auto& p = aut.presentation();
  // The trivial subgroup has no edges; its coset space is finite only for a single finite factor.
  if (aut.trivial_mode() && p.rank() == 1 && p.order(0) != 0) {
    const auto m = p.order(0);
    std::vector<std::uint32_t> shift(m);
    for (std::uint32_t x = 0; x < m; ++x) shift[x] = (x + 1) % m;
    return {p, m, {std::move(shift)}};
  }
  if (!aut.complete()) throw InfiniteIndex("subgroup automaton is incomplete: infinite index");
  FiniteAction act{p, aut.state_count(), {}};
  for (std::uint32_t f = 0; f < p.rank(); ++f) {
    std::vector<std::uint32_t> perm(aut.state_count());
    for (std::uint32_t q = 0; q < aut.state_count(); ++q) perm[q] = aut.next(q, f, 1);
    act.perms.push_back(std::move(perm));
  }
  return act;
}

ValidationReport validate_chain(const ActionChain& chain) {
  ValidationReport report;
  if (chain.levels.empty()) {
    report.violations.push_back("chain has no levels");
    return report;
  }
  if (chain.projections.size() + 1 != chain.levels.size()) {
    report.violations.push_back("chain with " + std::to_string(chain.levels.size()) + " levels needs " +
                                std::to_string(chain.levels.size() - 1) + " projections");
    return report;
  }
  for (std::size_t n = 0; n < chain.levels.size(); ++n) {
    const auto level = validate_action(chain.levels[n]);
    for (const auto& v : level.violations) report.violations.push_back("level " + std::to_string(n) + ": " + v);
    if (!(chain.levels[n].presentation == chain.levels[0].presentation))
      report.violations.push_back("level " + std::to_string(n) + ": presentation differs from level 0");
  }
  if (!report.ok()) return report;
  for (std::size_t n = 0; n + 1 < chain.levels.size(); ++n) {
    const auto& lower = chain.levels[n];
    const auto& upper = chain.levels[n + 1];
    const auto& pi = chain.projections[n];
    const std::string where = "projection " + std::to_string(n + 1) + "->" + std::to_string(n);
    if (pi.size() != upper.points) {
      report.violations.push_back(where + ": expected " + std::to_string(upper.points) + " entries");
      continue;
    }
    std::vector<std::size_t> fiber(lower.points, 0);
    bool in_range = true;
    for (auto y : pi) {
      if (y >= lower.points) {
        in_range = false;
        break;
      }
      ++fiber[y];
    }
    if (!in_range) {
      report.violations.push_back(where + ": image out of range");
      continue;
    }
    if (std::any_of(fiber.begin(), fiber.end(), [](std::size_t c) { return c == 0; }))
      report.violations.push_back(where + ": not surjective");
    else if (std::adjacent_find(fiber.begin(), fiber.end(), std::not_equal_to<>()) != fiber.end())
      report.violations.push_back(where + ": fibers have unequal sizes");
    bool equivariant = true;
    for (std::uint32_t f = 0; f < upper.perms.size() && equivariant; ++f) {
      for (std::uint32_t x = 0; x < upper.points; ++x) {
        if (pi[upper.perms[f][x]] != lower.perms[f][pi[x]]) {
          report.violations.push_back(where + ": not equivariant for generator '" + upper.presentation.name(f) +
                                      "' at point " + std::to_string(x));
          equivariant = false;
          break;
        }
      }
    }
  }
  return report;
}

}  // namespace gapcert
