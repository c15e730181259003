#include "gapcert/automaton.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "gapcert/errors.hpp"

namespace gapcert {

namespace {

constexpr std::uint32_t kNone = SubgroupAutomaton::kNone;

// Labeled graph with union-find folding. Edge pointers may be stale; always
// resolve them through find().
class FoldGraph {
 public:
  explicit FoldGraph(const Presentation& p) : p_(p) { add_vertex(); }

  std::uint32_t add_vertex() {
    const auto id = static_cast<std::uint32_t>(parent_.size());
    parent_.push_back(id);
    out_.emplace_back(p_.rank(), kNone);
    in_.emplace_back(p_.rank(), kNone);
    return id;
  }

  std::uint32_t find(std::uint32_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void add_edge(std::uint32_t u, std::uint32_t f, std::uint32_t v) {
    u = find(u);
    v = find(v);
    if (out_[u][f] != kNone) {
      merge(out_[u][f], v);
      return;
    }
    if (in_[v][f] != kNone) {
      merge(in_[v][f], u);
      return;
    }
    out_[u][f] = v;
    in_[v][f] = u;
  }

  void add_loop(const Word& w) {
    struct Letter {
      std::uint32_t factor;
      int direction;
    };
    std::vector<Letter> letters;
    for (const auto& s : w.syllables) {
      if (p_.is_finite(s.factor)) {
        for (std::int64_t i = 0; i < s.exponent; ++i) letters.push_back({s.factor, 1});
      } else {
        const int dir = s.exponent > 0 ? 1 : -1;
        for (std::int64_t i = 0; i < std::abs(s.exponent); ++i) letters.push_back({s.factor, dir});
      }
    }
    std::uint32_t cur = 0;
    for (std::size_t i = 0; i < letters.size(); ++i) {
      const std::uint32_t target = (i + 1 == letters.size()) ? 0 : add_vertex();
      if (letters[i].direction > 0) {
        add_edge(cur, letters[i].factor, target);
      } else {
        add_edge(target, letters[i].factor, cur);
      }
      cur = target;
    }
  }

  // Every finite-factor component touching a vertex becomes a complete cycle
  // whose length divides the factor order.
  void complete_finite_factors() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::uint32_t v = 0; v < parent_.size() && !changed; ++v) {
        if (find(v) != v) continue;
        for (std::uint32_t f = 0; f < p_.rank() && !changed; ++f) {
          const auto m = p_.order(f);
          if (m == 0) continue;
          if (out_[v][f] == kNone && in_[v][f] == kNone) continue;
          if (closes_dividing_cycle(v, f, m)) continue;
          attach_cycle(v, f, m);
          changed = true;
        }
      }
    }
  }

  struct Compacted {
    std::size_t states;
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::vector<std::uint32_t>> in;
  };

  Compacted compact() {
    const std::size_t k = p_.rank();
    std::vector<std::uint32_t> label(parent_.size(), kNone);
    std::vector<std::uint32_t> order;
    std::deque<std::uint32_t> queue;
    const auto root = find(0);
    label[root] = 0;
    order.push_back(root);
    queue.push_back(root);
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      for (std::uint32_t f = 0; f < k; ++f) {
        for (const auto* table : {&out_, &in_}) {
          const auto raw = (*table)[v][f];
          if (raw == kNone) continue;
          const auto t = find(raw);
          if (label[t] == kNone) {
            label[t] = static_cast<std::uint32_t>(order.size());
            order.push_back(t);
            queue.push_back(t);
          }
        }
      }
    }
    Compacted c{order.size(), std::vector<std::vector<std::uint32_t>>(k, std::vector<std::uint32_t>(order.size(), kNone)),
                std::vector<std::vector<std::uint32_t>>(k, std::vector<std::uint32_t>(order.size(), kNone))};
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto v = order[i];
      for (std::uint32_t f = 0; f < k; ++f) {
        if (out_[v][f] != kNone) c.out[f][i] = label[find(out_[v][f])];
        if (in_[v][f] != kNone) c.in[f][i] = label[find(in_[v][f])];
      }
    }
    for (std::uint32_t f = 0; f < k; ++f) {
      for (std::size_t i = 0; i < order.size(); ++i) {
        const auto t = c.out[f][i];
        if (t != kNone && c.in[f][t] != i) throw std::logic_error("fold: unpaired edge after folding");
      }
    }
    return c;
  }

 private:
  void merge(std::uint32_t a, std::uint32_t b) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> work{{a, b}};
    while (!work.empty()) {
      auto [x, y] = work.back();
      work.pop_back();
      x = find(x);
      y = find(y);
      if (x == y) continue;
      if (y < x) std::swap(x, y);
      parent_[y] = x;
      for (std::uint32_t f = 0; f < p_.rank(); ++f) {
        if (out_[y][f] != kNone) {
          if (out_[x][f] != kNone) {
            work.emplace_back(out_[x][f], out_[y][f]);
          } else {
            out_[x][f] = out_[y][f];
          }
        }
        if (in_[y][f] != kNone) {
          if (in_[x][f] != kNone) {
            work.emplace_back(in_[x][f], in_[y][f]);
          } else {
            in_[x][f] = in_[y][f];
          }
        }
      }
    }
  }

  bool closes_dividing_cycle(std::uint32_t v, std::uint32_t f, std::uint32_t m) {
    std::uint32_t cur = v;
    for (std::uint32_t step = 1; step <= m; ++step) {
      if (out_[cur][f] == kNone) return false;
      cur = find(out_[cur][f]);
      if (cur == v) return m % step == 0;
    }
    return false;
  }

  void attach_cycle(std::uint32_t v, std::uint32_t f, std::uint32_t m) {
    std::vector<std::uint32_t> ring{v};
    for (std::uint32_t i = 1; i < m; ++i) ring.push_back(add_vertex());
    for (std::uint32_t i = 0; i < m; ++i) add_edge(ring[i], f, ring[(i + 1) % m]);
  }

  const Presentation& p_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::vector<std::uint32_t>> out_;  // [vertex][factor]
  std::vector<std::vector<std::uint32_t>> in_;
};

}  // namespace

SubgroupAutomaton::SubgroupAutomaton(Presentation p, std::vector<Word> gens, std::size_t states,
                                     std::vector<std::vector<std::uint32_t>> out,
                                     std::vector<std::vector<std::uint32_t>> in)
    : p_(std::move(p)), gens_(std::move(gens)), state_count_(states), out_(std::move(out)), in_(std::move(in)) {}

SubgroupAutomaton SubgroupAutomaton::fold(const Presentation& p, const std::vector<Word>& gens) {
  std::vector<Word> kept;
  for (const auto& g : gens) {
    if (reduce_word(g.syllables, p) != g)
      throw InvalidInput("subgroup generator '" + format_word(g, p) + "' is not reduced");
    if (!g.is_identity()) kept.push_back(g);
  }
  if (kept.empty()) return trivial(p);
  FoldGraph graph(p);
  for (const auto& g : kept) graph.add_loop(g);
  graph.complete_finite_factors();
  auto c = graph.compact();
  return SubgroupAutomaton(p, std::move(kept), c.states, std::move(c.out), std::move(c.in));
}

SubgroupAutomaton SubgroupAutomaton::trivial(const Presentation& p) {
  return SubgroupAutomaton(p, {}, 1, std::vector<std::vector<std::uint32_t>>(p.rank(), {kNone}),
                           std::vector<std::vector<std::uint32_t>>(p.rank(), {kNone}));
}

SubgroupAutomaton SubgroupAutomaton::refold(const SubgroupAutomaton& aut) {
  if (aut.trivial_mode()) return aut;
  FoldGraph graph(aut.p_);
  for (std::size_t i = 1; i < aut.state_count_; ++i) graph.add_vertex();
  for (const auto& e : aut.edges()) graph.add_edge(e.from, e.factor, e.to);
  graph.complete_finite_factors();
  auto c = graph.compact();
  return SubgroupAutomaton(aut.p_, aut.gens_, c.states, std::move(c.out), std::move(c.in));
}

std::uint32_t SubgroupAutomaton::next(std::uint32_t state, std::uint32_t factor, int direction) const {
  return direction > 0 ? out_[factor][state] : in_[factor][state];
}

bool SubgroupAutomaton::has_factor(std::uint32_t state, std::uint32_t factor) const {
  return out_[factor][state] != kNone || in_[factor][state] != kNone;
}

bool SubgroupAutomaton::complete() const {
  for (std::size_t f = 0; f < p_.rank(); ++f) {
    for (std::size_t q = 0; q < state_count_; ++q) {
      if (out_[f][q] == kNone || in_[f][q] == kNone) return false;
    }
  }
  return true;
}

std::vector<SubgroupAutomaton::Edge> SubgroupAutomaton::edges() const {
  std::vector<Edge> result;
  for (std::uint32_t q = 0; q < state_count_; ++q) {
    for (std::uint32_t f = 0; f < p_.rank(); ++f) {
      if (out_[f][q] != kNone) result.push_back({q, f, out_[f][q]});
    }
  }
  return result;
}

bool CosetStateLess::operator()(const CosetState& a, const CosetState& b) const {
  if (a.state != b.state) return a.state < b.state;
  return ShortLex{}(a.suffix, b.suffix);
}

CosetState read_from(const SubgroupAutomaton& aut, std::uint32_t state, const Word& w) {
  const auto& p = aut.presentation();
  std::uint32_t cur = state;
  const auto& syl = w.syllables;
  for (std::size_t idx = 0; idx < syl.size(); ++idx) {
    const auto f = syl[idx].factor;
    const auto k = syl[idx].exponent;
    if (p.is_finite(f)) {
      if (aut.next(cur, f, 1) == kNone) {
        return {cur, Word{std::vector<Syllable>(syl.begin() + static_cast<std::ptrdiff_t>(idx), syl.end())}};
      }
      for (std::int64_t i = 0; i < k; ++i) cur = aut.next(cur, f, 1);
      continue;
    }
    const int dir = k > 0 ? 1 : -1;
    const std::int64_t steps = std::abs(k);
    std::int64_t taken = 0;
    while (taken < steps) {
      const auto t = aut.next(cur, f, dir);
      if (t == kNone) break;
      cur = t;
      ++taken;
    }
    if (taken < steps) {
      Word rest;
      rest.syllables.push_back({f, k - dir * taken});
      rest.syllables.insert(rest.syllables.end(), syl.begin() + static_cast<std::ptrdiff_t>(idx) + 1, syl.end());
      return {cur, std::move(rest)};
    }
  }
  return {cur, Word{}};
}

CosetState advance(const SubgroupAutomaton& aut, const CosetState& from, const Word& x) {
  return read_from(aut, from.state, multiply(from.suffix, x, aut.presentation()));
}

bool contains(const SubgroupAutomaton& aut, const Word& w) {
  return read_from(aut, SubgroupAutomaton::kBase, w).in_subgroup();
}

namespace {

struct BallSearch {
  const SubgroupAutomaton& aut;
  std::size_t cap;
  std::size_t visited = 0;
  std::vector<Syllable> path;
  std::vector<Word> found;

  void visit(std::uint32_t state, std::uint32_t last_factor, std::int64_t budget) {
    if (++visited > cap) throw CostCapExceeded("subgroup ball enumeration exceeds cap of " + std::to_string(cap));
    if (state == SubgroupAutomaton::kBase) found.push_back(Word{path});
    const auto& p = aut.presentation();
    for (std::uint32_t f = 0; f < p.rank(); ++f) {
      if (f == last_factor) continue;
      const auto m = static_cast<std::int64_t>(p.order(f));
      if (m != 0) {
        if (aut.next(state, f, 1) == kNone) continue;
        std::uint32_t cur = state;
        for (std::int64_t k = 1; k < m; ++k) {
          cur = aut.next(cur, f, 1);
          const std::int64_t cost = std::min(k, m - k);
          if (cost > budget) continue;
          path.push_back({f, k});
          visit(cur, f, budget - cost);
          path.pop_back();
        }
        continue;
      }
      for (int dir : {1, -1}) {
        std::uint32_t cur = state;
        for (std::int64_t j = 1; j <= budget; ++j) {
          cur = aut.next(cur, f, dir);
          if (cur == kNone) break;
          path.push_back({f, dir * j});
          visit(cur, f, budget - j);
          path.pop_back();
        }
      }
    }
  }
};

}  // namespace

std::vector<Word> subgroup_ball(const SubgroupAutomaton& aut, std::int64_t radius, std::size_t cap) {
  BallSearch search{aut, cap, 0, {}, {}};
  search.visit(SubgroupAutomaton::kBase, kNone, radius);
  std::sort(search.found.begin(), search.found.end(), ShortLex{});
  return std::move(search.found);
}

}  // namespace gapcert
