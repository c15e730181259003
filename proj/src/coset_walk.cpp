#include "gapcert/coset_walk.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "gapcert/errors.hpp"

namespace gapcert {

namespace {

template <class Scalar>
Scalar convert(const Rational& r);

template <>
Rational convert<Rational>(const Rational& r) {
  return r;
}

template <>
double convert<double>(const Rational& r) {
  return to_double(r);
}

template <class Scalar>
bool is_zero(const Scalar& s) {
  return s == 0;
}

void require_same(const Presentation& a, const Presentation& b) {
  if (!(a == b)) throw InvalidInput("subgroup, measure and action must share one presentation");
}

// Normal-form exponent of the inverse syllable.
std::int64_t inverse_exponent(const Presentation& p, std::uint32_t factor, std::int64_t v) {
  const auto m = static_cast<std::int64_t>(p.order(factor));
  return m == 0 ? -v : m - v;
}

// Coset walk for single-syllable measures. States are automaton states (core)
// and hanging states (q, i, v) whose suffix is one syllable of factor i; any
// push onto a different factor must be undone before the walk can return to H,
// so it is folded into the excursion weights of the first-passage table.
template <class Scalar>
class ExcursionWalk {
 public:
  ExcursionWalk(const SubgroupAutomaton& aut, const StepLaw<Scalar>& law, const FirstPassage<Scalar>& fp,
                const FiniteAction* act, std::size_t horizon, std::size_t cap)
      : aut_(aut), law_(law), fp_(fp), horizon_(horizon), points_(act ? act->points : 1) {
    const auto& p = aut.presentation();
    const auto rank = p.rank();
    const auto core = aut.state_count();
    for (std::uint32_t q = 0; q < core; ++q) states_.push_back({false, q, 0, 0, 0});
    block_.assign(core * rank, kNoBlock);
    for (std::uint32_t q = 0; q < core; ++q) {
      for (std::uint32_t i = 0; i < rank; ++i) {
        std::int64_t lo = 0, hi = -1;
        if (p.is_finite(i)) {
          if (aut.has_factor(q, i)) continue;
          lo = 1;
          hi = p.order(i) - 1;
        } else {
          const std::int64_t w = law.reach[i] * static_cast<std::int64_t>(horizon / 2);
          if (w == 0) continue;
          const bool up = aut.next(q, i, 1) == SubgroupAutomaton::kNone;
          const bool down = aut.next(q, i, -1) == SubgroupAutomaton::kNone;
          if (!up && !down) continue;
          lo = down ? -w : 1;
          hi = up ? w : -1;
        }
        block_[q * rank + i] = blocks_.size();
        blocks_.push_back({lo, hi, states_.size()});
        for (std::int64_t v = lo; v <= hi; ++v) {
          std::int64_t back = 0;
          if (!p.is_finite(i)) back = (std::abs(v) + law.reach[i] - 1) / law.reach[i];
          states_.push_back({true, q, i, v, back});
        }
      }
    }
    if (states_.size() * points_ > cap)
      throw CostCapExceeded("coset walk needs " + std::to_string(states_.size() * points_) +
                            " states, cap is " + std::to_string(cap));

    for (std::uint32_t i = 0; i < rank; ++i) {
      for (const auto& [x, w] : law.steps[i]) {
        std::vector<std::uint32_t> perm(points_);
        for (std::uint32_t y = 0; y < points_; ++y) {
          perm[y] = act ? apply_power(*act, y, i, x) : 0;
        }
        step_perm_.push_back(std::move(perm));
      }
    }

    edges_.resize(states_.size());
    for (std::size_t s = 0; s < states_.size(); ++s) {
      const auto& st = states_[s];
      std::size_t perm_id = 0;
      for (std::uint32_t i = 0; i < rank; ++i) {
        for (const auto& [x, w] : law.steps[i]) {
          const auto id = perm_id++;
          if (st.hanging && st.factor != i) continue;  // excursion, handled separately
          std::int64_t exponent = x;
          if (st.hanging) {
            exponent = st.v + x;
            if (p.is_finite(i)) exponent %= static_cast<std::int64_t>(p.order(i));
            if (exponent == 0) {
              edges_[s].push_back({st.q, id, w});
              continue;
            }
          }
          const auto cs = read_from(aut, st.q, Word{{Syllable{i, exponent}}});
          std::size_t target = cs.state;
          if (!cs.suffix.is_identity()) {
            target = locate(cs.state, i, cs.suffix.syllables.front().exponent);
            if (target == kNoBlock) continue;  // too deep to come back in time
          }
          edges_[s].push_back({target, id, w});
        }
      }
    }
  }

  // hits[t][y] = P(X_t in H and start * X_t = y)
  std::vector<std::vector<Scalar>> run(std::uint32_t start) const {
    const auto n = states_.size();
    const auto np = points_;
    std::vector<std::vector<Scalar>> mass(horizon_ + 1, std::vector<Scalar>(n * np));
    std::vector<std::vector<Scalar>> hits(horizon_ + 1, std::vector<Scalar>(np));
    mass[0][start] = 1;
    hits[0][start] = 1;
    for (std::size_t t = 1; t <= horizon_; ++t) {
      const auto& prev = mass[t - 1];
      auto& cur = mass[t];
      const auto left = static_cast<std::int64_t>(horizon_ - t);
      for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t y = 0; y < np; ++y) {
          const auto& pr = prev[s * np + y];
          if (is_zero(pr)) continue;
          if (!is_zero(law_.identity) && states_[s].back <= left) cur[s * np + y] += law_.identity * pr;
          for (const auto& e : edges_[s]) {
            if (states_[e.target].back > left) continue;
            cur[e.target * np + step_perm_[e.perm][y]] += e.weight * pr;
          }
        }
      }
      for (std::size_t s = aut_.state_count(); s < n; ++s) {
        if (states_[s].back > left) continue;
        const auto& q = fp_.excursion(states_[s].factor);
        for (std::size_t tau = 1; tau + 2 <= t; ++tau) {
          if (is_zero(q[tau])) continue;
          const auto& src = mass[t - 1 - tau];
          for (std::size_t y = 0; y < np; ++y) {
            const auto& pr = src[s * np + y];
            if (!is_zero(pr)) cur[s * np + y] += q[tau] * pr;
          }
        }
      }
      for (std::size_t y = 0; y < np; ++y) hits[t][y] = cur[y];
    }
    return hits;
  }

 private:
  static constexpr std::size_t kNoBlock = static_cast<std::size_t>(-1);

  struct State {
    bool hanging;
    std::uint32_t q;
    std::uint32_t factor;
    std::int64_t v;
    std::int64_t back;  // fewest steps needed to leave this hanging state towards the core
  };
  struct Block {
    std::int64_t lo, hi;
    std::size_t offset;
  };
  struct Edge {
    std::size_t target;
    std::size_t perm;
    Scalar weight;
  };

  std::size_t locate(std::uint32_t q, std::uint32_t i, std::int64_t v) const {
    const auto b = block_[q * aut_.presentation().rank() + i];
    if (b == kNoBlock) return kNoBlock;
    const auto& blk = blocks_[b];
    if (v < blk.lo || v > blk.hi) return kNoBlock;
    return blk.offset + static_cast<std::size_t>(v - blk.lo);
  }

  const SubgroupAutomaton& aut_;
  const StepLaw<Scalar>& law_;
  const FirstPassage<Scalar>& fp_;
  std::size_t horizon_;
  std::size_t points_;
  std::vector<State> states_;
  std::vector<std::size_t> block_;
  std::vector<Block> blocks_;
  std::vector<std::vector<std::uint32_t>> step_perm_;
  std::vector<std::vector<Edge>> edges_;
};

// Explicit (coset state, point) dynamics for arbitrary finitely supported measures.
template <class Scalar>
std::vector<std::vector<Scalar>> generic_walk(const SubgroupAutomaton& aut, const Measure& m, const FiniteAction* act,
                                              std::size_t horizon, std::uint32_t start, std::size_t cap) {
  struct KeyLess {
    bool operator()(const std::pair<CosetState, std::uint32_t>& a,
                    const std::pair<CosetState, std::uint32_t>& b) const {
      if (a.second != b.second) return a.second < b.second;
      return CosetStateLess{}(a.first, b.first);
    }
  };
  using Layer = std::map<std::pair<CosetState, std::uint32_t>, Scalar, KeyLess>;
  const std::size_t np = act ? act->points : 1;
  struct Atom {
    Word w;
    Scalar weight;
    std::vector<std::uint32_t> image;
  };
  std::vector<Atom> atoms;
  for (const auto& [w, weight] : m.atoms()) {
    std::vector<std::uint32_t> image(np, 0);
    if (act) {
      for (std::uint32_t y = 0; y < np; ++y) image[y] = apply(*act, y, w);
    }
    atoms.push_back({w, convert<Scalar>(weight), std::move(image)});
  }
  const auto sigma = static_cast<std::int64_t>(m.max_syllables());
  std::vector<std::vector<Scalar>> hits(horizon + 1, std::vector<Scalar>(np));
  hits[0][start] = 1;
  Layer cur;
  cur[{CosetState{}, start}] = 1;
  for (std::size_t t = 1; t <= horizon; ++t) {
    Layer next;
    const auto left = static_cast<std::int64_t>(horizon - t);
    for (const auto& [key, pr] : cur) {
      for (const auto& a : atoms) {
        auto ns = advance(aut, key.first, a.w);
        if (static_cast<std::int64_t>(ns.suffix.syllable_length()) > sigma * left) continue;
        next[{std::move(ns), a.image[key.second]}] += a.weight * pr;
        if (next.size() > cap)
          throw CostCapExceeded("generic coset walk exceeds state cap of " + std::to_string(cap));
      }
    }
    for (std::uint32_t y = 0; y < np; ++y) {
      auto it = next.find({CosetState{}, y});
      if (it != next.end()) hits[t][y] = it->second;
    }
    cur = std::move(next);
  }
  return hits;
}

// hits[k][t][y] for the walk started at starts[k].
template <class Scalar>
std::vector<std::vector<std::vector<Scalar>>> walk_hits(const SubgroupAutomaton& aut, const Measure& m,
                                                        const FiniteAction* act, std::size_t horizon,
                                                        const std::vector<std::uint32_t>& starts,
                                                        const CosetOptions& opts) {
  require_same(aut.presentation(), m.presentation());
  if (act) require_same(aut.presentation(), act->presentation);
  std::vector<std::vector<std::vector<Scalar>>> out;
  auto engine = opts.engine;
  if (engine == CosetEngine::Auto) engine = m.single_syllable() ? CosetEngine::Excursion : CosetEngine::Generic;
  if (engine == CosetEngine::Generic) {
    for (auto x : starts) out.push_back(generic_walk<Scalar>(aut, m, act, horizon, x, opts.state_cap));
    return out;
  }
  if (!m.single_syllable()) throw InvalidInput("excursion engine needs a measure supported on single syllables");
  const auto law = StepLaw<Scalar>::from(m);
  const FirstPassage<Scalar> fp(m.presentation(), law, horizon);
  const ExcursionWalk<Scalar> walk(aut, law, fp, act, horizon, opts.state_cap);
  for (auto x : starts) out.push_back(walk.run(x));
  return out;
}

template <class Scalar>
std::vector<Scalar> hit_sequence(const SubgroupAutomaton& aut, const Measure& m, std::size_t horizon,
                                 const CosetOptions& opts) {
  const auto hits = walk_hits<Scalar>(aut, m, nullptr, horizon, {0}, opts).front();
  std::vector<Scalar> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h[0]);
  return out;
}

}  // namespace

template <class Scalar>
StepLaw<Scalar> StepLaw<Scalar>::from(const Measure& m) {
  if (!m.single_syllable()) throw InvalidInput("step law needs a measure supported on single syllables");
  const auto& p = m.presentation();
  StepLaw law;
  law.steps.resize(p.rank());
  law.reach.assign(p.rank(), 0);
  for (const auto& [w, weight] : m.atoms()) {
    if (w.is_identity()) {
      law.identity = convert<Scalar>(weight);
      continue;
    }
    const auto& s = w.syllables.front();
    law.steps[s.factor].emplace_back(s.exponent, convert<Scalar>(weight));
    law.reach[s.factor] = std::max(law.reach[s.factor], std::abs(s.exponent));
  }
  return law;
}

template <class Scalar>
FirstPassage<Scalar>::FirstPassage(const Presentation& p, const StepLaw<Scalar>& law, std::size_t horizon)
    : p_(p), horizon_(horizon) {
  const auto rank = p.rank();
  const auto h = static_cast<std::int64_t>(horizon);
  width_.resize(rank);
  offset_.resize(rank);
  table_.resize(rank);
  excursion_.assign(rank, std::vector<Scalar>(horizon + 1));
  for (std::size_t i = 0; i < rank; ++i) {
    if (p.is_finite(i)) {
      width_[i] = p.order(i);
      offset_[i] = 0;
    } else {
      offset_[i] = law.reach[i] * h;
      width_[i] = 2 * offset_[i] + 1;
    }
    table_[i].assign((horizon + 1) * static_cast<std::size_t>(width_[i]), Scalar{});
  }
  // pushed[j][t]: a step onto factor j is undone exactly t steps after it.
  std::vector<std::vector<Scalar>> pushed(rank, std::vector<Scalar>(horizon + 1));
  for (std::size_t t = 1; t <= horizon; ++t) {
    for (std::uint32_t i = 0; i < rank; ++i) {
      const auto& steps = law.steps[i];
      if (steps.empty()) continue;
      std::int64_t lo = 1, hi = 0;
      if (p.is_finite(i)) {
        hi = p.order(i) - 1;
      } else {
        hi = law.reach[i] * static_cast<std::int64_t>(t);
        lo = -hi;
      }
      const auto row = t * static_cast<std::size_t>(width_[i]);
      for (std::int64_t v = lo; v <= hi; ++v) {
        if (v == 0) continue;
        Scalar value{};
        for (const auto& [x, w] : steps) {
          std::int64_t nv = v + x;
          if (p.is_finite(i)) nv %= static_cast<std::int64_t>(p.order(i));
          if (nv == 0) {
            if (t == 1) value += w;
          } else if (t > 1) {
            const auto f = at(i, nv, t - 1);
            if (!is_zero(f)) value += w * f;
          }
        }
        if (t > 1) {
          const auto stay = at(i, v, t - 1);
          if (!is_zero(stay) && !is_zero(law.identity)) value += law.identity * stay;
          const auto& q = excursion_[i];
          for (std::size_t tau = 1; tau + 2 <= t; ++tau) {
            if (is_zero(q[tau])) continue;
            const auto f = at(i, v, t - 1 - tau);
            if (!is_zero(f)) value += q[tau] * f;
          }
        }
        table_[i][row + static_cast<std::size_t>(v + offset_[i])] = value;
      }
    }
    for (std::uint32_t j = 0; j < rank; ++j) {
      Scalar total{};
      for (const auto& [y, w] : law.steps[j]) total += w * at(j, y, t);
      pushed[j][t] = total;
    }
    for (std::uint32_t i = 0; i < rank; ++i) {
      Scalar total{};
      for (std::uint32_t j = 0; j < rank; ++j) {
        if (j != i) total += pushed[j][t];
      }
      excursion_[i][t] = total;
    }
  }
  // First return to e after s steps: a lazy step, or a push undone s-1 steps later.
  std::vector<Scalar> first(horizon + 1);
  if (horizon >= 1) first[1] = law.identity;
  for (std::size_t s = 2; s <= horizon; ++s) {
    for (std::uint32_t j = 0; j < rank; ++j) first[s] += pushed[j][s - 1];
  }
  returns_.assign(horizon + 1, Scalar{});
  returns_[0] = 1;
  for (std::size_t t = 1; t <= horizon; ++t) {
    for (std::size_t s = 1; s <= t; ++s) {
      if (!is_zero(first[s]) && !is_zero(returns_[t - s])) returns_[t] += first[s] * returns_[t - s];
    }
  }
}

template <class Scalar>
std::int64_t FirstPassage<Scalar>::index(std::uint32_t factor, std::int64_t v) const {
  const auto idx = v + offset_[factor];
  if (v == 0 || idx < 0 || idx >= width_[factor]) return -1;
  return idx;
}

template <class Scalar>
Scalar FirstPassage<Scalar>::at(std::uint32_t factor, std::int64_t v, std::size_t t) const {
  if (t == 0 || t > horizon_) return Scalar{};
  const auto idx = index(factor, v);
  if (idx < 0) return Scalar{};
  return table_[factor][t * static_cast<std::size_t>(width_[factor]) + static_cast<std::size_t>(idx)];
}

template <class Scalar>
Scalar FirstPassage<Scalar>::word_probability(const Word& w, std::size_t n) const {
  if (n > horizon_) throw InvalidInput("word probability beyond the first-passage horizon");
  // The walk from w^{-1} to e strips the syllables of w^{-1} from the right, one
  // first passage each, then returns to e.
  std::vector<Scalar> delay(n + 1);
  delay[0] = 1;
  for (const auto& s : w.syllables) {
    const auto v = inverse_exponent(p_, s.factor, s.exponent);
    std::vector<Scalar> next(n + 1);
    for (std::size_t t = 1; t <= n; ++t) {
      for (std::size_t tau = 1; tau <= t; ++tau) {
        if (is_zero(delay[t - tau])) continue;
        const auto f = at(s.factor, v, tau);
        if (!is_zero(f)) next[t] += f * delay[t - tau];
      }
    }
    delay = std::move(next);
  }
  Scalar total{};
  for (std::size_t tau = 0; tau <= n; ++tau) {
    if (!is_zero(delay[tau])) total += delay[tau] * returns_[n - tau];
  }
  return total;
}

template struct StepLaw<Rational>;
template struct StepLaw<double>;
template class FirstPassage<Rational>;
template class FirstPassage<double>;

std::vector<Rational> coset_hit_sequence(const SubgroupAutomaton& aut, const Measure& m, std::size_t horizon,
                                         const CosetOptions& opts) {
  return hit_sequence<Rational>(aut, m, horizon, opts);
}

std::vector<double> coset_hit_sequence_double(const SubgroupAutomaton& aut, const Measure& m, std::size_t horizon,
                                              const CosetOptions& opts) {
  return hit_sequence<double>(aut, m, horizon, opts);
}

Rational coset_hit_probability(const SubgroupAutomaton& aut, const Measure& m, std::size_t n,
                               const CosetOptions& opts) {
  return coset_hit_sequence(aut, m, n, opts).back();
}

std::vector<std::vector<Rational>> coset_transfer(const SubgroupAutomaton& aut, const Measure& m,
                                                  const FiniteAction& act, std::size_t n, const CosetOptions& opts) {
  require_valid(act);
  std::vector<std::uint32_t> starts(act.points);
  std::iota(starts.begin(), starts.end(), 0u);
  std::vector<std::vector<Rational>> out;
  for (auto& hits : walk_hits<Rational>(aut, m, &act, n, starts, opts)) out.push_back(std::move(hits.back()));
  return out;
}

Rational word_probability(const Measure& m, const Word& w, std::size_t n) {
  const auto law = StepLaw<Rational>::from(m);
  const FirstPassage<Rational> fp(m.presentation(), law, n);
  return fp.word_probability(w, n);
}

}  // namespace gapcert
