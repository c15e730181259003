#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gapcert/group.hpp"

namespace gapcert {

/// Folded Stallings automaton of a subgroup H of a free product of cyclic groups.
///
/// Alphabet: one letter per factor, read forwards (out-edges) or backwards
/// (in-edges). For a finite factor of order m every state carrying an edge of
/// that factor lies on a complete cycle whose length divides m, so a syllable
/// a^k is always read as k forward steps. States are numbered by BFS from the
/// base state 0 (factors in order, out-edge before in-edge).
///
/// An automaton with a single state and no edges is the trivial subgroup mode.
class SubgroupAutomaton {
 public:
  static constexpr std::uint32_t kNone = UINT32_MAX;
  static constexpr std::uint32_t kBase = 0;

  struct Edge {
    std::uint32_t from;
    std::uint32_t factor;
    std::uint32_t to;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  /// Folds the subgroup generated by `gens`. Identity generators are ignored;
  /// an empty (or all-identity) list gives the trivial subgroup mode.
  static SubgroupAutomaton fold(const Presentation& p, const std::vector<Word>& gens);
  static SubgroupAutomaton trivial(const Presentation& p);
  /// Runs folding and completion again on an existing automaton's edge set.
  static SubgroupAutomaton refold(const SubgroupAutomaton& aut);

  const Presentation& presentation() const { return p_; }
  const std::vector<Word>& generators() const { return gens_; }
  std::size_t state_count() const { return state_count_; }
  bool trivial_mode() const { return gens_.empty(); }

  /// Target of the forward (+1) or backward (-1) letter, or kNone.
  std::uint32_t next(std::uint32_t state, std::uint32_t factor, int direction) const;
  bool has_factor(std::uint32_t state, std::uint32_t factor) const;

  /// Every state has every letter in both directions: H has finite index and
  /// states biject with the cosets.
  bool complete() const;

  /// Forward edges (from, factor, to), sorted.
  std::vector<Edge> edges() const;

  friend bool operator==(const SubgroupAutomaton& a, const SubgroupAutomaton& b) {
    return a.p_ == b.p_ && a.state_count_ == b.state_count_ && a.out_ == b.out_ && a.in_ == b.in_;
  }

 private:
  SubgroupAutomaton(Presentation p, std::vector<Word> gens, std::size_t states,
                    std::vector<std::vector<std::uint32_t>> out,
                    std::vector<std::vector<std::uint32_t>> in);

  Presentation p_;
  std::vector<Word> gens_;
  std::size_t state_count_ = 1;
  // [factor][state] -> state or kNone
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<std::vector<std::uint32_t>> in_;
};

/// A right coset Hg named by the automaton state reached reading g, plus the
/// unread normal-form suffix. Canonical: the suffix (when nonempty) begins
/// with a letter the state cannot read.
struct CosetState {
  std::uint32_t state = SubgroupAutomaton::kBase;
  Word suffix;

  bool in_subgroup() const { return state == SubgroupAutomaton::kBase && suffix.is_identity(); }
  friend bool operator==(const CosetState&, const CosetState&) = default;
};

struct CosetStateLess {
  bool operator()(const CosetState& a, const CosetState& b) const;
};

/// Reads the normal-form word w starting at `state` as far as the automaton allows.
CosetState read_from(const SubgroupAutomaton& aut, std::uint32_t state, const Word& w);

/// Coset of g * x given the coset state of g and a reduced word x.
CosetState advance(const SubgroupAutomaton& aut, const CosetState& from, const Word& x);

bool contains(const SubgroupAutomaton& aut, const Word& w);

/// All elements of H of letter length <= radius, in shortlex order. Walks
/// only the folded core. Throws CostCapExceeded past `cap` visited paths.
std::vector<Word> subgroup_ball(const SubgroupAutomaton& aut, std::int64_t radius,
                                std::size_t cap);

}  // namespace gapcert
