#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gapcert/automaton.hpp"
#include "gapcert/group.hpp"
#include "gapcert/measure.hpp"
#include "gapcert/rational.hpp"

namespace gapcert {

/// Right action of a free product on N uniform atoms: perms[f][x] = x * generator(f).
/// Not validated on construction; see validate_action.
struct FiniteAction {
  Presentation presentation;
  std::size_t points = 0;
  std::vector<std::vector<std::uint32_t>> perms;

  friend bool operator==(const FiniteAction&, const FiniteAction&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_action(const FiniteAction& act);
/// Throws InvalidInput listing the first violation.
void require_valid(const FiniteAction& act);

/// x * g^exponent for the generator of `factor`.
std::uint32_t apply_power(const FiniteAction& act, std::uint32_t x, std::uint32_t factor, std::int64_t exponent);
std::uint32_t apply(const FiniteAction& act, std::uint32_t x, const Word& w);

/// Row-stochastic matrix with exact entries, rows stored sparse and sorted by column.
class MarkovMatrix {
 public:
  using Row = std::vector<std::pair<std::uint32_t, Rational>>;

  MarkovMatrix() = default;
  /// Validates column range, sorted unique columns, positive entries, rows summing to 1.
  explicit MarkovMatrix(std::vector<Row> rows);

  std::size_t size() const { return rows_.size(); }
  const std::vector<Row>& rows() const { return rows_; }
  Rational entry(std::uint32_t x, std::uint32_t y) const;
  bool symmetric() const;
  bool doubly_stochastic() const;
  /// Row-major dense copy.
  std::vector<double> dense() const;

  friend bool operator==(const MarkovMatrix&, const MarkovMatrix&) = default;

 private:
  std::vector<Row> rows_;
};

MarkovMatrix identity_matrix(std::size_t n);
MarkovMatrix multiply(const MarkovMatrix& a, const MarkovMatrix& b);
MarkovMatrix transpose(const MarkovMatrix& m);

/// Entry (x, y) is the total weight of atoms w with x * w = y.
MarkovMatrix markov_matrix(const FiniteAction& act, const Measure& m);

using Partition = std::vector<std::vector<std::uint32_t>>;

/// Components of the graph x -- x*w over w in `support`, ordered by least point.
Partition orbits(const FiniteAction& act, const std::vector<Word>& support);
/// Components of the support graph of a matrix, ordered by least point.
Partition components(const MarkovMatrix& m);

/// Coset action on the states of a complete automaton; state 0 is the coset H.
FiniteAction schreier_from_subgroup(const SubgroupAutomaton& aut);

/// projections[n] maps points of level n+1 onto points of level n.
struct ActionChain {
  std::vector<FiniteAction> levels;
  std::vector<std::vector<std::uint32_t>> projections;
};

ValidationReport validate_chain(const ActionChain& chain);

}  // namespace gapcert
