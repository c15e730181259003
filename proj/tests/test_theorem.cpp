#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"

#include "gapcert/errors.hpp"
#include "gapcert/instances.hpp"
#include "gapcert/theorem.hpp"
#include "helpers.hpp"

using namespace gapcert;
using testing_support::dense_exact;
using testing_support::from_oracle;
using testing_support::steps_of;

namespace {

FiniteAction cyclic_action(const Presentation& p, std::uint32_t n, std::vector<std::uint32_t> steps) {
  FiniteAction act{p, n, {}};
  for (auto s : steps) {
    std::vector<std::uint32_t> perm(n);
    for (std::uint32_t x = 0; x < n; ++x) perm[x] = (x + s) % n;
    act.perms.push_back(std::move(perm));
  }
  return act;
}

std::vector<std::uint32_t> projection(std::uint32_t upper, std::uint32_t lower) {
  std::vector<std::uint32_t> pi(upper);
  for (std::uint32_t x = 0; x < upper; ++x) pi[x] = x % lower;
  return pi;
}

}  // namespace

TEST_SUITE("theorem-engine") {

TEST_CASE("component split example") {
  const auto f2 = Presentation::free_group(2);
  const auto act = cyclic_action(f2, 4, {1, 2});
  const auto aut = SubgroupAutomaton::fold(f2, {parse_word("b", f2)});
  const auto r = mertek_decompose(act, uniform_generators(f2), aut);
  CHECK(r.kappa == Rational(1, 2));
  CHECK(std::abs(r.rho) < 1e-10);
  REQUIRE(r.components.size() == 2);
  CHECK(r.components[0].points == std::vector<std::uint32_t>{0, 2});
  CHECK(r.components[1].points == std::vector<std::uint32_t>{1, 3});
  CHECK(r.components[0].mass == Rational(1, 2));
  CHECK(*r.components[0].rho_plus == doctest::Approx(-1.0));
  CHECK(*r.count_bound == doctest::Approx(2.0));
  CHECK(*r.smallset_threshold == doctest::Approx(0.25));
  CHECK(*r.smallset_rate == doctest::Approx(0.5));
  CHECK(r.exhaustive_checked);
  CHECK(r.smallset_sets == 4);
  CHECK(r.smallset_violations == 0);
  CHECK(r.exp_violations == 0);
  CHECK(r.verdict == "verified");
}

TEST_CASE("vacuous, degenerate and invalid splits") {
  const auto f2 = Presentation::free_group(2);
  const FiniteAction act{f2, 2, {{0, 1}, {1, 0}}};
  const auto b = SubgroupAutomaton::fold(f2, {parse_word("b", f2)});
  // kappa = 1/4 against rho+ = 1/2.
  Measure::Atoms atoms{{parse_word("b", f2), Rational(1, 8)}, {parse_word("b^-1", f2), Rational(1, 8)},
                       {parse_word("a", f2), Rational(3, 8)}, {parse_word("a^-1", f2), Rational(3, 8)}};
  const auto vac = mertek_decompose(act, Measure(f2, atoms), b);
  CHECK(vac.vacuous);
  CHECK(vac.verdict == "bounds vacuous");
  CHECK(!vac.count_bound);

  const auto whole = SubgroupAutomaton::fold(f2, {parse_word("a", f2), parse_word("b", f2)});
  const auto deg = mertek_decompose(cyclic_action(f2, 5, {1, 2}), uniform_generators(f2), whole);
  CHECK(deg.degenerate);
  CHECK(deg.kappa == 1);
  CHECK(deg.components.size() == 1);
  CHECK(deg.verdict == "verified");

  CHECK_THROWS_AS(mertek_decompose(act, dirac(f2, parse_word("a", f2)), b), DomainError);
  CHECK_THROWS_AS(evaluate_mertek_bounds(identity_matrix(2), Rational(0), 0.0), DomainError);
  CHECK_THROWS_AS(evaluate_mertek_bounds(identity_matrix(2), Rational(3, 2), 0.0), DomainError);
}

TEST_CASE("fotetel witness example") {
  const auto f2 = Presentation::free_group(2);
  const FiniteAction act{f2, 2, {{0, 1}, {1, 0}}};
  const auto aut = SubgroupAutomaton::fold(f2, {parse_word("a", f2)});
  const auto w = fotetel_witness(aut, act);
  CHECK(w.n == 2);
  CHECK(w.kappa == Rational(19, 32));
  CHECK(w.lazy_rho == doctest::Approx(0.5));
  CHECK(w.rho == doctest::Approx(0.25));
  CHECK(w.support_size == "17");
  REQUIRE(w.generators);
  std::vector<std::string> t;
  for (const auto& g : *w.generators) t.push_back(format_word(g, f2));
  CHECK(t == std::vector<std::string>{"e", "a^-2", "a^-1", "a", "a^2"});
  CHECK(w.generator_mass == w.kappa);
  CHECK(w.matrix_routes_agree);
  CHECK(w.mertek.components.size() == 2);
  CHECK(*w.mertek.count_bound == doctest::Approx((1 - 0.25) / (19.0 / 32 - 0.25)));
  CHECK(w.verdict == "verified");
  CHECK(w.precondition_certified);
}

TEST_CASE("no witness within the search bound") {
  const auto z = Presentation::free_group(1);
  const auto trivial = SubgroupAutomaton::trivial(z);
  WitnessOptions opts;
  opts.n_max = 8;
  CHECK_THROWS_AS(fotetel_witness(trivial, cyclic_action(z, 20, {1}), opts), NoWitnessFound);
  opts.n_max = 7;
  CHECK_THROWS_AS(fotetel_witness(trivial, cyclic_action(z, 20, {1}), opts), InvalidInput);
}

TEST_CASE("witness search agrees with path enumeration and T lies in the subgroup") {
  InstanceGenerator gen(51);
  int found = 0;
  for (int i = 0; i < 40 && found < 12; ++i) {
    const auto p = gen.presentation(2);
    const auto aut = SubgroupAutomaton::fold(p, gen.subgroup_generators(p, 2, 2));
    const auto act = gen.action(p, gen.uniform(2, 8));
    WitnessOptions opts;
    opts.n_max = 6;
    opts.radius_n_max = 16;
    WitnessReport w;
    try {
      w = fotetel_witness(aut, act, opts);
    } catch (const NoWitnessFound&) {
      continue;
    }
    ++found;
    Rational expected = 0;
    for (const auto& [word, q] : oracle::enumerate_walk(steps_of(*w.lazy), w.n, p.orders())) {
      if (contains(aut, from_oracle(word))) expected += q;
    }
    CHECK(w.kappa == expected);
    CHECK(to_double(w.kappa) > w.rho);
    REQUIRE(w.generators);
    for (const auto& g : *w.generators) CHECK(contains(aut, g));
    CHECK(w.generator_mass == w.kappa);
    CHECK(w.matrix_routes_agree);
    CHECK(w.mertek.verdict == "verified");
    CHECK(w.verdict == "verified");
  }
  CHECK(found > 0);
}

TEST_CASE("bounds hold on random splits and verdicts re-derive") {
  InstanceGenerator gen(52);
  int nonvacuous = 0;
  for (int i = 0; i < 5000 && nonvacuous < 100; ++i) {
    const auto p = gen.presentation(3);
    const auto act = gen.action(p, gen.uniform(2, 10));
    const auto m = gen.symmetric_measure(p, 4, 2);
    const auto aut = SubgroupAutomaton::fold(p, gen.subgroup_generators(p, 3, 2));
    MertekReport r;
    try {
      r = mertek_decompose(act, m, aut);
    } catch (const DomainError&) {
      continue;
    }
    CHECK(rederive_verdicts(r).verdict == r.verdict);
    if (r.vacuous) continue;
    ++nonvacuous;
    CHECK(r.verdict == "verified");
    CHECK(static_cast<double>(r.components.size()) <= *r.count_bound + 1e-9);

    // Expansion inequality by direct subset enumeration on the exact inside matrix.
    const auto dense = dense_exact(r.inside_matrix);
    const auto n = dense.size();
    const double kappa = to_double(r.kappa);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      oracle::Q cut = 0;
      std::size_t k = 0;
      for (std::size_t x = 0; x < n; ++x) {
        if (!(mask >> x & 1)) continue;
        ++k;
        for (std::size_t y = 0; y < n; ++y) {
          if (!(mask >> y & 1)) cut += dense[x][y];
        }
      }
      const double y = static_cast<double>(k) / static_cast<double>(n);
      const double e = cut.get_d() / static_cast<double>(n);
      CHECK(e / y >= (kappa - r.rho) / kappa - y * (1.0 - r.rho) / kappa - 1e-9);
    }
  }
  CHECK(nonvacuous == 100);
}

TEST_CASE("a tampered report re-derives to violated") {
  const auto f2 = Presentation::free_group(2);
  const auto aut = SubgroupAutomaton::fold(f2, {parse_word("b", f2)});
  auto r = mertek_decompose(cyclic_action(f2, 4, {1, 2}), uniform_generators(f2), aut);
  r.smallset_violations = 1;
  CHECK(rederive_verdicts(r).verdict == "violated");
  r.smallset_violations = 0;
  r.components[0].rho_plus = 1.0;
  CHECK(rederive_verdicts(r).verdict == "violated");
}

TEST_CASE("tau certificate examples") {
  const auto f2 = Presentation::free_group(2);
  const auto aut = SubgroupAutomaton::fold(f2, {parse_word("a", f2)});
  const ActionChain two{{cyclic_action(f2, 2, {1, 1}), cyclic_action(f2, 4, {1, 1})}, {projection(4, 2)}};
  const auto c2 = tau_certificate(aut, two);
  CHECK(std::abs(c2.sup_rho) < 1e-10);
  CHECK(c2.valid);
  CHECK(c2.verdict == "valid");
  CHECK(c2.levels.size() == 2);
  CHECK(c2.levels[1].regular);

  const ActionChain three{{cyclic_action(f2, 2, {1, 1}), cyclic_action(f2, 4, {1, 1}), cyclic_action(f2, 8, {1, 1})},
                          {projection(4, 2), projection(8, 4)}};
  const auto c3 = tau_certificate(aut, three);
  CHECK(c3.sup_rho == doctest::Approx(std::cos(std::numbers::pi / 4)).epsilon(1e-9));
  CHECK(c3.witness.n == 18);
  CHECK(c3.valid);
  CHECK(c3.max_orbits == 1);
  for (const auto& lv : c3.levels) {
    CHECK(lv.regular);
    REQUIRE(lv.index);
    CHECK(*lv.index == lv.orbits.size());
  }

  const ActionChain broken{{cyclic_action(f2, 2, {1, 1}), cyclic_action(f2, 4, {1, 1})}, {{0, 0, 1, 1}}};
  CHECK_THROWS_AS(tau_certificate(aut, broken), InvalidInput);
}

TEST_CASE("ramanujan classification") {
  const auto f2 = Presentation::free_group(2);
  const auto swap = ramanujan_gap(uniform_generators(f2), {f2, 2, {{0, 1}, {1, 0}}}, 100);
  REQUIRE(swap.rho_plus);
  CHECK(std::abs(*swap.rho_plus) < 1e-10);
  CHECK(swap.classification == "ramanujan-or-better");
  CHECK(swap.lower <= std::sqrt(3.0) / 2 + 1e-12);

  const auto z = Presentation::free_group(1);
  const auto ring = ramanujan_gap(uniform_generators(z), cyclic_action(z, 100, {1}), 100);
  REQUIRE(ring.rho_plus);
  CHECK(*ring.rho_plus == doctest::Approx(std::cos(2 * std::numbers::pi / 100)).epsilon(1e-9));
  CHECK(ring.lower <= 1.0 + 1e-12);
  CHECK(ring.classification == (*ring.rho_plus <= ring.lower + 1e-3 ? "ramanujan-or-better" : "gap above rho"));

  const auto one = ramanujan_gap(uniform_generators(f2), {f2, 1, {{0}, {0}}}, 10);
  CHECK(one.trivial_action);
  CHECK(one.classification == "trivial action");
  CHECK_THROWS_AS(ramanujan_gap(dirac(f2, parse_word("a", f2)), {f2, 1, {{0}, {0}}}, 10), NonSymmetric);
}

TEST_CASE("corollary bounds") {
  CHECK(corollary_bounds(1.0, BoundVariant::Application) == doctest::Approx(1.0 - 1.0 / 512.0));
  CHECK(corollary_bounds(1.0, BoundVariant::Ize) == doctest::Approx(1.0 - 1.0 / 8192.0));
  CHECK(corollary_bounds(0.5, BoundVariant::Application) == doctest::Approx(1.0 - 1.0 / 8192.0));
  for (double bad : {0.0, -0.1, 1.5, std::numeric_limits<double>::quiet_NaN()}) {
    CHECK_THROWS_AS(corollary_bounds(bad, BoundVariant::Application), DomainError);
    CHECK_THROWS_AS(corollary_bounds(bad, BoundVariant::Ize), DomainError);
  }
  double prev_a = 1.0, prev_i = 1.0;
  for (int k = 1; k <= 1000; ++k) {
    const double v = k / 1000.0;
    const double a = corollary_bounds(v, BoundVariant::Application);
    const double i = corollary_bounds(v, BoundVariant::Ize);
    CHECK(a < 1.0);
    CHECK(a > 0.99);
    CHECK(a <= prev_a);
    CHECK(i <= prev_i);
    CHECK(i >= a);
    prev_a = a;
    prev_i = i;
  }
}

}  // TEST_SUITE
