#include <cmath>
#include <numeric>

#include "doctest.h"

#include "gapcert/errors.hpp"
#include "gapcert/instances.hpp"
#include "gapcert/spectral.hpp"
#include "helpers.hpp"

using namespace gapcert;
using testing_support::dense_exact;
using testing_support::pres;

namespace {

MarkovMatrix cycle(std::size_t n) {
  const auto z = Presentation::free_group(1);
  std::vector<std::uint32_t> shift(n);
  for (std::uint32_t x = 0; x < n; ++x) shift[x] = static_cast<std::uint32_t>((x + 1) % n);
  return markov_matrix({z, n, {shift}}, uniform_generators(z));
}

MarkovMatrix z4_circulant() {
  const auto f2 = Presentation::free_group(2);
  return markov_matrix({f2, 4, {{1, 2, 3, 0}, {2, 3, 0, 1}}}, uniform_generators(f2));
}

MarkovMatrix swap2() { return markov_matrix({pres({2}), 2, {{1, 0}}}, uniform_generators(pres({2}))); }

}  // namespace

TEST_SUITE("spectral-core") {

TEST_CASE("rho_plus examples") {
  CHECK(rho_plus(cycle(3)).rho_plus == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(rho_plus(identity_matrix(5)).rho_plus == doctest::Approx(1.0));
  CHECK(std::abs(rho_plus(z4_circulant()).rho_plus) < 1e-10);

  const auto f2 = Presentation::free_group(2);
  const FiniteAction three{f2, 3, {{1, 2, 0}, {0, 1, 2}}};
  CHECK_THROWS_AS(rho_plus(markov_matrix(three, dirac(f2, parse_word("a", f2)))), NonSymmetric);
  CHECK_THROWS_AS(rho_plus(identity_matrix(1)), DomainError);
}

TEST_CASE("rho_norm examples") {
  CHECK(rho_norm(cycle(3)) == doctest::Approx(0.5));
  CHECK(rho_norm(identity_matrix(3)) == doctest::Approx(1.0));
  CHECK(rho_norm(swap2()) == doctest::Approx(1.0));
}

TEST_CASE("essential top of spectrum by deflation") {
  const auto m = z4_circulant();
  CHECK(essential_rho_plus(m, 1) == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(essential_rho_plus(m, 0) == doctest::Approx(rho_plus(m).rho_plus).epsilon(1e-9));
  CHECK_THROWS(essential_rho_plus(m, 3));
}

TEST_CASE("boundary mass examples") {
  const auto c4 = cycle(4);
  CHECK(boundary_mass(c4, {0}) == Rational(1, 4));
  CHECK(boundary_mass(c4, {0, 1, 2, 3}) == 0);
  CHECK(boundary_mass(c4, {}) == 0);
}

TEST_CASE("cheeger examples") {
  const auto c4 = cheeger(cycle(4), CheegerMode::Exact);
  CHECK(c4.h == 1);
  CHECK(c4.certificate == std::vector<std::uint32_t>{0, 1});

  const auto f2 = Presentation::free_group(2);
  const FiniteAction z4{f2, 4, {{1, 2, 3, 0}, {2, 3, 0, 1}}};
  const auto b_only = markov_matrix(
      z4, mix(Rational(1, 2), dirac(f2, parse_word("b", f2)), dirac(f2, parse_word("b^-1", f2))));
  const auto split = cheeger(b_only, CheegerMode::Exact);
  CHECK(split.h == 0);
  CHECK(split.certificate == std::vector<std::uint32_t>{0, 2});

  const auto sw = cheeger(swap2(), CheegerMode::Exact);
  CHECK(sw.h == 2);
  CHECK(sw.certificate == std::vector<std::uint32_t>{0});

  CheegerOptions small;
  small.exact_limit = 3;
  CHECK_THROWS_AS(cheeger(cycle(4), CheegerMode::Exact, small), DomainError);
}

TEST_CASE("cheeger inequality examples") {
  const auto c4 = check_cheeger_inequalities(cycle(4));
  CHECK(c4.ok());
  CHECK(c4.lower_side == doctest::Approx(0.0));
  CHECK(c4.upper_side == doctest::Approx(1.0 - 1.0 / 8.0));

  const auto sw = check_cheeger_inequalities(swap2());
  CHECK(sw.ok());
  CHECK(sw.lower_side == doctest::Approx(-1.0));
  CHECK(sw.rho_plus == doctest::Approx(-1.0));

  const auto id = check_cheeger_inequalities(identity_matrix(4));
  CHECK(id.ok());
  CHECK(id.h == 0);
  CHECK(id.rho_plus == doctest::Approx(1.0));
}

TEST_CASE("exact Cheeger matches subset enumeration and is thread independent") {
  InstanceGenerator gen(41);
  for (int i = 0; i < 60; ++i) {
    const auto p = gen.presentation(3);
    const auto act = gen.action(p, gen.uniform(2, 10));
    const auto m = markov_matrix(act, gen.symmetric_measure(p, 3, 2));
    const auto one = cheeger(m, CheegerMode::Exact);
    CHECK(one.h == oracle::brute_cheeger(dense_exact(m)));
    CHECK(one.h == boundary_mass(m, one.certificate) * Rational(static_cast<long>(m.size() * m.size())) /
                       Rational(static_cast<long>(one.certificate.size() * (m.size() - one.certificate.size()))));
    CheegerOptions threaded;
    threaded.threads = 4;
    const auto four = cheeger(m, CheegerMode::Exact, threaded);
    CHECK(four.h == one.h);
    CHECK(four.certificate == one.certificate);
    CHECK(cheeger(m, CheegerMode::Sweep).h >= one.h);
  }
}

TEST_CASE("spectrum report invariants and the Jacobi oracle") {
  InstanceGenerator gen(42);
  for (int i = 0; i < 60; ++i) {
    const auto p = gen.presentation(3);
    const auto act = gen.action(p, gen.uniform(2, 64));
    const auto m = markov_matrix(act, gen.symmetric_measure(p, 3, 2));
    const auto r = rho_plus(m);
    CHECK(r.converged);
    const double sum = std::accumulate(r.witness.begin(), r.witness.end(), 0.0);
    CHECK(std::abs(sum) <= 1e-10);
    const auto dense = m.dense();
    const auto n = m.size();
    double rq = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) rq += r.witness[x] * dense[x * n + y] * r.witness[y];
    }
    CHECK(std::abs(rq - r.rho_plus) <= 1e-9);
    CHECK(-1.0 - 1e-12 <= r.rho_plus);
    CHECK(r.rho_plus <= r.rho_norm + 1e-9);
    CHECK(r.rho_norm <= 1.0 + 1e-12);
    CHECK(std::abs(r.rho_plus - oracle::mean_zero_top(dense, n)) <= 1e-9);
  }
}

TEST_CASE("norm identity against Jacobi on M M^T, including non-symmetric measures") {
  InstanceGenerator gen(43);
  for (int i = 0; i < 40; ++i) {
    const auto p = gen.presentation(3);
    const auto act = gen.action(p, gen.uniform(2, 12));
    const auto m = markov_matrix(act, gen.measure(p, 4, 2));
    const auto mmt = multiply(m, transpose(m));
    const double norm = rho_norm(m);
    CHECK(std::abs(norm * norm - oracle::mean_zero_top(mmt.dense(), m.size())) <= 1e-9);
  }
}

TEST_CASE("boundary mass is complement symmetric and subadditive") {
  InstanceGenerator gen(44);
  for (int i = 0; i < 6; ++i) {
    const auto p = gen.presentation(2);
    const auto act = gen.action(p, gen.uniform(2, 7));
    const auto m = markov_matrix(act, gen.symmetric_measure(p, 3, 2));
    const auto n = m.size();
    auto subset = [&](std::uint64_t mask) {
      std::vector<std::uint32_t> ys;
      for (std::uint32_t x = 0; x < n; ++x) {
        if (mask >> x & 1) ys.push_back(x);
      }
      return boundary_mass(m, ys);
    };
    const std::uint64_t all = (std::uint64_t{1} << n) - 1;
    for (std::uint64_t y = 0; y <= all; ++y) {
      CHECK(subset(y) == subset(all & ~y));
      for (std::uint64_t z = 0; z <= all; z += 3) {
        CHECK(subset(y & z) <= subset(y) + subset(z));
        CHECK(subset(y & ~z) <= subset(y) + subset(z));
      }
    }
  }
}

TEST_CASE("lazy identities") {
  InstanceGenerator gen(45);
  for (int i = 0; i < 30; ++i) {
    const auto p = gen.presentation(3);
    const auto act = gen.action(p, gen.uniform(2, 10));
    const auto s = gen.symmetric_measure(p, 3, 2);
    const auto m = markov_matrix(act, s);
    const auto lazy = markov_matrix(act, lazify(s));
    CHECK(std::abs(rho_plus(lazy).rho_plus - (0.5 + 0.5 * rho_plus(m).rho_plus)) <= 1e-9);
    CHECK(cheeger(lazy, CheegerMode::Exact).h * 2 == cheeger(m, CheegerMode::Exact).h);
  }
}

TEST_CASE("seeded runs are reproducible") {
  const auto m = z4_circulant();
  SpectrumOptions a, b;
  a.seed = b.seed = 9;
  const auto ra = rho_plus(m, a), rb = rho_plus(m, b);
  CHECK(ra.witness == rb.witness);
  CHECK(ra.iterations == rb.iterations);
}

}  // TEST_SUITE
