#include <cmath>

#include "doctest.h"

#include "gapcert/errors.hpp"
#include "gapcert/instances.hpp"
#include "gapcert/walk.hpp"
#include "helpers.hpp"

using namespace gapcert;
using testing_support::pres;
using testing_support::steps_of;
using testing_support::to_oracle;

TEST_SUITE("group-core") {

TEST_CASE("reduce_word cancels, wraps exponents and keeps the identity") {
  const auto f2 = Presentation::free_group(2);
  const std::vector<Syllable> raw{{0, 1}, {1, 1}, {1, -1}, {0, 1}};
  CHECK(format_word(reduce_word(raw, f2), f2) == "a^2");

  const auto z3z = pres({3, 0});
  const std::vector<Syllable> wrap{{0, 1}, {0, 1}, {0, 1}, {1, 1}};
  CHECK(format_word(reduce_word(wrap, z3z), z3z) == "b");

  CHECK(reduce_word({}, f2).is_identity());
  CHECK_THROWS_AS(reduce_word(std::vector<Syllable>{{5, 1}}, f2), InvalidInput);
}

TEST_CASE("reduce_word is idempotent and matches the stack oracle") {
  InstanceGenerator gen(11);
  for (int i = 0; i < 300; ++i) {
    const auto p = gen.presentation(3);
    std::vector<Syllable> raw;
    const auto len = gen.uniform(0, 8);
    for (std::uint64_t k = 0; k < len; ++k)
      raw.push_back({static_cast<std::uint32_t>(gen.uniform(0, p.rank() - 1)),
                     static_cast<std::int64_t>(gen.uniform(0, 8)) - 4});
    const auto w = reduce_word(raw, p);
    CHECK(reduce_word(w.syllables, p) == w);
    oracle::W o;
    for (const auto& s : raw) o.emplace_back(s.factor, s.exponent);
    CHECK(to_oracle(w) == oracle::reduce(o, p.orders()));
  }
}

TEST_CASE("words print and parse back") {
  const auto p = pres({0, 3, 2});
  for (const char* text : {"e", "a^2 b^2 c", "c a^-3 b", "a"}) {
    const auto w = parse_word(text, p);
    CHECK(format_word(w, p) == text);
  }
  CHECK(parse_word("a b b^-1 a^-1", p).is_identity());
  CHECK_THROWS_AS(parse_word("x", p), InvalidInput);
}

TEST_CASE("standard generators store order-2 generators once") {
  CHECK(standard_generators(pres({0, 2})).size() == 3);
  CHECK(standard_generators(pres({3})).size() == 2);
  CHECK(uniform_generators(pres({2})).size() == 1);
}

TEST_CASE("convolution examples") {
  const auto f2 = Presentation::free_group(2);
  const auto ab = convolve(dirac(f2, parse_word("a", f2)), dirac(f2, parse_word("b", f2)));
  CHECK(ab == dirac(f2, parse_word("a b", f2)));

  const auto z = Presentation::free_group(1);
  const auto l = uniform_generators(z);
  const auto l2 = convolve(l, l);
  CHECK(l2.size() == 3);
  CHECK(l2.weight(Word{}) == Rational(1, 2));
  CHECK(l2.weight(parse_word("a^2", z)) == Rational(1, 4));
  CHECK(l2.weight(parse_word("a^-2", z)) == Rational(1, 4));
  CHECK(l2.symmetric());

  const auto lf = uniform_generators(f2);
  CHECK(convolve(lf, lf).weight(Word{}) == Rational(1, 4));
}

TEST_CASE("convolution is associative and respects the support cap") {
  InstanceGenerator gen(12);
  for (int i = 0; i < 40; ++i) {
    const auto p = gen.presentation(3);
    const auto a = gen.measure(p, 3, 2), b = gen.measure(p, 3, 2), c = gen.measure(p, 3, 2);
    CHECK(convolve(convolve(a, b), c) == convolve(a, convolve(b, c)));
  }
  const auto f2 = Presentation::free_group(2);
  CHECK_THROWS_AS(convolution_power(uniform_generators(f2), 6, 100), CostCapExceeded);
}

TEST_CASE("lazify examples and the double lazy identity") {
  const auto f2 = Presentation::free_group(2);
  const auto lazy = lazify(uniform_generators(f2));
  CHECK(lazy.weight(Word{}) == Rational(1, 2));
  for (const char* g : {"a", "a^-1", "b", "b^-1"}) CHECK(lazy.weight(parse_word(g, f2)) == Rational(1, 8));
  CHECK(lazify(dirac(f2, Word{})) == dirac(f2, Word{}));

  const auto z = Presentation::free_group(1);
  const auto one = lazify(dirac(z, parse_word("a", z)));
  CHECK(one.weight(Word{}) == Rational(1, 2));
  CHECK(one.weight(parse_word("a", z)) == Rational(1, 2));

  InstanceGenerator gen(13);
  for (int i = 0; i < 50; ++i) {
    const auto p = gen.presentation(3);
    const auto m = gen.measure(p, 4, 2);
    const auto twice = lazify(lazify(m));
    CHECK(twice.weight(Word{}) == Rational(3, 4) + m.weight(Word{}) / 4);
    CHECK(lazify(m).symmetric() == m.symmetric());
  }
}

TEST_CASE("split_by_membership examples and reconstruction") {
  const auto f2 = Presentation::free_group(2);
  const auto in_a = [](const Word& w) {
    return std::all_of(w.syllables.begin(), w.syllables.end(), [](const Syllable& s) { return s.factor == 0; });
  };
  const auto l = uniform_generators(f2);
  const auto s = split_by_membership(l, in_a);
  CHECK(s.kappa == Rational(1, 2));
  REQUIRE(s.inside);
  REQUIRE(s.outside);
  CHECK(*s.inside == mix(Rational(1, 2), dirac(f2, parse_word("a", f2)), dirac(f2, parse_word("a^-1", f2))));
  CHECK(*s.outside == mix(Rational(1, 2), dirac(f2, parse_word("b", f2)), dirac(f2, parse_word("b^-1", f2))));

  const auto whole = split_by_membership(l, [](const Word&) { return true; });
  CHECK(whole.kappa == 1);
  CHECK(whole.degenerate());
  CHECK(!whole.outside);

  const auto lazy = lazify(l);
  CHECK(split_by_membership(convolve(lazy, lazy), in_a).kappa == Rational(19, 32));

  InstanceGenerator gen(14);
  for (int i = 0; i < 50; ++i) {
    const auto p = gen.presentation(3);
    const auto m = gen.measure(p, 5, 2);
    const auto split = split_by_membership(m, [](const Word& w) { return w.syllable_length() % 2 == 0; });
    if (split.degenerate()) continue;
    CHECK(mix(split.kappa, *split.inside, *split.outside) == m);
  }
}

TEST_CASE("return probability examples") {
  const auto f2 = Presentation::free_group(2);
  const auto l = uniform_generators(f2);
  CHECK(return_probability(l, 2) == Rational(1, 4));
  CHECK(return_probability(l, 1) == 0);
  CHECK(return_probability(uniform_generators(Presentation::free_group(1)), 2) == Rational(1, 2));
}

TEST_CASE("return probability equals brute-force enumeration up to n = 8") {
  InstanceGenerator gen(15);
  int compared = 0;
  for (int i = 0; i < 30; ++i) {
    const auto p = gen.presentation(2);
    const auto m = i % 3 == 2 ? gen.symmetric_measure(p, 2, 2) : gen.step_measure(p);
    const std::size_t n = m.size() <= 3 ? 8 : 6;
    const auto seq = return_sequence(m, n);
    for (std::size_t t = 0; t <= n; ++t) {
      const auto dist = oracle::enumerate_walk(steps_of(m), t, p.orders());
      const auto it = dist.find(oracle::W{});
      CHECK(seq[t] == (it == dist.end() ? Rational(0) : it->second));
    }
    ++compared;
  }
  CHECK(compared > 10);
}

TEST_CASE("returns are supermultiplicative for symmetric measures") {
  InstanceGenerator gen(16);
  for (int i = 0; i < 20; ++i) {
    const auto p = gen.presentation(3);
    const auto m = gen.step_measure(p);
    const auto seq = return_sequence(m, 12);
    for (std::size_t a = 1; a <= 3; ++a) {
      for (std::size_t b = 1; b <= 3; ++b) CHECK(seq[2 * a + 2 * b] >= seq[2 * a] * seq[2 * b]);
    }
  }
}

TEST_CASE("radius estimates") {
  const auto z = Presentation::free_group(1);
  const auto ez = radius_estimate(uniform_generators(z), 300);
  CHECK(ez.ratio_sequence.back() >= 0.99);
  CHECK(ez.monotone);

  const auto f2 = Presentation::free_group(2);
  const auto point = radius_estimate(dirac(f2, Word{}), 2);
  CHECK(point.lower == doctest::Approx(1.0));

  CHECK_THROWS_AS(radius_estimate(dirac(f2, parse_word("a", f2)), 4), NonSymmetric);
  CHECK_THROWS_AS(radius_estimate(uniform_generators(f2), 3), InvalidInput);
}

TEST_CASE("free group radius matches the distance-chain oracle") {
  for (std::size_t k : {2u, 3u}) {
    const auto est = radius_estimate(uniform_generators(Presentation::free_group(k)), 200);
    const auto ref = oracle::free_group_returns(k, 200);
    for (std::size_t t = 0; t <= 200; t += 2) CHECK(est.returns[t] == doctest::Approx(ref[t]).epsilon(1e-10));
    const double kesten = std::sqrt(2.0 * k - 1.0) / static_cast<double>(k);
    CHECK(est.lower <= kesten + 1e-12);
    CHECK(std::abs(est.ratio_estimate - kesten) < 1e-3);
  }
}

}  // TEST_SUITE
