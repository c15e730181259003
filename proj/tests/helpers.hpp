#pragma once

#include "gapcert/action.hpp"
#include "gapcert/group.hpp"
#include "gapcert/measure.hpp"
#include "oracles.hpp"

namespace testing_support {

inline oracle::W to_oracle(const gapcert::Word& w) {
  oracle::W out;
  for (const auto& s : w.syllables) out.emplace_back(s.factor, s.exponent);
  return out;
}

inline gapcert::Word from_oracle(const oracle::W& w) {
  gapcert::Word out;
  for (const auto& [f, e] : w) out.syllables.push_back({f, e});
  return out;
}

inline std::vector<std::pair<oracle::W, oracle::Q>> steps_of(const gapcert::Measure& m) {
  std::vector<std::pair<oracle::W, oracle::Q>> out;
  for (const auto& [w, r] : m.atoms()) out.emplace_back(to_oracle(w), r);
  return out;
}

inline std::vector<std::vector<oracle::Q>> dense_exact(const gapcert::MarkovMatrix& m) {
  std::vector<std::vector<oracle::Q>> out(m.size(), std::vector<oracle::Q>(m.size(), 0));
  for (std::size_t x = 0; x < m.size(); ++x) {
    for (const auto& [y, w] : m.rows()[x]) out[x][y] = w;
  }
  return out;
}

inline gapcert::Presentation pres(std::vector<std::uint32_t> orders) { return gapcert::Presentation(std::move(orders)); }

}  // namespace testing_support
