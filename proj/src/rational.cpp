#include "gapcert/rational.hpp"

#include <cctype>

#include "gapcert/errors.hpp"

namespace gapcert {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw InvalidInput("empty rational");
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+'))
      throw InvalidInput("malformed rational '" + s + "'");
  }
  if (s.front() == '+') s.erase(0, 1);
  Rational r;
  if (r.set_str(s, 10) != 0) throw InvalidInput("malformed rational '" + std::string(text) + "'");
  if (r.get_den() == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& value) { return value.get_str(10); }

double to_double(const Rational& value) { return value.get_d(); }

}  // namespace gapcert
