#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace gapcert {

using Rational = mpq_class;
// The two-argument mpq_class constructor does not reduce; canonicalize after it.

/// Parses "p/q" or "p"; the result is canonicalized. Throws InvalidInput.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

}  // namespace gapcert
