#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "gapcert/action.hpp"
#include "gapcert/automaton.hpp"
#include "gapcert/errors.hpp"
#include "gapcert/measure.hpp"
#include "gapcert/spectral.hpp"
#include "gapcert/theorem.hpp"
#include "gapcert/walk.hpp"

namespace gapcert {

/// Insertion-ordered, so emitted reports keep a fixed key order.
using Json = nlohmann::ordered_json;

inline constexpr std::string_view kReportSchema = "gapcert.report/1";
inline constexpr std::string_view kProblemSchema = "gapcert.problem/1";

/// Config error carrying the dotted path of the offending field.
class FieldError : public InvalidInput {
 public:
  FieldError(std::string field, const std::string& message)
      : InvalidInput("field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Parses JSON text; syntax errors become InvalidInput with line and column.
Json parse_json_text(std::string_view text, std::string_view source);
/// Two-space indent, trailing newline.
std::string dump(const Json& j);

/// Rounds to 12 significant digits; -0 becomes 0.
double round12(double x);
Json number(double x);

Json to_json(const Rational& r);
Rational rational_from_json(const Json& j, const std::string& field);

/// Accepts an integer k (free group of rank k) or an array whose entries are
/// a name (order 0) or {"name", "order"}.
Presentation presentation_from_json(const Json& j, const std::string& field);
Json to_json(const Presentation& p);

Word word_from_json(const Json& j, const Presentation& p, const std::string& field);
Json to_json(const Word& w, const Presentation& p);

/// "uniform", "lazy-uniform", or an object mapping words to weights.
Measure measure_from_json(const Json& j, const Presentation& p, const std::string& field);
Json to_json(const Measure& m);

/// {"points": N, "generators": {"a": [perm], ...}}; every generator required.
FiniteAction action_from_json(const Json& j, const Presentation& p, const std::string& field);
Json to_json(const FiniteAction& act);

/// {"levels": [action, ...], "projections": [[...], ...]}.
ActionChain chain_from_json(const Json& j, const Presentation& p, const std::string& field);
Json to_json(const ActionChain& chain);

/// "trivial" or an array of generator words.
SubgroupAutomaton subgroup_from_json(const Json& j, const Presentation& p, const std::string& field);
Json to_json(const SubgroupAutomaton& aut);

Json to_json(const Partition& partition);
Json to_json(const MarkovMatrix& m);
MarkovMatrix matrix_from_json(const Json& j, const std::string& field);

Json to_json(const SpectrumReport& r);
Json to_json(const CheegerReport& r);
Json to_json(const CheegerCheck& r);
Json to_json(const RadiusEstimate& r);
Json to_json(const MertekReport& r);
MertekReport mertek_from_json(const Json& j, const std::string& field);
Json to_json(const WitnessReport& r, const Presentation& p);
Json to_json(const TauCertificate& r, const Presentation& p);
Json to_json(const RamanujanReport& r);

/// Rejects keys outside `allowed` in object j.
void require_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& field);

}  // namespace gapcert
