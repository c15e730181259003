#include "gapcert/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace gapcert {

namespace {

std::string join(const std::string& field, std::string_view key) {
  return field.empty() ? std::string(key) : field + "." + std::string(key);
}

std::string at_index(const std::string& field, std::size_t i) { return field + "[" + std::to_string(i) + "]"; }

const Json& require(const Json& j, std::string_view key, const std::string& field) {
  if (!j.is_object()) throw FieldError(field, "expected an object");
  auto it = j.find(std::string(key));
  if (it == j.end()) throw FieldError(join(field, key), "missing");
  return *it;
}

std::uint64_t unsigned_from(const Json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw FieldError(field, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::vector<std::uint32_t> index_list(const Json& j, const std::string& field) {
  if (!j.is_array()) throw FieldError(field, "expected an array of point indices");
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto v = unsigned_from(j[i], at_index(field, i));
    if (v > UINT32_MAX) throw FieldError(at_index(field, i), "index too large");
    out.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

Json optional_number(const std::optional<double>& x) { return x ? number(*x) : Json(nullptr); }

std::optional<double> optional_double(const Json& j, const std::string& field) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_number()) throw FieldError(field, "expected a number or null");
  return j.get<double>();
}

double double_from(const Json& j, const std::string& field) {
  if (!j.is_number()) throw FieldError(field, "expected a number");
  return j.get<double>();
}

bool bool_from(const Json& j, const std::string& field) {
  if (!j.is_boolean()) throw FieldError(field, "expected true or false");
  return j.get<bool>();
}

Json words_to_json(const std::vector<Word>& words, const Presentation& p) {
  Json out = Json::array();
  for (const auto& w : words) out.push_back(to_json(w, p));
  return out;
}

}  // namespace

Json parse_json_text(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const auto stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw InvalidInput(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(column) +
                       ": JSON syntax error");
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

Json number(double x) {
  if (!std::isfinite(x)) return Json(nullptr);
  return Json(round12(x));
}

Json to_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const Json& j, const std::string& field) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    throw FieldError(field, e.what());
  }
  throw FieldError(field, "expected a rational string \"p/q\" or an integer");
}

Presentation presentation_from_json(const Json& j, const std::string& field) {
  if (j.is_number_integer()) {
    const auto rank = unsigned_from(j, field);
    if (rank == 0 || rank > 26) throw FieldError(field, "free group rank must lie in [1, 26]");
    return Presentation::free_group(rank);
  }
  if (!j.is_array() || j.empty()) throw FieldError(field, "expected a rank or a nonempty array of factors");
  std::vector<std::uint32_t> orders;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto f = at_index(field, i);
    if (j[i].is_string()) {
      names.push_back(j[i].get<std::string>());
      orders.push_back(0);
      continue;
    }
    require_keys(j[i], {"name", "order"}, f);
    const auto& name = require(j[i], "name", f);
    if (!name.is_string()) throw FieldError(join(f, "name"), "expected a string");
    names.push_back(name.get<std::string>());
    const auto order = j[i].contains("order") ? unsigned_from(j[i]["order"], join(f, "order")) : 0;
    if (order == 1 || order > UINT32_MAX) throw FieldError(join(f, "order"), "order must be 0 or at least 2");
    orders.push_back(static_cast<std::uint32_t>(order));
  }
  try {
    return Presentation(std::move(orders), std::move(names));
  } catch (const Error& e) {
    throw FieldError(field, e.what());
  }
}

Json to_json(const Presentation& p) {
  Json out = Json::array();
  for (std::size_t f = 0; f < p.rank(); ++f) out.push_back({{"name", p.name(f)}, {"order", p.order(f)}});
  return out;
}

Word word_from_json(const Json& j, const Presentation& p, const std::string& field) {
  if (!j.is_string()) throw FieldError(field, "expected a word string such as \"a^2 b^-1\"");
  try {
    return parse_word(j.get<std::string>(), p);
  } catch (const Error& e) {
    throw FieldError(field, e.what());
  }
}

Json to_json(const Word& w, const Presentation& p) { return format_word(w, p); }

Measure measure_from_json(const Json& j, const Presentation& p, const std::string& field) {
  if (j.is_string()) {
    const auto kind = j.get<std::string>();
    if (kind == "uniform") return uniform_generators(p);
    if (kind == "lazy-uniform") return lazify(uniform_generators(p));
    throw FieldError(field, "expected \"uniform\", \"lazy-uniform\" or an object of weights");
  }
  if (!j.is_object() || j.empty()) throw FieldError(field, "expected a nonempty object mapping words to weights");
  Measure::Atoms atoms;
  for (const auto& [key, value] : j.items()) {
    const auto f = join(field, key);
    const auto w = word_from_json(Json(key), p, f);
    if (atoms.count(w)) throw FieldError(f, "word repeats an earlier atom after reduction");
    atoms[w] = rational_from_json(value, f);
  }
  try {
    return Measure(p, std::move(atoms));
  } catch (const Error& e) {
    throw FieldError(field, e.what());
  }
}

Json to_json(const Measure& m) {
  Json atoms = Json::object();
  for (const auto& [w, r] : m.atoms()) atoms[format_word(w, m.presentation())] = to_json(r);
  return atoms;
}

FiniteAction action_from_json(const Json& j, const Presentation& p, const std::string& field) {
  require_keys(j, {"points", "generators"}, field);
  FiniteAction act{p, unsigned_from(require(j, "points", field), join(field, "points")), {}};
  const auto& gens = require(j, "generators", field);
  const auto gfield = join(field, "generators");
  if (!gens.is_object()) throw FieldError(gfield, "expected an object keyed by generator name");
  for (const auto& [key, value] : gens.items()) {
    if (!p.find(key)) throw FieldError(join(gfield, key), "unknown generator");
  }
  for (std::size_t f = 0; f < p.rank(); ++f) {
    auto it = gens.find(p.name(f));
    if (it == gens.end()) throw FieldError(join(gfield, p.name(f)), "missing");
    act.perms.push_back(index_list(*it, join(gfield, p.name(f))));
  }
  const auto report = validate_action(act);
  if (!report.ok()) throw FieldError(field, report.violations.front());
  return act;
}

Json to_json(const FiniteAction& act) {
  Json gens = Json::object();
  for (std::size_t f = 0; f < act.perms.size(); ++f) gens[act.presentation.name(f)] = act.perms[f];
  return {{"points", act.points}, {"generators", gens}};
}

ActionChain chain_from_json(const Json& j, const Presentation& p, const std::string& field) {
  require_keys(j, {"levels", "projections"}, field);
  ActionChain chain;
  const auto& levels = require(j, "levels", field);
  if (!levels.is_array() || levels.empty()) throw FieldError(join(field, "levels"), "expected a nonempty array");
  for (std::size_t i = 0; i < levels.size(); ++i)
    chain.levels.push_back(action_from_json(levels[i], p, at_index(join(field, "levels"), i)));
  const auto pfield = join(field, "projections");
  const Json empty = Json::array();
  const auto& projections = j.contains("projections") ? j["projections"] : empty;
  if (!projections.is_array()) throw FieldError(pfield, "expected an array");
  for (std::size_t i = 0; i < projections.size(); ++i)
    chain.projections.push_back(index_list(projections[i], at_index(pfield, i)));
  const auto report = validate_chain(chain);
  if (!report.ok()) throw FieldError(field, "invalid chain: " + report.violations.front());
  return chain;
}

Json to_json(const ActionChain& chain) {
  Json levels = Json::array();
  for (const auto& level : chain.levels) levels.push_back(to_json(level));
  return {{"levels", levels}, {"projections", chain.projections}};
}

SubgroupAutomaton subgroup_from_json(const Json& j, const Presentation& p, const std::string& field) {
  if (j.is_string() && j.get<std::string>() == "trivial") return SubgroupAutomaton::trivial(p);
  if (!j.is_array()) throw FieldError(field, "expected \"trivial\" or an array of generator words");
  std::vector<Word> gens;
  for (std::size_t i = 0; i < j.size(); ++i) gens.push_back(word_from_json(j[i], p, at_index(field, i)));
  return SubgroupAutomaton::fold(p, gens);
}

Json to_json(const SubgroupAutomaton& aut) {
  const auto& p = aut.presentation();
  Json edges = Json::array();
  for (const auto& e : aut.edges()) edges.push_back({e.from, p.name(e.factor), e.to});
  return {{"generators", words_to_json(aut.generators(), p)},
          {"trivial", aut.trivial_mode()},
          {"states", aut.state_count()},
          {"base", SubgroupAutomaton::kBase},
          {"edges", edges},
          {"complete", aut.complete()}};
}

Json to_json(const Partition& partition) { return partition; }

Json to_json(const MarkovMatrix& m) {
  Json rows = Json::array();
  for (const auto& row : m.rows()) {
    Json r = Json::array();
    for (const auto& [y, w] : row) r.push_back({y, to_json(w)});
    rows.push_back(std::move(r));
  }
  return rows;
}

MarkovMatrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) throw FieldError(field, "expected an array of sparse rows");
  std::vector<MarkovMatrix::Row> rows;
  for (std::size_t x = 0; x < j.size(); ++x) {
    const auto rf = at_index(field, x);
    if (!j[x].is_array()) throw FieldError(rf, "expected an array of [column, weight] pairs");
    MarkovMatrix::Row row;
    for (std::size_t k = 0; k < j[x].size(); ++k) {
      const auto& e = j[x][k];
      const auto ef = at_index(rf, k);
      if (!e.is_array() || e.size() != 2) throw FieldError(ef, "expected [column, weight]");
      row.emplace_back(static_cast<std::uint32_t>(unsigned_from(e[0], ef)), rational_from_json(e[1], ef));
    }
    rows.push_back(std::move(row));
  }
  try {
    return MarkovMatrix(std::move(rows));
  } catch (const Error& e) {
    throw FieldError(field, e.what());
  }
}

Json to_json(const SpectrumReport& r) {
  Json witness = Json::array();
  for (double x : r.witness) witness.push_back(number(x));
  return {{"rho_plus", number(r.rho_plus)},
          {"rho_norm", number(r.rho_norm)},
          {"iterations", r.iterations},
          {"residual", number(r.residual)},
          {"converged", r.converged},
          {"dense_rho_plus", optional_number(r.dense_rho_plus)},
          {"cross_check_ok", r.cross_check_ok()},
          {"witness", witness}};
}

Json to_json(const CheegerReport& r) {
  Json profile = Json::array();
  for (const auto& h : r.profile) profile.push_back(to_json(h));
  Json out = {{"mode", r.mode == CheegerMode::Exact ? "exact" : "sweep"},
              {"h", to_json(r.h)},
              {"h_float", number(to_double(r.h))},
              {"certificate", r.certificate}};
  if (r.mode == CheegerMode::Sweep) out["profile"] = profile;
  return out;
}

Json to_json(const CheegerCheck& r) {
  return {{"mode", r.mode == CheegerMode::Exact ? "exact" : "sweep"},
          {"h", to_json(r.h)},
          {"rho_plus", number(r.rho_plus)},
          {"lower_side", number(r.lower_side)},
          {"upper_side", number(r.upper_side)},
          {"lower_ok", r.lower_ok},
          {"upper_checked", r.upper_checked},
          {"upper_ok", r.upper_ok},
          {"ok", r.ok()}};
}

Json to_json(const RadiusEstimate& r) {
  auto list = [](const std::vector<double>& xs) {
    Json out = Json::array();
    for (double x : xs) out.push_back(number(x));
    return out;
  };
  return {{"n_max", r.n_max},
          {"lower", number(r.lower)},
          {"ratio_estimate", number(r.ratio_estimate)},
          {"ratio_last", r.ratio_sequence.empty() ? Json(nullptr) : number(r.ratio_sequence.back())},
          {"monotone", r.monotone},
          {"root_bounds", list(r.root_bounds)},
          {"ratio_sequence", list(r.ratio_sequence)},
          {"rayleigh", list(r.rayleigh)}};
}

Json to_json(const MertekReport& r) {
  Json components = Json::array();
  for (const auto& c : r.components) {
    components.push_back({{"points", c.points},
                          {"mass", to_json(c.mass)},
                          {"rho_plus", optional_number(c.rho_plus)},
                          {"gap_ok", c.gap_ok}});
  }
  return {{"kappa", to_json(r.kappa)},
          {"rho", number(r.rho)},
          {"degenerate", r.degenerate},
          {"vacuous", r.vacuous},
          {"count_bound", optional_number(r.count_bound)},
          {"min_mass_bound", optional_number(r.min_mass_bound)},
          {"smallset_threshold", optional_number(r.smallset_threshold)},
          {"smallset_rate", optional_number(r.smallset_rate)},
          {"component_count", r.components.size()},
          {"components", components},
          {"count_ok", r.count_ok},
          {"mass_ok", r.mass_ok},
          {"gaps_ok", r.gaps_ok},
          {"exhaustive_checked", r.exhaustive_checked},
          {"smallset_sets", r.smallset_sets},
          {"smallset_violations", r.smallset_violations},
          {"exp_violations", r.exp_violations},
          {"verdict", r.verdict},
          {"inside_matrix", to_json(r.inside_matrix)}};
}

MertekReport mertek_from_json(const Json& j, const std::string& field) {
  MertekReport r;
  r.kappa = rational_from_json(require(j, "kappa", field), join(field, "kappa"));
  r.rho = double_from(require(j, "rho", field), join(field, "rho"));
  r.degenerate = bool_from(require(j, "degenerate", field), join(field, "degenerate"));
  r.vacuous = bool_from(require(j, "vacuous", field), join(field, "vacuous"));
  r.count_bound = optional_double(require(j, "count_bound", field), join(field, "count_bound"));
  r.min_mass_bound = optional_double(require(j, "min_mass_bound", field), join(field, "min_mass_bound"));
  r.smallset_threshold = optional_double(require(j, "smallset_threshold", field), join(field, "smallset_threshold"));
  r.smallset_rate = optional_double(require(j, "smallset_rate", field), join(field, "smallset_rate"));
  const auto& comps = require(j, "components", field);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto cf = at_index(join(field, "components"), i);
    ComponentReport c;
    c.points = index_list(require(comps[i], "points", cf), join(cf, "points"));
    c.mass = rational_from_json(require(comps[i], "mass", cf), join(cf, "mass"));
    c.rho_plus = optional_double(require(comps[i], "rho_plus", cf), join(cf, "rho_plus"));
    c.gap_ok = bool_from(require(comps[i], "gap_ok", cf), join(cf, "gap_ok"));
    r.components.push_back(std::move(c));
  }
  r.count_ok = bool_from(require(j, "count_ok", field), join(field, "count_ok"));
  r.mass_ok = bool_from(require(j, "mass_ok", field), join(field, "mass_ok"));
  r.gaps_ok = bool_from(require(j, "gaps_ok", field), join(field, "gaps_ok"));
  r.exhaustive_checked = bool_from(require(j, "exhaustive_checked", field), join(field, "exhaustive_checked"));
  r.smallset_sets = unsigned_from(require(j, "smallset_sets", field), join(field, "smallset_sets"));
  r.smallset_violations = unsigned_from(require(j, "smallset_violations", field), join(field, "smallset_violations"));
  r.exp_violations = unsigned_from(require(j, "exp_violations", field), join(field, "exp_violations"));
  const auto& verdict = require(j, "verdict", field);
  if (!verdict.is_string()) throw FieldError(join(field, "verdict"), "expected a string");
  r.verdict = verdict.get<std::string>();
  r.inside_matrix = matrix_from_json(require(j, "inside_matrix", field), join(field, "inside_matrix"));
  return r;
}

Json to_json(const WitnessReport& r, const Presentation& p) {
  Json search = Json::array();
  for (const auto& s : r.search)
    search.push_back({{"n", s.n}, {"coset_mass", to_json(s.coset_mass)}, {"spectral_power", number(s.spectral_power)}});
  return {{"n", r.n},
          {"kappa", to_json(r.kappa)},
          {"rho", number(r.rho)},
          {"lazy_rho", number(r.lazy_rho)},
          {"lazy_measure", r.lazy ? to_json(*r.lazy) : Json(nullptr)},
          {"support_size", r.support_size},
          {"search", search},
          {"generators", r.generators ? words_to_json(*r.generators, p) : Json(nullptr)},
          {"generator_count", r.generator_count},
          {"generator_mass", r.generators ? to_json(r.generator_mass) : Json(nullptr)},
          {"generators_in_subgroup", r.generators_in_subgroup},
          {"generator_mass_matches", r.generator_mass_matches},
          {"matrix_routes_agree", r.matrix_routes_agree},
          {"precondition",
           {{"relative_radius_lower", number(r.relative_lower)},
            {"standard_rho_plus", number(r.standard_rho)},
            {"certified", r.precondition_certified}}},
          {"mertek", to_json(r.mertek)},
          {"verdict", r.verdict}};
}

Json to_json(const TauCertificate& r, const Presentation& p) {
  Json levels = Json::array();
  for (const auto& lv : r.levels) {
    Json orbit_rho = Json::array();
    for (const auto& x : lv.orbit_rho) orbit_rho.push_back(optional_number(x));
    levels.push_back({{"points", lv.points},
                      {"level_rho_plus", number(lv.level_rho)},
                      {"orbit_count", lv.orbits.size()},
                      {"orbits", to_json(lv.orbits)},
                      {"orbit_rho_plus", orbit_rho},
                      {"max_orbit_rho_plus", number(lv.max_orbit_rho)},
                      {"regular", lv.regular},
                      {"index", lv.index ? Json(*lv.index) : Json(nullptr)},
                      {"ok", lv.ok}});
  }
  return {{"sup_rho_plus", number(r.sup_rho)},
          {"levels", levels},
          {"max_orbits", r.max_orbits},
          {"uniform_gap", number(r.uniform_gap)},
          {"count_bound", number(r.count_bound)},
          {"valid", r.valid},
          {"verdict", r.verdict},
          {"witness", to_json(r.witness, p)}};
}

Json to_json(const RamanujanReport& r) {
  return {{"trivial_action", r.trivial_action},
          {"rho_plus", optional_number(r.rho_plus)},
          {"radius_lower", number(r.lower)},
          {"tolerance", number(r.tolerance)},
          {"classification", r.classification}};
}

void require_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& field) {
  if (!j.is_object()) throw FieldError(field.empty() ? "<root>" : field, "expected an object");
  const std::set<std::string_view> keys(allowed);
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw FieldError(join(field, key), "unknown key");
  }
}

}  // namespace gapcert
