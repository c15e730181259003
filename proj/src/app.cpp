#include "gapcert/app.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "gapcert/selfcheck.hpp"

namespace gapcert {

namespace {

constexpr std::size_t kDefaultRadiusNMax = 100;
constexpr std::size_t kDefaultWitnessNMax = 32;

// Keys that describe where output goes, not what is computed; kept out of the echoed input.
constexpr std::string_view kPlumbingKeys[] = {"output", "tsv", "threads", "schema"};

struct Parameters {
  std::string operation;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t n_max = 0;
  std::size_t support_cap = kDefaultSupportCap;
  std::size_t state_cap = kDefaultStateCap;
  std::size_t ball_cap = WitnessOptions{}.ball_cap;
  std::size_t radius_n_max = WitnessOptions{}.radius_n_max;
  std::size_t exact_cheeger_limit = CheegerOptions{}.exact_limit;
  std::size_t exhaustive_limit = MertekOptions{}.exhaustive_limit;
  double tolerance = 1e-3;
  std::string engine = "auto";
  std::string cheeger_mode = "auto";

  SpectrumOptions spectrum() const {
    SpectrumOptions s;
    s.seed = seed;
    return s;
  }
  CosetOptions coset() const {
    CosetOptions c;
    c.state_cap = state_cap;
    c.engine = engine == "excursion" ? CosetEngine::Excursion
               : engine == "generic" ? CosetEngine::Generic
                                     : CosetEngine::Auto;
    return c;
  }
  CheegerOptions cheeger() const {
    CheegerOptions c;
    c.exact_limit = exact_cheeger_limit;
    c.threads = threads;
    c.spectrum = spectrum();
    return c;
  }
  WitnessOptions witness() const {
    WitnessOptions w;
    w.n_max = n_max;
    w.ball_cap = ball_cap;
    w.radius_n_max = radius_n_max;
    w.mertek.exhaustive_limit = exhaustive_limit;
    w.mertek.spectrum = spectrum();
    w.coset = coset();
    return w;
  }
  Json to_json() const {
    return {{"seed", seed},
            {"n_max", n_max},
            {"support_cap", support_cap},
            {"state_cap", state_cap},
            {"ball_cap", ball_cap},
            {"radius_n_max", radius_n_max},
            {"exact_cheeger_limit", exact_cheeger_limit},
            {"exhaustive_limit", exhaustive_limit},
            {"tolerance", number(tolerance)},
            {"engine", engine},
            {"cheeger_mode", cheeger_mode}};
  }
};

std::size_t size_field(const Json& config, std::string_view key, std::size_t fallback) {
  auto it = config.find(std::string(key));
  if (it == config.end()) return fallback;
  if (!it->is_number_unsigned()) throw FieldError(std::string(key), "expected a nonnegative integer");
  return it->get<std::size_t>();
}

std::string string_field(const Json& config, std::string_view key, std::string fallback,
                         std::initializer_list<std::string_view> choices) {
  auto it = config.find(std::string(key));
  if (it == config.end()) return fallback;
  if (!it->is_string()) throw FieldError(std::string(key), "expected a string");
  const auto value = it->get<std::string>();
  for (auto c : choices) {
    if (value == c) return value;
  }
  std::string list;
  for (auto c : choices) list += (list.empty() ? "" : ", ") + std::string(c);
  throw FieldError(std::string(key), "expected one of " + list);
}

Parameters read_parameters(const Json& config, const std::string& operation, const RunOptions& opts) {
  Parameters p;
  p.operation = operation;
  const bool witness_like = operation == "witness" || operation == "tau";
  p.seed = size_field(config, "seed", 1);
  p.threads = size_field(config, "threads", 1);
  p.n_max = size_field(config, "n_max", witness_like ? kDefaultWitnessNMax : kDefaultRadiusNMax);
  p.support_cap = size_field(config, "support_cap", p.support_cap);
  p.state_cap = size_field(config, "state_cap", p.state_cap);
  p.ball_cap = size_field(config, "ball_cap", p.ball_cap);
  p.radius_n_max = size_field(config, "radius_n_max", p.radius_n_max);
  p.exact_cheeger_limit = size_field(config, "exact_cheeger_limit", p.exact_cheeger_limit);
  p.exhaustive_limit = size_field(config, "exhaustive_limit", p.exhaustive_limit);
  if (auto it = config.find("tolerance"); it != config.end()) {
    if (!it->is_number() || it->get<double>() < 0) throw FieldError("tolerance", "expected a nonnegative number");
    p.tolerance = it->get<double>();
  }
  p.engine = string_field(config, "engine", "auto", {"auto", "excursion", "generic"});
  p.cheeger_mode = string_field(config, "cheeger_mode", "auto", {"auto", "exact", "sweep"});
  if (opts.seed) p.seed = *opts.seed;
  if (opts.threads) p.threads = *opts.threads;
  if (opts.n_max) p.n_max = *opts.n_max;
  if (opts.exact_cheeger_limit) p.exact_cheeger_limit = *opts.exact_cheeger_limit;
  if (p.threads == 0) throw FieldError("threads", "must be at least 1");
  if (p.exact_cheeger_limit > 30) throw FieldError("exact_cheeger_limit", "at most 30");
  return p;
}

struct Context {
  const Json& config;
  Parameters params;
  std::optional<Presentation> pres;

  const Presentation& presentation() {
    if (!pres) {
      auto it = config.find("presentation");
      if (it == config.end()) throw FieldError("presentation", "missing");
      pres = presentation_from_json(*it, "presentation");
    }
    return *pres;
  }
  const Json& field(std::string_view key) const {
    auto it = config.find(std::string(key));
    if (it == config.end()) throw FieldError(std::string(key), "missing");
    return *it;
  }
  bool has(std::string_view key) const { return config.contains(std::string(key)); }
  Measure measure() {
    return has("measure") ? measure_from_json(field("measure"), presentation(), "measure")
                          : uniform_generators(presentation());
  }
  FiniteAction action() { return action_from_json(field("action"), presentation(), "action"); }
  SubgroupAutomaton subgroup() { return subgroup_from_json(field("subgroup"), presentation(), "subgroup"); }
};

// Result of one operation before it is wrapped into a report.
struct OpResult {
  std::string status;  // "computed", "verified", "inconclusive", "violated"
  Json result;
  std::string tsv;
  std::string summary;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", round12(x));
  return buf;
}

std::string tsv_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "\t" : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << row[i];
    out << "\n";
  }
  return out.str();
}

int exit_for(const std::string& status) {
  if (status == "computed" || status == "verified") return kExitOk;
  if (status == "inconclusive") return kExitInconclusive;
  return kExitError;
}

OpResult op_reduce(Context& ctx) {
  const auto& p = ctx.presentation();
  Word w;
  if (ctx.has("syllables")) {
    const auto& raw = ctx.field("syllables");
    if (!raw.is_array()) throw FieldError("syllables", "expected an array of [generator, exponent] pairs");
    std::vector<Syllable> syllables;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto f = "syllables[" + std::to_string(i) + "]";
      const auto& s = raw[i];
      if (!s.is_array() || s.size() != 2 || !s[0].is_string() || !s[1].is_number_integer())
        throw FieldError(f, "expected [generator name, integer exponent]");
      const auto factor = p.find(s[0].get<std::string>());
      if (!factor) throw FieldError(f, "unknown generator '" + s[0].get<std::string>() + "'");
      syllables.push_back({static_cast<std::uint32_t>(*factor), s[1].get<std::int64_t>()});
    }
    w = reduce_word(syllables, p);
  } else {
    w = word_from_json(ctx.field("word"), p, "word");
  }
  Json syl = Json::array();
  for (const auto& s : w.syllables) syl.push_back({p.name(s.factor), s.exponent});
  OpResult r{"computed",
             {{"word", to_json(w, p)},
              {"syllables", syl},
              {"letter_length", letter_length(w, p)},
              {"identity", w.is_identity()}},
             {},
             "reduced: " + format_word(w, p) + "\n"};
  return r;
}

OpResult op_convolve(Context& ctx) {
  const auto& p = ctx.presentation();
  const auto cap = ctx.params.support_cap;
  std::optional<Measure> out;
  if (ctx.has("measures")) {
    const auto& list = ctx.field("measures");
    if (!list.is_array() || list.empty()) throw FieldError("measures", "expected a nonempty array of measures");
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto m = measure_from_json(list[i], p, "measures[" + std::to_string(i) + "]");
      out = out ? convolve(*out, m, cap) : m;
    }
  } else {
    out = ctx.measure();
  }
  const auto power = size_field(ctx.config, "power", 1);
  if (power != 1) out = convolution_power(*out, power, cap);
  std::vector<std::vector<std::string>> rows;
  for (const auto& [w, r] : out->atoms()) rows.push_back({format_word(w, p), to_string(r)});
  return {"computed",
          {{"atoms", out->size()},
           {"symmetric", out->symmetric()},
           {"identity_mass", to_json(out->weight(Word{}))},
           {"measure", to_json(*out)}},
          tsv_table({"word", "weight"}, rows),
          "atoms: " + std::to_string(out->size()) + ", mass at e: " + to_string(out->weight(Word{})) + "\n"};
}

OpResult op_spectrum(Context& ctx) {
  const auto act = ctx.action();
  const auto matrix = markov_matrix(act, ctx.measure());
  const auto spec = ctx.params.spectrum();
  const auto report = rho_plus(matrix, spec);
  Json result = to_json(report);
  if (ctx.has("deflation")) {
    const auto k = size_field(ctx.config, "deflation", 0);
    result["deflation"] = k;
    result["essential_rho_plus"] = number(essential_rho_plus(matrix, k, spec));
  }
  std::string tsv;
  if (matrix.size() <= spec.dense_limit) {
    const auto eig = mean_zero_spectrum(matrix);
    Json list = Json::array();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < eig.size(); ++i) {
      list.push_back(number(eig[i]));
      rows.push_back({std::to_string(i), fmt(eig[i])});
    }
    result["mean_zero_spectrum"] = list;
    tsv = tsv_table({"index", "eigenvalue"}, rows);
  }
  const bool ok = report.converged && report.cross_check_ok() && report.rho_plus <= report.rho_norm + 1e-9;
  return {ok ? "computed" : "violated", result, tsv,
          "rho+ = " + fmt(report.rho_plus) + ", rho_norm = " + fmt(report.rho_norm) + "\n"};
}

OpResult op_cheeger(Context& ctx) {
  const auto matrix = markov_matrix(ctx.action(), ctx.measure());
  auto opts = ctx.params.cheeger();
  CheegerCheck check;
  CheegerReport report;
  const auto& mode = ctx.params.cheeger_mode;
  if (mode == "auto") {
    check = check_cheeger_inequalities(matrix, opts);
    report = cheeger(matrix, check.mode, opts);
  } else {
    report = cheeger(matrix, mode == "exact" ? CheegerMode::Exact : CheegerMode::Sweep, opts);
    // Forcing sweep on a small instance: check only the side a sweep bound supports.
    if (mode == "sweep") opts.exact_limit = 0;
    check = check_cheeger_inequalities(matrix, opts);
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < report.profile.size(); ++i)
    rows.push_back({std::to_string(i + 1), to_string(report.profile[i]), fmt(to_double(report.profile[i]))});
  return {check.ok() ? "verified" : "violated",
          {{"cheeger", to_json(report)}, {"inequalities", to_json(check)}},
          rows.empty() ? std::string() : tsv_table({"prefix", "h", "h_float"}, rows),
          "h = " + to_string(report.h) + ", rho+ = " + fmt(check.rho_plus) + ", inequalities " +
              (check.ok() ? "hold" : "FAIL") + "\n"};
}

std::string radius_tsv(const RadiusEstimate& e) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t t = 0; t < e.returns.size(); ++t) {
    const std::size_t k = t / 2;
    const bool even = t % 2 == 0;
    rows.push_back({std::to_string(t), fmt(e.returns[t]),
                    even && k >= 1 ? fmt(e.root_bounds[k - 1]) : "",
                    even && k >= 1 && k - 1 < e.ratio_sequence.size() ? fmt(e.ratio_sequence[k - 1]) : ""});
  }
  return tsv_table({"n", "p_n", "root_bound", "ratio"}, rows);
}

OpResult op_radius(Context& ctx) {
  const auto est = radius_estimate(ctx.measure(), ctx.params.n_max, ctx.params.coset());
  return {est.monotone ? "computed" : "violated", to_json(est), radius_tsv(est),
          "lower bound " + fmt(est.lower) + ", ratio estimate " + fmt(est.ratio_estimate) + "\n"};
}

OpResult op_relative_radius(Context& ctx) {
  const auto est = relative_radius_bounds(ctx.subgroup(), ctx.measure(), ctx.params.n_max, ctx.params.coset());
  const bool ordered = est.group.lower <= est.lower + 1e-12;
  return {est.coset.monotone && ordered ? "computed" : "violated",
          {{"lower", number(est.lower)}, {"coset", to_json(est.coset)}, {"group", to_json(est.group)}},
          radius_tsv(est.coset),
          "relative radius lower bound " + fmt(est.lower) + " (group " + fmt(est.group.lower) + ")\n"};
}

OpResult op_subgroup_inspect(Context& ctx) {
  const auto& p = ctx.presentation();
  const auto aut = ctx.subgroup();
  Json index = nullptr;
  try {
    index = schreier_from_subgroup(aut).points;
  } catch (const InfiniteIndex&) {
  }
  Json result = {{"automaton", to_json(aut)},
                 {"index", index},
                 {"refold_stable", SubgroupAutomaton::refold(aut) == aut}};
  if (ctx.has("words")) {
    const auto& words = ctx.field("words");
    if (!words.is_array()) throw FieldError("words", "expected an array of words");
    Json membership = Json::array();
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto w = word_from_json(words[i], p, "words[" + std::to_string(i) + "]");
      membership.push_back({{"word", to_json(w, p)}, {"member", contains(aut, w)}});
    }
    result["membership"] = membership;
  }
  return {"computed", result, {},
          std::to_string(aut.state_count()) + " states, " + (aut.complete() ? "complete" : "incomplete") + "\n"};
}

OpResult op_schreier(Context& ctx) {
  const auto act = schreier_from_subgroup(ctx.subgroup());
  return {"computed", {{"action", to_json(act)}}, {}, std::to_string(act.points) + " cosets\n"};
}

std::string mertek_status(const MertekReport& r) {
  if (r.verdict == "verified") return "verified";
  if (r.verdict == "bounds vacuous") return "inconclusive";
  return "violated";
}

OpResult op_mertek(Context& ctx) {
  MertekOptions opts;
  opts.exhaustive_limit = ctx.params.exhaustive_limit;
  opts.spectrum = ctx.params.spectrum();
  const auto r = mertek_decompose(ctx.action(), ctx.measure(), ctx.subgroup(), opts);
  return {mertek_status(r), to_json(r), {},
          "kappa = " + to_string(r.kappa) + ", rho = " + fmt(r.rho) + ", " + std::to_string(r.components.size()) +
              " components, " + r.verdict + "\n"};
}

OpResult op_witness(Context& ctx) {
  const auto r = fotetel_witness(ctx.subgroup(), ctx.action(), ctx.params.witness());
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : r.search) rows.push_back({std::to_string(s.n), to_string(s.coset_mass), fmt(s.spectral_power)});
  return {r.verdict == "verified" ? "verified" : "violated", to_json(r, ctx.presentation()),
          tsv_table({"n", "coset_mass", "spectral_power"}, rows),
          "n = " + std::to_string(r.n) + ", kappa = " + to_string(r.kappa) + ", |T| = " +
              std::to_string(r.generator_count) + ", " + r.verdict + "\n"};
}

OpResult op_tau(Context& ctx) {
  const auto chain = chain_from_json(ctx.field("chain"), ctx.presentation(), "chain");
  const auto r = tau_certificate(ctx.subgroup(), chain, ctx.params.witness());
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& lv = r.levels[i];
    rows.push_back({std::to_string(i), std::to_string(lv.points), fmt(lv.level_rho), std::to_string(lv.orbits.size()),
                    fmt(lv.max_orbit_rho), lv.ok ? "ok" : "fail"});
  }
  return {r.valid ? "verified" : "inconclusive", to_json(r, ctx.presentation()),
          tsv_table({"level", "points", "rho_plus", "orbits", "max_orbit_rho_plus", "status"}, rows),
          "certificate " + r.verdict + ", uniform gap " + fmt(r.uniform_gap) + ", M = " + std::to_string(r.max_orbits) +
              "\n"};
}

OpResult op_ramanujan(Context& ctx) {
  const auto r =
      ramanujan_gap(ctx.measure(), ctx.action(), ctx.params.n_max, ctx.params.tolerance, ctx.params.spectrum());
  return {r.classification == "gap above rho" ? "inconclusive" : "verified", to_json(r), {},
          r.classification + "\n"};
}

OpResult op_bounds(Context& ctx) {
  const auto& v = ctx.field("value");
  if (!v.is_number()) throw FieldError("value", "expected a number");
  const double value = v.get<double>();
  const auto variant = string_field(ctx.config, "variant", "both", {"application", "ize", "both"});
  Json result = {{"value", number(value)}};
  std::string summary;
  if (variant != "ize") {
    const double b = corollary_bounds(value, BoundVariant::Application);
    result["application"] = number(b);
    summary += "application " + fmt(b) + "\n";
  }
  if (variant != "application") {
    const double b = corollary_bounds(value, BoundVariant::Ize);
    result["ize"] = number(b);
    summary += "ize " + fmt(b) + "\n";
  }
  return {"computed", result, {}, summary};
}

OpResult op_selfcheck(Context& ctx, const RunOptions& opts) {
  std::string dir = GAPCERT_CORPUS_DIR;
  if (auto it = ctx.config.find("corpus"); it != ctx.config.end()) {
    if (!it->is_string()) throw FieldError("corpus", "expected a directory path");
    dir = it->get<std::string>();
  }
  if (opts.corpus_dir) dir = *opts.corpus_dir;
  SelfcheckOptions sopts;
  sopts.threads = ctx.params.threads;
  const auto report = run_selfcheck(dir, sopts);
  return {report.ok() ? "verified" : "violated", to_json(report), {}, format_table(report)};
}

using Handler = std::function<OpResult(Context&, const RunOptions&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"reduce", [](Context& c, const RunOptions&) { return op_reduce(c); }},
      {"convolve", [](Context& c, const RunOptions&) { return op_convolve(c); }},
      {"spectrum", [](Context& c, const RunOptions&) { return op_spectrum(c); }},
      {"cheeger", [](Context& c, const RunOptions&) { return op_cheeger(c); }},
      {"radius", [](Context& c, const RunOptions&) { return op_radius(c); }},
      {"relative-radius", [](Context& c, const RunOptions&) { return op_relative_radius(c); }},
      {"subgroup-inspect", [](Context& c, const RunOptions&) { return op_subgroup_inspect(c); }},
      {"schreier", [](Context& c, const RunOptions&) { return op_schreier(c); }},
      {"mertek", [](Context& c, const RunOptions&) { return op_mertek(c); }},
      {"witness", [](Context& c, const RunOptions&) { return op_witness(c); }},
      {"tau", [](Context& c, const RunOptions&) { return op_tau(c); }},
      {"ramanujan", [](Context& c, const RunOptions&) { return op_ramanujan(c); }},
      {"bounds", [](Context& c, const RunOptions&) { return op_bounds(c); }},
      {"selfcheck", op_selfcheck},
  };
  return table;
}

Json echo_input(const Json& config) {
  Json out = Json::object();
  for (const auto& [key, value] : config.items()) {
    bool plumbing = false;
    for (auto k : kPlumbingKeys) plumbing = plumbing || key == k;
    if (!plumbing) out[key] = value;
  }
  return out;
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const FieldError*>(&e)) return "SchemaViolation";
  if (dynamic_cast<const NoWitnessFound*>(&e)) return "NoWitnessFound";
  if (dynamic_cast<const CostCapExceeded*>(&e)) return "CostCapExceeded";
  if (dynamic_cast<const NonSymmetric*>(&e)) return "NonSymmetric";
  if (dynamic_cast<const InfiniteIndex*>(&e)) return "InfiniteIndex";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  return "InvalidInput";
}

}  // namespace

const std::vector<std::string>& operation_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : handlers()) out.push_back(name);
    return out;
  }();
  return names;
}

RunOutcome run(const Json& config, const RunOptions& opts) {
  RunOutcome outcome;
  Json report = {{"schema", kReportSchema}};
  try {
    require_keys(config,
                 {"schema", "operation", "presentation", "word", "syllables", "measure", "measures", "power",
                  "subgroup", "words", "action", "chain", "n_max", "radius_n_max", "ball_cap", "support_cap",
                  "state_cap", "exact_cheeger_limit", "exhaustive_limit", "cheeger_mode", "deflation", "tolerance",
                  "value", "variant", "seed", "threads", "engine", "output", "tsv", "corpus"},
                 "");
    if (auto it = config.find("schema"); it != config.end() && *it != kProblemSchema)
      throw FieldError("schema", "expected \"" + std::string(kProblemSchema) + "\"");
    const auto& op_field = config.contains("operation") ? config["operation"] : Json();
    if (!op_field.is_string()) throw FieldError("operation", "missing or not a string");
    const auto operation = op_field.get<std::string>();
    auto handler = handlers().find(operation);
    if (handler == handlers().end()) throw FieldError("operation", "unknown operation '" + operation + "'");
    report["operation"] = operation;
    Context ctx{config, read_parameters(config, operation, opts), std::nullopt};
    report["parameters"] = ctx.params.to_json();
    report["input"] = echo_input(config);
    auto result = handler->second(ctx, opts);
    outcome.exit_code = exit_for(result.status);
    report["status"] = result.status;
    report["result"] = std::move(result.result);
    outcome.tsv = std::move(result.tsv);
    outcome.summary = std::move(result.summary);
  } catch (const Error& e) {
    const auto type = error_type(e);
    const bool inconclusive = type == "NoWitnessFound";
    outcome.exit_code = inconclusive ? kExitInconclusive : kExitError;
    if (!report.contains("input") && config.is_object()) report["input"] = echo_input(config);
    report["status"] = inconclusive ? "inconclusive" : "error";
    report["error"] = {{"type", type}, {"message", e.what()}};
    outcome.summary = std::string(inconclusive ? "inconclusive: " : "error: ") + e.what() + "\n";
  }
  report["exit_code"] = outcome.exit_code;
  outcome.report = std::move(report);
  return outcome;
}

namespace {

void compare_verdicts(const Json& stored, const Json& rederived, const std::string& where,
                      std::vector<std::string>& mismatches) {
  if (stored != rederived) mismatches.push_back(where + ": stored verdicts differ from verdicts re-derived from stored numbers");
}

void recheck_mertek(const Json& stored, const std::string& where, std::vector<std::string>& mismatches) {
  const auto parsed = mertek_from_json(stored, where);
  compare_verdicts(stored, to_json(rederive_verdicts(parsed)), where, mismatches);
}

void recheck_witness(const Json& w, const std::string& where, std::vector<std::string>& mismatches) {
  recheck_mertek(w.at("mertek"), where + ".mertek", mismatches);
  const bool routes = w.at("generators").is_null() ||
                      (w.at("generators_in_subgroup").get<bool>() && w.at("generator_mass_matches").get<bool>() &&
                       w.at("matrix_routes_agree").get<bool>());
  const auto expect = routes && w.at("mertek").at("verdict") == "verified" ? "verified" : "violated";
  if (w.at("verdict") != expect) mismatches.push_back(where + ".verdict: does not follow from stored flags");
  const auto& pre = w.at("precondition");
  const bool certified = pre.at("relative_radius_lower").get<double>() >
                         pre.at("standard_rho_plus").get<double>() + kBoundTolerance;
  if (pre.at("certified").get<bool>() != certified)
    mismatches.push_back(where + ".precondition.certified: does not follow from stored bounds");
}

void rederive(const std::string& operation, const Json& result, std::vector<std::string>& mismatches) {
  if (operation == "mertek") {
    recheck_mertek(result, "result", mismatches);
  } else if (operation == "witness") {
    recheck_witness(result, "result", mismatches);
  } else if (operation == "tau") {
    recheck_witness(result.at("witness"), "result.witness", mismatches);
    const double bound = result.at("count_bound").get<double>();
    bool valid = result.at("witness").at("verdict") == "verified";
    const auto& levels = result.at("levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto& lv = levels[i];
      const bool ok = lv.at("max_orbit_rho_plus").get<double>() < 1.0 - kBoundTolerance &&
                      static_cast<double>(lv.at("orbit_count").get<std::size_t>()) <= bound + kBoundTolerance;
      if (lv.at("ok").get<bool>() != ok) mismatches.push_back("result.levels[" + std::to_string(i) + "].ok");
      valid = valid && ok;
    }
    if (result.at("valid").get<bool>() != valid) mismatches.push_back("result.valid");
  } else if (operation == "cheeger") {
    const auto& c = result.at("inequalities");
    const double rho = c.at("rho_plus").get<double>();
    const bool lower = c.at("lower_side").get<double>() <= rho + kCheegerTolerance;
    const bool upper = rho <= c.at("upper_side").get<double>() + kCheegerTolerance;
    if (c.at("lower_ok").get<bool>() != lower) mismatches.push_back("result.inequalities.lower_ok");
    if (c.at("upper_ok").get<bool>() != upper) mismatches.push_back("result.inequalities.upper_ok");
  } else if (operation == "ramanujan") {
    if (!result.at("trivial_action").get<bool>()) {
      const bool better = result.at("rho_plus").get<double>() <=
                          result.at("radius_lower").get<double>() + result.at("tolerance").get<double>();
      if ((result.at("classification") == "ramanujan-or-better") != better)
        mismatches.push_back("result.classification");
    }
  } else if (operation == "bounds") {
    const double v = result.at("value").get<double>();
    if (result.contains("application") &&
        result["application"].get<double>() != round12(corollary_bounds(v, BoundVariant::Application)))
      mismatches.push_back("result.application");
    if (result.contains("ize") && result["ize"].get<double>() != round12(corollary_bounds(v, BoundVariant::Ize)))
      mismatches.push_back("result.ize");
  }
}

}  // namespace

std::vector<std::string> recheck_report(const Json& report, const RunOptions& opts) {
  std::vector<std::string> mismatches;
  if (!report.is_object() || report.value("schema", "") != kReportSchema) {
    mismatches.push_back("not a " + std::string(kReportSchema) + " document");
    return mismatches;
  }
  if (!report.contains("input")) {
    mismatches.push_back("report has no embedded input");
    return mismatches;
  }
  Json config = report["input"];
  if (report.contains("parameters")) {
    for (const auto& [key, value] : report["parameters"].items()) config[key] = value;
  }
  RunOptions rerun_opts = opts;
  rerun_opts.seed.reset();
  rerun_opts.n_max.reset();
  rerun_opts.exact_cheeger_limit.reset();
  auto again = run(config, rerun_opts).report;
  // The re-run echoes the merged parameters as input; only the computed part is compared.
  if (again.contains("input")) again["input"] = report["input"];
  if (dump(again) != dump(report)) mismatches.push_back("re-run report differs from the stored report");
  if (report.contains("result")) {
    try {
      rederive(report.at("operation").get<std::string>(), report.at("result"), mismatches);
    } catch (const std::exception& e) {
      mismatches.push_back(std::string("stored result is malformed: ") + e.what());
    }
  }
  return mismatches;
}

}  // namespace gapcert
