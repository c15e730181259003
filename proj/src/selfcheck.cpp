#include "gapcert/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gapcert/app.hpp"
#include "gapcert/instances.hpp"

namespace gapcert {

namespace {

struct SuiteParams {
  std::uint64_t seed = 1;
  std::size_t instances = 50;
  std::size_t min_points = 2;
  std::size_t max_points = 12;
  std::size_t max_rank = 3;
};

SuiteParams read_params(const Json& suite) {
  SuiteParams p;
  auto get = [&](const char* key, std::size_t& out) {
    if (auto it = suite.find(key); it != suite.end()) {
      if (!it->is_number_unsigned()) throw FieldError(key, "expected a nonnegative integer");
      out = it->get<std::size_t>();
    }
  };
  std::size_t seed = 1;
  get("seed", seed);
  p.seed = seed;
  get("instances", p.instances);
  get("min_points", p.min_points);
  get("max_points", p.max_points);
  get("max_rank", p.max_rank);
  if (p.min_points < 2 || p.max_points < p.min_points) throw FieldError("max_points", "need 2 <= min_points <= max_points");
  return p;
}

// Tally helper: records the first failure message only.
struct Tally {
  SuiteResult& r;
  void check(bool ok, const std::string& what) {
    ++r.checks;
    if (!ok) {
      if (r.failures == 0) r.detail = what;
      ++r.failures;
    }
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::size_t draw_points(InstanceGenerator& gen, const SuiteParams& p) { return gen.uniform(p.min_points, p.max_points); }

MarkovMatrix random_symmetric_matrix(InstanceGenerator& gen, const SuiteParams& p) {
  const auto pres = gen.presentation(p.max_rank);
  const auto act = gen.action(pres, draw_points(gen, p));
  return markov_matrix(act, gen.symmetric_measure(pres, 3, 2));
}

void suite_cheeger(const SuiteParams& p, const SelfcheckOptions& opts, Tally& t) {
  InstanceGenerator gen(p.seed);
  CheegerOptions copts;
  copts.threads = opts.threads;
  for (std::size_t i = 0; i < p.instances; ++i) {
    const auto m = random_symmetric_matrix(gen, p);
    const auto c = check_cheeger_inequalities(m, copts);
    t.check(c.ok() && c.upper_checked,
            "instance " + std::to_string(i) + ": h=" + to_string(c.h) + " rho+=" + num(c.rho_plus));
  }
}

void suite_lazy(const SuiteParams& p, const SelfcheckOptions& opts, Tally& t) {
  InstanceGenerator gen(p.seed);
  CheegerOptions copts;
  copts.threads = opts.threads;
  for (std::size_t i = 0; i < p.instances; ++i) {
    const auto pres = gen.presentation(p.max_rank);
    const auto act = gen.action(pres, draw_points(gen, p));
    const auto m = gen.symmetric_measure(pres, 3, 2);
    const auto plain = markov_matrix(act, m);
    const auto lazy = markov_matrix(act, lazify(m));
    const double r = rho_plus(plain).rho_plus;
    const double rl = rho_plus(lazy).rho_plus;
    t.check(std::abs(rl - (0.5 + 0.5 * r)) <= 1e-9, "instance " + std::to_string(i) + ": lazy rho+ " + num(rl));
    const auto h = cheeger(plain, CheegerMode::Exact, copts).h;
    const auto hl = cheeger(lazy, CheegerMode::Exact, copts).h;
    t.check(hl * 2 == h, "instance " + std::to_string(i) + ": h=" + to_string(h) + " lazy h=" + to_string(hl));
  }
}

void suite_norm(const SuiteParams& p, const SelfcheckOptions&, Tally& t) {
  InstanceGenerator gen(p.seed);
  for (std::size_t i = 0; i < p.instances; ++i) {
    const auto pres = gen.presentation(p.max_rank);
    const auto act = gen.action(pres, draw_points(gen, p));
    // Alternate symmetric and general measures.
    const auto m = i % 2 == 0 ? gen.measure(pres, 4, 2) : gen.symmetric_measure(pres, 3, 2);
    const auto matrix = markov_matrix(act, m);
    const double norm = rho_norm(matrix);
    const auto mmt = multiply(matrix, transpose(matrix));
    const double top = mean_zero_spectrum(mmt).front();
    t.check(std::abs(norm * norm - top) <= 1e-9,
            "instance " + std::to_string(i) + ": norm^2=" + num(norm * norm) + " top(MM^T)=" + num(top));
    if (matrix.symmetric()) {
      t.check(rho_plus(matrix).rho_plus <= norm + 1e-9, "instance " + std::to_string(i) + ": rho+ > rho_norm");
    }
  }
}

void suite_metszet(const SuiteParams& p, const SelfcheckOptions&, Tally& t) {
  InstanceGenerator gen(p.seed);
  for (std::size_t i = 0; i < p.instances; ++i) {
    const auto m = random_symmetric_matrix(gen, p);
    const auto n = m.size();
    if (n > 16) throw FieldError("max_points", "exhaustive pair scan needs N <= 16");
    const std::size_t subsets = std::size_t{1} << n;
    std::vector<Rational> e(subsets);
    mpz_class denom = 1;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      std::vector<std::uint32_t> ys;
      for (std::uint32_t x = 0; x < n; ++x) {
        if (mask >> x & 1) ys.push_back(x);
      }
      e[mask] = boundary_mass(m, ys);
      mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), e[mask].get_den_mpz_t());
    }
    // Exact comparison on integers scaled by the common denominator.
    std::vector<mpz_class> scaled(subsets);
    for (std::size_t mask = 0; mask < subsets; ++mask) scaled[mask] = e[mask].get_num() * (denom / e[mask].get_den());
    const bool small = std::all_of(scaled.begin(), scaled.end(), [](const mpz_class& z) { return z.fits_slong_p(); });
    std::size_t bad = 0;
    const std::size_t full = subsets - 1;
    for (std::size_t y = 0; y < subsets; ++y) {
      if (scaled[y] != scaled[full & ~y]) ++bad;
      for (std::size_t z = 0; z < subsets; ++z) {
        if (small) {
          const long sum = scaled[y].get_si() + scaled[z].get_si();
          if (scaled[y & z].get_si() > sum || scaled[y & ~z].get_si() > sum) ++bad;
        } else {
          const mpz_class sum = scaled[y] + scaled[z];
          if (scaled[y & z] > sum || scaled[y & ~z] > sum) ++bad;
        }
      }
    }
    t.check(bad == 0, "instance " + std::to_string(i) + ": " + std::to_string(bad) + " violating pairs");
  }
}

void suite_mertek(const SuiteParams& p, const SelfcheckOptions&, Tally& t) {
  InstanceGenerator gen(p.seed);
  std::size_t found = 0, vacuous = 0, attempts = 0;
  const std::size_t max_attempts = 200 * p.instances;
  while (found < p.instances && attempts < max_attempts) {
    ++attempts;
    const auto pres = gen.presentation(p.max_rank);
    const auto act = gen.action(pres, draw_points(gen, p));
    const auto m = gen.coin() ? gen.symmetric_measure(pres, 3, 2) : lazify(gen.symmetric_measure(pres, 3, 2));
    const auto aut = SubgroupAutomaton::fold(pres, gen.subgroup_generators(pres, 2, 2));
    const auto split = split_by_membership(m, [&](const Word& w) { return contains(aut, w); });
    if (!split.inside) continue;
    const auto r = mertek_decompose(act, m, aut);
    if (r.vacuous) {
      ++vacuous;
      continue;
    }
    ++found;
    const auto label = "instance " + std::to_string(found) + " (N=" + std::to_string(act.points) + ")";
    t.check(r.count_ok, label + ": " + std::to_string(r.components.size()) + " components > " + num(*r.count_bound));
    t.check(r.mass_ok, label + ": component mass below " + num(*r.min_mass_bound));
    t.check(r.gaps_ok, label + ": component without spectral gap");
    t.check(r.exp_violations == 0 && r.smallset_violations == 0, label + ": expansion inequality violated");
    t.check(r.exhaustive_checked == (act.points <= MertekOptions{}.exhaustive_limit), label + ": exhaustive scan skipped");
    t.check(rederive_verdicts(r).verdict == r.verdict, label + ": verdict not re-derivable");
  }
  t.check(found == p.instances, "only " + std::to_string(found) + " non-vacuous instances in " +
                                    std::to_string(attempts) + " attempts");
  if (t.r.failures == 0)
    t.r.detail = std::to_string(found) + " instances with kappa > rho, " + std::to_string(vacuous) + " vacuous skipped";
}

void suite_eigen(const SuiteParams& p, const SelfcheckOptions&, Tally& t) {
  InstanceGenerator gen(p.seed);
  for (std::size_t i = 0; i < p.instances; ++i) {
    const auto m = random_symmetric_matrix(gen, p);
    const auto s = rho_plus(m);
    t.check(s.converged && s.dense_rho_plus && s.cross_check_ok(),
            "instance " + std::to_string(i) + " (N=" + std::to_string(m.size()) + "): power " + num(s.rho_plus) +
                " dense " + (s.dense_rho_plus ? num(*s.dense_rho_plus) : std::string("none")));
  }
}

void suite_coset(const SuiteParams& p, const SelfcheckOptions&, Tally& t) {
  InstanceGenerator gen(p.seed);
  const std::size_t horizon = 8;
  for (std::size_t i = 0; i < p.instances; ++i) {
    const auto pres = gen.presentation(p.max_rank);
    const auto m = gen.step_measure(pres);
    const auto aut = SubgroupAutomaton::fold(pres, gen.subgroup_generators(pres, 2, 2));
    const auto label = "instance " + std::to_string(i);
    const auto ex = coset_hit_sequence(aut, m, horizon, {CosetEngine::Excursion});
    const auto ge = coset_hit_sequence(aut, m, horizon, {CosetEngine::Generic});
    t.check(ex == ge, label + ": excursion and generic engines disagree");
    const auto ret = return_sequence(m, horizon);
    bool dominated = true;
    for (std::size_t n = 0; n <= horizon; ++n) dominated = dominated && ge[n] >= ret[n];
    t.check(dominated, label + ": p_{e,H,n} < p_{e,e,n}");
  }
}

void suite_example(const Json& suite, Tally& t) {
  const auto& config = suite.at("config");
  const auto outcome = run(config);
  const int want_exit = suite.value("exit_code", 0);
  t.check(outcome.exit_code == want_exit,
          "exit code " + std::to_string(outcome.exit_code) + ", expected " + std::to_string(want_exit));
  if (auto it = suite.find("expect"); it != suite.end()) {
    for (const auto& [pointer, want] : it->items()) {
      const Json::json_pointer ptr(pointer);
      const bool present = outcome.report.contains(ptr);
      t.check(present && outcome.report.at(ptr) == want,
              pointer + ": got " + (present ? outcome.report.at(ptr).dump() : std::string("nothing")) + ", expected " +
                  want.dump());
    }
  }
  if (auto it = suite.find("approx"); it != suite.end()) {
    for (const auto& [pointer, spec] : it->items()) {
      const Json::json_pointer ptr(pointer);
      const double want = spec.at(0).get<double>();
      const double tol = spec.at(1).get<double>();
      const bool present = outcome.report.contains(ptr) && outcome.report.at(ptr).is_number();
      const double got = present ? outcome.report.at(ptr).get<double>() : NAN;
      t.check(present && std::abs(got - want) <= tol, pointer + ": got " + num(got) + ", expected " + num(want));
    }
  }
}

}  // namespace

bool SelfcheckReport::ok() const {
  return error.empty() && !suites.empty() &&
         std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.ok(); });
}

SuiteResult run_suite(const std::string& name, const Json& suite, const SelfcheckOptions& opts) {
  SuiteResult r;
  r.name = name;
  Tally t{r};
  try {
    if (!suite.is_object() || !suite.contains("kind") || !suite["kind"].is_string())
      throw FieldError("kind", "suite needs a string field 'kind'");
    r.kind = suite["kind"].get<std::string>();
    if (r.kind == "example") {
      suite_example(suite, t);
    } else {
      require_keys(suite, {"kind", "description", "seed", "instances", "min_points", "max_points", "max_rank"}, "");
      const auto params = read_params(suite);
      if (r.kind == "cheeger") suite_cheeger(params, opts, t);
      else if (r.kind == "lazy") suite_lazy(params, opts, t);
      else if (r.kind == "norm") suite_norm(params, opts, t);
      else if (r.kind == "metszet") suite_metszet(params, opts, t);
      else if (r.kind == "mertek") suite_mertek(params, opts, t);
      else if (r.kind == "eigen") suite_eigen(params, opts, t);
      else if (r.kind == "coset") suite_coset(params, opts, t);
      else throw FieldError("kind", "unknown suite kind '" + r.kind + "'");
    }
  } catch (const std::exception& e) {
    ++r.failures;
    r.detail = std::string("error: ") + e.what();
  }
  return r;
}

SelfcheckReport run_selfcheck(const std::filesystem::path& corpus, const SelfcheckOptions& opts) {
  SelfcheckReport report;
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  if (std::filesystem::is_directory(corpus, ec)) {
    for (const auto& entry : std::filesystem::directory_iterator(corpus, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    report.error = "no suites found";
    return report;
  }
  for (const auto& file : files) {
    std::ifstream in(file);
    std::stringstream text;
    text << in.rdbuf();
    const auto name = file.stem().string();
    try {
      report.suites.push_back(run_suite(name, parse_json_text(text.str(), file.filename().string()), opts));
    } catch (const Error& e) {
      SuiteResult bad;
      bad.name = name;
      bad.kind = "?";
      bad.failures = 1;
      bad.detail = e.what();
      report.suites.push_back(std::move(bad));
    }
  }
  return report;
}

std::string format_table(const SelfcheckReport& report) {
  if (!report.error.empty()) return report.error + "\n";
  std::size_t width = 5;
  for (const auto& s : report.suites) width = std::max(width, s.name.size());
  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %-8s  %7s  %8s  %s\n", static_cast<int>(width), "suite", "kind", "checks",
                "failures", "status");
  out << line;
  std::size_t passed = 0;
  for (const auto& s : report.suites) {
    std::snprintf(line, sizeof line, "%-*s  %-8s  %7zu  %8zu  %s\n", static_cast<int>(width), s.name.c_str(),
                  s.kind.c_str(), s.checks, s.failures, s.ok() ? "PASS" : "FAIL");
    out << line;
    if (s.ok()) ++passed;
    else if (!s.detail.empty()) out << "    " << s.detail << "\n";
  }
  out << passed << "/" << report.suites.size() << " suites passed\n";
  return out.str();
}

Json to_json(const SelfcheckReport& report) {
  Json suites = Json::array();
  for (const auto& s : report.suites) {
    suites.push_back({{"suite", s.name},
                      {"kind", s.kind},
                      {"checks", s.checks},
                      {"failures", s.failures},
                      {"status", s.ok() ? "pass" : "fail"},
                      {"detail", s.detail}});
  }
  Json out = {{"ok", report.ok()}, {"suites", suites}};
  if (!report.error.empty()) out["error"] = report.error;
  return out;
}

}  // namespace gapcert
