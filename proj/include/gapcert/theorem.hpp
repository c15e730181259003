#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gapcert/action.hpp"
#include "gapcert/automaton.hpp"
#include "gapcert/coset_walk.hpp"
#include "gapcert/measure.hpp"
#include "gapcert/rational.hpp"
#include "gapcert/spectral.hpp"

namespace gapcert {

inline constexpr double kBoundTolerance = 1e-9;

/// Top of the spectrum of the symmetric part of m; 0 for a single point.
double signed_top(const MarkovMatrix& m, const SpectrumOptions& opts = {});

struct ComponentReport {
  std::vector<std::uint32_t> points;
  Rational mass;
  std::optional<double> rho_plus;  // absent on a single point: nothing to bound
  bool gap_ok = true;
};

struct MertekOptions {
  std::size_t exhaustive_limit = 16;
  SpectrumOptions spectrum;
};

struct MertekReport {
  Rational kappa;
  double rho = 0.0;
  bool degenerate = false;  // kappa == 1
  bool vacuous = false;     // kappa <= rho
  MarkovMatrix inside_matrix;
  std::vector<ComponentReport> components;
  std::optional<double> count_bound;         // (1 - rho) / (kappa - rho)
  std::optional<double> min_mass_bound;      // (kappa - rho) / (1 - rho)
  std::optional<double> smallset_threshold;  // half the mass bound
  std::optional<double> smallset_rate;       // (kappa - rho) / (2 kappa)
  bool count_ok = false;
  bool mass_ok = false;
  bool gaps_ok = false;
  bool exhaustive_checked = false;
  std::size_t smallset_sets = 0;  // sets under the threshold that were checked
  std::size_t smallset_violations = 0;
  std::size_t exp_violations = 0;  // against e/y >= (kappa - rho)/kappa - y (1 - rho)/kappa
  std::string verdict;             // "verified", "bounds vacuous" or "violated"
};

/// Bound checks for the inside part of a split with the given kappa and rho.
MertekReport evaluate_mertek_bounds(const MarkovMatrix& inside_matrix, const Rational& kappa, double rho,
                                    const MertekOptions& opts = {});

/// Splits m by membership in H, takes rho from the action of m, then evaluates the bounds.
/// Throws DomainError when no mass lies in H.
MertekReport mertek_decompose(const FiniteAction& act, const Measure& m, const SubgroupAutomaton& aut,
                              const MertekOptions& opts = {});

/// Recomputes every verdict of a report from its stored numbers.
MertekReport rederive_verdicts(const MertekReport& report);

struct WitnessOptions {
  std::size_t n_max = 32;
  std::size_t ball_cap = 200'000;
  std::size_t radius_n_max = 64;
  MertekOptions mertek;
  CosetOptions coset;
};

struct WitnessStep {
  std::size_t n;
  Rational coset_mass;  // p_{e,H,n}
  double spectral_power;  // rho'^n
};

struct WitnessReport {
  std::size_t n = 0;
  std::optional<Measure> lazy;
  double lazy_rho = 0.0;  // top of spectrum of the lazy measure's action
  Rational kappa;
  double rho = 0.0;  // lazy_rho^n
  std::string support_size;  // words in the support of the n-fold convolution
  std::vector<WitnessStep> search;
  std::optional<std::vector<Word>> generators;  // T, absent past the ball cap
  std::size_t generator_count = 0;
  Rational generator_mass;  // total n-step mass of T
  bool generators_in_subgroup = false;
  bool generator_mass_matches = false;
  bool matrix_routes_agree = false;  // transfer DP vs weighted sum over T
  MertekReport mertek;
  double relative_lower = 0.0;  // certified lower bound for the relative radius of lambda_S
  double standard_rho = 0.0;    // top of spectrum of the action of lambda_S
  bool precondition_certified = false;
  std::string verdict;
};

/// Least even n <= n_max with p_{e,H,n} > rho'^n + kBoundTolerance. Throws NoWitnessFound.
WitnessReport fotetel_witness(const SubgroupAutomaton& aut, const FiniteAction& act,
                              const WitnessOptions& opts = {});

struct TauLevel {
  std::size_t points = 0;
  double level_rho = 0.0;  // top of spectrum of lambda_S on this level
  Partition orbits;        // of the subgroup generated by T
  std::vector<std::optional<double>> orbit_rho;
  double max_orbit_rho = 0.0;
  bool regular = false;
  std::optional<std::size_t> index;  // |Gamma : H' Gamma_n| as the orbit count, regular levels only
  bool ok = false;
};

struct TauCertificate {
  std::vector<TauLevel> levels;
  double sup_rho = 0.0;
  WitnessReport witness;
  std::size_t max_orbits = 0;  // M
  double uniform_gap = 0.0;    // max over levels and orbits of rho+
  double count_bound = 0.0;
  bool valid = false;
  std::string verdict;
};

TauCertificate tau_certificate(const SubgroupAutomaton& aut, const ActionChain& chain,
                               const WitnessOptions& opts = {});

struct RamanujanReport {
  bool trivial_action = false;
  std::optional<double> rho_plus;
  double lower = 0.0;  // certified lower bound for the radius of m
  double tolerance = 1e-3;
  std::string classification;  // "ramanujan-or-better", "gap above rho", "trivial action"
};

RamanujanReport ramanujan_gap(const Measure& m, const FiniteAction& act, std::size_t n_max,
                              double tolerance = 1e-3, const SpectrumOptions& opts = {});

enum class BoundVariant { Application, Ize };

/// Application: 1 - (v / log2(2/v))^2 / 512. Ize: 1 - (v / log2(4/v))^2 / 2048.
/// Domain 0 < v <= 1, else DomainError.
double corollary_bounds(double value, BoundVariant variant);

}  // namespace gapcert
