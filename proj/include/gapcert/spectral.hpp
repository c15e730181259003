#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gapcert/action.hpp"
#include "gapcert/rational.hpp"

namespace gapcert {

struct SpectrumOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 1'000'000;
  std::uint64_t seed = 1;
  /// Dense cross-check runs up to this size.
  std::size_t dense_limit = 64;
};

struct SpectrumReport {
  double rho_plus = 0.0;
  std::vector<double> witness;  // mean zero, unit norm
  double rho_norm = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::optional<double> dense_rho_plus;

  /// Power iteration and dense solve agree within 1e-9 (vacuous when no dense solve ran).
  bool cross_check_ok() const;
};

/// Top of the spectrum on the mean-zero subspace. Throws NonSymmetric, DomainError (N < 2).
SpectrumReport rho_plus(const MarkovMatrix& m, const SpectrumOptions& opts = {});
/// Norm on the mean-zero subspace, sqrt of the top of M M^T.
double rho_norm(const MarkovMatrix& m, const SpectrumOptions& opts = {});
/// (k+1)-th largest eigenvalue on the mean-zero subspace, 0 <= k <= N-2.
double essential_rho_plus(const MarkovMatrix& m, std::size_t k, const SpectrumOptions& opts = {});
/// Eigenvalues on the mean-zero subspace, descending, from a dense solve.
std::vector<double> mean_zero_spectrum(const MarkovMatrix& m);

/// <chi_Y M, chi_{Y^c}> with uniform atoms.
Rational boundary_mass(const MarkovMatrix& m, const std::vector<std::uint32_t>& subset);

enum class CheegerMode { Exact, Sweep };

struct CheegerOptions {
  std::size_t exact_limit = 22;
  std::size_t threads = 1;
  SpectrumOptions spectrum;
};

struct CheegerReport {
  CheegerMode mode = CheegerMode::Exact;
  Rational h;
  std::vector<std::uint32_t> certificate;
  /// Sweep mode: h of every threshold prefix, in sweep order.
  std::vector<Rational> profile;
};

/// Exact: minimum over subsets, certificate avoids the last point, ties go to
/// the smallest bitmask. Sweep: best threshold cut of the top eigenvector.
CheegerReport cheeger(const MarkovMatrix& m, CheegerMode mode, const CheegerOptions& opts = {});

struct CheegerCheck {
  CheegerMode mode = CheegerMode::Exact;
  Rational h;
  double rho_plus = 0.0;
  double lower_side = 0.0;  // 1 - h
  double upper_side = 0.0;  // 1 - h^2 / 8
  bool lower_ok = false;
  bool upper_checked = false;
  bool upper_ok = false;

  bool ok() const { return lower_ok && (!upper_checked || upper_ok); }
};

inline constexpr double kCheegerTolerance = 1e-9;

/// Exact Cheeger up to the exact limit, otherwise sweep with the upper side unchecked.
CheegerCheck check_cheeger_inequalities(const MarkovMatrix& m, const CheegerOptions& opts = {});

}  // namespace gapcert
