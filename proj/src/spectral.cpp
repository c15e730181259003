#include "gapcert/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "gapcert/errors.hpp"

namespace gapcert {

namespace {

struct Sparse {
  std::size_t n = 0;
  std::vector<std::size_t> start;
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  explicit Sparse(const MarkovMatrix& m) : n(m.size()) {
    start.push_back(0);
    for (const auto& row : m.rows()) {
      for (const auto& [y, w] : row) {
        col.push_back(y);
        val.push_back(to_double(w));
      }
      start.push_back(col.size());
    }
  }

  // Fixed summation order per row keeps results reproducible.
  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = start[i]; k < start[i + 1]; ++k) acc += val[k] * x[col[k]];
      y[i] = acc;
    }
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Removes the constant direction and every deflated direction.
void project(std::vector<double>& v, const std::vector<std::vector<double>>& deflate) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (auto& x : v) x -= mean;
  for (const auto& u : deflate) {
    const double c = dot(v, u);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
  }
}

struct PowerResult {
  double theta = 0.0;
  std::vector<double> v;
  std::size_t iterations = 0;
  double residual = 0.0;
};

// Power iteration on (M + I) / 2, whose spectrum is nonnegative, so the
// dominant direction is the top of the signed spectrum of M.
PowerResult top_eigenpair(const Sparse& m, const std::vector<std::vector<double>>& deflate,
                          const SpectrumOptions& opts) {
  const auto n = m.n;
  std::mt19937_64 rng(opts.seed);
  PowerResult out;
  out.v.resize(n);
  for (auto& x : out.v) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  project(out.v, deflate);
  double len = norm(out.v);
  if (len == 0.0) throw std::logic_error("power iteration: degenerate start vector");
  for (auto& x : out.v) x /= len;

  std::vector<double> w(n);
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    out.iterations = it;
    m.apply(out.v, w);
    project(w, deflate);
    out.theta = dot(w, out.v);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = w[i] - out.theta * out.v[i];
      r2 += d * d;
    }
    out.residual = std::sqrt(r2);
    if (out.residual <= opts.tolerance) break;
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 * (w[i] + out.v[i]);
    project(w, deflate);
    len = norm(w);
    if (len == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) out.v[i] = w[i] / len;
  }
  return out;
}

void require_spectral_input(const MarkovMatrix& m) {
  if (m.size() < 2) throw DomainError("top of spectrum needs at least 2 points");
  if (!m.symmetric()) throw NonSymmetric("top of spectrum needs a symmetric matrix");
}

// Orthonormal basis of the mean-zero subspace (Helmert columns).
Eigen::MatrixXd mean_zero_basis(std::size_t n) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 1; k < n; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
    for (std::size_t i = 0; i < k; ++i) q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k - 1)) = scale;
    q(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = -static_cast<double>(k) * scale;
  }
  return q;
}

std::vector<double> dense_spectrum(const MarkovMatrix& m) {
  const auto n = m.size();
  const auto d = m.dense();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d[i * n + j];
  }
  const Eigen::MatrixXd q = mean_zero_basis(n);
  const Eigen::MatrixXd b = q.transpose() * a * q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b, Eigen::EigenvaluesOnly);
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(out.rbegin(), out.rend());
  return out;
}

MarkovMatrix gram(const MarkovMatrix& m) { return multiply(m, transpose(m)); }

double norm_of(const MarkovMatrix& m, const SpectrumOptions& opts) {
  const auto g = gram(m);
  const auto top = top_eigenpair(Sparse(g), {}, opts);
  return std::sqrt(std::max(0.0, top.theta));
}

// Enumerates subsets of {0..N-2} in Gray-code order; point N-1 stays outside.
template <class Num>
struct CutScan {
  std::size_t n;
  std::vector<Num> w;  // n x n integer-scaled weights

  struct Best {
    Num cut{};
    std::uint32_t k = 0;
    std::uint64_t mask = 0;
    bool set = false;
  };

  bool better(const Num& cut, std::uint32_t k, std::uint64_t mask, const Best& b) const {
    if (!b.set) return true;
    const auto lhs = scaled(cut, b.k);
    const auto rhs = scaled(b.cut, k);
    if (lhs != rhs) return lhs < rhs;
    return mask < b.mask;
  }

  // cut * k'(n - k') in a type wide enough for the comparison.
  auto scaled(const Num& cut, std::uint32_t k) const {
    const auto f = static_cast<std::int64_t>(k) * static_cast<std::int64_t>(n - k);
    if constexpr (std::is_same_v<Num, std::int64_t>) {
      return static_cast<__int128>(cut) * f;
    } else {
      return Num(cut * Num(static_cast<long>(f)));
    }
  }

  Num full_cut(std::uint64_t mask) const {
    Num c{};
    for (std::size_t x = 0; x < n; ++x) {
      if (!(mask >> x & 1)) continue;
      for (std::size_t y = 0; y < n; ++y) {
        if (!(mask >> y & 1)) c += w[x * n + y];
      }
    }
    return c;
  }

  Best scan(std::uint64_t first, std::uint64_t last) const {
    Best best;
    if (first >= last) return best;
    std::uint64_t mask = first ^ (first >> 1);
    Num cut = full_cut(mask);
    for (std::uint64_t i = first;; ) {
      const auto k = static_cast<std::uint32_t>(std::popcount(mask));
      if (better(cut, k, mask, best)) best = {cut, k, mask, true};
      if (++i >= last) break;
      const auto x = static_cast<std::size_t>(std::countr_zero(i));
      if (mask >> x & 1) {
        mask &= ~(std::uint64_t{1} << x);
        for (std::size_t y = 0; y < n; ++y) {
          if (y == x) continue;
          if (mask >> y & 1) {
            cut += w[y * n + x];
          } else {
            cut -= w[x * n + y];
          }
        }
      } else {
        for (std::size_t y = 0; y < n; ++y) {
          if (y == x) continue;
          if (mask >> y & 1) {
            cut -= w[y * n + x];
          } else {
            cut += w[x * n + y];
          }
        }
        mask |= std::uint64_t{1} << x;
      }
    }
    return best;
  }

  Best run(std::size_t threads) const {
    const std::uint64_t total = std::uint64_t{1} << (n - 1);
    threads = std::max<std::size_t>(1, std::min<std::size_t>(threads, total / 1024 + 1));
    std::vector<Best> partial(threads);
    const std::uint64_t chunk = (total - 1 + threads - 1) / threads;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::uint64_t lo = 1 + t * chunk;
      const std::uint64_t hi = std::min(total, lo + chunk);
      pool.emplace_back([this, &partial, t, lo, hi] { partial[t] = scan(lo, hi); });
    }
    for (auto& th : pool) th.join();
    Best best;
    for (const auto& b : partial) {
      if (b.set && better(b.cut, b.k, b.mask, best)) best = b;
    }
    return best;
  }
};

std::vector<std::uint32_t> mask_points(std::uint64_t mask, std::size_t n) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t x = 0; x < n; ++x) {
    if (mask >> x & 1) out.push_back(x);
  }
  return out;
}

Rational expansion_ratio(const MarkovMatrix& m, const std::vector<std::uint32_t>& subset) {
  const auto n = static_cast<long>(m.size());
  const auto k = static_cast<long>(subset.size());
  // e(Y) / (mu(Y) (1 - mu(Y))) with mu(Y) = k / n
  return boundary_mass(m, subset) * Rational(n * n) / Rational(k * (n - k));
}

CheegerReport exact_cheeger(const MarkovMatrix& m, const CheegerOptions& opts) {
  const auto n = m.size();
  if (n < 2) throw DomainError("expansion constant needs at least 2 points");
  if (n > opts.exact_limit || n > 63)
    throw DomainError("exact Cheeger limited to N <= " + std::to_string(std::min<std::size_t>(opts.exact_limit, 63)) +
                      ", got " + std::to_string(n));
  mpz_class denom = 1;
  for (const auto& row : m.rows()) {
    for (const auto& [_, w] : row) mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), w.get_den_mpz_t());
  }
  CheegerReport report;
  report.mode = CheegerMode::Exact;
  std::uint64_t mask = 0;
  if (mpz_sizeinbase(denom.get_mpz_t(), 2) <= 40) {
    CutScan<std::int64_t> scan{n, std::vector<std::int64_t>(n * n, 0)};
    for (std::size_t x = 0; x < n; ++x) {
      for (const auto& [y, w] : m.rows()[x]) {
        const mpz_class scaled = w.get_num() * (denom / w.get_den());
        scan.w[x * n + y] = scaled.get_si();
      }
    }
    mask = scan.run(opts.threads).mask;
  } else {
    CutScan<Rational> scan{n, std::vector<Rational>(n * n)};
    for (std::size_t x = 0; x < n; ++x) {
      for (const auto& [y, w] : m.rows()[x]) scan.w[x * n + y] = w;
    }
    mask = scan.run(opts.threads).mask;
  }
  report.certificate = mask_points(mask, n);
  report.h = expansion_ratio(m, report.certificate);
  return report;
}

CheegerReport sweep_cheeger(const MarkovMatrix& m, const CheegerOptions& opts) {
  const auto spec = rho_plus(m, opts.spectrum);
  const auto n = m.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return spec.witness[a] < spec.witness[b]; });
  CheegerReport report;
  report.mode = CheegerMode::Sweep;
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<std::uint32_t> prefix(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(j));
    std::sort(prefix.begin(), prefix.end());
    report.profile.push_back(expansion_ratio(m, prefix));
    if (j == 1 || report.profile.back() < report.h) {
      report.h = report.profile.back();
      best = j;
    }
  }
  report.certificate.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best));
  std::sort(report.certificate.begin(), report.certificate.end());
  return report;
}

}  // namespace

bool SpectrumReport::cross_check_ok() const {
  return !dense_rho_plus || std::abs(*dense_rho_plus - rho_plus) <= 1e-9;
}

SpectrumReport rho_plus(const MarkovMatrix& m, const SpectrumOptions& opts) {
  require_spectral_input(m);
  const auto top = top_eigenpair(Sparse(m), {}, opts);
  SpectrumReport report;
  report.rho_plus = top.theta;
  report.witness = top.v;
  report.iterations = top.iterations;
  report.residual = top.residual;
  report.converged = top.residual <= 1e-10;
  report.rho_norm = norm_of(m, opts);
  if (m.size() <= opts.dense_limit) report.dense_rho_plus = dense_spectrum(m).front();
  return report;
}

double rho_norm(const MarkovMatrix& m, const SpectrumOptions& opts) {
  if (m.size() < 2) throw DomainError("norm on the mean-zero subspace needs at least 2 points");
  return norm_of(m, opts);
}

double essential_rho_plus(const MarkovMatrix& m, std::size_t k, const SpectrumOptions& opts) {
  require_spectral_input(m);
  if (k + 2 > m.size()) throw DomainError("deflation count must lie in [0, N-2]");
  const Sparse a(m);
  std::vector<std::vector<double>> found;
  double theta = 0.0;
  for (std::size_t j = 0; j <= k; ++j) {
    auto top = top_eigenpair(a, found, opts);
    theta = top.theta;
    found.push_back(std::move(top.v));
  }
  return theta;
}

std::vector<double> mean_zero_spectrum(const MarkovMatrix& m) {
  require_spectral_input(m);
  return dense_spectrum(m);
}

Rational boundary_mass(const MarkovMatrix& m, const std::vector<std::uint32_t>& subset) {
  std::vector<bool> inside(m.size(), false);
  for (auto x : subset) {
    if (x >= m.size()) throw InvalidInput("subset point " + std::to_string(x) + " out of range");
    inside[x] = true;
  }
  Rational total = 0;
  for (std::uint32_t x = 0; x < m.size(); ++x) {
    if (!inside[x]) continue;
    for (const auto& [y, w] : m.rows()[x]) {
      if (!inside[y]) total += w;
    }
  }
  return total / Rational(static_cast<long>(m.size()));
}

CheegerReport cheeger(const MarkovMatrix& m, CheegerMode mode, const CheegerOptions& opts) {
  return mode == CheegerMode::Exact ? exact_cheeger(m, opts) : sweep_cheeger(m, opts);
}

CheegerCheck check_cheeger_inequalities(const MarkovMatrix& m, const CheegerOptions& opts) {
  CheegerCheck check;
  check.mode = m.size() <= opts.exact_limit ? CheegerMode::Exact : CheegerMode::Sweep;
  const auto ch = cheeger(m, check.mode, opts);
  check.h = ch.h;
  check.rho_plus = rho_plus(m, opts.spectrum).rho_plus;
  const double h = to_double(ch.h);
  check.lower_side = 1.0 - h;
  check.upper_side = 1.0 - h * h / 8.0;
  check.lower_ok = check.lower_side <= check.rho_plus + kCheegerTolerance;
  check.upper_checked = check.mode == CheegerMode::Exact;
  check.upper_ok = check.rho_plus <= check.upper_side + kCheegerTolerance;
  return check;
}

}  // namespace gapcert
