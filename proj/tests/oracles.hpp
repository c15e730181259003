#pragma once

// Independent reference implementations for tests. Nothing here calls the
// library's reduction, walk, spectral or Cheeger code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace oracle {

using Q = mpq_class;
// Free-product word as (factor, exponent) pairs.
using W = std::vector<std::pair<std::uint32_t, std::int64_t>>;

inline std::int64_t normalize(std::int64_t e, std::uint32_t order) {
  if (order == 0) return e;
  const auto m = static_cast<std::int64_t>(order);
  return ((e % m) + m) % m;
}

/// Stack reduction of an arbitrary syllable sequence.
inline W reduce(const W& raw, const std::vector<std::uint32_t>& orders) {
  W out;
  for (auto [f, e] : raw) {
    e = normalize(e, orders[f]);
    if (e == 0) continue;
    if (!out.empty() && out.back().first == f) {
      const auto merged = normalize(out.back().second + e, orders[f]);
      if (merged == 0) out.pop_back();
      else out.back().second = merged;
    } else {
      out.emplace_back(f, e);
    }
  }
  return out;
}

inline W concat_reduce(const W& a, const W& b, const std::vector<std::uint32_t>& orders) {
  W raw = a;
  raw.insert(raw.end(), b.begin(), b.end());
  return reduce(raw, orders);
}

using Dist = std::map<W, Q>;

/// Distribution of the n-step walk by brute-force enumeration of every step sequence.
inline Dist enumerate_walk(const std::vector<std::pair<W, Q>>& steps, std::size_t n,
                           const std::vector<std::uint32_t>& orders) {
  Dist dist;
  std::function<void(std::size_t, const W&, const Q&)> rec = [&](std::size_t depth, const W& at, const Q& p) {
    if (depth == n) {
      dist[at] += p;
      return;
    }
    for (const auto& [w, q] : steps) rec(depth + 1, concat_reduce(at, w, orders), p * q);
  };
  rec(0, W{}, Q(1));
  return dist;
}

/// Return probability sequence of simple random walk on the free group of rank k,
/// from the birth-death chain of the distance to the identity.
inline std::vector<double> free_group_returns(std::size_t k, std::size_t n_max) {
  const double down = 1.0 / static_cast<double>(2 * k);
  std::vector<double> dist(n_max + 2, 0.0), next(n_max + 2, 0.0);
  dist[0] = 1.0;
  std::vector<double> returns{1.0};
  for (std::size_t t = 1; t <= n_max; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    next[1] += dist[0];
    for (std::size_t d = 1; d <= t; ++d) {
      next[d - 1] += dist[d] * down;
      next[d + 1] += dist[d] * (1.0 - down);
    }
    std::swap(dist, next);
    returns.push_back(dist[0]);
  }
  return returns;
}

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations, descending.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i * n + i];
  std::sort(eig.rbegin(), eig.rend());
  return eig;
}

/// Top eigenvalue on the mean-zero subspace: the constant vector is moved to
/// eigenvalue -1 by subtracting 2J/N, which never exceeds the mean-zero top.
inline double mean_zero_top(const std::vector<double>& dense, std::size_t n) {
  auto shifted = dense;
  for (auto& x : shifted) x -= 2.0 / static_cast<double>(n);
  return jacobi_eigenvalues(shifted, n).front();
}

/// Exact expansion constant by direct enumeration of every proper nonempty subset.
inline Q brute_cheeger(const std::vector<std::vector<Q>>& m) {
  const auto n = m.size();
  std::optional<Q> best;
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
    Q cut = 0;
    std::size_t k = 0;
    for (std::size_t x = 0; x < n; ++x) {
      if (!(mask >> x & 1)) continue;
      ++k;
      for (std::size_t y = 0; y < n; ++y) {
        if (!(mask >> y & 1)) cut += m[x][y];
      }
    }
    const Q nn(static_cast<long>(n));
    const Q h = (cut / nn) / (Q(static_cast<long>(k)) / nn * Q(static_cast<long>(n - k)) / nn);
    if (!best || h < *best) best = h;
  }
  return *best;
}

}  // namespace oracle
