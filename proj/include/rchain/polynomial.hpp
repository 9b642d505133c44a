#ifndef RCHAIN_POLYNOMIAL_HPP
#define RCHAIN_POLYNOMIAL_HPP

// Simultaneous polynomial root finding (Aberth-Ehrlich) with Newton-polygon
// starting points and cluster handling for multiple roots.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "rchain/error.hpp"

namespace rchain {

struct PolyRoot {
  std::complex<double> value;
  int multiplicity = 1;
  double condition = 0.0;  // relative condition number of the root
  double residual = 0.0;   // |p(u)| / sum |b_k| |u|^k
};

namespace detail {

using C = std::complex<double>;

/// p(u)/p'(u) without overflow, switching to the reversed polynomial for |u| > 1.
inline C newton_ratio(const std::vector<C>& b, C u) {
  const std::size_t n = b.size() - 1;
  if (std::abs(u) <= 1.0) {
    C p = 0.0, dp = 0.0;
    for (std::size_t k = n + 1; k-- > 0;) {
      dp = dp * u + p;
      p = p * u + b[k];
    }
    return p / dp;
  }
  const C v = 1.0 / u;
  C q = 0.0, dq = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    dq = dq * v + q;
    q = q * v + b[k];
  }
  return u * q / (static_cast<double>(n) * q - v * dq);
}

/// |p(u)| and |u p'(u)|, both relative to the rounding scale sum |b_k| |u|^k.
/// For |u| > 1 the reversed polynomial is used so nothing overflows.
inline void residual_and_slope(const std::vector<C>& b, C u, double& residual, double& slope) {
  const std::size_t n = b.size() - 1;
  const double au = std::abs(u);
  if (au <= 1.0) {
    C p = 0.0, dp = 0.0;
    double scale = 0.0;
    for (std::size_t k = n + 1; k-- > 0;) {
      dp = dp * u + p;
      p = p * u + b[k];
      scale = scale * au + std::abs(b[k]);
    }
    residual = scale > 0.0 ? std::abs(p) / scale : 0.0;
    slope = scale > 0.0 ? std::abs(u * dp) / scale : 0.0;
    return;
  }
  // p(u) = u^n q(v) and u p'(u) = u^n (n q - v q') with v = 1/u.
  const C v = 1.0 / u;
  C q = 0.0, dq = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    dq = dq * v + q;
    q = q * v + b[k];
    scale = scale / au + std::abs(b[k]);
  }
  residual = std::abs(q) / scale;
  slope = std::abs(static_cast<double>(n) * q - v * dq) / scale;
}

/// Starting points on circles whose radii follow the upper convex hull of
/// (k, log|b_k|).
inline std::vector<C> newton_polygon_start(const std::vector<C>& b) {
  const int n = static_cast<int>(b.size()) - 1;
  constexpr double kMissing = -1e300;
  std::vector<double> lg;
  for (const auto& c : b) lg.push_back(c == C{} ? kMissing : std::log(std::abs(c)));
  auto at = [&](int k) { return lg[static_cast<std::size_t>(k)]; };
  std::vector<int> hull;
  for (int k = 0; k <= n; ++k) {
    if (at(k) == kMissing) continue;
    while (hull.size() >= 2) {
      const int i = hull[hull.size() - 2], j = hull.back();
      if ((at(j) - at(i)) * (k - i) - (at(k) - at(i)) * (j - i) > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(k);
  }
  std::vector<C> z;
  constexpr double kOffset = 0.4;
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const int i = hull[h], j = hull[h + 1];
    const double r = std::exp((at(i) - at(j)) / (j - i));
    const int m = j - i;
    for (int q = 0; q < m; ++q) {
      const double ang = 2.0 * std::numbers::pi * q / m + 2.0 * std::numbers::pi * (h + 1) / n + kOffset;
      z.push_back(std::polar(r, ang));
    }
  }
  return z;
}

}  // namespace detail

/// All roots of sum_k b_k u^k. Leading zero coefficients are dropped; roots
/// at u = 0 (from b_0 = 0) are returned explicitly. Clusters of nearly equal
/// roots are merged into a single root with multiplicity.
inline std::vector<PolyRoot> polynomial_roots(std::vector<std::complex<double>> b, double cluster_tol = 1e-6) {
  using C = std::complex<double>;
  while (!b.empty() && b.back() == C{}) b.pop_back();
  std::vector<PolyRoot> out;
  std::size_t zeros = 0;
  while (zeros < b.size() && b[zeros] == C{}) ++zeros;
  if (zeros > 0) {
    out.push_back({C{}, static_cast<int>(zeros), 0.0, 0.0});
    b.erase(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(zeros));
  }
  if (b.size() <= 1) return out;
  for (const auto& c : b)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) fail(ErrorCode::NonFinite, "non-finite coefficient");
  const std::size_t n = b.size() - 1;

  std::vector<C> z = detail::newton_polygon_start(b);
  std::vector<bool> done(n, false);
  for (int iter = 0; iter < 2000; ++iter) {
    bool all_done = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const C w = detail::newton_ratio(b, z[i]);
      C sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const C corr = w / (1.0 - w * sum);
      if (std::isfinite(corr.real()) && std::isfinite(corr.imag())) z[i] -= corr;
      if (std::abs(corr) <= 4e-16 * std::abs(z[i])) {
        done[i] = true;
      } else {
        all_done = false;
      }
    }
    if (all_done) break;
  }

  // Group clustered roots: union of pairs closer than cluster_tol relative.
  std::vector<int> group(n, -1);
  int groups = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (group[i] >= 0) continue;
    group[i] = groups;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (group[j] >= 0) continue;
        if (std::abs(z[a] - z[j]) <= cluster_tol * std::max(std::abs(z[a]), 1e-300)) {
          group[j] = groups;
          stack.push_back(j);
        }
      }
    }
    ++groups;
  }
  for (int g = 0; g < groups; ++g) {
    C mean = 0.0;
    int m = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (group[i] == g) mean += z[i], ++m;
    mean /= static_cast<double>(m);
    // Modified Newton for the cluster centre.
    for (int it = 0; it < 20; ++it) {
      const C step = static_cast<double>(m) * detail::newton_ratio(b, mean);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      const C next = mean - step;
      if (std::abs(step) > 1e-3 * std::abs(mean)) break;
      mean = next;
      if (std::abs(step) <= 1e-16 * std::abs(mean)) break;
    }
    PolyRoot r;
    r.value = mean;
    r.multiplicity = m;
    double slope = 0.0;
    detail::residual_and_slope(b, mean, r.residual, slope);
    r.condition = slope > 0.0 ? 1.0 / slope : std::numeric_limits<double>::infinity();
    out.push_back(r);
  }
  return out;
}

}  // namespace rchain

#endif  // RCHAIN_POLYNOMIAL_HPP
