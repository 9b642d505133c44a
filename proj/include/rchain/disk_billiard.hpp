#ifndef RCHAIN_DISK_BILLIARD_HPP
#define RCHAIN_DISK_BILLIARD_HPP

// Symmetric 3-disk billiard reduced by its D3 symmetry. Prime cycles are
// binary Lyndon words; periodic orbits are found by Newton iteration on the
// bounce angles of the lifted full-domain itinerary.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rchain/error.hpp"
#include "rchain/schottky.hpp"

namespace rchain {

struct DiskSystem {
  double center_spacing = 6.0;  // R
  double disk_radius = 1.0;     // a
  double ratio() const { return center_spacing / disk_radius; }
};

inline DiskSystem make_disk_system(double center_spacing, double disk_radius = 1.0) {
  if (!std::isfinite(center_spacing) || !std::isfinite(disk_radius) || !(disk_radius > 0.0))
    fail(ErrorCode::NonFinite, "disk spacing and radius must be positive finite numbers");
  if (!(center_spacing / disk_radius > 2.0))
    fail(ErrorCode::InvalidArgument, "disks overlap: R/a must exceed 2");
  return {center_spacing, disk_radius};
}

/// Binary cycle, stored as its strictly smallest rotation.
/// 0: bounce back to the previous disk, 1: continue to the third disk.
struct BinaryCycle {
  std::vector<std::uint8_t> symbols;

  std::size_t size() const { return symbols.size(); }
  int zeros() const { return static_cast<int>(std::count(symbols.begin(), symbols.end(), 0)); }
  int ones() const { return static_cast<int>(size()) - zeros(); }
  std::string to_string() const {
    std::string out = "(";
    for (auto s : symbols) out += static_cast<char>('0' + s);
    return out + ")";
  }
  BinaryCycle reversed() const {
    BinaryCycle r{std::vector<std::uint8_t>(symbols.rbegin(), symbols.rend())};
    Word w(r.symbols);  // reuse the word rotation helpers
    r.symbols = w.canonical().symbols();
    return r;
  }
  friend bool operator==(const BinaryCycle&, const BinaryCycle&) = default;
};

inline constexpr int kMaxCycleLength = 20;

/// All binary Lyndon words of length 1..max_len, sorted by (length, lex).
inline std::vector<BinaryCycle> prime_cycles(int max_len) {
  if (max_len < 1) fail(ErrorCode::InvalidArgument, "max_len must be at least 1");
  if (max_len > kMaxCycleLength)
    fail(ErrorCode::LimitExceeded, "max_len " + std::to_string(max_len) + " exceeds " +
                                       std::to_string(kMaxCycleLength));
  // Duval's generator yields every Lyndon word of length <= n in lex order.
  std::vector<BinaryCycle> out;
  std::vector<std::uint8_t> w{0};
  const auto n = static_cast<std::size_t>(max_len);
  while (!w.empty()) {
    out.push_back({w});
    const std::size_t m = w.size();
    while (w.size() < n) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == 1) w.pop_back();
    if (!w.empty()) w.back() = 1;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const BinaryCycle& x, const BinaryCycle& y) { return x.size() < y.size(); });
  return out;
}

struct BirkhoffPoint {
  double q = 0.0;  // arc length a*phi on the disk boundary
  double p = 0.0;  // tangential component of the incoming unit velocity
};

struct DiskOrbit {
  BinaryCycle cycle;
  std::vector<BirkhoffPoint> bounce_points;
  double length = 0.0;     // fundamental-domain length L_p
  double stability = 0.0;  // signed expanding eigenvalue Lambda_p
  double residual = 0.0;   // final gradient norm of the length functional
  Mat2 monodromy{};
  int iterations = 0;
};

struct OrbitSearchOptions {
  double tolerance = 1e-12;
  int max_iterations = 100;
  double min_ratio = 2.5;
  /// Relative perturbation of the initial angles (0 = deterministic start).
  double perturbation = 0.0;
  std::uint64_t seed = 1;
};

namespace detail {

/// Lift of a binary cycle to the ternary disk itinerary; repeated until the
/// (previous, current) disk pair returns to the start. `repeats` is the
/// number of symmetry images of the fundamental orbit traversed.
inline std::vector<int> disk_itinerary(const BinaryCycle& cycle, int& repeats) {
  std::vector<int> it;
  int prev = 0, cur = 1;
  repeats = 0;
  do {
    for (auto c : cycle.symbols) {
      const int next = c == 0 ? prev : 3 - prev - cur;
      it.push_back(cur);
      prev = cur;
      cur = next;
    }
    ++repeats;
  } while (!(prev == 0 && cur == 1));
  return it;
}

struct Vec2 {
  double x = 0.0, y = 0.0;
};
inline Vec2 operator+(Vec2 u, Vec2 v) { return {u.x + v.x, u.y + v.y}; }
inline Vec2 operator-(Vec2 u, Vec2 v) { return {u.x - v.x, u.y - v.y}; }
inline Vec2 operator*(double k, Vec2 v) { return {k * v.x, k * v.y}; }
inline double dot(Vec2 u, Vec2 v) { return u.x * v.x + u.y * v.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline std::array<Vec2, 3> disk_centers(const DiskSystem& sys) {
  const double r = sys.center_spacing;
  return {Vec2{0.0, 0.0}, Vec2{r, 0.0}, Vec2{r / 2, r * std::numbers::sqrt3 / 2}};
}

}  // namespace detail

inline DiskOrbit find_orbit(const DiskSystem& sys, const BinaryCycle& cycle, const OrbitSearchOptions& opt = {}) {
  using detail::Vec2;
  if (cycle.symbols.empty()) fail(ErrorCode::InvalidArgument, "empty cycle");
  if (sys.ratio() < opt.min_ratio)
    fail(ErrorCode::InvalidArgument, "R/a = " + std::to_string(sys.ratio()) + " below the guard " +
                                         std::to_string(opt.min_ratio));
  int repeats = 0;
  const std::vector<int> it = detail::disk_itinerary(cycle, repeats);
  const std::size_t m = it.size();
  const auto centers = detail::disk_centers(sys);
  const double a = sys.disk_radius;

  Eigen::VectorXd phi(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 target = 0.5 * (centers[it[(i + m - 1) % m]] + centers[it[(i + 1) % m]]);
    const Vec2 v = target - centers[it[i]];
    phi[static_cast<Eigen::Index>(i)] = std::atan2(v.y, v.x);
  }
  if (opt.perturbation != 0.0) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& x : phi) x *= 1.0 + opt.perturbation * dist(rng);
  }

  struct Geometry {
    std::vector<Vec2> P, e, t, u;
    std::vector<double> ell;
    double total = 0.0;
  };
  auto geometry = [&](const Eigen::VectorXd& ph) {
    Geometry g;
    g.P.resize(m), g.e.resize(m), g.t.resize(m), g.u.resize(m), g.ell.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double f = ph[static_cast<Eigen::Index>(i)];
      g.e[i] = {std::cos(f), std::sin(f)};
      g.t[i] = {-a * std::sin(f), a * std::cos(f)};
      g.P[i] = centers[it[i]] + a * g.e[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2 d = g.P[(i + 1) % m] - g.P[i];
      g.ell[i] = detail::norm(d);
      g.u[i] = (1.0 / g.ell[i]) * d;
      g.total += g.ell[i];
    }
    return g;
  };
  auto gradient = [&](const Geometry& g) {
    Eigen::VectorXd grad(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
      grad[static_cast<Eigen::Index>(i)] = detail::dot(g.t[i], g.u[(i + m - 1) % m] - g.u[i]);
    return grad;
  };
  auto hessian = [&](const Geometry& g) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = (i + 1) % m;
      const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
      const Vec2 u = g.u[i];
      // Q = (I - u u^T) / ell applied as a bilinear form.
      auto q = [&](Vec2 x, Vec2 y) { return (detail::dot(x, y) - detail::dot(x, u) * detail::dot(y, u)) / g.ell[i]; };
      h(J, J) += q(g.t[j], g.t[j]) - a * detail::dot(u, g.e[j]);
      h(I, I) += q(g.t[i], g.t[i]) + a * detail::dot(u, g.e[i]);
      h(I, J) -= q(g.t[i], g.t[j]);
      h(J, I) -= q(g.t[i], g.t[j]);
    }
    return h;
  };

  Geometry geo = geometry(phi);
  Eigen::VectorXd grad = gradient(geo);
  double res = grad.lpNorm<Eigen::Infinity>();
  int iter = 0;
  while (res >= opt.tolerance && iter < opt.max_iterations) {
    ++iter;
    const Eigen::MatrixXd h = hessian(geo);
    Eigen::VectorXd step = h.ldlt().solve(-grad);
    if (!step.allFinite()) step = -grad;
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      const Eigen::VectorXd trial = phi + lambda * step;
      const Geometry g2 = geometry(trial);
      const Eigen::VectorXd grad2 = gradient(g2);
      const double res2 = grad2.lpNorm<Eigen::Infinity>();
      if (std::isfinite(g2.total) && (g2.total <= geo.total + 1e-14 * geo.total || res2 < res)) {
        phi = trial;
        geo = g2;
        grad = grad2;
        res = res2;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  if (!(res < opt.tolerance))
    fail(ErrorCode::NoConvergence, "Newton stalled for cycle " + cycle.to_string() + " with residual " +
                                       std::to_string(res));

  // Existence checks on the converged polygon.
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + 1) % m;
    const double out_cos = detail::dot(geo.u[i], geo.e[i]);
    const double in_cos = -detail::dot(geo.u[i], geo.e[j]);
    if (out_cos <= 0.0 || in_cos <= 0.0)
      fail(ErrorCode::Pruned, "cycle " + cycle.to_string() + " passes through a disk");
    if (in_cos < 1e-8) fail(ErrorCode::Grazing, "cycle " + cycle.to_string() + " grazes a disk");
    for (int k = 0; k < 3; ++k) {
      if (k == it[i] || k == it[j]) continue;
      const Vec2 c = centers[k];
      const double s = std::clamp(detail::dot(c - geo.P[i], geo.u[i]), 0.0, geo.ell[i]);
      const Vec2 nearest = geo.P[i] + s * geo.u[i];
      if (detail::norm(c - nearest) < a)
        fail(ErrorCode::Pruned, "cycle " + cycle.to_string() + " is blocked by a disk");
    }
  }

  DiskOrbit orbit;
  orbit.cycle = cycle;
  orbit.length = geo.total / repeats;
  orbit.residual = res;
  orbit.iterations = iter;

  // Reduced monodromy over one fundamental period: free flight followed by a
  // curved-mirror reflection per bounce, and -1 per symmetry-line reflection.
  const std::size_t n = cycle.size();
  Mat2 mono;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % m;
    const double tau = geo.ell[i];
    const double cos_theta = -detail::dot(geo.u[i], geo.e[j]);
    const double kappa = 2.0 / (a * cos_theta);
    const Mat2 bounce = Mat2{-1.0, 0.0, -kappa, -1.0} * Mat2{1.0, tau, 0.0, 1.0};
    mono = bounce * mono;
  }
  if (cycle.zeros() % 2 == 1) mono = Mat2{-mono.a, -mono.b, -mono.c, -mono.d};
  orbit.monodromy = mono;
  const double tr = mono.trace();
  if (!(std::abs(tr) > 2.0 + 1e-12))
    fail(ErrorCode::DegenerateStability, "cycle " + cycle.to_string() + " is not hyperbolic");
  orbit.stability = (tr + std::copysign(std::sqrt(tr * tr - 4.0), tr)) / 2.0;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + m - 1) % m;
    const double f = phi[static_cast<Eigen::Index>(i)];
    const Vec2 unit_t{-std::sin(f), std::cos(f)};
    orbit.bounce_points.push_back({a * f, detail::dot(geo.u[prev], unit_t)});
  }
  return orbit;
}

enum class DiskWeight { Classical, QuantumA, QuantumB, GV, Pressure };

inline std::string to_string(DiskWeight w) {
  switch (w) {
    case DiskWeight::Classical: return "classical";
    case DiskWeight::QuantumA: return "quantum-a";
    case DiskWeight::QuantumB: return "quantum-b";
    case DiskWeight::GV: return "gv";
    case DiskWeight::Pressure: return "pressure";
  }
  return "?";
}

/// Weight of one fixed point of the r-th repetition of an orbit with
/// fundamental length `length` and signed stability `stability`.
inline std::complex<double> orbit_weight(double length, double stability, std::complex<double> s, DiskWeight kind,
                                         int r, double beta = 1.0) {
  if (r < 1) fail(ErrorCode::InvalidArgument, "repetition must be at least 1");
  const double lam = std::pow(stability, r);
  const double mag = std::abs(lam);
  if (std::abs(mag - 1.0) < 1e-10) fail(ErrorCode::DegenerateStability, "|Lambda^r| is within 1e-10 of 1");
  const double det = std::abs((1.0 - lam) * (1.0 - 1.0 / lam));
  const double sign = lam < 0.0 ? -1.0 : 1.0;
  const std::complex<double> e = std::exp(-s * (r * length));
  switch (kind) {
    case DiskWeight::Classical: return e / det;
    case DiskWeight::QuantumA: return sign * std::sqrt(mag) * e / det;
    case DiskWeight::QuantumB: return e / (std::sqrt(mag) * det);
    case DiskWeight::GV: return sign * e / std::sqrt(det);
    case DiskWeight::Pressure: return std::pow(mag, 1.0 - beta) * e / det;
  }
  return 0.0;
}

inline std::complex<double> orbit_weights(const DiskOrbit& orbit, std::complex<double> s, DiskWeight kind, int r,
                                          double beta = 1.0) {
  return orbit_weight(orbit.length, orbit.stability, s, kind, r, beta);
}

}  // namespace rchain

#endif  // RCHAIN_DISK_BILLIARD_HPP
