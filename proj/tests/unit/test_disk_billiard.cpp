#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "catch_amalgamated.hpp"
#include "rchain/disk_billiard.hpp"

using namespace rchain;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kR = 6.0;

struct P2 {
  long double x, y;
};

std::array<P2, 3> centers() {
  return {P2{0, 0}, P2{kR, 0}, P2{kR / 2, kR * std::numbers::sqrt3_v<long double> / 2}};
}

// Full-domain disk sequence: 0 returns to the previous disk, 1 moves on to the
// third one. Repeated until the (previous, current) pair is back at (0, 1).
std::vector<int> lift(const std::vector<std::uint8_t>& sym, int& m) {
  std::vector<int> out;
  int prev = 0, cur = 1;
  m = 0;
  do {
    for (auto c : sym) {
      out.push_back(cur);
      const int next = c == 0 ? prev : 3 - prev - cur;
      prev = cur;
      cur = next;
    }
    ++m;
  } while (!(prev == 0 && cur == 1));
  return out;
}

long double polygon_length(const std::vector<int>& disks, const std::vector<long double>& phi) {
  const auto c = centers();
  long double total = 0;
  const std::size_t n = disks.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const long double x0 = c[disks[i]].x + cosl(phi[i]), y0 = c[disks[i]].y + sinl(phi[i]);
    const long double x1 = c[disks[j]].x + cosl(phi[j]), y1 = c[disks[j]].y + sinl(phi[j]);
    total += hypotl(x1 - x0, y1 - y0);
  }
  return total;
}

// Periodic orbits of disjoint convex scatterers minimize length for their
// itinerary; coordinate-wise golden-section descent from the midpoints.
std::vector<long double> minimize_polygon(const std::vector<int>& disks) {
  const auto c = centers();
  const std::size_t n = disks.size();
  std::vector<long double> phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const P2 a = c[disks[(i + n - 1) % n]], b = c[disks[(i + 1) % n]], o = c[disks[i]];
    phi[i] = atan2l((a.y + b.y) / 2 - o.y, (a.x + b.x) / 2 - o.x);
  }
  const long double g = (sqrtl(5.0L) - 1) / 2;
  for (int sweep = 0; sweep < 400; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      long double lo = phi[i] - 0.3L, hi = phi[i] + 0.3L;
      auto f = [&](long double v) {
        auto t = phi;
        t[i] = v;
        return polygon_length(disks, t);
      };
      long double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo), f1 = f(x1), f2 = f(x2);
      for (int it = 0; it < 90; ++it) {
        if (f1 < f2) {
          hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = f(x1);
        } else {
          lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = f(x2);
        }
      }
      phi[i] = (lo + hi) / 2;
    }
  }
  return phi;
}

// One billiard bounce by explicit ray tracing: state (phi, p) on disk `from`,
// p the tangential component of the outgoing velocity.
std::pair<long double, long double> bounce(int from, int to, long double phi, long double p) {
  const auto c = centers();
  const long double nx = cosl(phi), ny = sinl(phi), tx = -ny, ty = nx;
  const long double q = sqrtl(1 - p * p);
  const long double vx = p * tx + q * nx, vy = p * ty + q * ny;
  const long double px = c[from].x + nx, py = c[from].y + ny;
  const long double dx = px - c[to].x, dy = py - c[to].y;
  const long double b = vx * dx + vy * dy, cc = dx * dx + dy * dy - 1;
  const long double tau = -b - sqrtl(b * b - cc);
  const long double hx = px + tau * vx - c[to].x, hy = py + tau * vy - c[to].y;
  const long double dot = vx * hx + vy * hy;
  const long double rx = vx - 2 * dot * hx, ry = vy - 2 * dot * hy;
  const long double phi2 = atan2l(hy, hx);
  return {phi2, rx * -sinl(phi2) + ry * cosl(phi2)};
}

// Largest |eigenvalue| of the full-period Jacobian, as a product of
// one-bounce central-difference Jacobians taken at the polygon vertices.
// Differencing each bounce separately avoids following an unstable orbit.
long double fd_stability(const std::vector<int>& disks, const std::vector<long double>& phi) {
  const auto c = centers();
  const std::size_t n = disks.size();
  auto point = [&](std::size_t i) {
    return std::pair{c[disks[i % n]].x + cosl(phi[i % n]), c[disks[i % n]].y + sinl(phi[i % n])};
  };
  auto wrap = [](long double d) { return remainderl(d, 2 * std::numbers::pi_v<long double>); };
  const long double h = 1e-9L;
  long double m11 = 1, m12 = 0, m21 = 0, m22 = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x0, y0] = point(i);
    const auto [x1, y1] = point(i + 1);
    const long double len = hypotl(x1 - x0, y1 - y0);
    const long double f = phi[i];
    const long double p = ((x1 - x0) * -sinl(f) + (y1 - y0) * cosl(f)) / len;
    const int from = disks[i], to = disks[(i + 1) % n];
    auto [a1, b1] = bounce(from, to, f + h, p);
    auto [a2, b2] = bounce(from, to, f - h, p);
    auto [c1, d1] = bounce(from, to, f, p + h);
    auto [c2, d2] = bounce(from, to, f, p - h);
    const long double j11 = wrap(a1 - a2) / (2 * h), j21 = (b1 - b2) / (2 * h);
    const long double j12 = wrap(c1 - c2) / (2 * h), j22 = (d1 - d2) / (2 * h);
    const long double n11 = j11 * m11 + j12 * m21, n12 = j11 * m12 + j12 * m22;
    const long double n21 = j21 * m11 + j22 * m21, n22 = j21 * m12 + j22 * m22;
    m11 = n11, m12 = n12, m21 = n21, m22 = n22;
  }
  const long double tr = m11 + m22;
  return (fabsl(tr) + sqrtl(fmaxl(tr * tr - 4, 0))) / 2;
}

int mobius(int n) {
  int result = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    result = -result;
  }
  return n > 1 ? -result : result;
}

}  // namespace

TEST_CASE("prime cycles") {
  const auto one = prime_cycles(1);
  REQUIRE(one.size() == 2);
  CHECK(one[0].to_string() == "(0)");
  CHECK(one[1].to_string() == "(1)");
  std::vector<std::string> three;
  for (const auto& c : prime_cycles(3)) three.push_back(c.to_string());
  CHECK(three == std::vector<std::string>{"(0)", "(1)", "(01)", "(001)", "(011)"});
  const auto all = prime_cycles(12);
  for (int n = 1; n <= 12; ++n) {
    int necklace = 0;
    for (int d = 1; d <= n; ++d)
      if (n % d == 0) necklace += mobius(d) * (1 << (n / d));
    necklace /= n;
    const auto count = std::count_if(all.begin(), all.end(), [&](const BinaryCycle& c) { return static_cast<int>(c.size()) == n; });
    CHECK(count == necklace);
  }
  CHECK(std::count_if(all.begin(), all.end(), [](const BinaryCycle& c) { return c.size() == 6; }) == 9);
  // Brute-force rotation dedup for n = 6.
  std::set<std::vector<std::uint8_t>> classes;
  for (int code = 0; code < 64; ++code) {
    std::vector<std::uint8_t> w(6);
    for (int i = 0; i < 6; ++i) w[i] = (code >> (5 - i)) & 1;
    bool primitive = true;
    for (int p : {1, 2, 3})
      if (std::equal(w.begin() + p, w.end(), w.begin())) primitive = false;
    if (!primitive) continue;
    auto best = w;
    for (int k = 1; k < 6; ++k) {
      std::rotate(w.begin(), w.begin() + 1, w.end());
      best = std::min(best, w);
    }
    classes.insert(best);
  }
  CHECK(classes.size() == 9);
  CHECK_THROWS_AS(prime_cycles(21), Error);
  CHECK_THROWS_AS(prime_cycles(0), Error);
}

TEST_CASE("fundamental orbits have analytic data") {
  const DiskSystem sys = make_disk_system(6);
  const auto zero = find_orbit(sys, BinaryCycle{{0}});
  CHECK_THAT(zero.length, WithinAbs(4.0, 1e-12));
  CHECK_THAT(zero.stability, WithinRel(5 + 2 * std::sqrt(6.0), 1e-12));
  // One reduced bounce: Lambda + 1/Lambda = 2 + 2L/a.
  CHECK_THAT(zero.stability + 1 / zero.stability, WithinRel(2 + 2 * 4.0, 1e-12));
  const auto one = find_orbit(sys, BinaryCycle{{1}});
  CHECK_THAT(one.length, WithinAbs(6 - std::sqrt(3.0), 1e-12));
  const auto zo = find_orbit(sys, BinaryCycle{{0, 1}});
  CHECK_THAT(zo.length, WithinAbs(8.31653, 1e-5));
  CHECK(zo.length >= 2 * 4.0);
  CHECK(zo.length <= 2 * (6 - std::sqrt(3.0)));
}

TEST_CASE("orbit lengths match polygon minimization") {
  const DiskSystem sys = make_disk_system(kR);
  for (const auto& cycle : prime_cycles(5)) {
    int m = 0;
    const auto disks = lift(cycle.symbols, m);
    const auto phi = minimize_polygon(disks);
    const double oracle = static_cast<double>(polygon_length(disks, phi) / m);
    INFO(cycle.to_string());
    CHECK_THAT(find_orbit(sys, cycle).length, WithinAbs(oracle, 1e-9));
  }
}

TEST_CASE("stability matches a finite-difference monodromy") {
  const DiskSystem sys = make_disk_system(kR);
  for (const auto& cycle : prime_cycles(4)) {
    int m = 0;
    const auto disks = lift(cycle.symbols, m);
    const auto orbit = find_orbit(sys, cycle);
    const double full = std::pow(std::abs(orbit.stability), m);
    if (full > 1e10) continue;
    const auto phi = minimize_polygon(disks);
    INFO(cycle.to_string());
    CHECK_THAT(static_cast<double>(fd_stability(disks, phi)), WithinRel(full, 1e-5));
  }
}

TEST_CASE("orbit invariants") {
  const DiskSystem sys = make_disk_system(kR);
  const double lo = kR - 2.0, hi = kR - std::sqrt(3.0);
  for (const auto& cycle : prime_cycles(8)) {
    const auto orbit = find_orbit(sys, cycle);
    INFO(cycle.to_string());
    CHECK(orbit.residual < 1e-12);
    CHECK(std::abs(orbit.stability) > 1.0);
    // a d - b c cancels entries of size |Lambda|.
    const Mat2& M = orbit.monodromy;
    const double big = std::max({std::abs(M.a), std::abs(M.b), std::abs(M.c), std::abs(M.d), 1.0});
    CHECK_THAT(M.det(), WithinAbs(1.0, 1e-14 * big * big));
    CHECK(orbit.length / cycle.size() >= lo - 1e-12);
    CHECK(orbit.length / cycle.size() <= hi + 1e-12);
    for (const auto& b : orbit.bounce_points) CHECK(std::abs(b.p) < 1.0);
    const auto rev = find_orbit(sys, cycle.reversed());
    CHECK_THAT(rev.length, WithinRel(orbit.length, 1e-9));
    CHECK_THAT(std::abs(rev.stability), WithinRel(std::abs(orbit.stability), 1e-9));
  }
}

TEST_CASE("newton start perturbation returns the same orbit") {
  const DiskSystem sys = make_disk_system(kR);
  for (const auto& cycle : prime_cycles(6)) {
    OrbitSearchOptions opt;
    opt.perturbation = 0.01;
    opt.seed = 7;
    CHECK_THAT(find_orbit(sys, cycle, opt).length, WithinAbs(find_orbit(sys, cycle).length, 1e-10));
  }
}

TEST_CASE("disk system validation") {
  CHECK_THROWS_AS(make_disk_system(2.0), Error);
  CHECK_THROWS_AS(make_disk_system(6.0, 0.0), Error);
  CHECK_THROWS_AS(find_orbit(make_disk_system(2.2), BinaryCycle{{0}}), Error);
}

TEST_CASE("orbit weights") {
  const double lam = 5 + 2 * std::sqrt(6.0);
  const double det = (lam - 1) * (1 - 1 / lam);
  CHECK_THAT(orbit_weight(4.0, lam, 0.0, DiskWeight::Classical, 1).real(), WithinRel(1 / det, 1e-14));
  const std::complex<double> s(0.3, 0.0);
  const auto p = orbit_weight(4.0, lam, s, DiskWeight::Pressure, 1, 1.5);
  CHECK(p.real() > 0.0);
  CHECK_THAT(p.real(), WithinRel(std::pow(lam, -0.5) * std::exp(-0.3 * 4.0) / det, 1e-14));
  // GV phase is the sign of Lambda^r.
  const double neg = -11.77;
  CHECK(orbit_weight(4.27, neg, 0.0, DiskWeight::GV, 1).real() < 0.0);
  CHECK(orbit_weight(4.27, neg, 0.0, DiskWeight::GV, 2).real() > 0.0);
  CHECK(orbit_weight(4.0, lam, 0.0, DiskWeight::GV, 1).real() > 0.0);
  const double det2 = std::abs((1 - neg * neg) * (1 - 1 / (neg * neg)));
  CHECK_THAT(orbit_weight(4.27, neg, 0.0, DiskWeight::QuantumB, 2).real(),
             WithinRel(1 / (std::abs(neg) * det2), 1e-14));
  CHECK_THROWS_AS(orbit_weight(1.0, 1.0 + 1e-12, 0.0, DiskWeight::Classical, 1), Error);
  CHECK_THROWS_AS(orbit_weight(1.0, lam, 0.0, DiskWeight::Classical, 0), Error);
}
