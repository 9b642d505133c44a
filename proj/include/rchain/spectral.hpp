#ifndef RCHAIN_SPECTRAL_HPP
#define RCHAIN_SPECTRAL_HPP

// Zeros of d(s, 1) in rectangles, the generalized spectrum at fixed s, and
// continuation of spectral values and chain curves.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rchain/error.hpp"
#include "rchain/polynomial.hpp"
#include "rchain/quadrature.hpp"
#include "rchain/zeta.hpp"

namespace rchain {

struct Resonance {
  cplx s{};
  double residual = 0.0;  // |d(s, 1)|
  int multiplicity = 1;   // winding number
  std::string provenance;
};

/// Closed rectangle [lo.re, hi.re] x [lo.im, hi.im].
struct Rect {
  cplx lo{};
  cplx hi{};
  bool contains(cplx s, double tol = 0.0) const {
    return s.real() >= lo.real() - tol && s.real() <= hi.real() + tol && s.imag() >= lo.imag() - tol &&
           s.imag() <= hi.imag() + tol;
  }
  double size() const { return std::max(hi.real() - lo.real(), hi.imag() - lo.imag()); }
};

struct ResonanceSearchOptions {
  int grid_x = 2;
  int grid_y = 2;
  double re_floor = -1.0;  // warn when the rectangle extends left of this
  int max_depth = 30;
  double dedupe_tol = 1e-7;
};

struct ResonanceSearch {
  std::vector<Resonance> resonances;
  std::vector<std::string> warnings;
  long evaluations = 0;
};

namespace detail {

/// Moments (s - c)^k d'(s)/d(s), k = 0, 1, 2.
struct Moments {
  std::array<cplx, 3> m{};
  friend Moments operator+(const Moments& x, const Moments& y) {
    return {{x.m[0] + y.m[0], x.m[1] + y.m[1], x.m[2] + y.m[2]}};
  }
  friend Moments operator*(double k, const Moments& x) { return {{k * x.m[0], k * x.m[1], k * x.m[2]}}; }
  friend Moments operator-(const Moments& x) { return {{-x.m[0], -x.m[1], -x.m[2]}}; }
};

class ArgumentPrinciple {
 public:
  ArgumentPrinciple(const CycleExpansion& expansion, cplx origin, double split_fraction)
      : exp_(expansion), origin_(origin), split_(split_fraction) {}

  long evaluations() const { return evaluations_; }

  std::pair<cplx, cplx> eval(cplx s) {
    const auto key = std::make_pair(s.real(), s.imag());
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    ++evaluations_;
    const ZetaValue v = exp_.value(s, 1.0);
    if (v.value == cplx{} || !std::isfinite(std::abs(v.value)) || !std::isfinite(std::abs(v.dvalue_ds)))
      fail(ErrorCode::BoundaryZero, "d(s,1) vanishes or is not finite on a contour");
    cache_.emplace(key, std::make_pair(v.value, v.dvalue_ds));
    return {v.value, v.dvalue_ds};
  }

  /// Newton polish of a zero of multiplicity m starting at s. A multiple zero
  /// is only resolvable to about eps^(1/m), so stagnation of the step at a
  /// small level also counts as convergence.
  std::pair<cplx, bool> polish(cplx s, int m, double radius) {
    const cplx start = s;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 50; ++it) {
      if (std::abs(s - start) > radius) return {s, false};
      const ZetaValue v = exp_.value(s, 1.0);
      ++evaluations_;
      if (v.value == cplx{}) return {s, true};
      const cplx step = static_cast<double>(m) * v.value / v.dvalue_ds;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      s -= step;
      const double scale = std::max(1.0, std::abs(s));
      const double size = std::abs(step);
      if (size <= 1e-14 * scale) return {s, true};
      if (it >= 3 && size > 0.5 * prev && size < 1e-6 * scale) return {s, true};
      prev = size;
    }
    return {s, false};
  }

  Moments edge(cplx a, cplx b) {
    const auto key = std::make_tuple(a.real(), a.imag(), b.real(), b.imag());
    if (auto it = edges_.find(key); it != edges_.end()) return it->second;
    const auto rkey = std::make_tuple(b.real(), b.imag(), a.real(), a.imag());
    if (auto it = edges_.find(rkey); it != edges_.end()) return -it->second;
    const Moments m = panel(a, b, 0);
    edges_.emplace(key, m);
    return m;
  }

  Moments panel(cplx a, cplx b, int depth) {
    const cplx delta = b - a;
    auto f = [&](double t) {
      const cplx s = a + t * delta;
      const auto [d, dd] = eval(s);
      const cplx g = dd / d * delta;
      const cplx x = s - origin_;
      return Moments{{g, x * g, x * x * g}};
    };
    const auto r = GaussKronrod15::apply<Moments>(f);
    const cplx da = eval(a).first, db = eval(b).first;
    const cplx exact = std::log(db / da);  // exact up to 2 pi i k
    const double turns = std::round((r.kronrod.m[0].imag() - exact.imag()) / (2.0 * std::numbers::pi));
    const double mismatch = std::abs(r.kronrod.m[0].real() - exact.real()) +
                            std::abs(r.kronrod.m[0].imag() - exact.imag() - 2.0 * std::numbers::pi * turns);
    const double err = std::abs(r.kronrod.m[0] - r.gauss.m[0]);
    // Very short panels sit next to a zero where d is noise-dominated; the
    // winding only needs an error well below pi, so loosen the test there.
    const double tol = std::abs(delta) < 1e-6 * std::max(1.0, std::abs(a)) ? 0.05 : 1e-3;
    if (err < tol && mismatch < tol) {
      Moments out = r.kronrod;
      out.m[0] = exact + cplx(0.0, 2.0 * std::numbers::pi * turns);
      return out;
    }
    if (std::abs(delta) < 1e-10 * std::max(1.0, std::abs(a)) || depth > 60)
      fail(ErrorCode::BoundaryZero, "a zero lies on or extremely close to a contour edge");
    const cplx mid = a + 0.5 * delta;
    return panel(a, mid, depth + 1) + panel(mid, b, depth + 1);
  }

  Moments box(const Rect& r) {
    const cplx c0 = r.lo, c1(r.hi.real(), r.lo.imag()), c2 = r.hi, c3(r.lo.real(), r.hi.imag());
    return edge(c0, c1) + edge(c1, c2) + edge(c2, c3) + edge(c3, c0);
  }

  void search(const Rect& r, int depth, int max_depth, std::vector<Resonance>& out, std::vector<std::string>& warnings) {
    const Moments mom = box(r);
    const cplx w = mom.m[0] / cplx(0.0, 2.0 * std::numbers::pi);
    const int winding = static_cast<int>(std::lround(w.real()));
    if (std::abs(w - static_cast<double>(winding)) > 0.05)
      fail(ErrorCode::QuadratureFail, "winding number is not close to an integer");
    if (winding < 0) fail(ErrorCode::QuadratureFail, "negative winding number; d(s,1) has poles?");
    if (winding == 0) return;

    const double size = r.size();
    const double inside_tol = 1e-9 * std::max(1.0, size);
    const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);
    const cplx mean = mom.m[1] / two_pi_i / static_cast<double>(winding);
    const cplx var = mom.m[2] / two_pi_i / static_cast<double>(winding) - mean * mean;
    const cplx guess = origin_ + mean;

    if (winding == 1 || std::sqrt(std::abs(var)) < 1e-2 * size || depth >= max_depth) {
      auto [s, ok] = polish(guess, winding, 2.0 * size);
      bool accept = ok && r.contains(s, inside_tol);
      if (accept && winding > 1) {
        // Confirm that all W zeros sit at s and not in separate places.
        const double rho = std::max(1e-3 * size, 1e-6 * std::max(1.0, std::abs(s)));
        const Moments small = box({s - cplx(rho, rho * 0.93), s + cplx(rho * 1.07, rho)});
        accept = std::lround((small.m[0] / two_pi_i).real()) == winding;
        // The first moment locates a multiple zero far better than Newton can.
        if (accept) s = origin_ + small.m[1] / two_pi_i / static_cast<double>(winding);
      }
      if (accept) {
        out.push_back({s, std::abs(exp_.value(s, 1.0).value), winding, {}});
        return;
      }
      if (depth >= max_depth) {
        warnings.push_back("subdivision limit reached; zero reported at contour centroid");
        out.push_back({guess, std::abs(exp_.value(guess, 1.0).value), winding, {}});
        return;
      }
    }
    const double fx = split_ + 0.013 * (depth % 3);
    const double fy = 1.0 - split_ - 0.011 * (depth % 2);
    const double xm = r.lo.real() + fx * (r.hi.real() - r.lo.real());
    const double ym = r.lo.imag() + fy * (r.hi.imag() - r.lo.imag());
    const Rect parts[4] = {{r.lo, {xm, ym}},
                           {{xm, r.lo.imag()}, {r.hi.real(), ym}},
                           {{r.lo.real(), ym}, {xm, r.hi.imag()}},
                           {{xm, ym}, r.hi}};
    for (const auto& p : parts) search(p, depth + 1, max_depth, out, warnings);
  }

 private:
  const CycleExpansion& exp_;
  cplx origin_;
  double split_;
  long evaluations_ = 0;
  std::map<std::pair<double, double>, std::pair<cplx, cplx>> cache_;
  std::map<std::tuple<double, double, double, double>, Moments> edges_;
};

inline std::string provenance(const CycleExpansion& e) {
  return e.flavor().describe() + ";J=" + std::to_string(e.plan().max_length) +
         ";K=" + std::to_string(e.max_order());
}

}  // namespace detail

/// All zeros of d(s, 1) in the closed rectangle, by the argument principle on
/// adaptively subdivided boxes followed by Newton polishing.
inline ResonanceSearch find_resonances(const CycleExpansion& expansion, const Rect& rect,
                                       const ResonanceSearchOptions& opt = {}) {
  if (!(rect.lo.real() < rect.hi.real()) || !(rect.lo.imag() < rect.hi.imag()))
    fail(ErrorCode::InvalidArgument, "rectangle must have lo < hi in both coordinates");
  if (opt.grid_x < 1 || opt.grid_y < 1) fail(ErrorCode::InvalidArgument, "grid must be at least 1x1");
  ResonanceSearch result;
  if (rect.lo.real() < opt.re_floor)
    result.warnings.push_back("rectangle extends below Re(s) = " + std::to_string(opt.re_floor) +
                              "; truncated expansion may be unreliable there");

  const double margins[] = {1e-3, 2.7e-3, 5.3e-3};
  const double splits[] = {0.4937, 0.5213, 0.4779};
  for (int attempt = 0; attempt < 3; ++attempt) {
    const double m = margins[attempt] * rect.size();
    const Rect outer{rect.lo - cplx(m, m), rect.hi + cplx(m, m)};
    detail::ArgumentPrinciple ap(expansion, 0.5 * (outer.lo + outer.hi), splits[attempt]);
    std::vector<Resonance> found;
    std::vector<std::string> warnings;
    try {
      // Interior grid lines sit slightly off the uniform positions so that
      // symmetric rectangles do not put a line through a zero on an axis.
      auto cut = [&](double lo, double hi, int i, int n) {
        if (i == 0) return lo;
        if (i == n) return hi;
        return lo + (hi - lo) * (i + 0.0731 * std::sin(1.7 * i + attempt + 0.3)) / n;
      };
      for (int i = 0; i < opt.grid_x; ++i) {
        for (int j = 0; j < opt.grid_y; ++j) {
          const cplx lo(cut(outer.lo.real(), outer.hi.real(), i, opt.grid_x),
                        cut(outer.lo.imag(), outer.hi.imag(), j, opt.grid_y));
          const cplx hi(cut(outer.lo.real(), outer.hi.real(), i + 1, opt.grid_x),
                        cut(outer.lo.imag(), outer.hi.imag(), j + 1, opt.grid_y));
          ap.search({lo, hi}, 0, opt.max_depth, found, warnings);
        }
      }
    } catch (const Error& e) {
      result.evaluations += ap.evaluations();
      if (e.code() == ErrorCode::BoundaryZero && attempt < 2) {
        result.warnings.push_back("zero near a contour edge; retrying with a shifted contour");
        continue;
      }
      throw;
    }
    result.evaluations += ap.evaluations();
    std::sort(found.begin(), found.end(), [](const Resonance& x, const Resonance& y) {
      return x.s.imag() != y.s.imag() ? x.s.imag() < y.s.imag() : x.s.real() < y.s.real();
    });
    const std::string prov = detail::provenance(expansion);
    for (auto& r : found) {
      if (!rect.contains(r.s, 1e-9 * std::max(1.0, rect.size()))) continue;
      bool duplicate = false;
      for (auto& kept : result.resonances) {
        if (std::abs(kept.s - r.s) < opt.dedupe_tol) {
          kept.multiplicity = std::max(kept.multiplicity, r.multiplicity);
          duplicate = true;
        }
      }
      if (duplicate) continue;
      r.provenance = prov;
      result.resonances.push_back(r);
    }
    result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());
    return result;
  }
  fail(ErrorCode::BoundaryZero, "zero on the contour persisted after retries");
}

struct SpectralValue {
  cplx z{};
  int multiplicity = 1;
  double residual = 0.0;
  double condition = 0.0;
};

struct SpectrumSet {
  cplx s{};
  std::vector<SpectralValue> roots;  // |z| >= trust_radius, by decreasing |z|
  double trust_radius = 1.0;
  bool ill_conditioned = false;
  double max_condition = 0.0;
  std::vector<std::string> warnings;
};

inline double default_trust_radius(const ZetaFlavor& flavor) { return flavor.max_order_weight() <= 2 ? 0.3 : 0.95; }

inline constexpr double kIllConditioned = 1e10;

/// sigma_s = { z : d(s, 1/z) = 0 }, restricted to |z| >= trust_radius.
inline SpectrumSet generalized_spectrum(const ZetaSeries& series, double trust_radius) {
  if (!(trust_radius > 0.0) || trust_radius > 1.2)
    fail(ErrorCode::InvalidArgument, "trust radius must lie in (0, 1.2]");
  SpectrumSet out;
  out.s = series.s;
  out.trust_radius = trust_radius;
  for (const auto& r : polynomial_roots(series.coeffs)) {
    if (r.value == cplx{}) continue;
    const cplx z = 1.0 / r.value;
    if (std::abs(z) < trust_radius) continue;
    out.roots.push_back({z, r.multiplicity, r.residual, r.condition});
    if (r.multiplicity == 1) out.max_condition = std::max(out.max_condition, r.condition);
  }
  std::sort(out.roots.begin(), out.roots.end(),
            [](const SpectralValue& x, const SpectralValue& y) { return std::abs(x.z) > std::abs(y.z); });
  if (out.max_condition > kIllConditioned) {
    out.ill_conditioned = true;
    out.warnings.push_back("IllConditioned: root condition estimate " + std::to_string(out.max_condition));
  }
  return out;
}

inline SpectrumSet generalized_spectrum(const CycleExpansion& expansion, cplx s, double trust_radius) {
  return generalized_spectrum(expansion.coefficients(s), trust_radius);
}

struct SpectrumTrace {
  std::vector<cplx> path;
  std::vector<cplx> values;  // z along the path
  double winding = 0.0;      // turns of z around 0
  std::optional<Resonance> start_resonance;
  std::optional<Resonance> end_resonance;
};

struct TraceOptions {
  int initial_steps = 32;
  double min_step = 1e-9;
  double resonance_tol = 1e-6;
};

namespace detail {

inline std::pair<cplx, bool> newton_u(const ZetaSeries& series, cplx u) {
  for (int it = 0; it < 30; ++it) {
    const ZetaValue v = evaluate(series, u);
    const cplx step = v.value / v.dvalue_dz;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return {u, false};
    u -= step;
    if (std::abs(step) <= 1e-14 * std::abs(u)) return {u, true};
  }
  return {u, false};
}

}  // namespace detail

/// Follows the spectral value z (a root of d(s, 1/z)) while s moves along the
/// polyline `path`.
inline SpectrumTrace trace_spectral_value(const CycleExpansion& expansion, const std::vector<cplx>& path, cplx z0,
                                          const TraceOptions& opt = {}) {
  if (path.empty()) fail(ErrorCode::InvalidArgument, "path must contain at least one point");
  if (z0 == cplx{}) fail(ErrorCode::InvalidArgument, "z0 must be non-zero");
  SpectrumTrace out;
  ZetaSeries series = expansion.coefficients(path.front());
  auto [u, ok] = detail::newton_u(series, 1.0 / z0);
  double residual = 0.0, slope = 0.0;
  detail::residual_and_slope(series.coeffs, u, residual, slope);
  if (!ok || residual > 1e-8 || std::abs(1.0 / u - z0) > 1e-6 * std::abs(z0))
    fail(ErrorCode::InvalidArgument, "z0 is not a spectral value at the start of the path");
  cplx s = path.front();
  out.path.push_back(s);
  out.values.push_back(1.0 / u);

  for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
    const cplx p = path[seg], q = path[seg + 1];
    if (p == q) continue;
    double t = 0.0, h = 1.0 / opt.initial_steps;
    while (t < 1.0) {
      h = std::min(h, 1.0 - t);
      const ZetaValue cur = evaluate(series, u);
      const cplx s_new = t + h >= 1.0 ? q : p + (t + h) * (q - p);
      const cplx du_ds = -cur.dvalue_ds / cur.dvalue_dz;
      const ZetaSeries next = expansion.coefficients(s_new);
      auto [u_new, conv] = detail::newton_u(next, u + du_ds * (s_new - s));
      const cplx z_old = 1.0 / u, z_new = 1.0 / u_new;
      double gap = std::numeric_limits<double>::infinity();
      int mult = 1;
      if (conv) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : polynomial_roots(next.coeffs)) {
          if (r.value == cplx{}) continue;
          const double dist = std::abs(1.0 / r.value - z_new);
          if (dist < best) {
            if (best < gap) gap = best;
            best = dist;
            mult = r.multiplicity;
          } else {
            gap = std::min(gap, dist);
          }
        }
      }
      if (conv && mult == 1 && std::abs(z_new - z_old) < 0.1 * gap) {
        out.winding += std::arg(z_new / z_old) / (2.0 * std::numbers::pi);
        t += h;
        s = s_new;
        u = u_new;
        series = next;
        out.path.push_back(s);
        out.values.push_back(z_new);
        h *= 1.5;
        continue;
      }
      h *= 0.5;
      if (h < opt.min_step) {
        if (conv && (mult > 1 || gap < 1e-6 * std::max(1.0, std::abs(z_new))))
          fail(ErrorCode::Collision, "spectral values collide near s = " + std::to_string(s_new.real()) + "+" +
                                         std::to_string(s_new.imag()) + "i");
        fail(ErrorCode::LostRoot, "continuation lost the spectral value near s = " + std::to_string(s.real()) +
                                      "+" + std::to_string(s.imag()) + "i");
      }
    }
  }
  const std::string prov = detail::provenance(expansion);
  auto at_one = [&](cplx s_at, cplx z) -> std::optional<Resonance> {
    if (std::abs(z - 1.0) >= opt.resonance_tol) return std::nullopt;
    return Resonance{s_at, std::abs(expansion.value(s_at, 1.0).value), 1, prov};
  };
  out.start_resonance = at_one(out.path.front(), out.values.front());
  out.end_resonance = at_one(out.path.back(), out.values.back());
  return out;
}

struct ChainSample {
  double theta = 0.0;
  cplx s{};
};

struct ChainCurve {
  std::vector<ChainSample> samples;
  Resonance seed;
  Resonance end;  // final point; a resonance when the span is a multiple of 2 pi
};

struct ChainOptions {
  bool clockwise = true;
  double initial_step = 0.02;
  double max_step = 0.2;
  double min_step = 1e-8;
  double tolerance = 1e-13;
};

/// Continues d(s, e^{i theta}) = 0 from the seed resonance for theta in
/// [0, span]. The spectral value z = e^{-i theta} then moves clockwise;
/// `clockwise = false` flips the sense.
inline ChainCurve chain_curves(const CycleExpansion& expansion, const Resonance& seed, double span,
                               const ChainOptions& opt = {}) {
  if (!(span > 0.0) || !std::isfinite(span)) fail(ErrorCode::InvalidArgument, "span must be positive");
  if (seed.multiplicity > 1) fail(ErrorCode::DegenerateSeed, "seed resonance has multiplicity > 1");
  const double sigma = opt.clockwise ? 1.0 : -1.0;
  auto u_of = [&](double theta) { return std::polar(1.0, sigma * theta); };

  // Corrector: Newton in s at fixed theta.
  auto correct = [&](cplx s, double theta, int& iterations) -> std::pair<cplx, bool> {
    const cplx u = u_of(theta);
    for (iterations = 1; iterations <= 12; ++iterations) {
      const ZetaValue v = expansion.value(s, u);
      const cplx step = v.value / v.dvalue_ds;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return {s, false};
      s -= step;
      if (std::abs(step) <= opt.tolerance * std::max(1.0, std::abs(s))) return {s, true};
    }
    return {s, false};
  };

  int iters = 0;
  auto [s, ok] = correct(seed.s, 0.0, iters);
  {
    // Newton only converges linearly on a multiple zero, so look before failing.
    const double near = ok ? 1e-6 : 1e-3;
    const ZetaSeries series = expansion.coefficients(s);
    for (const auto& r : polynomial_roots(series.coeffs)) {
      if (std::abs(r.value - 1.0) < near && r.multiplicity > 1)
        fail(ErrorCode::DegenerateSeed, "z = 1 is a multiple spectral value at the seed");
    }
  }
  if (!ok) fail(ErrorCode::NoConvergence, "seed does not converge to a zero of d(s,1)");
  ChainCurve out;
  out.seed = {s, std::abs(expansion.value(s, 1.0).value), 1, detail::provenance(expansion)};
  out.samples.push_back({0.0, s});

  double theta = 0.0, h = opt.initial_step;
  while (theta < span) {
    h = std::min(h, span - theta);
    const ZetaValue v = expansion.value(s, u_of(theta));
    const cplx dsdt = -(v.dvalue_dz * cplx(0.0, sigma) * u_of(theta)) / v.dvalue_ds;
    if (!std::isfinite(dsdt.real()) || !std::isfinite(dsdt.imag()) || std::abs(dsdt) > 1e6)
      fail(ErrorCode::FoldPoint, "d/ds vanishes along the chain near s = " + std::to_string(s.real()) + "+" +
                                     std::to_string(s.imag()) + "i, theta = " + std::to_string(theta));
    const cplx pred = s + h * dsdt;
    auto [s_new, conv] = correct(pred, theta + h, iters);
    const bool close = std::abs(s_new - pred) <= 0.25 * std::abs(h * dsdt) + 1e-10;
    if (conv && close) {
      theta = theta + h >= span ? span : theta + h;
      s = s_new;
      out.samples.push_back({theta, s});
      if (iters <= 3) h = std::min(1.5 * h, opt.max_step);
      continue;
    }
    h *= 0.5;
    if (h < opt.min_step)
      fail(ErrorCode::FoldPoint, "chain continuation stalled near s = " + std::to_string(s.real()) + "+" +
                                     std::to_string(s.imag()) + "i, theta = " + std::to_string(theta));
  }
  out.end = {s, std::abs(expansion.value(s, u_of(span)).value), 1, detail::provenance(expansion)};
  return out;
}

}  // namespace rchain

#endif  // RCHAIN_SPECTRAL_HPP
