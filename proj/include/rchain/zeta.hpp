#ifndef RCHAIN_ZETA_HPP
#define RCHAIN_ZETA_HPP

// Truncated cycle expansions d(s, z) = exp(-sum_n a_n(s) z^n) = sum_k b_k(s) z^k
// for the Schottky and 3-disk flavors, plus the topological pressure.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rchain/compensated.hpp"
#include "rchain/disk_billiard.hpp"
#include "rchain/error.hpp"
#include "rchain/parallel.hpp"
#include "rchain/schottky.hpp"

namespace rchain {

using cplx = std::complex<double>;

/// Complex number with double-double parts, for compensated polynomial products.
struct DDComplex {
  DoubleDouble re, im;
  DDComplex(double x = 0.0) : re(x), im(0.0) {}  // NOLINT(implicit)
  DDComplex(DoubleDouble r, DoubleDouble i) : re(r), im(i) {}
  friend DDComplex operator+(const DDComplex& x, const DDComplex& y) { return {x.re + y.re, x.im + y.im}; }
  friend DDComplex operator-(const DDComplex& x, const DDComplex& y) { return {x.re - y.re, x.im - y.im}; }
};

inline cplx mul(cplx x, cplx y) { return x * y; }
inline DDComplex mul(cplx x, const DDComplex& y) {
  const DoubleDouble xr(x.real()), xi(x.imag());
  return {xr * y.re - xi * y.im, xr * y.im + xi * y.re};
}
inline DDComplex mul(const DDComplex& x, const DDComplex& y) {
  return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}
inline cplx to_cplx(cplx x) { return x; }
inline cplx to_cplx(const DDComplex& x) { return {x.re.value(), x.im.value()}; }

enum class FlavorKind { SchottkyGen, DiskClassical, DiskQuantumA, DiskQuantumB, DiskGV, DiskPressure };

struct ZetaFlavor {
  FlavorKind kind = FlavorKind::SchottkyGen;
  SchottkySurface surface{};
  OrderSpec order{};
  Alphabet alphabet = Alphabet::full;
  DiskSystem disks{};
  double beta = 1.0;

  static ZetaFlavor schottky(const SchottkySurface& surface, OrderSpec order = {},
                             Alphabet alphabet = Alphabet::full) {
    ZetaFlavor f;
    f.kind = FlavorKind::SchottkyGen;
    f.surface = surface;
    f.order = order;
    f.alphabet = alphabet;
    return f;
  }
  static ZetaFlavor disk(const DiskSystem& sys, DiskWeight weight, double beta = 1.0) {
    if (!std::isfinite(beta)) fail(ErrorCode::NonFinite, "beta must be finite");
    ZetaFlavor f;
    f.disks = sys;
    f.beta = beta;
    switch (weight) {
      case DiskWeight::Classical: f.kind = FlavorKind::DiskClassical; break;
      case DiskWeight::QuantumA: f.kind = FlavorKind::DiskQuantumA; break;
      case DiskWeight::QuantumB: f.kind = FlavorKind::DiskQuantumB; break;
      case DiskWeight::GV: f.kind = FlavorKind::DiskGV; break;
      case DiskWeight::Pressure: f.kind = FlavorKind::DiskPressure; break;
    }
    return f;
  }

  bool is_schottky() const { return kind == FlavorKind::SchottkyGen; }

  DiskWeight disk_weight() const {
    switch (kind) {
      case FlavorKind::DiskQuantumA: return DiskWeight::QuantumA;
      case FlavorKind::DiskQuantumB: return DiskWeight::QuantumB;
      case FlavorKind::DiskGV: return DiskWeight::GV;
      case FlavorKind::DiskPressure: return DiskWeight::Pressure;
      default: return DiskWeight::Classical;
    }
  }

  /// Largest order weight, used by the trust-radius policy.
  int max_order_weight() const { return is_schottky() ? order.max_weight() : 1; }

  std::string describe() const {
    std::ostringstream out;
    out.precision(17);
    if (is_schottky()) {
      out << "schottky(" << surface.l1 << ',' << surface.l2 << ',' << surface.l3 << ";" << order.describe()
          << ";" << to_string(alphabet) << ")";
    } else {
      out << "disks(R=" << disks.center_spacing << ",a=" << disks.disk_radius << ";" << to_string(disk_weight());
      if (kind == FlavorKind::DiskPressure) out << ";beta=" << beta;
      out << ")";
    }
    return out.str();
  }
};

enum class PrecisionMode { Auto, Standard, Compensated };

inline std::string to_string(PrecisionMode p) {
  switch (p) {
    case PrecisionMode::Standard: return "standard";
    case PrecisionMode::Compensated: return "compensated";
    case PrecisionMode::Auto: break;
  }
  return "auto";
}

inline constexpr int kDefaultWordLength = 12;
inline constexpr int kDefaultTopologicalLength = 10;

/// How b_k are formed. Both give the same coefficients in exact arithmetic.
/// `recurrence` runs the cumulant recurrence on a_n and is fast; it loses
/// digits when |a_n| is large (Re s < 0). `product` multiplies out the
/// Euler-product factors and stays accurate there. `automatic` runs the
/// recurrence and falls back to the product when cancellation exceeds 1e5.
enum class ExpansionMethod { Automatic, Product, Recurrence };

inline std::string to_string(ExpansionMethod m) {
  switch (m) {
    case ExpansionMethod::Product: return "product";
    case ExpansionMethod::Recurrence: return "recurrence";
    case ExpansionMethod::Automatic: break;
  }
  return "auto";
}

inline constexpr double kMaxRecurrenceCancellation = 1e5;

struct TruncationPlan {
  int max_length = 0;  // J (Schottky words) or N (disk cycles); 0 selects the default
  int max_order = 0;   // K; 0 selects the attainable order
  PrecisionMode precision = PrecisionMode::Auto;
  ExpansionMethod method = ExpansionMethod::Automatic;
  int threads = 0;  // 0: RC_THREADS or hardware concurrency
  std::size_t chunk = 2048;
};

/// One primitive orbit (or a merged set of primitive orbits with equal data).
struct OrbitRecord {
  double length = 0.0;
  double stability = 0.0;  // signed for disks, e^length for surfaces
  long order = 0;
  int symbol_length = 0;
  int multiplicity = 1;
  std::string label;
};

struct BinnedTraces {
  std::vector<cplx> a;   // a[n], n = 0..K, a[0] = 0
  std::vector<cplx> da;  // d a[n] / ds
  bool compensated = false;
};

struct ZetaSeries {
  cplx s{};
  std::vector<cplx> coeffs;
  std::vector<cplx> dcoeffs;
  std::string flavor;
  TruncationPlan plan{};
  double tail_estimate = 0.0;
  bool compensated = false;

  int max_order() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct ZetaValue {
  cplx value{};
  cplx dvalue_ds{};
  cplx dvalue_dz{};
  double tail = 0.0;
};

inline ZetaValue evaluate(const ZetaSeries& series, cplx z) {
  ZetaValue out;
  const auto& b = series.coeffs;
  const auto& db = series.dcoeffs;
  for (std::size_t k = b.size(); k-- > 0;) {
    out.dvalue_dz = out.dvalue_dz * z + out.value;
    out.value = out.value * z + b[k];
    out.dvalue_ds = out.dvalue_ds * z + db[k];
  }
  const int K = series.max_order();
  out.tail = K >= 0 ? std::abs(b.back()) * std::pow(std::abs(z), K) : 0.0;
  return out;
}

/// b_k from the explicit sum over compositions (n_1..n_r) of k:
/// b_k = sum_r (-1)^r / r! sum prod a_{n_i}. Also returns sum of |terms|.
inline std::pair<cplx, double> partition_coefficient(const std::vector<cplx>& a, int k) {
  cplx total{};
  double scale = 0.0;
  std::vector<int> parts;
  auto rec = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      cplx term = 1.0;
      double fact = 1.0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        term *= a[static_cast<std::size_t>(parts[i])];
        fact *= static_cast<double>(i + 1);
      }
      term *= (parts.size() % 2 == 0 ? 1.0 : -1.0) / fact;
      total += term;
      scale += std::abs(term);
      return;
    }
    for (int n = 1; n <= remaining; ++n) {
      parts.push_back(n);
      self(self, remaining - n);
      parts.pop_back();
    }
  };
  rec(rec, k);
  return {total, scale};
}

/// Cumulant recurrence k b_k = -sum_{l=1..k} l a_l b_{k-l}, with derivative.
/// Returns the cancellation ratio max_k (sum of |terms|) / max_k |b_k|.
inline double recurrence(const BinnedTraces& tr, std::vector<cplx>& b, std::vector<cplx>& db) {
  const std::size_t K = tr.a.size() - 1;
  b.assign(K + 1, cplx{});
  db.assign(K + 1, cplx{});
  b[0] = 1.0;
  double terms = 1.0, largest = 1.0;
  for (std::size_t k = 1; k <= K; ++k) {
    ComplexAccumulator sum(tr.compensated), dsum(tr.compensated);
    double mag = 0.0;
    for (std::size_t l = 1; l <= k; ++l) {
      if (tr.a[l] == cplx{} && tr.da[l] == cplx{}) continue;
      const double dl = static_cast<double>(l);
      const cplx term = dl * tr.a[l] * b[k - l];
      sum.add(term);
      mag += std::abs(term);
      dsum.add(dl * (tr.da[l] * b[k - l] + tr.a[l] * db[k - l]));
    }
    b[k] = -sum.value() / static_cast<double>(k);
    db[k] = -dsum.value() / static_cast<double>(k);
    terms = std::max(terms, mag / static_cast<double>(k));
    largest = std::max(largest, std::abs(b[k]));
  }
  return terms / largest;
}

/// Self-test of the recurrence against the composition formula for k <= 4.
inline void check_partition_identity(const BinnedTraces& tr, const std::vector<cplx>& b) {
  const int kmax = std::min<int>(4, static_cast<int>(b.size()) - 1);
  for (int k = 1; k <= kmax; ++k) {
    const auto [direct, scale] = partition_coefficient(tr.a, k);
    if (std::abs(direct - b[static_cast<std::size_t>(k)]) > 1e-12 * scale + 1e-300)
      fail(ErrorCode::Internal, "recurrence and partition formula disagree at k=" + std::to_string(k));
  }
}

/// Orbit data for one flavor and truncation, computed once and reused for
/// every s. Summation order is the order of `orbits()`.
class CycleExpansion {
 public:
  explicit CycleExpansion(ZetaFlavor flavor, TruncationPlan plan = {}) : flavor_(std::move(flavor)), plan_(plan) {
    if (plan_.max_length < 0 || plan_.max_order < 0)
      fail(ErrorCode::PlanInvalid, "truncation lengths must be non-negative");
    if (flavor_.is_schottky()) {
      if (plan_.max_length == 0) plan_.max_length = kDefaultWordLength;
      build_schottky();
    } else {
      if (plan_.max_length == 0) plan_.max_length = kDefaultTopologicalLength;
      build_disks();
    }
    if (plan_.max_order == 0) plan_.max_order = static_cast<int>(attainable_);
    if (plan_.max_order > attainable_)
      fail(ErrorCode::PlanInvalid, "K = " + std::to_string(plan_.max_order) + " exceeds the attainable order " +
                                       std::to_string(attainable_) + " for this truncation");
    for (std::size_t i = 0; i < orbits_.size(); ++i) {
      if (orbits_[i].order < 1)
        fail(ErrorCode::PlanInvalid, "orbit " + orbits_[i].label + " has order 0; choose a smaller base length");
    }
  }

  const ZetaFlavor& flavor() const { return flavor_; }
  const TruncationPlan& plan() const { return plan_; }
  int max_order() const { return plan_.max_order; }
  long attainable_order() const { return attainable_; }
  const std::vector<OrbitRecord>& orbits() const { return orbits_; }
  const std::vector<DiskOrbit>& disk_orbits() const { return disk_orbits_; }

  bool compensated_at(cplx s) const {
    switch (plan_.precision) {
      case PrecisionMode::Standard: return false;
      case PrecisionMode::Compensated: return true;
      case PrecisionMode::Auto: break;
    }
    return std::abs(s.imag()) > 40.0 || flavor_.max_order_weight() > 4;
  }

  /// Weight of one fixed point of the r-th repetition of orbit p, and its s-derivative.
  std::pair<cplx, cplx> weight(const OrbitRecord& p, cplx s, int r) const {
    cplx w;
    if (flavor_.is_schottky()) {
      const double rl = r * p.length;
      w = std::exp(-s * rl) / (1.0 - std::exp(-rl));
    } else {
      w = orbit_weight(p.length, p.stability, s, flavor_.disk_weight(), r, flavor_.beta);
    }
    return {w, -(r * p.length) * w};
  }

  BinnedTraces binned_traces(cplx s) const {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) fail(ErrorCode::NonFinite, "s must be finite");
    const bool comp = compensated_at(s);
    const auto K = static_cast<std::size_t>(plan_.max_order);
    const long J = plan_.max_length;

    struct Acc {
      std::vector<ComplexAccumulator> a, da;
    };
    auto make = [&] {
      return Acc{std::vector<ComplexAccumulator>(K + 1, ComplexAccumulator(comp)),
                 std::vector<ComplexAccumulator>(K + 1, ComplexAccumulator(comp))};
    };
    auto fold = [&](Acc& acc, std::size_t i) {
      const OrbitRecord& p = orbits_[i];
      for (int r = 1; r * p.symbol_length <= J && r * p.order <= static_cast<long>(K); ++r) {
        auto [w, dw] = weight(p, s, r);
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
          fail(ErrorCode::NumericOverflow, "weight of orbit " + p.label + " (repetition " + std::to_string(r) +
                                               ") is not finite at this s");
        const double scale = static_cast<double>(p.multiplicity) / r;
        const auto n = static_cast<std::size_t>(r * p.order);
        acc.a[n].add(scale * w);
        acc.da[n].add(scale * dw);
      }
    };
    auto combine = [](Acc& x, const Acc& y) {
      for (std::size_t n = 0; n < x.a.size(); ++n) {
        x.a[n].merge(y.a[n]);
        x.da[n].merge(y.da[n]);
      }
    };
    const Acc acc = chunked_reduce<Acc>(orbits_.size(), plan_.chunk, resolve_threads(plan_.threads), make, fold,
                                        combine);
    BinnedTraces out;
    out.compensated = comp;
    out.a.resize(K + 1);
    out.da.resize(K + 1);
    for (std::size_t n = 0; n <= K; ++n) {
      out.a[n] = acc.a[n].value();
      out.da[n] = acc.da[n].value();
    }
    return out;
  }

  /// b_k through binned traces and the cumulant recurrence, with the
  /// composition-formula self-test for k <= 4.
  ZetaSeries coefficients_by_recurrence(cplx s, double* cancellation = nullptr) const {
    const BinnedTraces tr = binned_traces(s);
    ZetaSeries series = empty_series(s, tr.compensated);
    const double ratio = recurrence(tr, series.coeffs, series.dcoeffs);
    if (cancellation) *cancellation = ratio;
    check_partition_identity(tr, series.coeffs);
    series.tail_estimate = std::abs(series.coeffs.back());
    return series;
  }

  /// b_k by expanding prod_p prod_j (1 - z^{n_p} c_{p,j}(s))^{e_j} to order K.
  /// Schottky: c_{p,j} = e^{-(s+j) l_p}, e_j = 1. Disks: c_{p,j} = t_p(s) / Lambda_p^j
  /// with e_j = j + 1 (e_j = 1 for the GV weight).
  ZetaSeries coefficients_by_product(cplx s) const {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) fail(ErrorCode::NonFinite, "s must be finite");
    const bool comp = compensated_at(s);
    const auto K = static_cast<std::size_t>(plan_.max_order);
    ZetaSeries series = empty_series(s, comp);
    if (comp) {
      product_expand<DDComplex>(s, K, series);
    } else {
      product_expand<cplx>(s, K, series);
    }
    series.tail_estimate = std::abs(series.coeffs.back());
    return series;
  }

  ZetaSeries coefficients(cplx s) const {
    switch (plan_.method) {
      case ExpansionMethod::Product: return coefficients_by_product(s);
      case ExpansionMethod::Recurrence: return coefficients_by_recurrence(s);
      case ExpansionMethod::Automatic: break;
    }
    double cancellation = 0.0;
    ZetaSeries series = coefficients_by_recurrence(s, &cancellation);
    return cancellation <= kMaxRecurrenceCancellation ? series : coefficients_by_product(s);
  }

  ZetaValue value(cplx s, cplx z) const { return evaluate(coefficients(s), z); }

 private:
  ZetaSeries empty_series(cplx s, bool comp) const {
    ZetaSeries series;
    series.s = s;
    series.flavor = flavor_.describe();
    series.plan = plan_;
    series.compensated = comp;
    return series;
  }

  /// Constant factor g_p in c_{p,0}(s) = g_p e^{-s L_p}, the ratio c_{p,j+1}/c_{p,j},
  /// and whether the exponent grows as j + 1.
  struct FactorData {
    double gain = 1.0;
    double ratio = 0.0;
    bool growing = false;
  };

  FactorData factor_data(const OrbitRecord& p) const {
    if (flavor_.is_schottky()) return {1.0, std::exp(-p.length), false};
    const double lam = p.stability, mag = std::abs(lam), sgn = lam < 0.0 ? -1.0 : 1.0;
    switch (flavor_.disk_weight()) {
      case DiskWeight::Classical: return {1.0 / mag, 1.0 / lam, true};
      case DiskWeight::QuantumA: return {sgn / std::sqrt(mag), 1.0 / lam, true};
      case DiskWeight::QuantumB: return {1.0 / (mag * std::sqrt(mag)), 1.0 / lam, true};
      case DiskWeight::GV: return {sgn / std::sqrt(mag), 1.0 / lam, false};
      case DiskWeight::Pressure: return {std::pow(mag, -flavor_.beta), 1.0 / lam, true};
    }
    return {};
  }

  template <class T>
  struct PolyPair {
    std::vector<T> p, dp;
  };

  template <class T>
  void product_expand(cplx s, std::size_t K, ZetaSeries& series) const {
    auto make = [&] {
      PolyPair<T> acc{std::vector<T>(K + 1, T(0.0)), std::vector<T>(K + 1, T(0.0))};
      acc.p[0] = T(1.0);
      return acc;
    };
    auto fold = [&](PolyPair<T>& acc, std::size_t i) {
      const OrbitRecord& o = orbits_[i];
      if (o.order < 1 || static_cast<std::size_t>(o.order) > K) return;
      const auto n = static_cast<std::size_t>(o.order);
      const FactorData f = factor_data(o);
      cplx c = f.gain * std::exp(-s * o.length);
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        fail(ErrorCode::NumericOverflow, "factor of orbit " + o.label + " is not finite at this s");
      const double floor = 1e-18 / std::max(1.0, std::abs(c));
      double rho = 1.0;
      for (int j = 0; j < 400 && rho > floor; ++j) {
        const cplx dc = -o.length * c;
        const int reps = o.multiplicity * (f.growing ? j + 1 : 1);
        for (int e = 0; e < reps; ++e) {
          for (std::size_t k = K; k >= n; --k) {
            acc.dp[k] = acc.dp[k] - mul(c, acc.dp[k - n]) - mul(dc, acc.p[k - n]);
            acc.p[k] = acc.p[k] - mul(c, acc.p[k - n]);
            if (k == n) break;
          }
        }
        c *= f.ratio;
        rho *= std::abs(f.ratio);
      }
    };
    auto combine = [&](PolyPair<T>& x, const PolyPair<T>& y) {
      std::vector<T> p(K + 1, T(0.0)), dp(K + 1, T(0.0));
      for (std::size_t i = 0; i <= K; ++i)
        for (std::size_t j = 0; i + j <= K; ++j) {
          p[i + j] = p[i + j] + mul(x.p[i], y.p[j]);
          dp[i + j] = dp[i + j] + mul(x.dp[i], y.p[j]) + mul(x.p[i], y.dp[j]);
        }
      x.p = std::move(p);
      x.dp = std::move(dp);
    };
    const PolyPair<T> acc = chunked_reduce<PolyPair<T>>(orbits_.size(), plan_.chunk,
                                                         resolve_threads(plan_.threads), make, fold, combine);
    series.coeffs.resize(K + 1);
    series.dcoeffs.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
      series.coeffs[k] = to_cplx(acc.p[k]);
      series.dcoeffs[k] = to_cplx(acc.dp[k]);
    }
  }

  void build_schottky() {
    const int J = plan_.max_length;
    auto classes = primitive_classes(flavor_.surface, J, flavor_.order, flavor_.alphabet);
    // Group classes that carry identical data; symmetric surfaces have many.
    std::stable_sort(classes.begin(), classes.end(), [](const ClassRecord& x, const ClassRecord& y) {
      const auto nx = x.cls.canonical_word.size(), ny = y.cls.canonical_word.size();
      if (nx != ny) return nx < ny;
      if (x.record.order != y.record.order) return x.record.order < y.record.order;
      return x.record.length < y.record.length;
    });
    for (const auto& c : classes) {
      const int len = static_cast<int>(c.cls.canonical_word.size());
      if (!orbits_.empty()) {
        OrbitRecord& last = orbits_.back();
        if (last.symbol_length == len && last.order == c.record.order &&
            std::abs(last.length - c.record.length) <= 1e-13 * last.length) {
          ++last.multiplicity;
          continue;
        }
      }
      orbits_.push_back({c.record.length, c.record.stability, c.record.order, len, 1,
                         c.cls.canonical_word.to_string()});
    }
    attainable_ = schottky_attainable(classes);
  }

  long schottky_attainable(const std::vector<ClassRecord>& classes) const {
    const int J = plan_.max_length;
    const auto& order = flavor_.order;
    if (const auto* f = order.funnel()) {
      // Omitted words have >= J+1 letters; each letter adds at least half the
      // smallest doubled pair weight.
      long min_doubled = std::numeric_limits<long>::max();
      for (auto x : alphabet_symbols(flavor_.alphabet))
        for (auto y : alphabet_symbols(flavor_.alphabet))
          if (Word::adjacent_ok(x, y)) min_doubled = std::min(min_doubled, OrderSpec::doubled_pair_weight(*f, x, y));
      long best = std::numeric_limits<long>::max();
      for (int m = J + 1; static_cast<long>(m) * min_doubled / 2 < best; ++m)
        best = std::min(best, min_funnel_order(*f, m, flavor_.alphabet));
      return best - 1;
    }
    if (const auto* rb = order.round()) {
      // Heuristic: extrapolate the shortest J-letter length to J+1 letters.
      double shortest = std::numeric_limits<double>::infinity();
      for (const auto& c : classes)
        if (static_cast<int>(c.cls.canonical_word.size()) == J) shortest = std::min(shortest, c.record.length);
      if (!std::isfinite(shortest)) {
        for (const auto& c : classes)
          shortest = std::min(shortest, c.record.length * J / static_cast<double>(c.cls.canonical_word.size()));
      }
      const double bound = shortest * (J + 1) / J;
      return std::max<long>(1, std::lround(std::floor(bound / rb->base - 0.5)));
    }
    return J;
  }

  void build_disks() {
    const int N = plan_.max_length;
    for (const auto& cycle : prime_cycles(N)) {
      DiskOrbit orbit = find_orbit(flavor_.disks, cycle);
      orbits_.push_back({orbit.length, orbit.stability, static_cast<long>(cycle.size()),
                         static_cast<int>(cycle.size()), 1, cycle.to_string()});
      disk_orbits_.push_back(std::move(orbit));
    }
    attainable_ = N;
  }

  ZetaFlavor flavor_;
  TruncationPlan plan_;
  std::vector<OrbitRecord> orbits_;
  std::vector<DiskOrbit> disk_orbits_;
  long attainable_ = 0;
};

/// Gutzwiller-Voros quotient d_a / d_b.
inline cplx gv_value(const ZetaSeries& series_a, const ZetaSeries& series_b, cplx z) {
  const cplx num = evaluate(series_a, z).value;
  const cplx den = evaluate(series_b, z).value;
  if (std::abs(den) < 1e-8) fail(ErrorCode::DenominatorNearZero, "|d_b| < 1e-8 at this (s, z)");
  return num / den;
}

struct PressureResult {
  double value = 0.0;
  double residual = 0.0;
  double tail = 0.0;
};

/// Largest real s in `bracket` with d_beta(s, 1) = 0, where d_beta is the
/// pressure-weighted disk expansion.
inline PressureResult pressure(const DiskSystem& sys, double beta, std::pair<double, double> bracket,
                               const TruncationPlan& plan = {}, int scan_steps = 400) {
  auto [lo, hi] = bracket;
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    fail(ErrorCode::InvalidArgument, "pressure bracket must be a finite interval lo < hi");
  const CycleExpansion exp(ZetaFlavor::disk(sys, DiskWeight::Pressure, beta), plan);
  auto f = [&](double s) { return exp.value(cplx(s, 0.0), 1.0); };

  double upper = hi;
  double f_upper = f(hi).value.real();
  double lower = lo;
  bool found = false;
  for (int i = 1; i <= scan_steps; ++i) {
    const double x = hi - (hi - lo) * i / scan_steps;
    const double fx = f(x).value.real();
    if ((fx <= 0.0) != (f_upper <= 0.0)) {
      lower = x;
      found = true;
      break;
    }
    upper = x;
    f_upper = fx;
  }
  if (!found) fail(ErrorCode::NoBracket, "d(s,1) keeps its sign on the pressure bracket");

  const bool upper_positive = f_upper > 0.0;
  for (int i = 0; i < 200 && upper - lower > 1e-12 * std::max(1.0, std::abs(upper)); ++i) {
    const double mid = 0.5 * (lower + upper);
    if ((f(mid).value.real() > 0.0) == upper_positive) {
      upper = mid;
    } else {
      lower = mid;
    }
  }
  double s = 0.5 * (lower + upper);
  for (int i = 0; i < 3; ++i) {
    const ZetaValue v = f(s);
    if (v.dvalue_ds.real() == 0.0) break;
    const double next = s - v.value.real() / v.dvalue_ds.real();
    if (!(next >= lower - 1e-9 && next <= upper + 1e-9)) break;
    s = next;
  }
  const ZetaValue v = f(s);
  return {s, std::abs(v.value), v.tail};
}

}  // namespace rchain

#endif  // RCHAIN_ZETA_HPP
