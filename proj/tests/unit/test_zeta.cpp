#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "rchain/zeta.hpp"

using namespace rchain;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const SchottkySurface& x12() {
  static const SchottkySurface s = build_surface(12, 12, 12);
  return s;
}

TruncationPlan with_length(int J) {
  TruncationPlan p;
  p.max_length = J;
  return p;
}

// Closed form for the cylinder alphabet: two primitive classes of length l.
cplx cylinder_product(cplx s, double l, cplx z) {
  cplx out = 1.0;
  for (int m = 0; m < 60; ++m) {
    const cplx f = 1.0 - z * std::exp(-(s + double(m)) * l);
    out *= f * f;
  }
  return out;
}

// Smallest period of a cyclic binary string.
int root_period(const std::vector<std::uint8_t>& x) {
  const int n = static_cast<int>(x.size());
  for (int d = 1; d <= n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = x[i] == x[(i + d) % n];
    if (ok) return d;
  }
  return n;
}

// a_n as (1/n) times the sum over all 2^n binary strings.
cplx disk_trace_brute(const DiskSystem& sys, int n, cplx s, DiskWeight kind) {
  cplx sum = 0.0;
  for (long code = 0; code < (1L << n); ++code) {
    std::vector<std::uint8_t> x(n);
    for (int i = 0; i < n; ++i) x[i] = (code >> i) & 1;
    const int d = root_period(x);
    std::vector<std::uint8_t> root(x.begin(), x.begin() + d);
    BinaryCycle c{Word(root).canonical().symbols()};
    const DiskOrbit o = find_orbit(sys, c);
    sum += orbit_weight(o.length, o.stability, s, kind, n / d);
  }
  return sum / double(n);
}

}  // namespace

TEST_CASE("cylinder traces have the closed form") {
  const CycleExpansion e(ZetaFlavor::schottky(x12(), {}, Alphabet::cylinder));
  const cplx s(0.3, 2.0);
  const auto tr = e.binned_traces(s);
  REQUIRE(tr.a.size() == 13);
  CHECK(tr.a[0] == cplx(0.0));
  for (int n = 1; n <= 12; ++n) {
    const cplx want = 2.0 / n * std::exp(-s * (12.0 * n)) / (1.0 - std::exp(-12.0 * n));
    CHECK(std::abs(tr.a[n] - want) <= 1e-13 * std::abs(want));
  }
  const auto series = e.coefficients(s);
  CHECK(series.coeffs[0] == cplx(1.0));
  const cplx b1 = -2.0 * std::exp(-12.0 * s) / (1.0 - std::exp(-12.0));
  CHECK(std::abs(series.coeffs[1] - b1) <= 1e-13 * std::abs(b1));
}

TEST_CASE("low coefficients match the hand-expanded exponential") {
  const CycleExpansion e(ZetaFlavor::schottky(x12(), OrderSpec::funnel_winding(1, 1, 1)), with_length(8));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> re(0.05, 2.0), im(-60.0, 60.0);
  for (int i = 0; i < 10; ++i) {
    const cplx s(re(rng), im(rng));
    const auto tr = e.binned_traces(s);
    const auto& a = tr.a;
    std::vector<cplx> b;
    std::vector<cplx> db;
    recurrence(tr, b, db);
    const cplx want[5] = {
        1.0,
        -a[1],
        a[1] * a[1] / 2.0 - a[2],
        -a[3] + a[1] * a[2] - a[1] * a[1] * a[1] / 6.0,
        -a[4] + a[1] * a[3] + a[2] * a[2] / 2.0 - a[1] * a[1] * a[2] / 2.0 + std::pow(a[1], 4) / 24.0,
    };
    for (int k = 0; k <= 4; ++k) {
      CHECK(std::abs(b[k] - want[k]) <= 1e-12 * std::max(1.0, std::abs(want[k])));
      CHECK(std::abs(partition_coefficient(a, k).first - want[k]) <= 1e-12 * std::max(1.0, std::abs(want[k])));
    }
    CHECK_NOTHROW(check_partition_identity(tr, b));
  }
}

TEST_CASE("z = 0 gives 1") {
  const CycleExpansion e(ZetaFlavor::schottky(x12()), with_length(6));
  CHECK(e.value({0.4, 9.0}, 0.0).value == cplx(1.0));
  const CycleExpansion d(ZetaFlavor::disk(make_disk_system(6), DiskWeight::GV), with_length(6));
  CHECK(d.value({-0.2, 18.0}, 0.0).value == cplx(1.0));
}

TEST_CASE("cylinder expansion equals the closed-form product") {
  const CycleExpansion e(ZetaFlavor::schottky(x12(), {}, Alphabet::cylinder));
  for (cplx s : {cplx(2.0, 0.0), cplx(2.0, 5.0), cplx(0.1, 0.3), cplx(0.0, 1.0)}) {
    const cplx want = cylinder_product(s, 12.0, 1.0);
    CHECK(std::abs(e.value(s, 1.0).value - want) <= 1e-10 * std::abs(want));
  }
  // Left of the critical line the Newton recurrence loses all digits; the
  // automatic method switches to the product form.
  const cplx s(-0.5, 3.0);
  double cancellation = 0.0;
  e.coefficients_by_recurrence(s, &cancellation);
  CHECK(cancellation > kMaxRecurrenceCancellation);
  const cplx want = cylinder_product(s, 12.0, 1.0);
  CHECK(std::abs(e.value(s, 1.0).value - want) <= 1e-10 * std::abs(want));
}

TEST_CASE("surface expansion equals the truncated Selberg product") {
  const int J = 8;
  const CycleExpansion e(ZetaFlavor::schottky(x12()), with_length(J));
  const auto classes = primitive_classes(x12(), J, OrderSpec::bowen_series());
  for (cplx s : {cplx(0.5, 7.0), cplx(0.3, 2.0), cplx(3.0, 0.0)}) {
    // Product of (1 - z^|w| e^{-(s+m) l}) kept to degree J in z.
    std::vector<cplx> poly(J + 1, 0.0);
    poly[0] = 1.0;
    for (const auto& c : classes) {
      const auto n = c.cls.canonical_word.size();
      for (int m = 0; m < 8; ++m) {
        const cplx f = std::exp(-(s + double(m)) * c.record.length);
        for (std::size_t k = J; k >= n; --k) poly[k] -= f * poly[k - n];
      }
    }
    cplx prod = 0.0;
    for (cplx b : poly) prod += b;
    const cplx got = e.value(s, 1.0).value;
    CHECK(std::abs((1.0 - got) - (1.0 - prod)) <= 1e-10 * std::abs(1.0 - prod) + 1e-15);
  }
}

TEST_CASE("d(s,1) does not depend on the order specification") {
  const auto& X = x12();
  const std::vector<CycleExpansion> e = {
      CycleExpansion(ZetaFlavor::schottky(X)),
      CycleExpansion(ZetaFlavor::schottky(X, OrderSpec::funnel_winding(1, 1, 1))),
      CycleExpansion(ZetaFlavor::schottky(X, OrderSpec::funnel_winding(12, 12, 12))),
      CycleExpansion(ZetaFlavor::schottky(X, OrderSpec::round_to_base(12))),
  };
  for (cplx s : {cplx(0.5, 0), cplx(1, 0), cplx(1.5, 0), cplx(2, 0), cplx(3, 0), cplx(0.5, 3), cplx(1, 10),
                 cplx(2, 30), cplx(0.3, 62.8), cplx(0.2, 20)}) {
    const ZetaValue ref = e[0].value(s, 1.0);
    for (std::size_t i = 1; i < e.size(); ++i) {
      const ZetaValue v = e[i].value(s, 1.0);
      CHECK(std::abs(v.value - ref.value) <= 4.0 * (v.tail + ref.tail) + 1e-13);
    }
  }
}

TEST_CASE("real on the real axis and conjugation symmetric") {
  const CycleExpansion e(ZetaFlavor::schottky(build_surface(12, 13, 14), OrderSpec::funnel_winding(1, 1, 1)),
                         with_length(8));
  const CycleExpansion d(ZetaFlavor::disk(make_disk_system(6), DiskWeight::GV), with_length(8));
  for (double x : {-0.3, 0.1, 0.7}) {
    CHECK(std::abs(e.value(x, 1.0).value.imag()) <= 1e-14 * std::abs(e.value(x, 1.0).value));
    CHECK(std::abs(d.value(x, 1.0).value.imag()) <= 1e-14 * std::abs(d.value(x, 1.0).value));
  }
  for (cplx s : {cplx(0.1, 40.0), cplx(-0.2, 18.5), cplx(0.6, 3.0)}) {
    for (const CycleExpansion* x : {&e, &d}) {
      const cplx u = x->value(s, 1.0).value, w = x->value(std::conj(s), 1.0).value;
      CHECK(std::abs(u - std::conj(w)) <= 1e-12 * std::max(1.0, std::abs(u)));
    }
  }
}

TEST_CASE("s-derivative matches a finite difference") {
  const CycleExpansion e(ZetaFlavor::schottky(x12(), OrderSpec::funnel_winding(1, 1, 1)), with_length(10));
  const CycleExpansion d(ZetaFlavor::disk(make_disk_system(6), DiskWeight::GV), with_length(8));
  const double h = 1e-5;
  for (cplx s : {cplx(0.1, 62.8), cplx(0.5, 3.0), cplx(-0.2, -18.5)}) {
    for (const CycleExpansion* x : {&e, &d}) {
      const cplx fd = (x->value(s + h, 1.0).value - x->value(s - h, 1.0).value) / (2.0 * h);
      const cplx an = x->value(s, 1.0).dvalue_ds;
      CHECK(std::abs(an - fd) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("disk traces match the sum over binary strings") {
  const DiskSystem sys = make_disk_system(6);
  const cplx s(0.3, 5.0);
  for (DiskWeight kind : {DiskWeight::Classical, DiskWeight::GV, DiskWeight::QuantumA}) {
    const CycleExpansion e(ZetaFlavor::disk(sys, kind), with_length(6));
    const auto tr = e.binned_traces(s);
    for (int n = 1; n <= 6; ++n) {
      const cplx want = disk_trace_brute(sys, n, s, kind);
      CHECK(std::abs(tr.a[n] - want) <= 1e-12 * std::abs(want));
    }
  }
}

TEST_CASE("product, recurrence and explicit disk product agree") {
  const DiskSystem sys = make_disk_system(6);
  const cplx z = 0.05;
  for (DiskWeight kind : {DiskWeight::Classical, DiskWeight::GV}) {
    TruncationPlan rec = with_length(8), prod = with_length(8);
    rec.method = ExpansionMethod::Recurrence;
    prod.method = ExpansionMethod::Product;
    const CycleExpansion er(ZetaFlavor::disk(sys, kind), rec), ep(ZetaFlavor::disk(sys, kind), prod);
    for (cplx s : {cplx(0.3, 5.0), cplx(-0.2, 18.0), cplx(1.0, 0.0)}) {
      const auto br = er.coefficients(s).coeffs, bp = ep.coefficients(s).coeffs;
      for (std::size_t k = 0; k < br.size(); ++k)
        CHECK(std::abs(br[k] - bp[k]) <= 1e-10 * std::max(1.0, std::abs(bp[k])));
      // Explicit infinite product over k, truncated where the factors reach 1.
      cplx explicit_prod = 1.0;
      for (const auto& o : ep.disk_orbits()) {
        const double lam = o.stability, mag = std::abs(lam), sgn = lam < 0 ? -1.0 : 1.0;
        const cplx base = std::pow(z, double(o.cycle.size())) * std::exp(-s * o.length);
        for (int k = 0; k < 40; ++k) {
          if (kind == DiskWeight::Classical) {
            explicit_prod *= std::pow(1.0 - base / (mag * std::pow(lam, k)), k + 1);
          } else {
            explicit_prod *= 1.0 - sgn * base / (std::sqrt(mag) * std::pow(lam, k));
          }
        }
      }
      CHECK(std::abs(evaluate(ep.coefficients(s), z).value - explicit_prod) <= 1e-12 * std::abs(explicit_prod));
    }
  }
}

TEST_CASE("truncation is stable") {
  const DiskSystem sys = make_disk_system(6);
  const CycleExpansion e8(ZetaFlavor::disk(sys, DiskWeight::GV), with_length(8));
  const CycleExpansion e10(ZetaFlavor::disk(sys, DiskWeight::GV), with_length(10));
  for (cplx s : {cplx(-0.2, -18.0), cplx(0.3, 5.0), cplx(-0.45, 28.0)}) {
    const ZetaValue a = e8.value(s, 1.0), b = e10.value(s, 1.0);
    CHECK(std::abs(a.value - b.value) <= a.tail);
  }
  const CycleExpansion j8(ZetaFlavor::schottky(x12()), with_length(8));
  const CycleExpansion j12(ZetaFlavor::schottky(x12()), with_length(12));
  for (cplx s : {cplx(0.5, 7.0), cplx(0.2, 20.0)}) {
    const ZetaValue a = j8.value(s, 1.0), b = j12.value(s, 1.0);
    CHECK(std::abs(a.value - b.value) <= 4.0 * a.tail + 1e-14);
  }
}

TEST_CASE("results do not depend on the thread count") {
  for (PrecisionMode p : {PrecisionMode::Standard, PrecisionMode::Compensated}) {
    TruncationPlan one = with_length(10), four = with_length(10);
    one.precision = four.precision = p;
    one.threads = 1;
    four.threads = 4;
    one.chunk = four.chunk = 64;
    one.method = four.method = ExpansionMethod::Recurrence;
    const CycleExpansion a(ZetaFlavor::schottky(x12(), OrderSpec::funnel_winding(12, 12, 12)), one);
    const CycleExpansion b(ZetaFlavor::schottky(x12(), OrderSpec::funnel_winding(12, 12, 12)), four);
    const cplx s(0.115, 62.82);
    const auto ca = a.coefficients(s).coeffs, cb = b.coefficients(s).coeffs;
    REQUIRE(ca.size() == cb.size());
    for (std::size_t k = 0; k < ca.size(); ++k) CHECK(ca[k] == cb[k]);
  }
}

TEST_CASE("truncation plan validation") {
  const CycleExpansion e(ZetaFlavor::schottky(x12(), OrderSpec::funnel_winding(1, 1, 1)), with_length(6));
  TruncationPlan too_far = with_length(6);
  too_far.max_order = static_cast<int>(e.attainable_order()) + 1;
  CHECK_THROWS_MATCHES(CycleExpansion(ZetaFlavor::schottky(x12(), OrderSpec::funnel_winding(1, 1, 1)), too_far),
                       Error, Catch::Matchers::Predicate<Error>([](const Error& x) {
                         return x.code() == ErrorCode::PlanInvalid;
                       }));
  TruncationPlan negative;
  negative.max_length = -1;
  CHECK_THROWS_AS(CycleExpansion(ZetaFlavor::schottky(x12()), negative), Error);
  // A base far above every length rounds orbits to order 0.
  CHECK_THROWS_AS(CycleExpansion(ZetaFlavor::schottky(x12(), OrderSpec::round_to_base(100)), with_length(4)),
                  Error);
  CHECK(CycleExpansion(ZetaFlavor::schottky(x12()), with_length(7)).attainable_order() == 7);
  CHECK(CycleExpansion(ZetaFlavor::disk(make_disk_system(6), DiskWeight::GV), with_length(7)).attainable_order() ==
        7);
}

TEST_CASE("attainable funnel order matches the omitted words") {
  const auto X = build_surface(12, 12, 13);
  for (auto [n1, n2, n3] : {std::array{2, 4, 6}, std::array{1, 1, 1}, std::array{12, 12, 13}}) {
    const OrderSpec spec = OrderSpec::funnel_winding(n1, n2, n3);
    const int J = 4;
    const CycleExpansion e(ZetaFlavor::schottky(X, spec), with_length(J));
    long smallest = std::numeric_limits<long>::max();
    for (int n = J + 1; n <= 10; ++n)
      for (const auto& w : enumerate_words(n)) smallest = std::min(smallest, word_order(w, spec, 0.0));
    CHECK(e.attainable_order() == smallest - 1);
  }
}

TEST_CASE("orbit grouping keeps every class") {
  for (const auto& X : {x12(), build_surface(12, 12, 13), build_surface(12, 13, 14)}) {
    const CycleExpansion e(ZetaFlavor::schottky(X), with_length(8));
    long total = 0;
    for (const auto& o : e.orbits()) total += o.multiplicity;
    CHECK(total == static_cast<long>(primitive_classes(X, 8, OrderSpec::bowen_series()).size()));
  }
  const CycleExpansion sym(ZetaFlavor::schottky(x12()), with_length(8));
  const CycleExpansion asym(ZetaFlavor::schottky(build_surface(12, 13, 14)), with_length(8));
  CHECK(sym.orbits().size() < asym.orbits().size());
}

TEST_CASE("Gutzwiller-Voros quotient") {
  const DiskSystem sys = make_disk_system(6);
  const CycleExpansion gv(ZetaFlavor::disk(sys, DiskWeight::GV));
  const CycleExpansion qa(ZetaFlavor::disk(sys, DiskWeight::QuantumA));
  const CycleExpansion qb(ZetaFlavor::disk(sys, DiskWeight::QuantumB));
  const cplx s0(-0.2, -18.0);
  CHECK(gv_value(qa.coefficients(s0), qb.coefficients(s0), 0.0) == cplx(1.0));
  for (cplx s : {cplx(-0.2, -18.0), cplx(0.3, 5.0), cplx(-0.45, 28.0), cplx(0.1, 40.0)}) {
    const ZetaValue direct = gv.value(s, 1.0);
    const cplx q = gv_value(qa.coefficients(s), qb.coefficients(s), 1.0);
    CHECK(std::abs(q - direct.value) <= 4.0 * direct.tail + 1e-12 * std::abs(direct.value));
  }
}

TEST_CASE("topological pressure") {
  const DiskSystem sys = make_disk_system(6);
  const PressureResult p15 = pressure(sys, 1.5, {-3, 3});
  CHECK_THAT(p15.value, WithinAbs(-0.699, 0.01));
  CHECK(p15.residual < 1e-10);
  const double p05 = pressure(sys, 0.5, {-3, 3}).value;
  const double p10 = pressure(sys, 1.0, {-3, 3}).value;
  CHECK(p05 > p10);
  CHECK(p10 > p15.value);
  CHECK(p05 < 1.0);
  // The root is a zero of the pressure-weighted expansion.
  const CycleExpansion e(ZetaFlavor::disk(sys, DiskWeight::Pressure, 1.5));
  CHECK(std::abs(e.value(p15.value, 1.0).value) < 1e-10);
  CHECK_THROWS_MATCHES(pressure(sys, 1.5, {5, 6}), Error, Catch::Matchers::Predicate<Error>([](const Error& x) {
                         return x.code() == ErrorCode::NoBracket;
                       }));
  CHECK_THROWS_AS(pressure(sys, 1.5, {1, -1}), Error);
}
