#ifndef RCHAIN_SCHOTTKY_HPP
#define RCHAIN_SCHOTTKY_HPP

// Three-funneled Schottky surfaces X_{l1,l2,l3}: generators, admissible
// words of the Bowen-Series coding, and per-word geodesic data.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rchain/compensated.hpp"
#include "rchain/error.hpp"

namespace rchain {

template <class T>
struct Matrix2 {
  T a{1.0}, b{0.0}, c{0.0}, d{1.0};

  friend Matrix2 operator*(const Matrix2& x, const Matrix2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
  }
  T trace() const { return a + d; }
  T det() const { return a * d - b * c; }
};

using Mat2 = Matrix2<double>;
using Mat2DD = Matrix2<DoubleDouble>;

inline DoubleDouble sqrt_dd(DoubleDouble v) {
  if (v.hi() <= 0.0) return DoubleDouble(0.0);
  const double x = std::sqrt(v.hi());
  const DoubleDouble r = v - DoubleDouble(two_prod(x, x).hi, two_prod(x, x).lo);
  return DoubleDouble(x) + r / DoubleDouble(2.0 * x);
}

inline Mat2 to_double(const Mat2DD& m) { return {m.a.value(), m.b.value(), m.c.value(), m.d.value()}; }

/// Symbol sets of the word coding. `full` is the 3-funneled surface;
/// `cylinder` ({1,3}) keeps only the first generator and its inverse, which
/// realizes the hyperbolic cylinder of width l1; `single` ({1}) keeps one
/// orientation of that cylinder's geodesic.
enum class Alphabet { full, cylinder, single };

inline std::span<const std::uint8_t> alphabet_symbols(Alphabet alphabet) {
  static constexpr std::uint8_t kFull[] = {1, 2, 3, 4};
  static constexpr std::uint8_t kCylinder[] = {1, 3};
  static constexpr std::uint8_t kSingle[] = {1};
  switch (alphabet) {
    case Alphabet::cylinder: return kCylinder;
    case Alphabet::single: return kSingle;
    case Alphabet::full: break;
  }
  return kFull;
}

inline std::string to_string(Alphabet alphabet) {
  switch (alphabet) {
    case Alphabet::cylinder: return "cylinder";
    case Alphabet::single: return "single";
    case Alphabet::full: break;
  }
  return "full";
}

/// The surface X_{l1,l2,l3} with generators S1, S2 and S3 = S1^-1, S4 = S2^-1.
struct SchottkySurface {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  /// Conjugation parameter a > 1 of the second generator.
  double conj_param = 0.0;
  /// Generators held in double-double so that det = 1 to ~1e-30.
  std::array<Mat2DD, 4> gens{};

  const Mat2DD& generator_dd(int symbol) const { return gens[static_cast<std::size_t>(symbol - 1)]; }
  Mat2 generator(int symbol) const { return to_double(generator_dd(symbol)); }
};

/// Largest funnel length whose half-length cosh is representable.
inline constexpr double kMaxFunnelLength = 1419.0;

inline SchottkySurface build_surface(double l1, double l2, double l3) {
  for (double l : {l1, l2, l3}) {
    if (!std::isfinite(l) || !(l > 0.0))
      fail(ErrorCode::NonFinite, "funnel lengths must be positive finite numbers");
  }
  const double c1 = std::cosh(l1 / 2), c2 = std::cosh(l2 / 2), c3 = std::cosh(l3 / 2);
  const double cp = std::cosh((l1 + l2) / 2), cm = std::cosh((l1 - l2) / 2);
  if (!std::isfinite(c1) || !std::isfinite(c2) || !std::isfinite(c3) || !std::isfinite(cp)) {
    std::ostringstream msg;
    msg << "cosh overflows double precision; each length must be below " << kMaxFunnelLength
        << " and l1 + l2 below " << kMaxFunnelLength;
    fail(ErrorCode::Overflow, msg.str());
  }
  const DoubleDouble c1d(c1), c2d(c2), c3d(c3);
  const DoubleDouble s1d = sqrt_dd(c1d * c1d - DoubleDouble(1.0));
  const DoubleDouble s2d = sqrt_dd(c2d * c2d - DoubleDouble(1.0));

  // (a + 1/a) s1 s2 = 2 c1 c2 + 2 c3, with t -+ 2 formed without cancellation.
  const DoubleDouble s12 = s1d * s2d;
  const DoubleDouble t = (DoubleDouble(2.0) * c1d * c2d + DoubleDouble(2.0) * c3d) / s12;
  const DoubleDouble t_minus = DoubleDouble(2.0) * (DoubleDouble(cm) + c3d) / s12;
  const DoubleDouble t_plus = DoubleDouble(2.0) * (DoubleDouble(cp) + c3d) / s12;
  const DoubleDouble a = (t + sqrt_dd(t_minus * t_plus)) / DoubleDouble(2.0);
  const DoubleDouble inv_a = DoubleDouble(1.0) / a;

  SchottkySurface surface;
  surface.l1 = l1;
  surface.l2 = l2;
  surface.l3 = l3;
  surface.conj_param = a.value();
  surface.gens[0] = {c1d, s1d, s1d, c1d};
  surface.gens[1] = {c2d, a * s2d, inv_a * s2d, c2d};
  surface.gens[2] = {c1d, -s1d, -s1d, c1d};
  surface.gens[3] = {c2d, -(a * s2d), -(inv_a * s2d), c2d};
  return surface;
}

/// A word over {1,2,3,4}. Symbol i stands for generator S_i.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> symbols) {
    for (int s : symbols) symbols_.push_back(static_cast<std::uint8_t>(s));
  }
  explicit Word(std::vector<std::uint8_t> symbols) : symbols_(std::move(symbols)) {}

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  int operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<std::uint8_t>& symbols() const { return symbols_; }

  static bool adjacent_ok(int x, int y) { return x - y != 2 && y - x != 2; }

  /// Admissible in the cyclic sense: consecutive letters and last/first
  /// letters are never mutually inverse.
  bool is_admissible() const {
    if (symbols_.empty()) return false;
    for (auto s : symbols_)
      if (s < 1 || s > 4) return false;
    for (std::size_t i = 0; i + 1 < symbols_.size(); ++i)
      if (!adjacent_ok(symbols_[i], symbols_[i + 1])) return false;
    return adjacent_ok(symbols_.back(), symbols_.front());
  }

  Word rotated(std::size_t k) const {
    std::vector<std::uint8_t> out(symbols_);
    if (!out.empty()) std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k % out.size()), out.end());
    return Word(std::move(out));
  }

  /// Word of the inverse group element: reversed, each S_i replaced by S_i^-1.
  Word inverse() const {
    std::vector<std::uint8_t> out(symbols_.rbegin(), symbols_.rend());
    for (auto& s : out) s = static_cast<std::uint8_t>(s <= 2 ? s + 2 : s - 2);
    return Word(std::move(out));
  }

  /// Length of the shortest prefix whose repetition gives the word.
  std::size_t primitive_period() const {
    const std::size_t n = symbols_.size();
    for (std::size_t p = 1; p < n; ++p) {
      if (n % p != 0) continue;
      bool periodic = true;
      for (std::size_t i = p; i < n && periodic; ++i) periodic = symbols_[i] == symbols_[i - p];
      if (periodic) return p;
    }
    return n;
  }
  bool is_primitive() const { return primitive_period() == symbols_.size(); }

  /// Lexicographically minimal rotation.
  Word canonical() const {
    Word best = *this;
    for (std::size_t k = 1; k < symbols_.size(); ++k) {
      Word r = rotated(k);
      if (r < best) best = std::move(r);
    }
    return best;
  }

  /// Strictly smaller than every proper rotation (primitive and canonical).
  bool is_lyndon() const { return is_lyndon(symbols_.data(), symbols_.size()); }

  static bool is_lyndon(const std::uint8_t* w, std::size_t n) {
    for (std::size_t k = 1; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto x = w[(i + k) % n];
        if (x < w[i]) return false;
        if (x > w[i]) break;
        if (i + 1 == n) return false;  // equal rotation: not primitive
      }
    }
    return true;
  }

  std::string to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (i) out += ',';
      out += static_cast<char>('0' + symbols_[i]);
    }
    return out + ")";
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& x, const Word& y) { return x.symbols_ <=> y.symbols_; }

 private:
  std::vector<std::uint8_t> symbols_;
};

inline constexpr int kDefaultMaxWordLength = 16;

/// All cyclically admissible words of length n over the alphabet, in
/// lexicographic order.
inline std::vector<Word> enumerate_words(int n, Alphabet alphabet = Alphabet::full,
                                         int max_length = kDefaultMaxWordLength) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "word length must be at least 1");
  if (n > max_length)
    fail(ErrorCode::LimitExceeded, "word length " + std::to_string(n) + " exceeds configured maximum " +
                                       std::to_string(max_length));
  const auto letters = alphabet_symbols(alphabet);
  std::vector<Word> out;
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(n));
  auto rec = [&](auto&& self, std::size_t depth) -> void {
    if (depth == buf.size()) {
      if (Word::adjacent_ok(buf.back(), buf.front())) out.emplace_back(buf);
      return;
    }
    for (auto x : letters) {
      if (depth > 0 && !Word::adjacent_ok(buf[depth - 1], x)) continue;
      buf[depth] = x;
      self(self, depth + 1);
    }
  };
  rec(rec, 0);
  return out;
}

struct BowenSeriesOrder {
  friend bool operator==(const BowenSeriesOrder&, const BowenSeriesOrder&) = default;
};
struct FunnelWindingOrder {
  int n1 = 1, n2 = 1, n3 = 1;
  friend bool operator==(const FunnelWindingOrder&, const FunnelWindingOrder&) = default;
};
struct RoundToBaseOrder {
  double base = 1.0;
  friend bool operator==(const RoundToBaseOrder&, const RoundToBaseOrder&) = default;
};

/// Order function n(γ) attached to closed geodesics, realized on words.
class OrderSpec {
 public:
  using Variant = std::variant<BowenSeriesOrder, FunnelWindingOrder, RoundToBaseOrder>;

  OrderSpec() = default;
  explicit OrderSpec(Variant v) : v_(v) { validate(); }

  static OrderSpec bowen_series() { return OrderSpec(BowenSeriesOrder{}); }
  static OrderSpec funnel_winding(int n1, int n2, int n3) { return OrderSpec(FunnelWindingOrder{n1, n2, n3}); }
  static OrderSpec round_to_base(double base) { return OrderSpec(RoundToBaseOrder{base}); }

  const Variant& variant() const { return v_; }
  bool is_bowen_series() const { return std::holds_alternative<BowenSeriesOrder>(v_); }
  const FunnelWindingOrder* funnel() const { return std::get_if<FunnelWindingOrder>(&v_); }
  const RoundToBaseOrder* round() const { return std::get_if<RoundToBaseOrder>(&v_); }

  /// Largest per-funnel weight; 1 for the Bowen-Series order.
  int max_weight() const {
    if (const auto* f = funnel()) return std::max({f->n1, f->n2, f->n3});
    return 1;
  }

  /// Twice the pair weight n(x, y) of the funnel-winding order. Doubling keeps
  /// the n3/2 and (n1+n2)/2 entries exact.
  static long doubled_pair_weight(const FunnelWindingOrder& f, int x, int y) {
    if (x == y) return (x == 1 || x == 3) ? 2L * f.n1 : 2L * f.n2;
    const int lo = std::min(x, y), hi = std::max(x, y);
    if ((lo == 1 && hi == 4) || (lo == 2 && hi == 3)) return f.n3;
    if ((lo == 1 && hi == 2) || (lo == 3 && hi == 4)) return static_cast<long>(f.n1) + f.n2;
    fail(ErrorCode::InvalidArgument, "pair (" + std::to_string(x) + "," + std::to_string(y) + ") is not admissible");
  }

  std::string describe() const {
    std::ostringstream out;
    if (const auto* f = funnel()) {
      out << "funnel:" << f->n1 << ',' << f->n2 << ',' << f->n3;
    } else if (const auto* r = round()) {
      out.precision(17);
      out << "round:" << r->base;
    } else {
      out << "bs";
    }
    return out.str();
  }

  friend bool operator==(const OrderSpec&, const OrderSpec&) = default;

 private:
  void validate() const {
    if (const auto* f = funnel()) {
      if (f->n1 < 1 || f->n2 < 1 || f->n3 < 1)
        fail(ErrorCode::InvalidArgument, "funnel winding weights must be positive integers");
    }
    if (const auto* r = round()) {
      if (!std::isfinite(r->base) || !(r->base > 0.0))
        fail(ErrorCode::InvalidArgument, "base length must be positive and finite");
    }
  }

  Variant v_{BowenSeriesOrder{}};
};

struct WordRecord {
  Word word;
  double trace_abs = 0.0;
  double length = 0.0;
  double stability = 0.0;
  long order = 0;
};

inline Mat2DD word_product(const SchottkySurface& surface, const Word& word) {
  Mat2DD m;
  for (std::size_t i = 0; i < word.size(); ++i) m = m * surface.generator_dd(word[i]);
  return m;
}

/// Order value of a word under `spec`; `length` is only used by RoundToBase.
inline long word_order(const Word& word, const OrderSpec& spec, double length) {
  if (const auto* f = spec.funnel()) {
    long doubled = 0;
    const std::size_t n = word.size();
    for (std::size_t i = 0; i < n; ++i) doubled += OrderSpec::doubled_pair_weight(*f, word[i], word[(i + 1) % n]);
    if (doubled % 2 != 0)
      fail(ErrorCode::NonIntegerOrder, "funnel winding sum of " + word.to_string() + " is " +
                                           std::to_string(doubled) + "/2");
    return doubled / 2;
  }
  if (const auto* r = spec.round()) return std::lround(length / r->base);
  return static_cast<long>(word.size());
}

namespace detail {

inline WordRecord record_from_trace(Word word, DoubleDouble trace, const OrderSpec& spec) {
  WordRecord rec;
  rec.trace_abs = std::abs(trace.value());
  if (!std::isfinite(rec.trace_abs))
    fail(ErrorCode::NumericOverflow, "trace of " + word.to_string() + " overflows double precision");
  if (rec.trace_abs < 2.0)
    fail(ErrorCode::NonHyperbolic, "|Tr S_w| = " + std::to_string(rec.trace_abs) + " < 2 for " + word.to_string());
  rec.length = 2.0 * std::acosh(rec.trace_abs / 2.0);
  rec.stability = std::exp(rec.length);
  if (!std::isfinite(rec.stability))
    fail(ErrorCode::NumericOverflow, "stability of " + word.to_string() + " overflows double precision");
  rec.order = word_order(word, spec, rec.length);
  rec.word = std::move(word);
  return rec;
}

}  // namespace detail

/// Trace, geodesic length l = 2 arccosh(|Tr|/2), stability e^l and order of
/// one admissible word. Products are formed in double-double.
inline WordRecord word_data(const SchottkySurface& surface, const Word& word, const OrderSpec& spec) {
  if (!word.is_admissible())
    fail(ErrorCode::InvalidArgument, "word " + word.to_string() + " is not cyclically admissible");
  return detail::record_from_trace(word, word_product(surface, word).trace(), spec);
}

struct CyclicClass {
  Word canonical_word;
  int period = 1;
  int representatives_count = 1;
};

struct ClassRecord {
  CyclicClass cls;
  WordRecord record;
};

/// One entry per rotation class of primitive admissible words of length
/// <= max_word_length, ordered by (word length, lexicographic). A word and
/// its inverse are distinct (oriented) classes.
inline std::vector<ClassRecord> primitive_classes(const SchottkySurface& surface, int max_word_length,
                                                  const OrderSpec& spec, Alphabet alphabet = Alphabet::full,
                                                  int max_length = kDefaultMaxWordLength) {
  if (max_word_length < 1) fail(ErrorCode::InvalidArgument, "max_word_length must be at least 1");
  if (max_word_length > max_length)
    fail(ErrorCode::LimitExceeded, "max_word_length " + std::to_string(max_word_length) +
                                       " exceeds configured maximum " + std::to_string(max_length));
  const auto letters = alphabet_symbols(alphabet);
  const auto depth_max = static_cast<std::size_t>(max_word_length);
  std::vector<std::uint8_t> buf(depth_max);
  std::vector<Mat2DD> prefix(depth_max + 1);
  std::vector<ClassRecord> out;

  auto rec = [&](auto&& self, std::size_t depth) -> void {
    // buf[0..depth) holds a prefix with consecutive admissibility.
    if (depth > 0 && Word::adjacent_ok(buf[depth - 1], buf[0]) && Word::is_lyndon(buf.data(), depth)) {
      Word w(std::vector<std::uint8_t>(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(depth)));
      ClassRecord cr;
      cr.cls.canonical_word = w;
      cr.cls.period = 1;
      cr.cls.representatives_count = static_cast<int>(depth);
      cr.record = detail::record_from_trace(std::move(w), prefix[depth].trace(), spec);
      out.push_back(std::move(cr));
    }
    if (depth == depth_max) return;
    for (auto x : letters) {
      if (depth > 0 && (x < buf[0] || !Word::adjacent_ok(buf[depth - 1], x))) continue;
      buf[depth] = x;
      prefix[depth + 1] = prefix[depth] * surface.generator_dd(x);
      self(self, depth + 1);
    }
  };
  rec(rec, 0);
  std::stable_sort(out.begin(), out.end(), [](const ClassRecord& x, const ClassRecord& y) {
    if (x.cls.canonical_word.size() != y.cls.canonical_word.size())
      return x.cls.canonical_word.size() < y.cls.canonical_word.size();
    return x.cls.canonical_word < y.cls.canonical_word;
  });
  return out;
}

/// Smallest order value taken by any cyclically admissible word of exactly
/// `length` letters under a funnel-winding order (min-plus transfer matrix).
inline long min_funnel_order(const FunnelWindingOrder& f, int length, Alphabet alphabet = Alphabet::full) {
  constexpr long kInf = std::numeric_limits<long>::max() / 4;
  const auto letters = alphabet_symbols(alphabet);
  long best = kInf;
  for (auto start : letters) {
    std::array<long, 5> cost;
    cost.fill(kInf);
    cost[start] = 0;
    for (int step = 0; step < length; ++step) {
      std::array<long, 5> next;
      next.fill(kInf);
      for (auto x : letters) {
        if (cost[x] >= kInf) continue;
        for (auto y : letters) {
          if (!Word::adjacent_ok(x, y)) continue;
          next[y] = std::min(next[y], cost[x] + OrderSpec::doubled_pair_weight(f, x, y));
        }
      }
      cost = next;
    }
    best = std::min(best, cost[start]);
  }
  return best >= kInf ? kInf : (best + 1) / 2;
}

}  // namespace rchain

#endif  // RCHAIN_SCHOTTKY_HPP
