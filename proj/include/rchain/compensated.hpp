#ifndef RCHAIN_COMPENSATED_HPP
#define RCHAIN_COMPENSATED_HPP

// Error-free transformations and double-double arithmetic used for
// compensated accumulation of oscillatory cycle sums.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace rchain {

struct TwoTerm {
  double hi;
  double lo;
};

inline TwoTerm two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline TwoTerm quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline TwoTerm two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
class DoubleDouble {
 public:
  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double x) : hi_(x), lo_(0.0) {}  // NOLINT(implicit)
  constexpr DoubleDouble(double hi, double lo) : hi_(hi), lo_(lo) {}

  double hi() const { return hi_; }
  double lo() const { return lo_; }
  double value() const { return hi_ + lo_; }
  explicit operator double() const { return value(); }

  friend DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
    TwoTerm s = two_sum(a.hi_, b.hi_);
    TwoTerm t = two_sum(a.lo_, b.lo_);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    s = quick_two_sum(s.hi, s.lo);
    return {s.hi, s.lo};
  }
  friend DoubleDouble operator-(DoubleDouble a) { return {-a.hi_, -a.lo_}; }
  friend DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }
  friend DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
    TwoTerm p = two_prod(a.hi_, b.hi_);
    p.lo += a.hi_ * b.lo_ + a.lo_ * b.hi_;
    p = quick_two_sum(p.hi, p.lo);
    return {p.hi, p.lo};
  }
  friend DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
    const double q1 = a.hi_ / b.hi_;
    DoubleDouble r = a - b * DoubleDouble(q1);
    const double q2 = r.hi_ / b.hi_;
    r = r - b * DoubleDouble(q2);
    const double q3 = r.hi_ / b.hi_;
    TwoTerm q = quick_two_sum(q1, q2);
    return DoubleDouble(q.hi, q.lo) + DoubleDouble(q3);
  }
  DoubleDouble& operator+=(DoubleDouble b) { return *this = *this + b; }
  DoubleDouble& operator-=(DoubleDouble b) { return *this = *this - b; }
  DoubleDouble& operator*=(DoubleDouble b) { return *this = *this * b; }

  friend bool operator<(DoubleDouble a, DoubleDouble b) {
    return a.hi_ < b.hi_ || (a.hi_ == b.hi_ && a.lo_ < b.lo_);
  }

 private:
  double hi_ = 0.0;
  double lo_ = 0.0;
};

inline DoubleDouble abs(DoubleDouble x) { return x.hi() < 0.0 ? -x : x; }

/// Neumaier-style running sum; the correction term collects the rounding
/// error of every addition exactly.
class CompensatedSum {
 public:
  void add(double x) {
    const TwoTerm t = two_sum(sum_, x);
    sum_ = t.hi;
    carry_ += t.lo;
  }
  void merge(const CompensatedSum& other) {
    add(other.sum_);
    add(other.carry_);
  }
  double value() const { return sum_ + carry_; }
  DoubleDouble as_double_double() const {
    const TwoTerm t = quick_two_sum(sum_, carry_);
    return {t.hi, t.lo};
  }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

class CompensatedComplexSum {
 public:
  void add(std::complex<double> x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  void merge(const CompensatedComplexSum& other) {
    re_.merge(other.re_);
    im_.merge(other.im_);
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

/// Accumulator that is either plain or compensated, chosen at run time.
class ComplexAccumulator {
 public:
  explicit ComplexAccumulator(bool compensated = false) : compensated_(compensated) {}

  void add(std::complex<double> x) {
    if (compensated_) {
      comp_.add(x);
    } else {
      plain_ += x;
    }
  }
  void merge(const ComplexAccumulator& other) {
    if (compensated_) {
      comp_.merge(other.comp_);
      comp_.add(other.plain_);
    } else {
      plain_ += other.value();
    }
  }
  std::complex<double> value() const { return compensated_ ? comp_.value() + plain_ : plain_; }

 private:
  bool compensated_;
  std::complex<double> plain_{0.0, 0.0};
  CompensatedComplexSum comp_;
};

/// Pairwise (balanced binary tree) reduction of partial results. The tree
/// shape depends only on the number of parts, never on who produced them.
template <class T, class Combine>
T pairwise_reduce(std::vector<T> parts, Combine combine) {
  if (parts.empty()) return T{};
  std::size_t n = parts.size();
  while (n > 1) {
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i + half < n; ++i) combine(parts[i], parts[i + half]);
    n = half;
  }
  return parts.front();
}

}  // namespace rchain

#endif  // RCHAIN_COMPENSATED_HPP
