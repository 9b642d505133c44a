#ifndef RCHAIN_QUADRATURE_HPP
#define RCHAIN_QUADRATURE_HPP

#include <array>

namespace rchain {

/// 15-point Gauss-Kronrod rule with its embedded 7-point Gauss rule
/// (QUADPACK qk15 constants).
struct GaussKronrod15 {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  // Gauss weights for xgk[1], xgk[3], xgk[5], xgk[7].
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  template <class T>
  struct Result {
    T kronrod;
    T gauss;
  };

  /// Integrates f over t in [0, 1]. T needs T + T and double * T.
  template <class T, class F>
  static Result<T> apply(F&& f, double lo = 0.0, double hi = 1.0) {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    const T fc = f(mid);
    T k = wgk[7] * fc;
    T g = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
      const T f1 = f(mid - half * xgk[j]);
      const T f2 = f(mid + half * xgk[j]);
      const T sum = f1 + f2;
      k = k + wgk[j] * sum;
      if (j % 2 == 1) g = g + wg[j / 2] * sum;
    }
    return {half * k, half * g};
  }
};

}  // namespace rchain

#endif  // RCHAIN_QUADRATURE_HPP
