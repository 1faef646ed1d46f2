#pragma once

#include <array>
#include <cmath>
#include <string>

#include "cdho/error.hpp"

namespace cdho {

template <class Scalar>
struct QuadResult {
  Scalar value = 0;
  Scalar error = 0;
  long evaluations = 0;
};

namespace detail {

// Gauss–Kronrod 7-15 nodes on [-1, 1]
template <class Scalar>
struct GK15 {
  static constexpr std::array<Scalar, 8> xk = {
      Scalar(0.991455371120812639206854697526329), Scalar(0.949107912342758524526189684047851),
      Scalar(0.864864423359769072789712788640926), Scalar(0.741531185599394439863864773280788),
      Scalar(0.586087235467691130294144845693013), Scalar(0.405845151377397166906606412076961),
      Scalar(0.207784955007898467600689403773245), Scalar(0.0)};
  static constexpr std::array<Scalar, 8> wk = {
      Scalar(0.022935322010529224963732008058970), Scalar(0.063092092629978553290700663189204),
      Scalar(0.104790010322250183839876322541518), Scalar(0.140653259715525918745189590510238),
      Scalar(0.169004726639267902826583426598550), Scalar(0.190350578064785409913256402421014),
      Scalar(0.204432940075298892414161999234649), Scalar(0.209482141084727828012999174891714)};
  static constexpr std::array<Scalar, 4> wg = {
      Scalar(0.129484966168869693270611432679082), Scalar(0.279705391489276667901467771423780),
      Scalar(0.381830050505118944950369775488975), Scalar(0.417959183673469387755102040816327)};
};

template <class Scalar, class Fn>
void gk15_panel(Fn& f, Scalar a, Scalar b, Scalar& kronrod, Scalar& gauss) {
  using G = GK15<Scalar>;
  const Scalar c = (a + b) / 2, h = (b - a) / 2;
  auto eval = [&f](Scalar x) {
    const Scalar v = f(x);
    if (!std::isfinite(static_cast<double>(v)))
      throw Error(ErrorKind::QuadratureFailure,
                  "non-finite integrand at " + std::to_string(static_cast<double>(x)));
    return v;
  };
  const Scalar fc = eval(c);
  Scalar k = G::wk[7] * fc, g = G::wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const Scalar dx = h * G::xk[j];
    const Scalar s = eval(c - dx) + eval(c + dx);
    k += G::wk[j] * s;
    if (j % 2 == 1) g += G::wg[j / 2] * s;
  }
  kronrod = k * h;
  gauss = g * h;
}

template <class Scalar, class Fn>
Scalar gk15_adapt(Fn& f, Scalar a, Scalar b, Scalar whole, Scalar tol, int depth,
                  QuadResult<Scalar>& acc) {
  const Scalar m = (a + b) / 2;
  Scalar kl, gl, kr, gr;
  gk15_panel(f, a, m, kl, gl);
  gk15_panel(f, m, b, kr, gr);
  acc.evaluations += 30;
  const Scalar refined = kl + kr;
  const Scalar err = std::abs(kl - gl) + std::abs(kr - gr);
  if (err <= tol || depth <= 0 || std::abs(refined - whole) <= tol / 50) {
    acc.error += err;
    return refined;
  }
  return gk15_adapt(f, a, m, kl, tol / 2, depth - 1, acc) +
         gk15_adapt(f, m, b, kr, tol / 2, depth - 1, acc);
}

}  // namespace detail

// Adaptive Gauss–Kronrod 7-15 with bisection. Throws QuadratureFailure on
// non-finite integrand values.
template <class Scalar, class Fn>
QuadResult<Scalar> integrate_gk15(Fn&& f, Scalar a, Scalar b, Scalar abs_tol, Scalar rel_tol,
                                  int max_depth = 40) {
  QuadResult<Scalar> r;
  Scalar k, g;
  detail::gk15_panel(f, a, b, k, g);
  r.evaluations = 15;
  const Scalar tol = std::max(abs_tol, rel_tol * std::abs(k));
  if (std::abs(k - g) <= tol) {
    r.value = k;
    r.error = std::abs(k - g);
    return r;
  }
  r.value = detail::gk15_adapt(f, a, b, k, tol, max_depth, r);
  return r;
}

}  // namespace cdho
