#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <numbers>
#include <unsupported/Eigen/FFT>

namespace cdho {

// out_k = Σ_j in_j · exp(sign·i·x_j·s_k),  x_j = x0 + j·dx,  s_k = s0 + k·ds,  k < m.
// Direct O(N·M) evaluation; the reference for chirp_z.
template <class Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> direct_sum(
    const Eigen::Ref<const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>>& in,
    Scalar x0, Scalar dx, Scalar s0, Scalar ds, Eigen::Index m, int sign) {
  using C = std::complex<Scalar>;
  Eigen::Matrix<C, Eigen::Dynamic, 1> out(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const long double s = static_cast<long double>(s0) + k * static_cast<long double>(ds);
    C acc(0);
    for (Eigen::Index j = 0; j < in.size(); ++j) {
      const long double x = static_cast<long double>(x0) + j * static_cast<long double>(dx);
      const long double ph = std::fmod(sign * x * s, 2.0L * std::numbers::pi_v<long double>);
      acc += in(j) * C(static_cast<Scalar>(std::cos(ph)), static_cast<Scalar>(std::sin(ph)));
    }
    out(k) = acc;
  }
  return out;
}

// Same sum by Bluestein's algorithm: x_j s_k = x0 s0 + x0 k ds + j dx s0 + dx ds (j² + k² − (k−j)²)/2,
// so the j-sum is a linear convolution evaluated with power-of-two FFTs. Chirp phases
// are formed in long double and reduced mod 2π before rounding.
template <class Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> chirp_z(
    const Eigen::Ref<const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>>& in,
    Scalar x0, Scalar dx, Scalar s0, Scalar ds, Eigen::Index m, int sign) {
  using C = std::complex<Scalar>;
  using LD = long double;
  const Eigen::Index n = in.size();
  Eigen::Matrix<C, Eigen::Dynamic, 1> out(m);
  if (n == 0 || m == 0) {
    out.setZero();
    return out;
  }
  const LD two_pi = 2.0L * std::numbers::pi_v<LD>;
  auto cis = [two_pi](LD ph) {
    ph = std::fmod(ph, two_pi);
    return C(static_cast<Scalar>(std::cos(ph)), static_cast<Scalar>(std::sin(ph)));
  };
  const LD sg = sign;
  const LD h = static_cast<LD>(dx) * static_cast<LD>(ds) / 2.0L;

  Eigen::Index p = 1;
  while (p < n + m - 1) p <<= 1;
  std::vector<C> a(p, C(0)), b(p, C(0)), fa(p), fb(p);
  for (Eigen::Index j = 0; j < n; ++j) {
    const LD jj = static_cast<LD>(j);
    a[j] = in(j) * cis(sg * (static_cast<LD>(s0) * static_cast<LD>(dx) * jj + h * jj * jj));
  }
  for (Eigen::Index q = 0; q < m; ++q) b[q] = cis(-sg * h * static_cast<LD>(q) * static_cast<LD>(q));
  for (Eigen::Index q = 1; q < n; ++q) b[p - q] = cis(-sg * h * static_cast<LD>(q) * static_cast<LD>(q));

  thread_local Eigen::FFT<Scalar> fft;
  fft.fwd(fa.data(), a.data(), p);
  fft.fwd(fb.data(), b.data(), p);
  for (Eigen::Index q = 0; q < p; ++q) fa[q] *= fb[q];
  fft.inv(a.data(), fa.data(), p);  // scaled by 1/p

  for (Eigen::Index k = 0; k < m; ++k) {
    const LD kk = static_cast<LD>(k);
    const LD ph = sg * (static_cast<LD>(x0) * static_cast<LD>(s0) +
                        static_cast<LD>(x0) * kk * static_cast<LD>(ds) + h * kk * kk);
    out(k) = a[k] * cis(ph);
  }
  return out;
}

}  // namespace cdho
