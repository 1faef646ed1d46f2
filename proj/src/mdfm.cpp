#include "cdho/mdfm.hpp"

#include <cmath>
#include <numbers>

#include "cdho/chirpz.hpp"
#include "cdho/error.hpp"

namespace cdho {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEscape = 1e-8;

using VecC = Eigen::VectorXcd;

// Support radius: max |coordinate| over nodes with |f| above rel·max|f|.
double support_radius(const Field& f, double rel = 1e-15) {
  const Eigen::ArrayXd a = f.values.abs();
  const double cut = rel * a.maxCoeff();
  double r = 0.0;
  for (int ax = 0; ax < f.grid.n; ++ax) {
    const Eigen::ArrayXd c = f.grid.coordinate(f.space, ax).abs();
    r = std::max(r, (a > cut).select(c, 0.0).maxCoeff());
  }
  return r;
}

// Mass fraction of f at nodes whose coordinate leaves [lo, hi] along any axis.
double mass_outside(const Field& f, double lo, double hi) {
  const Eigen::ArrayXd w = f.values.abs2();
  const double total = w.sum();
  if (!(total > 0)) return 0.0;
  Eigen::Array<bool, Eigen::Dynamic, 1> out = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(w.size(), false);
  for (int ax = 0; ax < f.grid.n; ++ax) {
    const Eigen::ArrayXd c = f.grid.coordinate(f.space, ax);
    out = out || (c < lo) || (c > hi);
  }
  return out.select(w, 0.0).sum() / total;
}

// Evaluates, along every axis, Σ_j in_j e^{sign·i y_j s_k} for s_k = s0 + k·ds (k < m),
// where y is the input axis; outputs with |s_k| > cutoff are zeroed. The input line is
// trimmed to its support before the transform.
Eigen::ArrayXcd scaled_transform(const Eigen::ArrayXcd& in, int n, int N_in, double y0, double dy,
                                 int m, double s0, double ds, int sign, double cutoff) {
  std::vector<int> dims(n, N_in);
  Eigen::ArrayXcd v = in;
  for (int a = 0; a < n; ++a) {
    const int len = dims[a];
    v = map_axis(v, dims, a, m, [&](const cd* li, cd* lo) {
      double peak = 0.0;
      for (int j = 0; j < len; ++j) peak = std::max(peak, std::abs(li[j]));
      int j0 = 0, j1 = len - 1;
      const double cut = 1e-17 * peak;
      while (j0 < j1 && std::abs(li[j0]) <= cut) ++j0;
      while (j1 > j0 && std::abs(li[j1]) <= cut) --j1;
      if (!(peak > 0)) {
        std::fill(lo, lo + m, cd(0.0));
        return;
      }
      const Eigen::Map<const VecC> seg(li + j0, j1 - j0 + 1);
      const VecC r = chirp_z<double>(seg, y0 + j0 * dy, dy, s0, ds, m, sign);
      for (int k = 0; k < m; ++k) lo[k] = std::abs(s0 + k * ds) <= cutoff ? r(k) : cd(0.0);
    });
  }
  return v;
}

}  // namespace

cd dilation_factor(double tau, int n, int branch) {
  const double arg = (tau > 0 ? 0.5 : -0.5) * kPi + 2.0 * kPi * branch;
  return std::pow(std::abs(tau), -0.5 * n) * std::polar(1.0, -0.5 * n * arg);
}

int maslov_branch(double t, int caustics) {
  const int k = (caustics + 1) / 2;
  return t >= 0 ? k : -k;
}

Field apply_M(const Field& f, double tau) {
  if (tau == 0.0) throw Error(ErrorKind::Precondition, "apply_M: tau must be nonzero");
  const Eigen::ArrayXd r2 = f.grid.radius_sq(Space::Position);
  const Eigen::ArrayXd ph = r2 / (2.0 * tau);
  return Field(f.grid, f.space, f.values * (ph.cos() + cd(0, 1) * ph.sin()));
}

Grid dispersed_grid(const Grid& in, double zeta2) {
  return Grid(in.n, in.N, std::abs(zeta2) * in.xi_max());
}

Field apply_D(const Field& f, double tau, int branch, const Grid& out) {
  if (tau == 0.0) throw Error(ErrorKind::Precondition, "apply_D: tau must be nonzero");
  if (f.space != Space::Position) throw Error(ErrorKind::Precondition, "apply_D expects position space");
  if (out.n != f.grid.n) throw Error(ErrorKind::Precondition, "apply_D: dimension mismatch");
  const double a = -out.L / tau, b = (out.L - out.dx()) / tau;
  const double frac = mass_outside(f, std::min(a, b), std::max(a, b));
  if (frac > kEscape)
    throw Error(ErrorKind::DomainEscape, "apply_D: mass fraction " + std::to_string(frac) +
                                             " outside the dilated window");
  const Field spec = fourier(f);
  const Grid& g = f.grid;
  Eigen::ArrayXcd v = scaled_transform(spec.values, g.n, g.N, -g.xi_max(), g.dxi(), out.N,
                                       -out.L / tau, out.dx() / tau, +1, 1e300);
  v *= std::pow(g.dxi() / std::sqrt(2.0 * kPi), g.n) * dilation_factor(tau, g.n, branch);
  return Field(out, Space::Position, std::move(v));
}

Field apply_D(const Field& f, double tau, int branch) { return apply_D(f, tau, branch, f.grid); }

ZetaValues mdfm_zeta(const FundamentalPair& pair, double t) {
  const ZetaValues z = pair(t);
  auto bad = [](double v) { return !std::isfinite(v) || std::abs(v) < 1e-12; };
  if (bad(z.z1) || bad(z.z2) || bad(z.dz2))
    throw Error(ErrorKind::SingularTime, "zeta1, zeta2 or zeta2' vanishes at t=" + std::to_string(t));
  return z;
}

Field mdfm_propagate(const Field& f, const FundamentalPair& pair, double t, const Grid& out) {
  if (f.space != Space::Position) throw Error(ErrorKind::Precondition, "mdfm_propagate expects position space");
  if (out.n != f.grid.n) throw Error(ErrorKind::Precondition, "mdfm_propagate: dimension mismatch");
  const ZetaValues z = mdfm_zeta(pair, t);
  const Grid& g = f.grid;
  const double tau1 = z.z2 / z.z1;

  // oversample so that the chirp M(ζ2/ζ1) stays resolved
  const double k_need = support_radius(fourier(f)) + support_radius(f) / std::abs(tau1);
  int p = 1;
  while (p < 64 && 1.5 * k_need > p * g.xi_max()) p *= 2;
  const Field fine = apply_M(upsample(f, p), tau1);
  const Grid& gf = fine.grid;

  // ξ-window sampled by the output nodes
  const double s0 = -out.L / z.z2, ds = out.dx() / z.z2;
  const double lo = std::min(s0, s0 + (out.N - 1) * ds), hi = std::max(s0, s0 + (out.N - 1) * ds);
  const double frac = mass_outside(fourier(fine), lo, hi);
  if (frac > kEscape)
    throw Error(ErrorKind::DomainEscape, "mdfm_propagate: spectral mass fraction " +
                                             std::to_string(frac) + " outside the output box");

  Eigen::ArrayXcd v = scaled_transform(fine.values, g.n, gf.N, -gf.L, gf.dx(), out.N, s0, ds, -1,
                                       gf.xi_max());
  v *= std::pow(gf.dx() / std::sqrt(2.0 * kPi), g.n) *
       dilation_factor(z.z2, g.n, maslov_branch(t, pair.caustic_count(t)));
  return apply_M(Field(out, Space::Position, std::move(v)), z.z2 / z.dz2);
}

Field mdfm_propagate(const Field& f, const FundamentalPair& pair, double t) {
  return mdfm_propagate(f, pair, t, f.grid);
}

Field mdfm_pullback(const Field& u, const FundamentalPair& pair, double t, const Grid& out) {
  if (u.space != Space::Position) throw Error(ErrorKind::Precondition, "mdfm_pullback expects position space");
  if (out.n != u.grid.n) throw Error(ErrorKind::Precondition, "mdfm_pullback: dimension mismatch");
  const ZetaValues z = mdfm_zeta(pair, t);
  const Grid& g = u.grid;
  const Field h = apply_M(u, -z.z2 / z.dz2);

  // w(x) = (iζ2)^{n/2} |ζ2|^{−n} (2π)^{−n/2} ∫ e^{i x·y/ζ2} h(y) dy
  Eigen::ArrayXcd v = scaled_transform(h.values, g.n, g.N, -g.L, g.dx(), out.N, -out.L / z.z2,
                                       out.dx() / z.z2, +1, g.xi_max());
  const cd pre = 1.0 / dilation_factor(z.z2, g.n, maslov_branch(t, pair.caustic_count(t)));
  v *= pre * std::pow(g.dx() / (std::abs(z.z2) * std::sqrt(2.0 * kPi)), g.n);
  Field w = apply_M(Field(out, Space::Position, std::move(v)), -z.z2 / z.z1);

  const double nu = l2_norm(u), nw = l2_norm(w);
  if (nu > 0 && (nu * nu - nw * nw) > 1e-6 * nu * nu)
    throw Error(ErrorKind::DomainEscape, "mdfm_pullback: profile leaves the output box (mass deficit " +
                                             std::to_string(1 - nw * nw / (nu * nu)) + ")");
  return w;
}

}  // namespace cdho
