#include "cdho/grid.hpp"

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

#include "cdho/error.hpp"

namespace cdho {

const char* to_string(Space s) noexcept {
  return s == Space::Position ? "position" : "frequency";
}

Grid::Grid(int n_, int N_, double L_) : n(n_), N(N_), L(L_) {
  if (n < 1 || n > 3) throw Error(ErrorKind::Config, "grid.n must be 1, 2 or 3");
  if (N < 16 || (N & (N - 1)) != 0)
    throw Error(ErrorKind::Config, "grid.N must be a power of two >= 16");
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorKind::Config, "grid.L must be positive");
}

Eigen::Index Grid::size() const {
  Eigen::Index s = 1;
  for (int a = 0; a < n; ++a) s *= N;
  return s;
}

double Grid::cell(Space s) const { return std::pow(s == Space::Position ? dx() : dxi(), n); }

Eigen::ArrayXd Grid::axis(Space s) const {
  if (s == Space::Position) return Eigen::ArrayXd::LinSpaced(N, 0, N - 1) * dx() - L;
  return Eigen::ArrayXd::LinSpaced(N, 0, N - 1) * dxi() - xi_max();
}

Eigen::ArrayXd Grid::coordinate(Space s, int a) const {
  const Eigen::ArrayXd ax = axis(s);
  Eigen::Index stride = 1;
  for (int b = a + 1; b < n; ++b) stride *= N;
  Eigen::ArrayXd c(size());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = ax((i / stride) % N);
  return c;
}

Eigen::ArrayXd Grid::radius_sq(Space s) const {
  Eigen::ArrayXd r = Eigen::ArrayXd::Zero(size());
  for (int a = 0; a < n; ++a) r += coordinate(s, a).square();
  return r;
}

Eigen::ArrayXd Grid::wavenumber_sq_fft_order() const {
  Eigen::ArrayXd k(N);
  for (int m = 0; m < N; ++m) k(m) = (m < N / 2 ? m : m - N) * dxi();
  Eigen::ArrayXd r = Eigen::ArrayXd::Zero(size());
  Eigen::Index stride = 1;
  for (int a = n - 1; a >= 0; --a) {
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) += k((i / stride) % N) * k((i / stride) % N);
    stride *= N;
  }
  return r;
}

Field::Field(Grid g, Space s) : grid(g), space(s), values(Eigen::ArrayXcd::Zero(g.size())) {}

Field::Field(Grid g, Space s, Eigen::ArrayXcd v) : grid(g), space(s), values(std::move(v)) {
  if (values.size() != grid.size()) throw Error(ErrorKind::Precondition, "field size does not match grid");
}

Field Field::sample(const Grid& g, Space s, const std::function<cd(const Eigen::VectorXd&)>& fn) {
  Field f(g, s);
  std::vector<Eigen::ArrayXd> c;
  for (int a = 0; a < g.n; ++a) c.push_back(g.coordinate(s, a));
  Eigen::VectorXd p(g.n);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    for (int a = 0; a < g.n; ++a) p(a) = c[a](i);
    f.values(i) = fn(p);
  }
  return f;
}

double l2_norm(const Field& f) {
  return std::sqrt(f.values.abs2().sum() * f.grid.cell(f.space));
}

double linf_norm(const Field& f) { return f.values.abs().maxCoeff(); }

double l2_distance(const Field& a, const Field& b) {
  if (!(a.grid == b.grid) || a.space != b.space)
    throw Error(ErrorKind::Precondition, "l2_distance: incompatible fields");
  return std::sqrt((a.values - b.values).abs2().sum() * a.grid.cell(a.space));
}

Eigen::ArrayXcd map_axis(const Eigen::ArrayXcd& in, std::vector<int>& dims, int a, int out_len,
                         const std::function<void(const cd*, cd*)>& op) {
  Eigen::Index inner = 1, outer = 1;
  for (std::size_t b = a + 1; b < dims.size(); ++b) inner *= dims[b];
  for (int b = 0; b < a; ++b) outer *= dims[b];
  const int len = dims[a];
  Eigen::ArrayXcd out(outer * out_len * inner);
  if (inner == 1) {
    for (Eigen::Index o = 0; o < outer; ++o) op(in.data() + o * len, out.data() + o * out_len);
  } else {
    std::vector<cd> li(len), lo(out_len);
    for (Eigen::Index o = 0; o < outer; ++o)
      for (Eigen::Index i = 0; i < inner; ++i) {
        for (int k = 0; k < len; ++k) li[k] = in((o * len + k) * inner + i);
        op(li.data(), lo.data());
        for (int k = 0; k < out_len; ++k) out((o * out_len + k) * inner + i) = lo[k];
      }
  }
  dims[a] = out_len;
  return out;
}

namespace {

Eigen::FFT<double>& thread_fft() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

// (−1)^{Σ_a j_a} per flattened node
Eigen::ArrayXd checkerboard(const Grid& g) {
  Eigen::ArrayXd s(g.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    Eigen::Index r = i, parity = 0;
    for (int a = 0; a < g.n; ++a) {
      parity += r % g.N;
      r /= g.N;
    }
    s(i) = parity % 2 ? -1.0 : 1.0;
  }
  return s;
}

}  // namespace

void dft_inplace(Eigen::ArrayXcd& data, int n, int N, bool inverse) {
  auto& fft = thread_fft();
  std::vector<int> dims(n, N);
  std::vector<cd> scratch(N);
  for (int a = 0; a < n; ++a) {
    data = map_axis(data, dims, a, N, [&](const cd* in, cd* out) {
      if (inverse)
        fft.inv(out, in, N);
      else
        fft.fwd(out, in, N);
    });
  }
}

Field fourier(const Field& f) {
  if (f.space != Space::Position) throw Error(ErrorKind::Precondition, "fourier expects a position-space field");
  const Eigen::ArrayXd s = checkerboard(f.grid);
  Eigen::ArrayXcd v = f.values * s;
  dft_inplace(v, f.grid.n, f.grid.N, false);
  v *= s * std::pow(f.grid.dx() / std::sqrt(2.0 * std::numbers::pi), f.grid.n);
  return Field(f.grid, Space::Frequency, std::move(v));
}

Field inverse_fourier(const Field& f) {
  if (f.space != Space::Frequency)
    throw Error(ErrorKind::Precondition, "inverse_fourier expects a frequency-space field");
  const Eigen::ArrayXd s = checkerboard(f.grid);
  Eigen::ArrayXcd v = f.values * s;
  dft_inplace(v, f.grid.n, f.grid.N, true);
  v *= s * std::pow(f.grid.dxi() / std::sqrt(2.0 * std::numbers::pi), f.grid.n);
  return Field(f.grid, Space::Position, std::move(v));
}

Field upsample(const Field& f, int factor) {
  if (factor == 1) return f;
  if (factor < 1 || (factor & (factor - 1)) != 0)
    throw Error(ErrorKind::Precondition, "upsample factor must be a power of two");
  const Field spec = fourier(f);
  const Grid fine(f.grid.n, f.grid.N * factor, f.grid.L);
  // same ξ spacing; the coarse band sits in the middle of the fine band
  const int off = (fine.N - f.grid.N) / 2;
  std::vector<int> dims(f.grid.n, f.grid.N);
  Eigen::ArrayXcd v = spec.values;
  for (int a = 0; a < f.grid.n; ++a)
    v = map_axis(v, dims, a, fine.N, [&](const cd* in, cd* out) {
      std::fill(out, out + fine.N, cd(0.0));
      std::copy(in, in + f.grid.N, out + off);
    });
  return inverse_fourier(Field(fine, Space::Frequency, std::move(v)));
}

double edge_mass_fraction(const Field& f, double band) {
  const Eigen::ArrayXd w = f.values.abs2();
  const double total = w.sum();
  if (!(total > 0)) return 0.0;
  const double lim = (1.0 - band) * (f.space == Space::Position ? f.grid.L : f.grid.xi_max());
  Eigen::ArrayXd m = Eigen::ArrayXd::Zero(w.size());
  for (int a = 0; a < f.grid.n; ++a)
    m = m.max(f.grid.coordinate(f.space, a).abs());
  return (m > lim).select(w, 0.0).sum() / total;
}

double spectral_tail_fraction(const Field& f) {
  const Field s = f.space == Space::Position ? fourier(f) : f;
  return edge_mass_fraction(s, 1.0 / 3.0);
}

}  // namespace cdho
