#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace cdho {

using cd = std::complex<double>;

enum class Space { Position, Frequency };

const char* to_string(Space s) noexcept;

// Periodic box [−L, L)^n with N nodes per axis, x_j = −L + j·dx, ξ_k = −π/dx + k·π/L.
// Flattened arrays are row-major (last axis fastest).
struct Grid {
  int n = 1;
  int N = 256;
  double L = 20.0;

  Grid() = default;
  Grid(int n, int N, double L);

  double dx() const { return 2.0 * L / N; }
  double dxi() const { return 3.14159265358979323846 / L; }
  double xi_max() const { return 3.14159265358979323846 / dx(); }
  Eigen::Index size() const;
  double cell(Space s) const;

  Eigen::ArrayXd axis(Space s) const;                  // N nodes along one axis
  Eigen::ArrayXd coordinate(Space s, int a) const;     // axis-a coordinate per flattened node
  Eigen::ArrayXd radius_sq(Space s) const;             // |x|² or |ξ|² per flattened node
  Eigen::ArrayXd wavenumber_sq_fft_order() const;      // |k|² in raw-DFT ordering

  bool operator==(const Grid& o) const { return n == o.n && N == o.N && L == o.L; }
};

struct Field {
  Grid grid;
  Space space = Space::Position;
  Eigen::ArrayXcd values;

  Field() = default;
  Field(Grid g, Space s);
  Field(Grid g, Space s, Eigen::ArrayXcd v);

  // Samples fn(coords) at every node; coords has n entries.
  static Field sample(const Grid& g, Space s,
                      const std::function<cd(const Eigen::VectorXd&)>& fn);
};

double l2_norm(const Field& f);
double linf_norm(const Field& f);
double l2_distance(const Field& a, const Field& b);

Field fourier(const Field& f);
Field inverse_fourier(const Field& f);

// Band-limited trigonometric refinement to N·factor nodes on the same box.
Field upsample(const Field& f, int factor);

// Raw multi-dimensional DFT in place: forward Σ e^{−2πijk/N}, inverse Σ e^{+2πijk/N}
// (no normalisation either way).
void dft_inplace(Eigen::ArrayXcd& data, int n, int N, bool inverse);

// Applies op(line_in, line_out) to every 1-d line along axis `a` of a row-major
// array with extents dims; the axis length changes from dims[a] to out_len.
Eigen::ArrayXcd map_axis(const Eigen::ArrayXcd& in, std::vector<int>& dims, int a, int out_len,
                         const std::function<void(const cd*, cd*)>& op);

// Fraction of ‖f‖² within the outer `band` of the box along any axis.
double edge_mass_fraction(const Field& f, double band = 0.1);
// Fraction of spectral mass with max_a |ξ_a| above two thirds of the Nyquist frequency.
double spectral_tail_fraction(const Field& f);

}  // namespace cdho
