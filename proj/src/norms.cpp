#include "cdho/norms.hpp"

#include <cmath>

#include "cdho/error.hpp"

namespace cdho {

Eigen::ArrayXd sobolev_weight(const Grid& g, double gamma, Space s) {
  return (1.0 + g.radius_sq(s)).pow(0.5 * gamma);
}

double sobolev_norm(const Field& f, double gamma, SobolevSide side) {
  if (f.space != Space::Position) throw Error(ErrorKind::Precondition, "sobolev_norm expects position space");
  if (!(gamma >= 0.0)) throw Error(ErrorKind::Precondition, "sobolev_norm: gamma must be >= 0");
  if (side == SobolevSide::PositionWeighted) {
    const Eigen::ArrayXd w = sobolev_weight(f.grid, gamma, Space::Position);
    return std::sqrt((w.square() * f.values.abs2()).sum() * f.grid.cell(Space::Position));
  }
  const Field s = fourier(f);
  const Eigen::ArrayXd w = sobolev_weight(f.grid, gamma, Space::Frequency);
  return std::sqrt((w.square() * s.values.abs2()).sum() * f.grid.cell(Space::Frequency));
}

double weighted_log_ratio(const Field& base, const Field& delta, double gamma, SobolevSide side) {
  Eigen::ArrayXcd b, d;
  Eigen::ArrayXd w;
  if (side == SobolevSide::PositionWeighted) {
    w = sobolev_weight(base.grid, gamma, Space::Position);
    b = base.values;
    d = delta.values;
  } else {
    w = sobolev_weight(base.grid, gamma, Space::Frequency);
    b = fourier(base).values;
    d = fourier(delta).values;
  }
  const Eigen::ArrayXd w2 = w.square();
  const double bb = (w2 * b.abs2()).sum();
  const double cross = (w2 * (b.conjugate() * d).real()).sum();
  const double dd = (w2 * d.abs2()).sum();
  return 0.5 * std::log1p((2.0 * cross + dd) / bb);
}

double leibniz_ratio(const Field& f, double gamma, const NonlinearityParams& params,
                     NonlinearPart which) {
  NonlinearityParams unit = params;
  unit.mu_L = which == NonlinearPart::L ? 1.0 : 0.0;
  unit.mu_S = which == NonlinearPart::S ? 1.0 : 0.0;
  const Eigen::ArrayXd a = f.values.abs();
  const Field g(f.grid, Space::Position, eval_F(a, unit) * f.values);
  const double top = sobolev_norm(g, gamma, SobolevSide::FrequencyWeighted);
  const double bottom = eval_F(a.maxCoeff(), unit) * sobolev_norm(f, gamma, SobolevSide::FrequencyWeighted);
  return top / bottom;
}

}  // namespace cdho
