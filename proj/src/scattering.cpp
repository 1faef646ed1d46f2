#include "cdho/scattering.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "cdho/error.hpp"
#include "cdho/field_io.hpp"
#include "cdho/fit.hpp"
#include "cdho/mdfm.hpp"
#include "cdho/norms.hpp"

namespace cdho {

namespace {

// e^{id} − 1 without cancellation for small d
Eigen::ArrayXcd expm1_i(const Eigen::ArrayXd& d) {
  Eigen::ArrayXcd r(d.size());
  r.real() = -2.0 * (0.5 * d).sin().square();
  r.imag() = d.sin();
  return r;
}

Eigen::ArrayXcd exp_i(const Eigen::ArrayXd& d) {
  Eigen::ArrayXcd r(d.size());
  r.real() = d.cos();
  r.imag() = d.sin();
  return r;
}

double cell_l2(const Eigen::ArrayXcd& v, double cell) { return std::sqrt(v.abs2().sum() * cell); }

NonlinearityParams unit_long_range(const NonlinearityParams& p) {
  NonlinearityParams u = p;
  u.mu_L = 1.0;
  u.mu_S = 0.0;
  return u;
}

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& r, double t_from) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double at = std::abs(t[i]);
    if (at < t_from || at <= std::exp(1.0) * 1.0001 || !(r[i] > 0) || !std::isfinite(r[i])) continue;
    xs.push_back(std::log(std::log(at)));
    ys.push_back(std::log(r[i]));
  }
  RateFit f;
  f.points = static_cast<int>(xs.size());
  if (xs.size() < 3) {
    f.slope = f.std_error = f.intercept = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  const LinearFit lf = fit_line(Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size()),
                                Eigen::Map<Eigen::VectorXd>(ys.data(), ys.size()));
  f.slope = lf.coeffs(1);
  f.std_error = lf.std_errors(1);
  f.intercept = lf.coeffs(0);
  return f;
}

nlohmann::json to_json(const RateFit& f) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"slope", num(f.slope)}, {"std_error", num(f.std_error)}, {"intercept", num(f.intercept)},
          {"points", f.points}};
}

}  // namespace

const char* to_string(PhaseConvention c) noexcept { return c == PhaseConvention::Single ? "single" : "double"; }

PhaseConvention phase_convention_from_string(const std::string& s) {
  if (s == "single") return PhaseConvention::Single;
  if (s == "double") return PhaseConvention::Double;
  throw Error(ErrorKind::Config, "phase_mu_convention must be \"single\" or \"double\", got \"" + s + "\"");
}

const char* to_string(PhaseModel m) noexcept { return m == PhaseModel::LogLog ? "loglog" : "w_integral"; }

Field to_profile(const Field& u, const FundamentalPair& pair, double t) {
  if (t == 0.0) return fourier(u);
  return fourier(mdfm_pullback(u, pair, t, u.grid));
}

double ScatteringRecord::mu_factor() const {
  return convention == PhaseConvention::Single ? params.mu_L : params.mu_L * params.mu_L;
}

Field ScatteringRecord::spectrum(std::size_t k) const {
  return Field(base.grid, Space::Frequency, base.values + deltas.at(k).values);
}

ScatteringRecord make_record(const Field& base_spectrum, const NonlinearityParams& params,
                             PhaseConvention convention) {
  if (base_spectrum.space != Space::Frequency)
    throw Error(ErrorKind::Precondition, "make_record expects a frequency-space base");
  ScatteringRecord r;
  r.base = base_spectrum;
  r.params = params;
  r.convention = convention;
  return r;
}

void phase_integral(ScatteringRecord& rec, double t, const Field& delta, const FundamentalPair& pair) {
  if (!(delta.grid == rec.base.grid) || delta.space != Space::Frequency)
    throw Error(ErrorKind::Precondition, "phase_integral: snapshot grid differs from the record");
  const int n = rec.base.grid.n;
  const double z2 = std::abs(pair.zeta2(t));
  const Eigen::ArrayXd a = std::pow(z2, -0.5 * n) * (rec.base.values + delta.values).abs();
  const Eigen::ArrayXd f = std::abs(t) * eval_FL(a, unit_long_range(rec.params));

  if (rec.times.empty()) {
    if (std::abs(t) < pair.r0() * (1 - 1e-12))
      throw Error(ErrorKind::Precondition, "phase_integral: first time lies inside r0");
    rec.theta_unit.push_back(Eigen::ArrayXd::Zero(a.size()));
  } else {
    const double tp = rec.times.back();
    if (std::signbit(t) != std::signbit(tp) || !(std::abs(t) > std::abs(tp)))
      throw Error(ErrorKind::NonMonotoneTime, "phase_integral: t=" + std::to_string(t) +
                                                  " does not advance past " + std::to_string(tp));
    const double h = std::log(std::abs(t)) - std::log(std::abs(tp));
    rec.theta_unit.push_back(rec.theta_unit.back() + 0.5 * h * (rec.last_integrand + f));
  }
  rec.times.push_back(t);
  rec.deltas.push_back(delta);
  rec.last_integrand = f;
}

ScatteringRecord build_record(const Trajectory& traj, const NonlinearityParams& params,
                              PhaseConvention convention) {
  if (!traj.pair) throw Error(ErrorKind::Precondition, "build_record: trajectory lacks its fundamental pair");
  const FundamentalPair& pair = *traj.pair;
  std::optional<ScatteringRecord> rec;
  std::optional<Eigen::ArrayXcd> base_shift;  // 𝓕(profile_base) − record base
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const Snapshot& s = traj.snapshots[i];
    if (std::abs(s.t) < pair.r0() * (1 - 1e-12)) continue;
    Field delta;
    if (s.kind == StateKind::ProfileDelta) {
      if (!rec) rec = make_record(fourier(*traj.profile_base), params, convention);
      if (!base_shift) base_shift = fourier(*traj.profile_base).values - rec->base.values;
      Field d = fourier(s.state);
      d.values += *base_shift;
      delta = d;
    } else {
      const Field fv = to_profile(s.state, pair, s.t);
      if (!rec) rec = make_record(fv, params, convention);
      delta = Field(fv.grid, Space::Frequency, fv.values - rec->base.values);
    }
    phase_integral(*rec, s.t, delta, pair);
  }
  if (!rec) throw Error(ErrorKind::LadderTooShort, "build_record: no snapshots beyond r0");
  return *rec;
}

ScatteringResult extract_W(const ScatteringRecord& rec, bool phase_corrected, double tail_decades) {
  const std::size_t m = rec.size();
  if (m < 4 || std::log10(std::abs(rec.times.back()) / std::abs(rec.times.front())) < 1.5 - 1e-9)
    throw Error(ErrorKind::LadderTooShort, "extract_W: ladder must span at least 1.5 decades beyond r0");
  const std::size_t L = m - 1;
  const Eigen::ArrayXcd& B = rec.base.values;
  const Eigen::ArrayXcd& DL = rec.deltas[L].values;
  const double cell = rec.base.grid.cell(Space::Frequency);

  ScatteringResult res;
  res.phase_corrected = phase_corrected;
  const Eigen::ArrayXd thL = phase_corrected ? rec.theta(L) : Eigen::ArrayXd::Zero(B.size()).eval();
  res.W = Field(rec.base.grid, Space::Frequency, exp_i(thL) * (B + DL));

  for (std::size_t k = 1; k < L; ++k) {
    Eigen::ArrayXcd r;
    if (phase_corrected) {
      const Eigen::ArrayXd thk = rec.theta(k);
      const Eigen::ArrayXcd eL = exp_i(thL);
      r = B * eL * expm1_i(thk - thL) + exp_i(thk) * rec.deltas[k].values - eL * DL;
    } else {
      r = rec.deltas[k].values - DL;
    }
    res.times.push_back(rec.times[k]);
    res.residual_l2.push_back(cell_l2(r, cell));
    res.residual_sup.push_back(r.abs().maxCoeff());
  }
  res.alpha = fit_rate(res.times, res.residual_l2, 0.0);
  res.tail = fit_rate(res.times, res.residual_l2, std::abs(rec.times[L]) * std::pow(10.0, -tail_decades));
  res.final_residual = res.residual_l2.back();
  return res;
}

std::optional<ProfileComparison> profile_compare(const ScatteringRecord& rec, const ScatteringResult& res,
                                                 const FundamentalPair& pair, PhaseModel model,
                                                 double mask_rel) {
  const std::size_t m = rec.size();
  if (m < 2) throw Error(ErrorKind::LadderTooShort, "profile_compare: record too short");
  const std::size_t L = m - 1;
  const Eigen::ArrayXd absW = res.W.values.abs();
  const double wmax = absW.maxCoeff();
  if (!(wmax > 0)) return std::nullopt;
  const Eigen::ArrayXd mask = (absW > mask_rel * wmax).cast<double>();
  const int count = static_cast<int>(mask.sum());
  if (count == 0) return std::nullopt;

  const int n = rec.base.grid.n;
  const Eigen::ArrayXd thL = res.phase_corrected ? rec.theta(L) : Eigen::ArrayXd::Zero(absW.size()).eval();
  const double extra_mu = rec.convention == PhaseConvention::Double ? rec.params.mu_L : 1.0;

  // ψ(t_k, ξ) for every ladder time
  std::vector<Eigen::ArrayXd> psi(m);
  if (model == PhaseModel::LogLog) {
    NonlinearityParams pl = rec.params;
    pl.mu_S = 0.0;
    const Eigen::ArrayXd fw = extra_mu * eval_FL(absW, pl);
    for (std::size_t k = 0; k < m; ++k) {
      const double at = std::abs(rec.times[k]);
      psi[k] = at > 1.0 ? (fw * std::log(std::log(at))).eval() : Eigen::ArrayXd::Zero(absW.size()).eval();
    }
  } else {
    const NonlinearityParams unit = unit_long_range(rec.params);
    Eigen::ArrayXd prev;
    for (std::size_t k = 0; k < m; ++k) {
      const double t = rec.times[k];
      const Eigen::ArrayXd f =
          std::abs(t) * eval_FL((std::pow(std::abs(pair.zeta2(t)), -0.5 * n) * absW).eval(), unit);
      psi[k] = k == 0 ? Eigen::ArrayXd::Zero(absW.size()).eval()
                      : (psi[k - 1] + 0.5 * (std::log(std::abs(t)) - std::log(std::abs(rec.times[k - 1]))) *
                                          (prev + f)).eval();
      prev = f;
    }
    for (auto& p : psi) p *= rec.mu_factor();
  }

  const Eigen::ArrayXcd& B = rec.base.values;
  const Eigen::ArrayXcd& DL = rec.deltas[L].values;
  const double tL = std::abs(rec.times[L]);

  // Φ: angle of the mean of W e^{−iψ}/𝓕v over the last decade
  Eigen::ArrayXd ssum = Eigen::ArrayXd::Zero(B.size()), csum = Eigen::ArrayXd::Zero(B.size());
  for (std::size_t k = 1; k <= L; ++k) {
    if (std::abs(rec.times[k]) < tL / 10.0) continue;
    const Eigen::ArrayXcd Fk = B + rec.deltas[k].values;
    const Eigen::ArrayXcd z = 1.0 + (DL - rec.deltas[k].values) / Fk;
    Eigen::ArrayXd phi = thL - psi[k];
    phi += z.imag().binaryExpr(z.real(), [](double y, double x) { return std::atan2(y, x); });
    ssum += phi.sin();
    csum += phi.cos();
  }
  ProfileComparison out;
  out.model = model;
  out.mask_size = count;
  out.Phi = ssum.binaryExpr(csum, [](double y, double x) { return std::atan2(y, x); }) * mask;

  const double cell = rec.base.grid.cell(Space::Frequency);
  for (std::size_t k = 1; k <= L; ++k) {
    const Eigen::ArrayXd beta = thL - psi[k] - out.Phi;
    const Eigen::ArrayXcd e = B * expm1_i(beta) + DL * exp_i(beta) - rec.deltas[k].values;
    out.times.push_back(rec.times[k]);
    out.error_l2.push_back(cell_l2(e * mask, cell));
  }
  out.trend = fit_rate(out.times, out.error_l2, tL / 10.0);
  out.decreasing = std::isfinite(out.trend.slope) && out.trend.slope < 0;
  return out;
}

L4Report verify_L4_bound(const Trajectory& traj, const ScatteringRecord& rec, const FundamentalPair& pair,
                         double epsilon_prime, double alpha, double gamma, double gamma_prime) {
  const int n = rec.base.grid.n;
  if (!(alpha > 0 && alpha <= 1)) throw Error(ErrorKind::Precondition, "verify_L4_bound: need 0 < alpha <= 1");
  if (!(gamma_prime > 0.5 * n)) throw Error(ErrorKind::Precondition, "verify_L4_bound: need gamma' > n/2");
  if (!(gamma > 0.5 * n + 2 * alpha))
    throw Error(ErrorKind::Precondition, "verify_L4_bound: need gamma > n/2 + 2 alpha");
  if (!(epsilon_prime > 0)) throw Error(ErrorKind::Precondition, "verify_L4_bound: need epsilon_prime > 0");

  NonlinearityParams unit_L = rec.params, unit_S = rec.params;
  unit_L.mu_L = 1.0;
  unit_L.mu_S = 0.0;
  unit_S.mu_L = 0.0;
  unit_S.mu_S = 1.0;

  L4Report rep;
  double integral = 0.0, prev_f = 0.0, prev_t = 0.0;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    const double t = rec.times[k];
    const Diagnostics* d = nullptr;
    for (const auto& di : traj.diagnostics)
      if (di.t == t) d = &di;
    if (!d) {
      rep.failures.push_back("no diagnostics at t=" + std::to_string(t));
      continue;
    }
    const ZetaValues z = pair(t);
    const double s = std::pow(std::abs(z.z2), -0.5 * n);
    const double q = std::pow(std::abs(z.z1 / z.z2), alpha);
    const Field Fv = rec.spectrum(k);
    const Field v = inverse_fourier(Fv);
    const double h_g = sobolev_norm(v, gamma, SobolevSide::PositionWeighted);
    const double h_gp = sobolev_norm(v, gamma_prime, SobolevSide::PositionWeighted);
    const double fv_sup = linf_norm(Fv);

    const double I1 = q * eval_FL(s * h_gp, unit_L) * h_g;
    const double I2 = eval_FS(s * h_gp, unit_S) * h_gp;
    const double f = std::abs(t) * (std::abs(rec.params.mu_L) * I1 + std::abs(rec.params.mu_S) * I2);
    if (k > 0) integral += 0.5 * (std::log(std::abs(t)) - std::log(std::abs(prev_t))) * (prev_f + f);
    prev_f = f;
    prev_t = t;

    rep.times.push_back(t);
    rep.ratio_sup.push_back(d->linf / (s * fv_sup + s * q * h_g));
    rep.ratio_phase.push_back(fv_sup / (epsilon_prime + integral));
  }
  auto check = [&](const std::vector<double>& r, double& C, const char* name) {
    if (r.empty()) return;
    C = 0.0;
    for (double v : r) {
      if (!std::isfinite(v)) {
        rep.failures.push_back(std::string(name) + ": non-finite ratio");
        return;
      }
      C = std::max(C, v);
    }
    const std::size_t h = r.size() / 2;
    const double first = *std::max_element(r.begin(), r.begin() + std::max<std::size_t>(h, 1));
    const double second = *std::max_element(r.begin() + h, r.end());
    if (second > 2.0 * first)
      rep.failures.push_back(std::string(name) + ": ratio grows from " + std::to_string(first) + " to " +
                             std::to_string(second));
  };
  check(rep.ratio_sup, rep.C_sup, "sup estimate");
  check(rep.ratio_phase, rep.C_phase, "phase estimate");
  rep.passed = rep.failures.empty() && !rep.times.empty();
  return rep;
}

void save_scattering(const std::filesystem::path& dir, const ScatteringRecord& rec,
                     const ScatteringResult& corrected, const ScatteringResult& ablation) {
  std::filesystem::create_directories(dir);
  nlohmann::json m;
  m["format"] = "cdho-scattering-1";
  m["times"] = rec.times;
  m["phase_mu_convention"] = to_string(rec.convention);
  m["phase_argument"] = "F_L applied to |F v| (modulus), unit coefficient times the convention factor";
  m["mu_factor"] = rec.mu_factor();
  m["params"] = {{"mu_L", rec.params.mu_L}, {"mu_S", rec.params.mu_S}, {"theta", rec.params.theta},
                 {"R", rec.params.R}, {"delta0", rec.params.delta0}, {"n", rec.params.n}};
  m["W_time"] = rec.times.back();
  m["corrected"] = {{"alpha_fit", to_json(corrected.alpha)}, {"tail_fit", to_json(corrected.tail)},
                    {"final_residual", corrected.final_residual}};
  m["uncorrected"] = {{"alpha_fit", to_json(ablation.alpha)}, {"tail_fit", to_json(ablation.tail)},
                      {"final_residual", ablation.final_residual}};
  std::ofstream(dir / "manifest.json") << m.dump(2) << '\n';
  write_field((dir / "W.bin").string(), corrected.W, rec.times.back());

  std::ofstream csv(dir / "residuals.csv");
  csv << "t,l2_corrected,sup_corrected,l2_uncorrected,sup_uncorrected\n";
  char buf[160];
  for (std::size_t i = 0; i < corrected.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", corrected.times[i],
                  corrected.residual_l2[i], corrected.residual_sup[i], ablation.residual_l2[i],
                  ablation.residual_sup[i]);
    csv << buf;
  }
  if (!csv) throw Error(ErrorKind::Io, "cannot write " + (dir / "residuals.csv").string());
}

}  // namespace cdho
