#include "cdho/run.hpp"

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>

#include "cdho/acceptance.hpp"
#include "cdho/corpus.hpp"
#include "cdho/error.hpp"
#include "cdho/field_io.hpp"
#include "cdho/fit.hpp"
#include "cdho/mdfm.hpp"
#include "cdho/norms.hpp"
#include "cdho/scattering.hpp"
#include "cdho/threshold.hpp"

#ifndef CDHO_VERSION
#define CDHO_VERSION "0.0.0"
#endif

namespace cdho {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& p, const std::vector<std::string>& header) : out_(p), path_(p) {
    if (!out_) throw Error(ErrorKind::Io, "cannot write " + p.string());
    row_strings(header);
  }
  void row(const std::vector<double>& v) {
    std::vector<std::string> s;
    for (double x : v) s.push_back(g17(x));
    row_strings(s);
  }
  void row_strings(const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << v[i];
    out_ << '\n';
    if (!out_) throw Error(ErrorKind::Io, "cannot write " + path_.string());
  }

 private:
  std::ofstream out_;
  fs::path path_;
};

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
}

json tolerances(const RunConfig& c) {
  return {{"fundamental_tol", c.zeta_tol},
          {"wronskian_check", 1e-8},
          {"matching_check", 1e-10},
          {"escape_limit", c.solver.escape_limit},
          {"spectral_tail_limit", c.solver.tail_limit},
          {"blowup_factor", c.solver.blowup_factor},
          {"mdfm_escape_fraction", 1e-8},
          {"pullback_mass_deficit", 1e-6},
          {"l2_drift_check", 1e-9},
          {"norm_preservation_check", 1e-8},
          {"threshold_rel_tol", ThresholdOptions{}.rel_tol},
          {"leibniz_stability", 0.2}};
}

// Radius of the ball holding all but `frac` of the mass of f (position coordinates of its space).
double support_radius(const Field& f, double frac = 1e-8) {
  const Eigen::ArrayXd r2 = f.grid.radius_sq(f.space);
  const Eigen::ArrayXd m = f.values.abs2();
  std::vector<Eigen::Index> idx(r2.size());
  for (Eigen::Index i = 0; i < r2.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r2(a) > r2(b); });
  const double total = m.sum();
  double acc = 0.0;
  for (auto i : idx) {
    acc += m(i);
    if (acc > frac * total) return std::sqrt(r2(i));
  }
  return 0.0;
}

json box_report(const RunConfig& c, const Field& u0, const FundamentalPair& pair) {
  const double rho = support_radius(fourier(u0));
  const double z = std::abs(pair.zeta2(c.solver.t_max));
  const double need = 2.0 * z * rho;
  const bool applies = c.solver.scheme == Scheme::Position;
  json j = {{"support_radius_xi", rho}, {"zeta2_at_t_max", z}, {"required_L", need},
            {"L", c.grid.L}, {"applies", applies}, {"adequate", !applies || c.grid.L >= need}};
  if (applies && c.grid.L < need)
    std::cerr << "warning: box half-width L=" << c.grid.L << " is below the sizing rule " << need << '\n';
  return j;
}

std::vector<std::string> diag_header() {
  return {"t", "l2", "linf", "h_gamma_0", "h_0_gamma", "escape", "spectral_tail", "dlog_h_0_gamma",
          "zeta2", "normalized_sup"};
}

void write_diagnostics(const fs::path& p, const Trajectory& tr, const FundamentalPair& pair, int n) {
  Csv csv(p, diag_header());
  for (const auto& d : tr.diagnostics) {
    const double z = pair.zeta2(d.t);
    csv.row({d.t, d.l2, d.linf, d.h_gamma_0, d.h_0_gamma, d.escape, d.spectral_tail, d.dlog_h_0_gamma, z,
             d.linf * std::pow(1 + std::abs(z), 0.5 * n)});
  }
}

void write_snapshots(const fs::path& dir, const Trajectory& tr) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    const Snapshot& s = tr.snapshots[i];
    char name[32];
    std::snprintf(name, sizeof name, "snap_%04zu.bin", i);
    if (s.kind == StateKind::ProfileDelta)
      write_field((dir / name).string(), tr.profile(i), s.t, {{"state", "profile"}});
    else
      write_field((dir / name).string(), s.state, s.t, {{"state", "solution"}});
  }
}

double l2_drift(const Trajectory& tr) {
  double d = 0.0;
  for (const auto& x : tr.diagnostics) d = std::max(d, std::abs(x.l2 / tr.diagnostics.front().l2 - 1.0));
  return d;
}

struct EvolveOutcome {
  Trajectory traj;
  FundamentalPair pair;
  InitialState init;
};

EvolveOutcome do_evolve(const RunConfig& c, const fs::path& out, RunReport& rep) {
  const double span = std::max(std::abs(c.solver.t_start), std::abs(c.solver.t_max));
  EvolveOutcome o{Trajectory{}, pair_for(c, span), make_initial(c)};
  rep.summary["box"] = box_report(c, o.init.state, o.pair);
  o.traj = evolve(o.init, c.solver, c.model, c.params, o.pair);
  write_diagnostics(out / "diagnostics.csv", o.traj, o.pair, c.grid.n);
  if (c.resolved.at("solver").at("write_snapshots").get<bool>()) write_snapshots(out / "snapshots", o.traj);

  json& h = rep.summary["headline"];
  h["steps"] = o.traj.steps;
  const double drift = l2_drift(o.traj);
  h["l2_drift"] = drift;
  rep.summary["invariants"]["l2_drift"] = drift <= 1e-9;
  try {
    const GrowthFit g = track_weighted_growth(o.traj, c.solver.gamma);
    h["growth_coefficient"] = g.coefficient;
    h["growth_std_error"] = g.std_error;
    h["growth_magnitude"] = std::abs(g.coefficient);
  } catch (const Error& e) {
    rep.summary["notes"].push_back(std::string("growth fit: ") + e.what());
  }
  const DecayTrend d = decay_trend(o.traj, c.grid.n);
  if (d.points >= 3) {
    h["decay_slope"] = num(d.slope);
    h["decay_slope_se"] = num(d.std_error);
    h["sup_ratio"] = num(d.ratio);
  }
  return o;
}

void exp_zeta(const RunConfig& c, const fs::path& out, RunReport& rep) {
  const json& z = c.section("zeta");
  const double tm = z.at("t_max").get<double>();
  const int m = z.at("points").get<int>();
  const FundamentalPair pair = solve_fundamental(c.model, std::max(tm, c.zeta_t_max), c.zeta_tol);
  Csv csv(out / "zeta.csv", {"t", "zeta1", "zeta2", "dzeta1", "dzeta2", "wronskian"});
  double wmax = 0.0;
  for (int i = 0; i < m; ++i) {
    const double t = -tm + 2.0 * tm * i / (m - 1);
    const ZetaValues v = pair(t);
    wmax = std::max(wmax, std::abs(v.wronskian() - 1.0));
    csv.row({t, v.z1, v.z2, v.dz1, v.dz2, v.wronskian()});
  }
  json rpt = {{"model", to_string(c.model.kind)}, {"model_r0", c.model.r0}, {"pair_r0", pair.r0()},
              {"lower_bound_c", pair.lower_bound_c()}, {"max_wronskian_defect", wmax},
              {"zeta2_zeros", pair.zeta2_zeros()}};
  rep.summary["invariants"]["wronskian"] = wmax <= 1e-8;
  if (c.model.is_critical()) {
    rpt["c1_plus"] = pair.c1_plus();
    rpt["c1_minus"] = pair.c1_minus();
    rpt["c2_plus"] = pair.c2_plus();
    rpt["c2_minus"] = pair.c2_minus();
    const A1Report a1 = verify_A1(pair, default_probe_grid(pair.r0(), tm));
    rpt["zeta2_lower_bound"] = {{"passed", a1.passed}, {"failures", a1.failures}, {"c", a1.c}, {"r0", a1.r0}};
    rep.summary["invariants"]["zeta2_lower_bound"] = a1.passed;
  }
  if (c.model.kind == SigmaKind::Section4) {
    const MatchingSolution ms = solve_matching(c.model.r0);
    const double res = matching_residual(ms);
    rpt["matching"] = {{"alpha", ms.alpha}, {"x", ms.x}, {"residual", res}, {"c11", ms.plus.c11},
                       {"c12", ms.plus.c12}, {"c21", ms.plus.c21}, {"c22", ms.plus.c22},
                       {"model_alpha", c.model.alpha}};
    rep.summary["invariants"]["matching"] = res <= 1e-10;
  }
  write_json(out / "matching.json", rpt);
  rep.summary["headline"]["max_wronskian_defect"] = wmax;
}

void exp_propagate(const RunConfig& c, const fs::path& out, RunReport& rep) {
  std::vector<double> times = c.section("propagate").at("times").get<std::vector<double>>();
  double span = 0.0;
  for (double t : times) span = std::max(span, std::abs(t));
  const FundamentalPair pair = pair_for(c, span);
  const Field u0 = make_initial(c).state;
  const bool free_gauss = c.model.kind == SigmaKind::Zero && c.initial.kind == "gaussian" &&
                          c.initial.center == 0.0 && c.initial.momentum == 0.0;
  const double w = c.initial.width > 0 ? c.initial.width : ground_state_width(c.model);
  Eigen::Index origin = 0;  // node N/2 on every axis is x = 0
  for (int k = 0; k < c.grid.n; ++k) origin = origin * c.grid.N + c.grid.N / 2;
  const cd amp0 = u0.values(origin);
  const bool write_fields = c.section("propagate").at("write_fields").get<bool>();
  Csv csv(out / "propagate.csv", {"t", "l2", "linf", "zeta2", "N_out", "L_out", "l2_error_free"});
  double worst_norm = 0.0;
  for (double t : times) {
    // the input box while it still holds the solution, the dilated one afterwards
    const Grid wide = dispersed_grid(u0.grid, pair.zeta2(t));
    const Field u = mdfm_propagate(u0, pair, t, wide.L > u0.grid.L ? wide : u0.grid);
    double err = std::numeric_limits<double>::quiet_NaN();
    if (free_gauss) {
      const cd a(w * w, t);
      const Field ex = Field::sample(u.grid, Space::Position, [&](const Eigen::VectorXd& x) {
        return amp0 * std::pow(w * w / a, 0.5 * c.grid.n) * std::exp(-x.squaredNorm() / (2.0 * a));
      });
      err = l2_distance(u, ex);
    }
    worst_norm = std::max(worst_norm, std::abs(l2_norm(u) / l2_norm(u0) - 1.0));
    csv.row({t, l2_norm(u), linf_norm(u), pair.zeta2(t), double(u.grid.N), u.grid.L, err});
    if (write_fields) {
      const std::string stem = "u_t" + g17(t);
      write_field((out / (stem + ".bin")).string(), u, t);
      if (c.grid.n == 1) write_field_csv((out / (stem + ".csv")).string(), u);
    }
  }
  rep.summary["headline"]["max_norm_defect"] = worst_norm;
  rep.summary["invariants"]["norm_preservation"] = worst_norm <= 1e-8;
}

void exp_evolve(const RunConfig& c, const fs::path& out, RunReport& rep) { do_evolve(c, out, rep); }

void exp_scatter(const RunConfig& c, const fs::path& out, RunReport& rep) {
  EvolveOutcome o = do_evolve(c, out, rep);
  const json& s = c.section("scatter");
  const PhaseConvention conv = phase_convention_from_string(s.at("phase_mu_convention").get<std::string>());
  const PhaseModel pm = s.at("phase_model").get<std::string>() == "loglog" ? PhaseModel::LogLog : PhaseModel::WIntegral;
  const ScatteringRecord rec = build_record(o.traj, c.params, conv);
  const ScatteringResult a = extract_W(rec, true), b = extract_W(rec, false);
  save_scattering(out / "scattering", rec, a, b);

  ScatteringRecord other = rec;
  other.convention = conv == PhaseConvention::Single ? PhaseConvention::Double : PhaseConvention::Single;
  const ScatteringResult a2 = extract_W(other, true);

  json& h = rep.summary["headline"];
  h["alpha_fit"] = num(a.alpha.slope);
  h["alpha_fit_se"] = num(a.alpha.std_error);
  h["tail_slope"] = num(a.tail.slope);
  h["tail_slope_se"] = num(a.tail.std_error);
  h["final_residual"] = a.final_residual;
  h["final_residual_uncorrected"] = b.final_residual;
  h["ablation_ratio"] = a.final_residual > 0 ? num(b.final_residual / a.final_residual) : json(nullptr);
  h[std::string("final_residual_") + to_string(other.convention)] = a2.final_residual;

  bool theta_monotone = true;
  if (c.params.mu_L >= 0)
    for (std::size_t k = 1; k < rec.size(); ++k)
      if ((rec.theta(k) < rec.theta(k - 1)).any()) theta_monotone = false;
  rep.summary["invariants"]["theta_nondecreasing"] = theta_monotone;

  const auto pc = profile_compare(rec, a, o.pair, pm, s.at("mask_rel").get<double>());
  if (pc) {
    Csv csv(out / "profile_compare.csv", {"t", "error_l2"});
    for (std::size_t i = 0; i < pc->times.size(); ++i) csv.row({pc->times[i], pc->error_l2[i]});
    h["profile_trend"] = num(pc->trend.slope);
    rep.summary["profile_compare"] = {{"model", to_string(pm)}, {"mask_size", pc->mask_size},
                                      {"decreasing", pc->decreasing}};
  } else {
    rep.summary["profile_compare"] = "NotApplicable";
  }
  try {
    const double eps = c.solver.epsilon_prime > 0 ? c.solver.epsilon_prime
                                                   : sobolev_norm(o.init.state, c.solver.gamma, SobolevSide::FrequencyWeighted) +
                                                         sobolev_norm(o.init.state, c.solver.gamma, SobolevSide::PositionWeighted);
    const L4Report l4 = verify_L4_bound(o.traj, rec, o.pair, eps, s.at("alpha").get<double>(), c.solver.gamma,
                                        s.at("gamma_prime").get<double>());
    rep.summary["l4_bound"] = {{"passed", l4.passed}, {"C_sup", l4.C_sup}, {"C_phase", l4.C_phase},
                               {"failures", l4.failures}};
    Csv csv(out / "l4_bound.csv", {"t", "ratio_sup", "ratio_phase"});
    for (std::size_t i = 0; i < l4.times.size(); ++i) csv.row({l4.times[i], l4.ratio_sup[i], l4.ratio_phase[i]});
  } catch (const Error& e) {
    rep.summary["l4_bound"] = {{"error", e.what()}};
  }
}

void exp_classify(const RunConfig& c, const fs::path& out, RunReport& rep) {
  const json& s = c.section("classify");
  const int n = c.params.n;
  double ell = s.at("decay_log_exponent").get<double>();
  if (ell == 0.0) ell = 0.5 * n;
  auto decay = [n, ell](double x) { return std::pow(x, -0.25 * n) * std::pow(std::log(x), -ell); };
  const double s0 = s.at("s0").get<double>(), s_max = s.at("s_max").get<double>(),
               bound = s.at("bound").get<double>();
  json cases = json::array();
  for (double th : s.at("theta3").get<std::vector<double>>()) {
    const ThresholdReport r = classify_threshold(decay, [th](double a) { return std::pow(a, th); }, s0, s_max, bound);
    cases.push_back({{"name", "power"}, {"theta3", th}, {"report", to_json(r)}});
  }
  NonlinearityParams unit = c.params;
  if (s.at("include_FL").get<bool>()) {
    unit.mu_L = 1.0;
    unit.mu_S = 0.0;
    const ThresholdReport r = classify_threshold(decay, [&](double a) { return eval_FL(a, unit); }, s0, s_max, bound);
    cases.push_back({{"name", "F_L"}, {"report", to_json(r)}});
  }
  if (s.at("include_FS").get<bool>()) {
    unit.mu_L = 0.0;
    unit.mu_S = 1.0;
    const ThresholdReport r = classify_threshold(decay, [&](double a) { return eval_FS(a, unit); }, s0, s_max, bound);
    cases.push_back({{"name", "F_S"}, {"theta", unit.theta}, {"report", to_json(r)}});
  }
  write_json(out / "verdicts.json", {{"decay", {{"power", -0.25 * n}, {"log_power", -ell}}}, {"cases", cases}});
  int inconclusive = 0;
  for (const auto& k : cases) inconclusive += k.at("report").at("verdict") == "Inconclusive";
  rep.summary["headline"]["inconclusive"] = inconclusive;
}

void exp_leibniz(const RunConfig& c, const fs::path& out, RunReport& rep) {
  const json& s = c.section("leibniz");
  const int count = s.at("corpus").get<int>();
  const double L = s.at("L").get<double>();
  const int N = s.at("N").get<int>();
  const bool refine = s.at("refine").get<bool>();
  const NonlinearPart part = s.at("part").get<std::string>() == "L" ? NonlinearPart::L : NonlinearPart::S;
  const auto corpus = make_corpus(count, c.seed, L);
  Csv csv(out / "leibniz.csv", {"gamma", "N", "index", "ratio"});
  bool finite = true, stable = true;
  double worst_ratio = 0.0, worst_change = 0.0;
  json per_gamma = json::array();
  for (double g : s.at("gammas").get<std::vector<double>>()) {
    double mx[2] = {0.0, 0.0};
    for (int r = 0; r < (refine ? 2 : 1); ++r) {
      const Grid grid(c.params.n, N << r, L);
      for (int i = 0; i < count; ++i) {
        const double v = leibniz_ratio(sample(corpus[i], grid), g, c.params, part);
        finite = finite && std::isfinite(v);
        mx[r] = std::max(mx[r], v);
        csv.row({g, double(grid.N), double(i), v});
      }
    }
    json row = {{"gamma", g}, {"max", mx[0]}};
    worst_ratio = std::max(worst_ratio, mx[0]);
    if (refine) {
      const double change = mx[1] / mx[0] - 1.0;
      worst_change = std::max(worst_change, std::abs(change));
      row["max_refined"] = mx[1];
      row["relative_change"] = change;
      stable = stable && std::abs(change) <= 0.2;
    }
    per_gamma.push_back(row);
  }
  rep.summary["leibniz"] = per_gamma;
  rep.summary["headline"]["max_ratio"] = worst_ratio;
  if (refine) rep.summary["headline"]["max_relative_change"] = worst_change;
  rep.summary["invariants"]["finite"] = finite;
  if (refine) rep.summary["invariants"]["refinement_stable"] = stable;
}

void exp_acceptance(const RunConfig& c, const fs::path& out, RunReport& rep) {
  const std::vector<int> only = c.section("acceptance").at("only").get<std::vector<int>>();
  std::ofstream txt(out / "acceptance.txt");
  const auto results = run_acceptance(only, &std::cout);
  json arr = json::array();
  bool all = true;
  for (const auto& r : results) {
    txt << format_line(r) << '\n';
    arr.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}});
    all = all && r.passed;
  }
  write_json(out / "acceptance.json", arr);
  rep.summary["invariants"]["acceptance"] = all;
}

}  // namespace

FundamentalPair pair_for(const RunConfig& c, double t_span) {
  const double tm = c.zeta_t_max > 0 ? c.zeta_t_max : std::max(1.01 * t_span, 2.0 * c.model.r0);
  return solve_fundamental(c.model, tm, c.zeta_tol);
}

DecayTrend decay_trend(const Trajectory& traj, int n) {
  DecayTrend d;
  if (!traj.pair) return d;
  std::vector<double> xs, ys;
  double mx = 0.0, mn = std::numeric_limits<double>::infinity();
  for (const auto& di : traj.diagnostics) {
    if (std::abs(di.t) < traj.pair->r0() || std::abs(di.t) <= 0) continue;
    const double v = di.linf * std::pow(1.0 + std::abs(traj.pair->zeta2(di.t)), 0.5 * n);
    xs.push_back(std::log(std::abs(di.t)));
    ys.push_back(std::log(v));
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  d.points = static_cast<int>(xs.size());
  if (d.points < 3) return d;
  const LinearFit f = fit_line(Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size()),
                               Eigen::Map<Eigen::VectorXd>(ys.data(), ys.size()));
  d.slope = f.coeffs(1);
  d.std_error = f.std_errors(1);
  d.ratio = mx / mn;
  return d;
}

RunReport run(const RunConfig& c, const fs::path& out) {
  fs::create_directories(out);
  RunReport rep;
  rep.summary = {{"headline", json::object()}, {"invariants", json::object()}, {"notes", json::array()}};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (c.experiment) {
      case Experiment::Zeta: exp_zeta(c, out, rep); break;
      case Experiment::Propagate: exp_propagate(c, out, rep); break;
      case Experiment::Evolve: exp_evolve(c, out, rep); break;
      case Experiment::Scatter: exp_scatter(c, out, rep); break;
      case Experiment::Classify: exp_classify(c, out, rep); break;
      case Experiment::LeibnizScan: exp_leibniz(c, out, rep); break;
      case Experiment::Acceptance: exp_acceptance(c, out, rep); break;
    }
  } catch (const Error& e) {
    rep.summary["error"] = e.what();
    rep.status = 1;
  }
  for (const auto& [k, v] : rep.summary["invariants"].items())
    if (!v.get<bool>()) rep.status = 1;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string canonical = c.resolved.dump();
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().filename() != "manifest.json") files.push_back(e.path().filename().string());
  std::sort(files.begin(), files.end());
  json manifest = {
      {"tool", "cdho"},
      {"version", CDHO_VERSION},
      {"experiment", to_string(c.experiment)},
      {"config", c.resolved},
      {"config_hash", hex64(fnv1a(canonical))},
      {"seed", c.seed},
      {"versions",
       {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"compiler", __VERSION__}}},
      {"fft", "Eigen unsupported FFT (kissfft backend); binary outputs are reproducible for the same build "
              "and machine"},
      {"tolerances", tolerances(c)},
      {"wall_time_s", wall},
      {"status", rep.status},
      {"summary", rep.summary},
      {"files", files},
  };
  write_json(out / "manifest.json", manifest);
  return rep;
}

}  // namespace cdho
