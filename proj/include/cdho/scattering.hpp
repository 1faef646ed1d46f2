#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdho/evolution.hpp"
#include "cdho/fundamental.hpp"
#include "cdho/grid.hpp"
#include "cdho/nonlinearity.hpp"

namespace cdho {

// Where μ_L sits in the accumulated phase. Single: only inside F_L. Double: F_L carries μ_L and
// the integral is multiplied by μ_L once more, as the phase is literally printed.
enum class PhaseConvention { Single, Double };

const char* to_string(PhaseConvention c) noexcept;
PhaseConvention phase_convention_from_string(const std::string& s);

// 𝓕(U0(0,t)u(t)), frequency space on u's grid.
Field to_profile(const Field& u, const FundamentalPair& pair, double t);

// 𝓕v(t_k) = base + deltas[k]. Keeping the two apart lets residuals far below the size of 𝓕v
// be resolved. theta_unit is Θ for μ_L = 1; theta(k) applies the convention.
struct ScatteringRecord {
  Field base;
  std::vector<double> times;
  std::vector<Field> deltas;
  std::vector<Eigen::ArrayXd> theta_unit;
  Eigen::ArrayXd last_integrand;
  NonlinearityParams params;
  PhaseConvention convention = PhaseConvention::Single;

  double mu_factor() const;
  Eigen::ArrayXd theta(std::size_t k) const { return mu_factor() * theta_unit.at(k); }
  Field spectrum(std::size_t k) const;
  std::size_t size() const { return times.size(); }
};

ScatteringRecord make_record(const Field& base_spectrum, const NonlinearityParams& params,
                             PhaseConvention convention = PhaseConvention::Single);

// Appends (t, 𝓕v = base + delta) and advances Θ by the trapezoid rule in log|τ|.
// The first appended time is the phase origin (Θ = 0) and must satisfy |t| ≥ pair.r0.
void phase_integral(ScatteringRecord& record, double t, const Field& delta_spectrum,
                    const FundamentalPair& pair);

// Record from the snapshots of a run with |t| ≥ pair.r0.
ScatteringRecord build_record(const Trajectory& traj, const NonlinearityParams& params,
                              PhaseConvention convention = PhaseConvention::Single);

struct RateFit {
  double slope = 0.0, std_error = 0.0, intercept = 0.0;
  int points = 0;
};

struct ScatteringResult {
  Field W;
  bool phase_corrected = true;
  std::vector<double> times;  // ladder times strictly between the origin and t_last
  std::vector<double> residual_l2, residual_sup;
  RateFit alpha;       // log r against log log t over the whole series
  RateFit tail;        // same over the last 1.5 decades of t
  double final_residual = 0.0;  // L² residual at the last time with a defined residual
};

// W = 𝓕v(t_last)e^{iΘ(t_last)}; residuals ‖𝓕v e^{iΘ} − W‖. phase_corrected = false forces Θ = 0.
ScatteringResult extract_W(const ScatteringRecord& record, bool phase_corrected = true,
                           double tail_decades = 1.5);

enum class PhaseModel { LogLog, WIntegral };
const char* to_string(PhaseModel m) noexcept;

struct ProfileComparison {
  std::vector<double> times;
  std::vector<double> error_l2;
  Eigen::ArrayXd Phi;
  int mask_size = 0;
  RateFit trend;  // log error against log log t over the last decade
  bool decreasing = false;
  PhaseModel model = PhaseModel::LogLog;
};

// ‖u(t) − e^{−iψ(t,ξ) − iΦ}U0(t,0)𝓕^{-1}W‖₂ evaluated in the profile variable (unitarity), on
// the mask |W| > mask_rel·max|W|. LogLog: ψ = F_L(|W|)log log t. WIntegral: ψ = ∫F_L(|ζ2|^{-n/2}|W|).
// Returns nullopt when the mask is empty.
std::optional<ProfileComparison> profile_compare(const ScatteringRecord& record,
                                                 const ScatteringResult& result,
                                                 const FundamentalPair& pair,
                                                 PhaseModel model = PhaseModel::LogLog,
                                                 double mask_rel = 1e-3);

struct L4Report {
  std::vector<double> times;
  std::vector<double> ratio_sup;    // ‖u‖∞ over the two ζ-weighted terms
  std::vector<double> ratio_phase;  // ‖𝓕v‖∞ over ε′ + ∫(|μ_L|I1 + |μ_S|I2)
  double C_sup = 0.0, C_phase = 0.0;
  bool passed = false;
  std::vector<std::string> failures;
};

// Both sides of the two L∞ estimates on the ladder. Ratios bounded (no growth from the first
// to the second half of the ladder) count as a pass. Throws Precondition outside
// γ′ > n/2, γ > n/2 + 2α, 0 < α ≤ 1.
L4Report verify_L4_bound(const Trajectory& traj, const ScatteringRecord& record,
                         const FundamentalPair& pair, double epsilon_prime, double alpha,
                         double gamma, double gamma_prime);

// Directory layout: manifest.json, W.bin (field format), residuals.csv.
void save_scattering(const std::filesystem::path& dir, const ScatteringRecord& record,
                     const ScatteringResult& corrected, const ScatteringResult& ablation);

}  // namespace cdho
