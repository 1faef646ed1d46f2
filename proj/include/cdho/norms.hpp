#pragma once

#include "cdho/grid.hpp"
#include "cdho/nonlinearity.hpp"

namespace cdho {

enum class SobolevSide { FrequencyWeighted, PositionWeighted };  // H^{γ,0}, H^{0,γ}

enum class NonlinearPart { L, S };

// (1 + |·|²)^{γ/2} on the side's variable.
Eigen::ArrayXd sobolev_weight(const Grid& g, double gamma, Space s);

double sobolev_norm(const Field& f, double gamma, SobolevSide side);

// log(‖base + delta‖ / ‖base‖) in the weighted norm, accurate when delta ≪ base.
double weighted_log_ratio(const Field& base, const Field& delta, double gamma, SobolevSide side);

// ‖F(|f|)f‖_{γ,0} / (F(‖f‖∞)·‖f‖_{γ,0}), F = F_L or F_S with unit coefficient.
double leibniz_ratio(const Field& f, double gamma, const NonlinearityParams& params,
                     NonlinearPart which);

}  // namespace cdho
