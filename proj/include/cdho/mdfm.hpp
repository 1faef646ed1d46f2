#pragma once

#include "cdho/fundamental.hpp"
#include "cdho/grid.hpp"

namespace cdho {

// (iτ)^{−n/2} on the branch arg(iτ) = sgn(τ)·π/2 + 2π·branch (branch 0 is principal).
cd dilation_factor(double tau, int n, int branch = 0);

// Branch index for (iζ2(t))^{n/2} continued through `caustics` zeros of ζ2 between 0 and t.
int maslov_branch(double t, int caustics);

// M(τ)f = e^{i|x|²/(2τ)} f.
Field apply_M(const Field& f, double tau);

// (D(τ)φ)(x) = (iτ)^{−n/2} φ(x/τ), by band-limited evaluation of φ at x/τ on `out`.
// Throws DomainEscape if more than 1e−8 of ‖φ‖² lies outside the sampled window.
Field apply_D(const Field& f, double tau, int branch, const Grid& out);
Field apply_D(const Field& f, double tau, int branch = 0);

// Grid on which ζ2 dilation maps the input's ξ-grid onto the output x-grid node by node.
Grid dispersed_grid(const Grid& in, double zeta2);

// U0(t,0)f = M(ζ2/ζ2′) D(ζ2) F M(ζ2/ζ1) f, evaluated on `out`.
Field mdfm_propagate(const Field& f, const FundamentalPair& pair, double t, const Grid& out);
Field mdfm_propagate(const Field& f, const FundamentalPair& pair, double t);

// U0(0,t)u: inverse factors in reverse order, evaluated on `out` (position space).
Field mdfm_pullback(const Field& u, const FundamentalPair& pair, double t, const Grid& out);

// ζ values at t after the MDFM preconditions; throws SingularTime.
ZetaValues mdfm_zeta(const FundamentalPair& pair, double t);

}  // namespace cdho
