#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "mtm/grid_fields.hpp"

namespace mtm {

/// Charge, momentum, Hamiltonian and the higher-order charge at one time.
struct ConservedSet {
    double Q = 0.0;
    double P = 0.0;
    double H = 0.0;
    double R = 0.0;
    double t = 0.0;
};

/// int (|u|^2 + |v|^2).
double charge(const FieldState& state);
/// (i/2) int (u conj(u)_x - u_x conj(u) + v conj(v)_x - v_x conj(v)).
double momentum(const FieldState& state);
/// Dirac energy with the quartic coupling 2|u|^2|v|^2.
double hamiltonian(const FieldState& state);
/// Higher-order conserved charge; the integral of `density_flux(...).first`.
double higher_charge(const FieldState& state);
/// R + (1 - omega^2) Q.
double lyapunov(const FieldState& state, double omega);

ConservedSet conserved_set(const FieldState& state);

/// Pointwise density and flux of the local conservation law for R.
std::pair<RVec, RVec> density_flux(const FieldState& state);

/// max |(rho(t+dt) - rho(t-dt)) / (2 dt) + j_x(t)| from three equally spaced
/// snapshots. ArgumentError on mismatched grids or non-uniform spacing.
double balance_residual(const FieldState& before, const FieldState& now, const FieldState& after);

/// Relative imaginary-part tolerance applied to every integral above.
inline constexpr double kImaginaryResidueTolerance = 1e-10;

/// Rows `t,Q,P,H,R,Lambda` with Lambda = R + (1 - omega^2) Q.
void write_conserved_csv(std::ostream& out, const std::vector<ConservedSet>& rows, double omega);

}  // namespace mtm
