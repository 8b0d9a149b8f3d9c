#pragma once

#include <array>

#include "mtm/grid_fields.hpp"

namespace mtm {

/// Point on the soliton orbit: frequency, velocity, translation and phase.
struct SolitonParams {
    double omega = 0.0;
    double speed = 0.0;
    double shift = 0.0;
    double phase = 0.0;

    /// 1 - omega^2, recomputed on every call.
    double Omega() const noexcept { return 1.0 - omega * omega; }

    /// DomainError if |omega| >= 1 or |speed| >= 1.
    void validate() const;
};

/// Closed-form stationary profile and its x-derivative at a single point.
cplx profile_value(double omega, double x);
cplx profile_derivative(double omega, double x);
/// |U|^2 = (1 - omega^2) / (omega + cosh(2 sqrt(1 - omega^2) x)).
double profile_modulus_sq(double omega, double x);

/// Stationary profile sampled on `grid`. DomainError for |omega| >= 1.
CVec eval_profile(double omega, const Grid& grid);
CVec eval_profile_derivative(double omega, const Grid& grid);

/// Soliton at time t: translate by `shift`, rotate by `phase`, then boost with
/// velocity `speed`. speed == 0 gives (U e^{i(omega t + phase)}, conj(U) e^{...})
/// evaluated at x + shift.
FieldState eval_soliton(const SolitonParams& params, const Grid& grid, double t = 0.0);

/// State translated and rotated: (u, v)(x) -> e^{i phase} (u, v)(x + shift).
/// Band-limited interpolation, periodic grids only.
FieldState gauge_translate(const FieldState& state, double shift, double phase);

/// max |i U' - omega U + conj(U) - 2|U|^2 U| over the grid.
double residual_first_order(const CVec& profile, double omega, const Grid& grid);

/// Max-norm of both components of the stationary second-order system with
/// frequency parameter Omega (the Euler-Lagrange equations of R + Omega Q).
double residual_second_order(const CVec& u, const CVec& v, double Omega, const Grid& grid);

/// Zero-mode directions. `gauge` and `translation` act on (u, v, conj u, conj v);
/// `extra_plus` = (U', -conj U') and `extra_minus` = (U, conj U) act on
/// (u, conj u) and are kernel vectors only at omega = 0. They are returned for
/// any omega so callers can measure how far they are from the kernel.
struct ZeroModes {
    std::array<CVec, 4> gauge;
    std::array<CVec, 4> translation;
    std::array<CVec, 2> extra_plus;
    std::array<CVec, 2> extra_minus;
};
ZeroModes zero_mode_fields(double omega, const Grid& grid);

struct OmegaDerivative {
    CVec d_Omega;           ///< samples of dU/dOmega = -(1/(2 omega)) dU/domega
    double richardson_gap;  ///< max |R(h) - R(h/2)| of the extrapolated omega-derivatives
};

/// Centred differences in omega with one Richardson step. The step is clipped
/// so omega +- h stays inside (-1, 1). DegenerateParameterError for |omega| < 1e-3.
OmegaDerivative omega_derivative(double omega, const Grid& grid, double h = 1e-2);

}  // namespace mtm
