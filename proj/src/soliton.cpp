#include "mtm/soliton.hpp"

#include <algorithm>
#include <cmath>

#include "mtm/errors.hpp"

namespace mtm {

void SolitonParams::validate() const {
    if (!(std::abs(omega) < 1.0)) throw DomainError("soliton frequency must satisfy |omega| < 1");
    if (!(std::abs(speed) < 1.0)) throw DomainError("soliton speed must satisfy |c| < 1");
    if (!std::isfinite(shift) || !std::isfinite(phase)) throw DomainError("non-finite shift or phase");
}

namespace {

void check_omega(double omega) {
    if (!(std::abs(omega) < 1.0)) throw DomainError("soliton frequency must satisfy |omega| < 1");
}

}  // namespace

cplx profile_value(double omega, double x) {
    check_omega(omega);
    const double s = std::sqrt(1.0 - omega * omega);
    const cplx den{std::sqrt(1.0 + omega) * std::cosh(s * x), std::sqrt(1.0 - omega) * std::sinh(s * x)};
    return s / den;
}

cplx profile_derivative(double omega, double x) {
    check_omega(omega);
    const double s = std::sqrt(1.0 - omega * omega);
    const cplx den{std::sqrt(1.0 + omega) * std::cosh(s * x), std::sqrt(1.0 - omega) * std::sinh(s * x)};
    const cplx dden{s * std::sqrt(1.0 + omega) * std::sinh(s * x), s * std::sqrt(1.0 - omega) * std::cosh(s * x)};
    return -s * dden / (den * den);
}

double profile_modulus_sq(double omega, double x) {
    check_omega(omega);
    const double Om = 1.0 - omega * omega;
    return Om / (omega + std::cosh(2.0 * std::sqrt(Om) * x));
}

CVec eval_profile(double omega, const Grid& grid) {
    check_omega(omega);
    CVec out(grid.size());
    for (int j = 0; j < grid.size(); ++j) out[j] = profile_value(omega, grid.x(j));
    return out;
}

CVec eval_profile_derivative(double omega, const Grid& grid) {
    check_omega(omega);
    CVec out(grid.size());
    for (int j = 0; j < grid.size(); ++j) out[j] = profile_derivative(omega, grid.x(j));
    return out;
}

FieldState eval_soliton(const SolitonParams& params, const Grid& grid, double t) {
    params.validate();
    const double w = params.omega, c = params.speed;
    FieldState state = FieldState::zero(grid, t);
    if (c == 0.0) {
        const cplx rot = std::exp(I * (w * t + params.phase));
        for (int j = 0; j < grid.size(); ++j) {
            const cplx U = profile_value(w, grid.x(j) + params.shift);
            state.u[j] = U * rot;
            state.v[j] = std::conj(U) * rot;
        }
        return state;
    }
    const double gamma = std::sqrt(1.0 - c * c);
    const double au = std::pow((1.0 + c) / (1.0 - c), 0.25);
    for (int j = 0; j < grid.size(); ++j) {
        const double x = grid.x(j);
        const double xi = (x - c * t) / gamma;
        const double tau = (t - c * x) / gamma;
        const cplx U = profile_value(w, xi + params.shift);
        const cplx rot = std::exp(I * (w * tau + params.phase));
        state.u[j] = au * U * rot;
        state.v[j] = std::conj(U) * rot / au;
    }
    return state;
}

FieldState gauge_translate(const FieldState& state, double shift, double phase) {
    state.validate();
    const cplx rot = std::exp(I * phase);
    FieldState out = state;
    out.u = fourier_shift(state.u, state.grid, shift) * rot;
    out.v = fourier_shift(state.v, state.grid, shift) * rot;
    return out;
}

double residual_first_order(const CVec& profile, double omega, const Grid& grid) {
    const CVec d = differentiate(profile, grid);
    double worst = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        const cplx U = profile[j];
        const cplx r = I * d[j] - omega * U + std::conj(U) - 2.0 * std::norm(U) * U;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double residual_second_order(const CVec& u, const CVec& v, double Omega, const Grid& grid) {
    if (u.size() != grid.size() || v.size() != grid.size())
        throw ArgumentError("residual_second_order: field length does not match grid");
    const CVec ux = differentiate(u, grid), vx = differentiate(v, grid);
    const CVec uxx = second_derivative(u, grid), vxx = second_derivative(v, grid);
    double worst = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        const cplx a = u[j], b = v[j];
        const double A = std::norm(a), B = std::norm(b);
        const cplx r1 = uxx[j] + 2.0 * I * (A + B) * ux[j] + 2.0 * I * a * b * std::conj(vx[j]) -
                        2.0 * B * (2.0 * A + B) * a + (2.0 * A + B) * b + a * a * std::conj(b) - Omega * a;
        const cplx r2 = vxx[j] - 2.0 * I * (A + B) * vx[j] - 2.0 * I * a * b * std::conj(ux[j]) -
                        2.0 * A * (A + 2.0 * B) * b + (A + 2.0 * B) * a + b * b * std::conj(a) - Omega * b;
        worst = std::max({worst, std::abs(r1), std::abs(r2)});
    }
    return worst;
}

ZeroModes zero_mode_fields(double omega, const Grid& grid) {
    const CVec U = eval_profile(omega, grid);
    const CVec dU = eval_profile_derivative(omega, grid);
    const CVec Ub = U.conjugate(), dUb = dU.conjugate();
    ZeroModes z;
    z.gauge = {I * U, I * Ub, -I * Ub, -I * U};
    z.translation = {dU, dUb, dUb, dU};
    z.extra_plus = {dU, -dUb};
    z.extra_minus = {U, Ub};
    return z;
}

OmegaDerivative omega_derivative(double omega, const Grid& grid, double h) {
    check_omega(omega);
    if (std::abs(omega) < 1e-3)
        throw DegenerateParameterError("dU/dOmega is singular at omega = 0 (|omega| < 1e-3)");
    if (!(h > 0.0)) throw ArgumentError("omega_derivative: step must be positive");
    h = std::min(h, 0.25 * (1.0 - std::abs(omega)));

    auto central = [&](double step) -> CVec {
        return (eval_profile(omega + step, grid) - eval_profile(omega - step, grid)) / (2.0 * step);
    };
    const CVec d1 = central(h), d2 = central(0.5 * h), d4 = central(0.25 * h);
    const CVec r_h = (4.0 * d2 - d1) / 3.0;
    const CVec r_h2 = (4.0 * d4 - d2) / 3.0;

    OmegaDerivative out;
    out.d_Omega = -r_h2 / (2.0 * omega);
    out.richardson_gap = (r_h - r_h2).cwiseAbs().maxCoeff();
    return out;
}

}  // namespace mtm
