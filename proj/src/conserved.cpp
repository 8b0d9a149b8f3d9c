#include "mtm/conserved.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "mtm/errors.hpp"

namespace mtm {
namespace {

// Integrate a complex density whose exact integral is real; reject anything
// whose imaginary part is not roundoff relative to the integrand's size.
double real_integral(const CVec& integrand, const Grid& grid, const char* what) {
    const cplx value = quadrature(integrand, grid);
    const double scale = quadrature(RVec(integrand.cwiseAbs()), grid);
    if (std::abs(value.imag()) > kImaginaryResidueTolerance * std::max(1.0, scale))
        throw NumericalError(std::string(what) + ": imaginary residue " + std::to_string(value.imag()) +
                             " exceeds tolerance");
    return value.real();
}

struct Pointwise {
    CVec u, v, ux, vx;
};

Pointwise prepare(const FieldState& s) {
    s.validate();
    return {s.u, s.v, differentiate(s.u, s.grid), differentiate(s.v, s.grid)};
}

}  // namespace

double charge(const FieldState& state) {
    state.validate();
    const CVec d = (state.u.cwiseAbs2() + state.v.cwiseAbs2()).cast<cplx>();
    return real_integral(d, state.grid, "charge");
}

double momentum(const FieldState& state) {
    const Pointwise f = prepare(state);
    const CVec d = 0.5 * I *
                   (f.u.cwiseProduct(f.ux.conjugate()) - f.ux.cwiseProduct(f.u.conjugate()) +
                    f.v.cwiseProduct(f.vx.conjugate()) - f.vx.cwiseProduct(f.v.conjugate()));
    return real_integral(d, state.grid, "momentum");
}

double hamiltonian(const FieldState& state) {
    const Pointwise f = prepare(state);
    const CVec kinetic = 0.5 * I *
                         (f.u.cwiseProduct(f.ux.conjugate()) - f.ux.cwiseProduct(f.u.conjugate()) -
                          f.v.cwiseProduct(f.vx.conjugate()) + f.vx.cwiseProduct(f.v.conjugate()));
    const CVec potential = -f.v.cwiseProduct(f.u.conjugate()) - f.u.cwiseProduct(f.v.conjugate()) +
                           (2.0 * f.u.cwiseAbs2().cwiseProduct(f.v.cwiseAbs2())).cast<cplx>();
    return real_integral(CVec(kinetic + potential), state.grid, "hamiltonian");
}

namespace {

// Complex-valued density before the real part is taken, so the imaginary
// residue can be checked.
CVec raw_density(const Pointwise& f, CVec* flux) {
    const Eigen::Index n = f.u.size();
    CVec rho(n);
    if (flux) flux->resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const cplx u = f.u[j], v = f.v[j], ux = f.ux[j], vx = f.vx[j];
        const double A = std::norm(u), B = std::norm(v);
        const cplx cu = ux * std::conj(u) - std::conj(ux) * u;
        const cplx cv = vx * std::conj(v) - std::conj(vx) * v;
        const cplx mix = u * std::conj(v) + std::conj(u) * v;
        rho[j] = std::norm(ux) + std::norm(vx) - 0.5 * I * cu * (A + 2.0 * B) + 0.5 * I * cv * (2.0 * A + B) -
                 mix * (A + B) + 2.0 * A * B * (A + B);
        if (flux)
            (*flux)[j] = std::norm(ux) - std::norm(vx) - 0.5 * I * cu * (A + 2.0 * B) -
                         0.5 * I * cv * (2.0 * A + B) - 0.5 * mix * (A - B);
    }
    return rho;
}

}  // namespace

double higher_charge(const FieldState& state) {
    const Pointwise f = prepare(state);
    return real_integral(raw_density(f, nullptr), state.grid, "higher_charge");
}

double lyapunov(const FieldState& state, double omega) {
    return higher_charge(state) + (1.0 - omega * omega) * charge(state);
}

ConservedSet conserved_set(const FieldState& state) {
    return {charge(state), momentum(state), hamiltonian(state), higher_charge(state), state.t};
}

std::pair<RVec, RVec> density_flux(const FieldState& state) {
    const Pointwise f = prepare(state);
    CVec flux;
    const CVec rho = raw_density(f, &flux);
    return {rho.real(), flux.real()};
}

double balance_residual(const FieldState& before, const FieldState& now, const FieldState& after) {
    if (!(before.grid == now.grid) || !(now.grid == after.grid))
        throw ArgumentError("balance_residual: snapshots live on different grids");
    const double dt1 = now.t - before.t, dt2 = after.t - now.t;
    if (!(dt1 > 0.0) || std::abs(dt1 - dt2) > 1e-9 * std::max(1.0, std::abs(dt1)))
        throw ArgumentError("balance_residual: snapshots must be increasing and equally spaced in time");
    const RVec rho_b = density_flux(before).first;
    const RVec rho_a = density_flux(after).first;
    const RVec flux = density_flux(now).second;
    const RVec r = (rho_a - rho_b) / (dt1 + dt2) + differentiate(flux, now.grid);
    return r.cwiseAbs().maxCoeff();
}

void write_conserved_csv(std::ostream& out, const std::vector<ConservedSet>& rows, double omega) {
    out << std::setprecision(17) << "t,Q,P,H,R,Lambda\n";
    for (const auto& r : rows)
        out << r.t << ',' << r.Q << ',' << r.P << ',' << r.H << ',' << r.R << ','
            << r.R + (1.0 - omega * omega) * r.Q << '\n';
}

}  // namespace mtm
