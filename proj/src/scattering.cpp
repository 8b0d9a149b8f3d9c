#include "mtm/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>

#include "mtm/conserved.hpp"
#include "mtm/errors.hpp"

namespace mtm {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,         7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

// Field samples at x_j + offset*dx for every j, built on demand from the
// trigonometric interpolant and cached by offset. Offsets are dyadic multiples
// of the tableau nodes, so they are exact multiples of 1 / (90 * 2^depth).
class ShiftedFields {
public:
    ShiftedFields(const FieldState& s, int depth) : state_(s), scale_(90.0 * std::ldexp(1.0, depth)) {}

    std::pair<cplx, cplx> at(int j, double offset) {
        const int n = state_.grid.size();
        if (offset == 0.0) return {state_.u[j], state_.v[j]};
        if (offset == 1.0) return {state_.u[(j + 1) % n], state_.v[(j + 1) % n]};
        const long long key = std::llround(offset * scale_);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            const double shift = offset * state_.grid.dx();
            it = cache_.emplace(key, std::make_pair(fourier_shift(state_.u, state_.grid, shift),
                                                    fourier_shift(state_.v, state_.grid, shift)))
                     .first;
        }
        return {it->second.first[j], it->second.second[j]};
    }

private:
    const FieldState& state_;
    double scale_;
    std::map<long long, std::pair<CVec, CVec>> cache_;
};

}  // namespace

ScatteringSample riccati_solve(const FieldState& state, double lambda, const RiccatiOptions& options) {
    if (!std::isfinite(lambda) || std::abs(lambda) < 0.05 || std::abs(lambda) > 20.0)
        throw ArgumentError("spectral parameter outside the window 0.05 <= |lambda| <= 20");
    state.validate();
    const Grid& grid = state.grid;
    if (!grid.periodic()) throw ConfigurationError("riccati_solve expects a periodic sample of a decaying state");
    if (options.max_refinement < 0 || options.max_refinement > 20)
        throw ArgumentError("max_refinement must lie in [0, 20]");

    ScatteringSample out;
    out.lambda = lambda;
    const int n = grid.size();
    const double dx = grid.dx();
    const double k = out.k();
    const double r2 = 1.0 / std::sqrt(2.0);

    auto rhs = [&](cplx u, cplx v, cplx nu) {
        const cplx coupling = lambda * std::conj(v) + std::conj(u) / lambda;
        const cplx source = lambda * v + u / lambda;
        return -I * (2.0 * k + std::norm(v) - std::norm(u)) * nu + I * r2 * coupling * nu * nu - I * r2 * source;
    };

    ShiftedFields fields(state, options.max_refinement);
    out.nu = CVec::Zero(n);
    cplx nu{0.0, 0.0};
    int level = 0;
    for (int j = 0; j + 1 < n; ++j) {
        long long sub = 0;
        bool easy = true;
        while (sub < (1LL << level)) {
            const double frac = std::ldexp(1.0, -level);
            const double h = dx * frac;
            cplx stage[7];
            for (int s = 0; s < 7; ++s) {
                cplx y = nu;
                for (int m = 0; m < s; ++m) y += h * kA[s][m] * stage[m];
                const auto [u, v] = fields.at(j, (static_cast<double>(sub) + kC[s]) * frac);
                stage[s] = rhs(u, v, y);
            }
            cplx y5 = nu, err{0.0, 0.0};
            for (int s = 0; s < 7; ++s) {
                y5 += h * kB5[s] * stage[s];
                err += h * (kB5[s] - kB4[s]) * stage[s];
            }
            const double allowed = options.tolerance * h * std::max(1.0, std::abs(nu));
            if (std::abs(err) > allowed) {
                if (level >= options.max_refinement)
                    throw NumericalError("Riccati step did not converge at x = " +
                                         std::to_string(grid.x(j) + sub * h));
                ++level;
                sub *= 2;
                easy = false;
                continue;
            }
            if (std::abs(err) > allowed / 64.0) easy = false;
            nu = y5;
            ++sub;
            ++out.steps;
            if (!std::isfinite(nu.real()) || std::abs(nu) > options.pole_threshold)
                throw PoleEncounterError("Riccati solution blew up (possible zero of a(lambda))",
                                         grid.x(j) + sub * h);
        }
        out.nu[j + 1] = nu;
        if (easy && level > 0) --level;
    }

    out.chi.resize(n);
    for (int j = 0; j < n; ++j) {
        const cplx u = state.u[j], v = state.v[j];
        out.chi[j] = 0.5 * I * (std::norm(v) - std::norm(u)) -
                     I * r2 * (lambda * std::conj(v) + std::conj(u) / lambda) * out.nu[j];
    }
    out.log_a = quadrature(out.chi, grid);
    out.edge_magnitude = std::max(std::abs(out.chi[0]), std::abs(out.nu[0]));
    return out;
}

cplx explicit_In(const FieldState& state, int n) {
    if (n != 0 && n != 2 && n != -2 && n != 4 && n != -4)
        throw ArgumentError("explicit_In: n must be one of 0, 2, -2, 4, -4");
    state.validate();
    const Grid& g = state.grid;
    const CVec& u = state.u;
    const CVec& v = state.v;
    const RVec A = u.cwiseAbs2(), B = v.cwiseAbs2();
    const CVec S = (A + B).cast<cplx>();
    const CVec AB = A.cwiseProduct(B).cast<cplx>();
    const CVec mix = v.conjugate().cwiseProduct(u) + u.conjugate().cwiseProduct(v);

    CVec d;
    switch (n) {
    case 0:
        d = S;
        break;
    case 2: {
        const CVec ux = differentiate(u, g);
        d = -2.0 * ux.cwiseProduct(u.conjugate()) + I * mix - 2.0 * I * AB;
        break;
    }
    case -2: {
        const CVec vx = differentiate(v, g);
        d = -2.0 * vx.cwiseProduct(v.conjugate()) - I * mix + 2.0 * I * AB;
        break;
    }
    case 4: {
        const CVec ux = differentiate(u, g), vx = differentiate(v, g);
        const CVec uxx = second_derivative(u, g);
        const CVec duB = differentiate(CVec(u.cwiseProduct(B.cast<cplx>())), g);
        d = -4.0 * I * u.conjugate().cwiseProduct(uxx) -
            2.0 * (ux.cwiseProduct(v.conjugate()) + u.conjugate().cwiseProduct(vx)) +
            4.0 * u.conjugate().cwiseProduct(duB) + 4.0 * ux.cwiseProduct(u.conjugate()).cwiseProduct(S) + I * S -
            2.0 * I * mix.cwiseProduct(S) + 4.0 * I * AB.cwiseProduct(S);
        break;
    }
    case -4: {
        const CVec ux = differentiate(u, g), vx = differentiate(v, g);
        const CVec vxx = second_derivative(v, g);
        const CVec dvA = differentiate(CVec(v.cwiseProduct(A.cast<cplx>())), g);
        d = 4.0 * I * v.conjugate().cwiseProduct(vxx) -
            2.0 * (ux.cwiseProduct(v.conjugate()) + u.conjugate().cwiseProduct(vx)) +
            4.0 * v.conjugate().cwiseProduct(dvA) + 4.0 * vx.cwiseProduct(v.conjugate()).cwiseProduct(S) - I * S +
            2.0 * I * mix.cwiseProduct(S) - 4.0 * I * AB.cwiseProduct(S);
        break;
    }
    }
    return quadrature(d, g);
}

double HierarchyReport::max() const noexcept { return std::max({charge, momentum, hamiltonian, higher}); }

HierarchyReport hierarchy_relations(const FieldState& state) {
    const ConservedSet c = conserved_set(state);
    const cplx i0 = explicit_In(state, 0);
    const cplx i2 = explicit_In(state, 2), im2 = explicit_In(state, -2);
    const cplx i4 = explicit_In(state, 4), im4 = explicit_In(state, -4);
    HierarchyReport r;
    r.charge = std::abs(i0 - c.Q);
    r.momentum = std::abs(i2 + im2 + 2.0 * I * c.P);
    r.hamiltonian = std::abs(i2 - im2 + 2.0 * I * c.H);
    r.higher = std::abs(i4 - im4 - (kHierarchyRCoefficient * c.R + kHierarchyQCoefficient * c.Q));
    return r;
}

void write_log_a_csv(std::ostream& out, const std::vector<LogASample>& rows) {
    out << std::setprecision(17) << "lambda,re_log_a,im_log_a,t\n";
    for (const auto& r : rows)
        out << r.lambda << ',' << r.log_a.real() << ',' << r.log_a.imag() << ',' << r.t << '\n';
}

}  // namespace mtm
