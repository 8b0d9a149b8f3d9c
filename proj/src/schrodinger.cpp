#include <algorithm>
#include <cmath>
#include <numbers>

#include "mtm/errors.hpp"
#include "mtm/spectral.hpp"
#include "spectral_detail.hpp"

namespace mtm {

const char* to_string(PotentialKind kind) {
    switch (kind) {
    case PotentialKind::minus_even: return "minus_even";
    case PotentialKind::minus_odd: return "minus_odd";
    case PotentialKind::resonance: return "resonance";
    case PotentialKind::algebraic: return "algebraic";
    case PotentialKind::algebraic_scaled: return "algebraic_scaled";
    case PotentialKind::plus_coupled: return "plus_coupled";
    case PotentialKind::free: return "free";
    }
    return "?";
}

double SchrodingerProblem::shift() const {
    return kind == PotentialKind::algebraic_scaled ? 0.5 * (1.0 + omega) : 1.0;
}

double SchrodingerProblem::weight() const { return shift(); }

double SchrodingerProblem::potential(double z) const {
    if (!(std::abs(omega) < 1.0)) throw DomainError("soliton frequency must satisfy |omega| < 1");
    const double Om = 1.0 - omega * omega;
    if (kind == PotentialKind::free) return 0.0;
    if (kind == PotentialKind::algebraic) {
        const double q = omega + 1.0 + 2.0 * z * z;
        return -3.0 * Om / (q * q);
    }
    if (kind == PotentialKind::algebraic_scaled) {
        const double q = 1.0 + z * z;
        return -3.0 / (q * q);
    }
    if (std::abs(z) > 150.0) return 0.0;
    const double q = omega + std::cosh(2.0 * z);
    switch (kind) {
    case PotentialKind::minus_even: return -3.0 * Om / (q * q);
    case PotentialKind::minus_odd: return -3.0 * Om / (q * q) - 4.0 * omega / q;
    case PotentialKind::resonance: return -8.0 * Om / (q * q) - 4.0 * omega / q;
    case PotentialKind::plus_coupled: return -3.0 * Om / (q * q) - 6.0 * omega / q;
    default: return 0.0;
    }
}

cplx SchrodingerProblem::coupling(double z) const {
    if (kind != PotentialKind::plus_coupled || std::abs(z) > 150.0) return 0.0;
    const double Om = 1.0 - omega * omega;
    const double q = omega + std::cosh(2.0 * z);
    const cplx num{1.0 + omega * std::cosh(2.0 * z), std::sqrt(Om) * std::sinh(2.0 * z)};
    return -6.0 * omega * num * num / (q * q * q);
}

double SchrodingerProblem::decay_radius() const {
    auto size = [this](double z) {
        return std::max({std::abs(potential(z)), std::abs(potential(-z)), std::abs(coupling(z)),
                         std::abs(coupling(-z))});
    };
    if (kind == PotentialKind::free) return 1.0;
    double hi = 1.0;
    while (size(hi) >= 1e-10) hi *= 2.0;
    double lo = 0.5 * hi;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (size(mid) >= 1e-10 ? lo : hi) = mid;
    }
    return hi;
}

Grid schrodinger_grid(const SchrodingerProblem& problem) {
    if (problem.kind == PotentialKind::algebraic || problem.kind == PotentialKind::algebraic_scaled) return Grid(60.0, 1200);
    const Grid x = spectral_grid(problem.omega);
    return Grid(std::sqrt(1.0 - problem.omega * problem.omega) * x.half_length(), x.size());
}

DiscreteOperator build_schrodinger(const SchrodingerProblem& problem, const Grid& grid) {
    if (!(std::abs(problem.omega) < 1.0)) throw DomainError("soliton frequency must satisfy |omega| < 1");
    if (!grid.periodic()) throw ConfigurationError("spectral operators are built on periodic grids");
    const int n = grid.size();
    const Eigen::MatrixXd d2 = differentiation_matrix(grid, 2);
    RVec v(n);
    for (int j = 0; j < n; ++j) v[j] = problem.potential(grid.x(j));

    DiscreteOperator op;
    op.grid = grid;
    op.z_scaled = true;
    op.continuum_edge = 1.0;
    op.potential_edge = std::max(std::abs(v[0]), std::abs(v[n - 1]));

    if (problem.scalar()) {
        op.matrix = -d2;
        op.matrix.diagonal() += (v.array() + problem.shift()).matrix();
        op.matrix /= problem.weight();
        op.components = 1;
        op.block_structure = "psi";
    } else {
        CVec diag(n), cpl(n);
        for (int j = 0; j < n; ++j) {
            diag[j] = 1.0 + v[j];
            cpl[j] = problem.coupling(grid.x(j));
        }
        op.potential_edge = std::max({op.potential_edge, std::abs(cpl[0]), std::abs(cpl[n - 1])});
        const Eigen::MatrixXcd p = detail::local_operator(grid, Eigen::MatrixXd(), d2, 1.0, RVec(), RVec(), diag);
        Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n, n);
        q.diagonal() = cpl;
        op.matrix = detail::realify_operator(p, q, 1, n);
        op.components = 2;
        op.block_structure = "Re phi | Im phi";
    }
    op.asymmetry = detail::symmetrize(op.matrix);
    return op;
}

namespace {

// Prufer angle theta with psi = r sin(theta), psi' = r cos(theta).
double prufer_end_angle(const SchrodingerProblem& p, double lambda, double radius, double& kappa) {
    const double c = p.shift(), s = p.weight();
    kappa = std::sqrt(std::max(0.0, c - s * lambda));
    auto rhs = [&](double z, double th) {
        const double sn = std::sin(th), cs = std::cos(th);
        return cs * cs + (s * lambda - c - p.potential(z)) * sn * sn;
    };
    // RK4 phase error scales with (h k)^4, k the largest local wavenumber
    double vmax = 0.0;
    for (double z = -radius; z <= radius; z += 0.01) vmax = std::max(vmax, std::abs(p.potential(z)));
    const double h_target = std::min(0.004, 0.01 / std::sqrt(1.0 + vmax + std::abs(s * lambda - c)));
    const long long steps = static_cast<long long>(std::ceil(2.0 * radius / h_target));
    const double h = 2.0 * radius / static_cast<double>(steps);
    double th = std::atan2(1.0, kappa);
    double z = -radius;
    for (long long i = 0; i < steps; ++i) {
        const double k1 = rhs(z, th);
        const double k2 = rhs(z + 0.5 * h, th + 0.5 * h * k1);
        const double k3 = rhs(z + 0.5 * h, th + 0.5 * h * k2);
        const double k4 = rhs(z + h, th + h * k3);
        th += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        z = -radius + (i + 1) * h;
    }
    return th;
}

}  // namespace

int sturm_shoot(const SchrodingerProblem& problem, double lambda) {
    if (!problem.scalar()) throw ArgumentError("sturm_shoot applies to scalar problems only");
    if (!std::isfinite(lambda) || lambda > 1.0) throw ArgumentError("sturm_shoot needs lambda <= 1 (continuum edge)");
    const double radius = problem.decay_radius();
    double kappa = 0.0;
    const double th = prufer_end_angle(problem, lambda, radius, kappa);
    int zeros = static_cast<int>(std::floor(th / std::numbers::pi));
    // Beyond the radius the solution is free; it gains one more zero iff the
    // angle sits past the unstable (decaying) fixed point.
    const double rest = th - zeros * std::numbers::pi;
    if (rest > std::numbers::pi - std::atan2(1.0, kappa)) ++zeros;
    return zeros;
}

std::vector<double> sturm_eigenvalues(const SchrodingerProblem& problem) {
    if (!problem.scalar()) throw ArgumentError("sturm_eigenvalues applies to scalar problems only");
    const int total = sturm_shoot(problem, 1.0);
    double vmin = 0.0;
    const double radius = problem.decay_radius();
    for (double z = -radius; z <= radius; z += 0.01) vmin = std::min(vmin, problem.potential(z));
    const double floor_value = (problem.shift() + vmin) / problem.weight() - 1.0;

    std::vector<double> out;
    for (int m = 0; m < total; ++m) {
        double lo = out.empty() ? floor_value : out.back(), hi = 1.0;
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            (sturm_shoot(problem, mid) > m ? hi : lo) = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

}  // namespace mtm
