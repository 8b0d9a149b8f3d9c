#pragma once

#include <iosfwd>
#include <vector>

#include "mtm/grid_fields.hpp"

namespace mtm {

/// Riccati solution for one real spectral parameter.
struct ScatteringSample {
    double lambda = 1.0;
    CVec nu;                   ///< nu(x_j), nu(x_0) = 0
    CVec chi;                  ///< chi(x_j)
    cplx log_a{0.0, 0.0};
    double edge_magnitude = 0.0;  ///< max(|chi|, |nu|) at the left edge
    long long steps = 0;          ///< accepted Runge-Kutta steps

    /// (lambda^-2 - lambda^2) / 4, recomputed on every call.
    double k() const noexcept { return 0.25 * (1.0 / (lambda * lambda) - lambda * lambda); }
};

struct RiccatiOptions {
    double tolerance = 1e-11;  ///< local error per unit length
    int max_refinement = 14;   ///< a grid cell is split into at most 2^max_refinement steps
    double pole_threshold = 1e6;
};

/// Integrates the Riccati equation for nu from the left edge (nu = 0) across
/// the periodic cell with embedded Dormand-Prince 5(4) steps on dyadic
/// subdivisions of the grid spacing. Off-grid field values come from the exact
/// trigonometric interpolant. log a = quadrature of chi.
///
/// ArgumentError unless 0.05 <= |lambda| <= 20; ConfigurationError on
/// non-periodic grids; PoleEncounterError if |nu| exceeds the pole threshold.
ScatteringSample riccati_solve(const FieldState& state, double lambda, const RiccatiOptions& options = {});

/// Integrals of the first hierarchy densities for n in {0, 2, -2, 4, -4}.
cplx explicit_In(const FieldState& state, int n);

/// Constants in I_4 - I_{-4} = c_R R + c_Q Q. A least-squares fit over random
/// localized fields (tests/unit/test_scattering.cpp) reproduces them with residual
/// below 1e-12.
inline constexpr cplx kHierarchyRCoefficient{0.0, 4.0};
inline constexpr cplx kHierarchyQCoefficient{0.0, 2.0};

struct HierarchyReport {
    double charge = 0.0;       ///< |I_0 - Q|
    double momentum = 0.0;     ///< |I_2 + I_{-2} + 2i P|
    double hamiltonian = 0.0;  ///< |I_2 - I_{-2} + 2i H|
    double higher = 0.0;       ///< |I_4 - I_{-4} - (c_R R + c_Q Q)|

    double max() const noexcept;
};

HierarchyReport hierarchy_relations(const FieldState& state);

struct LogASample {
    double lambda;
    double t;
    cplx log_a;
};

/// Rows `lambda,re_log_a,im_log_a,t`.
void write_log_a_csv(std::ostream& out, const std::vector<LogASample>& rows);

}  // namespace mtm
