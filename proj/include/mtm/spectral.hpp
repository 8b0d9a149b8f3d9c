#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mtm/grid_fields.hpp"

namespace mtm {

enum class Sign { plus, minus };

/// Real symmetric realisation of a linear operator on a grid.
///
/// Complex unknowns are split into real and imaginary parts and stored block
/// by block: [Re u | Im u] for the reduced operators, [Re u | Im u | Re v | Im v]
/// for the full Hessian, [psi] for scalar problems. For a complex perturbation W
/// with realisation r, <L W, W> = 2 dx r^T M r.
struct DiscreteOperator {
    Eigen::MatrixXd matrix;
    std::string block_structure;
    double continuum_edge = 1.0;
    Grid grid{1.0, 8};
    bool z_scaled = false;   ///< true if built in z = sqrt(1 - omega^2) x with lambda = mu / (1 - omega^2)
    int components = 1;      ///< number of length-N blocks
    double asymmetry = 0.0;  ///< max |M - M^T| before symmetrisation
    double potential_edge = 0.0;  ///< max |V| at the grid ends (Schrodinger forms)
};

/// Grid suited to spectral work at frequency omega: spacing resolves the
/// profile's analytic strip, length covers the slowest isolated eigenvector.
Grid spectral_grid(double omega);

/// Hessian of R + (1 - omega^2) Q at the soliton, realified on (u, v).
/// ConstructionError if the pre-symmetrisation asymmetry exceeds 1e-6.
DiscreteOperator build_hessian(double omega, const Grid& grid);

/// Reduced operators on (u, conj u), obtained from the Hessian under v = +-conj(u).
DiscreteOperator build_Lpm(double omega, const Grid& grid, Sign sign);

/// Orthogonal 4x4 matrix that block-diagonalises the Hessian, acting on (u, v, conj u, conj v).
Eigen::Matrix4d similarity_matrix();

/// Realified form of the similarity: maps [Re y+ | Im y+ | Re y- | Im y-] to
/// [Re u | Im u | Re v | Im v], so R^T M R = blockdiag(M+, M-).
Eigen::MatrixXd realified_similarity(int points);

/// max |R^T M R - blockdiag(M+, M-)| over the realified matrices.
double block_diagonalize_check(double omega, const Grid& grid);

/// Quadratic form <L W, W> for a complex direction W = (w, conj w) given by
/// its first half (one or two complex components).
double quadratic_form(const DiscreteOperator& op, const std::vector<CVec>& w);

/// Complex components of L W for W = (w, conj w): returns the first half of L W.
std::vector<CVec> apply_operator(const DiscreteOperator& op, const std::vector<CVec>& w);

/// Realisation [Re w_0 | Im w_0 | Re w_1 | Im w_1 ...] and its inverse.
Eigen::VectorXd realify(const std::vector<CVec>& w);
std::vector<CVec> complexify(const Eigen::VectorXd& r, int components);

enum class PotentialKind { minus_even, minus_odd, resonance, algebraic, algebraic_scaled, plus_coupled, free };

const char* to_string(PotentialKind kind);

/// Scalar problems: -psi'' + (c + V) psi = s lambda psi, continuum edge 1.
/// `plus_coupled` is the two-component problem on (phi, conj phi) and is realified.
/// The kinds follow the reductions of the reduced operators in z variables:
///   minus_even, minus_odd  two scalar halves of the minus operator after the phase transform
///   resonance              comparison problem with an end-point resonance
///   algebraic              algebraic lower bound for minus_even
///   algebraic_scaled       rescaled (y variable) algebraic problem, s = c = (1 + omega) / 2
///   plus_coupled           plus operator after the phase transform
///   free                   V = 0
struct SchrodingerProblem {
    PotentialKind kind = PotentialKind::free;
    double omega = 0.0;

    double shift() const;   ///< c
    double weight() const;  ///< s
    double potential(double z) const;  ///< V, or V1 for plus_coupled
    cplx coupling(double z) const;     ///< V2 for plus_coupled, 0 otherwise
    /// Radius beyond which |V| < 1e-10.
    double decay_radius() const;
    bool scalar() const noexcept { return kind != PotentialKind::plus_coupled; }
};

/// Periodic z-grid (or y-grid for algebraic_scaled) for `problem`. Half-length covers the
/// slowest isolated eigenfunction; for algebraic potentials it is capped and the
/// residual |V| at the edge is reported by build_schrodinger.
Grid schrodinger_grid(const SchrodingerProblem& problem);

DiscreteOperator build_schrodinger(const SchrodingerProblem& problem, const Grid& grid);

struct EigenPair {
    double value;
    Eigen::VectorXd vector;  ///< realified, unit Euclidean norm
};

/// Fraction of the margin below the continuum edge that is treated as leaked continuum.
inline constexpr double kContinuumMargin = 0.02;
/// Within the margin band, an eigenvector is kept as isolated if less than this
/// fraction of its mass lies in |x| > L/2.
inline constexpr double kLocalizationThreshold = 0.25;

/// Eigenpairs below continuum_edge * (1 - margin), plus eigenpairs in the margin
/// band whose eigenvector is localised. Sorted ascending.
std::vector<EigenPair> eigs_below_continuum(const DiscreteOperator& op);

/// Zeros on the real line of the solution that decays at -infinity, for a
/// scalar problem at spectral parameter lambda <= 1. Uses the Prufer angle from
/// z = -R to z = R (R = decay_radius) plus the asymptotic count beyond R.
/// ArgumentError for lambda > 1 or for the two-component kind.
int sturm_shoot(const SchrodingerProblem& problem, double lambda);

/// Eigenvalues below 1 located by bisection on the zero count (tolerance 1e-10).
std::vector<double> sturm_eigenvalues(const SchrodingerProblem& problem);

struct SigmaIndex {
    double numeric = 0.0;      ///< <L^{-1} s, s> from a deflated linear solve
    double path_b = 0.0;       ///< from the known preimage of s
    double closed_form = 0.0;
    int deflated = 0;          ///< number of near-kernel directions removed
};

/// DegenerateParameterError for |omega| <= 1e-3.
SigmaIndex sigma_index(double omega, Sign sign, const Grid& grid);

/// Closed forms: -1/(2 omega sqrt(1-omega^2)) for plus, sqrt(1-omega^2)/(2 omega) for minus.
double sigma_closed_form(double omega, Sign sign);

/// Realified constraint vectors (real and imaginary parts of the two complex
/// orthogonality conditions), in the Hessian's block layout, not normalised.
std::vector<Eigen::VectorXd> constraint_vectors(double omega, const Grid& grid);

/// Smallest eigenvalue of the Hessian restricted to the orthogonal complement
/// of the four constraint vectors.
double constrained_min_eig(double omega, const Grid& grid);
double constrained_min_eig(const DiscreteOperator& hessian, double omega);

struct SplittingRow {
    double omega = 0.0;
    double plus_second = 0.0;   ///< isolated eigenvalue of L+ farthest from 0
    double minus_second = 0.0;  ///< isolated eigenvalue of L- farthest from 0
    int plus_count = 0;
    int minus_count = 0;
    double edge = 0.0;
    double splitting_integral = 0.0;
};

/// int (-3 + 2 omega^2 + cosh 4z) / (omega + cosh 2z)^4 dz.
double splitting_integral(double omega);

std::vector<SplittingRow> splitting_probe(const std::vector<double>& omegas);

struct SpectrumRow {
    double omega;
    std::string op;
    int index;
    double eigenvalue;
    bool below_edge;
};
void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRow>& rows);

struct SigmaRow {
    double omega;
    Sign sign;
    double numeric;
    double closed_form;
};
void write_sigma_csv(std::ostream& out, const std::vector<SigmaRow>& rows);

}  // namespace mtm
