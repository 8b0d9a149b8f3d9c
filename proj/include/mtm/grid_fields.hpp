#pragma once

#include <complex>
#include <iosfwd>

#include <Eigen/Core>

namespace mtm {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};

enum class Boundary { periodic, line };

/// Uniform 1-D lattice x_j = -L + j*dx.
///
/// Periodic grids cover [-L, L) with dx = 2L/N and require an even N >= 8.
/// Truncated-line grids include both end points, dx = 2L/(N-1), N >= 5.
class Grid {
public:
    Grid(double half_length, int points, Boundary boundary = Boundary::periodic);

    double half_length() const noexcept { return half_length_; }
    int size() const noexcept { return points_; }
    Boundary boundary() const noexcept { return boundary_; }
    bool periodic() const noexcept { return boundary_ == Boundary::periodic; }
    double dx() const noexcept { return dx_; }
    double x(int j) const noexcept { return -half_length_ + j * dx_; }

    RVec positions() const;
    /// Angular wavenumbers in FFT order; the Nyquist entry is -pi/dx.
    RVec wavenumbers() const;

    /// Same samples viewed as a truncated line, used where a periodic state is
    /// integrated left to right (Riccati sweeps).
    Grid as_line() const;

    bool operator==(const Grid& other) const noexcept {
        return half_length_ == other.half_length_ && points_ == other.points_ &&
               boundary_ == other.boundary_;
    }

private:
    double half_length_;
    int points_;
    Boundary boundary_;
    double dx_;
};

/// MTM state (u, v) sampled on a grid at time t.
struct FieldState {
    Grid grid;
    CVec u;
    CVec v;
    double t = 0.0;

    static FieldState zero(const Grid& grid, double t = 0.0);

    /// Throws ArgumentError on wrong lengths, NumericalError on non-finite samples.
    void validate() const;
};

/// d/dx: Fourier on periodic grids (Nyquist mode dropped), 4th-order central
/// differences with one-sided closures on truncated grids.
CVec differentiate(const CVec& samples, const Grid& grid);
RVec differentiate(const RVec& samples, const Grid& grid);

/// d^2/dx^2. Periodic grids use -k^2 including the Nyquist mode; truncated
/// grids apply `differentiate` twice.
CVec second_derivative(const CVec& samples, const Grid& grid);

/// Trapezoid rule (rectangle rule on periodic grids).
cplx quadrature(const CVec& samples, const Grid& grid);
double quadrature(const RVec& samples, const Grid& grid);

struct Norms {
    double l2_sq = 0.0;  ///< sum over (u, v) of ||f||_2^2
    double h1_sq = 0.0;  ///< sum over (u, v) of ||f||_2^2 + ||f_x||_2^2
    int p = 4;
    double lp = 0.0;     ///< sum over (u, v) of ||f||_p^p
};

/// p must be one of 2, 4, 6.
Norms norms(const FieldState& state, int p = 4);

/// H^1 inner product <a, b> = int conj(a) b + conj(a_x) b_x over both components.
cplx h1_inner(const FieldState& a, const FieldState& b);

/// Samples of f(x + shift) by band-limited (Fourier) interpolation. Periodic only.
CVec fourier_shift(const CVec& samples, const Grid& grid, double shift);

/// Dense differentiation matrix consistent with `differentiate` (order 1) or
/// `second_derivative` (order 2) on a periodic grid.
Eigen::MatrixXd differentiation_matrix(const Grid& grid, int order);

/// Field dump: `# t=<t> L=<L> N=<N> bc=<periodic|line>` then
/// `x,re_u,im_u,re_v,im_v` and one row per grid point.
void write_field_csv(std::ostream& out, const FieldState& state);
FieldState read_field_csv(std::istream& in);

}  // namespace mtm
