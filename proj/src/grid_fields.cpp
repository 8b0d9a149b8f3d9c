#include "mtm/grid_fields.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fft.hpp"
#include "mtm/errors.hpp"

namespace mtm {

Grid::Grid(double half_length, int points, Boundary boundary)
    : half_length_(half_length), points_(points), boundary_(boundary) {
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw ConfigurationError("grid half-length must be positive and finite");
    if (boundary == Boundary::periodic) {
        if (points < 8 || points % 2 != 0)
            throw ConfigurationError("periodic grid needs an even point count >= 8, got " +
                                     std::to_string(points));
        dx_ = 2.0 * half_length / points;
    } else {
        if (points < 5)
            throw ConfigurationError("truncated-line grid needs at least 5 points");
        dx_ = 2.0 * half_length / (points - 1);
    }
}

RVec Grid::positions() const {
    RVec x(points_);
    for (int j = 0; j < points_; ++j) x[j] = this->x(j);
    return x;
}

RVec Grid::wavenumbers() const {
    if (!periodic()) throw ConfigurationError("wavenumbers are defined on periodic grids only");
    RVec k(points_);
    const double dk = std::numbers::pi / half_length_;
    for (int j = 0; j < points_; ++j) k[j] = dk * (j < points_ / 2 ? j : j - points_);
    return k;
}

Grid Grid::as_line() const {
    if (!periodic()) return *this;
    // Keep the sample positions: x_0 = -L, x_{N-1} = L - dx.
    const double line_half = 0.5 * dx_ * (points_ - 1);
    Grid line(line_half, points_, Boundary::line);
    line.half_length_ = half_length_;
    line.dx_ = dx_;
    return line;
}

FieldState FieldState::zero(const Grid& grid, double t) {
    return FieldState{grid, CVec::Zero(grid.size()), CVec::Zero(grid.size()), t};
}

void FieldState::validate() const {
    if (u.size() != grid.size() || v.size() != grid.size())
        throw ArgumentError("field length does not match grid size");
    if (!u.allFinite() || !v.allFinite()) throw NumericalError("field contains non-finite samples");
}

namespace {

void check_length(Eigen::Index n, const Grid& grid) {
    if (n != grid.size())
        throw ArgumentError("sample count " + std::to_string(n) + " does not match grid size " +
                            std::to_string(grid.size()));
}

CVec spectral_multiply(const CVec& f, const Grid& grid, int order) {
    const int n = grid.size();
    const RVec k = grid.wavenumbers();
    CVec hat = detail::fft_forward(f);
    if (order == 1) {
        for (int j = 0; j < n; ++j) hat[j] *= I * k[j];
        hat[n / 2] = 0.0;
    } else {
        for (int j = 0; j < n; ++j) hat[j] *= -k[j] * k[j];
    }
    return detail::fft_inverse(hat);
}

template <typename Vec>
Vec central_fourth_order(const Vec& f, double dx) {
    const Eigen::Index n = f.size();
    Vec d(n);
    const double s = 1.0 / (12.0 * dx);
    d[0] = s * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = s * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for (Eigen::Index j = 2; j < n - 2; ++j)
        d[j] = s * (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]);
    d[n - 2] = -s * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]);
    d[n - 1] = -s * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] -
                     3.0 * f[n - 5]);
    return d;
}

}  // namespace

CVec differentiate(const CVec& samples, const Grid& grid) {
    check_length(samples.size(), grid);
    if (grid.periodic()) return spectral_multiply(samples, grid, 1);
    return central_fourth_order(samples, grid.dx());
}

RVec differentiate(const RVec& samples, const Grid& grid) {
    check_length(samples.size(), grid);
    if (grid.periodic()) return spectral_multiply(samples.cast<cplx>(), grid, 1).real();
    return central_fourth_order(samples, grid.dx());
}

CVec second_derivative(const CVec& samples, const Grid& grid) {
    check_length(samples.size(), grid);
    if (grid.periodic()) return spectral_multiply(samples, grid, 2);
    return differentiate(differentiate(samples, grid), grid);
}

cplx quadrature(const CVec& samples, const Grid& grid) {
    check_length(samples.size(), grid);
    cplx sum = samples.sum();
    if (!grid.periodic()) sum -= 0.5 * (samples[0] + samples[samples.size() - 1]);
    return sum * grid.dx();
}

double quadrature(const RVec& samples, const Grid& grid) {
    check_length(samples.size(), grid);
    double sum = samples.sum();
    if (!grid.periodic()) sum -= 0.5 * (samples[0] + samples[samples.size() - 1]);
    return sum * grid.dx();
}

Norms norms(const FieldState& state, int p) {
    if (p != 2 && p != 4 && p != 6)
        throw ArgumentError("unsupported Lp exponent " + std::to_string(p) + " (expected 2, 4 or 6)");
    state.validate();
    const Grid& g = state.grid;
    const RVec au = state.u.cwiseAbs2();
    const RVec av = state.v.cwiseAbs2();
    const RVec dux = differentiate(state.u, g).cwiseAbs2();
    const RVec dvx = differentiate(state.v, g).cwiseAbs2();

    Norms out;
    out.p = p;
    out.l2_sq = quadrature(RVec(au + av), g);
    out.h1_sq = out.l2_sq + quadrature(RVec(dux + dvx), g);
    const int half = p / 2;
    RVec pu = RVec::Ones(g.size()), pv = RVec::Ones(g.size());
    for (int i = 0; i < half; ++i) {
        pu = pu.cwiseProduct(au);
        pv = pv.cwiseProduct(av);
    }
    out.lp = quadrature(RVec(pu + pv), g);
    return out;
}

cplx h1_inner(const FieldState& a, const FieldState& b) {
    if (!(a.grid == b.grid)) throw ArgumentError("h1_inner: states live on different grids");
    const Grid& g = a.grid;
    const CVec integrand = a.u.conjugate().cwiseProduct(b.u) + a.v.conjugate().cwiseProduct(b.v) +
                           differentiate(a.u, g).conjugate().cwiseProduct(differentiate(b.u, g)) +
                           differentiate(a.v, g).conjugate().cwiseProduct(differentiate(b.v, g));
    return quadrature(integrand, g);
}

CVec fourier_shift(const CVec& samples, const Grid& grid, double shift) {
    check_length(samples.size(), grid);
    if (!grid.periodic()) throw ConfigurationError("fourier_shift needs a periodic grid");
    const int n = grid.size();
    const RVec k = grid.wavenumbers();
    CVec hat = detail::fft_forward(samples);
    for (int j = 0; j < n; ++j) hat[j] *= std::exp(I * k[j] * shift);
    // Nyquist mode: real cosine interpolant keeps real data real.
    hat[n / 2] = hat[n / 2] * std::cos(k[n / 2] * shift) / std::exp(I * k[n / 2] * shift);
    return detail::fft_inverse(hat);
}

Eigen::MatrixXd differentiation_matrix(const Grid& grid, int order) {
    if (!grid.periodic()) throw ConfigurationError("differentiation_matrix needs a periodic grid");
    if (order != 1 && order != 2) throw ArgumentError("differentiation order must be 1 or 2");
    const int n = grid.size();
    CVec e = CVec::Zero(n);
    e[0] = 1.0;
    const RVec column = (order == 1 ? differentiate(e, grid) : second_derivative(e, grid)).real();
    // Circulant: D(j, k) = column[(j - k) mod n]. Enforce exact (anti)symmetry.
    Eigen::MatrixXd d(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) d(r, c) = column[(r - c + n) % n];
    if (order == 1)
        d = 0.5 * (d - d.transpose()).eval();
    else
        d = 0.5 * (d + d.transpose()).eval();
    return d;
}

void write_field_csv(std::ostream& out, const FieldState& state) {
    state.validate();
    const Grid& g = state.grid;
    out << std::setprecision(17);
    out << "# t=" << state.t << " L=" << g.half_length() << " N=" << g.size()
        << " bc=" << (g.periodic() ? "periodic" : "line") << '\n';
    out << "x,re_u,im_u,re_v,im_v\n";
    for (int j = 0; j < g.size(); ++j) {
        out << g.x(j) << ',' << state.u[j].real() << ',' << state.u[j].imag() << ','
            << state.v[j].real() << ',' << state.v[j].imag() << '\n';
    }
}

FieldState read_field_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("#", 0) != 0)
        throw ArgumentError("field dump: missing metadata comment line");
    double t = 0.0, L = 0.0;
    int n = 0;
    std::string bc;
    {
        std::istringstream meta(line.substr(1));
        std::string token;
        while (meta >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
            if (key == "t") t = std::stod(value);
            else if (key == "L") L = std::stod(value);
            else if (key == "N") n = std::stoi(value);
            else if (key == "bc") bc = value;
        }
    }
    if (bc != "periodic" && bc != "line") throw ArgumentError("field dump: bad bc '" + bc + "'");
    Grid grid(L, n, bc == "periodic" ? Boundary::periodic : Boundary::line);
    if (!std::getline(in, line) || line != "x,re_u,im_u,re_v,im_v")
        throw ArgumentError("field dump: unexpected header '" + line + "'");
    FieldState state = FieldState::zero(grid, t);
    for (int j = 0; j < n; ++j) {
        if (!std::getline(in, line)) throw ArgumentError("field dump: truncated after row " + std::to_string(j));
        std::istringstream row(line);
        std::vector<double> cols;
        std::string cell;
        while (std::getline(row, cell, ',')) cols.push_back(std::stod(cell));
        if (cols.size() != 5) throw ArgumentError("field dump: row " + std::to_string(j) + " needs 5 columns");
        state.u[j] = {cols[1], cols[2]};
        state.v[j] = {cols[3], cols[4]};
    }
    return state;
}

}  // namespace mtm
