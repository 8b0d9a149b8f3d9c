#include "mtm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "linalg.hpp"
#include "mtm/errors.hpp"
#include "mtm/soliton.hpp"
#include "spectral_detail.hpp"

namespace mtm {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace detail {

MatrixXcd local_operator(const Grid& grid, const MatrixXd& d1, const MatrixXd& d2, double second,
                         const RVec& first, const RVec& first_prime, const CVec& diagonal) {
    const int n = grid.size();
    MatrixXcd m = MatrixXcd::Zero(n, n);
    if (second != 0.0) m.real() -= second * d2;
    if (first.size() == n) {
        // i a d/dx written as (i/2)(a D + D a) - (i/2) a', Hermitian by construction.
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) m(j, k) += cplx(0.0, 0.5 * d1(j, k) * (first[j] + first[k]));
        for (int j = 0; j < n; ++j) m(j, j) -= cplx(0.0, 0.5 * first_prime[j]);
    }
    for (int j = 0; j < n; ++j) m(j, j) += diagonal[j];
    return m;
}

MatrixXd realify_operator(const MatrixXcd& p, const MatrixXcd& q, int components, int n) {
    const int m = components;
    MatrixXd out(2 * m * n, 2 * m * n);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            const auto pb = p.block(a * n, b * n, n, n);
            const auto qb = q.block(a * n, b * n, n, n);
            out.block((2 * a) * n, (2 * b) * n, n, n) = pb.real() + qb.real();
            out.block((2 * a) * n, (2 * b + 1) * n, n, n) = -pb.imag() + qb.imag();
            out.block((2 * a + 1) * n, (2 * b) * n, n, n) = pb.imag() + qb.imag();
            out.block((2 * a + 1) * n, (2 * b + 1) * n, n, n) = pb.real() - qb.real();
        }
    }
    return out;
}

double symmetrize(MatrixXd& m) {
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    m = 0.5 * (m + m.transpose()).eval();
    return asym;
}

SolitonData::SolitonData(double omega, const Grid& grid) {
    if (!(std::abs(omega) < 1.0)) throw DomainError("soliton frequency must satisfy |omega| < 1");
    U = eval_profile(omega, grid);
    dU = eval_profile_derivative(omega, grid);
    f = U.cwiseAbs2();
    g = U.conjugate().cwiseProduct(dU);
    df = 2.0 * g.real();
}

}  // namespace detail

namespace {

constexpr double kAsymmetryLimit = 1e-6;

void check_construction(double asym, const char* what) {
    if (asym > kAsymmetryLimit)
        throw ConstructionError(std::string(what) + ": realified matrix asymmetric by " + std::to_string(asym));
}

}  // namespace

Grid spectral_grid(double omega) {
    if (!(std::abs(omega) < 1.0)) throw DomainError("soliton frequency must satisfy |omega| < 1");
    const double Om = 1.0 - omega * omega;
    const double s = std::sqrt(Om);
    // Nearest complex singularity of the profile is at distance `strip` from the real axis.
    const double strip = std::atan(std::sqrt((1.0 + omega) / (1.0 - omega))) / s;
    const double dx = std::min(std::numbers::pi * strip / 25.0, 0.3);
    const double wpos = std::max(omega, 0.0);
    const double half = 30.0 / s + 25.0 * wpos * wpos / Om;
    int n = static_cast<int>(std::ceil(2.0 * half / dx));
    n = (n + 7) / 8 * 8;
    return Grid(half, n);
}

DiscreteOperator build_hessian(double omega, const Grid& grid) {
    if (!grid.periodic()) throw ConfigurationError("spectral operators are built on periodic grids");
    const detail::SolitonData sd(omega, grid);
    const int n = grid.size();
    const double Om = 1.0 - omega * omega;
    const MatrixXd d1 = differentiation_matrix(grid, 1), d2 = differentiation_matrix(grid, 2);

    const CVec U2 = sd.U.cwiseProduct(sd.U);
    const CVec f = sd.f.cast<cplx>();
    const CVec f2 = sd.f.cwiseAbs2().cast<cplx>();
    const CVec l1_diag = -4.0 * I * sd.g + 10.0 * f2 - 2.0 * U2 - 2.0 * U2.conjugate() +
                         CVec::Constant(n, cplx(Om, 0.0));
    const CVec l2 = -2.0 * I * sd.U.cwiseProduct(sd.dU) + 4.0 * U2.cwiseProduct(f) - 2.0 * f;
    const CVec l3_diag = -2.0 * I * sd.g + 8.0 * f2 - U2 - U2.conjugate();

    const MatrixXcd L1 = detail::local_operator(grid, d1, d2, 1.0, RVec(-4.0 * sd.f), RVec(-4.0 * sd.df), l1_diag);
    const MatrixXcd L3 = detail::local_operator(grid, d1, d2, 0.0, RVec(-2.0 * sd.f), RVec(-2.0 * sd.df), l3_diag);

    // Complex form on (w, conj w), w = (u, v): [[P, Q], [conj Q, conj P]].
    MatrixXcd P(2 * n, 2 * n), Q(2 * n, 2 * n);
    P.setZero();
    Q.setZero();
    P.topLeftCorner(n, n) = L1;
    P.bottomRightCorner(n, n) = L1.conjugate();
    P.topRightCorner(n, n).diagonal() = 2.0 * l2;
    P.bottomLeftCorner(n, n).diagonal() = 2.0 * l2.conjugate();
    Q.topLeftCorner(n, n).diagonal() = l2;
    Q.bottomRightCorner(n, n).diagonal() = l2.conjugate();
    Q.topRightCorner(n, n) = L3;
    Q.bottomLeftCorner(n, n) = L3.conjugate();

    DiscreteOperator op{detail::realify_operator(P, Q, 2, n), "Re u | Im u | Re v | Im v", Om, grid, false, 4, 0.0, 0.0};
    op.asymmetry = detail::symmetrize(op.matrix);
    check_construction(op.asymmetry, "build_hessian");
    return op;
}

DiscreteOperator build_Lpm(double omega, const Grid& grid, Sign sign) {
    if (!grid.periodic()) throw ConfigurationError("spectral operators are built on periodic grids");
    const detail::SolitonData sd(omega, grid);
    const int n = grid.size();
    const double Om = 1.0 - omega * omega;
    const MatrixXd d1 = differentiation_matrix(grid, 1), d2 = differentiation_matrix(grid, 2);
    const CVec U2 = sd.U.cwiseProduct(sd.U);
    const CVec f = sd.f.cast<cplx>();
    const CVec f2 = sd.f.cwiseAbs2().cast<cplx>();
    const CVec one = CVec::Constant(n, cplx(Om, 0.0));

    MatrixXcd ell, q = MatrixXcd::Zero(n, n);
    if (sign == Sign::plus) {
        const CVec diag = 6.0 * f2 - 3.0 * U2 + 3.0 * U2.conjugate() - 6.0 * omega * f + one;
        ell = detail::local_operator(grid, d1, d2, 1.0, RVec(-6.0 * sd.f), RVec(-6.0 * sd.df), diag);
        q.diagonal() = -6.0 * omega * U2;
    } else {
        const CVec diag = -2.0 * f2 - U2 + U2.conjugate() - 2.0 * omega * f + one;
        ell = detail::local_operator(grid, d1, d2, 1.0, RVec(-2.0 * sd.f), RVec(-2.0 * sd.df), diag);
        q.diagonal() = 2.0 * omega * U2;
    }
    DiscreteOperator op{detail::realify_operator(ell, q, 1, n), "Re u | Im u", Om, grid, false, 2, 0.0, 0.0};
    op.asymmetry = detail::symmetrize(op.matrix);
    check_construction(op.asymmetry, sign == Sign::plus ? "build_Lpm(+)" : "build_Lpm(-)");
    return op;
}

Eigen::Matrix4d similarity_matrix() {
    Eigen::Matrix4d s;
    s << 1, 0, -1, 0,
         0, 1, 0, 1,
         0, 1, 0, -1,
         1, 0, 1, 0;
    return s / std::sqrt(2.0);
}

namespace {

// Coefficients of the realified similarity on the 4 component blocks.
Eigen::Matrix4d realified_pattern() {
    Eigen::Matrix4d k;
    k << 1, 0, -1, 0,
         0, 1, 0, -1,
         1, 0, 1, 0,
         0, -1, 0, -1;
    return k / std::sqrt(2.0);
}

}  // namespace

Eigen::MatrixXd realified_similarity(int points) {
    const Eigen::Matrix4d k = realified_pattern();
    MatrixXd r = MatrixXd::Zero(4 * points, 4 * points);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (k(a, b) != 0.0) r.block(a * points, b * points, points, points).diagonal().setConstant(k(a, b));
    return r;
}

double block_diagonalize_check(double omega, const Grid& grid) {
    const DiscreteOperator h = build_hessian(omega, grid);
    const DiscreteOperator plus = build_Lpm(omega, grid, Sign::plus);
    const DiscreteOperator minus = build_Lpm(omega, grid, Sign::minus);
    const int n = grid.size();
    const Eigen::Matrix4d k = realified_pattern();

    MatrixXd target = MatrixXd::Zero(4 * n, 4 * n);
    target.topLeftCorner(2 * n, 2 * n) = plus.matrix;
    target.bottomRightCorner(2 * n, 2 * n) = minus.matrix;

    // (R^T M R)_{IJ} = sum_{a,b} K(a,I) K(b,J) M_{ab} with R = K (x) identity.
    double defect = 0.0;
    MatrixXd block(n, n);
    for (int bi = 0; bi < 4; ++bi) {
        for (int bj = 0; bj < 4; ++bj) {
            block.setZero();
            for (int a = 0; a < 4; ++a) {
                if (k(a, bi) == 0.0) continue;
                for (int b = 0; b < 4; ++b) {
                    if (k(b, bj) == 0.0) continue;
                    block += k(a, bi) * k(b, bj) * h.matrix.block(a * n, b * n, n, n);
                }
            }
            defect = std::max(defect, (block - target.block(bi * n, bj * n, n, n)).cwiseAbs().maxCoeff());
        }
    }
    return defect;
}

Eigen::VectorXd realify(const std::vector<CVec>& w) {
    if (w.empty()) return {};
    const Eigen::Index n = w.front().size();
    VectorXd r(2 * n * static_cast<Eigen::Index>(w.size()));
    for (std::size_t c = 0; c < w.size(); ++c) {
        if (w[c].size() != n) throw ArgumentError("realify: components differ in length");
        r.segment(2 * c * n, n) = w[c].real();
        r.segment((2 * c + 1) * n, n) = w[c].imag();
    }
    return r;
}

std::vector<CVec> complexify(const Eigen::VectorXd& r, int components) {
    if (components < 1 || r.size() % (2 * components) != 0) throw ArgumentError("complexify: bad length");
    const Eigen::Index n = r.size() / (2 * components);
    std::vector<CVec> w(components);
    for (int c = 0; c < components; ++c) {
        w[c].resize(n);
        w[c].real() = r.segment(2 * c * n, n);
        w[c].imag() = r.segment((2 * c + 1) * n, n);
    }
    return w;
}

namespace {

void check_direction(const DiscreteOperator& op, const std::vector<CVec>& w) {
    if (static_cast<int>(2 * w.size()) != op.components)
        throw ArgumentError("direction has " + std::to_string(w.size()) + " complex components, operator expects " +
                            std::to_string(op.components / 2));
}

}  // namespace

double quadratic_form(const DiscreteOperator& op, const std::vector<CVec>& w) {
    check_direction(op, w);
    const VectorXd r = realify(w);
    return 2.0 * op.grid.dx() * r.dot(op.matrix * r);
}

std::vector<CVec> apply_operator(const DiscreteOperator& op, const std::vector<CVec>& w) {
    check_direction(op, w);
    return complexify(op.matrix * realify(w), static_cast<int>(w.size()));
}

std::vector<EigenPair> eigs_below_continuum(const DiscreteOperator& op) {
    const MatrixXd& m = op.matrix;
    if (m.rows() == 0) return {};
    const double edge = op.continuum_edge;
    const double cutoff = edge * (1.0 - kContinuumMargin);
    const double lower = -m.cwiseAbs().rowwise().sum().maxCoeff() - 1.0;
    const detail::SymEig eig = detail::sym_eig_by_value(m, lower, edge, true);

    const Grid& g = op.grid;
    const int n = g.size();
    std::vector<EigenPair> out;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double mu = eig.values[i];
        if (mu >= edge) continue;
        const VectorXd v = eig.vectors.col(i);
        if (mu >= cutoff) {
            double outer = 0.0, total = 0.0;
            for (int c = 0; c < op.components; ++c)
                for (int j = 0; j < n; ++j) {
                    const double w = v[c * n + j] * v[c * n + j];
                    total += w;
                    if (std::abs(g.x(j)) > 0.5 * g.half_length()) outer += w;
                }
            if (!(outer < kLocalizationThreshold * total)) continue;
        }
        out.push_back({mu, v});
    }
    std::sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
    return out;
}

double sigma_closed_form(double omega, Sign sign) {
    const double s = std::sqrt(1.0 - omega * omega);
    return sign == Sign::plus ? -1.0 / (2.0 * omega * s) : s / (2.0 * omega);
}

SigmaIndex sigma_index(double omega, Sign sign, const Grid& grid) {
    if (!(std::abs(omega) < 1.0)) throw DomainError("soliton frequency must satisfy |omega| < 1");
    if (std::abs(omega) <= 1e-3) throw DegenerateParameterError("sigma index diverges at omega = 0");
    const DiscreteOperator op = build_Lpm(omega, grid, sign);
    const detail::SolitonData sd(omega, grid);
    const double dx = grid.dx();

    // s = (U, conj U) for plus; for minus s = (U', -conj U') is rotated by i
    // to the form (w, conj w), which leaves <L^{-1} s, s> unchanged.
    const CVec s_first = sign == Sign::plus ? sd.U : CVec(I * sd.dU);
    const VectorXd rs = realify({s_first});

    const int probe = std::min<int>(6, static_cast<int>(op.matrix.rows()));
    const detail::SymEig low = detail::sym_eig_by_index(op.matrix, 1, probe, true);
    MatrixXd deflated = op.matrix;
    VectorXd rhs = rs;
    std::vector<VectorXd> kernel;
    for (Eigen::Index i = 0; i < low.values.size(); ++i) {
        if (std::abs(low.values[i]) >= 1e-8) continue;
        const VectorXd e = low.vectors.col(i);
        kernel.push_back(e);
        deflated += e * e.transpose();
        rhs -= e * e.dot(rhs);
    }
    VectorXd rw = deflated.partialPivLu().solve(rhs);
    for (const auto& e : kernel) rw -= e * e.dot(rw);

    SigmaIndex out;
    out.deflated = static_cast<int>(kernel.size());
    out.numeric = 2.0 * dx * rw.dot(rhs);
    out.closed_form = sigma_closed_form(omega, sign);
    if (sign == Sign::plus) {
        const CVec dOm = omega_derivative(omega, grid).d_Omega;
        out.path_b = -2.0 * quadrature(RVec(dOm.conjugate().cwiseProduct(sd.U).real()), grid);
    } else {
        const RVec x = grid.positions();
        const CVec pre = -0.5 * x.cast<cplx>().cwiseProduct(sd.U) + sd.U / (4.0 * I * omega);
        out.path_b = 2.0 * quadrature(RVec(pre.conjugate().cwiseProduct(sd.dU).real()), grid);
    }
    return out;
}

std::vector<Eigen::VectorXd> constraint_vectors(double omega, const Grid& grid) {
    const detail::SolitonData sd(omega, grid);
    const int n = grid.size();
    auto pair = [n](const CVec& a, const CVec& b) {
        VectorXd re(4 * n), im(4 * n);
        re << a.real(), -a.imag(), b.real(), -b.imag();
        im << a.imag(), a.real(), b.imag(), b.real();
        return std::vector<VectorXd>{re, im};
    };
    std::vector<VectorXd> out = pair(sd.U.conjugate(), sd.U);
    for (auto& v : pair(sd.dU.conjugate(), sd.dU)) out.push_back(v);
    return out;
}

double constrained_min_eig(const DiscreteOperator& hessian, double omega) {
    const auto cs = constraint_vectors(omega, hessian.grid);
    const Eigen::Index m = hessian.matrix.rows();
    if (static_cast<Eigen::Index>(cs.front().size()) != m)
        throw ArgumentError("constrained_min_eig: operator is not a Hessian on this grid");
    MatrixXd c(m, static_cast<Eigen::Index>(cs.size()));
    for (std::size_t j = 0; j < cs.size(); ++j) c.col(j) = cs[j];
    const Eigen::HouseholderQR<MatrixXd> qr(c);
    MatrixXd a = qr.householderQ().adjoint() * hessian.matrix;
    a = a * qr.householderQ();
    const Eigen::Index k = c.cols();
    MatrixXd sub = a.bottomRightCorner(m - k, m - k);
    sub = 0.5 * (sub + sub.transpose()).eval();
    return detail::sym_eig_by_index(sub, 1, 1, false).values[0];
}

double constrained_min_eig(double omega, const Grid& grid) {
    return constrained_min_eig(build_hessian(omega, grid), omega);
}

double splitting_integral(double omega) {
    if (!(std::abs(omega) < 1.0)) throw DomainError("soliton frequency must satisfy |omega| < 1");
    const Grid g(20.0, 8000);
    RVec vals(g.size());
    for (int j = 0; j < g.size(); ++j) {
        const double z = g.x(j);
        vals[j] = (-3.0 + 2.0 * omega * omega + std::cosh(4.0 * z)) / std::pow(omega + std::cosh(2.0 * z), 4);
    }
    return quadrature(vals, g);
}

namespace {

double farthest_from_zero(const std::vector<EigenPair>& eig) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& e : eig)
        if (std::isnan(best) || std::abs(e.value) > std::abs(best)) best = e.value;
    return eig.size() >= 2 ? best : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::vector<SplittingRow> splitting_probe(const std::vector<double>& omegas) {
    std::vector<SplittingRow> rows;
    for (double w : omegas) {
        if (!(std::abs(w) < 1.0)) throw DomainError("splitting_probe: |omega| must be < 1");
        const Grid g = spectral_grid(w);
        const auto plus = eigs_below_continuum(build_Lpm(w, g, Sign::plus));
        const auto minus = eigs_below_continuum(build_Lpm(w, g, Sign::minus));
        SplittingRow r;
        r.omega = w;
        r.edge = 1.0 - w * w;
        r.plus_count = static_cast<int>(plus.size());
        r.minus_count = static_cast<int>(minus.size());
        r.plus_second = farthest_from_zero(plus);
        r.minus_second = farthest_from_zero(minus);
        r.splitting_integral = splitting_integral(w);
        rows.push_back(r);
    }
    return rows;
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRow>& rows) {
    out << std::setprecision(17) << "omega,operator,index,eigenvalue,below_edge\n";
    for (const auto& r : rows)
        out << r.omega << ',' << r.op << ',' << r.index << ',' << r.eigenvalue << ',' << (r.below_edge ? 1 : 0)
            << '\n';
}

void write_sigma_csv(std::ostream& out, const std::vector<SigmaRow>& rows) {
    out << std::setprecision(17) << "omega,sign,sigma_numeric,sigma_closed_form\n";
    for (const auto& r : rows)
        out << r.omega << ',' << (r.sign == Sign::plus ? '+' : '-') << ',' << r.numeric << ',' << r.closed_form
            << '\n';
}

}  // namespace mtm
