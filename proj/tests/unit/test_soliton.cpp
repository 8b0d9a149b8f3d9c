#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mtm/conserved.hpp"
#include "mtm/errors.hpp"
#include "mtm/soliton.hpp"
#include "test_helpers.hpp"

using namespace mtm;
using mtm::test::max_abs;
using mtm::test::sample;

namespace {

Grid grid_for(double omega, int n = 1024) { return Grid(25.0 / std::sqrt(1.0 - omega * omega), n); }

}  // namespace

TEST_CASE("profile values at the origin") {
    CHECK(std::abs(profile_value(0.0, 0.0) - cplx(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(profile_value(0.5, 0.0) - std::sqrt(0.5)) < 1e-15);
    CHECK_THROWS_AS(profile_value(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(eval_profile(-1.2, Grid(10.0, 16)), DomainError);
}

TEST_CASE("modulus closed form and charge identity") {
    for (double omega : {-0.9, -0.8, -0.5, 0.0, 0.5, 0.8, 0.9}) {
        const Grid g = grid_for(omega, 2048);
        const CVec U = eval_profile(omega, g);
        const double Om = 1.0 - omega * omega;
        const CVec closed = sample(g, [&](double x) { return Om / (omega + std::cosh(2.0 * std::sqrt(Om) * x)); });
        CHECK(max_abs(CVec(U.cwiseAbs2().cast<cplx>()) - closed) < 1e-12);
        CHECK(std::abs(quadrature(RVec(U.cwiseAbs2()), g) - std::acos(omega)) < 1e-8);
        CHECK(residual_first_order(U, omega, g) < 1e-8);
    }
}

TEST_CASE("analytic derivative against the spectral derivative") {
    const Grid g(45.0, 2048);
    CHECK(max_abs(eval_profile_derivative(0.3, g) - differentiate(eval_profile(0.3, g), g)) < 1e-10);
}

TEST_CASE("first-order residual") {
    const Grid g(30.0, 1024);
    CHECK(residual_first_order(eval_profile(0.3, g), 0.3, g) < 1e-8);
    CHECK(residual_first_order(CVec(CVec::Zero(1024)), 0.3, g) == 0.0);
    const CVec bump = sample(g, [](double x) { return 1.0 / std::cosh(x); });
    const double r = residual_first_order(eval_profile(0.3, g) + 1e-3 * bump, 0.3, g);
    CHECK(r > 1e-4);
    CHECK(r < 1e-2);
}

TEST_CASE("second-order residual") {
    const double omega = 0.3, Om = 1.0 - omega * omega;
    const Grid g = grid_for(omega);
    const CVec U = eval_profile(omega, g);
    CHECK(residual_second_order(U, U.conjugate(), Om, g) < 1e-6);
    const double off = residual_second_order(U, U.conjugate(), Om + 0.1, g);
    const double scale = 0.1 * U.cwiseAbs().maxCoeff();
    CHECK(off > 0.5 * scale);
    CHECK(off < 2.0 * scale);
    CHECK(residual_second_order(CVec(CVec::Zero(1024)), CVec(CVec::Zero(1024)), Om, g) == 0.0);
}

TEST_CASE("soliton transforms") {
    const Grid g = grid_for(0.5);
    const FieldState s = eval_soliton(SolitonParams{0.5}, g);
    const CVec U = eval_profile(0.5, g);
    CHECK(max_abs(s.u - U) == 0.0);
    CHECK(max_abs(s.v - U.conjugate()) == 0.0);

    SolitonParams flipped{0.5};
    flipped.phase = std::numbers::pi;
    const FieldState f = eval_soliton(flipped, g);
    CHECK(max_abs(f.u + s.u) < 1e-15);
    CHECK(max_abs(f.v + s.v) < 1e-15);

    CHECK_THROWS_AS(eval_soliton(SolitonParams{0.5, 1.0}, g), DomainError);

    // group law for (shift, phase)
    const FieldState a = gauge_translate(gauge_translate(s, 0.7, 0.4), -0.25, 1.1);
    const FieldState b = gauge_translate(s, 0.45, 1.5);
    CHECK(max_abs(a.u - b.u) < 1e-12);
    CHECK(max_abs(a.v - b.v) < 1e-12);

    SolitonParams moved{0.5};
    moved.shift = 0.45;
    moved.phase = 1.5;
    const FieldState exact = eval_soliton(moved, g);
    CHECK(max_abs(exact.u - b.u) < 1e-10);
}

TEST_CASE("boosted soliton charge regression") {
    // Lorentz-invariant charge; value from the quadrature oracle, frozen
    constexpr double kBoostedCharge = 2.09439510239319;
    const Grid g(60.0, 4096);
    SolitonParams p{0.5, 0.3};
    const FieldState s = eval_soliton(p, g);
    CHECK(std::abs(charge(s) - kBoostedCharge) < 1e-8);
    CHECK(std::abs(charge(s) - 2.0 * std::acos(0.5)) < 1e-8);
    // a moving soliton carries momentum
    CHECK(std::abs(momentum(s)) > 0.1);
}

TEST_CASE("zero modes") {
    const Grid g(20.0, 512);
    const ZeroModes z = zero_mode_fields(0.0, g);
    const int mid = 256;  // x = 0
    CHECK(std::abs(z.gauge[0][mid] - I) < 1e-14);
    CHECK(std::abs(z.gauge[1][mid] - I) < 1e-14);
    CHECK(std::abs(z.gauge[2][mid] + I) < 1e-14);
    CHECK(std::abs(z.gauge[3][mid] + I) < 1e-14);
    const Grid fine(45.0, 2048);
    CHECK(max_abs(zero_mode_fields(0.0, fine).translation[0] - differentiate(eval_profile(0.0, fine), fine)) < 1e-10);

    const CVec U = eval_profile(0.0, g), dU = eval_profile_derivative(0.0, g);
    const cplx overlap = quadrature(CVec(U.conjugate().cwiseProduct(dU) - U.cwiseProduct(dU.conjugate())), g);
    CHECK(std::abs(overlap + 2.0 * I) < 1e-8);
}

TEST_CASE("omega derivative") {
    const double omega = 0.5;
    const Grid g = grid_for(omega, 2048);
    const OmegaDerivative d = omega_derivative(omega, g);
    const CVec U = eval_profile(omega, g);
    // d/domega of Q = 2 arccos(omega); u and v contribute equally
    const double one = -2.0 * omega * 2.0 * quadrature(RVec((U.conjugate().cwiseProduct(d.d_Omega)).real()), g);
    const double lhs = 2.0 * one;
    CHECK(std::abs(lhs - (-2.0 / std::sqrt(1.0 - omega * omega))) < 1e-4);

    const double gap_h = omega_derivative(omega, g, 2e-2).richardson_gap;
    CHECK(gap_h / d.richardson_gap >= 4.0);

    CHECK_THROWS_AS(omega_derivative(0.0, g), DegenerateParameterError);
    CHECK_THROWS_AS(omega_derivative(5e-4, g), DegenerateParameterError);
}
