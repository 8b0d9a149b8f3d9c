#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mtm/conserved.hpp"
#include "mtm/errors.hpp"
#include "mtm/experiments.hpp"
#include "mtm/soliton.hpp"
#include "mtm/spectral.hpp"
#include "test_helpers.hpp"

using namespace mtm;
using mtm::test::max_abs;

namespace {

double h1_norm(const FieldState& s) { return std::sqrt(h1_inner(s, s).real()); }

// unit H^1 field, H^1-orthogonal to the phase and translation tangents of the orbit
FieldState orthogonal_direction(double omega, const Grid& g, std::uint64_t seed) {
    const CVec U = eval_profile(omega, g), dU = eval_profile_derivative(omega, g);
    FieldState tg = FieldState::zero(g), ts = FieldState::zero(g);
    tg.u = I * U;
    tg.v = I * U.conjugate();
    ts.u = dU;
    ts.v = dU.conjugate();
    FieldState w = random_perturbation(g, seed);
    for (FieldState* t : {&tg, &ts}) {
        const double c = h1_inner(w, *t).real() / h1_inner(*t, *t).real();
        w.u -= c * t->u;
        w.v -= c * t->v;
    }
    // the two tangents are H^1-orthogonal, so one pass suffices
    CHECK(std::abs(h1_inner(tg, ts).real()) < 1e-10);
    const double n = h1_norm(w);
    w.u /= n;
    w.v /= n;
    return w;
}

}  // namespace

TEST_CASE("orbital distance on the orbit") {
    const double omega = 0.3;
    const Grid g(40.0, 1024);
    const FieldState s = eval_soliton(SolitonParams{omega}, g);
    const OrbitalFit f = orbital_distance(s, omega);
    CHECK(f.distance < 1e-10);
    CHECK(std::abs(std::remainder(f.alpha, 2.0 * std::numbers::pi)) < 1e-8);
    CHECK(std::abs(f.beta) < 1e-6);

    const OrbitalFit shifted = orbital_distance(gauge_translate(s, 1.0, 0.0), omega);
    CHECK(shifted.distance < 1e-8);
    CHECK(std::abs(std::abs(shifted.beta) - 1.0) < 1e-5);
}

TEST_CASE("orbital distance of an orthogonal perturbation") {
    const double omega = 0.3, delta = 1e-3;
    const Grid g(40.0, 1024);
    FieldState s = eval_soliton(SolitonParams{omega}, g);
    const FieldState w = orthogonal_direction(omega, g, 5);
    s.u += delta * w.u;
    s.v += delta * w.v;
    const OrbitalFit f = orbital_distance(s, omega);
    CHECK(std::abs(f.distance - delta) / delta < 0.05);
}

TEST_CASE("orbital distance is invariant along the orbit") {
    const double omega = -0.3;
    const Grid g(40.0, 1024);
    FieldState s = eval_soliton(SolitonParams{omega}, g);
    const FieldState w = random_perturbation(g, 9);
    s.u += 0.05 * w.u;
    s.v += 0.05 * w.v;
    const double d0 = orbital_distance(s, omega).distance;
    CHECK(d0 > 1e-3);
    for (auto [shift, phase] : {std::pair{0.7, 0.4}, std::pair{-2.3, -2.0}, std::pair{5.0, 3.0}}) {
        CAPTURE(shift);
        CHECK(std::abs(orbital_distance(gauge_translate(s, shift, phase), omega).distance - d0) < 1e-8);
    }
}

TEST_CASE("random perturbation") {
    const Grid g(40.0, 1024);
    const FieldState a = random_perturbation(g, 4), b = random_perturbation(g, 4), c = random_perturbation(g, 5);
    CHECK(std::abs(h1_norm(a) - 1.0) < 1e-12);
    CHECK(max_abs(a.u - b.u) == 0.0);
    CHECK(max_abs(a.u - c.u) > 1e-3);
    CHECK(std::abs(a.u[0]) + std::abs(a.v[0]) < 1e-10);  // decays towards the ends

    NormalStream n1(17), n2(17);
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < 20000; ++k) {
        const double x = n1.next();
        CHECK(x == n2.next());
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / 20000.0) < 0.03);
    CHECK(std::abs(sq / 20000.0 - 1.0) < 0.05);
}

TEST_CASE("relative drift") {
    CHECK(relative_drift(1.1, 1.0, 0.5) == doctest::Approx(0.1));
    CHECK(relative_drift(1e-3, 0.0, 2.0) == doctest::Approx(5e-4));
    CHECK(relative_drift(-2.0, -2.0, 1.0) == 0.0);
}

TEST_CASE("stability run with no perturbation stays on the orbit") {
    // the splitting carries the soliton with a time-independent O(dt^2) profile error,
    // so the 1e-8 floor needs dt below about 1.4e-4
    StabilityConfig c;
    c.delta = 0.0;
    c.t_end = 50.0;
    c.dt = 1e-4;
    c.stride = 25000;
    const RunRecord r = stability_experiment(c);
    CHECK(r.failure.empty());
    CHECK(r.metrics.at("sup_distance") < 1e-8);
    CHECK(r.passed());
    const auto t = r.column("t");
    CHECK(t.back() == doctest::Approx(50.0));
    CHECK(r.column("distance").size() == t.size());
    CHECK(r.metrics.at("drift_Q") < 1e-10);
}

TEST_CASE("unperturbed distance plateau scales with dt^2") {
    auto sup = [](double dt) {
        StabilityConfig c;
        c.delta = 0.0;
        c.t_end = 5.0;
        c.dt = dt;
        c.stride = static_cast<int>(std::lround(0.5 / dt));
        return stability_experiment(c).metrics.at("sup_distance");
    };
    const double a = sup(1e-3), b = sup(5e-4);
    CHECK(a / b > 3.8);
    CHECK(a / b < 4.2);
}

TEST_CASE("stability runs are reproducible and verdicts follow the record") {
    StabilityConfig c;
    c.omega = 0.3;
    c.delta = 1e-2;
    c.t_end = 2.0;
    c.stride = 250;
    const RunRecord a = stability_experiment(c), b = stability_experiment(c);
    CHECK(a.series == b.series);
    CHECK(a.verdicts == b.verdicts);

    const auto d = a.column("distance");
    double sup = 0.0;
    for (double x : d) {
        CHECK(std::isfinite(x));
        CHECK(x >= 0.0);
        sup = std::max(sup, x);
    }
    CHECK(a.metrics.at("sup_distance") == sup);
    CHECK(a.verdicts.at("bounded_distance") == (sup <= kStabilityConstant * c.delta));
    CHECK(std::abs(d.front() - c.delta) < 0.5 * c.delta);

    const nlohmann::json j = a.to_json();
    CHECK(j.at("kind") == "stability");
    CHECK(j.at("config").at("seed") == 1);
    CHECK(j.at("config").at("delta") == 1e-2);
    CHECK(j.at("series").at("rows").size() == d.size());
    CHECK(j.at("passed") == a.passed());

    StabilityConfig bad;
    bad.delta = -1.0;
    CHECK_THROWS_AS(stability_experiment(bad), ArgumentError);
    bad = StabilityConfig{};
    bad.omega = 1.0;
    CHECK_THROWS_AS(stability_experiment(bad), DomainError);
}

TEST_CASE("bound experiment on zero data") {
    BoundConfig c;
    c.charge = 0.0;
    c.t_end = 1.0;
    c.half_length = 20.0;
    c.points = 256;
    c.stride = 100;
    const RunRecord r = h1_bound_experiment(c);
    for (double x : r.column("h1")) CHECK(x == 0.0);
    CHECK(r.passed());
}

TEST_CASE("gaussian data has the requested charge") {
    const Grid g(40.0, 1024);
    for (double q : {0.05, 0.2}) CHECK(std::abs(charge(gaussian_data(g, q, 3)) - q) < 1e-12);
}

TEST_CASE("bound experiment: short run") {
    BoundConfig c;
    c.charge = 0.1;
    c.t_end = 10.0;
    const RunRecord r = h1_bound_experiment(c);
    CHECK(r.failure.empty());
    CHECK(r.verdicts.at("charge_conserved"));
    CHECK(r.verdicts.at("h1_bounded"));
    CHECK(r.metrics.count("coercivity_constant_needed") == 1);
    CHECK(r.metrics.at("gn_ratio_sup") > 0.0);
}

TEST_CASE("sweep isolates failures and fills the tables") {
    SweepConfig c;
    c.omegas = {0.3, 1.5};
    c.constrained = false;
    c.splitting = false;
    const RunRecord r = omega_sweep(c);
    CHECK(r.tables.at("errors").size() == 1);
    CHECK(!r.passed());
    CHECK(r.tables.at("spectrum").size() >= 4);
    CHECK(r.tables.at("sigma").size() == 2);
    CHECK(r.verdicts.at("w=+0.30 L- two isolated, zero and signed"));
    CHECK(r.verdicts.at("w=+0.30 L+ two isolated, zero and signed"));
    CHECK(r.verdicts.at("w=+0.30 sigma plus closed form"));
}
