// One PASS/FAIL line per acceptance criterion. Exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mtm/conserved.hpp"
#include "mtm/evolver.hpp"
#include "mtm/experiments.hpp"
#include "mtm/scattering.hpp"
#include "mtm/soliton.hpp"
#include "mtm/spectral.hpp"

using namespace mtm;

namespace {

// soliton identities
constexpr double kNormTol = 1e-8;
constexpr double kModulusTol = 1e-12;
constexpr double kProfileResidualTol = 1e-6;
// conservation and balance
constexpr double kChargeDriftTol = 1e-10;
constexpr double kDriftTol = 1e-6;
constexpr double kOrderRatio = 3.5;
constexpr double kRoundoffDrift = 1e-11;  // drifts below this are round-off and carry no order
constexpr double kBalanceTol = 1e-4;
// scattering and hierarchy
constexpr double kLaxDriftTol = 1e-5;
constexpr double kHierarchyTol = 1e-6;
// spectral
constexpr double kKernelTol = 1e-6;
constexpr double kBlockTol = 1e-8;
constexpr double kOverlapTol = 1e-8;
constexpr double kGeneralizedTol = 1e-5;
constexpr double kZeroEigTol = 1e-6;
constexpr double kSpectrumMatchTol = 1e-5;
constexpr double kSigmaTol = 1e-3;
constexpr double kMarginAtZero = 0.735083249231;
constexpr double kMarginTol = 1e-8;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::string failed;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failed += (failed.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

double residual(const DiscreteOperator& op, const std::vector<CVec>& w) {
    double r = 0.0;
    for (const CVec& c : apply_operator(op, w)) r = std::max(r, c.cwiseAbs().maxCoeff());
    return r;
}

// zero eigenvalue and the isolated eigenvalue farthest from zero
struct PairSplit {
    bool two = false;
    double zero = NAN, other = NAN;
};

PairSplit split_pair(const std::vector<EigenPair>& e) {
    PairSplit p;
    p.two = e.size() == 2;
    if (p.two) {
        const bool first = std::abs(e[0].value) < std::abs(e[1].value);
        p.zero = e[first ? 0 : 1].value;
        p.other = e[first ? 1 : 0].value;
    }
    return p;
}

// perturbed soliton shared by criteria 2-4
FieldState perturbed_soliton(const Grid& g) {
    FieldState s = eval_soliton(SolitonParams{0.5}, g);
    const FieldState w = random_perturbation(g, 1);
    s.u += 1e-2 * w.u;
    s.v += 1e-2 * w.v;
    return s;
}

Outcome soliton_identities() {
    Outcome o;
    double worst_norm = 0.0, worst_mod = 0.0, worst_first = 0.0, worst_second = 0.0;
    for (double omega : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        const Grid g = spectral_grid(omega);
        const CVec U = eval_profile(omega, g);
        const double norm = quadrature(RVec(U.cwiseAbs2()), g);
        worst_norm = std::max(worst_norm, std::abs(norm - std::acos(omega)));
        for (int j = 0; j < g.size(); ++j)
            worst_mod = std::max(worst_mod, std::abs(std::norm(U[j]) - profile_modulus_sq(omega, g.x(j))));
        worst_first = std::max(worst_first, residual_first_order(U, omega, g));
        worst_second = std::max(worst_second, residual_second_order(U, U.conjugate(), 1.0 - omega * omega, g));
    }
    o.require(worst_norm < kNormTol, "L2 norm");
    o.require(worst_mod < kModulusTol, "modulus");
    o.require(worst_first < kProfileResidualTol, "first-order residual");
    o.require(worst_second < kProfileResidualTol, "second-order residual");
    o.detail += fmt("norm err %.2e, |U|^2 err %.2e", worst_norm, worst_mod) +
                fmt(", residuals %.2e / %.2e", worst_first, worst_second);
    return o;
}

struct Drifts {
    double Q = 0.0, P = 0.0, H = 0.0, R = 0.0;
};

Drifts conservation_run(double dt) {
    const Grid g(40.0, 1024);
    EvolverConfig c;
    c.dt = dt;
    c.t_end = 20.0;
    c.snapshot_stride = static_cast<int>(std::lround(0.1 / dt));
    c.keep_snapshots = false;
    const Trajectory tr = evolve(perturbed_soliton(g), c, conserved_observers(0.5));
    const auto Q = tr.diagnostics.column("Q"), P = tr.diagnostics.column("P"), H = tr.diagnostics.column("H"),
               R = tr.diagnostics.column("R");
    const double floor = Q.front();
    Drifts d;
    for (std::size_t k = 0; k < Q.size(); ++k) {
        d.Q = std::max(d.Q, relative_drift(Q[k], Q[0], floor));
        d.P = std::max(d.P, relative_drift(P[k], P[0], floor));
        d.H = std::max(d.H, relative_drift(H[k], H[0], floor));
        d.R = std::max(d.R, relative_drift(R[k], R[0], floor));
    }
    return d;
}

Outcome conservation() {
    Outcome o;
    const Drifts a = conservation_run(1e-3), b = conservation_run(5e-4);
    o.require(a.Q < kChargeDriftTol, "Q drift");
    o.require(a.P < kDriftTol && a.H < kDriftTol && a.R < kDriftTol, "P/H/R drift");
    std::string orders;
    for (auto [name, x, y] : {std::tuple{"P", a.P, b.P}, std::tuple{"H", a.H, b.H}, std::tuple{"R", a.R, b.R},
                              std::tuple{"Q", a.Q, b.Q}}) {
        if (x < kRoundoffDrift) {
            orders += std::string(" ") + name + ":roundoff";
            continue;
        }
        o.require(x / y >= kOrderRatio, std::string(name) + " order");
        orders += std::string(" ") + name + fmt(":%.2f", x / y);
    }
    o.detail += fmt("drift Q %.2e, P %.2e", a.Q, a.P) + fmt(", H %.2e, R %.2e; ratio", a.H, a.R) + orders;
    return o;
}

double balance_along(double dt, int points) {
    const Grid g(40.0, points);
    const StrangStepper stepper(g, dt);
    FieldState s = perturbed_soliton(g);
    const long long steps = std::llround(20.0 / dt), every = std::llround(1.0 / dt);
    double worst = 0.0;
    FieldState prev = s;
    for (long long k = 1; k + 1 <= steps; ++k) {
        prev = s;
        stepper.advance(s);
        if (k % every == 0) {
            FieldState next = s;
            stepper.advance(next);
            worst = std::max(worst, balance_residual(prev, s, next));
        }
    }
    return worst;
}

Outcome balance_law() {
    Outcome o;
    const double coarse = balance_along(1e-3, 1024), fine = balance_along(5e-4, 2048);
    o.require(coarse < kBalanceTol, "residual");
    o.require(coarse / fine >= kOrderRatio, "order");
    o.detail = fmt("max residual %.2e, refinement ratio %.2f", coarse, coarse / fine);
    return o;
}

Outcome lax_invariance() {
    Outcome o;
    const Grid g(40.0, 1024);
    const StrangStepper stepper(g, 1e-3);
    FieldState s = perturbed_soliton(g);
    const double lambdas[] = {0.5, 0.8, 1.25};
    cplx start[3];
    for (int k = 0; k < 3; ++k) start[k] = riccati_solve(s, lambdas[k]).log_a;
    double worst = 0.0;
    for (int block = 0; block < 10; ++block) {
        for (int k = 0; k < 1000; ++k) stepper.advance(s);
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(riccati_solve(s, lambdas[k]).log_a - start[k]));
    }
    o.require(worst < kLaxDriftTol, "log a drift");
    o.detail = fmt("max |log a(t) - log a(0)| %.2e over t in [0, %.0f]", worst, s.t);
    return o;
}

Outcome charge_hierarchy() {
    Outcome o;
    const Grid g(30.0, 2048);
    double worst = 0.0;
    bool exact = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        FieldState s = random_perturbation(g, seed);
        const double amp = 0.5 + 0.15 * static_cast<double>(seed);
        s.u *= amp;
        s.v *= amp;
        const HierarchyReport r = hierarchy_relations(s);
        exact = exact && r.charge == 0.0 && explicit_In(s, 0) == cplx(charge(s), 0.0);
        worst = std::max({worst, r.momentum, r.hamiltonian, r.higher});
    }
    o.require(exact, "I_0 != Q");
    o.require(worst < kHierarchyTol, "relations");
    o.detail = fmt("I_0 == Q exactly; max relation defect %.2e (c_R = %gi, ", worst, kHierarchyRCoefficient.imag()) +
               fmt("c_Q = %gi)", kHierarchyQCoefficient.imag());
    return o;
}

Outcome kernels() {
    Outcome o;
    const double omega = 0.5;
    const Grid g = spectral_grid(omega);
    const DiscreteOperator h = build_hessian(omega, g);
    const ZeroModes z = zero_mode_fields(omega, g);
    const double fg = std::abs(quadratic_form(h, {z.gauge[0], z.gauge[1]}));
    const double fs = std::abs(quadratic_form(h, {z.translation[0], z.translation[1]}));
    const CVec U = eval_profile(omega, g), dU = eval_profile_derivative(omega, g);
    const double kp = residual(build_Lpm(omega, g, Sign::plus), {dU});
    const DiscreteOperator lm = build_Lpm(omega, g, Sign::minus);
    const double km = residual(lm, {CVec(I * U)});
    o.require(std::max({fg, fs, kp, km}) < kKernelTol, "kernel");

    const double block = block_diagonalize_check(0.3, Grid(30.0, 512));
    o.require(block < kBlockTol, "block-diagonal defect");

    const Grid g0 = spectral_grid(0.0);
    const CVec U0 = eval_profile(0.0, g0), dU0 = eval_profile_derivative(0.0, g0);
    const double extra = std::max(residual(build_Lpm(0.0, g0, Sign::plus), {CVec(I * dU0)}),
                                  residual(build_Lpm(0.0, g0, Sign::minus), {U0}));
    o.require(extra < kKernelTol, "extra kernels at omega = 0");

    const cplx overlap = quadrature(CVec(U0.conjugate().cwiseProduct(dU0) - U0.cwiseProduct(dU0.conjugate())), g0);
    const double ov = std::abs(overlap + 2.0 * I);
    o.require(ov < kOverlapTol, "overlap");

    const RVec x = g.positions();
    const CVec f = -0.5 * x.cast<cplx>().cwiseProduct(U) + U / (4.0 * I * omega);
    const double gen = (apply_operator(lm, {CVec(I * f)})[0] - I * dU).cwiseAbs().maxCoeff();
    o.require(gen < kGeneralizedTol, "generalised eigenvector");

    o.detail += fmt("kernels %.2e, block %.2e", std::max({fg, fs, kp, km}), block) +
                fmt(", extra %.2e, overlap err %.2e", extra, ov) + fmt(", generalised %.2e", gen);
    return o;
}

std::vector<double> dense_values(PotentialKind kind, double omega) {
    SchrodingerProblem p;
    p.kind = kind;
    p.omega = omega;
    std::vector<double> out;
    for (const auto& e : eigs_below_continuum(build_schrodinger(p, schrodinger_grid(p)))) out.push_back(e.value);
    return out;
}

std::vector<double> shooting_values(PotentialKind kind, double omega) {
    SchrodingerProblem p;
    p.kind = kind;
    p.omega = omega;
    return sturm_eigenvalues(p);
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return INFINITY;
    double w = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) w = std::max(w, std::abs(a[k] - b[k]));
    return w;
}

Outcome minus_spectrum() {
    Outcome o;
    double reduced_gap = 0.0, sturm_gap = 0.0;
    for (double omega : {-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double Om = 1.0 - omega * omega;
        const auto eig = eigs_below_continuum(build_Lpm(omega, spectral_grid(omega), Sign::minus));
        const PairSplit p = split_pair(eig);
        const bool ok = p.two && std::abs(p.zero) < kZeroEigTol && sign_of(p.other) == sign_of(omega);
        o.require(ok, fmt("count/sign at %+.1f (%g isolated)", omega, static_cast<double>(eig.size())));

        const auto even = dense_values(PotentialKind::minus_even, omega), odd = dense_values(PotentialKind::minus_odd, omega);
        std::vector<double> both = even;
        both.insert(both.end(), odd.begin(), odd.end());
        std::sort(both.begin(), both.end());
        std::vector<double> scaled;
        for (const auto& e : eig) scaled.push_back(e.value / Om);
        reduced_gap = std::max(reduced_gap, max_gap(scaled, both));
        sturm_gap = std::max({sturm_gap, max_gap(shooting_values(PotentialKind::minus_even, omega), even),
                              max_gap(shooting_values(PotentialKind::minus_odd, omega), odd)});
    }
    o.require(reduced_gap < kSpectrumMatchTol, "reduced vs Schrodinger");
    o.require(sturm_gap < kSpectrumMatchTol, "shooting vs dense");
    const auto even0 = dense_values(PotentialKind::minus_even, 0.0);
    const double bottom = even0.empty() ? INFINITY : even0.front();
    o.require(std::abs(bottom) < kZeroEigTol, "even half at omega = 0");
    o.detail += fmt("reduced/Schrodinger gap %.2e, shooting/dense gap %.2e", reduced_gap, sturm_gap) +
                fmt(", even-half bottom at 0: %.2e", bottom);
    return o;
}

Outcome plus_spectrum() {
    Outcome o;
    std::string seconds;
    for (double omega : {-0.5, -0.3, -0.2, -0.1, 0.1, 0.2, 0.3, 0.5}) {
        const auto eig = eigs_below_continuum(build_Lpm(omega, spectral_grid(omega), Sign::plus));
        const PairSplit p = split_pair(eig);
        const bool ok = p.two && std::abs(p.zero) < kZeroEigTol && sign_of(p.other) == -sign_of(omega);
        o.require(ok, fmt("count/sign at %+.1f (%g isolated)", omega, static_cast<double>(eig.size())));
        seconds += fmt(" %+.1f:%.3g", omega, p.other);
    }
    std::string reported;
    // default domain, then doubled length and resolution (weakly bound states near the edge need the latter)
    for (double omega : {-0.9, -0.7, 0.7, 0.9}) {
        const Grid g = spectral_grid(omega);
        const auto eig = eigs_below_continuum(build_Lpm(omega, g, Sign::plus));
        const auto big = eigs_below_continuum(build_Lpm(omega, Grid(2.0 * g.half_length(), 2 * g.size()), Sign::plus));
        reported += fmt(" %+.1f:%g", omega, static_cast<double>(eig.size())) +
                    fmt("/%g", static_cast<double>(big.size()));
    }
    o.detail += "second eigenvalue" + seconds + "; counts for |omega| > 0.5 (default/doubled domain, reported only)" +
                reported;
    return o;
}

Outcome sigma_indices() {
    Outcome o;
    double worst = 0.0;
    for (double omega : {-0.7, -0.5, -0.3, 0.3, 0.5, 0.7}) {
        const Grid g = spectral_grid(omega);
        for (Sign s : {Sign::plus, Sign::minus}) {
            const SigmaIndex r = sigma_index(omega, s, g);
            worst = std::max(worst, std::abs(r.numeric - r.closed_form));
            const int expected = s == Sign::plus ? -sign_of(omega) : sign_of(omega);
            o.require(sign_of(r.numeric) == expected,
                      fmt("sign at %+.1f for the %+.0f operator", omega, s == Sign::plus ? 1.0 : -1.0));
        }
    }
    o.require(worst < kSigmaTol, "closed form");
    o.detail += fmt("max |numeric - closed form| %.2e", worst);
    return o;
}

Outcome constrained_positivity() {
    Outcome o;
    std::string values;
    for (double omega : {0.0, -0.1, 0.1, -0.3, 0.3, -0.5, 0.5}) {
        const double m = constrained_min_eig(omega, spectral_grid(omega));
        o.require(m > 0.0, fmt("not positive at %+.1f", omega));
        if (omega == 0.0) o.require(std::abs(m - kMarginAtZero) < kMarginTol, "frozen margin at 0");
        values += fmt(" %+.1f:%.6f", omega, m);
    }
    o.detail += "min eigenvalue" + values;
    return o;
}

Outcome orbital_stability() {
    Outcome o;
    std::string sups;
    for (double omega : {0.0, -0.3, 0.3}) {
        double pair[2];
        int k = 0;
        for (double delta : {1e-3, 1e-2}) {
            StabilityConfig c;
            c.omega = omega;
            c.delta = delta;
            const RunRecord r = stability_experiment(c);
            o.require(r.passed(), fmt("omega %+.1f delta %g", omega, delta) + (r.failure.empty() ? "" : " " + r.failure));
            pair[k++] = r.metrics.count("sup_distance") ? r.metrics.at("sup_distance") : NAN;
        }
        sups += fmt(" %+.1f:", omega) + fmt("%.2e/%.2e", pair[0], pair[1]);
    }
    o.detail += "sup distance (delta 1e-3/1e-2)" + sups;
    return o;
}

Outcome h1_bound() {
    Outcome o;
    std::string ratios;
    for (double q : {0.05, 0.1, 0.2}) {
        BoundConfig c;
        c.charge = q;
        const RunRecord r = h1_bound_experiment(c);
        o.require(r.failure.empty() && r.verdicts.count("h1_bounded") && r.verdicts.at("h1_bounded"),
                  fmt("Q = %g", q) + (r.failure.empty() ? "" : " " + r.failure));
        if (r.metrics.count("sup_h1"))
            ratios += fmt(" Q=%g:%.3f", q, r.metrics.at("sup_h1") / r.metrics.at("early_sup_h1"));
    }
    o.detail += "sup H1 / early sup" + ratios;
    return o;
}

}  // namespace

int main() {
    using Clock = std::chrono::steady_clock;
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"soliton identities", soliton_identities},
        {"conservation", conservation},
        {"balance law", balance_law},
        {"scattering-data invariance", lax_invariance},
        {"charge hierarchy", charge_hierarchy},
        {"kernel and block structure", kernels},
        {"minus operator spectrum", minus_spectrum},
        {"plus operator spectrum", plus_spectrum},
        {"sigma index", sigma_indices},
        {"constrained positivity", constrained_positivity},
        {"orbital stability", orbital_stability},
        {"global H1 bound", h1_bound},
    };
    int failed = 0, n = 0;
    for (const auto& [name, run] : criteria) {
        ++n;
        const auto start = Clock::now();
        Outcome out;
        try {
            out = run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.failed = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        const std::string why = out.failed.empty() ? "" : " | failed: " + out.failed;
        std::printf("%s %2d %s: %s%s [%.1fs]\n", out.pass ? "PASS" : "FAIL", n, name, out.detail.c_str(), why.c_str(),
                    secs);
        std::fflush(stdout);
        failed += !out.pass;
    }
    std::printf("%d/%d criteria passed\n", n - failed, n);
    return failed == 0 ? 0 : 1;
}
