#include "mtm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "fft.hpp"
#include "mtm/conserved.hpp"
#include "mtm/errors.hpp"
#include "mtm/evolver.hpp"
#include "mtm/soliton.hpp"
#include "mtm/spectral.hpp"

namespace mtm {

using nlohmann::json;

namespace {

struct OrbitTarget {
    const FieldState& state;
    double omega;
    CVec du, dv;     // s'
    CVec ddu, ddv;   // s''
    CVec d3u, d3v;   // s'''

    OrbitTarget(const FieldState& s, double w) : state(s), omega(w) {
        du = differentiate(s.u, s.grid);
        dv = differentiate(s.v, s.grid);
        ddu = second_derivative(s.u, s.grid);
        ddv = second_derivative(s.v, s.grid);
        d3u = differentiate(ddu, s.grid);
        d3v = differentiate(ddv, s.grid);
    }

    // H^1 overlap <phi(. + beta), s> and its first two beta-derivatives, using
    // d/dbeta int conj(phi(x + beta)) f(x) dx = -int conj(phi(x + beta)) f'(x) dx.
    void overlap(double beta, cplx& g, cplx& g1, cplx& g2) const {
        const Grid& grid = state.grid;
        g = g1 = g2 = 0.0;
        for (int j = 0; j < grid.size(); ++j) {
            const double y = grid.x(j) + beta;
            const cplx p = profile_value(omega, y), dp = profile_derivative(omega, y);
            // second component of the orbit is conj(U), so conj of it is U
            g += std::conj(p) * state.u[j] + p * state.v[j] + std::conj(dp) * du[j] + dp * dv[j];
            g1 -= std::conj(p) * du[j] + p * dv[j] + std::conj(dp) * ddu[j] + dp * ddv[j];
            g2 += std::conj(p) * ddu[j] + p * ddv[j] + std::conj(dp) * d3u[j] + dp * d3v[j];
        }
        g *= grid.dx();
        g1 *= grid.dx();
        g2 *= grid.dx();
    }

    double power(double beta) const {
        cplx g, g1, g2;
        overlap(beta, g, g1, g2);
        return std::norm(g);
    }
};

double wrap_phase(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

}  // namespace

OrbitalFit orbital_distance(const FieldState& state, double omega) {
    state.validate();
    if (!(std::abs(omega) < 1.0)) throw DomainError("soliton frequency must satisfy |omega| < 1");
    const Grid& grid = state.grid;
    if (!grid.periodic()) throw ConfigurationError("orbital_distance needs a periodic grid");
    const int n = grid.size();
    const double dx = grid.dx();
    const OrbitTarget target(state, omega);

    // correlation over integer shifts: c_m = sum_j conj(p_{j+m}) s_j
    const CVec U = eval_profile(omega, grid), dU = eval_profile_derivative(omega, grid);
    CVec acc = CVec::Zero(n);
    auto add = [&](const CVec& p, const CVec& s) {
        acc += detail::fft_forward(p).cwiseProduct(detail::fft_forward(s).conjugate());
    };
    add(U, state.u);
    add(U.conjugate(), state.v);
    add(dU, target.du);
    add(dU.conjugate(), target.dv);
    const CVec corr = detail::fft_inverse(acc);
    int best = 0;
    for (int m = 1; m < n; ++m)
        if (std::abs(corr[m]) > std::abs(corr[best])) best = m;
    const double beta0 = (best < n / 2 ? best : best - n) * dx;

    // golden section on |g|^2 over one cell either side
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = beta0 - dx, b = beta0 + dx;
    double c = b - ratio * (b - a), d = a + ratio * (b - a);
    double fc = target.power(c), fd = target.power(d);
    while (b - a > 1e-6) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - ratio * (b - a);
            fc = target.power(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + ratio * (b - a);
            fd = target.power(d);
        }
    }
    double beta = 0.5 * (a + b);

    for (int it = 0; it < 8; ++it) {
        cplx g, g1, g2;
        target.overlap(beta, g, g1, g2);
        const double f1 = 2.0 * std::real(std::conj(g) * g1);
        const double f2 = 2.0 * (std::norm(g1) + std::real(std::conj(g) * g2));
        if (!(f2 < 0.0)) break;  // not at a maximum of the overlap
        const double stepb = -f1 / f2;
        if (std::abs(stepb) > 1e-3) break;
        beta += stepb;
        if (std::abs(stepb) < 1e-14) break;
    }

    cplx g, g1, g2;
    target.overlap(beta, g, g1, g2);
    const double alpha = std::abs(g) > 0.0 ? std::arg(g) : 0.0;
    const cplx rot = std::exp(I * alpha);
    RVec diff(n);
    for (int j = 0; j < n; ++j) {
        const double y = grid.x(j) + beta;
        const cplx p = profile_value(omega, y), dp = profile_derivative(omega, y);
        diff[j] = std::norm(state.u[j] - rot * p) + std::norm(state.v[j] - rot * std::conj(p)) +
                  std::norm(target.du[j] - rot * dp) + std::norm(target.dv[j] - rot * std::conj(dp));
    }
    return {std::sqrt(std::max(0.0, quadrature(diff, grid))), wrap_phase(alpha), beta};
}

NormalStream::NormalStream(std::uint64_t seed) : engine_(seed) {}

double NormalStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    auto uniform = [this] {
        // (0, 1], 53 random bits
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    };
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double th = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

FieldState random_perturbation(const Grid& grid, std::uint64_t seed) {
    constexpr double window = 20.0, envelope = 4.0;
    constexpr int modes = 16;
    NormalStream normal(seed);
    auto draw_field = [&] {
        std::vector<cplx> coeff(modes);
        for (auto& a : coeff) {
            const double re = normal.next();
            a = cplx(re, normal.next()) / std::sqrt(2.0);
        }
        CVec f(grid.size());
        for (int j = 0; j < grid.size(); ++j) {
            const double x = grid.x(j);
            cplx s = 0.0;
            for (int m = 0; m < modes; ++m)
                s += coeff[m] * std::exp(I * (2.0 * std::numbers::pi * (m - modes / 2) / window * x));
            f[j] = s * std::exp(-x * x / (2.0 * envelope * envelope));
        }
        return f;
    };
    FieldState out = FieldState::zero(grid);
    out.u = draw_field();
    out.v = draw_field();
    const double scale = std::sqrt(norms(out).h1_sq);
    out.u /= scale;
    out.v /= scale;
    return out;
}

double relative_drift(double x, double x0, double floor) {
    const double scale = std::max(std::abs(x0), floor);
    const double diff = std::abs(x - x0);
    return diff == 0.0 ? 0.0 : diff / scale;
}

bool RunRecord::passed() const {
    if (!failure.empty() || verdicts.empty()) return false;
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second; });
}

std::vector<double> RunRecord::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ArgumentError("no column named " + name);
    const auto k = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& row : series) out.push_back(row[k]);
    return out;
}

json RunRecord::to_json() const {
    json j;
    j["kind"] = kind;
    j["config"] = config;
    j["series"] = {{"columns", columns}, {"rows", series}};
    j["tables"] = tables;
    j["verdicts"] = verdicts;
    j["metrics"] = metrics;
    j["failure"] = failure;
    j["passed"] = passed();
    j["wall_seconds"] = wall_seconds;
    return j;
}

json StabilityConfig::to_json() const {
    return {{"omega", omega}, {"delta", delta}, {"t_end", t_end}, {"seed", seed},
            {"grid_L", half_length}, {"grid_N", points}, {"dt", dt}, {"stride", stride}};
}

json BoundConfig::to_json() const {
    return {{"charge", charge}, {"t_end", t_end}, {"seed", seed}, {"grid_L", half_length},
            {"grid_N", points}, {"dt", dt}, {"stride", stride}};
}

json SweepConfig::to_json() const {
    return {{"omegas", omegas}, {"spectra", spectra}, {"sigma", sigma}, {"constrained", constrained},
            {"splitting", splitting}};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void copy_diagnostics(RunRecord& rec, const Diagnostics& diag) {
    rec.columns = diag.columns;
    rec.series = diag.rows;
}

// Max relative drift of each conserved column against its first entry.
void record_drifts(RunRecord& rec, double floor) {
    for (const char* name : {"Q", "P", "H", "R"}) {
        const auto col = rec.column(name);
        double worst = 0.0;
        for (double x : col) worst = std::max(worst, relative_drift(x, col.front(), floor));
        rec.metrics[std::string("drift_") + name] = worst;
    }
}

std::vector<Observer> norm_observers() {
    return {{"l2", [](const FieldState& s) { return norms(s).l2_sq; }},
            {"h1", [](const FieldState& s) { return norms(s).h1_sq; }}};
}

std::vector<Observer> charge_observers() {
    return {{"Q", [](const FieldState& s) { return charge(s); }},
            {"P", [](const FieldState& s) { return momentum(s); }},
            {"H", [](const FieldState& s) { return hamiltonian(s); }},
            {"R", [](const FieldState& s) { return higher_charge(s); }}};
}

}  // namespace

RunRecord stability_experiment(const StabilityConfig& cfg) {
    const auto start = Clock::now();
    if (!(std::abs(cfg.omega) < 1.0)) throw DomainError("soliton frequency must satisfy |omega| < 1");
    if (!(cfg.delta >= 0.0)) throw ArgumentError("perturbation size must be nonnegative");
    RunRecord rec;
    rec.kind = "stability";
    rec.config = cfg.to_json();

    const Grid grid(cfg.half_length, cfg.points);
    FieldState init = eval_soliton(SolitonParams{cfg.omega}, grid);
    if (cfg.delta > 0.0) {
        const FieldState w = random_perturbation(grid, cfg.seed);
        init.u += cfg.delta * w.u;
        init.v += cfg.delta * w.v;
    }

    std::vector<Observer> obs;
    const double omega = cfg.omega;
    obs.push_back({"distance", [omega](const FieldState& s) { return orbital_distance(s, omega).distance; }});
    for (auto& o : norm_observers()) obs.push_back(o);
    for (auto& o : charge_observers()) obs.push_back(o);

    EvolverConfig ec;
    ec.dt = cfg.dt;
    ec.t_end = cfg.t_end;
    ec.snapshot_stride = cfg.stride;
    ec.keep_snapshots = false;
    const double threshold = std::max(kStabilityConstant * cfg.delta, kStabilityFloor);
    rec.metrics["threshold"] = threshold;
    try {
        const Trajectory traj = evolve(init, ec, obs);
        copy_diagnostics(rec, traj.diagnostics);
        const auto dist = rec.column("distance");
        const double sup = *std::max_element(dist.begin(), dist.end());
        rec.metrics["sup_distance"] = sup;
        rec.metrics["initial_distance"] = dist.front();
        rec.metrics["final_distance"] = dist.back();
        const double q0 = rec.column("Q").front();
        record_drifts(rec, q0);
        rec.metrics["Q0"] = q0;
        const bool finite = std::all_of(dist.begin(), dist.end(), [](double d) { return std::isfinite(d) && d >= 0.0; });
        rec.verdicts["finite_distance"] = finite;
        rec.verdicts["bounded_distance"] = finite && sup <= threshold;
    } catch (const BlowUpError& e) {
        rec.failure = std::string("blow-up: ") + e.what();
        rec.metrics["blow_up_time"] = e.time();
        rec.verdicts["bounded_distance"] = false;
    }
    rec.wall_seconds = seconds_since(start);
    return rec;
}

FieldState gaussian_data(const Grid& grid, double q, std::uint64_t seed) {
    if (!(q >= 0.0)) throw ArgumentError("charge must be nonnegative");
    NormalStream normal(seed);
    const double theta = normal.next();
    const double amp = std::sqrt(q / (2.0 * std::sqrt(std::numbers::pi)));
    FieldState s = FieldState::zero(grid);
    for (int j = 0; j < grid.size(); ++j) {
        const double x = grid.x(j);
        s.u[j] = amp * std::exp(-0.5 * x * x) * std::exp(I * (0.5 * x));
        s.v[j] = amp * std::exp(-0.5 * (x - 1.0) * (x - 1.0)) * std::exp(I * theta);
    }
    return s;
}

RunRecord h1_bound_experiment(const BoundConfig& cfg) {
    const auto start = Clock::now();
    RunRecord rec;
    rec.kind = "h1bound";
    rec.config = cfg.to_json();

    const Grid grid(cfg.half_length, cfg.points);
    const FieldState init = gaussian_data(grid, cfg.charge, cfg.seed);

    std::vector<Observer> obs = norm_observers();
    for (auto& o : charge_observers()) obs.push_back(o);
    obs.push_back({"grad_sq", [](const FieldState& s) { return norms(s).h1_sq - norms(s).l2_sq; }});
    // Gagliardo-Nirenberg ratio sup|f|^2 / (||f|| ||f_x||), largest over the two components
    obs.push_back({"gn_ratio", [](const FieldState& s) {
        double worst = 0.0;
        for (const CVec* f : {&s.u, &s.v}) {
            const double l2 = std::sqrt(quadrature(RVec(f->cwiseAbs2()), s.grid));
            const double d = std::sqrt(quadrature(RVec(differentiate(*f, s.grid).cwiseAbs2()), s.grid));
            if (l2 * d > 0.0) worst = std::max(worst, f->cwiseAbs2().maxCoeff() / (l2 * d));
        }
        return worst;
    }});

    EvolverConfig ec;
    ec.dt = cfg.dt;
    ec.t_end = cfg.t_end;
    ec.snapshot_stride = cfg.stride;
    ec.keep_snapshots = false;
    try {
        const Trajectory traj = evolve(init, ec, obs);
        copy_diagnostics(rec, traj.diagnostics);
        const auto t = rec.column("t"), h1 = rec.column("h1");
        double early = 0.0, sup = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t[k] <= cfg.t_end / 10.0 + 1e-12) early = std::max(early, h1[k]);
            sup = std::max(sup, h1[k]);
        }
        const double bound = kBoundFactor * early;
        rec.metrics["early_sup_h1"] = early;
        rec.metrics["sup_h1"] = sup;
        rec.metrics["bound"] = bound;
        const double q0 = rec.column("Q").front();
        rec.metrics["Q0"] = q0;
        record_drifts(rec, std::max(q0, std::numeric_limits<double>::min()));
        rec.verdicts["h1_bounded"] = sup <= bound;
        rec.verdicts["charge_conserved"] = rec.metrics["drift_Q"] < 1e-10;

        // smallest C with R + C (Q + Q^3) >= |grad|^2 / 2 along the run; recorded only
        const auto R = rec.column("R"), Q = rec.column("Q"), grad = rec.column("grad_sq"), gn = rec.column("gn_ratio");
        double needed = 0.0;
        for (std::size_t k = 0; k < R.size(); ++k) {
            const double w = Q[k] + Q[k] * Q[k] * Q[k];
            if (w > 0.0) needed = std::max(needed, (0.5 * grad[k] - R[k]) / w);
        }
        rec.metrics["coercivity_constant_needed"] = needed;
        rec.metrics["gn_ratio_sup"] = *std::max_element(gn.begin(), gn.end());
    } catch (const BlowUpError& e) {
        rec.failure = std::string("blow-up: ") + e.what();
        rec.metrics["blow_up_time"] = e.time();
        rec.verdicts["h1_bounded"] = false;
    }
    rec.wall_seconds = seconds_since(start);
    return rec;
}

std::vector<double> default_omegas() {
    std::vector<double> out{0.0};
    for (int k = 1; k <= 9; ++k) {
        out.push_back(-0.1 * k);
        out.push_back(0.1 * k);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::string omega_tag(double omega) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "w=%+.2f", omega);
    return buf;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

RunRecord omega_sweep(const SweepConfig& cfg) {
    const auto start = Clock::now();
    RunRecord rec;
    rec.kind = "sweep";
    rec.config = cfg.to_json();
    json spectrum = json::array(), sigma = json::array(), constrained = json::array(), splitting = json::array();

    for (double omega : cfg.omegas) {
        const std::string tag = omega_tag(omega);
        const bool zero = std::abs(omega) < 1e-12;
        const bool small = std::abs(omega) <= 0.5 + 1e-12;
        try {
            if (!(std::abs(omega) < 1.0)) throw DomainError("soliton frequency must satisfy |omega| < 1");
            const Grid grid = spectral_grid(omega);
            const double edge = 1.0 - omega * omega;
            if (cfg.spectra || cfg.splitting) {
                std::vector<EigenPair> plus, minus;
                for (Sign sg : {Sign::plus, Sign::minus}) {
                    const DiscreteOperator op = build_Lpm(omega, grid, sg);
                    auto eig = eigs_below_continuum(op);
                    const std::string name = sg == Sign::plus ? "L+" : "L-";
                    for (std::size_t k = 0; k < eig.size(); ++k)
                        spectrum.push_back({{"omega", omega}, {"operator", name}, {"index", k},
                                            {"eigenvalue", eig[k].value}, {"below_edge", eig[k].value < edge}});
                    (sg == Sign::plus ? plus : minus) = std::move(eig);
                }
                // with two isolated eigenvalues, one near 0 and the other carrying the sign
                auto check = [&](const std::vector<EigenPair>& eig, int expected_sign, const std::string& name,
                                 bool assert_it) {
                    const bool two = eig.size() == 2;
                    bool has_zero = false;
                    double other = 0.0;
                    if (two) {
                        const bool first_zero = std::abs(eig[0].value) < std::abs(eig[1].value);
                        has_zero = std::abs(eig[first_zero ? 0 : 1].value) < 1e-6;
                        other = eig[first_zero ? 1 : 0].value;
                    }
                    const bool sign_ok = zero ? std::abs(other) < 1e-6 : sign_of(other) == expected_sign;
                    const std::string key = tag + " " + name;
                    rec.metrics[key + " count"] = static_cast<double>(eig.size());
                    rec.metrics[key + " second"] = other;
                    if (assert_it) rec.verdicts[key + " two isolated, zero and signed"] = two && has_zero && sign_ok;
                };
                if (cfg.spectra) {
                    check(minus, sign_of(omega), "L-", true);
                    check(plus, -sign_of(omega), "L+", small);
                }
                if (cfg.splitting) {
                    const auto rows = splitting_probe({omega});
                    for (const auto& r : rows)
                        splitting.push_back({{"omega", r.omega}, {"plus_second", r.plus_second},
                                             {"minus_second", r.minus_second}, {"plus_count", r.plus_count},
                                             {"minus_count", r.minus_count}, {"edge", r.edge},
                                             {"splitting_integral", r.splitting_integral}});
                }
            }
            if (cfg.sigma && std::abs(omega) >= 0.1 - 1e-12) {
                for (Sign sg : {Sign::plus, Sign::minus}) {
                    const SigmaIndex s = sigma_index(omega, sg, grid);
                    const std::string name = sg == Sign::plus ? "plus" : "minus";
                    sigma.push_back({{"omega", omega}, {"sign", name}, {"sigma_numeric", s.numeric},
                                     {"sigma_path_b", s.path_b}, {"sigma_closed_form", s.closed_form}});
                    rec.verdicts[tag + " sigma " + name + " closed form"] = std::abs(s.numeric - s.closed_form) < 1e-3;
                }
            }
            if (cfg.constrained) {
                const double m = constrained_min_eig(omega, grid);
                constrained.push_back({{"omega", omega}, {"min_eig", m}});
                rec.metrics[tag + " constrained_min_eig"] = m;
                if (small) rec.verdicts[tag + " constrained positive"] = m > 0.0;
            }
        } catch (const std::exception& e) {
            rec.verdicts[tag + " completed"] = false;
            rec.metrics[tag + " failed"] = 1.0;
            rec.tables["errors"].push_back({{"omega", omega}, {"what", e.what()}});
        }
    }
    rec.tables["spectrum"] = spectrum;
    rec.tables["sigma"] = sigma;
    rec.tables["constrained"] = constrained;
    rec.tables["splitting"] = splitting;
    rec.wall_seconds = seconds_since(start);
    return rec;
}

}  // namespace mtm
