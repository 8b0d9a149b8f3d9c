#include "mtm/evolver.hpp"

#include <cmath>

#include "fft.hpp"
#include "mtm/conserved.hpp"
#include "mtm/errors.hpp"

namespace mtm {

void EvolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigurationError("dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigurationError("t_end must be non-negative");
    if (snapshot_stride < 1) throw ConfigurationError("snapshot_stride must be >= 1");
    if (splitting_order != 2) throw ConfigurationError("only second-order (Strang) splitting is available");
}

StrangStepper::StrangStepper(const Grid& grid, double dt) : grid_(grid), dt_(dt) {
    if (!grid.periodic()) throw ConfigurationError("the split-step evolver needs a periodic grid");
    if (!std::isfinite(dt)) throw ConfigurationError("non-finite time step");
    const RVec k = grid.wavenumbers();
    const int n = grid.size();
    diag_u_.resize(n);
    diag_v_.resize(n);
    off_.resize(n);
    // exp(i dt M), M = [[-k, 1], [1, k]], M^2 = (1 + k^2) I.
    for (int j = 0; j < n; ++j) {
        const double w = std::sqrt(1.0 + k[j] * k[j]);
        const double c = std::cos(w * dt), s = std::sin(w * dt) / w;
        diag_u_[j] = {c, -s * k[j]};
        diag_v_[j] = {c, s * k[j]};
        off_[j] = {0.0, s};
    }
}

void StrangStepper::nonlinear(FieldState& state, double tau) const {
    for (Eigen::Index j = 0; j < state.u.size(); ++j) {
        const double au = std::norm(state.u[j]), av = std::norm(state.v[j]);
        state.u[j] *= std::polar(1.0, -2.0 * av * tau);
        state.v[j] *= std::polar(1.0, -2.0 * au * tau);
    }
}

void StrangStepper::linear(FieldState& state) const {
    CVec uh = detail::fft_forward(state.u);
    CVec vh = detail::fft_forward(state.v);
    for (Eigen::Index j = 0; j < uh.size(); ++j) {
        const cplx a = uh[j], b = vh[j];
        uh[j] = diag_u_[j] * a + off_[j] * b;
        vh[j] = off_[j] * a + diag_v_[j] * b;
    }
    detail::fft_inverse(uh, state.u);
    detail::fft_inverse(vh, state.v);
}

void StrangStepper::advance(FieldState& state) const {
    if (!(state.grid == grid_)) throw ArgumentError("stepper grid does not match the state grid");
    nonlinear(state, 0.5 * dt_);
    linear(state);
    nonlinear(state, 0.5 * dt_);
    state.t += dt_;
}

FieldState step(const FieldState& state, double dt) {
    state.validate();
    FieldState out = state;
    StrangStepper(state.grid, dt).advance(out);
    return out;
}

std::vector<double> Diagnostics::column(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] != name) continue;
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
    }
    throw ArgumentError("no diagnostics column named '" + name + "'");
}

Trajectory evolve(const FieldState& initial, const EvolverConfig& config,
                  const std::vector<Observer>& observers) {
    config.validate();
    initial.validate();
    if (!initial.grid.periodic()) throw ConfigurationError("the split-step evolver needs a periodic grid");

    Trajectory traj{{}, {}, initial};
    traj.diagnostics.columns.push_back("t");
    for (const auto& o : observers) traj.diagnostics.columns.push_back(o.name);

    auto record = [&](const FieldState& s) {
        std::vector<double> row{s.t};
        for (const auto& o : observers) row.push_back(o.evaluate(s));
        traj.diagnostics.rows.push_back(std::move(row));
        if (config.keep_snapshots) traj.snapshots.push_back(s);
    };

    const double t0 = initial.t;
    long long steps = static_cast<long long>(std::ceil(config.t_end / config.dt - 1e-9));
    if (steps < 0) steps = 0;
    const double last_dt = config.t_end - (steps - 1) * config.dt;

    FieldState state = initial;
    record(state);
    const StrangStepper stepper(initial.grid, config.dt);
    for (long long n = 1; n <= steps; ++n) {
        if (n == steps && std::abs(last_dt - config.dt) > 1e-14 * config.dt) {
            StrangStepper(initial.grid, last_dt).advance(state);
            state.t = t0 + config.t_end;
        } else {
            stepper.advance(state);
            state.t = t0 + n * config.dt;
        }
        if (!state.u.allFinite() || !state.v.allFinite())
            throw BlowUpError("non-finite field during evolution", state.t);
        if (n % config.snapshot_stride == 0 || n == steps) record(state);
    }
    traj.final_state = state;
    return traj;
}

std::vector<Observer> conserved_observers(double omega) {
    return {
        {"Q", [](const FieldState& s) { return charge(s); }},
        {"P", [](const FieldState& s) { return momentum(s); }},
        {"H", [](const FieldState& s) { return hamiltonian(s); }},
        {"R", [](const FieldState& s) { return higher_charge(s); }},
        {"Lambda", [omega](const FieldState& s) { return lyapunov(s, omega); }},
    };
}

}  // namespace mtm
