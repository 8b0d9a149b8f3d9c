#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mtm/grid_fields.hpp"

namespace mtm {

struct EvolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int snapshot_stride = 100;
    int splitting_order = 2;
    /// Keep the sampled states in the trajectory (diagnostics are always kept).
    bool keep_snapshots = true;

    /// ConfigurationError unless dt > 0, t_end >= 0, stride >= 1, order == 2.
    void validate() const;
};

/// One Strang step for a fixed (grid, dt): half nonlinear phase rotation,
/// exact linear Dirac flow per Fourier mode, half nonlinear rotation.
class StrangStepper {
public:
    StrangStepper(const Grid& grid, double dt);

    double dt() const noexcept { return dt_; }
    const Grid& grid() const noexcept { return grid_; }

    /// Advance in place by dt.
    void advance(FieldState& state) const;

private:
    void nonlinear(FieldState& state, double tau) const;
    void linear(FieldState& state) const;

    Grid grid_;
    double dt_;
    CVec diag_u_, diag_v_, off_;
};

/// Single step; builds the per-mode propagator each call. Use StrangStepper in loops.
FieldState step(const FieldState& state, double dt);

/// Named scalar evaluated at every snapshot. Must not mutate shared state.
struct Observer {
    std::string name;
    std::function<double(const FieldState&)> evaluate;
};

struct Diagnostics {
    std::vector<std::string> columns;        ///< "t" followed by observer names
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const;
};

struct Trajectory {
    std::vector<FieldState> snapshots;
    Diagnostics diagnostics;
    FieldState final_state;
};

/// Integrates to t_end (last step shortened if t_end is not a multiple of dt).
/// Snapshots and observers at t = 0, every `snapshot_stride` steps and at the end.
/// BlowUpError carries the time of the first non-finite sample.
Trajectory evolve(const FieldState& initial, const EvolverConfig& config,
                  const std::vector<Observer>& observers = {});

/// Observers for Q, P, H, R, Lambda (named "Q", "P", "H", "R", "Lambda").
std::vector<Observer> conserved_observers(double omega);

}  // namespace mtm
