#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtm/grid_fields.hpp"

namespace mtm {

/// Distance from a state to the soliton orbit {e^{i alpha} (U, conj U)(x + beta)}.
struct OrbitalFit {
    double distance = 0.0;  ///< H^1 distance at the minimiser
    double alpha = 0.0;     ///< in (-pi, pi]
    double beta = 0.0;
};

/// Minimises over (alpha, beta). alpha is the phase of the H^1 overlap; beta
/// comes from an FFT correlation scan at stride dx, golden-section refinement to
/// 1e-6 and a Newton polish on |overlap|^2. Periodic grids only.
OrbitalFit orbital_distance(const FieldState& state, double omega);

/// Band-limited random field: the 16 lowest Fourier modes of a length-20
/// window with complex Gaussian coefficients, times exp(-x^2 / (2 * 4^2)),
/// normalised to unit H^1 norm over both components. Deterministic in `seed`.
FieldState random_perturbation(const Grid& grid, std::uint64_t seed);

/// Standard normal samples by Box-Muller on 53-bit uniforms from mt19937_64,
/// so the stream is identical across standard libraries.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed);
    double next();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// |x - x0| / scale with scale = max(|x0|, floor); `floor` keeps quantities
/// that vanish on the initial data (momentum of a standing wave) meaningful.
double relative_drift(double x, double x0, double floor);

/// Outcome of one experiment. Verdicts and metrics are pure functions of the
/// recorded series.
struct RunRecord {
    std::string kind;
    nlohmann::json config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> series;
    std::map<std::string, nlohmann::json> tables;
    std::map<std::string, bool> verdicts;
    std::map<std::string, double> metrics;
    std::string failure;       ///< empty unless the run aborted (blow-up, solver error)
    double wall_seconds = 0.0;

    bool passed() const;
    std::vector<double> column(const std::string& name) const;
    nlohmann::json to_json() const;
};

/// Stability constant: a run passes if sup_t distance <= kStabilityConstant * delta.
inline constexpr double kStabilityConstant = 10.0;
/// Distance floor used when delta = 0 (round-off of the time stepper).
inline constexpr double kStabilityFloor = 1e-8;

struct StabilityConfig {
    double omega = 0.3;
    double delta = 1e-3;
    double t_end = 50.0;
    std::uint64_t seed = 1;
    double half_length = 40.0;
    int points = 1024;
    double dt = 1e-3;
    int stride = 500;  ///< steps between samples of the distance

    nlohmann::json to_json() const;
};

RunRecord stability_experiment(const StabilityConfig& config);

/// Boundedness threshold: H^1(t) <= kBoundFactor * sup over the first tenth of the run.
inline constexpr double kBoundFactor = 2.0;

struct BoundConfig {
    double charge = 0.1;  ///< Q of the initial Gaussian data
    double t_end = 100.0;
    std::uint64_t seed = 1;
    double half_length = 100.0;
    int points = 2048;
    double dt = 2e-3;
    int stride = 500;

    nlohmann::json to_json() const;
};

/// Gaussian initial data u = A exp(-x^2/2) e^{i x / 2}, v = A exp(-(x - 1)^2/2) e^{i theta},
/// with theta drawn from `seed` and A fixed by the charge.
FieldState gaussian_data(const Grid& grid, double charge, std::uint64_t seed);

RunRecord h1_bound_experiment(const BoundConfig& config);

struct SweepConfig {
    std::vector<double> omegas;
    bool spectra = true;
    bool sigma = true;
    bool constrained = true;
    bool splitting = true;

    nlohmann::json to_json() const;
};

/// omega in {0, +-0.1, ..., +-0.9}.
std::vector<double> default_omegas();

/// Per-omega spectral checks. Failures at one omega are recorded and the sweep continues.
RunRecord omega_sweep(const SweepConfig& config);

}  // namespace mtm
