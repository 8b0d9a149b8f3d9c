// Command-line front end: soliton dumps, evolutions, spectral tables and the
// stability / H^1-bound experiments. Writes record.json plus CSV tables into --out.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtm/conserved.hpp"
#include "mtm/errors.hpp"
#include "mtm/evolver.hpp"
#include "mtm/experiments.hpp"
#include "mtm/scattering.hpp"
#include "mtm/soliton.hpp"
#include "mtm/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mtm;

namespace {

// JSON config files for CLI11: top-level keys are global flags, a nested
// object named after a subcommand holds that subcommand's options.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        json j;
        for (const CLI::Option* opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& r = opt->results();
                j[name] = r.size() == 1 ? json(r.front()) : json(r);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        return j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
        std::vector<CLI::ConfigItem> items;
        collect(j, {}, items);
        return items;
    }

private:
    static std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

    static void collect(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto p = parents;
                p.push_back(key);
                collect(value, p, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array())
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            else
                item.inputs.push_back(scalar(value));
            out.push_back(std::move(item));
        }
    }
};

struct Globals {
    std::optional<double> omega, half_length, dt, t_end;
    std::optional<int> points;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
};

Grid grid_or(const Globals& g, double half_length, int points) {
    return Grid(g.half_length.value_or(half_length), g.points.value_or(points));
}

fs::path prepare(const Globals& g) {
    const fs::path dir(g.out);
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_file(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw ArgumentError("cannot write " + path.string());
    return f;
}

void write_series_csv(const fs::path& path, const RunRecord& r) {
    std::ofstream f = open_file(path);
    f.precision(17);
    for (std::size_t k = 0; k < r.columns.size(); ++k) f << (k ? "," : "") << r.columns[k];
    f << '\n';
    for (const auto& row : r.series) {
        for (std::size_t k = 0; k < row.size(); ++k) f << (k ? "," : "") << row[k];
        f << '\n';
    }
}

void write_table_csv(const fs::path& path, const json& rows) {
    std::ofstream f = open_file(path);
    f.precision(17);
    if (!rows.is_array() || rows.empty()) return;
    std::vector<std::string> keys;
    for (const auto& [k, v] : rows.front().items()) keys.push_back(k);
    for (std::size_t k = 0; k < keys.size(); ++k) f << (k ? "," : "") << keys[k];
    f << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < keys.size(); ++k) {
            const json& v = row.at(keys[k]);
            f << (k ? "," : "");
            if (v.is_string()) f << v.get<std::string>();
            else if (v.is_boolean()) f << (v.get<bool>() ? 1 : 0);
            else f << v.get<double>();
        }
        f << '\n';
    }
}

// spectral tables of a sweep in the fixed CSV layouts
void write_sweep_tables(const fs::path& dir, const RunRecord& r) {
    std::vector<SpectrumRow> spec;
    for (const auto& row : r.tables.at("spectrum"))
        spec.push_back({row.at("omega"), row.at("operator"), row.at("index"), row.at("eigenvalue"), row.at("below_edge")});
    std::vector<SigmaRow> sig;
    for (const auto& row : r.tables.at("sigma"))
        sig.push_back({row.at("omega"), row.at("sign") == "plus" ? Sign::plus : Sign::minus, row.at("sigma_numeric"),
                       row.at("sigma_closed_form")});
    if (!spec.empty()) {
        std::ofstream f = open_file(dir / "spectrum.csv");
        write_spectrum_csv(f, spec);
    }
    if (!sig.empty()) {
        std::ofstream f = open_file(dir / "sigma.csv");
        write_sigma_csv(f, sig);
    }
    for (const char* name : {"constrained", "splitting", "errors"})
        if (r.tables.count(name) && !r.tables.at(name).empty())
            write_table_csv(dir / (std::string(name) + ".csv"), r.tables.at(name));
}

int finish(const fs::path& dir, const RunRecord& r) {
    std::ofstream f = open_file(dir / "record.json");
    f << r.to_json().dump(2) << '\n';
    std::cout << r.kind << ": " << (r.passed() ? "pass" : "FAIL");
    if (!r.failure.empty()) std::cout << " (" << r.failure << ")";
    if (r.failure.empty() && r.verdicts.empty()) std::cout << " (no checks apply to this configuration)";
    std::cout << "  [" << dir.string() << "/record.json]\n";
    for (const auto& [name, ok] : r.verdicts)
        if (!ok) std::cout << "  failed: " << name << '\n';
    return r.passed() ? 0 : 1;
}

json globals_json(const Globals& g) {
    json j;
    if (g.omega) j["omega"] = *g.omega;
    if (g.half_length) j["grid_L"] = *g.half_length;
    if (g.points) j["grid_N"] = *g.points;
    if (g.dt) j["dt"] = *g.dt;
    if (g.t_end) j["t_end"] = *g.t_end;
    if (g.seed) j["seed"] = *g.seed;
    return j;
}

int run_soliton(const Globals& g, double speed) {
    const double omega = g.omega.value_or(0.5);
    const Grid grid = grid_or(g, 40.0, 1024);
    const FieldState s = eval_soliton(SolitonParams{omega, speed}, grid);
    const fs::path dir = prepare(g);
    {
        std::ofstream f = open_file(dir / "field.csv");
        write_field_csv(f, s);
    }
    RunRecord r;
    r.kind = "soliton";
    r.config = globals_json(g);
    r.config["speed"] = speed;
    const ConservedSet c = conserved_set(s);
    r.metrics = {{"Q", c.Q}, {"P", c.P}, {"H", c.H}, {"R", c.R}};
    if (speed == 0.0) {
        const CVec U = eval_profile(omega, grid);
        r.metrics["residual_first_order"] = residual_first_order(U, omega, grid);
        r.metrics["residual_second_order"] = residual_second_order(U, U.conjugate(), 1.0 - omega * omega, grid);
        r.verdicts["charge_closed_form"] = std::abs(c.Q - 2.0 * std::acos(omega)) < 1e-8;
    }
    return finish(dir, r);
}

FieldState perturbed(const Globals& g, const Grid& grid, double delta) {
    FieldState s = eval_soliton(SolitonParams{g.omega.value_or(0.5)}, grid);
    if (delta > 0.0) {
        const FieldState w = random_perturbation(grid, g.seed.value_or(1));
        s.u += delta * w.u;
        s.v += delta * w.v;
    }
    return s;
}

int run_evolve(const Globals& g, double delta, int stride, const std::string& input) {
    const double omega = g.omega.value_or(0.5);
    FieldState init = FieldState::zero(Grid(1.0, 8));
    if (!input.empty()) {
        std::ifstream f(input);
        if (!f) throw ArgumentError("cannot read " + input);
        init = read_field_csv(f);
    } else {
        init = perturbed(g, grid_or(g, 40.0, 1024), delta);
    }
    EvolverConfig c;
    c.dt = g.dt.value_or(1e-3);
    c.t_end = g.t_end.value_or(10.0);
    c.snapshot_stride = stride;
    c.keep_snapshots = false;
    RunRecord r;
    r.kind = "evolve";
    r.config = globals_json(g);
    r.config["delta"] = delta;
    r.config["input"] = input;
    const fs::path dir = prepare(g);
    try {
        const Trajectory tr = evolve(init, c, conserved_observers(omega));
        r.columns = tr.diagnostics.columns;
        r.series = tr.diagnostics.rows;
        const auto Q = r.column("Q");
        for (const char* name : {"Q", "P", "H", "R"}) {
            const auto x = r.column(name);
            double d = 0.0;
            for (double v : x) d = std::max(d, relative_drift(v, x.front(), Q.front()));
            r.metrics[std::string("drift_") + name] = d;
        }
        r.verdicts["charge_conserved"] = r.metrics["drift_Q"] < 1e-10;
        std::ofstream f = open_file(dir / "field_final.csv");
        write_field_csv(f, tr.final_state);
    } catch (const BlowUpError& e) {
        r.failure = e.what();
        r.metrics["blow_up_time"] = e.time();
    }
    write_series_csv(dir / "conserved.csv", r);
    return finish(dir, r);
}

int run_conserved(const Globals& g, const std::string& input) {
    const double omega = g.omega.value_or(0.5);
    FieldState s = FieldState::zero(Grid(1.0, 8));
    if (!input.empty()) {
        std::ifstream f(input);
        if (!f) throw ArgumentError("cannot read " + input);
        s = read_field_csv(f);
    } else {
        s = eval_soliton(SolitonParams{omega}, grid_or(g, 40.0, 1024));
    }
    const fs::path dir = prepare(g);
    ConservedSet c = conserved_set(s);
    c.t = s.t;
    {
        std::ofstream f = open_file(dir / "conserved.csv");
        write_conserved_csv(f, {c}, omega);
    }
    RunRecord r;
    r.kind = "conserved";
    r.config = globals_json(g);
    r.config["input"] = input;
    r.metrics = {{"Q", c.Q}, {"P", c.P}, {"H", c.H}, {"R", c.R}, {"Lambda", lyapunov(s, omega)}};
    if (s.grid.periodic()) {
        const HierarchyReport h = hierarchy_relations(s);
        r.metrics["hierarchy_defect"] = h.max();
        r.verdicts["hierarchy_relations"] = h.max() < 1e-6;
    }
    return finish(dir, r);
}

int run_sweep(const Globals& g, const std::string& kind, std::vector<double> omegas) {
    SweepConfig c;
    if (omegas.empty()) omegas = g.omega ? std::vector<double>{*g.omega} : default_omegas();
    c.omegas = omegas;
    c.spectra = kind != "sigma";
    c.sigma = kind != "spectrum";
    c.constrained = kind == "sweep";
    c.splitting = kind == "sweep";
    RunRecord r = omega_sweep(c);
    r.kind = kind;
    const fs::path dir = prepare(g);
    write_sweep_tables(dir, r);
    return finish(dir, r);
}

int run_stability(const Globals& g, double delta, int stride) {
    StabilityConfig c;
    c.omega = g.omega.value_or(c.omega);
    c.delta = delta;
    c.t_end = g.t_end.value_or(c.t_end);
    c.seed = g.seed.value_or(c.seed);
    c.half_length = g.half_length.value_or(c.half_length);
    c.points = g.points.value_or(c.points);
    c.dt = g.dt.value_or(c.dt);
    c.stride = stride;
    const RunRecord r = stability_experiment(c);
    const fs::path dir = prepare(g);
    write_series_csv(dir / "series.csv", r);
    return finish(dir, r);
}

int run_h1bound(const Globals& g, double charge_value, int stride) {
    BoundConfig c;
    c.charge = charge_value;
    c.t_end = g.t_end.value_or(c.t_end);
    c.seed = g.seed.value_or(c.seed);
    c.half_length = g.half_length.value_or(c.half_length);
    c.points = g.points.value_or(c.points);
    c.dt = g.dt.value_or(c.dt);
    c.stride = stride;
    const RunRecord r = h1_bound_experiment(c);
    const fs::path dir = prepare(g);
    write_series_csv(dir / "series.csv", r);
    return finish(dir, r);
}

int run_scatter(const Globals& g, std::vector<double> lambdas, double delta, double every) {
    if (lambdas.empty()) lambdas = {0.5, 0.8, 1.25};
    const Grid grid = grid_or(g, 40.0, 1024);
    FieldState s = perturbed(g, grid, delta);
    const double dt = g.dt.value_or(1e-3), t_end = g.t_end.value_or(10.0);
    const StrangStepper stepper(grid, dt);
    const long long per_sample = std::max(1LL, std::llround(every / dt));
    const long long total = std::llround(t_end / dt);

    RunRecord r;
    r.kind = "scatter";
    r.config = globals_json(g);
    r.config["lambdas"] = lambdas;
    r.config["delta"] = delta;
    std::vector<LogASample> rows;
    std::vector<cplx> start;
    double drift = 0.0;
    auto sample = [&] {
        for (std::size_t k = 0; k < lambdas.size(); ++k) {
            const cplx la = riccati_solve(s, lambdas[k]).log_a;
            if (start.size() < lambdas.size()) start.push_back(la);
            drift = std::max(drift, std::abs(la - start[k]));
            rows.push_back({lambdas[k], s.t, la});
        }
    };
    sample();
    for (long long n = 1; n <= total; ++n) {
        stepper.advance(s);
        if (n % per_sample == 0 || n == total) sample();
    }
    r.metrics["log_a_drift"] = drift;
    r.verdicts["log_a_invariant"] = drift < 1e-5;
    const fs::path dir = prepare(g);
    {
        std::ofstream f = open_file(dir / "log_a.csv");
        write_log_a_csv(f, rows);
    }
    return finish(dir, r);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Massive Thirring model solitons: evolution, conserved quantities and spectral stability"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file with option values; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--omega", g.omega, "soliton frequency, |omega| < 1");
    app.add_option("--grid-L", g.half_length, "half-length of the periodic domain")->check(CLI::PositiveNumber);
    app.add_option("--grid-N", g.points, "number of grid points")->check(CLI::PositiveNumber);
    app.add_option("--dt", g.dt, "time step")->check(CLI::PositiveNumber);
    app.add_option("--t-end", g.t_end, "final time")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", g.seed, "seed of the random perturbation");
    app.add_option("--out", g.out, "output directory")->capture_default_str();

    double speed = 0.0, delta = 1e-2, stab_delta = 1e-3, charge_value = 0.1, every = 1.0;
    int stride = 100, stab_stride = 500, bound_stride = 500;
    std::string input;
    std::vector<double> omegas, lambdas;

    auto* soliton = app.add_subcommand("soliton", "dump the soliton profile and its conserved quantities");
    soliton->add_option("--speed", speed, "boost velocity, |c| < 1");
    auto* evolve_cmd = app.add_subcommand("evolve", "evolve a perturbed soliton (or a field file) and track Q, P, H, R");
    evolve_cmd->add_option("--delta", delta, "H^1 size of the random perturbation")->capture_default_str();
    evolve_cmd->add_option("--stride", stride, "steps between diagnostic rows")->capture_default_str();
    evolve_cmd->add_option("--input", input, "field CSV to evolve instead of the soliton");
    auto* conserved_cmd = app.add_subcommand("conserved", "conserved quantities of the soliton or a field file");
    conserved_cmd->add_option("--input", input, "field CSV");
    auto* spectrum = app.add_subcommand("spectrum", "isolated eigenvalues of the reduced operators");
    spectrum->add_option("--omegas", omegas, "frequencies (default: --omega, else the standard grid)");
    auto* sigma = app.add_subcommand("sigma", "sigma indices against their closed forms");
    sigma->add_option("--omegas", omegas, "frequencies");
    auto* sweep = app.add_subcommand("sweep", "spectra, sigma indices, constrained minimum and splitting across omega");
    sweep->add_option("--omegas", omegas, "frequencies (default 0, +-0.1, ..., +-0.9)");
    auto* stability = app.add_subcommand("stability", "orbital distance of a perturbed soliton over time");
    stability->add_option("--delta", stab_delta, "H^1 size of the perturbation")->capture_default_str();
    stability->add_option("--stride", stab_stride, "steps between distance samples")->capture_default_str();
    auto* h1bound = app.add_subcommand("h1bound", "H^1 norm of small-charge Gaussian data over time");
    h1bound->add_option("--charge", charge_value, "charge Q of the initial data")->capture_default_str();
    h1bound->add_option("--stride", bound_stride, "steps between samples")->capture_default_str();
    auto* scatter = app.add_subcommand("scatter", "log a(lambda) along an evolution");
    scatter->add_option("--lambdas", lambdas, "spectral parameters (default 0.5 0.8 1.25)");
    scatter->add_option("--delta", delta, "H^1 size of the random perturbation")->capture_default_str();
    scatter->add_option("--every", every, "time between samples")->capture_default_str();
    for (auto* sub : app.get_subcommands({})) sub->configurable();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*soliton) return run_soliton(g, speed);
        if (*evolve_cmd) return run_evolve(g, delta, stride, input);
        if (*conserved_cmd) return run_conserved(g, input);
        if (*spectrum) return run_sweep(g, "spectrum", omegas);
        if (*sigma) return run_sweep(g, "sigma", omegas);
        if (*sweep) return run_sweep(g, "sweep", omegas);
        if (*stability) return run_stability(g, stab_delta, stab_stride);
        if (*h1bound) return run_h1bound(g, charge_value, bound_stride);
        if (*scatter) return run_scatter(g, lambdas, delta, every);
    } catch (const mtm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
