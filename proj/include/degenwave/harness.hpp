#pragma once

#include "degenwave/growth.hpp"
#include "degenwave/linop.hpp"
#include "degenwave/phase.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace degenwave {

// Flat key-value run description. Text form (TOML subset):
//   # comment
//   gamma = "power:1"
//   lambda0 = [32, 64, 128, 256]
//   params.delta0 = 0.009
struct ExperimentConfig {
    std::string gamma = "power:1";
    std::string upsilon;  // empty: non-dissipative
    std::string shear = "cos:1";
    double kappa = 0.0;
    std::vector<double> lambda0{32.0};
    double M = 4.0;
    double s = 1.0;
    double s_prime = 1.0;
    double sigma = 0.1;                       // sigma0 of the asymptotic parameters
    std::map<std::string, double> overrides;  // params.<name>
    std::string eps_mode = "fixed";           // params.eps_mode: fixed | theory
    std::string window = "span:0.85,1.75";
    std::size_t resolution = 0;               // 0: smallest power of two passing the resolution check
    std::size_t max_resolution = 65536;
    std::size_t snapshots = 0;                // packet samples on [0, t_star]; 0: max(256, 8 lambda0)
    std::size_t max_snapshots = 8192;
    std::size_t rays = 257;
    std::string scheme = "rk4";
    double cfl_safety = 0.5;
    double energy_factor = 1.5;               // C-hat / probed commutator norm
    std::uint64_t seed = 1;
    std::string output;                       // empty: nothing is written
    bool write_snapshots = false;
    std::size_t toy_points = 2049;
    std::size_t toy_samples = 17;
    double toy_T = 0.0;                       // toy horizon; 0: travel time of the peak to M lambda0

    // Throws parse errors naming the offending key.
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    // Applies one key = value assignment (value in config syntax).
    void set(const std::string& key, const std::string& value);
    // Throws parse or configuration errors for invalid specs and orderings.
    void validate() const;
    AsymptoticParameters parameters() const;
    std::string str() const;
};

struct Verdict {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct RayDiagnostics {
    double max_abs_h = 0.0;
    double hamiltonian_drift = 0.0;  // max relative |p(t) - p(0)| over rays
    double sandwich_min = 0.0;       // min Xi / lambda(t) over rays and t <= t_M
    double sandwich_max = 0.0;       // max Xi / lambda(t)
    double position_min = 0.0;       // min X(t) gamma(lambda(t)) / (X(0) gamma(lambda0))
    double position_max = 0.0;
    double position_factor = 0.0;    // 2^{beta0 + 1}
    std::size_t samples = 0;         // fan samples with t <= t_M
};

RayDiagnostics ray_diagnostics(const Symbol& gamma, const PhaseField& fan, double t_M);

inline constexpr double kToyDriftTolerance = 1e-6;
inline constexpr double kSteadyHTolerance = 1e-6;
inline constexpr double kHamiltonianTolerance = 1e-8;
inline constexpr double kSandwichSlack = 1e-9;

// Sandwich always; |h|, Hamiltonian drift and position bounds on steady shears.
bool ray_checks_pass(const RayDiagnostics& d, bool steady);

struct PointReport {
    double lambda0 = 0.0;
    GrowthPlan plan;
    std::string window;
    std::size_t resolution = 0;
    std::size_t snapshots = 0;
    std::size_t rays = 0;
    double omega = 0.0;  // demodulation carrier lambda0 E
    RayDiagnostics ray;
    std::vector<double> lambda_t;
    std::vector<double> mu;
    std::vector<double> l2_budget;
    ResidualReport residual;
    CommutatorProbe probe;
    DualityReport duality;
    double growth_threshold = 0.0;  // 0.25 M^{s'} (gamma ratio)^{1/2}
    double degeneration_t = 0.0;
    double degeneration_ratio = 0.0;  // ||main(t_M)||_{H^-1} / ||main(0)||_{H^-1}
    double degeneration_bound = 0.0;  // M^{-1/2}
    std::vector<Verdict> verdicts;
    double seconds = 0.0;

    bool pass() const;
};

struct SweepReport {
    ExperimentConfig config;
    std::vector<PointReport> points;
    double residual_slope = 0.0;  // least-squares slope of log residual integral against log lambda0
    std::vector<Verdict> verdicts;
    double seconds = 0.0;

    bool pass() const;
};

// Pipeline for one lambda0: plan, phase, amplitude, packets, evolution, diagnostics.
// Module errors are rethrown with the stage name prefixed.
PointReport run_point(const ExperimentConfig& config, double lambda0);

// All points of the config (in parallel) plus the sweep verdicts; writes report.json,
// timing.json and per-point series.csv under config.output when set.
SweepReport run(const ExperimentConfig& config);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// JSON documents. Reports exclude wall-clock times, which go to timing_json.
std::string report_json(const SweepReport& report);
std::string timing_json(const SweepReport& report);
// Documents carry a top-level "pass" flag; plan_json also echoes the config so that
// config_from_plan_json restores it.
std::string plan_json(const ExperimentConfig& config);
ExperimentConfig config_from_plan_json(const std::string& text);
std::string toy_json(const ExperimentConfig& config);
// Columns lambda0, t, xi_peak, l2, hs, ratio.
std::string toy_csv(const ExperimentConfig& config);
// Fan diagnostics per lambda0; writes rays.csv (mid ray) under config.output when set.
std::string phase_json(const ExperimentConfig& config);
// Packet statistics at t = 0 and t_star; writes snapshot files under config.output when set.
std::string packet_json(const ExperimentConfig& config);
std::string validate_symbol_json(const std::string& spec);

// CSV of the recorded time series of one point.
std::string series_csv(const PointReport& point);

}  // namespace degenwave
