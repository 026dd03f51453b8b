#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "poscade/certify.hpp"
#include "poscade/sim.hpp"

namespace poscade {

/// Raised for unknown presets, schema violations and invariant failures at
/// load time; messages carry the offending field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ReferenceSpec {
    std::string kind = "tanh_squared";  // tanh_squared | sinusoid
    double amplitude = 200.0;
    double rate = 0.15;
    double offset = 0.0;
    int max_order = 6;

    ReferenceTrajectory build() const;
};

struct DelayEstimateSpec {
    double gamma_hat = 1.0;
    double k_d_hat = 1.0;
    double tau_tilde_bar = 3.0;
};

/// One fully described experiment: plant, input nonlinearities, controller,
/// reference, numerics and analysis constants.
struct ScenarioConfig {
    std::string name = "custom";
    int n = 3;
    std::vector<double> d;
    SaturationParams saturation;
    DelayLaw delay;
    DelayEstimateSpec estimate;
    ControllerGains gains;
    bool controller_enabled = true;
    ReferenceSpec reference;
    std::vector<double> x0;
    SimConfig sim;
    AnalysisParams analysis;  // tau_hat is derived from the estimate at build time
    double settling_band = 20.0;

    SystemSetup build_setup() const;
    AnalysisParams build_analysis() const;  // with tau_hat/tau_tilde_bar/phi2 filled in
    void validate() const;
};

std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
ScenarioConfig preset(const std::string& name);

/// Loads a preset by name or a config file by path. File contents are a
/// JSON tree; // comments are allowed.
ScenarioConfig parse_config(const std::string& path_or_preset);
ScenarioConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ScenarioConfig& cfg);

/// Applies one `dotted.path=value` override; the value is parsed as JSON
/// when possible, otherwise taken as a string.
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

/// FNV-1a over the canonical serialized form, for run provenance.
std::uint64_t config_hash(const ScenarioConfig& cfg);

/// Trajectory CSV: a fixed header naming every column, one row per recorded
/// step, values with 12 significant digits.
std::string trajectory_csv(const Trajectory& traj);
void write_csv(const Trajectory& traj, const std::string& path);

struct RunOutputs {
    Trajectory trajectory;
    Certificate certificate;
    std::string trajectory_path;
    std::string summary_path;
    std::string certificate_path;
};

std::string summary_json_text(const ScenarioConfig& cfg, const Trajectory& traj,
                              const Certificate& cert);
std::string certificate_json_text(const ScenarioConfig& cfg, const Certificate& cert);

/// Executes the scenario, evaluates the monitor and metrics, issues the
/// certificate and writes `<name>_trajectory.csv`, `<name>_summary.json`
/// and `<name>_certificate.json` under `out_dir`.
RunOutputs run_command(const ScenarioConfig& cfg, const std::string& out_dir);

/// Empirical bound estimates from a finished run: c1 as the largest
/// reference-side residual and m as the largest second difference of the
/// reconstructed u_dot away from switch samples.
double estimate_c1(const ScenarioConfig& cfg, const Trajectory& traj);
double estimate_m(const ScenarioConfig& cfg, const Trajectory& traj);

}  // namespace poscade
