#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "poscade/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

poscade::ScenarioConfig load(const std::string& source, const std::vector<std::string>& sets) {
    poscade::ScenarioConfig cfg = poscade::parse_config(source);
    for (const std::string& s : sets) poscade::apply_override(cfg, s);
    return cfg;
}

int cmd_run(const std::string& source, const std::string& out_dir,
            const std::vector<std::string>& sets) {
    const poscade::ScenarioConfig cfg = load(source, sets);
    const poscade::RunOutputs out = poscade::run_command(cfg, out_dir);
    const poscade::Metrics& m = out.trajectory.metrics;
    std::printf("%s: %zu rows -> %s\n", cfg.name.c_str(), out.trajectory.rows.size(),
                out.trajectory_path.c_str());
    std::printf("  ISE %.6g  ultimate band %.6g  settling %.6g\n", m.ise, m.ultimate_band,
                m.settling_time);
    std::printf("  switches %ld (rising %ld)  clamps %ld  positivity clamps %ld\n",
                m.switch_count, m.rising_edges, m.clamp_events, m.positivity_clamps);
    std::printf("  certificate: %s (sigma %.6g, delta %.6g)\n",
                out.certificate.feasible ? "feasible" : "infeasible", out.certificate.sigma,
                out.certificate.delta);
    std::printf("  summary %s\n  certificate %s\n", out.summary_path.c_str(),
                out.certificate_path.c_str());
    return 0;
}

int cmd_certify(const std::string& source, const std::vector<std::string>& sets, bool search) {
    const poscade::ScenarioConfig cfg = load(source, sets);
    if (cfg.sim.enable_delay) cfg.delay.validate_slew(cfg.d.back());
    const poscade::Certificate cert = poscade::make_certificate(cfg.gains, cfg.build_analysis());
    std::cout << poscade::certificate_json_text(cfg, cert);
    if (search) {
        poscade::SearchFixed fixed;
        fixed.tau_hat = cert.params.tau_hat;
        fixed.phi2 = cert.params.phi2;
        fixed.omega2 = cfg.analysis.omega2;
        fixed.c1 = cfg.analysis.c1;
        fixed.m = cfg.analysis.m;
        fixed.psi = cfg.analysis.psi;
        const poscade::SearchOutcome out = poscade::feasibility_search(cfg.gains, fixed);
        if (out.feasible) {
            std::printf("search: feasible, delta %.6g at eps1=%.6g eps2=%.6g omega1=%.6g "
                        "omega3=%.6g tau_tilde_bar=%.6g\n",
                        out.best.delta, out.best.params.eps1, out.best.params.eps2,
                        out.best.params.omega1, out.best.params.omega3,
                        out.best.params.tau_tilde_bar);
        } else {
            std::printf("search: infeasible, blocking condition '%s' (tightest margin %.6g)\n",
                        out.blocking_name.c_str(), out.blocking_margin);
        }
    }
    return 0;
}

int cmd_presets() {
    for (const std::string& name : poscade::preset_names()) {
        const poscade::ScenarioConfig c = poscade::preset(name);
        std::printf("%-8s  ref %s(%g, %g)+%g  sat %s  delay %s (gamma %g)  gamma_hat %g\n",
                    name.c_str(), c.reference.kind.c_str(), c.reference.amplitude,
                    c.reference.rate, c.reference.offset,
                    c.sim.enable_saturation ? "on" : "off", c.sim.enable_delay ? "on" : "off",
                    c.delay.gamma, c.estimate.gamma_hat);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Positive-cascade tracking under state-dependent input lag and saturation"};
    app.require_subcommand(1);

    std::string source;
    std::string out_dir = ".";
    std::vector<std::string> sets;
    bool search = false;

    CLI::App* run = app.add_subcommand("run", "simulate a scenario and write its outputs");
    run->add_option("scenario", source, "preset name or config file")->required();
    run->add_option("--out", out_dir, "output directory (default .)");
    run->add_option("--set", sets, "override config fields, key.path=value");

    CLI::App* certify = app.add_subcommand("certify", "evaluate the gain conditions");
    certify->add_option("scenario", source, "preset name or config file")->required();
    certify->add_option("--set", sets, "override config fields, key.path=value");
    certify->add_flag("--search", search, "also run the feasibility search");

    app.add_subcommand("presets", "list the built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(source, out_dir, sets);
        if (certify->parsed()) return cmd_certify(source, sets, search);
        return cmd_presets();
    } catch (const poscade::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
