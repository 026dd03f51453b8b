#include "poscade/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace poscade {

using nlohmann::json;

ReferenceTrajectory ReferenceSpec::build() const {
    if (kind == "tanh_squared") return ReferenceTrajectory::tanh_squared(amplitude, rate, max_order);
    if (kind == "sinusoid") return ReferenceTrajectory::sinusoid(amplitude, rate, offset, max_order);
    throw ConfigError("reference.kind must be one of tanh_squared | sinusoid, got '" + kind + "'");
}

SystemSetup ScenarioConfig::build_setup() const {
    SystemSetup s;
    s.plant.n = n;
    s.plant.d = d;
    s.saturation = saturation;
    s.delay = delay;
    s.gains = gains;
    s.controller_enabled = controller_enabled;
    s.x0 = x0;
    if (x0.empty() || !(x0.back() > 0.0))
        throw ConfigError("x0[n-1] must be > 0 so the delay estimate is defined");
    s.estimate = DelayEstimate::from_initial_state(estimate.gamma_hat, estimate.k_d_hat,
                                                   x0.back(), estimate.tau_tilde_bar);
    return s;
}

AnalysisParams ScenarioConfig::build_analysis() const {
    AnalysisParams a = analysis;
    a.phi2 = delay.phi2;
    a.tau_hat = DelayEstimate::from_initial_state(estimate.gamma_hat, estimate.k_d_hat,
                                                  x0.back(), estimate.tau_tilde_bar)
                    .tau_hat;
    a.tau_tilde_bar = estimate.tau_tilde_bar;
    return a;
}

void ScenarioConfig::validate() const {
    try {
        SystemSetup s = build_setup();
        SimConfig sc = sim;
        sc.lk = LkWeights{analysis.omega1, analysis.omega2, analysis.omega3};
        sc.psi_tripwire = analysis.psi;
        validate_setup(s, sc);
        if (reference.max_order < n + 1)
            throw ConfigError("reference.max_order must be >= n+1");
        reference.build();
        build_analysis().validate();
        if (!(settling_band >= 0.0)) throw ConfigError("metrics.settling_band must be >= 0");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

namespace {

ScenarioConfig base_case1() {
    ScenarioConfig c;
    c.n = 3;
    c.d = {1.1311, 1.1362, 0.2727};
    c.saturation = SaturationParams{50.0, 0.0224, 75.0};
    c.delay = DelayLaw{4.48, 0.322, 1e-3, 4.0};
    c.estimate = DelayEstimateSpec{1.0, 1.0, 3.0};
    c.gains = ControllerGains{0.15, 0.1, 5.0};
    c.reference = ReferenceSpec{"tanh_squared", 200.0, 0.15, 0.0, 6};
    c.x0 = {500.0, 50.0, 5.0};
    c.sim.dt = 0.01;
    c.sim.t_end = 100.0;
    c.sim.record_stride = 10;
    c.sim.monitor_enabled = true;
    c.analysis = AnalysisParams{};
    c.sim.lk = LkWeights{c.analysis.omega1, c.analysis.omega2, c.analysis.omega3};
    c.sim.psi_tripwire = c.analysis.psi;
    c.settling_band = 20.0;
    return c;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"case1_1", "case1_2", "case1_3", "case1_4", "case2"};
}

bool is_preset(const std::string& name) {
    for (const std::string& p : preset_names())
        if (p == name) return true;
    return false;
}

ScenarioConfig preset(const std::string& name) {
    if (name == "case1_1") {
        ScenarioConfig c = base_case1();
        c.name = name;
        return c;
    }
    if (name == "case1_2") {
        // same run without the input nonlinearities
        ScenarioConfig c = base_case1();
        c.name = name;
        c.sim.enable_saturation = false;
        c.sim.enable_delay = false;
        return c;
    }
    if (name == "case1_3") {
        // deliberately poor delay estimate, one order smaller
        ScenarioConfig c = base_case1();
        c.name = name;
        c.estimate.gamma_hat = 0.1;
        return c;
    }
    if (name == "case1_4") {
        // delay magnitude reduced by two orders
        ScenarioConfig c = base_case1();
        c.name = name;
        c.delay.gamma = 0.0448;
        return c;
    }
    if (name == "case2") {
        ScenarioConfig c = base_case1();
        c.name = name;
        c.reference = ReferenceSpec{"sinusoid", 100.0, 0.15, 300.0, 8};
        c.sim.t_end = 200.0;
        c.settling_band = 15.0;
        return c;
    }
    throw ConfigError("unknown preset '" + name + "'; available: case1_1 case1_2 case1_3 case1_4 case2");
}

namespace {

json to_json(const ScenarioConfig& c) {
    json j;
    j["name"] = c.name;
    j["plant"] = {{"n", c.n}, {"d", c.d}};
    j["saturation"] = {{"enabled", c.sim.enable_saturation},
                       {"beta", c.saturation.beta},
                       {"k_s", c.saturation.k_s},
                       {"eta", c.saturation.eta}};
    j["delay"] = {{"enabled", c.sim.enable_delay},
                  {"gamma", c.delay.gamma},
                  {"k_d", c.delay.k_d},
                  {"phi1", c.delay.phi1},
                  {"phi2", c.delay.phi2},
                  {"x_n_max_expected", c.sim.x_n_max_expected}};
    j["delay_estimate"] = {{"gamma_hat", c.estimate.gamma_hat},
                           {"k_d_hat", c.estimate.k_d_hat},
                           {"tau_tilde_bar", c.estimate.tau_tilde_bar}};
    j["controller"] = {{"enabled", c.controller_enabled},
                       {"k", c.gains.k},
                       {"lambda", c.gains.lambda},
                       {"alpha", c.gains.alpha}};
    j["reference"] = {{"kind", c.reference.kind},
                      {"amplitude", c.reference.amplitude},
                      {"rate", c.reference.rate},
                      {"offset", c.reference.offset},
                      {"max_order", c.reference.max_order}};
    j["x0"] = c.x0;
    j["sim"] = {{"dt", c.sim.dt},
                {"t_end", c.sim.t_end},
                {"record_stride", c.sim.record_stride},
                {"monitor", c.sim.monitor_enabled},
                {"positivity_tol", c.sim.positivity_tol}};
    j["analysis"] = {{"eps1", c.analysis.eps1},   {"eps2", c.analysis.eps2},
                     {"omega1", c.analysis.omega1}, {"omega2", c.analysis.omega2},
                     {"omega3", c.analysis.omega3}, {"c1", c.analysis.c1},
                     {"m", c.analysis.m},           {"psi", c.analysis.psi}};
    j["metrics"] = {{"settling_band", c.settling_band}};
    return j;
}

class FieldReader {
public:
    explicit FieldReader(const json& j) : j_(j) {}

    const json& node(const std::string& path) const {
        const json* p = &j_;
        std::istringstream is(path);
        std::string seg;
        while (std::getline(is, seg, '.')) {
            if (!p->is_object() || !p->contains(seg))
                throw ConfigError("missing config field '" + path + "'");
            p = &(*p)[seg];
        }
        return *p;
    }

    double number(const std::string& path) const {
        const json& v = node(path);
        if (!v.is_number()) throw ConfigError("config field '" + path + "' must be a number");
        return v.get<double>();
    }

    int integer(const std::string& path) const {
        const json& v = node(path);
        if (!v.is_number_integer())
            throw ConfigError("config field '" + path + "' must be an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& path) const {
        const json& v = node(path);
        if (!v.is_boolean()) throw ConfigError("config field '" + path + "' must be a boolean");
        return v.get<bool>();
    }

    std::string text(const std::string& path) const {
        const json& v = node(path);
        if (!v.is_string()) throw ConfigError("config field '" + path + "' must be a string");
        return v.get<std::string>();
    }

    std::vector<double> number_array(const std::string& path) const {
        const json& v = node(path);
        if (!v.is_array()) throw ConfigError("config field '" + path + "' must be an array");
        std::vector<double> out;
        for (const json& e : v) {
            if (!e.is_number())
                throw ConfigError("config field '" + path + "' must hold numbers only");
            out.push_back(e.get<double>());
        }
        return out;
    }

private:
    const json& j_;
};

ScenarioConfig from_json(const json& j) {
    FieldReader r(j);
    ScenarioConfig c;
    c.name = r.text("name");
    c.n = r.integer("plant.n");
    c.d = r.number_array("plant.d");
    c.sim.enable_saturation = r.boolean("saturation.enabled");
    c.saturation.beta = r.number("saturation.beta");
    c.saturation.k_s = r.number("saturation.k_s");
    c.saturation.eta = r.number("saturation.eta");
    c.sim.enable_delay = r.boolean("delay.enabled");
    c.delay.gamma = r.number("delay.gamma");
    c.delay.k_d = r.number("delay.k_d");
    c.delay.phi1 = r.number("delay.phi1");
    c.delay.phi2 = r.number("delay.phi2");
    c.sim.x_n_max_expected = r.number("delay.x_n_max_expected");
    c.estimate.gamma_hat = r.number("delay_estimate.gamma_hat");
    c.estimate.k_d_hat = r.number("delay_estimate.k_d_hat");
    c.estimate.tau_tilde_bar = r.number("delay_estimate.tau_tilde_bar");
    c.controller_enabled = r.boolean("controller.enabled");
    c.gains.k = r.number("controller.k");
    c.gains.lambda = r.number("controller.lambda");
    c.gains.alpha = r.number("controller.alpha");
    c.reference.kind = r.text("reference.kind");
    c.reference.amplitude = r.number("reference.amplitude");
    c.reference.rate = r.number("reference.rate");
    c.reference.offset = r.number("reference.offset");
    c.reference.max_order = r.integer("reference.max_order");
    c.x0 = r.number_array("x0");
    c.sim.dt = r.number("sim.dt");
    c.sim.t_end = r.number("sim.t_end");
    c.sim.record_stride = r.integer("sim.record_stride");
    c.sim.monitor_enabled = r.boolean("sim.monitor");
    c.sim.positivity_tol = r.number("sim.positivity_tol");
    c.analysis.eps1 = r.number("analysis.eps1");
    c.analysis.eps2 = r.number("analysis.eps2");
    c.analysis.omega1 = r.number("analysis.omega1");
    c.analysis.omega2 = r.number("analysis.omega2");
    c.analysis.omega3 = r.number("analysis.omega3");
    c.analysis.c1 = r.number("analysis.c1");
    c.analysis.m = r.number("analysis.m");
    c.analysis.psi = r.number("analysis.psi");
    c.settling_band = r.number("metrics.settling_band");
    c.sim.lk = LkWeights{c.analysis.omega1, c.analysis.omega2, c.analysis.omega3};
    c.sim.psi_tripwire = c.analysis.psi;
    return c;
}

}  // namespace

ScenarioConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ScenarioConfig c = from_json(j);
    c.validate();
    return c;
}

std::string config_to_json_text(const ScenarioConfig& cfg) {
    return to_json(cfg).dump(2) + "\n";
}

ScenarioConfig parse_config(const std::string& path_or_preset) {
    if (is_preset(path_or_preset)) {
        ScenarioConfig c = preset(path_or_preset);
        c.validate();
        return c;
    }
    std::ifstream in(path_or_preset);
    if (!in)
        throw ConfigError("'" + path_or_preset + "' is neither a preset name nor a readable file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key.path=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json j = to_json(cfg);
    json* p = &j;
    std::istringstream is(key);
    std::string seg;
    while (std::getline(is, seg, '.')) {
        if (!p->is_object() || !p->contains(seg))
            throw ConfigError("unknown config field '" + key + "'");
        p = &(*p)[seg];
    }
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // bare strings like tanh_squared
    }
    *p = value;
    cfg = from_json(j);
    cfg.validate();
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
    const std::string s = to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

void append_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out += buf;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
    std::string out;
    out += "t";
    for (int i = 1; i <= traj.n; ++i) out += ",x" + std::to_string(i);
    out += ",x_r";
    for (int i = 1; i <= traj.n; ++i) out += ",e" + std::to_string(i);
    out += ",e_u,e_a,u_raw,u_applied,g_u_tau,tau,tau_hat,nu,gate,clamp_flag,V,Q1,Q2,Q3\n";
    for (const TrajectoryRow& r : traj.rows) {
        append_number(out, r.t);
        for (double v : r.x) { out += ','; append_number(out, v); }
        out += ','; append_number(out, r.x_r);
        for (double v : r.e) { out += ','; append_number(out, v); }
        for (double v : {r.e_u, r.e_a, r.u_raw, r.u_applied, r.g_u_tau, r.tau, r.tau_hat, r.nu}) {
            out += ','; append_number(out, v);
        }
        out += ',' + std::to_string(r.gate);
        out += ',' + std::to_string(r.clamp_flag);
        for (double v : {r.V, r.Q1, r.Q2, r.Q3}) { out += ','; append_number(out, v); }
        out += '\n';
    }
    return out;
}

void write_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << trajectory_csv(traj);
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

double estimate_c1(const ScenarioConfig& cfg, const Trajectory& traj) {
    const ReferenceTrajectory ref = cfg.reference.build();
    const double d_n = cfg.d.back();
    double worst = 0.0;
    for (const TrajectoryRow& r : traj.rows) {
        // residual -f_dot(x_r) + x_r^{(n+1)} for the linear tail state
        const double v = d_n * ref.eval(r.t, cfg.n) + ref.eval(r.t, cfg.n + 1);
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

double estimate_m(const ScenarioConfig& cfg, const Trajectory& traj) {
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < traj.rows.size(); ++j) {
        const TrajectoryRow& a = traj.rows[j - 1];
        const TrajectoryRow& b = traj.rows[j];
        const TrajectoryRow& c = traj.rows[j + 1];
        if (a.gate != b.gate || b.gate != c.gate) continue;  // skip switch neighbourhoods
        const double ud_a = a.gate * cfg.gains.k * a.e_a;
        const double ud_c = c.gate * cfg.gains.k * c.e_a;
        worst = std::max(worst, std::abs(ud_c - ud_a) / (2.0 * traj.record_dt));
    }
    return worst;
}

namespace {

json metrics_json(const Metrics& m) {
    return json{{"ise", m.ise},
                {"ultimate_band", m.ultimate_band},
                {"settling_time", m.settling_time},
                {"switch_count", m.switch_count},
                {"rising_edges", m.rising_edges},
                {"clamp_events", m.clamp_events},
                {"positivity_clamps", m.positivity_clamps}};
}

json certificate_json(const ScenarioConfig& cfg, const Certificate& cert) {
    json j;
    j["gains"] = {{"k", cert.gains.k}, {"lambda", cert.gains.lambda}, {"alpha", cert.gains.alpha}};
    j["analysis"] = {{"eps1", cert.params.eps1},
                     {"eps2", cert.params.eps2},
                     {"omega1", cert.params.omega1},
                     {"omega2", cert.params.omega2},
                     {"omega3", cert.params.omega3},
                     {"phi2", cert.params.phi2},
                     {"tau_hat", cert.params.tau_hat},
                     {"tau_tilde_bar", cert.params.tau_tilde_bar},
                     {"c1", cert.params.c1},
                     {"m", cert.params.m},
                     {"psi", cert.params.psi}};
    j["conditions"] = {{"eps2", cert.flags.eps2},
                       {"lambda", cert.flags.lambda},
                       {"omega3", cert.flags.omega3},
                       {"tau_tilde_bar", cert.flags.tau_tilde}};
    j["sigma"] = cert.sigma;
    j["delta"] = cert.delta;
    if (cert.uub)
        j["uub"] = *cert.uub;
    else
        j["uub"] = nullptr;
    j["feasible"] = cert.feasible;
    j["omega2_definitional"] = cert.omega2_definitional;
    j["slew_bound"] = {{"phi2", cfg.delay.phi2},
                       {"lower_bound", cfg.delay.phi2_lower_bound(cfg.d.back())},
                       {"satisfied", cfg.delay.phi2 > cfg.delay.phi2_lower_bound(cfg.d.back())}};
    return j;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

std::string summary_json_text(const ScenarioConfig& cfg, const Trajectory& traj,
                              const Certificate& cert) {
    json j;
    j["name"] = cfg.name;
    j["provenance"] = {{"config_hash", hash_hex(config_hash(cfg))},
                       {"dt", cfg.sim.dt},
                       {"t_end", cfg.sim.t_end},
                       {"record_stride", cfg.sim.record_stride},
                       {"rows", traj.rows.size()}};
    j["metrics"] = metrics_json(traj.metrics);
    j["certificate"] = {{"feasible", cert.feasible},
                        {"sigma", cert.sigma},
                        {"delta", cert.delta},
                        {"uub", cert.uub ? json(*cert.uub) : json(nullptr)}};
    j["empirical"] = {{"c1_estimate", estimate_c1(cfg, traj)}, {"m_estimate", estimate_m(cfg, traj)}};
    return j.dump(2) + "\n";
}

std::string certificate_json_text(const ScenarioConfig& cfg, const Certificate& cert) {
    return certificate_json(cfg, cert).dump(2) + "\n";
}

RunOutputs run_command(const ScenarioConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    const SystemSetup setup = cfg.build_setup();
    SimConfig sim_cfg = cfg.sim;
    sim_cfg.lk = LkWeights{cfg.analysis.omega1, cfg.analysis.omega2, cfg.analysis.omega3};
    sim_cfg.psi_tripwire = cfg.analysis.psi;

    RunOutputs out;
    out.trajectory = run_scenario(setup, cfg.reference.build(), sim_cfg, cfg.settling_band);
    if (sim_cfg.enable_delay) cfg.delay.validate_slew(cfg.d.back());  // guard before certifying
    out.certificate = make_certificate(cfg.gains, cfg.build_analysis());

    const std::filesystem::path dir(out_dir);
    out.trajectory_path = (dir / (cfg.name + "_trajectory.csv")).string();
    out.summary_path = (dir / (cfg.name + "_summary.json")).string();
    out.certificate_path = (dir / (cfg.name + "_certificate.json")).string();
    write_csv(out.trajectory, out.trajectory_path);

    auto write_text = [](const std::string& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
        f << text;
        if (!f) throw std::runtime_error("failed while writing '" + path + "'");
    };
    write_text(out.summary_path, summary_json_text(cfg, out.trajectory, out.certificate));
    write_text(out.certificate_path, certificate_json_text(cfg, out.certificate));
    return out;
}

}  // namespace poscade
