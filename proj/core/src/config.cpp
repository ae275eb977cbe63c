#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mixadc/harness.hpp"

namespace mixadc {

using nlohmann::json;

Experiment parse_experiment(const std::string& name) {
    if (name == "crb-sweep") return Experiment::crb_sweep;
    if (name == "rmse") return Experiment::rmse;
    if (name == "imaging") return Experiment::imaging;
    throw DomainError("unknown experiment '" + name + "' (expected crb-sweep, rmse or imaging)");
}

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::crb_sweep: return "crb-sweep";
        case Experiment::rmse: return "rmse";
        case Experiment::imaging: return "imaging";
    }
    return "?";
}

Scale parse_scale(const std::string& name) {
    if (name == "paper") return Scale::paper;
    if (name == "desk") return Scale::desk;
    throw DomainError("unknown scale '" + name + "' (expected paper or desk)");
}

const char* scale_name(Scale s) { return s == Scale::paper ? "paper" : "desk"; }

ExperimentConfig default_config(Experiment e, Scale s) {
    ExperimentConfig c;
    c.experiment = e;
    switch (e) {
        case Experiment::crb_sweep:
            c.run.trials = 1;
            break;
        case Experiment::rmse:
            c.scene.r_values = {1, 10, 100, 1000};
            c.scene.known_noise = false;
            c.run.trials = 500;
            break;
        case Experiment::imaging:
            c.run.trials = 1;
            c.run.k_max = 40;
            break;
    }
    if (s == Scale::desk) apply_desk_profile(c);
    return c;
}

void apply_desk_profile(ExperimentConfig& c) {
    c.scale = Scale::desk;
    switch (c.experiment) {
        case Experiment::crb_sweep:
            c.system = {4, 6, 3.0, 0.5, 16};
            c.grid = {32, 64};
            c.scene.r_values = {1, 10, 100, 1000};
            c.scene.snr2_db = 10.0;
            break;
        case Experiment::rmse:
            c.system = {2, 4, 2.0, 0.5, 16};
            c.grid = {32, 64};
            c.scene.targets = {{-20.0, -1.2, 1.0, kPi / 4}, {25.0, 1.4, 1.0, kPi / 4}};
            c.scene.snap_to_grid = true;
            c.scene.r_values = {1, 10};
            c.scene.snr2_db = 15.0;
            c.run.trials = 100;
            c.run.k_max = 4;
            break;
        case Experiment::imaging:
            c.system = {10, 10, 5.0, 0.5, 32};
            c.grid = {128, 64};
            c.run.trials = 5;
            c.run.k_max = 40;
            break;
    }
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw DomainError("config: " + field + " " + what);
}

}  // namespace

void ExperimentConfig::validate() const {
    require(system.m_tx >= 1, "system.m_tx", "must be >= 1");
    require(system.m_rx >= 1, "system.m_rx", "must be >= 1");
    require(system.n_pri >= 1, "system.n_pri", "must be >= 1");
    require(system.d_tx > 0 && system.d_rx > 0, "system.d_tx/d_rx", "must be positive");
    require(grid.k_theta >= 3 && grid.k_omega >= 3, "grid", "needs at least 3 points per axis");
    require(adc.threshold_levels >= 2, "adc.threshold_levels", "must be >= 2");
    if (!adc.delta.empty()) {
        require(static_cast<int>(adc.delta.size()) == system.m_rx, "adc.delta", "must have m_rx entries");
        for (int d : adc.delta) require(d == 0 || d == 1, "adc.delta", "entries must be 0 or 1");
    } else {
        (void)parse_pattern(adc.pattern);
    }
    for (const auto& p : adc.sweep) (void)parse_pattern(p);
    require(!scene.r_values.empty(), "scene.r_values", "must not be empty");
    for (double r : scene.r_values) require(r >= 1.0, "scene.r_values", "entries must be >= 1");
    if (experiment != Experiment::imaging) {
        require(scene.targets.size() == 2, "scene.targets", "must list exactly two targets");
    }
    for (const auto& t : scene.targets) {
        require(std::abs(t.theta_deg) < 90.0, "scene.targets.theta_deg", "must lie in (-90, 90)");
        require(t.amplitude > 0.0, "scene.targets.amplitude", "must be positive");
    }
    require(scene.n_targets >= 1, "scene.n_targets", "must be >= 1");
    require(scene.n_off_grid >= 0 && scene.n_off_grid <= scene.n_targets, "scene.n_off_grid", "out of range");
    require(scene.amp_min > 0 && scene.amp_max >= scene.amp_min, "scene.amp_min/amp_max", "must satisfy 0 < min <= max");
    require(scene.max_theta_deg > 0 && scene.max_theta_deg < 90, "scene.max_theta_deg", "must lie in (0, 90)");
    require(scene.min_separation_cells >= 1, "scene.min_separation_cells", "must be >= 1");
    require(run.trials >= 1, "run.trials", "must be >= 1");
    require(run.workers >= 0, "run.workers", "must be >= 0");
    require(run.k_max >= 1, "run.k_max", "must be >= 1");
    require(run.mlikes.max_outer >= 1 && run.mlikes.max_inner >= 1, "run.mlikes", "iteration caps must be >= 1");
    require(run.mlikes.outer_tol >= 0 && run.mlikes.inner_tol >= 0, "run.mlikes", "tolerances must be >= 0");
    require(run.refine.max_cycles >= 1, "run.refine.max_cycles", "must be >= 1");
}

std::vector<int> configured_delta(const ExperimentConfig& cfg) {
    if (!cfg.adc.delta.empty()) return cfg.adc.delta;
    return delta_pattern(parse_pattern(cfg.adc.pattern), cfg.system.m_rx);
}

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw DomainError("config: " + where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!ok.count(it.key())) throw DomainError("config: unknown key " + where + "." + it.key());
    }
}

template <typename T>
void take(const json& j, const char* key, T& dst, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DomainError("config: " + where + "." + key + " has the wrong type (" + e.what() + ")");
    }
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text, ExperimentConfig c) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("config: invalid JSON: ") + e.what());
    }
    check_keys(j, "", {"$schema", "experiment", "scale", "system", "grid", "adc", "scene", "run"});
    if (j.contains("experiment")) {
        const Experiment e = parse_experiment(j["experiment"].get<std::string>());
        if (e != c.experiment) c = default_config(e, c.scale);
    }
    if (j.contains("scale")) {
        const Scale s = parse_scale(j["scale"].get<std::string>());
        if (s != c.scale) c = default_config(c.experiment, s);
    }
    if (j.contains("system")) {
        const auto& s = j["system"];
        check_keys(s, "system", {"m_tx", "m_rx", "d_tx", "d_rx", "n_pri"});
        take(s, "m_tx", c.system.m_tx, "system");
        take(s, "m_rx", c.system.m_rx, "system");
        take(s, "d_tx", c.system.d_tx, "system");
        take(s, "d_rx", c.system.d_rx, "system");
        take(s, "n_pri", c.system.n_pri, "system");
    }
    if (j.contains("grid")) {
        const auto& s = j["grid"];
        check_keys(s, "grid", {"k_theta", "k_omega"});
        take(s, "k_theta", c.grid.k_theta, "grid");
        take(s, "k_omega", c.grid.k_omega, "grid");
    }
    if (j.contains("adc")) {
        const auto& s = j["adc"];
        check_keys(s, "adc", {"pattern", "delta", "threshold_levels", "sweep"});
        take(s, "pattern", c.adc.pattern, "adc");
        take(s, "delta", c.adc.delta, "adc");
        take(s, "threshold_levels", c.adc.threshold_levels, "adc");
        take(s, "sweep", c.adc.sweep, "adc");
    }
    if (j.contains("scene")) {
        const auto& s = j["scene"];
        check_keys(s, "scene", {"targets", "r_values", "snr2_db", "snap_to_grid", "known_noise", "n_targets",
                                "n_off_grid", "amp_min", "amp_max", "min_separation_cells", "max_theta_deg",
                                "min_snr_db"});
        if (s.contains("targets")) {
            c.scene.targets.clear();
            for (const auto& t : s["targets"]) {
                check_keys(t, "scene.targets[]", {"theta_deg", "omega", "amplitude", "phase"});
                TargetSpec ts;
                take(t, "theta_deg", ts.theta_deg, "scene.targets[]");
                take(t, "omega", ts.omega, "scene.targets[]");
                take(t, "amplitude", ts.amplitude, "scene.targets[]");
                take(t, "phase", ts.phase, "scene.targets[]");
                c.scene.targets.push_back(ts);
            }
        }
        take(s, "r_values", c.scene.r_values, "scene");
        take(s, "snr2_db", c.scene.snr2_db, "scene");
        take(s, "snap_to_grid", c.scene.snap_to_grid, "scene");
        take(s, "known_noise", c.scene.known_noise, "scene");
        take(s, "n_targets", c.scene.n_targets, "scene");
        take(s, "n_off_grid", c.scene.n_off_grid, "scene");
        take(s, "amp_min", c.scene.amp_min, "scene");
        take(s, "amp_max", c.scene.amp_max, "scene");
        take(s, "min_separation_cells", c.scene.min_separation_cells, "scene");
        take(s, "max_theta_deg", c.scene.max_theta_deg, "scene");
        take(s, "min_snr_db", c.scene.min_snr_db, "scene");
    }
    if (j.contains("run")) {
        const auto& s = j["run"];
        check_keys(s, "run", {"trials", "seed", "workers", "out_dir", "k_max", "write_pgm", "mlikes", "refine"});
        take(s, "trials", c.run.trials, "run");
        take(s, "seed", c.run.seed, "run");
        take(s, "workers", c.run.workers, "run");
        take(s, "out_dir", c.run.out_dir, "run");
        take(s, "k_max", c.run.k_max, "run");
        take(s, "write_pgm", c.run.write_pgm, "run");
        if (s.contains("mlikes")) {
            const auto& m = s["mlikes"];
            check_keys(m, "run.mlikes", {"max_outer", "max_inner", "outer_tol", "inner_tol", "acceleration",
                                         "restart", "eta_min", "eta_max", "sigma_floor"});
            take(m, "max_outer", c.run.mlikes.max_outer, "run.mlikes");
            take(m, "max_inner", c.run.mlikes.max_inner, "run.mlikes");
            take(m, "outer_tol", c.run.mlikes.outer_tol, "run.mlikes");
            take(m, "inner_tol", c.run.mlikes.inner_tol, "run.mlikes");
            if (m.contains("acceleration")) c.run.mlikes.acceleration = parse_acceleration(m["acceleration"].get<std::string>());
            take(m, "restart", c.run.mlikes.restart, "run.mlikes");
            take(m, "eta_min", c.run.mlikes.eta_min, "run.mlikes");
            take(m, "eta_max", c.run.mlikes.eta_max, "run.mlikes");
            take(m, "sigma_floor", c.run.mlikes.sigma_floor, "run.mlikes");
        }
        if (s.contains("refine")) {
            const auto& m = s["refine"];
            check_keys(m, "run.refine", {"max_cycles", "rel_tol"});
            take(m, "max_cycles", c.run.refine.max_cycles, "run.refine");
            take(m, "rel_tol", c.run.refine.rel_tol, "run.refine");
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw DomainError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str(), std::move(base));
}

std::string config_to_json(const ExperimentConfig& c) {
    json targets = json::array();
    for (const auto& t : c.scene.targets) {
        targets.push_back({{"theta_deg", t.theta_deg}, {"omega", t.omega}, {"amplitude", t.amplitude}, {"phase", t.phase}});
    }
    json j = {
        {"experiment", experiment_name(c.experiment)},
        {"scale", scale_name(c.scale)},
        {"system", {{"m_tx", c.system.m_tx}, {"m_rx", c.system.m_rx}, {"d_tx", c.system.d_tx}, {"d_rx", c.system.d_rx},
                    {"n_pri", c.system.n_pri}}},
        {"grid", {{"k_theta", c.grid.k_theta}, {"k_omega", c.grid.k_omega}}},
        {"adc", {{"pattern", c.adc.pattern}, {"delta", c.adc.delta}, {"threshold_levels", c.adc.threshold_levels},
                 {"sweep", c.adc.sweep}}},
        {"scene", {{"targets", targets}, {"r_values", c.scene.r_values}, {"snr2_db", c.scene.snr2_db},
                   {"snap_to_grid", c.scene.snap_to_grid}, {"known_noise", c.scene.known_noise},
                   {"n_targets", c.scene.n_targets}, {"n_off_grid", c.scene.n_off_grid}, {"amp_min", c.scene.amp_min},
                   {"amp_max", c.scene.amp_max}, {"min_separation_cells", c.scene.min_separation_cells},
                   {"max_theta_deg", c.scene.max_theta_deg}, {"min_snr_db", c.scene.min_snr_db}}},
        {"run", {{"trials", c.run.trials}, {"seed", c.run.seed}, {"workers", c.run.workers}, {"out_dir", c.run.out_dir},
                 {"k_max", c.run.k_max}, {"write_pgm", c.run.write_pgm},
                 {"mlikes", {{"max_outer", c.run.mlikes.max_outer}, {"max_inner", c.run.mlikes.max_inner},
                             {"outer_tol", c.run.mlikes.outer_tol}, {"inner_tol", c.run.mlikes.inner_tol},
                             {"acceleration", acceleration_name(c.run.mlikes.acceleration)},
                             {"restart", c.run.mlikes.restart}, {"eta_min", c.run.mlikes.eta_min},
                             {"eta_max", c.run.mlikes.eta_max}, {"sigma_floor", c.run.mlikes.sigma_floor}}},
                 {"refine", {{"max_cycles", c.run.refine.max_cycles}, {"rel_tol", c.run.refine.rel_tol}}}}},
    };
    return j.dump(2);
}

}  // namespace mixadc
