#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sllg/ensemble.hpp"
#include "sllg/model.hpp"
#include "sllg/stepper.hpp"

namespace sllg {

struct TestFunctionSpec {
    int mode = 1;
    Vec3 amplitude{1.0, 0.0, 0.0};
};

enum class StudyKind { plain, n_uniformity, order, ito_strat, sphere };

inline const char* study_name(StudyKind s) {
    switch (s) {
        case StudyKind::plain: return "plain";
        case StudyKind::n_uniformity: return "n_uniformity";
        case StudyKind::order: return "order";
        case StudyKind::ito_strat: return "ito_strat";
        case StudyKind::sphere: return "sphere";
    }
    return "?";
}

inline StudyKind study_from_name(const std::string& name) {
    if (name == "plain") return StudyKind::plain;
    if (name == "n_uniformity") return StudyKind::n_uniformity;
    if (name == "order") return StudyKind::order;
    if (name == "ito_strat") return StudyKind::ito_strat;
    if (name == "sphere") return StudyKind::sphere;
    throw ConfigError("unknown study '" + name +
                      "' (plain|n_uniformity|order|ito_strat|sphere)");
}

/// Everything a run needs, with defaults matching a small well-behaved setup.
struct RunConfig {
    // domain
    double length = std::numbers::pi;
    int n_modes = 16;
    int oversample = 4;
    // model
    ModelSpec model;
    // stepper
    StepperConfig stepper;
    // ensemble / study
    int replicas = 1;
    uint64_t base_seed = 1;
    StudyKind study = StudyKind::plain;
    std::vector<int> n_list;
    std::vector<double> dt_list;
    std::vector<std::string> study_schemes{"euler", "heun", "midpoint"};
    int parallelism = 0;
    // output & diagnostics
    std::string out_dir = "out";
    long diag_stride = 1;
    long snapshot_stride = 0;
    double beta = 0.3;
    double alpha = 0.25;
    std::vector<TestFunctionSpec> test_functions;

    void validate() const {
        if (!(length > 0.0)) throw ConfigError("domain.length: must be > 0");
        if (n_modes < 1) throw ConfigError("domain.n_modes: must be >= 1");
        if (oversample < 4) throw ConfigError("domain.oversample: must be >= 4");
        if (!(model.lambda2 >= 0.0)) throw ConfigError("model.lambda2: must be >= 0");
        stepper.validate();
        if (replicas < 1) throw ConfigError("ensemble.replicas: must be >= 1");
        if (!(beta > 0.25)) throw ConfigError("diagnostics.beta: must be > 0.25");
        if (!(alpha > 0.0 && alpha < 0.5))
            throw ConfigError("diagnostics.alpha: must lie in (0, 0.5)");
        if (diag_stride < 0 || snapshot_stride < 0)
            throw ConfigError("output strides: must be >= 0");
        if (study == StudyKind::n_uniformity || study == StudyKind::sphere) {
            if (n_list.empty()) throw ConfigError("ensemble.n_list: required for this study");
        }
        if (study == StudyKind::order || study == StudyKind::ito_strat) {
            if (dt_list.size() < 3)
                throw ConfigError("ensemble.dt_list: need >= 3 dyadic levels for this study");
        }
        for (const TestFunctionSpec& tf : test_functions)
            if (tf.mode < 1) throw ConfigError("diagnostics.test_functions: mode must be >= 1");
    }

    BasisPtr make_basis() const { return SpectralBasis::build(length, n_modes, oversample); }

    EnsembleSpec make_ensemble_spec(const BasisPtr& basis) const {
        EnsembleSpec s;
        s.basis = basis;
        s.model = model;
        s.stepper = stepper;
        s.replicas = replicas;
        s.base_seed = base_seed;
        s.diag_stride = diag_stride;
        s.snapshot_stride = snapshot_stride;
        s.beta = beta;
        s.alpha = alpha;
        s.parallelism = parallelism;
        return s;
    }
};

namespace cfgdetail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::string& where,
                       const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

inline double get_num(const json& obj, const std::string& where, const std::string& key,
                      double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return obj[key].get<double>();
}

inline long get_int(const json& obj, const std::string& where, const std::string& key,
                    long fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError(where + "." + key + ": expected an integer");
    return obj[key].get<long>();
}

inline std::string get_str(const json& obj, const std::string& where, const std::string& key,
                           const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) throw ConfigError(where + "." + key + ": expected a string");
    return obj[key].get<std::string>();
}

inline Vec3 get_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number())
        throw ConfigError(where + ": expected [x, y, z]");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

} // namespace cfgdetail

inline RunConfig parse_config_json(const nlohmann::json& root) {
    using cfgdetail::check_keys;
    using cfgdetail::get_int;
    using cfgdetail::get_num;
    using cfgdetail::get_str;
    using cfgdetail::get_vec3;
    using json = nlohmann::json;

    RunConfig cfg;
    check_keys(root, "config",
               {"domain", "model", "stepper", "ensemble", "output", "diagnostics"});

    if (root.contains("domain")) {
        const json& d = root["domain"];
        check_keys(d, "domain", {"length", "n_modes", "oversample"});
        cfg.length = get_num(d, "domain", "length", cfg.length);
        cfg.n_modes = static_cast<int>(get_int(d, "domain", "n_modes", cfg.n_modes));
        cfg.oversample = static_cast<int>(get_int(d, "domain", "oversample", cfg.oversample));
    }

    if (root.contains("model")) {
        const json& m = root["model"];
        check_keys(m, "model", {"lambda1", "lambda2", "anisotropy", "channels", "initial"});
        cfg.model.lambda1 = get_num(m, "model", "lambda1", cfg.model.lambda1);
        cfg.model.lambda2 = get_num(m, "model", "lambda2", cfg.model.lambda2);
        if (!(cfg.model.lambda2 >= 0.0)) throw ConfigError("model.lambda2: must be >= 0");

        if (m.contains("anisotropy")) {
            const json& a = m["anisotropy"];
            check_keys(a, "model.anisotropy", {"kind", "axis", "strength"});
            const std::string kind = get_str(a, "model.anisotropy", "kind", "none");
            if (kind == "none" || kind == "zero") {
                cfg.model.anisotropy = Anisotropy::none();
            } else if (kind == "uniaxial") {
                const Vec3 axis = a.contains("axis")
                                      ? get_vec3(a["axis"], "model.anisotropy.axis")
                                      : Vec3{0.0, 0.0, 1.0};
                cfg.model.anisotropy =
                    Anisotropy::uniaxial(axis, get_num(a, "model.anisotropy", "strength", 0.0));
            } else {
                throw ConfigError("model.anisotropy.kind: expected none|uniaxial");
            }
        }

        if (m.contains("channels")) {
            if (!m["channels"].is_array())
                throw ConfigError("model.channels: expected an array");
            for (size_t i = 0; i < m["channels"].size(); ++i) {
                const json& c = m["channels"][i];
                const std::string where = "model.channels[" + std::to_string(i) + "]";
                check_keys(c, where, {"type", "value", "mode", "table"});
                ChannelSpec cs;
                const std::string type = get_str(c, where, "type", "constant");
                if (type == "constant") {
                    cs.type = ChannelSpec::Type::constant;
                    cs.value = c.contains("value") ? get_vec3(c["value"], where + ".value")
                                                   : Vec3{0.0, 0.0, 1.0};
                } else if (type == "cosine") {
                    cs.type = ChannelSpec::Type::cosine;
                    cs.value = c.contains("value") ? get_vec3(c["value"], where + ".value")
                                                   : Vec3{0.0, 0.0, 1.0};
                    cs.mode = static_cast<int>(get_int(c, where, "mode", 1));
                } else if (type == "table") {
                    cs.type = ChannelSpec::Type::table;
                    if (!c.contains("table") || !c["table"].is_array())
                        throw ConfigError(where + ".table: expected an array of [x,y,z]");
                    for (const json& row : c["table"])
                        cs.table.push_back(get_vec3(row, where + ".table[]"));
                } else {
                    throw ConfigError(where + ".type: expected constant|cosine|table");
                }
                cfg.model.channels.push_back(cs);
            }
        }

        if (m.contains("initial")) {
            const json& u = m["initial"];
            check_keys(u, "model.initial", {"type", "value", "amplitude", "mode", "entries"});
            const std::string type = get_str(u, "model.initial", "type", "constant");
            if (type == "constant") {
                cfg.model.init.type = InitSpec::Type::constant;
                cfg.model.init.value = u.contains("value")
                                           ? get_vec3(u["value"], "model.initial.value")
                                           : Vec3{1.0, 0.0, 0.0};
            } else if (type == "great_circle") {
                cfg.model.init.type = InitSpec::Type::great_circle;
                cfg.model.init.amplitude = get_num(u, "model.initial", "amplitude", 0.5);
                cfg.model.init.mode = static_cast<int>(get_int(u, "model.initial", "mode", 1));
            } else if (type == "modes") {
                cfg.model.init.type = InitSpec::Type::modes;
                if (!u.contains("entries") || !u["entries"].is_array())
                    throw ConfigError("model.initial.entries: expected an array");
                for (const json& e : u["entries"]) {
                    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer())
                        throw ConfigError(
                            "model.initial.entries[]: expected [mode, [x, y, z]]");
                    cfg.model.init.entries.emplace_back(
                        e[0].get<int>(), get_vec3(e[1], "model.initial.entries[].value"));
                }
            } else {
                throw ConfigError("model.initial.type: expected constant|great_circle|modes");
            }
        }
    }

    if (root.contains("stepper")) {
        const json& s = root["stepper"];
        check_keys(s, "stepper", {"scheme", "dt", "t_final", "fp_tol", "fp_max_iters"});
        cfg.stepper.scheme = scheme_from_name(
            get_str(s, "stepper", "scheme", scheme_name(cfg.stepper.scheme)));
        cfg.stepper.dt = get_num(s, "stepper", "dt", cfg.stepper.dt);
        cfg.stepper.t_final = get_num(s, "stepper", "t_final", cfg.stepper.t_final);
        cfg.stepper.fp_tol = get_num(s, "stepper", "fp_tol", cfg.stepper.fp_tol);
        cfg.stepper.fp_max_iters =
            static_cast<int>(get_int(s, "stepper", "fp_max_iters", cfg.stepper.fp_max_iters));
    }

    if (root.contains("ensemble")) {
        const json& e = root["ensemble"];
        check_keys(e, "ensemble",
                   {"replicas", "base_seed", "study", "n_list", "dt_list", "schemes",
                    "parallelism"});
        cfg.replicas = static_cast<int>(get_int(e, "ensemble", "replicas", cfg.replicas));
        cfg.base_seed = static_cast<uint64_t>(get_int(e, "ensemble", "base_seed", 1));
        cfg.study = study_from_name(get_str(e, "ensemble", "study", "plain"));
        if (e.contains("n_list")) {
            if (!e["n_list"].is_array()) throw ConfigError("ensemble.n_list: expected an array");
            for (const json& v : e["n_list"]) cfg.n_list.push_back(v.get<int>());
        }
        if (e.contains("dt_list")) {
            if (!e["dt_list"].is_array())
                throw ConfigError("ensemble.dt_list: expected an array");
            for (const json& v : e["dt_list"]) cfg.dt_list.push_back(v.get<double>());
        }
        if (e.contains("schemes")) {
            if (!e["schemes"].is_array())
                throw ConfigError("ensemble.schemes: expected an array");
            cfg.study_schemes.clear();
            for (const json& v : e["schemes"]) cfg.study_schemes.push_back(v.get<std::string>());
        }
        cfg.parallelism =
            static_cast<int>(get_int(e, "ensemble", "parallelism", cfg.parallelism));
    }

    if (root.contains("output")) {
        const json& o = root["output"];
        check_keys(o, "output", {"dir", "diag_stride", "snapshot_stride"});
        cfg.out_dir = get_str(o, "output", "dir", cfg.out_dir);
        cfg.diag_stride = get_int(o, "output", "diag_stride", cfg.diag_stride);
        cfg.snapshot_stride = get_int(o, "output", "snapshot_stride", cfg.snapshot_stride);
    }

    if (root.contains("diagnostics")) {
        const json& d = root["diagnostics"];
        check_keys(d, "diagnostics", {"beta", "alpha", "test_functions"});
        cfg.beta = get_num(d, "diagnostics", "beta", cfg.beta);
        cfg.alpha = get_num(d, "diagnostics", "alpha", cfg.alpha);
        if (d.contains("test_functions")) {
            if (!d["test_functions"].is_array())
                throw ConfigError("diagnostics.test_functions: expected an array");
            for (const json& t : d["test_functions"]) {
                cfgdetail::check_keys(t, "diagnostics.test_functions[]", {"mode", "value"});
                TestFunctionSpec tf;
                tf.mode = static_cast<int>(
                    cfgdetail::get_int(t, "test_functions", "mode", 1));
                if (t.contains("value"))
                    tf.amplitude = get_vec3(t["value"], "test_functions.value");
                cfg.test_functions.push_back(tf);
            }
        }
    }

    cfg.validate();
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    nlohmann::json root;
    try {
        in >> root;
    } catch (const std::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return parse_config_json(root);
}

/// Canonical JSON echo of the effective config; parsing it back reproduces the
/// config exactly.
inline nlohmann::json config_to_json(const RunConfig& cfg) {
    using json = nlohmann::json;
    json root;
    root["domain"] = {{"length", cfg.length},
                      {"n_modes", cfg.n_modes},
                      {"oversample", cfg.oversample}};

    json model;
    model["lambda1"] = cfg.model.lambda1;
    model["lambda2"] = cfg.model.lambda2;
    switch (cfg.model.anisotropy.kind) {
        case Anisotropy::Kind::none: model["anisotropy"] = {{"kind", "none"}}; break;
        case Anisotropy::Kind::uniaxial:
            model["anisotropy"] = {
                {"kind", "uniaxial"},
                {"axis", {cfg.model.anisotropy.axis.x, cfg.model.anisotropy.axis.y,
                          cfg.model.anisotropy.axis.z}},
                {"strength", cfg.model.anisotropy.strength}};
            break;
        case Anisotropy::Kind::custom: model["anisotropy"] = {{"kind", "custom"}}; break;
    }
    model["channels"] = json::array();
    for (const ChannelSpec& c : cfg.model.channels) {
        json jc;
        switch (c.type) {
            case ChannelSpec::Type::constant:
                jc = {{"type", "constant"}, {"value", {c.value.x, c.value.y, c.value.z}}};
                break;
            case ChannelSpec::Type::cosine:
                jc = {{"type", "cosine"},
                      {"value", {c.value.x, c.value.y, c.value.z}},
                      {"mode", c.mode}};
                break;
            case ChannelSpec::Type::table: {
                json rows = json::array();
                for (const Vec3& v : c.table) rows.push_back({v.x, v.y, v.z});
                jc = {{"type", "table"}, {"table", rows}};
                break;
            }
        }
        model["channels"].push_back(jc);
    }
    switch (cfg.model.init.type) {
        case InitSpec::Type::constant:
            model["initial"] = {{"type", "constant"},
                                {"value",
                                 {cfg.model.init.value.x, cfg.model.init.value.y,
                                  cfg.model.init.value.z}}};
            break;
        case InitSpec::Type::great_circle:
            model["initial"] = {{"type", "great_circle"},
                                {"amplitude", cfg.model.init.amplitude},
                                {"mode", cfg.model.init.mode}};
            break;
        case InitSpec::Type::modes: {
            json entries = json::array();
            for (const auto& [k, v] : cfg.model.init.entries)
                entries.push_back({k, {v.x, v.y, v.z}});
            model["initial"] = {{"type", "modes"}, {"entries", entries}};
            break;
        }
    }
    root["model"] = model;

    root["stepper"] = {{"scheme", scheme_name(cfg.stepper.scheme)},
                       {"dt", cfg.stepper.dt},
                       {"t_final", cfg.stepper.t_final},
                       {"fp_tol", cfg.stepper.fp_tol},
                       {"fp_max_iters", cfg.stepper.fp_max_iters}};

    json ens;
    ens["replicas"] = cfg.replicas;
    ens["base_seed"] = cfg.base_seed;
    ens["study"] = study_name(cfg.study);
    if (!cfg.n_list.empty()) ens["n_list"] = cfg.n_list;
    if (!cfg.dt_list.empty()) ens["dt_list"] = cfg.dt_list;
    ens["schemes"] = cfg.study_schemes;
    ens["parallelism"] = cfg.parallelism;
    root["ensemble"] = ens;

    root["output"] = {{"dir", cfg.out_dir},
                      {"diag_stride", cfg.diag_stride},
                      {"snapshot_stride", cfg.snapshot_stride}};

    json diag;
    diag["beta"] = cfg.beta;
    diag["alpha"] = cfg.alpha;
    if (!cfg.test_functions.empty()) {
        json tfs = json::array();
        for (const TestFunctionSpec& t : cfg.test_functions)
            tfs.push_back({{"mode", t.mode},
                           {"value", {t.amplitude.x, t.amplitude.y, t.amplitude.z}}});
        diag["test_functions"] = tfs;
    }
    root["diagnostics"] = diag;
    return root;
}

} // namespace sllg
