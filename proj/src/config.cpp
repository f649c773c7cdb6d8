#include "bjlab/config.hpp"

#include "bjlab/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace bjlab {

namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || a == key;
        if (!ok) throw ConfigError(join(path, key), "unknown field");
    }
}

const json& require_object(const json& parent, const std::string& key, const std::string& path) {
    static const json empty = json::object();
    if (!parent.contains(key)) return empty;
    const json& v = parent.at(key);
    if (!v.is_object()) throw ConfigError(join(path, key), "expected an object");
    return v;
}

double get_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
    return v.get<double>();
}

long get_integer(const json& obj, const std::string& key, const std::string& path, long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
    return v.get<long>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& path, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path, std::string fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
    return v.get<std::string>();
}

InitialData parse_initial(const json& obj, const std::string& path, const std::string& fallback) {
    reject_unknown(obj, path, {"generator", "k", "constant", "modes"});
    InitialData d;
    d.generator = get_string(obj, "generator", path, fallback);
    if (d.generator == "sin_k") {
        d.k = static_cast<int>(get_integer(obj, "k", path, 1));
        if (d.k < 1) throw ConfigError(join(path, "k"), "must be a positive integer");
    } else if (d.generator == "custom_fourier") {
        d.constant = get_number(obj, "constant", path, 0.0);
        if (obj.contains("modes")) {
            const json& modes = obj.at("modes");
            if (!modes.is_array()) throw ConfigError(join(path, "modes"), "expected an array");
            for (std::size_t i = 0; i < modes.size(); ++i) {
                const std::string mp = join(path, "modes[" + std::to_string(i) + "]");
                if (!modes[i].is_object()) throw ConfigError(mp, "expected an object");
                reject_unknown(modes[i], mp, {"k", "cos", "sin"});
                FourierMode m;
                m.k = static_cast<int>(get_integer(modes[i], "k", mp, 1));
                if (m.k < 1) throw ConfigError(join(mp, "k"), "must be a positive integer");
                m.cos = get_number(modes[i], "cos", mp, 0.0);
                m.sin = get_number(modes[i], "sin", mp, 0.0);
                d.modes.push_back(m);
            }
        }
    } else if (d.generator != "zero" && d.generator != "sin_fundamental") {
        throw ConfigError(join(path, "generator"), "unknown generator '" + d.generator + "'");
    }
    return d;
}

json initial_to_json(const InitialData& d) {
    json j = {{"generator", d.generator}};
    if (d.generator == "sin_k") j["k"] = d.k;
    if (d.generator == "custom_fourier") {
        j["constant"] = d.constant;
        j["modes"] = json::array();
        for (const auto& m : d.modes) j["modes"].push_back({{"k", m.k}, {"cos", m.cos}, {"sin", m.sin}});
    }
    return j;
}

}  // namespace

PeriodicField InitialData::generate(const PeriodicGrid& grid) const {
    const double k0 = 2.0 * std::numbers::pi / grid.period();
    if (generator == "zero") return PeriodicField(grid);
    if (generator == "sin_fundamental") return PeriodicField::sample(grid, [&](double x) { return std::sin(k0 * x); });
    if (generator == "sin_k") {
        return PeriodicField::sample(grid, [&](double x) { return std::sin(k * k0 * x); });
    }
    if (generator == "custom_fourier") {
        return PeriodicField::sample(grid, [&](double x) {
            double v = constant;
            for (const auto& m : modes) v += m.cos * std::cos(m.k * k0 * x) + m.sin * std::sin(m.k * k0 * x);
            return v;
        });
    }
    throw std::invalid_argument("unknown generator " + generator);
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
    reject_unknown(doc, "", {"name", "model", "grid", "initial_data", "stepper", "estimator", "outputs", "tags"});
    ExperimentConfig cfg;
    cfg.name = get_string(doc, "name", "", cfg.name);

    const json& grid = require_object(doc, "grid", "");
    reject_unknown(grid, "grid", {"n", "L"});
    const long n = get_integer(grid, "n", "grid", 1024);
    if (n <= 0) throw ConfigError("grid.n", "must be positive");
    if (n < 8 || n % 2 != 0) throw ConfigError("grid.n", "must be even and >= 8");
    cfg.n = static_cast<std::size_t>(n);
    cfg.L = get_number(grid, "L", "grid", 2.0);
    if (!(cfg.L > 0.0)) throw ConfigError("grid.L", "must be positive");

    if (!doc.contains("model")) throw ConfigError("model", "missing");
    const json& model = require_object(doc, "model", "");
    reject_unknown(model, "model", {"kind", "m", "a_jet", "c", "a_ok", "truncation_X"});
    if (!model.contains("kind")) throw ConfigError("model.kind", "missing");
    const std::string kind_name = get_string(model, "kind", "model", "");
    const auto kind = parse_model_kind(kind_name);
    if (!kind) throw ConfigError("model.kind", "unknown model name '" + kind_name + "'");
    auto forbid = [&](std::initializer_list<std::string_view> keys) {
        for (auto k : keys) {
            if (model.contains(std::string(k))) {
                throw ConfigError(join("model", std::string(k)), "not a parameter of model " + kind_name);
            }
        }
    };
    json model_echo = {{"kind", kind_name}};
    switch (*kind) {
        case ModelKind::CLM:
            forbid({"m", "a_jet", "c", "a_ok", "truncation_X"});
            cfg.model = ModelSpec::clm();
            break;
        case ModelKind::DeGregorio:
            forbid({"m", "a_jet", "c", "a_ok", "truncation_X"});
            cfg.model = ModelSpec::de_gregorio();
            break;
        case ModelKind::CCF:
            forbid({"m", "a_jet", "c", "a_ok", "truncation_X"});
            cfg.model = ModelSpec::ccf();
            break;
        case ModelKind::HouLuo:
            forbid({"m", "a_jet", "c", "a_ok", "truncation_X"});
            cfg.model = ModelSpec::hou_luo();
            break;
        case ModelKind::Okamoto: {
            forbid({"m", "a_jet", "c", "truncation_X"});
            const double a_ok = get_number(model, "a_ok", "model", 1.0);
            cfg.model = ModelSpec::okamoto(a_ok);
            model_echo["a_ok"] = a_ok;
            break;
        }
        case ModelKind::CKY: {
            forbid({"m", "a_jet", "c", "a_ok"});
            const double X = get_number(model, "truncation_X", "model", 0.5 * cfg.L);
            if (!(X > 0.0)) throw ConfigError("model.truncation_X", "must be positive");
            if (X > 0.5 * cfg.L * (1.0 + 1e-12)) throw ConfigError("model.truncation_X", "must not exceed L/2");
            const double steps = X / (cfg.L / static_cast<double>(cfg.n));
            if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps) || std::round(steps) < 4) {
                throw ConfigError("model.truncation_X", "must sit on a grid node at least 4 spacings from 0");
            }
            cfg.model = ModelSpec::cky(X);
            model_echo["truncation_X"] = X;
            break;
        }
        case ModelKind::Q0: {
            forbid({"a_ok", "truncation_X"});
            if (model.contains("c") && !model.contains("m") && !model.contains("a_jet")) {
                const double c = get_number(model, "c", "model", 0.0);
                if (!(c > 0.0)) throw ConfigError("model.c", "positivity condition violated");
                cfg.model = ModelSpec::q0(c);
                model_echo["c"] = c;
            } else {
                ClosureParams p;
                p.m = static_cast<int>(get_integer(model, "m", "model", 1));
                if (p.m != 1 && p.m != 2) throw ConfigError("model.m", "must be 1 or 2");
                p.a_jet = get_number(model, "a_jet", "model", 0.0);
                double c = 0.0;
                try {
                    c = closure_coefficient(p);
                } catch (const std::domain_error& e) {
                    throw ConfigError("model.a_jet", e.what());
                }
                // An explicit c next to (m, a_jet), as echoed in run.json, must agree with the closure.
                if (model.contains("c")) {
                    const double given = get_number(model, "c", "model", c);
                    if (std::abs(given - c) > 1e-14 * c) throw ConfigError("model.c", "inconsistent with (m, a_jet)");
                }
                cfg.model = ModelSpec::q0(c);
                cfg.closure = p;
                model_echo["m"] = p.m;
                model_echo["a_jet"] = p.a_jet;
                model_echo["c"] = c;
            }
            break;
        }
    }

    const json& init = require_object(doc, "initial_data", "");
    reject_unknown(init, "initial_data", {"omega", "theta"});
    cfg.omega0 = parse_initial(require_object(init, "omega", "initial_data"), "initial_data.omega", "sin_fundamental");
    cfg.theta0 = parse_initial(require_object(init, "theta", "initial_data"), "initial_data.theta", "zero");
    if (!cfg.model.has_theta() && init.contains("theta")) {
        throw ConfigError("initial_data.theta", "model " + kind_name + " has no theta");
    }

    const json& st = require_object(doc, "stepper", "");
    reject_unknown(st, "stepper",
                   {"cfl", "dt_min", "dt_max", "t_end", "omega_sup_cap", "record_every", "dealias", "keep_states"});
    StepperConfig& s = cfg.stepper;
    s.cfl = get_number(st, "cfl", "stepper", s.cfl);
    s.dt_min = get_number(st, "dt_min", "stepper", s.dt_min);
    s.dt_max = get_number(st, "dt_max", "stepper", s.dt_max);
    s.t_end = get_number(st, "t_end", "stepper", s.t_end);
    s.omega_sup_cap = get_number(st, "omega_sup_cap", "stepper", s.omega_sup_cap);
    s.record_every = static_cast<int>(get_integer(st, "record_every", "stepper", s.record_every));
    s.dealias = get_bool(st, "dealias", "stepper", s.dealias);
    s.keep_states = get_bool(st, "keep_states", "stepper", s.keep_states);

    const json& est = require_object(doc, "estimator", "");
    reject_unknown(est, "estimator", {"fit_fraction", "max_relative_residual"});
    cfg.estimator.fit_fraction = get_number(est, "fit_fraction", "estimator", cfg.estimator.fit_fraction);
    if (!(cfg.estimator.fit_fraction > 0.0 && cfg.estimator.fit_fraction <= 1.0)) {
        throw ConfigError("estimator.fit_fraction", "must lie in (0, 1]");
    }
    cfg.estimator.max_relative_residual =
        get_number(est, "max_relative_residual", "estimator", cfg.estimator.max_relative_residual);

    const json& out = require_object(doc, "outputs", "");
    reject_unknown(out, "outputs", {"directory", "record_every", "snapshot_times"});
    cfg.outputs.directory = get_string(out, "directory", "outputs", cfg.outputs.directory.string());
    s.record_every = static_cast<int>(get_integer(out, "record_every", "outputs", s.record_every));
    if (out.contains("snapshot_times")) {
        const json& times = out.at("snapshot_times");
        if (!times.is_array()) throw ConfigError("outputs.snapshot_times", "expected an array");
        for (const auto& t : times) {
            if (!t.is_number()) throw ConfigError("outputs.snapshot_times", "expected numbers");
            cfg.outputs.snapshot_times.push_back(t.get<double>());
        }
    }

    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        const auto colon = what.find(':');
        throw ConfigError(what.substr(0, colon), what.substr(colon + 2));
    }

    if (doc.contains("tags")) {
        const json& tags = doc.at("tags");
        if (!tags.is_array()) throw ConfigError("tags", "expected an array of strings");
        static const std::set<std::string> known = {"theorem-hypotheses"};
        for (const auto& t : tags) {
            if (!t.is_string() || !known.contains(t.get<std::string>())) {
                throw ConfigError("tags", "unknown tag " + t.dump());
            }
            if (t.get<std::string>() == "theorem-hypotheses") cfg.theorem_hypotheses = true;
        }
    }

    cfg.echo = {
        {"name", cfg.name},
        {"model", model_echo},
        {"grid", {{"n", cfg.n}, {"L", cfg.L}}},
        {"initial_data", {{"omega", initial_to_json(cfg.omega0)}}},
        {"stepper",
         {{"cfl", s.cfl},
          {"dt_min", s.dt_min},
          {"dt_max", s.dt_max},
          {"t_end", s.t_end},
          {"omega_sup_cap", s.omega_sup_cap},
          {"record_every", s.record_every},
          {"dealias", s.dealias},
          {"keep_states", s.keep_states}}},
        {"estimator",
         {{"fit_fraction", cfg.estimator.fit_fraction},
          {"max_relative_residual", cfg.estimator.max_relative_residual}}},
        {"outputs", {{"directory", cfg.outputs.directory.string()}, {"snapshot_times", cfg.outputs.snapshot_times}}},
        {"tags", cfg.theorem_hypotheses ? json::array({"theorem-hypotheses"}) : json::array()},
    };
    if (cfg.model.has_theta()) cfg.echo["initial_data"]["theta"] = initial_to_json(cfg.theta0);
    return cfg;
}

ExperimentConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(std::string_view(ss.str()));
}

EvolutionState initial_state(const ExperimentConfig& cfg) {
    const PeriodicGrid g = cfg.grid();
    EvolutionState s{cfg.omega0.generate(g), std::nullopt, 0.0};
    if (cfg.model.has_theta()) s.theta = cfg.theta0.generate(g);
    return s;
}

void validate_theorem_hypotheses(const ExperimentConfig& cfg, const EvolutionState& init) {
    if (cfg.model.kind() != ModelKind::Q0) {
        throw ConfigError("model.kind", "theorem-hypotheses runs require model Q0");
    }
    const SymmetryReport sym = symmetry_and_sign_monitor(init);
    if (sym.odd_defect_omega > 1e-12) throw ConfigError("initial_data.omega", "omega0 is not odd about 0 and L/2");
    if (sym.even_defect_theta > 1e-12) throw ConfigError("initial_data.theta", "theta0 is not even about 0 and L/2");
    const double w_sup = init.omega.sup_norm();
    if (sym.min_omega_half < -1e-12 * w_sup) throw ConfigError("initial_data.omega", "omega0 < 0 somewhere on [0, L/2]");
    if (sym.min_thetax_half < -1e-12 * std::max(sym.sup_thetax, 1e-300)) {
        throw ConfigError("initial_data.theta", "theta0_x < 0 somewhere on [0, L/2]");
    }
    const double F0 = functional_F(init.omega, *cfg.model.local_coefficient());
    if (!(F0 > 0.0)) throw ConfigError("initial_data.omega", "F(0) must be positive");
}

void set_by_path(nlohmann::json& doc, std::string_view dotted, const nlohmann::json& value) {
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = dotted.find('.', start);
        const std::string key(dotted.substr(start, dot == std::string_view::npos ? dotted.npos : dot - start));
        if (key.empty()) throw ConfigError(std::string(dotted), "empty path component");
        if (dot == std::string_view::npos) {
            (*node)[key] = value;
            return;
        }
        if (!node->contains(key)) (*node)[key] = json::object();
        node = &(*node)[key];
        if (!node->is_object()) throw ConfigError(std::string(dotted), "path crosses a non-object value");
        start = dot + 1;
    }
}

}  // namespace bjlab
