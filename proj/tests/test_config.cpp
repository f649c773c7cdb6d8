#include "bjlab/config.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bjlab;
using nlohmann::json;

namespace {

std::string error_path(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<none>";
}

json minimal() { return {{"model", {{"kind", "Q0"}, {"m", 1}, {"a_jet", 0.0}}}}; }

}  // namespace

TEST_CASE("minimal Q0 config and defaults") {
    const auto cfg = parse_config(minimal());
    REQUIRE(cfg.model.local_coefficient());
    CHECK(*cfg.model.local_coefficient() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    REQUIRE(cfg.closure);
    CHECK(cfg.closure->m == 1);
    CHECK(cfg.n == 1024);
    CHECK(cfg.L == 2.0);
    CHECK(cfg.stepper.cfl == 0.4);
    CHECK(cfg.stepper.omega_sup_cap == 1e6);
    CHECK(cfg.stepper.record_every == 10);
    CHECK(cfg.omega0.generator == "sin_fundamental");
    CHECK(cfg.theta0.generator == "zero");
    CHECK(!cfg.theorem_hypotheses);
    CHECK(cfg.echo["model"]["c"].get<double>() == doctest::Approx(1.0 / 3.0));
    CHECK(cfg.echo["grid"]["n"] == 1024);

    // The echo is itself a valid config that parses to the same thing.
    const auto again = parse_config(cfg.echo);
    CHECK(again.echo == cfg.echo);
}

TEST_CASE("config errors carry field paths") {
    auto doc = minimal();
    doc["model"]["a_jet"] = -2.0;
    CHECK(error_path(doc) == "model.a_jet");
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("positivity condition violated") != std::string::npos);
    }

    CHECK(error_path({{"model", {{"kind", "Euler"}}}}) == "model.kind");
    CHECK(error_path(json::object()) == "model");
    CHECK(error_path(json()) == "");
    CHECK(error_path({{"model", {{"kind", "CLM"}}}, {"grid", {{"n", 0}}}}) == "grid.n");
    CHECK(error_path({{"model", {{"kind", "CLM"}}}, {"grid", {{"n", 30.5}}}}) == "grid.n");
    CHECK(error_path({{"model", {{"kind", "CLM"}}}, {"grid", {{"L", -1.0}}}}) == "grid.L");
    CHECK(error_path({{"model", {{"kind", "CLM"}}}, {"grid", {{"size", 8}}}}) == "grid.size");
    CHECK(error_path({{"model", {{"kind", "CLM"}}}, {"colour", 1}}) == "colour");
    CHECK(error_path({{"model", {{"kind", "CLM"}, {"c", 1.0}}}}) == "model.c");
    CHECK(error_path({{"model", {{"kind", "Q0"}, {"m", 3}}}}) == "model.m");
    CHECK(error_path({{"model", {{"kind", "Q0"}, {"c", 0.5}, {"m", 1}}}}) == "model.c");
    CHECK(error_path({{"model", {{"kind", "Q0"}, {"c", 1.0 / 3.0}, {"m", 1}}}}) == "<none>");
    CHECK(error_path({{"model", {{"kind", "Q0"}, {"c", -0.5}}}}) == "model.c");
    CHECK(error_path({{"model", {{"kind", "CKY"}, {"truncation_X", 2.0}}}}) == "model.truncation_X");
    CHECK(error_path({{"model", {{"kind", "CLM"}}}, {"stepper", {{"cfl", -1.0}}}}) == "stepper.cfl");
    CHECK(error_path({{"model", {{"kind", "CLM"}}}, {"initial_data", {{"theta", {{"generator", "zero"}}}}}}) ==
          "initial_data.theta");
    CHECK(error_path({{"model", {{"kind", "CLM"}}}, {"initial_data", {{"omega", {{"generator", "gauss"}}}}}}) ==
          "initial_data.omega.generator");
    CHECK(error_path({{"model", {{"kind", "CLM"}}}, {"tags", {"fast"}}}) == "tags");
    CHECK_THROWS_AS(parse_config(std::string_view("{ not json")), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("Okamoto with a_ok = 0 reduces to CLM") {
    const json doc = json::parse(R"({
        "model": {"kind": "Okamoto", "a_ok": 0.0},
        "grid": {"n": 64},
        "initial_data": {"omega": {"generator": "custom_fourier", "constant": 0.1,
                                   "modes": [{"k": 1, "cos": 0.3, "sin": 1.0}, {"k": 3, "sin": -0.2}]}}
    })");
    const auto cfg = parse_config(doc);
    const auto s = initial_state(cfg);
    CHECK(!s.theta);
    const auto a = rhs(cfg.model, s).omega_dot;
    const auto b = rhs(ModelSpec::clm(), s).omega_dot;
    CHECK((a - b).sup_norm() <= 1e-15 * std::max(1.0, b.sup_norm()));
}

TEST_CASE("initial data generators") {
    const PeriodicGrid g(32, 2.0);
    InitialData d;
    d.generator = "sin_k";
    d.k = 3;
    const auto f = d.generate(g);
    for (std::size_t j = 0; j < g.size(); ++j) {
        CHECK(f[j] == doctest::Approx(std::sin(3 * std::numbers::pi * g.node(j))).epsilon(1e-14));
    }
    d.generator = "zero";
    CHECK(d.generate(g).sup_norm() == 0.0);
}

TEST_CASE("theorem hypotheses") {
    auto doc = minimal();
    doc["tags"] = {"theorem-hypotheses"};
    doc["model"]["kind"] = "Q0";
    doc["initial_data"] = {{"omega", {{"generator", "sin_fundamental"}}},
                           {"theta", {{"generator", "custom_fourier"}, {"constant", 1.0},
                                      {"modes", {{{"k", 1}, {"cos", -1.0}}}}}}};
    auto cfg = parse_config(doc);
    CHECK(cfg.theorem_hypotheses);
    CHECK_NOTHROW(validate_theorem_hypotheses(cfg, initial_state(cfg)));

    auto wrong_sign = doc;
    wrong_sign["initial_data"]["omega"] = {{"generator", "custom_fourier"}, {"modes", {{{"k", 1}, {"sin", -1.0}}}}};
    cfg = parse_config(wrong_sign);
    CHECK_THROWS_AS(validate_theorem_hypotheses(cfg, initial_state(cfg)), ConfigError);

    auto not_odd = doc;
    not_odd["initial_data"]["omega"] = {{"generator", "custom_fourier"}, {"modes", {{{"k", 1}, {"cos", 1.0}}}}};
    cfg = parse_config(not_odd);
    CHECK_THROWS_AS(validate_theorem_hypotheses(cfg, initial_state(cfg)), ConfigError);

    auto decreasing_theta = doc;
    decreasing_theta["initial_data"]["theta"]["modes"][0]["cos"] = 1.0;
    cfg = parse_config(decreasing_theta);
    CHECK_THROWS_AS(validate_theorem_hypotheses(cfg, initial_state(cfg)), ConfigError);

    auto other_model = doc;
    other_model["model"] = {{"kind", "HouLuo"}};
    cfg = parse_config(other_model);
    CHECK_THROWS_AS(validate_theorem_hypotheses(cfg, initial_state(cfg)), ConfigError);
}

TEST_CASE("set_by_path") {
    json doc = minimal();
    set_by_path(doc, "model.a_jet", 0.5);
    set_by_path(doc, "grid.n", 256);
    set_by_path(doc, "name", "x");
    CHECK(doc["model"]["a_jet"] == 0.5);
    CHECK(doc["model"]["kind"] == "Q0");
    CHECK(doc["grid"]["n"] == 256);
    CHECK(doc["name"] == "x");
    CHECK_THROWS_AS(set_by_path(doc, "name.first", 1), ConfigError);
    CHECK_THROWS_AS(set_by_path(doc, "grid..n", 1), ConfigError);
    const auto cfg = parse_config(doc);
    CHECK(*cfg.model.local_coefficient() == doctest::Approx(closure_coefficient({.m = 1, .a_jet = 0.5})));
}
