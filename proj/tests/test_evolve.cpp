#include "bjlab/evolve.hpp"
#include "convergence.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace bjlab;
using std::numbers::pi;

namespace {

double max_diff(const PeriodicField& a, const PeriodicField& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

// u(x,t) = u0(x - u t) by fixed-point iteration; contraction while t max|u0'| < 1.
double burgers_characteristic(const std::function<double(double)>& u0, double x, double t) {
    double u = u0(x);
    for (int it = 0; it < 200; ++it) {
        const double next = u0(x - u * t);
        if (std::abs(next - u) < 1e-16) return next;
        u = next;
    }
    return u;
}

EvolutionState q0_state(std::size_t n, double L, const std::function<double(double)>& w,
                        const std::function<double(double)>& th) {
    const PeriodicGrid g(n, L);
    return {PeriodicField::sample(g, w), PeriodicField::sample(g, th), 0.0};
}

EvolutionState advance_fixed(const ModelSpec& m, EvolutionState s, double dt, int steps) {
    for (int i = 0; i < steps; ++i) s = step_rk4(m, s, dt);
    return s;
}

}  // namespace

TEST_CASE("stepper config validation") {
    StepperConfig c;
    CHECK_NOTHROW(c.validate());
    auto bad = [](auto mutate) {
        StepperConfig s;
        mutate(s);
        return s;
    };
    CHECK_THROWS_AS(bad([](auto& s) { s.cfl = 0.0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& s) { s.cfl = 1.5; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& s) { s.dt_min = 1.0; s.dt_max = 0.5; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& s) { s.t_end = 0.0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& s) { s.omega_sup_cap = -1.0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](auto& s) { s.record_every = 0; }).validate(), std::invalid_argument);
}

TEST_CASE("stationary state") {
    const PeriodicGrid g(64, 2.0);
    const EvolutionState s{PeriodicField(g), PeriodicField::constant(g, 7.0), 0.25};
    const auto next = step_rk4(ModelSpec::q0(1.0 / 3.0), s, 0.01);
    CHECK(next.time == doctest::Approx(0.26));
    CHECK(next.omega.sup_norm() == 0.0);
    CHECK(max_diff(*next.theta, *s.theta) == 0.0);
}

TEST_CASE("overflow in a stage is reported") {
    const PeriodicGrid g(64, 2.0);
    const EvolutionState s{PeriodicField::sample(g, [](double x) { return 1e200 * std::sin(pi * x); }), PeriodicField(g),
                           0.0};
    CHECK_THROWS_WITH_AS(step_rk4(ModelSpec::q0(1.0 / 3.0), s, 0.1), "numerical overflow in stage", std::overflow_error);
}

TEST_CASE("Q0 without theta follows Burgers characteristics") {
    const double c = 1.0 / 3.0, L = 2.0, t_end = 0.3;
    const auto u0 = [&](double x) { return -c * std::sin(pi * x); };
    const auto init = q0_state(1024, L, [](double x) { return std::sin(pi * x); }, [](double) { return 0.0; });
    StepperConfig cfg;
    cfg.t_end = t_end;
    const auto r = run(ModelSpec::q0(c), init, cfg);
    REQUIRE(r.termination == Termination::reached_t_end);
    CHECK(r.t_final == doctest::Approx(t_end).epsilon(1e-14));
    const auto& fin = r.states.back();
    CHECK(fin.time == doctest::Approx(t_end).epsilon(1e-14));
    double err = 0.0;
    for (std::size_t j = 0; j < fin.omega.size(); ++j) {
        const double x = fin.grid().node(j);
        err = std::max(err, std::abs(-c * fin.omega[j] - burgers_characteristic(u0, x, t_end)));
    }
    CHECK(err <= 1e-8);
}

TEST_CASE("RK4 is fourth order") {
    // Smooth Q0 interval with theta forcing; reference at dt/16.
    const auto model = ModelSpec::q0(1.0 / 3.0);
    const auto init = q0_state(128, 2.0, [](double x) { return std::sin(pi * x); },
                               [](double x) { return 1.0 - std::cos(pi * x); });
    const double T = 0.4, dt = 0.04;
    const auto ref = advance_fixed(model, init, dt / 16, 160);
    const auto e1 = max_diff(advance_fixed(model, init, dt, 10).omega, ref.omega);
    const auto e2 = max_diff(advance_fixed(model, init, dt / 2, 20).omega, ref.omega);
    CHECK(e2 > 1e-12);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(e1 / e2 >= 14.0);
    CHECK(e1 / e2 <= 18.0);
    CHECK(ref.time == doctest::Approx(T));
}

TEST_CASE("zero data run") {
    const PeriodicGrid g(64, 2.0);
    StepperConfig cfg;
    cfg.t_end = 1.0;
    const auto r = run(ModelSpec::q0(1.0 / 3.0), {PeriodicField(g), PeriodicField(g), 0.0}, cfg);
    CHECK(r.termination == Termination::reached_t_end);
    CHECK(r.t_final == doctest::Approx(1.0));
    CHECK(r.steps == 100);
    REQUIRE(r.diagnostics.size() == r.states.size());
    for (const auto& d : r.diagnostics) {
        CHECK(d.E == 0.0);
        CHECK(d.F == 0.0);
        CHECK(d.G == 0.0);
        CHECK(d.F_dot_measured == 0.0);
        CHECK(d.riccati_margin == 0.0);
        CHECK(d.strong_margin == 0.0);
        CHECK(d.cauchy_schwarz_margin == 0.0);
        CHECK(d.sup_omega == 0.0);
        CHECK(d.bkm_integral == 0.0);
    }
    CHECK_FALSE(r.first_unresolved_time);
}

TEST_CASE("termination reasons") {
    SUBCASE("sup cap") {
        const auto init = q0_state(256, 2.0, [](double x) { return std::sin(pi * x); }, [](double) { return 0.0; });
        StepperConfig cfg;
        cfg.omega_sup_cap = 2.0;
        const auto r = run(ModelSpec::q0(1.0 / 3.0), init, cfg);
        CHECK(r.termination == Termination::sup_cap_hit);
        CHECK(r.t_final < cfg.t_end);
        CHECK(r.diagnostics.back().t == r.t_final);
        CHECK(r.diagnostics.back().sup_omega > 2.0);
    }
    SUBCASE("dt underflow") {
        const auto init = q0_state(64, 2.0, [](double x) { return 1e3 * std::sin(pi * x); }, [](double) { return 0.0; });
        StepperConfig cfg;
        cfg.dt_min = 1e-3;
        cfg.omega_sup_cap = 1e9;
        const auto r = run(ModelSpec::q0(1.0 / 3.0), init, cfg);
        CHECK(r.termination == Termination::dt_underflow);
        CHECK(r.t_final == 0.0);
        CHECK(r.diagnostics.size() == 1);
    }
}

TEST_CASE("run bookkeeping") {
    const auto init = q0_state(256, 2.0, [](double x) { return std::sin(pi * x); },
                               [](double x) { return 1.0 - std::cos(pi * x); });
    StepperConfig cfg;
    cfg.t_end = 0.5;
    cfg.record_every = 7;
    const auto r = run(ModelSpec::q0(1.0 / 3.0), init, cfg);
    REQUIRE(r.states.size() == r.diagnostics.size());
    for (std::size_t i = 0; i < r.states.size(); ++i) CHECK(r.states[i].time == r.diagnostics[i].t);
    CHECK(r.t_final <= cfg.t_end);
    for (std::size_t i = 1; i < r.diagnostics.size(); ++i) {
        CHECK(r.diagnostics[i].t > r.diagnostics[i - 1].t);
        CHECK(r.diagnostics[i].bkm_integral >= r.diagnostics[i - 1].bkm_integral);
    }
    cfg.keep_states = false;
    const auto lean = run(ModelSpec::q0(1.0 / 3.0), init, cfg);
    CHECK(lean.states.empty());
    CHECK(lean.diagnostics.size() == r.diagnostics.size());
}

TEST_CASE("blow-up estimator") {
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i <= 90; ++i) {
        const double t = 2.0 + 0.01 * i;
        s.emplace_back(t, 1.0 / (3.0 - t));
    }
    const auto est = estimate_blowup_time(s);
    REQUIRE(est);
    CHECK(std::abs(*est - 3.0) <= 1e-6);

    std::vector<std::pair<double, double>> flat;
    for (int i = 0; i < 40; ++i) flat.emplace_back(0.1 * i, 4.0);
    CHECK_FALSE(estimate_blowup_time(flat));

    std::vector<std::pair<double, double>> decay;
    for (int i = 0; i < 40; ++i) decay.emplace_back(0.1 * i, std::exp(-0.1 * i));
    CHECK_FALSE(estimate_blowup_time(decay));

    CHECK_THROWS_AS(estimate_blowup_time(std::vector<std::pair<double, double>>(s.begin(), s.begin() + 7)),
                    std::invalid_argument);
    auto unsorted = s;
    std::swap(unsorted[3], unsorted[4]);
    CHECK_THROWS_AS(estimate_blowup_time(unsorted), std::invalid_argument);
}

TEST_CASE("blow-up estimator under 1% multiplicative noise") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> noise(0.0, 0.01);
    int accepted = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<double, double>> s;
        for (int i = 0; i <= 100; ++i) {
            const double t = 4.0 * i / 100.0 + 0.5;
            s.emplace_back(t, (1.0 + noise(rng)) / (5.0 - t));
        }
        const auto est = estimate_blowup_time(s);
        if (!est) continue;
        ++accepted;
        CHECK(*est >= 4.9);
        CHECK(*est <= 5.1);
    }
    CHECK(accepted == 200);
}

TEST_CASE("CLM matches its closed-form solution") {
    // omega0 = cos(pi x) on L = 2: omega = 4 omega0 / ((2 - t H omega0)^2 + t^2 omega0^2), H omega0 = sin(pi x).
    const PeriodicGrid g(512, 2.0);
    EvolutionState s{PeriodicField::sample(g, [](double x) { return std::cos(pi * x); }), std::nullopt, 0.0};
    StepperConfig cfg;
    cfg.t_end = 1.0;
    cfg.dt_max = 1e-3;
    const auto r = run(ModelSpec::clm(), s, cfg);
    REQUIRE(r.termination == Termination::reached_t_end);
    const auto& fin = r.states.back();
    const double t = fin.time;
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g.node(j), c = std::cos(pi * x), h = std::sin(pi * x);
        err = std::max(err, std::abs(fin.omega[j] - 4 * c / ((2 - t * h) * (2 - t * h) + t * t * c * c)));
    }
    CHECK(err <= 1e-9);
}

TEST_CASE("CLM self-convergence") {
    // Agreement of (n, dt) with (2n, dt/2); the full ||omega|| <= 100 window needs n = 4096
    // and runs in the acceptance suite.
    const auto rep = testconv::self_convergence(
        ModelSpec::clm(), [](double x) { return std::cos(pi * x); }, std::nullopt, 1024, 2.0, 1e-3, 2.0, 20.0);
    CHECK(rep.compared >= 300);
    CHECK(rep.worst_sup <= 1e-6);
    CHECK(rep.worst_field <= 1e-6);
}

TEST_CASE("self-convergence across the model family") {
    struct Case {
        const char* name;
        ModelSpec model;
        testconv::Profile w;
        std::optional<testconv::Profile> th;
        std::size_t n;
        double t_end;
    };
    const std::vector<Case> cases{
        {"CCF", ModelSpec::ccf(), [](double x) { return std::sin(pi * x); }, std::nullopt, 256, 0.25},
        {"DeGregorio", ModelSpec::de_gregorio(), [](double x) { return std::sin(pi * x) + 0.5 * std::cos(2 * pi * x); },
         std::nullopt, 512, 1.0},
        {"Okamoto", ModelSpec::okamoto(0.5), [](double x) { return std::cos(pi * x); }, std::nullopt, 256, 1.0},
        {"HouLuo", ModelSpec::hou_luo(), [](double x) { return std::sin(pi * x); },
         [](double x) { return 1 - std::cos(pi * x); }, 256, 0.5},
        {"CKY", ModelSpec::cky(1.0), [](double x) { return std::pow(std::sin(pi * x), 3); },
         [](double x) { return std::pow(1 - std::cos(pi * x), 2); }, 1024, 0.2},
    };
    for (const auto& c : cases) {
        const auto rep = testconv::self_convergence(c.model, c.w, c.th, c.n, 2.0, 1e-3, c.t_end);
        CAPTURE(c.name);
        CHECK(rep.t_last == doctest::Approx(c.t_end));
        CHECK(rep.worst_field <= 1e-6);
        CHECK(rep.worst_sup <= 1e-6);
    }
}
