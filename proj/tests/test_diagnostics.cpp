#include "bjlab/diagnostics.hpp"
#include "generators.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace bjlab;
using std::numbers::pi;

namespace {

template <class F>
double oracle(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-15);
}

PeriodicField sample(std::size_t n, double L, double (*f)(double)) { return PeriodicField::sample(PeriodicGrid(n, L), f); }

double sin_pi(double x) { return std::sin(pi * x); }
double cos_pi(double x) { return std::cos(pi * x); }

// Brute-force parity defect: both reflections evaluated by coordinates, not indices.
double defect_by_coordinates(const PeriodicGrid& g, const std::function<double(double)>& f, double sign) {
    const double L = g.period();
    double num = 0.0, sup = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g.node(j);
        sup = std::max(sup, std::abs(f(x)));
        num = std::max(num, std::abs(f(x) + sign * f(-x)));
        num = std::max(num, std::abs(f(L / 2 + x) + sign * f(L / 2 - x)));
    }
    return num / std::max(sup, 1e-300);
}

}  // namespace

TEST_CASE("energy") {
    const double L = 2.0, c = 1.0 / 3.0;
    const PeriodicGrid g(256, L);
    CHECK(energy({PeriodicField(g), PeriodicField::constant(g, 1.5), 0.0}, 0.4) == doctest::Approx(-0.4 * 1.5 * L));
    const double e = energy({PeriodicField::sample(g, sin_pi), PeriodicField(g), 0.0}, c);
    const double exact = oracle([&](double x) { return 0.5 * std::pow(c * std::sin(pi * x), 2); }, -1.0, 1.0);
    CHECK(exact == doctest::Approx(1.0 / 18.0).epsilon(1e-14));
    CHECK(e == doctest::Approx(exact).epsilon(1e-13));
    CHECK_THROWS_WITH_AS(energy({PeriodicField(g), std::nullopt, 0.0}, c), "model has no θ", std::invalid_argument);

    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pw = testgen::random_trig(rng, 20, L);
        const auto pt = testgen::random_trig(rng, 20, L, testgen::Parity::none, false);
        const double cc = 0.1 + 0.1 * trial;
        const PeriodicGrid g1(128, L), g2(256, L);
        const double e1 = energy({pw.on(g1), pt.on(g1), 0.0}, cc);
        const double e2 = energy({pw.on(g2), pt.on(g2), 0.0}, cc);
        CHECK(std::abs(e1 - e2) <= 1e-11 * std::max(1.0, std::abs(e1)));
    }
}

TEST_CASE("functional F and G") {
    const double c = 1.0 / 3.0;
    const double si_pi = oracle([](double x) { return x == 0 ? 1.0 : std::sin(x) / x; }, 0.0, pi);
    CHECK(functional_F(sample(2048, 2.0, sin_pi), c) == doctest::Approx(si_pi / 3.0).epsilon(1e-12));
    CHECK(si_pi / 3.0 == doctest::Approx(0.617312).epsilon(1e-6));
    CHECK(functional_F(PeriodicField(PeriodicGrid(64, 2.0)), c) == 0.0);

    const double g_exact = c * oracle([](double x) { return x == 0 ? pi * pi : pi * std::sin(pi * x) / x; }, 0.0, 1.0);
    const auto theta = PeriodicField::sample(PeriodicGrid(2048, 2.0), [](double x) { return 1 - std::cos(pi * x); });
    CHECK(functional_G(theta, c) == doctest::Approx(g_exact).epsilon(1e-12));
    CHECK(g_exact == doctest::Approx(pi * si_pi / 3.0).epsilon(1e-13));

    CHECK_THROWS_WITH_AS(functional_F(sample(64, 2.0, cos_pi), c), "singular integrand", std::domain_error);
}

TEST_CASE("Cauchy-Schwarz on sin data") {
    const double c = 1.0 / 3.0, L = 2.0;
    const double si_pi = oracle([](double x) { return x == 0 ? 1.0 : std::sin(x) / x; }, 0.0, pi);
    const double ens = oracle([](double x) { return x == 0 ? pi * pi : std::pow(std::sin(pi * x) / x, 2); }, 0.0, 1.0);
    const double lhs = std::pow(c * si_pi, 2);
    const double rhs = c * c * (L / 2) * ens;
    CHECK(lhs == doctest::Approx(0.381075).epsilon(1e-5));
    CHECK(rhs == doctest::Approx(0.495028).epsilon(1e-5));
    CHECK(lhs <= rhs);

    const auto d = instantaneous_diagnostics(ModelSpec::q0(c), {sample(2048, L, sin_pi), PeriodicField(PeriodicGrid(2048, L)), 0.0});
    CHECK(d.weighted_enstrophy == doctest::Approx(ens).epsilon(1e-10));
    CHECK(d.cauchy_schwarz_margin == doctest::Approx(rhs - lhs).epsilon(1e-9));
}

TEST_CASE("symmetry monitor examples") {
    const PeriodicGrid g(256, 2.0);
    const auto s = symmetry_and_sign_monitor({PeriodicField::sample(g, sin_pi), PeriodicField::sample(g, cos_pi), 0.0});
    CHECK(s.odd_defect_omega <= 1e-15);
    CHECK(s.even_defect_theta <= 1e-15);
    CHECK(s.endpoint_omega <= 1e-15);
    CHECK(s.min_omega_half >= -1e-15);
    CHECK(s.min_thetax_half == doctest::Approx(-pi).epsilon(1e-12));  // theta_x = -pi sin(pi x)

    CHECK(parity_defect(PeriodicField::sample(g, cos_pi), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(parity_defect(PeriodicField(g), 1.0) == 0.0);

    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = testgen::random_trig(rng, 7, 2.0, testgen::Parity::none, false);
        for (std::size_t n : {64u, 128u, 512u}) {
            const PeriodicGrid gn(n, 2.0);
            const double d = parity_defect(p.on(gn), 1.0);
            CHECK(d > 0.0);
            CHECK(d <= 2.0);
            CHECK(std::abs(d - defect_by_coordinates(gn, p, 1.0)) <= 1e-12);
            CHECK(std::abs(parity_defect(p.on(gn), -1.0) - defect_by_coordinates(gn, p, -1.0)) <= 1e-12);
        }
    }
}

TEST_CASE("csv layout") {
    const std::string header = csv_header();
    CHECK(header.rfind("t,E,F,G,F_dot_measured,riccati_margin,strong_margin,", 0) == 0);
    DiagnosticRecord r;
    r.t = 0.5;
    r.E = std::nan("");
    r.resolved = false;
    const std::string row = csv_row(r);
    const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    CHECK(count(row) == count(header));
    CHECK(row.rfind("0.5,nan,0,", 0) == 0);
    CHECK(row.back() == '0');
}

TEST_CASE("instantaneous diagnostics on zero and theta-free states") {
    const PeriodicGrid g(64, 2.0);
    const auto z = instantaneous_diagnostics(ModelSpec::q0(1.0 / 3.0), {PeriodicField(g), PeriodicField(g), 0.0});
    CHECK(z.E == 0.0);
    CHECK(z.F == 0.0);
    CHECK(z.G == 0.0);
    CHECK(z.sup_omega == 0.0);
    CHECK(z.cauchy_schwarz_margin == 0.0);
    CHECK(z.tail_energy_fraction == 0.0);
    CHECK(z.resolved);
    const auto c = instantaneous_diagnostics(ModelSpec::clm(), {PeriodicField::sample(g, cos_pi), std::nullopt, 0.0});
    CHECK(std::isnan(c.E));
    CHECK(std::isnan(c.G));
    CHECK(std::isnan(c.F));
    CHECK(c.sup_omega == doctest::Approx(1.0));
}

TEST_CASE("riccati audit") {
    SUBCASE("zero run") {
        std::vector<DiagnosticRecord> recs(5);
        for (int i = 0; i < 5; ++i) recs[i].t = 0.1 * i;
        const auto out = riccati_audit(recs, 1.0 / 3.0, 2.0);
        CHECK(out.size() == 3);
        for (const auto& s : out) {
            CHECK(s.riccati_margin == 0.0);
            CHECK(s.strong_margin == 0.0);
            CHECK(s.cauchy_schwarz_margin == 0.0);
        }
    }
    SUBCASE("too few samples") {
        std::vector<DiagnosticRecord> recs(2);
        CHECK_THROWS_AS(riccati_audit(recs, 1.0, 1.0), std::invalid_argument);
    }
    SUBCASE("quadratic F on a non-uniform time grid is differentiated exactly") {
        std::vector<DiagnosticRecord> recs;
        const std::vector<double> ts{0.0, 0.1, 0.25, 0.3, 0.55, 0.6};
        for (double t : ts) {
            DiagnosticRecord r;
            r.t = t;
            r.F = 1.0 + 2.0 * t - 3.0 * t * t;
            recs.push_back(r);
        }
        const double L = 2.0;
        apply_riccati_audit(recs, 0.5, L);
        for (const auto& r : recs) {
            const double fdot = 2.0 - 6.0 * r.t;
            CHECK(r.F_dot_measured == doctest::Approx(fdot).epsilon(1e-12));
            CHECK(r.riccati_margin == doctest::Approx(fdot - r.F * r.F / L).epsilon(1e-12));
        }
    }
    SUBCASE("Riccati solution has vanishing margin") {
        // F = L/(T - t) solves F_dot = F^2/L.
        const double L = 2.0, T = 1.0;
        std::vector<DiagnosticRecord> recs;
        for (int i = 0; i <= 200; ++i) {
            DiagnosticRecord r;
            r.t = 0.5 * i / 200.0;
            r.F = L / (T - r.t);
            recs.push_back(r);
        }
        for (const auto& s : riccati_audit(recs, 1.0, L)) {
            CHECK(std::abs(s.riccati_margin) <= 1e-4 * s.F * s.F);
        }
    }
}
