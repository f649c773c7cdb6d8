#include "bjlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace bjlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kFloor = 1e-300;

void append_number(std::string& out, double v) {
    if (std::isnan(v)) {
        out += "nan";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

std::string csv_header() {
    return "t,E,F,G,F_dot_measured,riccati_margin,strong_margin,cauchy_schwarz_margin,"
           "weighted_enstrophy,sup_omega,bkm_integral,odd_defect_omega,even_defect_theta,"
           "endpoint_omega,min_omega_half,min_thetax_half,sup_thetax,sup_theta,tail_energy_fraction,resolved";
}

std::string csv_row(const DiagnosticRecord& r) {
    const double cols[] = {r.t,
                           r.E,
                           r.F,
                           r.G,
                           r.F_dot_measured,
                           r.riccati_margin,
                           r.strong_margin,
                           r.cauchy_schwarz_margin,
                           r.weighted_enstrophy,
                           r.sup_omega,
                           r.bkm_integral,
                           r.odd_defect_omega,
                           r.even_defect_theta,
                           r.endpoint_omega,
                           r.min_omega_half,
                           r.min_thetax_half,
                           r.sup_thetax,
                           r.sup_theta,
                           r.tail_energy_fraction};
    std::string out;
    for (double v : cols) {
        append_number(out, v);
        out += ',';
    }
    out += r.resolved ? '1' : '0';
    return out;
}

double energy(const EvolutionState& s, double c) {
    if (!s.theta) throw std::invalid_argument("model has no θ");
    PeriodicField density(s.grid());
    for (std::size_t j = 0; j < density.size(); ++j) {
        const double u = -c * s.omega[j];
        density[j] = 0.5 * u * u - c * (*s.theta)[j];
    }
    return density.integral();
}

double functional_F(const PeriodicField& omega, double c) {
    return c * half_period_weighted_integral(omega, SingularWeight::inv_x);
}

double functional_G(const PeriodicField& theta, double c) {
    return c * half_period_weighted_integral(spectral::derivative(theta), SingularWeight::inv_x);
}

double parity_defect(const PeriodicField& f, double sign) {
    const auto& g = f.grid();
    double worst = 0.0;
    // x -> -x and L/2 + y -> L/2 - y are the same node map j -> n - j on the
    // periodic grid, so one pass covers both symmetry points.
    for (std::size_t j = 0; j < g.size(); ++j) {
        worst = std::max(worst, std::abs(f[j] + sign * f[g.mirror(j)]));
    }
    return worst / std::max(f.sup_norm(), kFloor);
}

SymmetryReport symmetry_and_sign_monitor(const EvolutionState& s) {
    const auto& g = s.grid();
    const std::size_t n = g.size();
    const std::size_t origin = g.origin_index();
    SymmetryReport rep;
    rep.odd_defect_omega = parity_defect(s.omega, +1.0);
    rep.endpoint_omega = std::max(std::abs(s.omega[origin]), std::abs(s.omega[0]));

    double min_w = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= n / 2; ++i) min_w = std::min(min_w, s.omega[(origin + i) % n]);
    rep.min_omega_half = min_w;

    if (s.theta) {
        rep.even_defect_theta = parity_defect(*s.theta, -1.0);
        const PeriodicField tx = spectral::derivative(*s.theta);
        double min_tx = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i <= n / 2; ++i) min_tx = std::min(min_tx, tx[(origin + i) % n]);
        rep.min_thetax_half = min_tx;
        rep.sup_thetax = tx.sup_norm();
    }
    return rep;
}

double functional_coefficient(const ModelSpec& model) { return model.local_coefficient().value_or(1.0); }

DiagnosticRecord instantaneous_diagnostics(const ModelSpec& model, const EvolutionState& s) {
    const double c = functional_coefficient(model);
    const double L = s.grid().period();
    DiagnosticRecord r;
    r.t = s.time;
    r.sup_omega = s.omega.sup_norm();

    r.E = s.theta ? energy(s, c) : kNaN;

    const double w0 = s.omega[s.grid().origin_index()];
    if (std::abs(w0) <= 1e-10 * r.sup_omega) {
        r.F = c * half_period_weighted_integral_unchecked(s.omega, SingularWeight::inv_x);
        r.weighted_enstrophy = half_period_weighted_integral_unchecked(s.omega, SingularWeight::inv_x_squared);
        r.cauchy_schwarz_margin = c * c * 0.5 * L * r.weighted_enstrophy - r.F * r.F;
    } else {
        r.F = kNaN;
        r.weighted_enstrophy = kNaN;
        r.cauchy_schwarz_margin = kNaN;
    }

    if (s.theta) {
        const PeriodicField tx = spectral::derivative(*s.theta);
        const double tx0 = tx[s.grid().origin_index()];
        r.G = std::abs(tx0) <= 1e-10 * std::max(tx.sup_norm(), kFloor) || tx.sup_norm() == 0.0
                  ? c * half_period_weighted_integral_unchecked(tx, SingularWeight::inv_x)
                  : kNaN;
    } else {
        r.G = kNaN;
    }

    const SymmetryReport sym = symmetry_and_sign_monitor(s);
    r.odd_defect_omega = sym.odd_defect_omega;
    r.even_defect_theta = sym.even_defect_theta;
    r.endpoint_omega = sym.endpoint_omega;
    r.min_omega_half = sym.min_omega_half;
    r.min_thetax_half = sym.min_thetax_half;
    r.sup_thetax = sym.sup_thetax;
    r.sup_theta = s.theta ? s.theta->sup_norm() : 0.0;

    double tail = spectral::tail_energy_fraction(s.omega);
    if (s.theta) tail = std::max(tail, spectral::tail_energy_fraction(*s.theta));
    r.tail_energy_fraction = tail;
    r.resolved = tail < kResolvedTailThreshold;

    r.F_dot_measured = kNaN;
    r.riccati_margin = kNaN;
    r.strong_margin = kNaN;
    return r;
}

namespace {

// Second-order derivative of F at sample i on a non-uniform three-point stencil;
// centered in the interior, one-sided at the two ends.
double f_dot_at(std::span<const DiagnosticRecord> r, std::size_t i) {
    const std::size_t last = r.size() - 1;
    const std::size_t mid = std::clamp<std::size_t>(i, 1, last - 1);
    const double t0 = r[mid - 1].t, t1 = r[mid].t, t2 = r[mid + 1].t;
    const double t = r[i].t;
    // Derivative of the quadratic interpolant through the three samples, at t.
    const double d0 = (2.0 * t - t1 - t2) / ((t0 - t1) * (t0 - t2));
    const double d1 = (2.0 * t - t0 - t2) / ((t1 - t0) * (t1 - t2));
    const double d2 = (2.0 * t - t0 - t1) / ((t2 - t0) * (t2 - t1));
    return d0 * r[mid - 1].F + d1 * r[mid].F + d2 * r[mid + 1].F;
}

RiccatiSample margins_at(std::span<const DiagnosticRecord> records, std::size_t i, double c, double L) {
    const auto& b = records[i];
    RiccatiSample s;
    s.t = b.t;
    s.F = b.F;
    s.F_dot = f_dot_at(records, i);
    s.riccati_margin = s.F_dot - b.F * b.F / L;
    s.strong_margin = s.F_dot - 0.5 * c * c * b.weighted_enstrophy;
    s.cauchy_schwarz_margin = c * c * 0.5 * L * b.weighted_enstrophy - b.F * b.F;
    return s;
}

}  // namespace

std::vector<RiccatiSample> riccati_audit(std::span<const DiagnosticRecord> records, double c, double L) {
    if (records.size() < 3) throw std::invalid_argument("riccati_audit needs at least 3 samples");
    std::vector<RiccatiSample> out;
    out.reserve(records.size() - 2);
    for (std::size_t i = 1; i + 1 < records.size(); ++i) out.push_back(margins_at(records, i, c, L));
    return out;
}

void apply_riccati_audit(std::vector<DiagnosticRecord>& records, double c, double L) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& r = records[i];
        if (records.size() < 3) {
            r.F_dot_measured = r.riccati_margin = r.strong_margin = kNaN;
            continue;
        }
        const RiccatiSample s = margins_at(records, i, c, L);
        r.F_dot_measured = s.F_dot;
        r.riccati_margin = s.riccati_margin;
        r.strong_margin = s.strong_margin;
    }
}

}  // namespace bjlab
