#include "bjlab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bjlab {

void StepperConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("stepper." + field + ": " + why);
    };
    if (!(cfl > 0.0 && cfl <= 1.0)) fail("cfl", "must lie in (0, 1]");
    if (!(dt_min > 0.0)) fail("dt_min", "must be positive");
    if (!(dt_max > 0.0)) fail("dt_max", "must be positive");
    if (dt_min > dt_max) fail("dt_min", "must not exceed dt_max");
    if (!(t_end > 0.0)) fail("t_end", "must be positive");
    if (!(omega_sup_cap > 0.0)) fail("omega_sup_cap", "must be positive");
    if (record_every < 1) fail("record_every", "must be a positive integer");
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::reached_t_end: return "reached_t_end";
        case Termination::sup_cap_hit: return "sup_cap_hit";
        case Termination::dt_underflow: return "dt_underflow";
    }
    return "unknown";
}

std::span<const DiagnosticRecord> RunResult::resolved_diagnostics() const {
    std::size_t k = 0;
    while (k < diagnostics.size() && diagnostics[k].resolved) ++k;
    return {diagnostics.data(), k};
}

namespace {

EvolutionState advance(const EvolutionState& s, double h, const StateRate& k) {
    EvolutionState out{axpy(s.omega, h, k.omega_dot), std::nullopt, s.time + h};
    if (s.theta) out.theta = axpy(*s.theta, h, *k.theta_dot);
    return out;
}

void check_stage(const EvolutionState& s) {
    if (!s.omega.all_finite() || (s.theta && !s.theta->all_finite())) {
        throw std::overflow_error("numerical overflow in stage");
    }
}

}  // namespace

EvolutionState step_rk4(const ModelSpec& model, const EvolutionState& s, double dt, const RhsOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
    const StateRate k1 = rhs(model, s, opts);
    const EvolutionState s2 = advance(s, 0.5 * dt, k1);
    check_stage(s2);
    const StateRate k2 = rhs(model, s2, opts);
    const EvolutionState s3 = advance(s, 0.5 * dt, k2);
    check_stage(s3);
    const StateRate k3 = rhs(model, s3, opts);
    const EvolutionState s4 = advance(s, dt, k3);
    check_stage(s4);
    const StateRate k4 = rhs(model, s4, opts);

    const double w = dt / 6.0;
    EvolutionState out = s;
    out.time = s.time + dt;
    for (std::size_t j = 0; j < out.omega.size(); ++j) {
        out.omega[j] += w * (k1.omega_dot[j] + 2.0 * k2.omega_dot[j] + 2.0 * k3.omega_dot[j] + k4.omega_dot[j]);
    }
    if (out.theta) {
        auto& th = *out.theta;
        for (std::size_t j = 0; j < th.size(); ++j) {
            th[j] += w * ((*k1.theta_dot)[j] + 2.0 * (*k2.theta_dot)[j] + 2.0 * (*k3.theta_dot)[j] +
                          (*k4.theta_dot)[j]);
        }
    }
    check_stage(out);
    return out;
}

RunResult run(const ModelSpec& model, const EvolutionState& init, const StepperConfig& cfg) {
    cfg.validate();
    check_consistent(model, init);
    const RhsOptions opts{cfg.dealias};
    const double dx = init.grid().spacing();
    const double c = functional_coefficient(model);
    const double L = init.grid().period();

    RunResult result;
    EvolutionState s = init;
    double bkm = 0.0;
    double sup = s.omega.sup_norm();
    long last_recorded = -1;
    bool still_resolved = true;

    auto record = [&]() {
        DiagnosticRecord r = instantaneous_diagnostics(model, s);
        r.bkm_integral = bkm;
        if (still_resolved && !r.resolved) {
            still_resolved = false;
            result.first_unresolved_time = r.t;
        }
        r.resolved = still_resolved;
        result.diagnostics.push_back(r);
        if (cfg.keep_states) result.states.push_back(s);
        last_recorded = result.steps;
    };

    record();
    const double t_tol = 1e-12 * std::max(1.0, std::abs(cfg.t_end));
    while (true) {
        if (sup > cfg.omega_sup_cap) {
            result.termination = Termination::sup_cap_hit;
            break;
        }
        const double remaining = cfg.t_end - s.time;
        if (remaining <= t_tol) {
            result.termination = Termination::reached_t_end;
            break;
        }
        const double umax = biot_savart(model, s.omega).sup_norm();
        const double dt_cfl = cfg.cfl * dx / std::max(umax, 1e-300);
        if (dt_cfl < cfg.dt_min) {
            result.termination = Termination::dt_underflow;
            break;
        }
        const double dt = std::min(std::min(dt_cfl, cfg.dt_max), remaining);
        s = step_rk4(model, s, dt, opts);
        const double sup_new = s.omega.sup_norm();
        bkm += 0.5 * (sup + sup_new) * dt;
        sup = sup_new;
        ++result.steps;
        if (result.steps % cfg.record_every == 0) record();
    }
    if (last_recorded != result.steps) record();
    result.t_final = s.time;
    apply_riccati_audit(result.diagnostics, c, L);
    return result;
}

PoleFit fit_blowup_pole(std::span<const std::pair<double, double>> series, const EstimatorOptions& opts) {
    if (series.size() < 8) throw std::invalid_argument("estimate_blowup_time needs at least 8 samples");
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (!(series[i].first > series[i - 1].first)) {
            throw std::invalid_argument("estimate_blowup_time: times must be strictly increasing");
        }
    }
    if (!(opts.fit_fraction > 0.0 && opts.fit_fraction <= 1.0)) {
        throw std::invalid_argument("estimate_blowup_time: fit_fraction must lie in (0, 1]");
    }
    const std::size_t n = series.size();
    const auto want = static_cast<std::size_t>(std::ceil(opts.fit_fraction * static_cast<double>(n)));
    const std::size_t used = std::clamp<std::size_t>(want, 4, n);
    const auto window = series.subspan(n - used);

    PoleFit fit;
    fit.samples_used = used;
    for (const auto& [t, s] : window) {
        if (!(s > 0.0) || !std::isfinite(s)) return fit;  // zero or broken series: nothing to fit
    }

    double mt = 0.0, my = 0.0;
    for (const auto& [t, s] : window) {
        mt += t;
        my += 1.0 / s;
    }
    mt /= static_cast<double>(used);
    my /= static_cast<double>(used);
    double stt = 0.0, sty = 0.0, ymax = 0.0;
    for (const auto& [t, s] : window) {
        const double y = 1.0 / s;
        stt += (t - mt) * (t - mt);
        sty += (t - mt) * (y - my);
        ymax = std::max(ymax, std::abs(y));
    }
    fit.slope = sty / stt;
    fit.intercept = my - fit.slope * mt;
    double ss = 0.0;
    for (const auto& [t, s] : window) {
        const double r = 1.0 / s - (fit.intercept + fit.slope * t);
        ss += r * r;
    }
    fit.relative_residual = std::sqrt(ss / static_cast<double>(used)) / std::max(ymax, 1e-300);

    // A slope indistinguishable from roundoff is treated as flat.
    const double flat = 1e-12 * ymax / std::max(window.back().first - window.front().first, 1e-300);
    if (fit.slope < -flat && fit.relative_residual <= opts.max_relative_residual) {
        fit.blowup_time = -fit.intercept / fit.slope;
    }
    return fit;
}

std::optional<double> estimate_blowup_time(std::span<const std::pair<double, double>> series,
                                           const EstimatorOptions& opts) {
    return fit_blowup_pole(series, opts).blowup_time;
}

std::vector<std::pair<double, double>> sup_series(const RunResult& r) {
    std::vector<std::pair<double, double>> out;
    out.reserve(r.diagnostics.size());
    for (const auto& d : r.diagnostics) out.emplace_back(d.t, d.sup_omega);
    return out;
}

}  // namespace bjlab
