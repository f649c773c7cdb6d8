#include "bjlab/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bjlab {

BlowupSummary summarize_blowup(const RunResult& run, const ModelSpec& model, const EvolutionState& init,
                               const EstimatorOptions& opts) {
    BlowupSummary s;
    s.first_unresolved_time = run.first_unresolved_time;
    if (const auto c = model.local_coefficient()) {
        try {
            const double F0 = functional_F(init.omega, *c);
            if (F0 > 0.0) s.bound = init.grid().period() / F0;
        } catch (const std::domain_error&) {
            // omega0(0) != 0: no bound for these data
        }
    }
    const auto series = sup_series(run);
    if (series.size() >= 8) {
        s.pole_fit = fit_blowup_pole(series, opts);
        if (s.pole_fit.blowup_time) {
            s.t_star = s.pole_fit.blowup_time;
            s.t_star_method = "pole_fit";
            return s;
        }
    }
    if (run.termination != Termination::reached_t_end) {
        s.t_star = run.t_final;
        s.t_star_method = "termination_time";
    }
    return s;
}

namespace {

class Check {
public:
    Check(std::string name, double tolerance) {
        r_.name = std::move(name);
        r_.tolerance = tolerance;
    }
    void observe(double value) {
        if (std::isnan(value)) value = std::numeric_limits<double>::infinity();
        r_.worst = r_.samples == 0 ? value : std::max(r_.worst, value);
        ++r_.samples;
    }
    AuditResult finish() {
        r_.passed = r_.worst <= r_.tolerance;
        return r_;
    }

private:
    AuditResult r_;
};

}  // namespace

std::vector<AuditResult> audit_theorem_run(const RunResult& run, const EvolutionState& init,
                                           const StepperConfig& stepper, const BlowupSummary& summary,
                                           const AuditTolerances& tol) {
    const double L = init.grid().period();
    const auto all = std::span<const DiagnosticRecord>(run.diagnostics);
    const auto resolved = run.resolved_diagnostics();
    std::vector<AuditResult> out;

    {
        Check c("blowup_bound", tol.bound_slack);
        if (summary.bound && summary.t_star) {
            c.observe(*summary.t_star / *summary.bound - 1.0);
        } else {
            c.observe(std::numeric_limits<double>::infinity());
        }
        out.push_back(c.finish());
    }
    {
        Check c("termination_before_t_end", 0.0);
        const bool must_blow_up = summary.bound && stepper.t_end > *summary.bound;
        c.observe(must_blow_up && run.termination == Termination::reached_t_end ? 1.0 : 0.0);
        out.push_back(c.finish());
    }
    {
        Check c("riccati_margin", tol.riccati);
        for (std::size_t i = 1; i + 1 < resolved.size(); ++i) {
            const auto& d = resolved[i];
            c.observe(-d.riccati_margin / std::max(d.F * d.F, 1.0));
        }
        out.push_back(c.finish());
    }
    {
        Check c("cauchy_schwarz", tol.cauchy_schwarz);
        for (const auto& d : resolved) c.observe(-d.cauchy_schwarz_margin / std::max(d.F * d.F, 1e-300));
        out.push_back(c.finish());
    }
    if (!resolved.empty()) {
        const double F0 = resolved.front().F;
        Check c("riccati_envelope", tol.envelope);
        for (const auto& d : resolved) c.observe(1.0 / d.F - (1.0 / F0 - (d.t - resolved.front().t) / L));
        out.push_back(c.finish());
    }
    {
        Check c("F_monotone", tol.f_monotone);
        for (std::size_t i = 0; i + 1 < resolved.size(); ++i) {
            c.observe((resolved[i].F - resolved[i + 1].F) / std::max(1.0, std::abs(resolved[i].F)));
        }
        out.push_back(c.finish());
    }
    {
        double gmax = 1.0;
        for (const auto& d : resolved) gmax = std::max(gmax, std::abs(d.G));
        Check c("G_nonnegative", tol.g_nonnegative);
        for (const auto& d : resolved) c.observe(-d.G / gmax);
        out.push_back(c.finish());
    }
    if (!resolved.empty()) {
        const double E0 = resolved.front().E;
        Check c("energy_conservation", tol.energy);
        for (const auto& d : resolved) c.observe(std::abs(d.E - E0) / std::max(std::abs(E0), 1.0));
        out.push_back(c.finish());
    }
    {
        Check c("parity_preservation", tol.symmetry);
        for (const auto& d : all) c.observe(std::max(d.odd_defect_omega, d.even_defect_theta));
        out.push_back(c.finish());
    }
    {
        Check c("endpoint_pinning", tol.endpoint);
        for (const auto& d : all) c.observe(d.endpoint_omega / std::max(d.sup_omega, 1e-300));
        out.push_back(c.finish());
    }
    {
        Check c("omega_sign", tol.sign);
        for (const auto& d : resolved) c.observe(-d.min_omega_half / std::max(d.sup_omega, 1e-300));
        out.push_back(c.finish());
    }
    {
        Check c("theta_x_sign", tol.sign);
        for (const auto& d : resolved) c.observe(-d.min_thetax_half / std::max(d.sup_thetax, 1e-300));
        out.push_back(c.finish());
    }
    if (!resolved.empty()) {
        const double m0 = std::max(resolved.front().sup_theta, 1e-300);
        Check c("theta_max_principle", tol.theta_max_drift);
        c.observe(0.0);
        for (std::size_t i = 0; i + 1 < resolved.size(); ++i) {
            const double dt = resolved[i + 1].t - resolved[i].t;
            c.observe((resolved[i + 1].sup_theta - resolved[i].sup_theta) / (m0 * dt));
        }
        out.push_back(c.finish());
    }
    {
        Check c("bkm_monotone", 0.0);
        c.observe(0.0);
        for (std::size_t i = 0; i + 1 < all.size(); ++i) c.observe(all[i].bkm_integral - all[i + 1].bkm_integral);
        out.push_back(c.finish());
    }
    return out;
}

bool all_passed(const std::vector<AuditResult>& audits) {
    return std::all_of(audits.begin(), audits.end(), [](const AuditResult& a) { return a.passed; });
}

}  // namespace bjlab
