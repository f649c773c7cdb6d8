#pragma once

#include "bjlab/config.hpp"
#include "bjlab/evolve.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bjlab {

/// One invariant check over a run. worst is the most adverse normalized value
/// observed; the check passes when worst <= tolerance.
struct AuditResult {
    std::string name;
    bool passed = true;
    double worst = 0.0;
    double tolerance = 0.0;
    std::size_t samples = 0;
};

/// Tolerances applied to theorem-hypotheses runs of the local model.
struct AuditTolerances {
    double bound_slack = 0.05;        // T* <= (1 + slack) L / F(0)
    double riccati = 1e-4;            // F_dot - F^2/L >= -tol * max(F^2, 1)
    double cauchy_schwarz = 1e-9;     // margin >= -tol * F^2
    double envelope = 1e-3;           // 1/F(t) <= 1/F(0) - t/L + tol
    double f_monotone = 1e-6;         // F(t_{i+1}) >= F(t_i) - tol * max(1, |F|)
    double g_nonnegative = 1e-9;      // G >= -tol * max(1, max |G|)
    double energy = 1e-6;             // |E - E0| <= tol * max(|E0|, 1)
    double symmetry = 1e-9;           // parity defects
    double endpoint = 1e-9;           // |omega(0)|, |omega(L/2)| <= tol * ||omega||
    double sign = 1e-8;               // min omega, min theta_x on [0, L/2] >= -tol * sup
    double theta_max_drift = 1e-9;    // max|theta| growth per unit time, relative
};

/// Blow-up time report for a finished run.
struct BlowupSummary {
    /// L / F(omega0, c) when the Q0 data have F(0) > 0.
    std::optional<double> bound;
    std::optional<double> t_star;
    /// "pole_fit", "termination_time", or "none".
    std::string t_star_method = "none";
    PoleFit pole_fit;
    std::optional<double> first_unresolved_time;
};

/// The pole fit when it is accepted; otherwise the breakdown time of a run that
/// ended by sup cap or dt underflow.
BlowupSummary summarize_blowup(const RunResult& run, const ModelSpec& model, const EvolutionState& init,
                               const EstimatorOptions& opts = {});

/// Finite-time blow-up audit suite: bound, inequality chain, conservation,
/// symmetry and sign preservation. Invariants of smooth solutions are
/// evaluated on the resolved prefix of the run only.
std::vector<AuditResult> audit_theorem_run(const RunResult& run, const EvolutionState& init,
                                           const StepperConfig& stepper, const BlowupSummary& summary,
                                           const AuditTolerances& tol = {});

bool all_passed(const std::vector<AuditResult>& audits);

}  // namespace bjlab
