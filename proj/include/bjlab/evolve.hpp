#pragma once

#include "bjlab/diagnostics.hpp"
#include "bjlab/models.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace bjlab {

struct StepperConfig {
    double cfl = 0.4;
    double dt_min = 1e-12;
    double dt_max = 1e-2;
    double t_end = 10.0;
    double omega_sup_cap = 1e6;
    int record_every = 10;
    bool dealias = false;
    /// Keep the state at every recorded sample in RunResult::states.
    bool keep_states = true;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class Termination { reached_t_end, sup_cap_hit, dt_underflow };
std::string_view to_string(Termination t);

struct RunResult {
    std::vector<EvolutionState> states;  // empty unless keep_states
    std::vector<DiagnosticRecord> diagnostics;
    Termination termination = Termination::reached_t_end;
    double t_final = 0.0;
    long steps = 0;
    /// Time of the first sample whose spectral tail exceeded the resolution threshold.
    std::optional<double> first_unresolved_time;

    /// Samples with resolved == true (a prefix of diagnostics).
    std::span<const DiagnosticRecord> resolved_diagnostics() const;
};

/// Classical four-stage Runge-Kutta step. Throws std::overflow_error("numerical
/// overflow in stage") if any stage produces a non-finite value.
EvolutionState step_rk4(const ModelSpec& model, const EvolutionState& s, double dt, const RhsOptions& opts = {});

/// dt = clamp(cfl * dx / max(||u||_inf, eps), dt_min, dt_max), shortened to land on t_end.
/// Terminates on t_end, on ||omega||_inf > omega_sup_cap, or when the CFL step falls below dt_min.
RunResult run(const ModelSpec& model, const EvolutionState& init, const StepperConfig& cfg);

struct EstimatorOptions {
    double fit_fraction = 0.25;
    /// RMS fit residual relative to max |1/||omega|||| over the window.
    double max_relative_residual = 0.05;
};

struct PoleFit {
    std::optional<double> blowup_time;
    double slope = 0.0;
    double intercept = 0.0;
    double relative_residual = 0.0;
    std::size_t samples_used = 0;
};

/// Least-squares fit of 1/||omega||_inf against t over the final fraction of samples.
/// Throws std::invalid_argument for fewer than 8 samples or non-increasing t.
PoleFit fit_blowup_pole(std::span<const std::pair<double, double>> sup_series, const EstimatorOptions& opts = {});

/// Root of the pole fit, or nullopt ("no blow-up detected").
std::optional<double> estimate_blowup_time(std::span<const std::pair<double, double>> sup_series,
                                           const EstimatorOptions& opts = {});

/// (t, sup_omega) pairs of a run's diagnostics.
std::vector<std::pair<double, double>> sup_series(const RunResult& r);

}  // namespace bjlab
