#pragma once

#include "bjlab/models.hpp"

#include <span>
#include <string>
#include <vector>

namespace bjlab {

/// Per-sample scalars along a run. Quantities that are undefined for the
/// model or state (E and G without theta, F when omega(0) != 0) are NaN and
/// written as "nan".
struct DiagnosticRecord {
    double t = 0.0;
    double E = 0.0;
    double F = 0.0;
    double G = 0.0;
    double F_dot_measured = 0.0;
    double riccati_margin = 0.0;   // F_dot - F^2/L
    double strong_margin = 0.0;    // F_dot - (c^2/2) * weighted_enstrophy
    double cauchy_schwarz_margin = 0.0;  // c^2 (L/2) weighted_enstrophy - F^2
    double weighted_enstrophy = 0.0;     // int_0^{L/2} omega^2/x^2 dx
    double sup_omega = 0.0;
    double bkm_integral = 0.0;  // int_0^t ||omega||_inf ds
    double odd_defect_omega = 0.0;
    double even_defect_theta = 0.0;
    double endpoint_omega = 0.0;
    double min_omega_half = 0.0;
    double min_thetax_half = 0.0;
    double sup_thetax = 0.0;
    double sup_theta = 0.0;
    double tail_energy_fraction = 0.0;
    bool resolved = true;
};

/// Fixed CSV column order; matches csv_row.
std::string csv_header();
/// One row, values printed with %.17g (nan for undefined values).
std::string csv_row(const DiagnosticRecord& r);

/// E = int (u^2/2 - c theta) dx over one period with u = -c omega.
/// Throws std::invalid_argument("model has no θ") when theta is absent.
double energy(const EvolutionState& s, double c);

/// F = c int_0^{L/2} omega/x dx. Throws std::domain_error("singular integrand") if omega(0) != 0.
double functional_F(const PeriodicField& omega, double c);
/// G = c int_0^{L/2} theta_x/x dx.
double functional_G(const PeriodicField& theta, double c);

struct SymmetryReport {
    double odd_defect_omega = 0.0;
    double even_defect_theta = 0.0;
    double endpoint_omega = 0.0;
    double min_omega_half = 0.0;
    double min_thetax_half = 0.0;
    double sup_thetax = 0.0;
};

/// Parity defects about x = 0 and x = L/2 and signs on [0, L/2].
SymmetryReport symmetry_and_sign_monitor(const EvolutionState& s);

/// Normalized ||f(x) + sign * f(-x)||_inf / max(||f||_inf, 1e-300) over both symmetry points.
double parity_defect(const PeriodicField& f, double sign);

/// Weight c used in F, G, E: the local-law coefficient for Q0, 1 otherwise.
double functional_coefficient(const ModelSpec& model);

/// Instantaneous fields of a DiagnosticRecord (no time derivative, bkm left at 0).
DiagnosticRecord instantaneous_diagnostics(const ModelSpec& model, const EvolutionState& s);

/// Threshold on tail_energy_fraction separating resolved from under-resolved states.
inline constexpr double kResolvedTailThreshold = 1e-8;

struct RiccatiSample {
    double t = 0.0;
    double F = 0.0;
    double F_dot = 0.0;
    double riccati_margin = 0.0;
    double strong_margin = 0.0;
    double cauchy_schwarz_margin = 0.0;
};

/// Centered (non-uniform three-point) differences of F at interior samples.
/// Throws std::invalid_argument with fewer than 3 samples.
std::vector<RiccatiSample> riccati_audit(std::span<const DiagnosticRecord> records, double c, double L);

/// Writes F_dot_measured and the margins into the records; one-sided stencils at the two ends.
void apply_riccati_audit(std::vector<DiagnosticRecord>& records, double c, double L);

}  // namespace bjlab
