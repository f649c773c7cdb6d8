#pragma once

#include "bjlab/spectral.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bjlab::jet {

/// Periodic x grid times the uniform q grid 0 = q_0 < ... < q_M = 1.
class StripGrid {
public:
    StripGrid(PeriodicGrid x_grid, std::size_t M);

    const PeriodicGrid& x_grid() const { return x_; }
    std::size_t M() const { return M_; }
    std::size_t q_points() const { return M_ + 1; }
    double dq() const { return 1.0 / static_cast<double>(M_); }
    double q(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(M_); }

    bool operator==(const StripGrid&) const = default;

private:
    PeriodicGrid x_;
    std::size_t M_;
};

/// Row-major samples: value(i, j) at (x_i, q_j), index i * (M+1) + j.
class StripField {
public:
    explicit StripField(StripGrid grid);
    StripField(StripGrid grid, std::vector<double> values);

    static StripField sample(const StripGrid& grid, const std::function<double(double, double)>& f);

    const StripGrid& grid() const { return grid_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * grid_.q_points() + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * grid_.q_points() + j]; }
    std::span<const double> values() const { return values_; }

    /// Row q = q_j as a periodic field in x.
    PeriodicField q_slice(std::size_t j) const;
    void set_q_slice(std::size_t j, const PeriodicField& f);

    double sup_norm() const;
    bool all_finite() const;

private:
    StripGrid grid_;
    std::vector<double> values_;
};

/// Solves omega = -(d_x^2 + 4q d_q^2 + (4+2m) d_q) phi with phi(x,1) = 0.
/// Fourier in x; second-order centered differences in q; at q = 0 the
/// equation itself, (4+2m) phi_q - k^2 phi = -omega_hat, closes the system
/// (phi_q one-sided, second order). Throws std::invalid_argument for m not
/// in {1,2} and std::runtime_error("degenerate system") on a zero pivot.
StripField solve_elliptic(int m, const StripField& omega);

/// max over interior nodes (0 < q < 1) of |-(D_xx + 4q D_qq + (4+2m) D_q) phi - omega|,
/// with the solver's own stencils (spectral D_xx).
double elliptic_residual(int m, const StripField& phi, const StripField& omega);

enum class JetRoute { pde, difference };

struct JetRecord {
    PeriodicField phi1;            // phi_q(x, 1)
    PeriodicField phi2;            // phi_qq(x, 1)
    PeriodicField omega_boundary;  // omega(x, 1)
    int m = 1;
};

/// phi1 by the one-sided fourth-order difference at q = 1; phi2 from the
/// boundary equation (-omega - (4+2m) phi1)/4 (pde) or from the one-sided
/// second-order difference (difference).
JetRecord extract_jets(const StripField& phi, const StripField& omega, int m, JetRoute route = JetRoute::pde);

/// ||omega + 4 phi2 + 2(m+2) phi1||_inf / max(||omega||_inf, 1e-300).
double jet_relation_residual(const JetRecord& jets);

/// ||phi2 - a_jet phi1||_inf / max(||phi1||_inf, 1e-300).
double closure_residual(const JetRecord& jets, double a_jet);

/// v = phi_x (spectral); g = m phi + 2 q phi_q, centered inside, one-sided second order at q = 0 and 1.
std::pair<StripField, StripField> compute_velocities(const StripField& phi, int m);

// ---- coordinate-change identities ----------------------------------------

/// Smooth test function phi(z, q) with hand-coded derivatives, and
/// psi(z, r) = r phi(z, r^2) with hand-coded r-derivatives.
struct CatalogFunction {
    std::string id;
    std::function<double(double, double)> phi, phi_zz, phi_q, phi_qq;
    std::function<double(double, double)> psi, psi_zz, psi_r, psi_rr;
};

const std::vector<CatalogFunction>& identity_catalog();
/// Throws std::invalid_argument("unknown test function: <id>").
const CatalogFunction& catalog_function(std::string_view id);

struct OperatorSides {
    double cylindrical = 0.0;   // from psi(z, r)
    double strip = 0.0;         // -(phi_zz + 4q phi_qq + (4+2m) phi_q) at q = r^2
    double vorticity_chain = 0.0;   // r * (-d_z v - 2 d_q g), compared with r * strip
    double vorticity_cyl = 0.0; // m = 2: d_z v^r - d_r v^z from psi; m = 1: r * cylindrical
};

OperatorSides evaluate_operator_sides(int m, const CatalogFunction& f, double z, double r);

/// Max discrepancy between the cylindrical and (z,q) operators and the vorticity
/// chains on a point cloud z in [0, 2pi), r in (0, 1].
double operator_identity_check(int m, std::string_view test_id);

// ---- strip I/O -------------------------------------------------------------

/// Binary layout, little-endian: uint64 n, uint64 M, float64 L, then
/// n*(M+1) float64 values in row-major (x-major) order. A JSON sidecar
/// <path>.json carries the same header plus metadata.
void write_strip(const std::filesystem::path& path, const StripField& f, std::string_view name, int m);
StripField read_strip(const std::filesystem::path& path);

}  // namespace bjlab::jet
