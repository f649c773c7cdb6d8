#pragma once

#include "bjlab/spectral.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace bjlab {

namespace models {

/// omega_t = u_x omega, u_x = H omega
struct Clm {};
/// omega_t + u omega_x = u_x omega, u_x = H omega
struct DeGregorio {};
/// omega_t + u omega_x = 0, u = H omega
struct Ccf {};
/// omega_t + a u omega_x = u_x omega, u_x = H omega
struct Okamoto {
    double a_ok = 1.0;
};
/// omega_t + u omega_x = theta_x, theta_t + u theta_x = 0, u_x = H omega
struct HouLuo {};
/// Same dynamics as HouLuo with -u(x) = x * int_|x|^X omega(y)/y dy on [-X, X], u = 0 beyond.
struct Cky {
    double truncation_X = 1.0;
};
/// Local law u = -c omega.
struct Q0 {
    double c = 1.0 / 3.0;
};

}  // namespace models

enum class ModelKind { CLM, DeGregorio, CCF, Okamoto, HouLuo, CKY, Q0 };

std::string_view to_string(ModelKind kind);
/// Case-sensitive name lookup ("CLM", "DeGregorio", ...); nullopt if unknown.
std::optional<ModelKind> parse_model_kind(std::string_view name);

class ModelSpec {
public:
    using Variant = std::variant<models::Clm, models::DeGregorio, models::Ccf, models::Okamoto,
                                 models::HouLuo, models::Cky, models::Q0>;

    static ModelSpec clm() { return ModelSpec(models::Clm{}); }
    static ModelSpec de_gregorio() { return ModelSpec(models::DeGregorio{}); }
    static ModelSpec ccf() { return ModelSpec(models::Ccf{}); }
    static ModelSpec okamoto(double a_ok = 1.0) { return ModelSpec(models::Okamoto{a_ok}); }
    static ModelSpec hou_luo() { return ModelSpec(models::HouLuo{}); }
    /// Throws std::invalid_argument unless truncation_X > 0.
    static ModelSpec cky(double truncation_X);
    /// Throws std::invalid_argument unless c > 0.
    static ModelSpec q0(double c);

    ModelKind kind() const;
    bool has_theta() const;
    const Variant& variant() const { return model_; }
    /// c of the local law; only meaningful for Q0.
    std::optional<double> local_coefficient() const;

private:
    explicit ModelSpec(Variant v) : model_(v) {}
    Variant model_;
};

/// Normal-jet closure phi_qq(x,1) = a_jet * phi_q(x,1) for the m-reduced strip system.
struct ClosureParams {
    int m = 1;
    double a_jet = 0.0;
};

/// c = 1/(2 a_jet + m + 2). Throws std::domain_error("positivity condition violated")
/// when 2 a_jet + m + 2 <= 0, std::invalid_argument when m is not 1 or 2.
double closure_coefficient(const ClosureParams& p);

/// (omega, theta, t). theta is present iff the model carries it.
struct EvolutionState {
    PeriodicField omega;
    std::optional<PeriodicField> theta;
    double time = 0.0;

    const PeriodicGrid& grid() const { return omega.grid(); }
    bool all_finite() const;
};

/// Throws std::invalid_argument if theta presence disagrees with the model or grids differ.
void check_consistent(const ModelSpec& model, const EvolutionState& s);

/// Time derivative of (omega, theta); time is carried as 1 (d t / d t).
struct StateRate {
    PeriodicField omega_dot;
    std::optional<PeriodicField> theta_dot;
};

struct RhsOptions {
    /// Apply the 2/3 filter to the nonlinear products.
    bool dealias = false;
};

/// Velocity u recovered from omega by the model's Biot-Savart law.
PeriodicField biot_savart(const ModelSpec& model, const PeriodicField& omega);

StateRate rhs(const ModelSpec& model, const EvolutionState& s, const RhsOptions& opts = {});

/// theta reconstructed as rho = sqrt(theta) where theta >= -1e-12 (clamped at 0); NaN elsewhere.
PeriodicField reconstruct_rho(const PeriodicField& theta);

}  // namespace bjlab
