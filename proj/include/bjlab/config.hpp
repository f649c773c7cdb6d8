#pragma once

#include "bjlab/evolve.hpp"
#include "bjlab/models.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bjlab {

/// Configuration problem tied to a dotted field path such as "model.a_jet".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)), message_(message) {}

    const std::string& path() const { return path_; }
    const std::string& message() const { return message_; }

private:
    std::string path_;
    std::string message_;
};

struct FourierMode {
    int k = 1;
    double cos = 0.0;
    double sin = 0.0;
};

/// Named initial-data generator. With x~ = 2 pi x / L:
///   zero            -> 0
///   sin_fundamental -> sin(x~)
///   sin_k           -> sin(k x~)
///   custom_fourier  -> constant + sum_k (cos_k cos(k x~) + sin_k sin(k x~))
struct InitialData {
    std::string generator = "zero";
    int k = 1;
    double constant = 0.0;
    std::vector<FourierMode> modes;

    PeriodicField generate(const PeriodicGrid& grid) const;
};

struct OutputConfig {
    std::filesystem::path directory = "out";
    std::vector<double> snapshot_times;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ModelSpec model = ModelSpec::q0(1.0 / 3.0);
    /// Set when the Q0 coefficient came from (m, a_jet).
    std::optional<ClosureParams> closure;
    std::size_t n = 1024;
    double L = 2.0;
    InitialData omega0{.generator = "sin_fundamental", .modes = {}};
    InitialData theta0{.generator = "zero", .modes = {}};
    StepperConfig stepper;
    EstimatorOptions estimator;
    OutputConfig outputs;
    bool theorem_hypotheses = false;
    /// Parsed document with defaults filled in (echoed to run.json).
    nlohmann::json echo;

    PeriodicGrid grid() const { return PeriodicGrid(n, L); }
};

/// Parses a JSON configuration document. Unknown keys are rejected.
/// Throws ConfigError with the offending field path.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Initial EvolutionState (theta only when the model carries it).
EvolutionState initial_state(const ExperimentConfig& cfg);

/// For runs tagged "theorem-hypotheses": model is Q0, omega0 odd and theta0
/// even about 0 and L/2 (defects <= 1e-12), omega0 >= 0 and theta0_x >= 0 on
/// [0, L/2], and F(0) > 0. Throws ConfigError.
void validate_theorem_hypotheses(const ExperimentConfig& cfg, const EvolutionState& init);

/// Sets a dotted path ("model.a_jet") inside a JSON document, creating objects as needed.
void set_by_path(nlohmann::json& doc, std::string_view dotted, const nlohmann::json& value);

}  // namespace bjlab
