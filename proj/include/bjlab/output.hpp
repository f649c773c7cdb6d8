#pragma once

#include "bjlab/audit.hpp"
#include "bjlab/config.hpp"
#include "bjlab/evolve.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <vector>

namespace bjlab {

/// Output directory cannot be created or written.
class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Creates the directory and probes it with a temporary file. Throws OutputError.
void prepare_output_directory(const std::filesystem::path& dir);

void write_diagnostics_csv(const std::filesystem::path& file, const std::vector<DiagnosticRecord>& records);

/// snapshot_<i>.csv with columns x, omega, theta, u for the first recorded state
/// at or after each requested time. Returns the files written.
std::vector<std::filesystem::path> write_snapshots(const std::filesystem::path& dir, const RunResult& run,
                                                   const ModelSpec& model, const std::vector<double>& times);

struct ExperimentOutcome {
    RunResult run;
    EvolutionState init;
    BlowupSummary summary;
    std::vector<AuditResult> audits;  // empty unless theorem-hypotheses
    nlohmann::json report;            // contents of run.json
};

/// run.json document for a finished run.
nlohmann::json build_run_report(const ExperimentConfig& cfg, const ExperimentOutcome& outcome);

/// Writes diagnostics.csv, run.json and snapshots into cfg.outputs.directory.
void emit_outputs(const ExperimentOutcome& outcome, const ExperimentConfig& cfg);

/// Pre-flight, run, summarize, audit (theorem-hypotheses runs), emit.
/// ConfigError, OutputError and numerical errors propagate.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

}  // namespace bjlab
