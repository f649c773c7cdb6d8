#include "bjlab/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace bjlab {

namespace fs = std::filesystem;
using nlohmann::json;

void prepare_output_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());
    const fs::path probe = dir / ".bjlab_write_probe";
    {
        std::ofstream os(probe);
        if (!(os << "probe")) throw OutputError("output directory not writable: " + dir.string());
    }
    fs::remove(probe, ec);
}

void write_diagnostics_csv(const fs::path& file, const std::vector<DiagnosticRecord>& records) {
    std::ofstream os(file);
    if (!os) throw OutputError("cannot open " + file.string());
    os << csv_header() << '\n';
    for (const auto& r : records) os << csv_row(r) << '\n';
    if (!os) throw OutputError("write failed: " + file.string());
}

namespace {

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::vector<fs::path> write_snapshots(const fs::path& dir, const RunResult& run, const ModelSpec& model,
                                      const std::vector<double>& times) {
    std::vector<fs::path> written;
    if (run.states.empty()) return written;
    for (std::size_t s = 0; s < times.size(); ++s) {
        const EvolutionState* pick = nullptr;
        for (const auto& st : run.states) {
            if (st.time >= times[s]) {
                pick = &st;
                break;
            }
        }
        if (pick == nullptr) continue;
        const PeriodicField u = biot_savart(model, pick->omega);
        const fs::path file = dir / ("snapshot_" + std::to_string(s) + ".csv");
        std::ofstream os(file);
        if (!os) throw OutputError("cannot open " + file.string());
        os << "# t=" << fmt17(pick->time) << '\n' << "x,omega,theta,u\n";
        const auto& g = pick->grid();
        for (std::size_t j = 0; j < g.size(); ++j) {
            os << fmt17(g.node(j)) << ',' << fmt17(pick->omega[j]) << ','
               << (pick->theta ? fmt17((*pick->theta)[j]) : std::string("nan")) << ',' << fmt17(u[j]) << '\n';
        }
        written.push_back(file);
    }
    return written;
}

json build_run_report(const ExperimentConfig& cfg, const ExperimentOutcome& o) {
    const BlowupSummary& s = o.summary;
    json rep = {
        {"config", cfg.echo},
        {"termination", std::string(to_string(o.run.termination))},
        {"t_final", o.run.t_final},
        {"steps", o.run.steps},
        {"samples", o.run.diagnostics.size()},
        {"first_unresolved_time", optional_number(s.first_unresolved_time)},
        {"estimated_blowup_time", optional_number(s.t_star)},
        {"estimated_blowup_method", s.t_star_method},
        {"pole_fit",
         {{"blowup_time", optional_number(s.pole_fit.blowup_time)},
          {"slope", s.pole_fit.slope},
          {"intercept", s.pole_fit.intercept},
          {"relative_residual", s.pole_fit.relative_residual},
          {"samples_used", s.pole_fit.samples_used}}},
        {"theoretical_bound", optional_number(s.bound)},
    };
    if (s.bound && s.t_star) {
        rep["t_star_within_bound"] = *s.t_star <= *s.bound;
    } else {
        rep["t_star_within_bound"] = nullptr;
    }
    json audits = json::array();
    for (const auto& a : o.audits) {
        audits.push_back({{"name", a.name},
                          {"passed", a.passed},
                          {"worst", std::isfinite(a.worst) ? json(a.worst) : json(nullptr)},
                          {"tolerance", a.tolerance},
                          {"samples", a.samples}});
    }
    rep["audits"] = audits;
    rep["audits_passed"] = all_passed(o.audits);
    return rep;
}

void emit_outputs(const ExperimentOutcome& outcome, const ExperimentConfig& cfg) {
    const fs::path& dir = cfg.outputs.directory;
    prepare_output_directory(dir);
    write_diagnostics_csv(dir / "diagnostics.csv", outcome.run.diagnostics);
    write_snapshots(dir, outcome.run, cfg.model, cfg.outputs.snapshot_times);
    std::ofstream js(dir / "run.json");
    js << outcome.report.dump(2) << '\n';
    if (!js) throw OutputError("write failed: " + (dir / "run.json").string());
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
    prepare_output_directory(cfg.outputs.directory);
    ExperimentOutcome o{RunResult{}, initial_state(cfg), BlowupSummary{}, {}, json::object()};
    if (cfg.theorem_hypotheses) validate_theorem_hypotheses(cfg, o.init);
    o.run = run(cfg.model, o.init, cfg.stepper);
    o.summary = summarize_blowup(o.run, cfg.model, o.init, cfg.estimator);
    if (cfg.theorem_hypotheses) o.audits = audit_theorem_run(o.run, o.init, cfg.stepper, o.summary);
    o.report = build_run_report(cfg, o);
    emit_outputs(o, cfg);
    return o;
}

}  // namespace bjlab
