// bjlab: experiment runner for the 1D blow-up models and the strip solver.
//
//   bjlab run-model <config.json> [--out DIR]
//   bjlab sweep <template.json> <grid.json> [--out DIR]
//   bjlab jet-verify <m> <M> <case> [--out DIR] [--write-fields]
//   bjlab identity-check <m>
//
// Exit codes: 0 ok, 1 config error, 2 numerical failure, 3 audit failure.
// BJLAB_WORKERS sets the sweep worker count (default: hardware threads).

#include "bjlab/config.hpp"
#include "bjlab/output.hpp"
#include "bjlab/strip.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

using namespace bjlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kNumerical = 2, kAudit = 3 };

struct RunStatus {
    int code = kOk;
    std::string message;
    std::optional<ExperimentOutcome> outcome;
};

RunStatus execute(const ExperimentConfig& cfg) {
    RunStatus st;
    try {
        st.outcome = run_experiment(cfg);
        if (!all_passed(st.outcome->audits)) {
            st.code = kAudit;
            for (const auto& a : st.outcome->audits) {
                if (!a.passed) st.message += (st.message.empty() ? "audit failed: " : ", ") + a.name;
            }
        }
    } catch (const ConfigError& e) {
        st = {kConfig, std::string("config error: ") + e.what(), std::nullopt};
    } catch (const OutputError& e) {
        st = {kConfig, std::string("output error: ") + e.what(), std::nullopt};
    } catch (const std::invalid_argument& e) {
        st = {kConfig, std::string("invalid input: ") + e.what(), std::nullopt};
    } catch (const std::exception& e) {
        st = {kNumerical, std::string("numerical failure: ") + e.what(), std::nullopt};
    }
    return st;
}

std::string opt_str(const std::optional<double>& v) {
    if (!v) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", *v);
    return buf;
}

void print_summary(const ExperimentConfig& cfg, const RunStatus& st) {
    if (!st.outcome) {
        std::cerr << st.message << '\n';
        return;
    }
    const auto& o = *st.outcome;
    std::cout << cfg.name << ": " << to_string(o.run.termination) << " at t=" << o.run.t_final << " after "
              << o.run.steps << " steps";
    if (o.summary.t_star) std::cout << ", T*=" << *o.summary.t_star << " (" << o.summary.t_star_method << ")";
    if (o.summary.bound) std::cout << ", bound L/F(0)=" << *o.summary.bound;
    std::cout << '\n';
    for (const auto& a : o.audits) {
        std::cout << "  " << (a.passed ? "ok  " : "FAIL") << ' ' << a.name << " worst=" << a.worst
                  << " tol=" << a.tolerance << '\n';
    }
    if (st.code != kOk) std::cerr << st.message << '\n';
}

int cmd_run_model(const std::string& path, const std::string& out) {
    ExperimentConfig cfg;
    try {
        cfg = load_config(path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    }
    if (!out.empty()) cfg.outputs.directory = out;
    const RunStatus st = execute(cfg);
    print_summary(cfg, st);
    return st.code;
}

std::size_t worker_count() {
    if (const char* env = std::getenv("BJLAB_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        std::cerr << "ignoring BJLAB_WORKERS=" << env << '\n';
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

template <class Json = json>
Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read " + path);
    try {
        return Json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", path + ": malformed JSON: " + e.what());
    }
}

std::string run_label(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%03zu", i);
    return buf;
}

int cmd_sweep(const std::string& template_path, const std::string& grid_path, const std::string& out) {
    json base;
    std::vector<std::pair<std::string, std::vector<json>>> axes;
    try {
        base = read_json(template_path);
        // Axes keep their order in the file.
        const auto grid = read_json<nlohmann::ordered_json>(grid_path);
        if (!grid.is_object() || grid.empty()) throw ConfigError("", "parameter grid must be a non-empty object");
        for (const auto& [key, values] : grid.items()) {
            if (!values.is_array() || values.empty()) throw ConfigError(key, "expected a non-empty array of values");
            std::vector<json> vs;
            for (const auto& v : values) vs.push_back(json::parse(v.dump()));
            axes.emplace_back(key, std::move(vs));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    }

    // Cartesian product, last axis fastest.
    std::vector<json> docs;
    std::vector<std::vector<json>> points;
    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
        json doc = base;
        std::vector<json> point;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            set_by_path(doc, axes[a].first, axes[a].second[idx[a]]);
            point.push_back(axes[a].second[idx[a]]);
        }
        set_by_path(doc, "outputs.directory", (fs::path(out) / run_label(docs.size())).string());
        docs.push_back(std::move(doc));
        points.push_back(std::move(point));
        std::size_t a = axes.size();
        while (a > 0 && ++idx[a - 1] == axes[a - 1].second.size()) idx[--a] = 0;
        if (a == 0) break;
    }

    try {
        prepare_output_directory(out);
    } catch (const OutputError& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return kConfig;
    }

    std::vector<RunStatus> results(docs.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < docs.size(); i = next++) {
            RunStatus st;
            ExperimentConfig cfg;
            try {
                cfg = parse_config(docs[i]);
                st = execute(cfg);
            } catch (const ConfigError& e) {
                st = {kConfig, std::string("config error: ") + e.what(), std::nullopt};
            }
            {
                std::lock_guard lk(log_mu);
                std::cout << run_label(i) << " exit " << st.code;
                if (!st.message.empty()) std::cout << " (" << st.message << ')';
                std::cout << '\n';
            }
            results[i] = std::move(st);
        }
    };
    const std::size_t nw = std::min(worker_count(), docs.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < nw; ++w) pool.emplace_back(worker);
    }

    std::ofstream csv(fs::path(out) / "sweep_summary.csv");
    csv << "run";
    for (const auto& ax : axes) csv << ',' << ax.first;
    csv << ",exit_code,termination,t_final,t_star,t_star_method,bound\n";
    int worst = kOk;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& st = results[i];
        worst = std::max(worst, st.code);
        csv << run_label(i);
        for (const auto& v : points[i]) csv << ',' << v.dump();
        csv << ',' << st.code;
        if (st.outcome) {
            const auto& o = *st.outcome;
            csv << ',' << to_string(o.run.termination) << ',' << opt_str(o.run.t_final) << ','
                << opt_str(o.summary.t_star) << ',' << o.summary.t_star_method << ',' << opt_str(o.summary.bound);
        } else {
            csv << ",,,,,";
        }
        csv << '\n';
    }
    std::cout << docs.size() << " runs on " << nw << " workers; summary in "
              << (fs::path(out) / "sweep_summary.csv").string() << '\n';
    return worst;
}

// ---- jet-verify -------------------------------------------------------------

// Manufactured phi(q) sin(x) on the strip with L = 2 pi; omega follows from
// -(d_x^2 + 4q d_q^2 + (4+2m) d_q) phi.
struct Manufactured {
    std::function<double(double)> p, dp, ddp;
    double a_jet;  // closure parameter satisfied by the boundary jets
};

std::optional<Manufactured> manufactured_case(const std::string& name) {
    const double e = std::numbers::e;
    if (name == "linear")
        return Manufactured{[](double q) { return 1 - q; }, [](double) { return -1.0; }, [](double) { return 0.0; },
                            0.0};
    if (name == "quadratic")
        return Manufactured{[](double q) { return (1 - q) + 0.5 * (1 - q) * (1 - q); },
                            [](double q) { return -1 - (1 - q); }, [](double) { return 1.0; }, -1.0};
    if (name == "closure_a1")
        return Manufactured{[](double q) { return (1 - q) - 0.5 * (1 - q) * (1 - q); }, [](double q) { return -q; },
                            [](double) { return -1.0; }, 1.0};
    if (name == "exp")
        return Manufactured{[e](double q) { return std::exp(q) - e; }, [](double q) { return std::exp(q); },
                            [](double q) { return std::exp(q); }, 1.0};
    return std::nullopt;
}

int cmd_jet_verify(int m, std::size_t M, const std::string& name, const std::string& out, bool write_fields) {
    if (m != 1 && m != 2) {
        std::cerr << "config error: m must be 1 or 2\n";
        return kConfig;
    }
    if (M < 16) {
        std::cerr << "config error: M must be >= 16\n";
        return kConfig;
    }
    const auto mc = manufactured_case(name);
    if (!mc) {
        std::cerr << "config error: unknown case '" << name << "' (linear, quadratic, closure_a1, exp)\n";
        return kConfig;
    }
    try {
        prepare_output_directory(out);
        const jet::StripGrid grid(PeriodicGrid(64, 2.0 * std::numbers::pi), M);
        const double b = 4.0 + 2.0 * m;
        const auto phi_exact = jet::StripField::sample(grid, [&](double x, double q) { return mc->p(q) * std::sin(x); });
        const auto omega = jet::StripField::sample(grid, [&](double x, double q) {
            return (mc->p(q) - 4.0 * q * mc->ddp(q) - b * mc->dp(q)) * std::sin(x);
        });
        const auto phi = jet::solve_elliptic(m, omega);
        double err = 0.0;
        for (std::size_t i = 0; i < phi.values().size(); ++i) {
            err = std::max(err, std::abs(phi.values()[i] - phi_exact.values()[i]));
        }
        const auto jets = jet::extract_jets(phi, omega, m, jet::JetRoute::pde);
        const auto jets_fd = jet::extract_jets(phi, omega, m, jet::JetRoute::difference);
        double e1 = 0.0, e2 = 0.0;
        const auto& xg = grid.x_grid();
        for (std::size_t i = 0; i < xg.size(); ++i) {
            const double s = std::sin(xg.node(i));
            e1 = std::max(e1, std::abs(jets.phi1[i] - mc->dp(1.0) * s));
            e2 = std::max(e2, std::abs(jets.phi2[i] - mc->ddp(1.0) * s));
        }
        const double elliptic = jet::elliptic_residual(m, phi, omega) / std::max(omega.sup_norm(), 1e-300);
        const double rel_pde = jet::jet_relation_residual(jets);
        const double rel_fd = jet::jet_relation_residual(jets_fd);
        const double closure = jet::closure_residual(jets, mc->a_jet);

        // Polynomial cases are reproduced exactly by the stencils; exp carries O(dq^2) error.
        const double h2 = grid.dq() * grid.dq();
        const bool poly = name != "exp";
        const double tol_phi = poly ? 1e-6 : 10.0 * h2;
        const double tol_fd = poly ? 1e-5 : 100.0 * h2;
        json report = {
            {"m", m},
            {"M", M},
            {"n", xg.size()},
            {"L", xg.period()},
            {"case", name},
            {"phi_max_error", err},
            {"phi1_max_error", e1},
            {"phi2_max_error", e2},
            {"elliptic_residual_relative", elliptic},
            {"jet_relation_residual_pde", rel_pde},
            {"jet_relation_residual_difference", rel_fd},
            {"closure_a_jet", mc->a_jet},
            {"closure_residual", closure},
            {"tolerances", {{"phi", tol_phi}, {"elliptic", 1e-10}, {"jet_pde", 1e-12}, {"jet_difference", tol_fd}}},
        };
        const bool pass = err <= tol_phi && elliptic <= 1e-10 && rel_pde <= 1e-12 && rel_fd <= tol_fd;
        report["passed"] = pass;
        std::ofstream(fs::path(out) / "jet_report.json") << report.dump(2) << '\n';
        if (write_fields) {
            jet::write_strip(fs::path(out) / "phi.bin", phi, "phi", m);
            jet::write_strip(fs::path(out) / "omega.bin", omega, "omega", m);
        }
        std::cout << report.dump(2) << '\n';
        return pass ? kOk : kAudit;
    } catch (const OutputError& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}

int cmd_identity_check(int m) {
    if (m != 1 && m != 2) {
        std::cerr << "config error: m must be 1 or 2\n";
        return kConfig;
    }
    int code = kOk;
    for (const auto& f : jet::identity_catalog()) {
        const double d = jet::operator_identity_check(m, f.id);
        const bool ok = d <= 1e-12;
        if (!ok) code = kAudit;
        std::printf("%-18s m=%d  discrepancy=%.3e  %s\n", f.id.c_str(), m, d, ok ? "ok" : "FAIL");
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bjlab: blow-up model laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* run_cmd = app.add_subcommand("run-model", "Run one experiment from a JSON config");
    run_cmd->add_option("config", config_path, "Configuration file")->required();
    run_cmd->add_option("--out", out_dir, "Override outputs.directory");

    std::string tmpl, grid_file, sweep_out = "sweep_out";
    auto* sweep_cmd = app.add_subcommand("sweep", "Run the Cartesian product of a parameter grid");
    sweep_cmd->add_option("config-template", tmpl, "Base configuration")->required();
    sweep_cmd->add_option("parameter-grid", grid_file, "JSON object mapping dotted paths to value arrays")->required();
    sweep_cmd->add_option("--out", sweep_out, "Sweep output directory");

    int jm = 1;
    std::size_t jM = 256;
    std::string jcase, jet_out = "jet_out";
    bool write_fields = false;
    auto* jet_cmd = app.add_subcommand("jet-verify", "Manufactured-solution check of the strip solver");
    jet_cmd->add_option("m", jm, "1 or 2")->required();
    jet_cmd->add_option("M", jM, "Number of q intervals")->required();
    jet_cmd->add_option("case", jcase, "linear | quadratic | closure_a1 | exp")->required();
    jet_cmd->add_option("--out", jet_out, "Report directory");
    jet_cmd->add_flag("--write-fields", write_fields, "Also write phi.bin and omega.bin");

    int im = 1;
    auto* id_cmd = app.add_subcommand("identity-check", "Coordinate-change operator identities");
    id_cmd->add_option("m", im, "1 or 2")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    if (*run_cmd) return cmd_run_model(config_path, out_dir);
    if (*sweep_cmd) return cmd_sweep(tmpl, grid_file, sweep_out);
    if (*jet_cmd) return cmd_jet_verify(jm, jM, jcase, jet_out, write_fields);
    if (*id_cmd) return cmd_identity_check(im);
    return kConfig;
}
