// Command-line front end: optimize drive paths, build schedules, simulate
// closed/lossy dynamics, and run sweep/scaling/requirements studies.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kerrfock/kerrfock.hpp"

namespace {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kFeasibilityError = 3,
    kNumericalError = 4,
    kIoError = 5,
    kInternalError = 10,
};

struct CommonFlags {
    std::string config_file;
    std::string out_dir;
    long long seed = -1;
    int jobs = -1;
    int dim = -1;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_file, "configuration file");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "override optimizer RNG seed");
    cmd->add_option("--jobs", flags.jobs, "parallel workers (0 = all cores)");
    cmd->add_option("--dim", flags.dim, "override truncation dimension");
    cmd->add_flag("--quiet", flags.quiet, "suppress warnings and progress output");
}

kerrfock::RunConfig load_config(const CommonFlags& flags) {
    kerrfock::RunConfig cfg;
    if (!flags.config_file.empty()) {
        std::ifstream in(flags.config_file);
        if (!in) throw kerrfock::IoError("cannot open config file " + flags.config_file);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        cfg = kerrfock::parse_config(text);
    }
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (const char* env = std::getenv("KERRFOCK_OUT_DIR"); env && *env) cfg.out_dir = env;
    if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.jobs >= 0) cfg.jobs = flags.jobs;
    if (flags.dim >= 0) cfg.dim = flags.dim;
    kerrfock::set_quiet(flags.quiet);
    cfg.validate();
    return cfg;
}

kerrfock::ParamPath load_path(const std::string& file, const kerrfock::RunConfig& cfg) {
    kerrfock::PathDocument doc = kerrfock::read_path_document(file);
    if (cfg.dim > 0) doc.path.spec.dim = cfg.dim;
    return doc.path;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adiabatic Fock-state preparation in a driven Kerr cavity"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string path_file;
    std::string template_out;
    int fock_n = -1;
    int n_min = 1, n_max = 6;
    std::vector<int> req_n;
    double f_target = 0.9;
    int n_override = -1;

    auto* cmd_template = app.add_subcommand("template", "write a documented default config");
    cmd_template->add_option("--out", template_out, "file to write (default: stdout)");

    auto* cmd_optimize = app.add_subcommand("optimize", "optimize a drive path");
    add_common(cmd_optimize, flags);
    cmd_optimize->add_option("--n", n_override, "target Fock number override");

    auto* cmd_schedule = app.add_subcommand("schedule", "turn a path into timed controls");
    add_common(cmd_schedule, flags);
    cmd_schedule->add_option("--path", path_file, "path document")->required();

    auto* cmd_simulate = app.add_subcommand("simulate", "propagate a schedule");
    add_common(cmd_simulate, flags);
    cmd_simulate->add_option("--path", path_file, "path document")->required();

    auto* cmd_wigner = app.add_subcommand("wigner", "emit Wigner-function grids");
    add_common(cmd_wigner, flags);
    cmd_wigner->add_option("--path", path_file, "path document (simulate, then snapshot)");
    cmd_wigner->add_option("--fock", fock_n, "instead: ideal Fock state |n>");

    auto* cmd_sweep = app.add_subcommand("sweep", "grid sweep over T and k");
    add_common(cmd_sweep, flags);
    cmd_sweep->add_option("--path", path_file, "path document")->required();

    auto* cmd_scaling = app.add_subcommand("scaling", "optimize a range of targets and fit I[C] ~ n^gamma");
    add_common(cmd_scaling, flags);
    cmd_scaling->add_option("--n-min", n_min, "first target (default 1)");
    cmd_scaling->add_option("--n-max", n_max, "last target (default 6)");

    auto* cmd_requirements = app.add_subcommand("requirements", "kappa threshold for a fidelity target");
    add_common(cmd_requirements, flags);
    cmd_requirements->add_option("--n", req_n, "target Fock numbers")->required();
    cmd_requirements->add_option("--fidelity", f_target, "fidelity target in (0, 1)");
    cmd_requirements->add_option("--path", path_file, "reuse one path document (single n only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (cmd_template->parsed()) {
            kerrfock::RunConfig defaults;
            const std::string text = kerrfock::serialize_config(defaults, /*documented=*/true);
            if (template_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(template_out);
                if (!out) throw kerrfock::IoError("cannot write " + template_out);
                out << text;
            }
            return kOk;
        }

        kerrfock::RunConfig cfg = load_config(flags);

        if (cmd_optimize->parsed()) {
            if (n_override > 0) cfg.n_target = n_override;
            const auto art = kerrfock::run_optimize(cfg);
            if (!kerrfock::quiet()) {
                std::cout << "n=" << cfg.n_target << " penalty=" << art.penalty
                          << " (seed path " << art.seed_penalty << ", " << art.sweeps
                          << " sweeps)\n";
                if (!art.path_file.empty()) std::cout << "wrote " << art.path_file.string() << "\n";
            }
            return kOk;
        }

        if (cmd_schedule->parsed()) {
            const auto path = load_path(path_file, cfg);
            cfg.n_target = path.spec.n_target;
            kerrfock::ScheduleOptions sopts;
            sopts.s_samples = cfg.s_samples;
            sopts.t_samples = cfg.t_samples;
            sopts.jobs = kerrfock::effective_jobs(cfg);
            const auto sched = kerrfock::build_schedule(path, cfg.total_time, cfg.stretch_k, sopts);
            const auto meta = kerrfock::meta_of(cfg);
            const std::filesystem::path dir(cfg.out_dir);
            const std::string stem = "n" + std::to_string(cfg.n_target);
            kerrfock::write_schedule_document(dir / ("schedule_" + stem + ".txt"),
                                              kerrfock::ScheduleDocument{sched, meta});
            kerrfock::write_schedule_csv(dir / ("schedule_" + stem + ".csv"), sched, meta);
            if (!kerrfock::quiet())
                std::cout << "schedule T=" << sched.total_time << " k=" << sched.stretch_k
                          << " I[C]=" << sched.penalty_total << " written to " << dir.string()
                          << "\n";
            return kOk;
        }

        if (cmd_simulate->parsed()) {
            const auto path = load_path(path_file, cfg);
            cfg.n_target = path.spec.n_target;
            const auto art = kerrfock::run_simulate(cfg, path);
            if (!kerrfock::quiet())
                std::cout << "n=" << cfg.n_target << " T=" << cfg.total_time
                          << " k=" << cfg.stretch_k << " kappa=" << cfg.kappa
                          << " F=" << art.result.final_fidelity() << "\n";
            return kOk;
        }

        if (cmd_wigner->parsed()) {
            if (fock_n >= 0) {
                const Eigen::Index dim = cfg.dim > 0 ? cfg.dim : 4 * fock_n + 20;
                const auto grid =
                    kerrfock::wigner_grid(kerrfock::fock_state(fock_n, dim), cfg.wigner_range,
                                          cfg.wigner_range, cfg.wigner_resolution,
                                          kerrfock::effective_jobs(cfg));
                const auto file = std::filesystem::path(cfg.out_dir) /
                                  ("wigner_fock" + std::to_string(fock_n) + ".txt");
                kerrfock::write_wigner_grid(file, grid, 0.0, kerrfock::meta_of(cfg));
                if (!kerrfock::quiet()) std::cout << "wrote " << file.string() << "\n";
                return kOk;
            }
            if (path_file.empty())
                throw kerrfock::ConfigError("wigner needs --path or --fock");
            const auto path = load_path(path_file, cfg);
            cfg.n_target = path.spec.n_target;
            cfg.wigner = true;
            const auto art = kerrfock::run_simulate(cfg, path);
            if (!kerrfock::quiet())
                for (const auto& f : art.wigner_files) std::cout << "wrote " << f.string() << "\n";
            return kOk;
        }

        if (cmd_sweep->parsed()) {
            const auto path = load_path(path_file, cfg);
            cfg.n_target = path.spec.n_target;
            const auto doc = kerrfock::read_path_document(path_file);
            const auto table = kerrfock::run_sweep(cfg, path, doc.penalty);
            if (!kerrfock::quiet()) {
                const auto& b = table.best();
                std::cout << "best F=" << b.fidelity << " at T=" << b.total_time
                          << " k=" << b.stretch_k << " (" << table.rows.size() << " grid points)\n";
                if (!table.file.empty()) std::cout << "wrote " << table.file.string() << "\n";
            }
            return kOk;
        }

        if (cmd_scaling->parsed()) {
            const auto rep = kerrfock::run_scaling(cfg, n_min, n_max);
            if (rep.fit_done) {
                std::cout << "I[C_n] ~ n^gamma fit: gamma=" << rep.exponent
                          << " prefactor=" << rep.prefactor
                          << " max_log_residual=" << rep.max_residual << "\n";
            } else {
                std::cout << "single point; fit refused. raw penalty:";
                for (const auto& p : rep.points) std::cout << " I[" << p.n << "]=" << p.penalty;
                std::cout << "\n";
            }
            if (!rep.file.empty() && !kerrfock::quiet())
                std::cout << "wrote " << rep.file.string() << "\n";
            return kOk;
        }

        if (cmd_requirements->parsed()) {
            std::vector<std::pair<int, double>> thresholds;
            for (int n : req_n) {
                kerrfock::RunConfig local = cfg;
                local.n_target = n;
                local.dim = 0;
                kerrfock::ParamPath path;
                if (!path_file.empty() && req_n.size() == 1) {
                    path = load_path(path_file, local);
                } else {
                    path = kerrfock::run_optimize(local, /*write_files=*/false).path;
                }
                const auto rep = kerrfock::run_requirements(local, n, f_target, path);
                for (const auto& row : rep.rows)
                    std::cout << "n=" << n << " kappa=" << row.kappa << " bestF=" << row.best_fidelity
                              << "\n";
                if (rep.reached) {
                    std::cout << "n=" << n << " threshold kappa/chi=" << rep.threshold_kappa
                              << " (chi/kappa=" << 1.0 / rep.threshold_kappa << ") for F>="
                              << f_target << "\n";
                    thresholds.emplace_back(n, rep.threshold_kappa);
                } else {
                    std::cout << "n=" << n << " target F>=" << f_target
                              << " not reached down to kappa/chi=" << rep.rows.back().kappa
                              << "; threshold below that bound\n";
                }
            }
            if (thresholds.size() >= 2) {
                // threshold kappa ~ n^(-q); report q for comparison with 3/2
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                for (auto [n, kap] : thresholds) {
                    const double x = std::log(static_cast<double>(n));
                    const double y = std::log(kap);
                    sx += x; sy += y; sxx += x * x; sxy += x * y;
                }
                const double m = static_cast<double>(thresholds.size());
                const double q = (m * sxy - sx * sy) / (m * sxx - sx * sx);
                std::cout << "threshold trend: kappa_max ~ n^" << q << "\n";
            }
            return kOk;
        }
    } catch (const kerrfock::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const kerrfock::FeasibilityError& e) {
        std::cerr << "feasibility error: " << e.what() << "\n";
        return kFeasibilityError;
    } catch (const kerrfock::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const kerrfock::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIoError;
    } catch (const kerrfock::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInternalError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
    return kOk;
}
