#pragma once

// Orchestration layer behind the CLI: runs the optimize / simulate / sweep /
// scaling / requirements pipelines from a RunConfig and writes the requested
// artifacts.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "kerrfock/common.hpp"
#include "kerrfock/config.hpp"
#include "kerrfock/dynamics.hpp"
#include "kerrfock/io.hpp"
#include "kerrfock/pathopt.hpp"
#include "kerrfock/schedule.hpp"
#include "kerrfock/wigner.hpp"

namespace kerrfock {

inline int effective_jobs(const RunConfig& cfg) {
    if (cfg.jobs > 0) return cfg.jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

inline TargetSpec target_spec_of(const RunConfig& cfg) {
    TargetSpec spec;
    spec.n_target = cfg.n_target;
    spec.delta_max = cfg.delta_max;
    spec.dim = cfg.dim;
    spec.n_vertices = cfg.vertices;
    return spec;
}

inline OptimizeOptions optimizer_options_of(const RunConfig& cfg) {
    OptimizeOptions opts;
    opts.seed = cfg.seed;
    opts.sigma0 = cfg.sigma0;
    opts.sigma_decay = cfg.sigma_decay;
    opts.proposals_per_vertex = cfg.proposals_per_vertex;
    opts.samples_per_edge = cfg.samples_per_edge;
    opts.max_sweeps = cfg.max_sweeps;
    opts.converge_rel = cfg.converge_rel;
    opts.converge_sweeps = cfg.converge_sweeps;
    opts.reweight = cfg.reweight;
    opts.jobs = 1;  // the sweep loop itself stays deterministic
    return opts;
}

inline ArtifactMeta meta_of(const RunConfig& cfg) {
    return ArtifactMeta{config_hash(cfg), cfg.seed};
}

struct OptimizeArtifacts {
    ParamPath path;
    PenaltyProfile profile;  // converged quadrature
    RegionLabels labels;
    double penalty = 0.0;
    double seed_penalty = 0.0;
    int sweeps = 0;
    std::filesystem::path path_file;
    std::filesystem::path profile_file;
};

inline OptimizeArtifacts run_optimize(const RunConfig& cfg, bool write_files = true) {
    cfg.validate();
    const TargetSpec spec = target_spec_of(cfg);
    const ParamPath seed = seed_path(spec);
    OptimizeResult opt = optimize(seed, optimizer_options_of(cfg));

    OptimizeArtifacts art;
    art.path = opt.path;
    art.profile = path_penalty_converged(opt.path, spec.resolved_dim(), cfg.samples_per_edge,
                                         0.005, DriveKind::Linear, effective_jobs(cfg));
    art.labels = segment_regions(opt.path, art.profile);
    art.penalty = art.profile.total;
    art.seed_penalty = opt.seed_penalty;
    art.sweeps = opt.sweeps;

    if (write_files && cfg.write_path) {
        const std::filesystem::path dir(cfg.out_dir);
        const std::string stem = "path_n" + std::to_string(cfg.n_target);
        art.path_file = dir / (stem + ".txt");
        PathDocument doc;
        doc.path = art.path;
        doc.meta = meta_of(cfg);
        doc.penalty = art.penalty;
        write_path_document(art.path_file, doc);
        art.profile_file = dir / (stem + "_profile.csv");
        write_profile_csv(art.profile_file, art.profile, art.labels, doc.meta);
    }
    return art;
}

struct SimulateArtifacts {
    TimedSchedule schedule;
    SimResult result;
    std::filesystem::path schedule_file;
    std::filesystem::path trajectory_file;
    std::vector<std::filesystem::path> wigner_files;
};

inline SimulateArtifacts run_simulate(const RunConfig& cfg, const ParamPath& path,
                                      bool write_files = true) {
    cfg.validate();
    const Eigen::Index dim = path.spec.resolved_dim();
    const int jobs = effective_jobs(cfg);

    ScheduleOptions sopts;
    sopts.s_samples = cfg.s_samples;
    sopts.t_samples = cfg.t_samples;
    sopts.jobs = jobs;

    SimulateArtifacts art;
    art.schedule = build_schedule(path, cfg.total_time, cfg.stretch_k, sopts);

    EvolveOptions eopts;
    eopts.trajectory_samples = cfg.trajectory_samples;
    eopts.store_states = true;
    if (cfg.kappa == 0.0) {
        art.result = evolve_closed(art.schedule, fock_state(0, dim), cfg.n_target, eopts);
    } else {
        art.result = evolve_lindblad(art.schedule, DensityMatrix::pure(fock_state(0, dim)),
                                     LossModel(cfg.kappa), cfg.n_target, eopts);
    }

    if (!write_files) return art;
    const std::filesystem::path dir(cfg.out_dir);
    const ArtifactMeta meta = meta_of(cfg);
    const std::string stem = "n" + std::to_string(cfg.n_target);
    if (cfg.write_schedule) {
        art.schedule_file = dir / ("schedule_" + stem + ".txt");
        write_schedule_document(art.schedule_file, ScheduleDocument{art.schedule, meta});
        write_schedule_csv(dir / ("schedule_" + stem + ".csv"), art.schedule, meta);
    }
    if (cfg.write_trajectory) {
        art.trajectory_file = dir / ("trajectory_" + stem + ".csv");
        write_trajectory_csv(art.trajectory_file, art.result, meta);
    }
    if (cfg.wigner) {
        for (double frac : cfg.wigner_fractions) {
            // snap to the nearest stored snapshot
            const double want = frac * cfg.total_time;
            std::size_t best = 0;
            for (std::size_t i = 1; i < art.result.times.size(); ++i)
                if (std::abs(art.result.times[i] - want) <
                    std::abs(art.result.times[best] - want))
                    best = i;
            WignerGrid grid;
            if (art.result.closed)
                grid = wigner_grid(StateVector(art.result.psi_samples.at(best)), cfg.wigner_range,
                                   cfg.wigner_range, cfg.wigner_resolution, jobs);
            else
                grid = wigner_grid(DensityMatrix(art.result.rho_samples.at(best)),
                                   cfg.wigner_range, cfg.wigner_range, cfg.wigner_resolution,
                                   jobs);
            char tag[32];
            std::snprintf(tag, sizeof(tag), "%.3f", frac);
            const auto file = dir / ("wigner_" + stem + "_f" + std::string(tag) + ".txt");
            write_wigner_grid(file, grid, art.result.times[best], meta);
            art.wigner_files.push_back(file);
        }
    }
    return art;
}

struct SweepRow {
    int n = 0;
    double kappa = 0.0;
    double total_time = 0.0;
    double stretch_k = 1.0;
    double fidelity = 0.0;
    double penalty = 0.0;
    double runtime_s = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;  // sorted by fidelity, descending (stable)
    std::filesystem::path file;

    const SweepRow& best() const { return rows.front(); }
};

inline SweepTable run_sweep(const RunConfig& cfg, const ParamPath& path, double penalty_total,
                            bool write_files = true) {
    cfg.validate();
    ScheduleOptions sopts;
    sopts.s_samples = cfg.s_samples;
    sopts.t_samples = cfg.t_samples;
    EvolveOptions eopts;
    eopts.trajectory_samples = 33;
    const RabiScan scan =
        rabi_tuned_fidelity(path, cfg.effective_t_grid(), cfg.effective_k_grid(),
                            LossModel(cfg.kappa), cfg.n_target, sopts, eopts, effective_jobs(cfg));

    SweepTable table;
    table.rows.reserve(scan.table.size());
    for (const auto& pt : scan.table) {
        SweepRow row;
        row.n = cfg.n_target;
        row.kappa = cfg.kappa;
        row.total_time = pt.total_time;
        row.stretch_k = pt.stretch_k;
        row.fidelity = pt.fidelity;
        row.penalty = penalty_total;
        row.runtime_s = pt.runtime_s;
        table.rows.push_back(row);
    }
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.fidelity > b.fidelity; });

    if (write_files && cfg.write_sweep) {
        table.file = std::filesystem::path(cfg.out_dir) /
                     ("sweep_n" + std::to_string(cfg.n_target) + ".csv");
        auto out = detail::open_out(table.file);
        out << csv_header_comment("sweep", meta_of(cfg));
        out << "n,kappa,T,k,F,penalty,runtime_s\n";
        for (const auto& r : table.rows)
            out << r.n << "," << format_double(r.kappa) << "," << format_double(r.total_time)
                << "," << format_double(r.stretch_k) << "," << format_double(r.fidelity) << ","
                << format_double(r.penalty) << "," << format_double(r.runtime_s) << "\n";
    }
    return table;
}

struct ScalingPoint {
    int n = 0;
    double penalty = 0.0;
};

struct ScalingReport {
    std::vector<ScalingPoint> points;
    bool fit_done = false;
    double exponent = 0.0;   // gamma in I ~ n^gamma
    double prefactor = 0.0;  // exp(c)
    double max_residual = 0.0;
    std::filesystem::path file;
};

// log I = gamma log n + c, ordinary least squares.
inline void fit_power_law(ScalingReport& rep) {
    const std::size_t m = rep.points.size();
    if (m < 2) {
        rep.fit_done = false;
        return;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : rep.points) {
        const double x = std::log(static_cast<double>(p.n));
        const double y = std::log(p.penalty);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    rep.exponent = (m * sxy - sx * sy) / denom;
    const double c = (sy - rep.exponent * sx) / m;
    rep.prefactor = std::exp(c);
    rep.max_residual = 0.0;
    for (const auto& p : rep.points) {
        const double fit = c + rep.exponent * std::log(static_cast<double>(p.n));
        rep.max_residual = std::max(rep.max_residual, std::abs(std::log(p.penalty) - fit));
    }
    rep.fit_done = true;
}

inline ScalingReport run_scaling(const RunConfig& cfg, int n_min, int n_max,
                                 bool write_files = true) {
    if (n_min < 1 || n_max < n_min || n_max > 8)
        throw ConfigError("scaling range must satisfy 1 <= n_min <= n_max <= 8");
    ScalingReport rep;
    for (int n = n_min; n <= n_max; ++n) {
        RunConfig local = cfg;
        local.n_target = n;
        local.dim = 0;  // per-target truncation rule
        const OptimizeArtifacts art = run_optimize(local, /*write_files=*/false);
        rep.points.push_back({n, art.penalty});
    }
    fit_power_law(rep);

    if (write_files && cfg.write_sweep) {
        rep.file = std::filesystem::path(cfg.out_dir) / "scaling.csv";
        auto out = detail::open_out(rep.file);
        out << csv_header_comment("scaling", meta_of(cfg));
        out << "n,penalty\n";
        for (const auto& p : rep.points) out << p.n << "," << format_double(p.penalty) << "\n";
        if (rep.fit_done)
            out << "# fit exponent=" << format_double(rep.exponent)
                << " prefactor=" << format_double(rep.prefactor)
                << " max_log_residual=" << format_double(rep.max_residual) << "\n";
    }
    return rep;
}

struct RequirementsRow {
    double kappa = 0.0;
    double best_fidelity = 0.0;
};

struct RequirementsReport {
    int n = 0;
    double f_target = 0.0;
    std::vector<RequirementsRow> rows;  // kappa descending
    bool reached = false;
    double threshold_kappa = 0.0;  // largest kappa meeting the target
};

// Halving ladder from kappa_start down to kappa_min: stop at the first
// (largest) kappa whose tuned fidelity meets the target.
inline RequirementsReport run_requirements(const RunConfig& cfg, int n, double f_target,
                                           const ParamPath& path, double kappa_start = 3.2e-2,
                                           double kappa_min = 1e-4) {
    if (!(f_target > 0.0 && f_target < 1.0)) throw ConfigError("F target must be in (0, 1)");
    RequirementsReport rep;
    rep.n = n;
    rep.f_target = f_target;

    ScheduleOptions sopts;
    sopts.s_samples = cfg.s_samples;
    sopts.t_samples = cfg.t_samples;
    EvolveOptions eopts;
    eopts.trajectory_samples = 17;

    for (double kappa = kappa_start; kappa >= kappa_min * (1.0 - 1e-12); kappa *= 0.5) {
        const RabiScan scan =
            rabi_tuned_fidelity(path, cfg.effective_t_grid(), cfg.effective_k_grid(),
                                LossModel(kappa), n, sopts, eopts, effective_jobs(cfg));
        rep.rows.push_back({kappa, scan.best_point().fidelity});
        if (scan.best_point().fidelity >= f_target) {
            rep.reached = true;
            rep.threshold_kappa = kappa;
            break;
        }
    }
    return rep;
}

}  // namespace kerrfock
