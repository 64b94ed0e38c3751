#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "kerrfock/harness.hpp"

using namespace kerrfock;
using Catch::Approx;

namespace {

RunConfig quick_config(int n) {
    RunConfig cfg;
    cfg.n_target = n;
    cfg.vertices = 18;
    cfg.samples_per_edge = 4;
    cfg.proposals_per_vertex = 2;
    cfg.max_sweeps = 25;
    cfg.converge_sweeps = 2;
    cfg.reweight = false;
    cfg.s_samples = 512;
    cfg.t_samples = 1024;
    cfg.trajectory_samples = 33;
    cfg.total_time = 6.0;
    cfg.jobs = 2;
    cfg.out_dir = (std::filesystem::temp_directory_path() / "kerrfock_harness_test").string();
    return cfg;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("optimize pipeline writes reproducible artifacts", "[harness]") {
    RunConfig cfg = quick_config(1);
    const OptimizeArtifacts a = run_optimize(cfg);
    CHECK(a.penalty < a.seed_penalty);
    CHECK(a.penalty > 0.0);
    REQUIRE(std::filesystem::exists(a.path_file));
    REQUIRE(std::filesystem::exists(a.profile_file));

    const std::string first = slurp(a.path_file);
    const OptimizeArtifacts b = run_optimize(cfg);
    CHECK(slurp(b.path_file) == first);  // byte-identical rerun

    const PathDocument doc = read_path_document(a.path_file);
    CHECK(doc.penalty == Approx(a.penalty));
    CHECK(doc.meta.config_hash == config_hash(cfg));

    // labels partition the profile
    CHECK(a.labels.labels.size() == a.profile.q_vals.size());
}

TEST_CASE("simulate pipeline emits schedule and trajectory", "[harness]") {
    RunConfig cfg = quick_config(1);
    cfg.kappa = 1e-3;
    cfg.total_time = 5.0;
    const OptimizeArtifacts opt = run_optimize(cfg, /*write_files=*/false);
    const SimulateArtifacts sim = run_simulate(cfg, opt.path);

    CHECK(sim.result.final_fidelity() > 0.5);
    CHECK(sim.result.max_trace_drift <= 1e-6);
    REQUIRE(std::filesystem::exists(sim.schedule_file));
    REQUIRE(std::filesystem::exists(sim.trajectory_file));

    const std::string traj = slurp(sim.trajectory_file);
    CHECK(traj.find("kerrfock-csv/1") != std::string::npos);
    CHECK(traj.find("t,fidelity,trace,tail") != std::string::npos);
}

TEST_CASE("wigner snapshots are emitted at requested fractions", "[harness]") {
    RunConfig cfg = quick_config(1);
    cfg.total_time = 4.0;
    cfg.wigner = true;
    cfg.wigner_fractions = {0.0, 1.0};
    cfg.wigner_resolution = 41;
    const OptimizeArtifacts opt = run_optimize(cfg, /*write_files=*/false);
    const SimulateArtifacts sim = run_simulate(cfg, opt.path);
    REQUIRE(sim.wigner_files.size() == 2);
    for (const auto& f : sim.wigner_files) CHECK(std::filesystem::exists(f));
}

TEST_CASE("sweep table is sorted and exposes the argmax", "[harness]") {
    RunConfig cfg = quick_config(1);
    cfg.t_grid = {2.0, 4.0, 6.0};
    cfg.k_grid = {1.0, 1.5};
    const OptimizeArtifacts opt = run_optimize(cfg, /*write_files=*/false);
    const SweepTable table = run_sweep(cfg, opt.path, opt.penalty);

    REQUIRE(table.rows.size() == 6);
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        CHECK(table.rows[i - 1].fidelity >= table.rows[i].fidelity);

    const RabiScan scan = rabi_tuned_fidelity(opt.path, cfg.t_grid, cfg.k_grid, LossModel(0.0), 1,
                                              ScheduleOptions{cfg.s_samples, cfg.t_samples, 2},
                                              EvolveOptions{}, 2);
    CHECK(table.best().fidelity == scan.best_point().fidelity);
    REQUIRE(std::filesystem::exists(table.file));
}

TEST_CASE("scaling fit follows a planted power law", "[harness]") {
    ScalingReport rep;
    rep.points = {{1, 2.0}, {2, 2.0 * std::sqrt(2.0)}, {4, 4.0}};
    fit_power_law(rep);
    REQUIRE(rep.fit_done);
    CHECK(rep.exponent == Approx(0.5).margin(1e-12));
    CHECK(rep.prefactor == Approx(2.0).margin(1e-12));
    CHECK(rep.max_residual < 1e-12);

    ScalingReport single;
    single.points = {{3, 5.0}};
    fit_power_law(single);
    CHECK_FALSE(single.fit_done);
}

TEST_CASE("requirements ladder stops at the first achievable loss", "[harness]") {
    RunConfig cfg = quick_config(1);
    cfg.t_grid = {4.0, 6.0};
    cfg.k_grid = {1.0};
    const OptimizeArtifacts opt = run_optimize(cfg, /*write_files=*/false);

    // a tiny target is reached at the very first (largest) kappa
    const RequirementsReport easy = run_requirements(cfg, 1, 0.05, opt.path, 3.2e-2, 1e-3);
    REQUIRE(easy.reached);
    CHECK(easy.threshold_kappa == Approx(3.2e-2));
    CHECK(easy.rows.size() == 1);

    // an impossible target within a short ladder is reported as a bound
    const RequirementsReport hard = run_requirements(cfg, 1, 0.999999, opt.path, 3.2e-2, 1.6e-2);
    CHECK_FALSE(hard.reached);
    CHECK(hard.rows.size() == 2);

    CHECK_THROWS_AS(run_requirements(cfg, 1, 1.5, opt.path), ConfigError);
}
