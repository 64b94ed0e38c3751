#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "kerrfock/config.hpp"
#include "kerrfock/io.hpp"

using namespace kerrfock;

namespace {

const std::filesystem::path kWorkDir =
    std::filesystem::temp_directory_path() / "kerrfock_cli_test";

int run_cli(const std::string& args, const std::string& log_name) {
    const std::string log = (kWorkDir / log_name).string();
    const std::string cmd = std::string(KERRFOCK_CLI_PATH) + " " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_quick_config(const std::filesystem::path& file, const std::string& out_dir) {
    RunConfig cfg;
    cfg.n_target = 1;
    cfg.vertices = 16;
    cfg.samples_per_edge = 4;
    cfg.proposals_per_vertex = 2;
    cfg.max_sweeps = 20;
    cfg.converge_sweeps = 2;
    cfg.reweight = false;
    cfg.s_samples = 512;
    cfg.t_samples = 1024;
    cfg.trajectory_samples = 17;
    cfg.total_time = 5.0;
    cfg.jobs = 2;
    cfg.out_dir = out_dir;
    std::ofstream out(file);
    REQUIRE(out);
    out << serialize_config(cfg);
}

}  // namespace

TEST_CASE("cli template, optimize, simulate, sweep round trip", "[cli]") {
    std::filesystem::remove_all(kWorkDir);
    std::filesystem::create_directories(kWorkDir);
    const auto out_dir = kWorkDir / "out";
    const auto cfg_file = kWorkDir / "run.cfg";
    write_quick_config(cfg_file, out_dir.string());

    SECTION("template emits a parseable config") {
        const auto tpl = kWorkDir / "template.cfg";
        REQUIRE(run_cli("template --out " + tpl.string(), "template.log") == 0);
        const RunConfig parsed = parse_config(slurp(tpl));
        CHECK(serialize_config(parsed) == serialize_config(RunConfig{}));
    }

    SECTION("pipeline") {
        REQUIRE(run_cli("optimize --config " + cfg_file.string(), "optimize.log") == 0);
        const auto path_file = out_dir / "path_n1.txt";
        REQUIRE(std::filesystem::exists(path_file));
        const std::string first = slurp(path_file);

        // determinism across process restarts
        REQUIRE(run_cli("optimize --config " + cfg_file.string(), "optimize2.log") == 0);
        CHECK(slurp(path_file) == first);

        REQUIRE(run_cli("schedule --config " + cfg_file.string() + " --path " +
                            path_file.string(),
                        "schedule.log") == 0);
        CHECK(std::filesystem::exists(out_dir / "schedule_n1.txt"));
        CHECK(std::filesystem::exists(out_dir / "schedule_n1.csv"));

        REQUIRE(run_cli("simulate --config " + cfg_file.string() + " --path " +
                            path_file.string(),
                        "simulate.log") == 0);
        CHECK(std::filesystem::exists(out_dir / "trajectory_n1.csv"));

        REQUIRE(run_cli("sweep --config " + cfg_file.string() + " --path " + path_file.string(),
                        "sweep.log") == 0);
        CHECK(std::filesystem::exists(out_dir / "sweep_n1.csv"));
    }

    SECTION("wigner of an ideal Fock state") {
        REQUIRE(run_cli("wigner --fock 1 --out " + out_dir.string() + " --dim 20", "wigner.log") ==
                0);
        CHECK(std::filesystem::exists(out_dir / "wigner_fock1.txt"));
    }

    SECTION("environment override redirects output") {
        const auto env_dir = kWorkDir / "env_out";
        const std::string cmd = "KERRFOCK_OUT_DIR=" + env_dir.string() + " " + KERRFOCK_CLI_PATH +
                                " optimize --config " + cfg_file.string() + " > " +
                                (kWorkDir / "env.log").string() + " 2>&1";
        REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
        CHECK(std::filesystem::exists(env_dir / "path_n1.txt"));
    }
}

TEST_CASE("cli exit codes distinguish failure classes", "[cli]") {
    std::filesystem::create_directories(kWorkDir);

    // config errors -> 2
    const auto bad_cfg = kWorkDir / "bad.cfg";
    {
        std::ofstream out(bad_cfg);
        out << "[target]\nn = 0\n";
    }
    CHECK(run_cli("optimize --config " + bad_cfg.string(), "bad_config.log") == 2);
    CHECK(run_cli("definitely-not-a-command", "bad_cmd.log") == 2);

    // io errors -> 5
    CHECK(run_cli("simulate --path /nonexistent/path.txt", "bad_io.log") == 5);

    // feasibility errors -> 3 (path document violating the scheme rules)
    const auto bad_path = kWorkDir / "bad_path.txt";
    {
        std::ofstream out(bad_path);
        out << "kerrfock-path/1\nconfig_hash deadbeef\nseed 1\nn_target 1\n"
               "delta_max 30\ndim 24\npenalty 1\nvertices 4\n"
               "30 0\n30 10\n1 4\n-0.4 0\n";  // wrong terminal detuning
    }
    CHECK(run_cli("simulate --path " + bad_path.string(), "bad_feasibility.log") == 3);
}
