#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kerrfock/pathopt.hpp"

using namespace kerrfock;
using Catch::Approx;

namespace {

OptimizeOptions quick_opts() {
    OptimizeOptions opts;
    opts.seed = 3;
    opts.samples_per_edge = 4;
    opts.proposals_per_vertex = 2;
    opts.max_sweeps = 30;
    opts.converge_sweeps = 2;
    opts.sigma_stop = 0.05;
    opts.reweight = false;
    return opts;
}

}  // namespace

TEST_CASE("seed path geometry for |5>", "[pathopt]") {
    TargetSpec spec;
    spec.n_target = 5;
    const ParamPath path = seed_path(spec);
    CHECK(spec.delta_f() == Approx(-4.5));
    CHECK(spec.beta_max() == Approx(73.2).epsilon(0.001));
    CHECK(spec.resolved_dim() == 40);

    CHECK(path.vertices.front().delta == Approx(30.0));
    CHECK(path.vertices.front().beta == 0.0);
    CHECK(path.vertices.back().delta == Approx(-4.5));
    CHECK(path.vertices.back().beta == 0.0);
    CHECK(static_cast<int>(path.size()) == spec.n_vertices);
    REQUIRE_NOTHROW(path.validate());

    double bmax = 0.0;
    for (const auto& v : path.vertices) bmax = std::max(bmax, v.beta);
    CHECK(bmax == Approx(spec.beta_max()));
}

TEST_CASE("seed path for |1> ends at the first midpoint", "[pathopt]") {
    TargetSpec spec;
    spec.n_target = 1;
    spec.n_vertices = 16;
    const ParamPath path = seed_path(spec);
    CHECK(path.vertices.back().delta == Approx(-0.5));
    REQUIRE_NOTHROW(path.validate());
}

TEST_CASE("vertex projection enforces the feasible set", "[pathopt]") {
    TargetSpec spec;
    spec.n_target = 2;
    spec.delta_max = 10.0;
    // Delta_3 = -1 is an odd crossing for n = 2
    const DrivePoint v = project_vertex(-1.02, 1e-6, spec);
    CHECK(v.beta == Approx(kBetaFloor));
    const DrivePoint w = project_vertex(12.0, -0.5, spec);
    CHECK(w.delta == Approx(10.0));
    CHECK(w.beta == 0.0);
}

TEST_CASE("optimization strictly improves the seed and never backtracks", "[pathopt]") {
    TargetSpec spec;
    spec.n_target = 1;
    spec.n_vertices = 18;
    const ParamPath seed = seed_path(spec);
    const OptimizeResult res = optimize(seed, quick_opts());

    REQUIRE_FALSE(res.history.empty());
    CHECK(res.history.front() < res.seed_penalty);  // first sweep already improves
    for (std::size_t i = 1; i < res.history.size(); ++i)
        CHECK(res.history[i] <= res.history[i - 1] + 1e-15);
    REQUIRE_NOTHROW(res.path.validate());
    CHECK(res.profile.total <= res.seed_penalty);
}

TEST_CASE("optimization is deterministic for a fixed seed", "[pathopt]") {
    TargetSpec spec;
    spec.n_target = 1;
    spec.n_vertices = 14;
    const ParamPath seed = seed_path(spec);
    const OptimizeResult a = optimize(seed, quick_opts());
    const OptimizeResult b = optimize(seed, quick_opts());
    REQUIRE(a.path.size() == b.path.size());
    for (std::size_t i = 0; i < a.path.size(); ++i) {
        CHECK(a.path.vertices[i].delta == b.path.vertices[i].delta);
        CHECK(a.path.vertices[i].beta == b.path.vertices[i].beta);
    }
    CHECK(a.profile.total == b.profile.total);

    OptimizeOptions other = quick_opts();
    other.seed = 99;
    const OptimizeResult c = optimize(seed, other);
    CHECK(c.profile.total != a.profile.total);  // different search trajectory
}

TEST_CASE("region labels partition the profile", "[pathopt]") {
    TargetSpec spec;
    spec.n_target = 1;
    spec.n_vertices = 20;
    const ParamPath path = seed_path(spec);
    const PenaltyProfile profile = path_penalty(path, spec.resolved_dim(), 8);
    const RegionLabels labels = segment_regions(path, profile);

    REQUIRE(labels.labels.size() == profile.q_vals.size());
    CHECK(labels.count(Region::A) + labels.count(Region::B) + labels.count(Region::C) ==
          labels.labels.size());
    CHECK(labels.count(Region::A) > 0);  // the seed hugs the clamp
    CHECK(labels.count(Region::C) > 0);

    // C is terminal and contiguous
    bool in_c = false;
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        if (labels.labels[i] == Region::C) in_c = true;
        if (in_c) CHECK(labels.labels[i] == Region::C);
    }
    CHECK(labels.labels.back() == Region::C);

    // the densest penalty sits at the terminal point on the axis
    std::size_t imax = 0;
    for (std::size_t i = 1; i < profile.q_vals.size(); ++i)
        if (profile.q_vals[i] > profile.q_vals[imax]) imax = i;
    CHECK(imax + 8 >= profile.q_vals.size());
}

TEST_CASE("infeasible paths are rejected", "[pathopt]") {
    TargetSpec spec;
    spec.n_target = 1;
    spec.n_vertices = 8;
    ParamPath path = seed_path(spec);
    path.vertices[2] = DrivePoint(spec.delta_max + 1.0, 5.0);
    CHECK_THROWS_AS(path.validate(), FeasibilityError);

    ParamPath crossing = seed_path(spec);
    crossing.vertices[crossing.size() / 2] = DrivePoint(0.0, 0.0);  // on Delta_1 with no drive
    CHECK_THROWS_AS(crossing.validate(), FeasibilityError);
}
