#pragma once

// Penalty-minimizing path search: analytic seeding from the region-B line,
// vertex-perturbation local descent with an annealed proposal amplitude,
// and A/B/C region segmentation of the result.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "kerrfock/common.hpp"
#include "kerrfock/path.hpp"
#include "kerrfock/penalty.hpp"

namespace kerrfock {

enum class Region : char { A = 'A', B = 'B', C = 'C' };

struct RegionLabels {
    std::vector<Region> labels;  // one per profile sample

    std::size_t count(Region r) const {
        std::size_t c = 0;
        for (Region x : labels) c += (x == r);
        return c;
    }
};

struct OptimizeOptions {
    std::uint64_t seed = 1;
    double sigma0 = 0.5;
    double sigma_decay = 0.9;
    int proposals_per_vertex = 4;
    int samples_per_edge = 8;
    int max_sweeps = 300;
    double converge_rel = 1e-4;
    int converge_sweeps = 3;
    double sigma_stop = 5e-3;  // convergence is only declared at fine proposal scale
    bool reweight = true;  // redistribute vertices by sqrt(Q) and re-anneal
    int jobs = 1;
};

struct OptimizeResult {
    ParamPath path;
    PenaltyProfile profile;
    double seed_penalty = 0.0;
    int sweeps = 0;
    std::vector<double> history;  // total penalty after each sweep
};

// Seed: drive ramp at the detuning clamp, the region-B line down to the
// drive floor, then the vertical drop onto (delta_f, 0). Vertices are
// spread roughly uniformly in arc length with both corners kept.
inline ParamPath seed_path(const TargetSpec& spec) {
    spec.validate();
    const double df = spec.delta_f();
    const double bmax = spec.beta_max();
    const double slope = std::sqrt(-df);  // beta = slope * (delta - delta_f)
    const double delta_at_floor = df + kBetaFloor / slope;

    const double len_a = bmax;
    const double len_b = std::hypot(spec.delta_max - delta_at_floor, bmax - kBetaFloor);
    const int budget = std::max(4, spec.n_vertices) - 1;  // final vertex reserved
    int count_a = static_cast<int>(std::lround(budget * len_a / (len_a + len_b)));
    count_a = std::clamp(count_a, 2, budget - 2);
    const int count_b = budget - count_a;  // vertices after the ramp corner

    ParamPath path;
    path.spec = spec;
    path.vertices.reserve(static_cast<std::size_t>(budget) + 1);
    for (int k = 0; k < count_a; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(count_a - 1);
        path.vertices.push_back(DrivePoint(spec.delta_max, t * bmax));
    }
    for (int j = 1; j <= count_b; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(count_b);
        path.vertices.push_back(
            DrivePoint(spec.delta_max + t * (delta_at_floor - spec.delta_max),
                       std::max(kBetaFloor, bmax + t * (kBetaFloor - bmax))));
    }
    path.vertices.push_back(DrivePoint(df, 0.0));
    path.validate();
    return path;
}

namespace detail {

inline double sweep_sigma(const OptimizeOptions& opts, int sweep) {
    return opts.sigma0 * std::pow(opts.sigma_decay, sweep);
}

// One annealing phase of accept-if-better vertex perturbations. Edge
// contributions are cached so a vertex move costs two edge re-evaluations.
inline void anneal(ParamPath& path, const OptimizeOptions& opts, Eigen::Index dim, DriveKind kind,
                   std::mt19937_64& rng, int first_sweep, std::vector<double>& history,
                   int& sweeps_done) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t m = path.size();
    std::vector<double> contrib(m - 1);
    for (std::size_t e = 0; e + 1 < m; ++e)
        contrib[e] =
            edge_penalty(path.vertices[e], path.vertices[e + 1], opts.samples_per_edge, dim, kind);
    double total = 0.0;
    for (double c : contrib) total += c;

    int below = 0;
    for (int sweep = first_sweep; sweep < first_sweep + opts.max_sweeps; ++sweep) {
        const double sigma = sweep_sigma(opts, sweep);
        const double start_total = total;
        for (std::size_t v = 1; v + 1 < m; ++v) {
            for (int p = 0; p < opts.proposals_per_vertex; ++p) {
                const DrivePoint old = path.vertices[v];
                const DrivePoint cand = project_vertex(old.delta + sigma * gauss(rng),
                                                       old.beta + sigma * gauss(rng), path.spec);
                path.vertices[v] = cand;
                const double left =
                    edge_penalty(path.vertices[v - 1], cand, opts.samples_per_edge, dim, kind);
                const double right =
                    edge_penalty(cand, path.vertices[v + 1], opts.samples_per_edge, dim, kind);
                const double cand_total = total - contrib[v - 1] - contrib[v] + left + right;
                if (cand_total < total) {  // ties rejected for determinism
                    contrib[v - 1] = left;
                    contrib[v] = right;
                    total = cand_total;
                } else {
                    path.vertices[v] = old;
                }
            }
        }
        history.push_back(total);
        ++sweeps_done;
        const double rel = (start_total - total) / std::max(start_total, 1e-300);
        below = rel < opts.converge_rel ? below + 1 : 0;
        if (below >= opts.converge_sweeps && sigma <= opts.sigma_stop) break;
    }
}

}  // namespace detail

inline OptimizeResult optimize(const ParamPath& seed, const OptimizeOptions& opts,
                               DriveKind kind = DriveKind::Linear) {
    seed.validate();
    const Eigen::Index dim = seed.spec.resolved_dim();

    OptimizeResult result;
    result.path = seed;
    result.seed_penalty = path_penalty(seed, dim, opts.samples_per_edge, kind, opts.jobs).total;

    std::mt19937_64 rng(opts.seed);
    int sweeps = 0;
    detail::anneal(result.path, opts, dim, kind, rng, 0, result.history, sweeps);

    if (opts.reweight) {
        // Concentrate vertices where the penalty lives, then refine again
        // with a partially re-grown proposal amplitude.
        PenaltyProfile profile = path_penalty(result.path, dim, opts.samples_per_edge, kind, opts.jobs);
        std::vector<double> weights(profile.q_vals.size());
        for (std::size_t i = 0; i < weights.size(); ++i)
            weights[i] = std::sqrt(std::max(profile.q_vals[i], 0.0)) + 1e-6;
        ParamPath redistributed;
        redistributed.spec = result.path.spec;
        redistributed.vertices =
            resample_by_weight(result.path, profile.arc_s, weights, result.path.spec.n_vertices);
        redistributed.validate();

        const double before = path_penalty(redistributed, dim, opts.samples_per_edge, kind, opts.jobs).total;
        std::vector<double> history2;
        int sweeps2 = 0;
        const int resume = std::max(0, static_cast<int>(result.history.size()) / 3);
        detail::anneal(redistributed, opts, dim, kind, rng, resume, history2, sweeps2);
        const double after = history2.empty() ? before : history2.back();

        // Keep the redistributed solution only if it actually improved on
        // the first phase; resampling alone can cost a little accuracy.
        const double phase1 = result.history.empty() ? result.seed_penalty : result.history.back();
        if (after < phase1) {
            result.path = redistributed;
            result.history.insert(result.history.end(), history2.begin(), history2.end());
            sweeps += sweeps2;
        }
    }

    result.sweeps = sweeps;
    result.profile = path_penalty(result.path, dim, opts.samples_per_edge, kind, opts.jobs);
    return result;
}

// Region segmentation over profile samples: C is the contiguous terminal
// block where Q exceeds 1e-4 of its maximum, A is the leading block pinned
// at the detuning clamp, B is the remainder.
inline RegionLabels segment_regions(const ParamPath& path, const PenaltyProfile& profile) {
    RegionLabels out;
    const std::size_t n = profile.q_vals.size();
    out.labels.assign(n, Region::B);
    if (n == 0) return out;
    double qmax = 0.0;
    for (double q : profile.q_vals) qmax = std::max(qmax, q);
    const double threshold = 1e-4 * qmax;
    for (std::size_t i = n; i-- > 0;) {
        if (profile.q_vals[i] >= threshold)
            out.labels[i] = Region::C;
        else
            break;
    }
    const double clamp = path.spec.delta_max - 1e-6;
    for (std::size_t i = 0; i < n && out.labels[i] != Region::C; ++i) {
        if (profile.points[i].delta >= clamp)
            out.labels[i] = Region::A;
        else
            break;
    }
    return out;
}

}  // namespace kerrfock
