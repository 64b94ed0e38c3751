#pragma once

// Adiabatic penalty density Q_C(s) and the total path penalty I[C].
//
//   Q_C(s) = sum_{n != 0} |beta'(s) L_n(s) + Delta'(s) M_n(s)| / |E_n - E_0|^2
//   I[C]   = integral of Q_C over arc length.
//
// The sum runs over every excited state of the truncated space. Below the
// numeric drive floor the vertical component is evaluated with the analytic
// leading-order strip penalty instead, since eigenvector tracking degrades
// next to the degenerate manifolds at beta = 0.

#include <cmath>
#include <vector>

#include "kerrfock/common.hpp"
#include "kerrfock/model.hpp"
#include "kerrfock/path.hpp"
#include "kerrfock/spectral.hpp"
#include "kerrfock/variational.hpp"

namespace kerrfock {

// Penalty density at a drive point for a unit tangent direction.
inline double penalty_density(const DrivePoint& pt, const PathTangent& tangent, Eigen::Index dim,
                              DriveKind kind = DriveKind::Linear) {
    const double tnorm = std::hypot(tangent.d_delta, tangent.d_beta);
    if (std::abs(tnorm - 1.0) > 1e-6)
        throw FeasibilityError("penalty tangent must be a unit vector");
    const EigenSystem es = eigensystem_at(kind, pt.delta, pt.beta, dim);
    const CouplingRow row = coupling_row(es, kind);
    double q = 0.0;
    for (Eigen::Index i = 0; i < row.count(); ++i) {
        const double num = std::abs(tangent.d_beta * row.l_vals(i) + tangent.d_delta * row.m_vals(i));
        const double gap = row.gaps(i);
        q += num / (gap * gap);
    }
    return q;
}

namespace detail {

// Ground-state Fock index of the crossing-free interval containing delta at
// beta -> 0: |m> is the ground state for delta in (-m, -(m-1)).
inline int ground_index_at(double delta) {
    if (delta >= 0.0) return 0;
    return static_cast<int>(std::ceil(-delta - 1e-12));
}

// Ground-state crossings sit at integer detunings 0, -1, -2, ... (the odd
// series Delta_{2j-1} = -(j-1)). Returns those strictly inside (lo, hi).
inline void odd_crossings_between(double lo, double hi, std::vector<double>& out) {
    if (lo > hi) std::swap(lo, hi);
    const double first = std::ceil(std::max(lo, -1e9));
    for (double c = std::min(0.0, std::floor(hi)); c >= first; c -= 1.0) {
        if (c > lo && c < hi) out.push_back(c);
    }
}

inline double nearest_odd_crossing(double delta) {
    return std::min(0.0, std::round(delta));
}

// Leading-order vertical penalty at beta ~ 0. For the m = 0 interval only
// the upward coupling L_1 = 1 with gap Delta survives.
inline double analytic_vertical_q(double delta) {
    const int m = ground_index_at(delta);
    if (m == 0) {
        if (delta <= 0.0) throw DegeneratePointError("vertical penalty diverges at delta = 0");
        return 1.0 / (delta * delta);
    }
    const double mid = 0.5 * (crossing_detuning(2 * m + 1) + crossing_detuning(2 * m - 1));
    return q_beta_analytic(m, delta - mid);
}

// Penalty density used for path quadrature: numeric away from the drive
// floor, analytic below it. A sub-floor point inside a crossing window is
// scored with the two-level peak value ~ 1/(8 j beta^2) -- passing a
// ground-state crossing with (near) zero drive is what the scheme must
// never do, and the sampled objective has to see that cost.
inline double q_along(const DrivePoint& pt, const PathTangent& tangent, Eigen::Index dim,
                      DriveKind kind) {
    if (pt.beta >= kBetaFloor) return penalty_density(pt, tangent, dim, kind);
    const double crossing = nearest_odd_crossing(pt.delta);
    if (std::abs(pt.delta - crossing) <= kCrossingWindow) {
        const double j = 1.0 - crossing;  // |j-1> <-> |j> hybridize here
        const double beta = std::max(pt.beta, 1e-12);
        return (std::abs(tangent.d_delta) + std::abs(tangent.d_beta)) / (8.0 * j * beta * beta);
    }
    return std::abs(tangent.d_beta) * analytic_vertical_q(pt.delta);
}

}  // namespace detail

struct PenaltyProfile {
    std::vector<double> arc_s;
    std::vector<double> q_vals;
    std::vector<DrivePoint> points;
    double total = 0.0;
    int samples_per_edge = 0;

    // Composite trapezoid over the node list; edge boundaries repeat the
    // same arc position, so the zero-width gaps contribute nothing.
    double quadrature() const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < arc_s.size(); ++i)
            acc += 0.5 * (q_vals[i] + q_vals[i + 1]) * (arc_s[i + 1] - arc_s[i]);
        return acc;
    }
};

namespace detail {

// Sampling parameters t in [0, 1] for one edge: a uniform closed grid plus
// a node at every odd-crossing traversal, so the gap-collapse peaks can
// never hide between samples.
inline void edge_sample_params(const DrivePoint& a, const DrivePoint& b, int samples,
                               std::vector<double>& t_out) {
    t_out.clear();
    for (int j = 0; j <= samples; ++j)
        t_out.push_back(static_cast<double>(j) / static_cast<double>(samples));
    const double dd = b.delta - a.delta;
    if (dd != 0.0) {
        std::vector<double> crossings;
        odd_crossings_between(a.delta, b.delta, crossings);
        for (double c : crossings) t_out.push_back((c - a.delta) / dd);
    }
    std::sort(t_out.begin(), t_out.end());
    t_out.erase(std::unique(t_out.begin(), t_out.end(),
                            [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                t_out.end());
}

}  // namespace detail

// Trapezoid contribution of the edge a -> b with crossing-anchored nodes.
inline double edge_penalty(const DrivePoint& a, const DrivePoint& b, int samples, Eigen::Index dim,
                           DriveKind kind) {
    const double dd = b.delta - a.delta;
    const double db = b.beta - a.beta;
    const double len = std::hypot(dd, db);
    if (len == 0.0) return 0.0;
    const PathTangent u{dd / len, db / len};
    std::vector<double> params;
    detail::edge_sample_params(a, b, samples, params);
    double acc = 0.0;
    double q_prev = 0.0;
    for (std::size_t j = 0; j < params.size(); ++j) {
        const double t = params[j];
        const DrivePoint p(a.delta + t * dd, std::max(0.0, a.beta + t * db));
        const double q = detail::q_along(p, u, dim, kind);
        if (j > 0) acc += 0.5 * (q_prev + q) * (params[j] - params[j - 1]) * len;
        q_prev = q;
    }
    return acc;
}

inline PenaltyProfile path_penalty(const ParamPath& path, Eigen::Index dim, int samples_per_edge,
                                   DriveKind kind = DriveKind::Linear, int jobs = 1) {
    if (samples_per_edge < 1) throw ConfigError("samples_per_edge must be >= 1");
    path.validate(/*require_endpoints=*/false);

    struct Sample {
        double s;
        DrivePoint pt;
        PathTangent u;
    };
    std::vector<Sample> samples;
    samples.reserve((path.size() - 1) * (samples_per_edge + 2));
    std::vector<double> params;
    double s0 = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const DrivePoint& a = path.vertices[i];
        const DrivePoint& b = path.vertices[i + 1];
        const double dd = b.delta - a.delta;
        const double db = b.beta - a.beta;
        const double len = std::hypot(dd, db);
        if (len == 0.0) continue;
        const PathTangent u{dd / len, db / len};
        detail::edge_sample_params(a, b, samples_per_edge, params);
        for (double t : params)
            samples.push_back(
                {s0 + t * len, DrivePoint(a.delta + t * dd, std::max(0.0, a.beta + t * db)), u});
        s0 += len;
    }

    PenaltyProfile profile;
    profile.samples_per_edge = samples_per_edge;
    profile.arc_s.resize(samples.size());
    profile.q_vals.resize(samples.size());
    profile.points.resize(samples.size());
    parallel_for(samples.size(), jobs, [&](std::size_t i) {
        profile.arc_s[i] = samples[i].s;
        profile.points[i] = samples[i].pt;
        profile.q_vals[i] = detail::q_along(samples[i].pt, samples[i].u, dim, kind);
    });
    profile.total = profile.quadrature();
    return profile;
}

// Doubles the per-edge sampling until the total moves by less than rel_tol.
inline PenaltyProfile path_penalty_converged(const ParamPath& path, Eigen::Index dim,
                                             int start_samples = 8, double rel_tol = 0.005,
                                             DriveKind kind = DriveKind::Linear, int jobs = 1,
                                             int max_doublings = 6) {
    PenaltyProfile coarse = path_penalty(path, dim, start_samples, kind, jobs);
    for (int it = 0; it < max_doublings; ++it) {
        PenaltyProfile fine = path_penalty(path, dim, coarse.samples_per_edge * 2, kind, jobs);
        const double denom = std::max(std::abs(fine.total), 1e-300);
        if (std::abs(fine.total - coarse.total) <= rel_tol * denom) return fine;
        coarse = std::move(fine);
    }
    throw NumericalError("path penalty quadrature failed to converge under refinement");
}

}  // namespace kerrfock
