#pragma once

// Polyline paths C = {(Delta(s), beta(s))} in drive-parameter space with
// arc-length bookkeeping, plus the feasibility rules the generation scheme
// imposes: beta >= 0, Delta <= Delta_max, fixed endpoints, and a nonzero
// drive whenever the path passes an odd crossing Delta_1, Delta_3, ...

#include <algorithm>
#include <cmath>
#include <vector>

#include "kerrfock/common.hpp"
#include "kerrfock/model.hpp"
#include "kerrfock/variational.hpp"

namespace kerrfock {

// Half-width of the detuning window around each odd crossing inside which
// interior vertices must keep beta >= kBetaFloor.
inline constexpr double kCrossingWindow = 0.05;
inline constexpr double kEndpointTol = 1e-9;

struct TargetSpec {
    int n_target = 1;
    double delta_max = 30.0;
    Eigen::Index dim = 0;  // 0 selects the truncation rule below
    int n_vertices = 60;

    double delta_f() const { return final_detuning(n_target); }

    double beta_max() const { return region_b_beta(delta_max, delta_f()); }

    // dim = max(4 n + 20, ceil(4 |alpha_max|^2) + 20): coherent tails decay
    // super-exponentially beyond 2|alpha|^2, and the target needs headroom.
    Eigen::Index resolved_dim() const {
        if (dim > 0) return dim;
        const double alpha = coherent_alpha(delta_max, beta_max()).alpha;
        const auto by_target = static_cast<Eigen::Index>(4 * n_target + 20);
        const auto by_drive =
            static_cast<Eigen::Index>(std::ceil(4.0 * alpha * alpha)) + 20;
        return std::max(by_target, by_drive);
    }

    void validate() const {
        if (n_target < 1) throw ConfigError("target Fock number must be >= 1");
        if (!(delta_max > 0.0)) throw ConfigError("delta_max must be > 0");
        if (n_vertices < 4) throw ConfigError("need at least 4 path vertices");
        if (dim < 0) throw ConfigError("dim override must be positive");
    }
};

inline bool near_odd_crossing(double delta, int n_target, double window = kCrossingWindow) {
    for (int k = 1; k <= n_target; ++k) {
        if (std::abs(delta - crossing_detuning(2 * k - 1)) <= window) return true;
    }
    return false;
}

// Clips a raw proposal onto the feasible set. Endpoints are never projected;
// they are pinned by construction.
inline DrivePoint project_vertex(double delta, double beta, const TargetSpec& spec) {
    delta = std::min(delta, spec.delta_max);
    beta = std::max(beta, 0.0);
    if (near_odd_crossing(delta, spec.n_target)) beta = std::max(beta, kBetaFloor);
    return DrivePoint(delta, beta);
}

// Unit direction (dDelta/ds, dbeta/ds) along a path.
struct PathTangent {
    double d_delta = 0.0;
    double d_beta = 0.0;
};

struct ParamPath {
    TargetSpec spec;
    std::vector<DrivePoint> vertices;

    std::size_t size() const { return vertices.size(); }

    double total_length() const {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i) s += edge_length(i);
        return s;
    }

    double edge_length(std::size_t i) const {
        const double dd = vertices[i + 1].delta - vertices[i].delta;
        const double db = vertices[i + 1].beta - vertices[i].beta;
        return std::hypot(dd, db);
    }

    // Edge direction at arc length s (the tangent is piecewise constant).
    PathTangent tangent_at(double s) const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
            const double len = edge_length(i);
            if ((s <= acc + len && len > 0.0) || i + 2 == vertices.size()) {
                if (len == 0.0) return PathTangent{0.0, 1.0};
                return PathTangent{(vertices[i + 1].delta - vertices[i].delta) / len,
                                   (vertices[i + 1].beta - vertices[i].beta) / len};
            }
            acc += len;
        }
        return PathTangent{0.0, 1.0};
    }

    // Point at arc length s, measured from the start vertex.
    DrivePoint point_at(double s) const {
        if (s <= 0.0) return vertices.front();
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
            const double len = edge_length(i);
            if (s <= len || i + 2 == vertices.size()) {
                if (len == 0.0) return vertices[i];
                const double t = std::min(s / len, 1.0);
                return DrivePoint(vertices[i].delta + t * (vertices[i + 1].delta - vertices[i].delta),
                                  std::max(0.0, vertices[i].beta +
                                                    t * (vertices[i + 1].beta - vertices[i].beta)));
            }
            s -= len;
        }
        return vertices.back();
    }

    // Scheme paths are pinned to start (delta_max, 0) and end (delta_f, 0);
    // penalty and schedule evaluation also accept free synthetic geometries.
    void validate(bool require_endpoints = true) const {
        spec.validate();
        if (vertices.size() < 2) throw FeasibilityError("path needs at least 2 vertices");
        if (require_endpoints) {
            const double df = spec.delta_f();
            if (std::abs(vertices.front().delta - spec.delta_max) > kEndpointTol ||
                std::abs(vertices.front().beta) > kEndpointTol)
                throw FeasibilityError("path must start at (delta_max, 0)");
            if (std::abs(vertices.back().delta - df) > kEndpointTol ||
                std::abs(vertices.back().beta) > kEndpointTol)
                throw FeasibilityError("path must end at (delta_f, 0)");
        }
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const auto& v = vertices[i];
            if (v.beta < 0.0) throw FeasibilityError("path vertex with beta < 0");
            if (v.delta > spec.delta_max + kEndpointTol)
                throw FeasibilityError("path vertex beyond delta_max");
            const bool interior = i > 0 && i + 1 < vertices.size();
            if (interior && near_odd_crossing(v.delta, spec.n_target) && v.beta < kBetaFloor)
                throw FeasibilityError("interior vertex crosses an odd resonance with beta below floor");
        }
    }
};

// Resamples a polyline to `count` vertices spaced by the cumulative weight
// w(s) ds; weight samples are piecewise constant between the given arc
// positions. Endpoints are preserved exactly.
inline std::vector<DrivePoint> resample_by_weight(const ParamPath& path,
                                                  const std::vector<double>& arc_s,
                                                  const std::vector<double>& weights,
                                                  int count) {
    const double total = path.total_length();
    std::vector<double> cum{0.0};
    std::vector<double> pos{0.0};
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < arc_s.size(); ++i) {
        const double w = std::max(weights[i], 1e-12);
        acc += w * (arc_s[i] - prev);
        prev = arc_s[i];
        cum.push_back(acc);
        pos.push_back(arc_s[i]);
    }
    acc += (weights.empty() ? 1e-12 : std::max(weights.back(), 1e-12)) * (total - prev);
    cum.push_back(acc);
    pos.push_back(total);

    std::vector<DrivePoint> out;
    out.reserve(count);
    out.push_back(path.vertices.front());
    for (int k = 1; k + 1 < count; ++k) {
        const double target = acc * static_cast<double>(k) / static_cast<double>(count - 1);
        auto it = std::lower_bound(cum.begin(), cum.end(), target);
        const std::size_t j = std::min<std::size_t>(cum.size() - 1,
                                                    static_cast<std::size_t>(it - cum.begin()));
        double s;
        if (j == 0) {
            s = 0.0;
        } else {
            const double span = cum[j] - cum[j - 1];
            const double t = span > 0.0 ? (target - cum[j - 1]) / span : 0.0;
            s = pos[j - 1] + t * (pos[j] - pos[j - 1]);
        }
        const DrivePoint p = path.point_at(s);
        out.push_back(project_vertex(p.delta, p.beta, path.spec));
    }
    out.push_back(path.vertices.back());
    return out;
}

}  // namespace kerrfock
