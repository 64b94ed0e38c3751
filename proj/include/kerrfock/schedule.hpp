#pragma once

// Time parametrization of an optimized path. Saturating the adiabatic bound
// makes the instantaneous penalty constant, which fixes
//   t(s) = (T / I[C]) * integral_0^s Q_C ds'
// up to the region-B stretch factor k that retimes the Rabi-oscillation
// phase without changing the geometry.

#include <algorithm>
#include <cmath>
#include <vector>

#include "kerrfock/common.hpp"
#include "kerrfock/path.hpp"
#include "kerrfock/pathopt.hpp"
#include "kerrfock/penalty.hpp"

namespace kerrfock {

struct SchedulePoint {
    double t = 0.0;
    double s = 0.0;
    DrivePoint pt;
    double q = 0.0;
    Region region = Region::B;
};

struct TimedSchedule {
    double total_time = 0.0;
    double stretch_k = 1.0;
    double penalty_total = 0.0;  // unweighted I[C] over the dense grid
    ParamPath source_path;
    DriveKind kind = DriveKind::Linear;
    std::vector<SchedulePoint> samples;

    const TargetSpec& spec() const { return source_path.spec; }

    double dwell_time(Region r) const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < samples.size(); ++i)
            if (samples[i].region == r) acc += samples[i + 1].t - samples[i].t;
        return acc;
    }
};

struct ScheduleOptions {
    int s_samples = 2048;  // dense arc grid, refined where Q is large
    int t_samples = 4096;  // uniform output grid handed to the integrator
    int jobs = 1;
};

namespace detail {

struct ArcSegment {
    double s0 = 0.0, s1 = 0.0;
    DrivePoint mid;
    PathTangent tangent;
    double q = 0.0;
    Region region = Region::B;
};

inline std::vector<ArcSegment> base_segments(const ParamPath& path, int s_samples) {
    const double total = path.total_length();
    std::vector<ArcSegment> segs;
    std::vector<double> params;
    double s = 0.0;
    for (std::size_t e = 0; e + 1 < path.size(); ++e) {
        const DrivePoint& a = path.vertices[e];
        const DrivePoint& b = path.vertices[e + 1];
        const double len = path.edge_length(e);
        if (len == 0.0) continue;
        const PathTangent u{(b.delta - a.delta) / len, (b.beta - a.beta) / len};
        const int nsub = std::max(2, static_cast<int>(std::lround(s_samples * len / total)));
        edge_sample_params(a, b, nsub, params);  // boundaries incl. crossing anchors
        for (std::size_t j = 0; j + 1 < params.size(); ++j) {
            ArcSegment seg;
            seg.s0 = s + len * params[j];
            seg.s1 = s + len * params[j + 1];
            const double tm = 0.5 * (params[j] + params[j + 1]);
            seg.mid = DrivePoint(a.delta + tm * (b.delta - a.delta),
                                 std::max(0.0, a.beta + tm * (b.beta - a.beta)));
            seg.tangent = u;
            segs.push_back(seg);
        }
        s += len;
    }
    return segs;
}

inline void eval_segments(std::vector<ArcSegment>& segs, Eigen::Index dim, DriveKind kind,
                          int jobs) {
    parallel_for(segs.size(), jobs, [&](std::size_t i) {
        segs[i].q = q_along(segs[i].mid, segs[i].tangent, dim, kind);
    });
}

// Splits segments so that no one carries more than its share of the total
// integrated penalty; this densifies the grid exactly where Q is large.
inline std::vector<ArcSegment> refine_segments(const ParamPath& path,
                                               const std::vector<ArcSegment>& segs,
                                               int s_samples) {
    double total_weight = 0.0;
    for (const auto& g : segs) total_weight += g.q * (g.s1 - g.s0);
    const double budget = total_weight / s_samples;
    std::vector<ArcSegment> out;
    out.reserve(segs.size() * 2);
    for (const auto& g : segs) {
        const double w = g.q * (g.s1 - g.s0);
        const int parts =
            budget > 0.0 ? std::clamp(static_cast<int>(std::ceil(w / budget)), 1, 64) : 1;
        for (int j = 0; j < parts; ++j) {
            ArcSegment h = g;
            h.s0 = g.s0 + (g.s1 - g.s0) * j / parts;
            h.s1 = g.s0 + (g.s1 - g.s0) * (j + 1) / parts;
            h.mid = path.point_at(0.5 * (h.s0 + h.s1));
            out.push_back(h);
        }
    }
    return out;
}

inline void label_segments(std::vector<ArcSegment>& segs, const ParamPath& path) {
    double qmax = 0.0;
    for (const auto& g : segs) qmax = std::max(qmax, g.q);
    const double threshold = 1e-4 * qmax;
    for (auto& g : segs) g.region = Region::B;
    for (std::size_t i = segs.size(); i-- > 0;) {
        if (segs[i].q >= threshold)
            segs[i].region = Region::C;
        else
            break;
    }
    const double clamp = path.spec.delta_max - 1e-6;
    for (std::size_t i = 0; i < segs.size() && segs[i].region != Region::C; ++i) {
        if (segs[i].mid.delta >= clamp)
            segs[i].region = Region::A;
        else
            break;
    }
}

}  // namespace detail

// The arc-length penalty decomposition of one path, computed once and then
// reusable for any (T, k) without re-diagonalizing along the path.
class SegmentedPath {
  public:
    SegmentedPath(ParamPath path, int s_samples = 2048, int jobs = 1)
        : path_(std::move(path)) {
        path_.validate(/*require_endpoints=*/false);
        const Eigen::Index dim = path_.spec.resolved_dim();
        auto segs = detail::base_segments(path_, s_samples);
        detail::eval_segments(segs, dim, kind_, jobs);
        segs = detail::refine_segments(path_, segs, s_samples);
        detail::eval_segments(segs, dim, kind_, jobs);
        detail::label_segments(segs, path_);
        segs_ = std::move(segs);
        penalty_total_ = 0.0;
        qmax_ = 0.0;
        for (const auto& g : segs_) {
            penalty_total_ += g.q * (g.s1 - g.s0);
            qmax_ = std::max(qmax_, g.q);
        }
    }

    const ParamPath& path() const { return path_; }
    double penalty_total() const { return penalty_total_; }

    TimedSchedule schedule(double total_time, double stretch_k, int t_samples = 4096) const {
        if (!(total_time > 0.0)) throw ConfigError("schedule total time must be > 0");
        if (!(stretch_k >= 1.0)) throw ConfigError("region-B stretch factor must be >= 1");
        if (t_samples < 2) throw ConfigError("schedule needs at least 2 time samples");
        if (!(penalty_total_ > 0.0))
            throw NumericalError("path has zero total penalty; the time law cannot be normalized");

        // Weighted dwell: stretch region B by k, then renormalize to T.
        // Weights are floored so t(s) stays strictly increasing.
        const double w_floor = qmax_ * 1e-12;
        std::vector<double> t_at(segs_.size() + 1, 0.0);
        double weight_total = 0.0;
        for (std::size_t i = 0; i < segs_.size(); ++i) {
            const double w = std::max(segs_[i].q, w_floor) *
                             (segs_[i].region == Region::B ? stretch_k : 1.0);
            t_at[i + 1] = t_at[i] + w * (segs_[i].s1 - segs_[i].s0);
            weight_total += w * (segs_[i].s1 - segs_[i].s0);
        }
        for (auto& t : t_at) t *= total_time / weight_total;
        t_at.back() = total_time;

        TimedSchedule sched;
        sched.total_time = total_time;
        sched.stretch_k = stretch_k;
        sched.penalty_total = penalty_total_;
        sched.source_path = path_;
        sched.kind = kind_;
        sched.samples.resize(t_samples);

        std::size_t seg = 0;
        for (int i = 0; i < t_samples; ++i) {
            const double t = total_time * i / (t_samples - 1);
            while (seg + 1 < segs_.size() && t_at[seg + 1] < t) ++seg;
            const double dt = t_at[seg + 1] - t_at[seg];
            const double frac = dt > 0.0 ? std::clamp((t - t_at[seg]) / dt, 0.0, 1.0) : 0.0;
            SchedulePoint sp;
            sp.t = t;
            sp.s = segs_[seg].s0 + frac * (segs_[seg].s1 - segs_[seg].s0);
            sp.pt = path_.point_at(sp.s);
            sp.q = segs_[seg].q;
            sp.region = segs_[seg].region;
            sched.samples[i] = sp;
        }
        sched.samples.front().pt = path_.vertices.front();
        sched.samples.front().s = 0.0;
        sched.samples.back().pt = path_.vertices.back();
        sched.samples.back().s = path_.total_length();
        return sched;
    }

  private:
    ParamPath path_;
    DriveKind kind_ = DriveKind::Linear;
    std::vector<detail::ArcSegment> segs_;
    double penalty_total_ = 0.0;
    double qmax_ = 0.0;
};

inline TimedSchedule build_schedule(const ParamPath& path, double total_time, double stretch_k,
                                    const ScheduleOptions& opts = {}) {
    return SegmentedPath(path, opts.s_samples, opts.jobs)
        .schedule(total_time, stretch_k, opts.t_samples);
}

inline DrivePoint controls_at(const TimedSchedule& sched, double t) {
    const double T = sched.total_time;
    if (t < -1e-12 || t > T * (1.0 + 1e-12)) throw IndexError("time outside schedule range");
    t = std::clamp(t, 0.0, T);
    const auto& ss = sched.samples;
    auto it = std::lower_bound(ss.begin(), ss.end(), t,
                               [](const SchedulePoint& p, double x) { return p.t < x; });
    if (it == ss.begin()) return ss.front().pt;
    if (it == ss.end()) return ss.back().pt;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double dt = hi.t - lo.t;
    const double f = dt > 0.0 ? (t - lo.t) / dt : 0.0;
    return DrivePoint(lo.pt.delta + f * (hi.pt.delta - lo.pt.delta),
                      std::max(0.0, lo.pt.beta + f * (hi.pt.beta - lo.pt.beta)));
}

// Spread of the instantaneous penalty P(t) = Q(s(t)) ds/dt over time cells
// outside region B, as max relative deviation from the median. Each cell's
// P is measured as the freshly integrated penalty accrued across it divided
// by its duration; saturation of the adiabatic bound makes the spread small
// for k = 1.
inline double saturation_spread(const TimedSchedule& sched, int max_windows = 96,
                                int sub_samples = 12) {
    const auto& ss = sched.samples;
    const ParamPath& path = sched.source_path;
    const Eigen::Index dim = path.spec.resolved_dim();
    if (ss.size() < 4) return 0.0;
    const std::size_t stride = std::max<std::size_t>(1, ss.size() / max_windows);

    std::vector<double> p_vals;
    for (std::size_t i = 0; i + 1 < ss.size(); i += stride) {
        if (ss[i].region == Region::B || ss[i + 1].region == Region::B) continue;
        const double dt = ss[i + 1].t - ss[i].t;
        const double ds = ss[i + 1].s - ss[i].s;
        if (dt <= 0.0 || ds <= 0.0) continue;
        double acc = 0.0;
        for (int j = 0; j < sub_samples; ++j) {
            const double s = ss[i].s + ds * (j + 0.5) / sub_samples;
            acc += detail::q_along(path.point_at(s), path.tangent_at(s), dim, sched.kind) * ds /
                   sub_samples;
        }
        p_vals.push_back(acc / dt);
    }
    if (p_vals.size() < 3) return 0.0;
    std::vector<double> sorted = p_vals;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double med = sorted[sorted.size() / 2];
    double spread = 0.0;
    for (double p : p_vals) spread = std::max(spread, std::abs(p - med) / med);
    return spread;
}

}  // namespace kerrfock
