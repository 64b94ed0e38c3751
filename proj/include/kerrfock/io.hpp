#pragma once

// Versioned plain-text artifacts: path and schedule documents at full double
// precision, and CSV/grid exports for plotting. Every file carries a schema
// tag, the configuration hash, and the RNG seed of the run that made it.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kerrfock/common.hpp"
#include "kerrfock/config.hpp"
#include "kerrfock/dynamics.hpp"
#include "kerrfock/path.hpp"
#include "kerrfock/pathopt.hpp"
#include "kerrfock/schedule.hpp"
#include "kerrfock/wigner.hpp"

namespace kerrfock {

inline constexpr const char* kPathSchema = "kerrfock-path/1";
inline constexpr const char* kScheduleSchema = "kerrfock-schedule/1";
inline constexpr const char* kCsvSchema = "kerrfock-csv/1";
inline constexpr const char* kGridSchema = "kerrfock-grid/1";

struct ArtifactMeta {
    std::string config_hash;
    std::uint64_t seed = 0;
};

struct PathDocument {
    ParamPath path;
    ArtifactMeta meta;
    double penalty = 0.0;  // converged I[C]
};

struct ScheduleDocument {
    TimedSchedule schedule;
    ArtifactMeta meta;
};

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& file) {
    if (file.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(file.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + file.parent_path().string());
    }
    std::ofstream out(file);
    if (!out) throw IoError("cannot open " + file.string() + " for writing");
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    return in;
}

inline void expect_token(std::istream& in, const std::string& want, const std::string& file) {
    std::string got;
    if (!(in >> got) || got != want)
        throw IoError(file + ": expected '" + want + "', got '" + got + "'");
}

}  // namespace detail

inline void write_path_document(const std::filesystem::path& file, const PathDocument& doc) {
    auto out = detail::open_out(file);
    const ParamPath& p = doc.path;
    out << kPathSchema << "\n";
    out << "config_hash " << doc.meta.config_hash << "\n";
    out << "seed " << doc.meta.seed << "\n";
    out << "n_target " << p.spec.n_target << "\n";
    out << "delta_max " << format_double(p.spec.delta_max) << "\n";
    out << "dim " << p.spec.resolved_dim() << "\n";
    out << "penalty " << format_double(doc.penalty) << "\n";
    out << "vertices " << p.vertices.size() << "\n";
    for (const auto& v : p.vertices)
        out << format_double(v.delta) << " " << format_double(v.beta) << "\n";
    if (!out) throw IoError("failed writing " + file.string());
}

inline PathDocument read_path_document(const std::filesystem::path& file) {
    auto in = detail::open_in(file);
    std::string schema;
    in >> schema;
    if (schema != kPathSchema) throw IoError(file.string() + ": unsupported schema " + schema);
    PathDocument doc;
    std::size_t count = 0;
    Eigen::Index dim = 0;
    detail::expect_token(in, "config_hash", file.string());
    in >> doc.meta.config_hash;
    detail::expect_token(in, "seed", file.string());
    in >> doc.meta.seed;
    detail::expect_token(in, "n_target", file.string());
    in >> doc.path.spec.n_target;
    detail::expect_token(in, "delta_max", file.string());
    in >> doc.path.spec.delta_max;
    detail::expect_token(in, "dim", file.string());
    in >> dim;
    detail::expect_token(in, "penalty", file.string());
    in >> doc.penalty;
    detail::expect_token(in, "vertices", file.string());
    in >> count;
    if (!in) throw IoError(file.string() + ": malformed header");
    doc.path.spec.dim = dim;
    doc.path.vertices.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        double d, b;
        if (!(in >> d >> b)) throw IoError(file.string() + ": truncated vertex list");
        doc.path.vertices.push_back(DrivePoint(d, b));
    }
    doc.path.spec.n_vertices = static_cast<int>(count);
    doc.path.validate();
    return doc;
}

inline void write_schedule_document(const std::filesystem::path& file,
                                    const ScheduleDocument& doc) {
    auto out = detail::open_out(file);
    const TimedSchedule& s = doc.schedule;
    const ParamPath& p = s.source_path;
    out << kScheduleSchema << "\n";
    out << "config_hash " << doc.meta.config_hash << "\n";
    out << "seed " << doc.meta.seed << "\n";
    out << "n_target " << p.spec.n_target << "\n";
    out << "delta_max " << format_double(p.spec.delta_max) << "\n";
    out << "dim " << p.spec.resolved_dim() << "\n";
    out << "penalty " << format_double(s.penalty_total) << "\n";
    out << "total_time " << format_double(s.total_time) << "\n";
    out << "stretch_k " << format_double(s.stretch_k) << "\n";
    out << "vertices " << p.vertices.size() << "\n";
    for (const auto& v : p.vertices)
        out << format_double(v.delta) << " " << format_double(v.beta) << "\n";
    out << "samples " << s.samples.size() << "\n";
    for (const auto& sp : s.samples)
        out << format_double(sp.t) << " " << format_double(sp.s) << " "
            << format_double(sp.pt.delta) << " " << format_double(sp.pt.beta) << " "
            << format_double(sp.q) << " " << static_cast<char>(sp.region) << "\n";
    if (!out) throw IoError("failed writing " + file.string());
}

inline ScheduleDocument read_schedule_document(const std::filesystem::path& file) {
    auto in = detail::open_in(file);
    std::string schema;
    in >> schema;
    if (schema != kScheduleSchema) throw IoError(file.string() + ": unsupported schema " + schema);
    ScheduleDocument doc;
    TimedSchedule& s = doc.schedule;
    ParamPath& p = s.source_path;
    std::size_t vcount = 0, scount = 0;
    Eigen::Index dim = 0;
    detail::expect_token(in, "config_hash", file.string());
    in >> doc.meta.config_hash;
    detail::expect_token(in, "seed", file.string());
    in >> doc.meta.seed;
    detail::expect_token(in, "n_target", file.string());
    in >> p.spec.n_target;
    detail::expect_token(in, "delta_max", file.string());
    in >> p.spec.delta_max;
    detail::expect_token(in, "dim", file.string());
    in >> dim;
    detail::expect_token(in, "penalty", file.string());
    in >> s.penalty_total;
    detail::expect_token(in, "total_time", file.string());
    in >> s.total_time;
    detail::expect_token(in, "stretch_k", file.string());
    in >> s.stretch_k;
    detail::expect_token(in, "vertices", file.string());
    in >> vcount;
    if (!in) throw IoError(file.string() + ": malformed header");
    p.spec.dim = dim;
    for (std::size_t i = 0; i < vcount; ++i) {
        double d, b;
        if (!(in >> d >> b)) throw IoError(file.string() + ": truncated vertex list");
        p.vertices.push_back(DrivePoint(d, b));
    }
    p.spec.n_vertices = static_cast<int>(vcount);
    detail::expect_token(in, "samples", file.string());
    in >> scount;
    for (std::size_t i = 0; i < scount; ++i) {
        SchedulePoint sp;
        double d, b;
        char r;
        if (!(in >> sp.t >> sp.s >> d >> b >> sp.q >> r))
            throw IoError(file.string() + ": truncated sample table");
        sp.pt = DrivePoint(d, b);
        sp.region = static_cast<Region>(r);
        s.samples.push_back(sp);
    }
    p.validate();
    return doc;
}

inline std::string csv_header_comment(const std::string& kind, const ArtifactMeta& meta) {
    std::ostringstream out;
    out << "# " << kCsvSchema << " kind=" << kind << " config=" << meta.config_hash
        << " seed=" << meta.seed << "\n";
    return out.str();
}

// Profile export: arc position, drive point, penalty density, region label.
inline void write_profile_csv(const std::filesystem::path& file, const PenaltyProfile& profile,
                              const RegionLabels& labels, const ArtifactMeta& meta) {
    auto out = detail::open_out(file);
    out << csv_header_comment("profile", meta);
    out << "s,delta,beta,q,region\n";
    for (std::size_t i = 0; i < profile.arc_s.size(); ++i)
        out << format_double(profile.arc_s[i]) << "," << format_double(profile.points[i].delta)
            << "," << format_double(profile.points[i].beta) << ","
            << format_double(profile.q_vals[i]) << ","
            << static_cast<char>(labels.labels[i]) << "\n";
    if (!out) throw IoError("failed writing " + file.string());
}

inline void write_schedule_csv(const std::filesystem::path& file, const TimedSchedule& sched,
                               const ArtifactMeta& meta) {
    auto out = detail::open_out(file);
    out << csv_header_comment("schedule", meta);
    out << "t,delta,beta,region\n";
    for (const auto& sp : sched.samples)
        out << format_double(sp.t) << "," << format_double(sp.pt.delta) << ","
            << format_double(sp.pt.beta) << "," << static_cast<char>(sp.region) << "\n";
    if (!out) throw IoError("failed writing " + file.string());
}

inline void write_trajectory_csv(const std::filesystem::path& file, const SimResult& res,
                                 const ArtifactMeta& meta) {
    auto out = detail::open_out(file);
    out << csv_header_comment("trajectory", meta);
    out << "t,fidelity," << (res.closed ? "norm" : "trace") << ",tail";
    const Eigen::Index npop = res.dim;
    for (Eigen::Index n = 0; n < npop; ++n) out << ",p" << n;
    out << "\n";
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        out << format_double(res.times[i]) << "," << format_double(res.fidelity_series[i]);
        double conserved = 1.0, tail = 0.0;
        RealVector pops = RealVector::Zero(npop);
        if (res.closed && i < res.psi_samples.size()) {
            const Vector& psi = res.psi_samples[i];
            conserved = psi.norm();
            tail = StateVector(psi).tail_population();
            for (Eigen::Index n = 0; n < npop; ++n) pops(n) = std::norm(psi(n));
        } else if (!res.closed && i < res.rho_samples.size()) {
            const Matrix& rho = res.rho_samples[i];
            conserved = rho.trace().real();
            tail = DensityMatrix(rho).tail_population();
            for (Eigen::Index n = 0; n < npop; ++n) pops(n) = rho(n, n).real();
        }
        out << "," << format_double(conserved) << "," << format_double(tail);
        for (Eigen::Index n = 0; n < npop; ++n) out << "," << format_double(pops(n));
        out << "\n";
    }
    if (!out) throw IoError("failed writing " + file.string());
}

// Header with axes, then row-major values: one line per x, columns over p.
inline void write_wigner_grid(const std::filesystem::path& file, const WignerGrid& grid,
                              double time_tag, const ArtifactMeta& meta) {
    auto out = detail::open_out(file);
    out << "# " << kGridSchema << " kind=wigner config=" << meta.config_hash
        << " seed=" << meta.seed << " t=" << format_double(time_tag) << "\n";
    out << "# x " << format_double(grid.x(0)) << " " << format_double(grid.x(grid.x.size() - 1))
        << " " << grid.x.size() << "\n";
    out << "# p " << format_double(grid.p(0)) << " " << format_double(grid.p(grid.p.size() - 1))
        << " " << grid.p.size() << "\n";
    for (Eigen::Index i = 0; i < grid.w.rows(); ++i) {
        for (Eigen::Index j = 0; j < grid.w.cols(); ++j) {
            if (j) out << " ";
            out << format_double(grid.w(i, j));
        }
        out << "\n";
    }
    if (!out) throw IoError("failed writing " + file.string());
}

}  // namespace kerrfock
