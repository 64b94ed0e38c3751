#pragma once

// Run configuration: a single key-value text format with [section] headers.
// Serialization is lossless (doubles at full precision), and the canonical
// form is hashed into every artifact file for reproducibility.

#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kerrfock/common.hpp"

namespace kerrfock {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_list(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ",";
        out += format_double(vs[i]);
    }
    return out;
}

struct RunConfig {
    // [target]
    int n_target = 5;
    double delta_max = 30.0;
    int dim = 0;  // 0 = truncation rule
    // [optimizer]
    std::uint64_t seed = 1;
    int vertices = 60;
    int samples_per_edge = 8;
    double sigma0 = 0.5;
    double sigma_decay = 0.9;
    int proposals_per_vertex = 4;
    int max_sweeps = 300;
    double converge_rel = 1e-4;
    int converge_sweeps = 3;
    bool reweight = true;
    // [schedule]
    double total_time = 11.0;
    std::vector<double> t_grid;  // empty -> {total_time}
    double stretch_k = 1.0;
    std::vector<double> k_grid;  // empty -> {stretch_k}
    int s_samples = 2048;
    int t_samples = 4096;
    // [loss]
    double kappa = 0.0;
    // [simulate]
    int trajectory_samples = 129;
    bool wigner = false;
    std::vector<double> wigner_fractions = {0.0, 0.03, 0.06, 0.1, 0.2, 1.0};
    double wigner_range = 0.0;  // 0 = cover the truncated support
    int wigner_resolution = 101;
    // [output]
    std::string out_dir = "out";
    bool write_path = true;
    bool write_schedule = true;
    bool write_trajectory = true;
    bool write_sweep = true;
    // [run]
    int jobs = 0;  // 0 = all hardware threads

    std::vector<double> effective_t_grid() const {
        return t_grid.empty() ? std::vector<double>{total_time} : t_grid;
    }
    std::vector<double> effective_k_grid() const {
        return k_grid.empty() ? std::vector<double>{stretch_k} : k_grid;
    }

    void validate() const {
        if (n_target < 1) throw ConfigError("n must be >= 1");
        if (!(delta_max > 0.0)) throw ConfigError("delta_max must be > 0");
        if (dim < 0) throw ConfigError("dim must be >= 0");
        if (vertices < 4) throw ConfigError("vertices must be >= 4");
        if (samples_per_edge < 1) throw ConfigError("samples_per_edge must be >= 1");
        if (!(sigma0 > 0.0) || !(sigma_decay > 0.0) || sigma_decay >= 1.0)
            throw ConfigError("sigma0 must be > 0 and sigma_decay in (0, 1)");
        if (max_sweeps < 1 || proposals_per_vertex < 1 || converge_sweeps < 1)
            throw ConfigError("optimizer iteration counts must be >= 1");
        if (!(total_time > 0.0)) throw ConfigError("T must be > 0");
        for (double t : t_grid)
            if (!(t > 0.0)) throw ConfigError("T grid entries must be > 0");
        if (!(stretch_k >= 1.0)) throw ConfigError("k must be >= 1");
        for (double k : k_grid)
            if (!(k >= 1.0)) throw ConfigError("k grid entries must be >= 1");
        if (s_samples < 64 || t_samples < 64) throw ConfigError("schedule grids too coarse");
        if (!(kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
        if (trajectory_samples < 2) throw ConfigError("trajectory_samples must be >= 2");
        for (double f : wigner_fractions)
            if (f < 0.0 || f > 1.0) throw ConfigError("wigner fractions must be in [0, 1]");
        if (wigner_resolution < 3) throw ConfigError("wigner_resolution must be >= 3");
        if (jobs < 0) throw ConfigError("jobs must be >= 0");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("invalid boolean for " + key + ": " + v);
}

inline double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + key + ": " + v);
    }
}

inline long long parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for " + key + ": " + v);
    }
}

inline std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, key));
    }
    return out;
}

}  // namespace detail

// Canonical text form; `documented` adds inline comments for the template.
inline std::string serialize_config(const RunConfig& c, bool documented = false) {
    std::ostringstream out;
    auto comment = [&](const char* text) {
        if (documented) out << "# " << text << "\n";
    };
    comment("kerrfock run configuration");
    out << "[target]\n";
    comment("target Fock state |n> and the detuning clamp delta_max (units of chi)");
    out << "n = " << c.n_target << "\n";
    out << "delta_max = " << format_double(c.delta_max) << "\n";
    comment("truncation dimension; 0 picks max(4n+20, ceil(4|alpha_max|^2)+20)");
    out << "dim = " << c.dim << "\n";
    out << "\n[optimizer]\n";
    out << "seed = " << c.seed << "\n";
    out << "vertices = " << c.vertices << "\n";
    out << "samples_per_edge = " << c.samples_per_edge << "\n";
    comment("per-sweep Gaussian proposal amplitude: sigma0 * sigma_decay^sweep");
    out << "sigma0 = " << format_double(c.sigma0) << "\n";
    out << "sigma_decay = " << format_double(c.sigma_decay) << "\n";
    out << "proposals_per_vertex = " << c.proposals_per_vertex << "\n";
    out << "max_sweeps = " << c.max_sweeps << "\n";
    comment("stop after converge_sweeps consecutive sweeps improving less than converge_rel");
    out << "converge_rel = " << format_double(c.converge_rel) << "\n";
    out << "converge_sweeps = " << c.converge_sweeps << "\n";
    comment("redistribute vertices toward high penalty after the first pass");
    out << "reweight = " << (c.reweight ? "true" : "false") << "\n";
    out << "\n[schedule]\n";
    comment("total time T in units of 1/chi; T_grid (comma list) overrides T for sweeps");
    out << "T = " << format_double(c.total_time) << "\n";
    out << "T_grid = " << format_list(c.t_grid) << "\n";
    comment("region-B stretch factor k >= 1; k_grid overrides k for sweeps");
    out << "k = " << format_double(c.stretch_k) << "\n";
    out << "k_grid = " << format_list(c.k_grid) << "\n";
    out << "s_samples = " << c.s_samples << "\n";
    out << "t_samples = " << c.t_samples << "\n";
    out << "\n[loss]\n";
    comment("single-photon loss rate kappa in units of chi");
    out << "kappa = " << format_double(c.kappa) << "\n";
    out << "\n[simulate]\n";
    out << "trajectory_samples = " << c.trajectory_samples << "\n";
    out << "wigner = " << (c.wigner ? "true" : "false") << "\n";
    comment("snapshot times as fractions of T");
    out << "wigner_fractions = " << format_list(c.wigner_fractions) << "\n";
    comment("half width of the phase-space grid; 0 = sqrt(2 dim) + 1");
    out << "wigner_range = " << format_double(c.wigner_range) << "\n";
    out << "wigner_resolution = " << c.wigner_resolution << "\n";
    out << "\n[output]\n";
    out << "dir = " << c.out_dir << "\n";
    out << "write_path = " << (c.write_path ? "true" : "false") << "\n";
    out << "write_schedule = " << (c.write_schedule ? "true" : "false") << "\n";
    out << "write_trajectory = " << (c.write_trajectory ? "true" : "false") << "\n";
    out << "write_sweep = " << (c.write_sweep ? "true" : "false") << "\n";
    out << "\n[run]\n";
    comment("parallel workers for grid sweeps; 0 = all hardware threads");
    out << "jobs = " << c.jobs << "\n";
    return out.str();
}

inline RunConfig parse_config(const std::string& text) {
    RunConfig c;
    c.wigner_fractions.clear();  // lists are replaced, not appended
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    bool saw_wigner_fractions = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section at line " + std::to_string(lineno));
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        const std::string qual = section + "." + key;

        if (qual == "target.n") c.n_target = static_cast<int>(detail::parse_int(val, qual));
        else if (qual == "target.delta_max") c.delta_max = detail::parse_double(val, qual);
        else if (qual == "target.dim") c.dim = static_cast<int>(detail::parse_int(val, qual));
        else if (qual == "optimizer.seed") c.seed = static_cast<std::uint64_t>(detail::parse_int(val, qual));
        else if (qual == "optimizer.vertices") c.vertices = static_cast<int>(detail::parse_int(val, qual));
        else if (qual == "optimizer.samples_per_edge") c.samples_per_edge = static_cast<int>(detail::parse_int(val, qual));
        else if (qual == "optimizer.sigma0") c.sigma0 = detail::parse_double(val, qual);
        else if (qual == "optimizer.sigma_decay") c.sigma_decay = detail::parse_double(val, qual);
        else if (qual == "optimizer.proposals_per_vertex") c.proposals_per_vertex = static_cast<int>(detail::parse_int(val, qual));
        else if (qual == "optimizer.max_sweeps") c.max_sweeps = static_cast<int>(detail::parse_int(val, qual));
        else if (qual == "optimizer.converge_rel") c.converge_rel = detail::parse_double(val, qual);
        else if (qual == "optimizer.converge_sweeps") c.converge_sweeps = static_cast<int>(detail::parse_int(val, qual));
        else if (qual == "optimizer.reweight") c.reweight = detail::parse_bool(val, qual);
        else if (qual == "schedule.T") c.total_time = detail::parse_double(val, qual);
        else if (qual == "schedule.T_grid") c.t_grid = detail::parse_list(val, qual);
        else if (qual == "schedule.k") c.stretch_k = detail::parse_double(val, qual);
        else if (qual == "schedule.k_grid") c.k_grid = detail::parse_list(val, qual);
        else if (qual == "schedule.s_samples") c.s_samples = static_cast<int>(detail::parse_int(val, qual));
        else if (qual == "schedule.t_samples") c.t_samples = static_cast<int>(detail::parse_int(val, qual));
        else if (qual == "loss.kappa") c.kappa = detail::parse_double(val, qual);
        else if (qual == "simulate.trajectory_samples") c.trajectory_samples = static_cast<int>(detail::parse_int(val, qual));
        else if (qual == "simulate.wigner") c.wigner = detail::parse_bool(val, qual);
        else if (qual == "simulate.wigner_fractions") {
            c.wigner_fractions = detail::parse_list(val, qual);
            saw_wigner_fractions = true;
        }
        else if (qual == "simulate.wigner_range") c.wigner_range = detail::parse_double(val, qual);
        else if (qual == "simulate.wigner_resolution") c.wigner_resolution = static_cast<int>(detail::parse_int(val, qual));
        else if (qual == "output.dir") c.out_dir = val;
        else if (qual == "output.write_path") c.write_path = detail::parse_bool(val, qual);
        else if (qual == "output.write_schedule") c.write_schedule = detail::parse_bool(val, qual);
        else if (qual == "output.write_trajectory") c.write_trajectory = detail::parse_bool(val, qual);
        else if (qual == "output.write_sweep") c.write_sweep = detail::parse_bool(val, qual);
        else if (qual == "run.jobs") c.jobs = static_cast<int>(detail::parse_int(val, qual));
        else throw ConfigError("unknown configuration key: " + qual);
    }
    if (!saw_wigner_fractions) c.wigner_fractions = {0.0, 0.03, 0.06, 0.1, 0.2, 1.0};
    c.validate();
    return c;
}

// FNV-1a over the canonical serialization.
inline std::string config_hash(const RunConfig& c) {
    const std::string s = serialize_config(c, false);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace kerrfock
