#pragma once

// Time-dependent propagation along a schedule: closed-system Schroedinger
// evolution and Lindblad evolution with single-photon loss L = sqrt(kappa) a.
// Fixed-step RK4 with steps aligned to the schedule grid; the Hamiltonian is
// band-structured (tridiagonal for the linear drive, pentadiagonal for the
// two-photon drive), so one right-hand side costs O(dim^2).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "kerrfock/common.hpp"
#include "kerrfock/fock.hpp"
#include "kerrfock/model.hpp"
#include "kerrfock/schedule.hpp"

namespace kerrfock {

struct LossModel {
    double kappa = 0.0;

    LossModel() = default;
    explicit LossModel(double k) : kappa(k) {
        if (!(k >= 0.0)) throw ConfigError("loss rate kappa must be non-negative");
    }
};

struct EvolveOptions {
    double step_bound = 0.05;      // ||H|| * dt per RK4 step
    int trajectory_samples = 129;  // target count of stored snapshots
    bool store_states = true;
    double norm_tol = 1e-8;
    double trace_tol = 1e-6;
    int max_refinements = 2;
};

struct SimResult {
    bool closed = true;
    Eigen::Index dim = 0;
    int n_target = 0;
    long long steps = 0;

    std::vector<double> times;
    std::vector<double> fidelity_series;
    std::vector<Vector> psi_samples;  // closed runs, if stored
    std::vector<Matrix> rho_samples;  // open runs, if stored

    Vector final_psi;
    Matrix final_rho;

    double max_norm_drift = 0.0;      // closed: | ||psi|| - 1 |
    double max_trace_drift = 0.0;     // open:   | tr rho - 1 |
    double min_eigenvalue = 0.0;      // open: most negative eigenvalue seen
    double hermiticity_defect = 0.0;  // open
    double max_tail = 0.0;            // truncation-tail population

    double final_fidelity() const { return fidelity_series.back(); }
};

namespace detail {

// Precomputed band coefficients of H(delta, amp).
struct BandedHamiltonian {
    DriveKind kind = DriveKind::Linear;
    Eigen::Index dim = 0;
    RealVector diag0;  // n(n-1)/2
    RealVector nvec;   // n
    Vector diag0_c, nvec_c, hop_c, hop2_c;
    mutable Vector dwork;  // diag0 + delta n, reused across stages

    BandedHamiltonian(DriveKind k, Eigen::Index d) : kind(k), dim(d) {
        diag0.resize(d);
        nvec.resize(d);
        for (Eigen::Index n = 0; n < d; ++n) {
            diag0(n) = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
            nvec(n) = static_cast<double>(n);
        }
        diag0_c = diag0.cast<Complex>();
        nvec_c = nvec.cast<Complex>();
        hop_c.resize(d - 1);
        for (Eigen::Index n = 0; n + 1 < d; ++n) hop_c(n) = std::sqrt(static_cast<double>(n + 1));
        hop2_c.resize(std::max<Eigen::Index>(0, d - 2));
        for (Eigen::Index n = 0; n + 2 < d; ++n)
            hop2_c(n) = 0.5 * std::sqrt(static_cast<double>((n + 1) * (n + 2)));
        dwork.resize(d);
    }

    // out = H(delta, amp) x
    void apply(double delta, double amp, const Vector& x, Vector& out) const {
        out.array() = (diag0_c.array() + delta * nvec_c.array()) * x.array();
        if (kind == DriveKind::Linear) {
            out.head(dim - 1).array() += amp * hop_c.array() * x.tail(dim - 1).array();
            out.tail(dim - 1).array() += amp * hop_c.array() * x.head(dim - 1).array();
        } else if (dim >= 3) {
            out.head(dim - 2).array() += amp * hop2_c.array() * x.tail(dim - 2).array();
            out.tail(dim - 2).array() += amp * hop2_c.array() * x.head(dim - 2).array();
        }
    }

    // out = H rho  (row mixing only)
    void apply_left(double delta, double amp, const Matrix& rho, Matrix& out) const {
        dwork = diag0_c + delta * nvec_c;
        out.noalias() = dwork.asDiagonal() * rho;
        if (kind == DriveKind::Linear) {
            out.topRows(dim - 1).noalias() +=
                amp * (hop_c.asDiagonal() * rho.bottomRows(dim - 1));
            out.bottomRows(dim - 1).noalias() +=
                amp * (hop_c.asDiagonal() * rho.topRows(dim - 1));
        } else if (dim >= 3) {
            out.topRows(dim - 2).noalias() +=
                amp * (hop2_c.asDiagonal() * rho.bottomRows(dim - 2));
            out.bottomRows(dim - 2).noalias() +=
                amp * (hop2_c.asDiagonal() * rho.topRows(dim - 2));
        }
    }
};

// drho = -i[H, rho] + kappa (a rho a^t - (N rho + rho N)/2)
struct LindbladRhs {
    const BandedHamiltonian& h;
    double kappa;
    Matrix hrho;
    Matrix arho;

    LindbladRhs(const BandedHamiltonian& ham, double k)
        : h(ham),
          kappa(k),
          hrho(Matrix::Zero(ham.dim, ham.dim)),
          arho(Matrix::Zero(ham.dim, ham.dim)) {}

    void operator()(double delta, double amp, const Matrix& rho, Matrix& out) {
        const Eigen::Index d = h.dim;
        h.apply_left(delta, amp, rho, hrho);
        out = -imag_unit * (hrho - hrho.adjoint());
        if (kappa > 0.0) {
            arho.topRows(d - 1).noalias() = h.hop_c.asDiagonal() * rho.bottomRows(d - 1);
            arho.row(d - 1).setZero();
            out.leftCols(d - 1).noalias() +=
                kappa * (arho.rightCols(d - 1) * h.hop_c.asDiagonal());
            out.noalias() -= (0.5 * kappa) * (h.nvec_c.asDiagonal() * rho);
            out.noalias() -= (0.5 * kappa) * (rho * h.nvec_c.asDiagonal());
        }
    }
};

inline double step_norm_bound(const TimedSchedule& sched, std::size_t i, Eigen::Index dim,
                              double kappa, bool open_system) {
    const auto& a = sched.samples[i];
    const auto& b = sched.samples[std::min(i + 1, sched.samples.size() - 1)];
    const double ha = hamiltonian_norm_bound(sched.kind, a.pt.delta, a.pt.beta, dim);
    const double hb = hamiltonian_norm_bound(sched.kind, b.pt.delta, b.pt.beta, dim);
    double bound = std::max(ha, hb);
    if (open_system) bound = 2.0 * bound + 2.0 * kappa * static_cast<double>(dim);
    return bound;
}

template <bool Open>
SimResult propagate(const TimedSchedule& sched, const Vector* psi0, const Matrix* rho0,
                    double kappa, Eigen::Index dim, int n_target, const EvolveOptions& opts) {
    const auto& grid = sched.samples;
    if (grid.size() < 2) throw ConfigError("schedule has no samples");
    const std::size_t stride =
        std::max<std::size_t>(1, (grid.size() - 1) / std::max(1, opts.trajectory_samples - 1));

    BandedHamiltonian ham(sched.kind, dim);

    double step_bound = opts.step_bound;
    for (int attempt = 0;; ++attempt) {
        SimResult res;
        res.closed = !Open;
        res.dim = dim;
        res.n_target = n_target;

        Vector psi, vk1, vk2, vk3, vk4, vstage, vtmp;
        Matrix rho, mk1, mk2, mk3, mk4, mstage;
        LindbladRhs rhs(ham, kappa);
        if constexpr (Open) {
            rho = *rho0;
            mk1 = mk2 = mk3 = mk4 = mstage = Matrix::Zero(dim, dim);
        } else {
            psi = *psi0;
            vk1 = vk2 = vk3 = vk4 = vstage = vtmp = Vector::Zero(dim);
        }

        auto record = [&](double t) {
            res.times.push_back(t);
            if constexpr (Open) {
                const double tr = rho.trace().real();
                res.max_trace_drift = std::max(res.max_trace_drift, std::abs(tr - 1.0));
                res.fidelity_series.push_back(rho(n_target, n_target).real());
                DensityMatrix dm(rho);
                res.min_eigenvalue = std::min(res.min_eigenvalue, dm.min_eigenvalue());
                res.hermiticity_defect = std::max(res.hermiticity_defect, dm.hermiticity_defect());
                res.max_tail = std::max(res.max_tail, dm.tail_population());
                if (opts.store_states) res.rho_samples.push_back(rho);
            } else {
                const double nrm = psi.norm();
                res.max_norm_drift = std::max(res.max_norm_drift, std::abs(nrm - 1.0));
                res.fidelity_series.push_back(std::norm(psi(n_target)));
                res.max_tail = std::max(res.max_tail, StateVector(psi).tail_population());
                if (opts.store_states) res.psi_samples.push_back(psi);
            }
        };

        record(0.0);
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            const double t0 = grid[i].t;
            const double span = grid[i + 1].t - t0;
            if (span > 0.0) {
                const double bound = step_norm_bound(sched, i, dim, kappa, Open);
                const int nsteps =
                    std::max(1, static_cast<int>(std::ceil(span * bound / step_bound)));
                const double dt = span / nsteps;
                const double d0 = grid[i].pt.delta;
                const double b0 = grid[i].pt.beta;
                const double slope_d = (grid[i + 1].pt.delta - d0) / span;
                const double slope_b = (grid[i + 1].pt.beta - b0) / span;
                for (int k = 0; k < nsteps; ++k) {
                    const double tl = k * dt;         // offsets within the interval
                    const double tm = tl + 0.5 * dt;
                    const double tr_ = tl + dt;
                    if constexpr (Open) {
                        rhs(d0 + slope_d * tl, b0 + slope_b * tl, rho, mk1);
                        mstage = rho + (0.5 * dt) * mk1;
                        rhs(d0 + slope_d * tm, b0 + slope_b * tm, mstage, mk2);
                        mstage = rho + (0.5 * dt) * mk2;
                        rhs(d0 + slope_d * tm, b0 + slope_b * tm, mstage, mk3);
                        mstage = rho + dt * mk3;
                        rhs(d0 + slope_d * tr_, b0 + slope_b * tr_, mstage, mk4);
                        rho += (dt / 6.0) * (mk1 + 2.0 * mk2 + 2.0 * mk3 + mk4);
                    } else {
                        ham.apply(d0 + slope_d * tl, b0 + slope_b * tl, psi, vtmp);
                        vk1 = -imag_unit * vtmp;
                        vstage = psi + (0.5 * dt) * vk1;
                        ham.apply(d0 + slope_d * tm, b0 + slope_b * tm, vstage, vtmp);
                        vk2 = -imag_unit * vtmp;
                        vstage = psi + (0.5 * dt) * vk2;
                        ham.apply(d0 + slope_d * tm, b0 + slope_b * tm, vstage, vtmp);
                        vk3 = -imag_unit * vtmp;
                        vstage = psi + dt * vk3;
                        ham.apply(d0 + slope_d * tr_, b0 + slope_b * tr_, vstage, vtmp);
                        vk4 = -imag_unit * vtmp;
                        psi += (dt / 6.0) * (vk1 + 2.0 * vk2 + 2.0 * vk3 + vk4);
                    }
                    ++res.steps;
                }
            }
            if ((i + 1) % stride == 0 || i + 2 == grid.size()) record(grid[i + 1].t);
        }

        if constexpr (Open) {
            res.final_rho = rho;
        } else {
            res.final_psi = psi;
        }

        const double drift = Open ? res.max_trace_drift : res.max_norm_drift;
        const double tol = Open ? opts.trace_tol : opts.norm_tol;
        if (drift <= tol) return res;
        if (attempt >= opts.max_refinements)
            throw NumericalError("propagation drift " + std::to_string(drift) +
                                 " still exceeds tolerance after step refinement");
        step_bound *= 0.5;
    }
}

}  // namespace detail

inline double fidelity(const StateVector& psi, int n_target) {
    if (n_target < 0 || n_target >= psi.dim()) throw IndexError("target index out of range");
    return std::norm(psi.amplitudes()(n_target));
}

inline double fidelity(const DensityMatrix& rho, int n_target) {
    if (n_target < 0 || n_target >= rho.dim()) throw IndexError("target index out of range");
    return rho.matrix()(n_target, n_target).real();
}

inline SimResult evolve_closed(const TimedSchedule& sched, const StateVector& psi0, int n_target,
                               const EvolveOptions& opts = {}) {
    const Eigen::Index dim = psi0.dim();
    if (n_target < 0 || n_target >= dim) throw IndexError("target index out of range");
    if (std::abs(psi0.norm() - 1.0) > 1e-10)
        throw NumericalError("initial state vector is not normalized");
    const Vector v = psi0.amplitudes();
    return detail::propagate<false>(sched, &v, nullptr, 0.0, dim, n_target, opts);
}

inline SimResult evolve_lindblad(const TimedSchedule& sched, const DensityMatrix& rho0,
                                 const LossModel& loss, int n_target,
                                 const EvolveOptions& opts = {}) {
    const Eigen::Index dim = rho0.dim();
    if (n_target < 0 || n_target >= dim) throw IndexError("target index out of range");
    if (std::abs(rho0.trace_real() - 1.0) > 1e-8)
        throw NumericalError("initial density matrix is not trace-normalized");
    if (rho0.hermiticity_defect() > 1e-10)
        throw NumericalError("initial density matrix is not Hermitian");
    const Matrix m = rho0.matrix();
    return detail::propagate<true>(sched, nullptr, &m, loss.kappa, dim, n_target, opts);
}

// One (T, k) grid point of the Rabi-phase tuning scan.
struct RabiGridPoint {
    double total_time = 0.0;
    double stretch_k = 1.0;
    double fidelity = 0.0;
    double runtime_s = 0.0;
};

struct RabiScan {
    std::vector<RabiGridPoint> table;  // grid order: T outer, k inner
    std::size_t best = 0;

    const RabiGridPoint& best_point() const { return table.at(best); }
};

// Simulates every (T, k) combination from vacuum and reports the argmax of
// the final fidelity. The penalty decomposition of the path is shared; grid
// points are independent and merge deterministically in grid order.
inline RabiScan rabi_tuned_fidelity(const ParamPath& path, const std::vector<double>& t_list,
                                    const std::vector<double>& k_list, const LossModel& loss,
                                    int n_target, const ScheduleOptions& sched_opts = {},
                                    EvolveOptions evolve_opts = {}, int jobs = 1) {
    if (t_list.empty() || k_list.empty()) throw ConfigError("T and k grids must be nonempty");
    const Eigen::Index dim = path.spec.resolved_dim();
    evolve_opts.store_states = false;

    const SegmentedPath segmented(path, sched_opts.s_samples, jobs);

    RabiScan scan;
    scan.table.resize(t_list.size() * k_list.size());
    parallel_for(scan.table.size(), jobs, [&](std::size_t idx) {
        const auto tic = std::chrono::steady_clock::now();
        const double T = t_list[idx / k_list.size()];
        const double k = k_list[idx % k_list.size()];
        const TimedSchedule sched = segmented.schedule(T, k, sched_opts.t_samples);
        double f;
        if (loss.kappa == 0.0) {
            f = evolve_closed(sched, fock_state(0, dim), n_target, evolve_opts).final_fidelity();
        } else {
            f = evolve_lindblad(sched, DensityMatrix::pure(fock_state(0, dim)), loss, n_target,
                                evolve_opts)
                    .final_fidelity();
        }
        RabiGridPoint& row = scan.table[idx];
        row.total_time = T;
        row.stretch_k = k;
        row.fidelity = f;
        row.runtime_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
    });
    for (std::size_t i = 1; i < scan.table.size(); ++i)
        if (scan.table[i].fidelity > scan.table[scan.best].fidelity) scan.best = i;
    return scan;
}

}  // namespace kerrfock
