#pragma once

// Driven Kerr cavity Hamiltonians in the rotating frame of the drive,
// H = (1/2) a^t^2 a^2 + Delta a^t a + beta (a + a^t), with chi = 1 fixing
// the time scale, plus the two-photon (Kerr parametric oscillator) variant
// H = (1/2) a^t^2 a^2 + Delta a^t a + (p/2)(a^t^2 + a^2).

#include <cmath>

#include "kerrfock/common.hpp"
#include "kerrfock/fock.hpp"

namespace kerrfock {

enum class DriveKind { Linear, TwoPhoton };

// A point in drive-parameter space: detuning Delta and drive strength beta,
// both in units of chi. beta is non-negative by convention; the drive phase
// is absorbed into the basis.
struct DrivePoint {
    double delta = 0.0;
    double beta = 0.0;

    DrivePoint() = default;
    DrivePoint(double d, double b) : delta(d), beta(b) {
        if (!(b >= 0.0)) throw FeasibilityError("drive strength beta must be non-negative");
    }
};

struct KpoPoint {
    double delta = 0.0;
    double p = 0.0;

    KpoPoint() = default;
    KpoPoint(double d, double p_) : delta(d), p(p_) {
        if (!(p_ >= 0.0)) throw FeasibilityError("two-photon drive strength p must be non-negative");
    }
};

// Bare Kerr eigenenergy of |n> at detuning Delta: n(n-1)/2 + n Delta.
inline double bare_energy(Eigen::Index n, double delta) {
    return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1) +
           static_cast<double>(n) * delta;
}

inline Operator kerr_hamiltonian(const DrivePoint& pt, Eigen::Index dim) {
    check_dim(dim);
    Matrix h = Matrix::Zero(dim, dim);
    for (Eigen::Index n = 0; n < dim; ++n) h(n, n) = bare_energy(n, pt.delta);
    for (Eigen::Index n = 1; n < dim; ++n) {
        const double c = pt.beta * std::sqrt(static_cast<double>(n));
        h(n - 1, n) += c;
        h(n, n - 1) += c;
    }
    return Operator::hermitian(std::move(h));
}

inline Operator kpo_hamiltonian(const KpoPoint& pt, Eigen::Index dim) {
    check_dim(dim);
    Matrix h = Matrix::Zero(dim, dim);
    for (Eigen::Index n = 0; n < dim; ++n) h(n, n) = bare_energy(n, pt.delta);
    for (Eigen::Index n = 0; n + 2 < dim; ++n) {
        const double c = 0.5 * pt.p * std::sqrt(static_cast<double>((n + 1) * (n + 2)));
        h(n, n + 2) += c;
        h(n + 2, n) += c;
    }
    return Operator::hermitian(std::move(h));
}

// Generic constructor over the (delta, amp) coordinates used by paths:
// amp is beta for the linear drive and p for the two-photon drive.
inline Operator drive_hamiltonian(DriveKind kind, double delta, double amp, Eigen::Index dim) {
    if (kind == DriveKind::Linear) return kerr_hamiltonian(DrivePoint(delta, amp), dim);
    return kpo_hamiltonian(KpoPoint(delta, amp), dim);
}

// Detuning Delta_l = -(l-1)/2 at which bare Fock states |n>, |m> with
// n + m = l are degenerate.
inline double crossing_detuning(int l) {
    if (l < 1) throw IndexError("crossing index l must be >= 1");
    return -0.5 * static_cast<double>(l - 1);
}

// Final detuning for target |n>: midpoint of the last crossing-free interval
// (Delta_{2n+1}, Delta_{2n-1}).
inline double final_detuning(int n_target) {
    if (n_target < 1) throw IndexError("target Fock number must be >= 1");
    return 0.5 * (crossing_detuning(2 * n_target + 1) + crossing_detuning(2 * n_target - 1));
}

// Cheap Gershgorin bound on the spectral norm, used to pick integrator steps.
inline double hamiltonian_norm_bound(DriveKind kind, double delta, double amp, Eigen::Index dim) {
    double bound = 0.0;
    for (Eigen::Index n = 0; n < dim; ++n) {
        double row = std::abs(bare_energy(n, delta));
        if (kind == DriveKind::Linear) {
            if (n > 0) row += amp * std::sqrt(static_cast<double>(n));
            if (n + 1 < dim) row += amp * std::sqrt(static_cast<double>(n + 1));
        } else {
            if (n >= 2) row += 0.5 * amp * std::sqrt(static_cast<double>(n * (n - 1)));
            if (n + 2 < dim) row += 0.5 * amp * std::sqrt(static_cast<double>((n + 1) * (n + 2)));
        }
        bound = std::max(bound, row);
    }
    return bound;
}

}  // namespace kerrfock
