#pragma once

// Eigensystems with deterministic ordering and phase, and the drive/detuning
// coupling matrix elements L_n = <phi_n|a+a^t|phi_0>, M_n = <phi_n|a^t a|phi_0>
// that enter the adiabatic penalty.

#include <cmath>
#include <utility>

#include "kerrfock/common.hpp"
#include "kerrfock/fock.hpp"
#include "kerrfock/model.hpp"

namespace kerrfock {

// Eigenpairs sorted ascending in energy. Columns of `states` are the
// eigenvectors; the largest-magnitude amplitude of each is made real and
// positive so repeated runs produce identical output.
struct EigenSystem {
    RealVector energies;
    Matrix states;

    Eigen::Index dim() const { return energies.size(); }

    StateVector state(Eigen::Index k) const {
        if (k < 0 || k >= dim()) throw IndexError("eigenstate index out of range");
        return StateVector(states.col(k));
    }

    double ground_gap() const { return energies(1) - energies(0); }
};

namespace detail {

inline void fix_phases(Matrix& vecs) {
    for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
        Eigen::Index imax = 0;
        double best = 0.0;
        for (Eigen::Index i = 0; i < vecs.rows(); ++i) {
            const double a = std::abs(vecs(i, k));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        const Complex pivot = vecs(imax, k);
        if (best > 0.0) vecs.col(k) *= std::conj(pivot) / best;
    }
}

}  // namespace detail

inline EigenSystem eigensystem(const Operator& h) {
    if (!h.is_hermitian()) throw NumericalError("eigensystem requires a Hermitian-flagged operator");
    const Eigen::Index d = h.dim();
    EigenSystem es;
    // The Kerr and KPO Hamiltonians are real symmetric; use the real solver
    // when possible, it is both faster and exactly phase-free.
    if (h.matrix().imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h.matrix().real());
        if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
        es.energies = solver.eigenvalues();
        es.states = solver.eigenvectors().cast<Complex>();
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
        if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
        es.energies = solver.eigenvalues();
        es.states = solver.eigenvectors();
    }
    detail::fix_phases(es.states);
    (void)d;
    return es;
}

// Couplings of the ground state to all excited states, indexed so that
// l_vals[i] belongs to eigenstate i+1. gaps[i] = E_{i+1} - E_0.
struct CouplingRow {
    Vector l_vals;
    Vector m_vals;
    RealVector gaps;

    Eigen::Index count() const { return gaps.size(); }
};

inline CouplingRow coupling_row(const EigenSystem& es, DriveKind kind = DriveKind::Linear) {
    const Eigen::Index d = es.dim();
    if (es.ground_gap() < 1e-12)
        throw DegeneratePointError("ground state is degenerate; penalty is singular here");

    const Matrix drive = (kind == DriveKind::Linear ? drive_operator(d) : two_photon_operator(d)).matrix();
    const Vector ground = es.states.col(0);

    Vector drive_on_ground = drive * ground;
    Vector number_on_ground = ground;
    for (Eigen::Index n = 0; n < d; ++n) number_on_ground(n) *= static_cast<double>(n);

    CouplingRow row;
    row.l_vals.resize(d - 1);
    row.m_vals.resize(d - 1);
    row.gaps.resize(d - 1);
    for (Eigen::Index k = 1; k < d; ++k) {
        row.l_vals(k - 1) = es.states.col(k).dot(drive_on_ground);
        row.m_vals(k - 1) = es.states.col(k).dot(number_on_ground);
        row.gaps(k - 1) = es.energies(k) - es.energies(0);
    }
    return row;
}

inline EigenSystem eigensystem_at(DriveKind kind, double delta, double amp, Eigen::Index dim) {
    return eigensystem(drive_hamiltonian(kind, delta, amp, dim));
}

}  // namespace kerrfock
