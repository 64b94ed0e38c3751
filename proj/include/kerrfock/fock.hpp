#pragma once

// Dense operator/state algebra on a truncated Fock basis |0>..|dim-1>.
// Everything is dimensionless: the Kerr coefficient chi is fixed to 1.

#include <cmath>
#include <iostream>
#include <utility>

#include <unsupported/Eigen/MatrixFunctions>

#include "kerrfock/common.hpp"

namespace kerrfock {

inline constexpr double kHermitianTol = 1e-12;

inline void check_dim(Eigen::Index dim) {
    if (dim < 2) throw DimensionError("Fock truncation dimension must be >= 2");
}

class Operator {
  public:
    static Operator dense(Matrix m) {
        if (m.rows() != m.cols()) throw DimensionError("operator matrix must be square");
        check_dim(m.rows());
        return Operator(std::move(m), false);
    }

    // Validates A = A^dagger elementwise before flagging.
    static Operator hermitian(Matrix m) {
        if (m.rows() != m.cols()) throw DimensionError("operator matrix must be square");
        check_dim(m.rows());
        const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (asym > kHermitianTol)
            throw NumericalError("operator flagged Hermitian violates symmetry: max |A - A^t| = " +
                                 std::to_string(asym));
        return Operator(std::move(m), true);
    }

    Eigen::Index dim() const { return mat_.rows(); }
    const Matrix& matrix() const { return mat_; }
    bool is_hermitian() const { return hermitian_; }

    Operator adjoint() const { return Operator(mat_.adjoint(), hermitian_); }

  private:
    Operator(Matrix m, bool herm) : mat_(std::move(m)), hermitian_(herm) {}
    Matrix mat_;
    bool hermitian_;
};

class StateVector {
  public:
    StateVector(Vector amplitudes) : amps_(std::move(amplitudes)) {
        check_dim(amps_.size());
    }

    Eigen::Index dim() const { return amps_.size(); }
    const Vector& amplitudes() const { return amps_; }
    double norm() const { return amps_.norm(); }

    StateVector normalized() const {
        const double n = norm();
        if (n <= 0.0) throw NumericalError("cannot normalize a zero state vector");
        return StateVector(amps_ / n);
    }

    // Population in the top `fraction` of basis indices; a proxy for how
    // much the truncation is being stressed.
    double tail_population(double fraction = 0.1) const {
        const Eigen::Index d = dim();
        const Eigen::Index tail = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(fraction * d));
        return amps_.tail(tail).squaredNorm();
    }

  private:
    Vector amps_;
};

class DensityMatrix {
  public:
    DensityMatrix(Matrix entries) : mat_(std::move(entries)) {
        if (mat_.rows() != mat_.cols()) throw DimensionError("density matrix must be square");
        check_dim(mat_.rows());
    }

    static DensityMatrix pure(const StateVector& psi) {
        return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
    }

    Eigen::Index dim() const { return mat_.rows(); }
    const Matrix& matrix() const { return mat_; }
    double trace_real() const { return mat_.trace().real(); }
    double hermiticity_defect() const { return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff(); }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (mat_ + mat_.adjoint()),
                                                 Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    double tail_population(double fraction = 0.1) const {
        const Eigen::Index d = dim();
        const Eigen::Index tail = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(fraction * d));
        double p = 0.0;
        for (Eigen::Index n = d - tail; n < d; ++n) p += mat_(n, n).real();
        return p;
    }

  private:
    Matrix mat_;
};

// a|n> = sqrt(n)|n-1>
inline Operator annihilation(Eigen::Index dim) {
    check_dim(dim);
    Matrix a = Matrix::Zero(dim, dim);
    for (Eigen::Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return Operator::dense(std::move(a));
}

inline Operator creation(Eigen::Index dim) { return annihilation(dim).adjoint(); }

inline Operator number_operator(Eigen::Index dim) {
    check_dim(dim);
    Matrix n = Matrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return Operator::hermitian(std::move(n));
}

inline Operator identity_operator(Eigen::Index dim) {
    check_dim(dim);
    return Operator::hermitian(Matrix::Identity(dim, dim));
}

// x-like quadrature drive operator a + a^dagger.
inline Operator drive_operator(Eigen::Index dim) {
    check_dim(dim);
    Matrix m = Matrix::Zero(dim, dim);
    for (Eigen::Index n = 1; n < dim; ++n) {
        const double s = std::sqrt(static_cast<double>(n));
        m(n - 1, n) = s;
        m(n, n - 1) = s;
    }
    return Operator::hermitian(std::move(m));
}

// Two-photon drive operator (a^dagger^2 + a^2)/2, coupling |n> and |n+2>.
inline Operator two_photon_operator(Eigen::Index dim) {
    check_dim(dim);
    Matrix m = Matrix::Zero(dim, dim);
    for (Eigen::Index n = 0; n + 2 < dim; ++n) {
        const double s = 0.5 * std::sqrt(static_cast<double>((n + 1) * (n + 2)));
        m(n, n + 2) = s;
        m(n + 2, n) = s;
    }
    return Operator::hermitian(std::move(m));
}

// D(alpha) = exp(alpha a^dagger - alpha^* a), evaluated by scaling-and-squaring
// matrix exponential so the result is unitary to near machine precision.
inline Operator displacement(Complex alpha, Eigen::Index dim) {
    check_dim(dim);
    if (std::norm(alpha) > 0.25 * static_cast<double>(dim) && !quiet()) {
        std::cerr << "kerrfock: warning: displacement |alpha|^2 = " << std::norm(alpha)
                  << " is large for dim = " << dim << "; truncation error may be significant\n";
    }
    if (alpha == Complex{0.0, 0.0}) return identity_operator(dim);
    const Matrix a = annihilation(dim).matrix();
    Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
    return Operator::dense(gen.exp());
}

inline StateVector fock_state(Eigen::Index n, Eigen::Index dim) {
    check_dim(dim);
    if (n < 0 || n >= dim) throw IndexError("Fock index out of range for truncation");
    Vector v = Vector::Zero(dim);
    v(n) = 1.0;
    return StateVector(std::move(v));
}

inline StateVector displaced_fock(Complex alpha, Eigen::Index n, Eigen::Index dim) {
    if (alpha == Complex{0.0, 0.0}) return fock_state(n, dim);
    const StateVector base = fock_state(n, dim);
    return StateVector(displacement(alpha, dim).matrix() * base.amplitudes()).normalized();
}

inline StateVector coherent_state(Complex alpha, Eigen::Index dim) {
    return displaced_fock(alpha, 0, dim);
}

inline Complex expectation(const Operator& op, const StateVector& psi) {
    if (op.dim() != psi.dim()) throw DimensionError("operator/state dimension mismatch");
    return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

inline Complex expectation(const Operator& op, const DensityMatrix& rho) {
    if (op.dim() != rho.dim()) throw DimensionError("operator/state dimension mismatch");
    return (op.matrix() * rho.matrix()).trace();
}

}  // namespace kerrfock
